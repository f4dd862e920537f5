//! Orbit codimensions from canonical structures.
//!
//! Every total is a sum of per-summand codimensions plus pairwise
//! interactions, grouped into the components `c0 .. c12`. Two profiles exist:
//! `AsPrinted` follows the printed formulas, `Reconciled` replaces the Star
//! Type I interaction with the value the matrix equations actually have.

use num_traits::One;

use crate::blocks::{BlockError, CongruenceStructure, PairCanonicalStructure, Pivot, TypeOne, TypeTwo, Variant};
use crate::oracle::{self, OracleError};
use crate::{GaussianRational, Kind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodimError {
    #[error("bad structure: {0}")]
    BadStructure(String),
    #[error("no tabulated interaction between {0} and {1}")]
    UnsupportedPair(String, String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<BlockError> for CodimError {
    fn from(e: BlockError) -> Self {
        CodimError::BadStructure(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Profile {
    AsPrinted,
    Reconciled,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::AsPrinted => "as-printed",
            Profile::Reconciled => "reconciled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CodimKind {
    CongT,
    CongStar,
    PairT,
    PairStar,
}

impl CodimKind {
    fn kind(self) -> Kind {
        match self {
            CodimKind::CongT | CodimKind::PairT => Kind::T,
            CodimKind::CongStar | CodimKind::PairStar => Kind::Star,
        }
    }

}

/// Components of a codimension. Star totals are real dimensions and carry no `c12`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodimBreakdown {
    pub c0: usize,
    pub c1: usize,
    pub c2: usize,
    pub c00: usize,
    pub c11: usize,
    pub c22: usize,
    pub c01: usize,
    pub c02: usize,
    pub c12: Option<usize>,
    pub total: usize,
    pub kind: CodimKind,
    pub profile: Profile,
}

/// One summand of a canonical structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Summand {
    /// `J_p(0)`
    Zero(usize),
    /// `Gamma_q` or `alpha Delta_q`
    One(TypeOne),
    /// `H_{2m}(mu)`
    Two(TypeTwo),
}

impl std::fmt::Display for Summand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Summand::Zero(p) => write!(f, "J_{p}(0)"),
            Summand::One(t) if t.alpha.is_one() => write!(f, "Type I of size {}", t.size),
            Summand::One(t) => write!(f, "({})Delta_{}", t.alpha, t.size),
            Summand::Two(t) => write!(f, "H_{}({})", 2 * t.half, t.mu),
        }
    }
}

fn summands(s: &CongruenceStructure) -> Vec<Summand> {
    let mut v: Vec<Summand> = s.type0_in_order().into_iter().map(Summand::Zero).collect();
    v.extend(s.type1.iter().cloned().map(Summand::One));
    v.extend(s.type2.iter().cloned().map(Summand::Two));
    v
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Codimension of a single summand.
fn self_codim(b: &Summand, kind: Kind) -> usize {
    match (b, kind) {
        (Summand::Zero(p), Kind::T) => ceil_half(*p),
        (Summand::Zero(p), Kind::Star) => 2 * ceil_half(*p),
        (Summand::One(t), Kind::T) => t.size / 2,
        (Summand::One(t), Kind::Star) => t.size,
        (Summand::Two(t), Kind::T) => {
            // H_{2m}((-1)^m) pays a surcharge
            let m = t.half;
            let sign = GaussianRational::int(if m % 2 == 0 { 1 } else { -1 });
            m + if t.mu == sign { 2 * ceil_half(m) } else { 0 }
        }
        (Summand::Two(t), Kind::Star) => 2 * t.half,
    }
}

fn is_pm_one(z: &GaussianRational) -> bool {
    z.is_one() || (-z).is_one()
}

fn pm_equal(a: &GaussianRational, b: &GaussianRational) -> bool {
    a == b || a == &-b
}

/// Tabulated interaction between two summands, as used by the component sums.
///
/// `pair_printed` selects the printed pair-Star Type I condition, whose
/// modulus test holds for every pair of unit scalars.
fn interaction(a: &Summand, b: &Summand, kind: Kind, profile: Profile, pair_printed: bool) -> Result<usize, CodimError> {
    use Summand::*;
    let star = kind == Kind::Star;
    let scale = if star { 2 } else { 1 };
    Ok(match (a, b) {
        (Zero(x), Zero(y)) => {
            let (pi, pj) = if x >= y { (*x, *y) } else { (*y, *x) };
            scale
                * if pj % 2 == 0 {
                    pj
                } else if pi != pj {
                    pi
                } else {
                    pi + 1
                }
        }
        (Zero(p), One(t)) | (One(t), Zero(p)) => {
            if p % 2 == 1 {
                scale * t.size
            } else {
                0
            }
        }
        (Zero(p), Two(t)) | (Two(t), Zero(p)) => {
            if p % 2 == 1 {
                if star {
                    4 * t.half
                } else {
                    2 * t.half
                }
            } else {
                0
            }
        }
        (One(s), One(t)) => {
            let (qi, qj) = (s.size, t.size);
            if !star {
                if qi % 2 == qj % 2 {
                    qi.min(qj)
                } else {
                    0
                }
            } else {
                match profile {
                    Profile::AsPrinted if pair_printed => qi.min(qj),
                    Profile::AsPrinted => {
                        if pm_equal(&s.alpha, &t.alpha) {
                            qi.min(qj)
                        } else {
                            0
                        }
                    }
                    Profile::Reconciled => {
                        // the coupling is real-two-dimensional per unit of min size
                        if pm_equal(&s.alpha, &t.alpha) {
                            2 * qi.min(qj)
                        } else {
                            0
                        }
                    }
                }
            }
        }
        (Two(s), Two(t)) => {
            let m = s.half.min(t.half);
            if star {
                if s.mu == t.mu {
                    4 * m
                } else {
                    0
                }
            } else if s.mu == t.mu && is_pm_one(&s.mu) {
                4 * m
            } else if (s.mu != t.mu && (&s.mu * &t.mu).is_one()) || (s.mu == t.mu && !is_pm_one(&s.mu)) {
                2 * m
            } else {
                0
            }
        }
        (One(g), Two(h)) | (Two(h), One(g)) => {
            if star {
                // the * formulas have no Type I / Type II coupling term
                0
            } else {
                let k = g.size;
                let sign = GaussianRational::int(if k % 2 == 1 { 1 } else { -1 });
                if h.mu == sign {
                    2 * k.min(h.half)
                } else {
                    0
                }
            }
        }
    })
}

/// Interaction of two canonical summands under the given profile.
pub fn interaction_formula(a: &Summand, b: &Summand, kind: Kind, profile: Profile) -> Result<usize, CodimError> {
    for x in [a, b] {
        if let Summand::One(t) = x {
            if kind == Kind::T && !t.alpha.is_one() {
                return Err(CodimError::UnsupportedPair(a.to_string(), b.to_string()));
            }
        }
    }
    interaction(a, b, kind, profile, false)
}

fn breakdown(s: &CongruenceStructure, ck: CodimKind, profile: Profile) -> Result<CodimBreakdown, CodimError> {
    s.validate()?;
    let kind = ck.kind();
    if s.kind != kind {
        return Err(CodimError::BadStructure("structure kind does not match the requested codimension".into()));
    }
    let parts = summands(s);
    let mut b = CodimBreakdown {
        c0: 0,
        c1: 0,
        c2: 0,
        c00: 0,
        c11: 0,
        c22: 0,
        c01: 0,
        c02: 0,
        c12: (kind == Kind::T).then_some(0),
        total: 0,
        kind: ck,
        profile,
    };
    for x in &parts {
        let v = self_codim(x, kind);
        match x {
            Summand::Zero(_) => b.c0 += v,
            Summand::One(_) => b.c1 += v,
            Summand::Two(_) => b.c2 += v,
        }
    }
    let pair_printed = ck == CodimKind::PairStar && profile == Profile::AsPrinted;
    for (i, x) in parts.iter().enumerate() {
        for y in &parts[i + 1..] {
            let v = interaction(x, y, kind, profile, pair_printed)?;
            let slot = match (x, y) {
                (Summand::Zero(_), Summand::Zero(_)) => &mut b.c00,
                (Summand::One(_), Summand::One(_)) => &mut b.c11,
                (Summand::Two(_), Summand::Two(_)) => &mut b.c22,
                (Summand::Zero(_), Summand::One(_)) | (Summand::One(_), Summand::Zero(_)) => &mut b.c01,
                (Summand::Zero(_), Summand::Two(_)) | (Summand::Two(_), Summand::Zero(_)) => &mut b.c02,
                _ => match &mut b.c12 {
                    Some(c) => c,
                    None => {
                        debug_assert_eq!(v, 0);
                        continue;
                    }
                },
            };
            *slot += v;
        }
    }
    b.total = b.c0 + b.c1 + b.c2 + b.c00 + b.c11 + b.c22 + b.c01 + b.c02 + b.c12.unwrap_or(0);
    Ok(b)
}

/// Codimension of the congruence orbit of the realized structure.
pub fn codim_congruence(s: &CongruenceStructure, profile: Profile) -> Result<CodimBreakdown, CodimError> {
    let ck = match s.kind {
        Kind::T => CodimKind::CongT,
        Kind::Star => CodimKind::CongStar,
    };
    breakdown(s, ck, profile)
}

/// Codimension of the equivalence orbit of a pair; the pivot does not enter.
pub fn codim_pair(s: &PairCanonicalStructure, profile: Profile) -> Result<CodimBreakdown, CodimError> {
    let ck = match s.structure.kind {
        Kind::T => CodimKind::PairT,
        Kind::Star => CodimKind::PairStar,
    };
    breakdown(&s.structure, ck, profile)
}

/// A structure on which a formula and the oracle disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub structure: CongruenceStructure,
    /// `None` for congruence orbits, the realized pivot for pair orbits
    pub pivot: Option<Pivot>,
    pub profile: Profile,
    pub formula: CodimBreakdown,
    /// real dimension for Star, complex dimension for T
    pub oracle: usize,
}

fn oracle_value(n: &oracle::LinearSystemNullity) -> usize {
    n.complex_dim.unwrap_or(n.real_dim)
}

/// Compare the formula for the congruence orbit with the oracle nullity.
pub fn check_congruence(s: &CongruenceStructure, profile: Profile) -> Result<Option<Discrepancy>, CodimError> {
    let formula = codim_congruence(s, profile)?;
    let got = oracle_value(&oracle::nullity_congruence_system(&s.realize()?, s.kind)?);
    Ok((got != formula.total).then(|| Discrepancy {
        structure: s.clone(),
        pivot: None,
        profile,
        formula,
        oracle: got,
    }))
}

/// Compare the formula for the pair orbit with the oracle on the realized pair.
pub fn check_pair(s: &PairCanonicalStructure, profile: Profile) -> Result<Option<Discrepancy>, CodimError> {
    let formula = codim_pair(s, profile)?;
    let (e, q) = s.realize(Variant::Standard)?;
    let got = oracle_value(&oracle::nullity_pair_system(&e, &q, s.structure.kind)?);
    Ok((got != formula.total).then(|| Discrepancy {
        structure: s.structure.clone(),
        pivot: Some(s.pivot),
        profile,
        formula,
        oracle: got,
    }))
}

/// All normalized structures of total size `1..=max_dim` whose parameters come
/// from the given lists (inadmissible parameters are skipped).
pub fn enumerate_structures(
    kind: Kind,
    max_dim: usize,
    mus: &[GaussianRational],
    alphas: &[GaussianRational],
) -> Vec<CongruenceStructure> {
    let mut atoms: Vec<(usize, Summand)> = Vec::new();
    for p in 1..=max_dim {
        atoms.push((p, Summand::Zero(p)));
    }
    for q in 1..=max_dim {
        match kind {
            Kind::T => atoms.push((q, Summand::One(TypeOne { size: q, alpha: GaussianRational::one() }))),
            Kind::Star => {
                for a in alphas {
                    atoms.push((q, Summand::One(TypeOne { size: q, alpha: a.clone() })));
                }
            }
        }
    }
    for m in 1..=max_dim / 2 {
        let mut seen: Vec<GaussianRational> = Vec::new();
        for mu in mus {
            let probe = CongruenceStructure::new(kind).with_h(m, mu.clone());
            let Ok(norm) = probe.normalize() else { continue };
            let mu = norm.type2[0].mu.clone();
            if !seen.contains(&mu) {
                seen.push(mu.clone());
                atoms.push((2 * m, Summand::Two(TypeTwo { half: m, mu })));
            }
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        atoms: &[(usize, Summand)],
        start: usize,
        room: usize,
        chosen: &mut Vec<usize>,
        kind: Kind,
        out: &mut Vec<CongruenceStructure>,
    ) {
        if !chosen.is_empty() {
            let mut s = CongruenceStructure::new(kind);
            for &k in chosen.iter() {
                match &atoms[k].1 {
                    Summand::Zero(p) => s.type0.push(*p),
                    Summand::One(t) => s.type1.push(t.clone()),
                    Summand::Two(t) => s.type2.push(t.clone()),
                }
            }
            out.push(s.normalize().expect("enumerated atoms are admissible"));
        }
        for k in start..atoms.len() {
            if atoms[k].0 <= room {
                chosen.push(k);
                rec(atoms, k, room - atoms[k].0, chosen, kind, out);
                chosen.pop();
            }
        }
    }
    rec(&atoms, 0, max_dim, &mut chosen, kind, &mut out);
    out
}

impl CodimBreakdown {
    /// Components that differ from `other`, by name.
    pub fn differing_components(&self, other: &CodimBreakdown) -> Vec<&'static str> {
        let a = self.components();
        let b = other.components();
        a.iter().zip(b.iter()).filter(|(x, y)| x.1 != y.1).map(|(x, _)| x.0).collect()
    }

    pub fn components(&self) -> [(&'static str, usize); 9] {
        [
            ("c0", self.c0),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c00", self.c00),
            ("c11", self.c11),
            ("c22", self.c22),
            ("c01", self.c01),
            ("c02", self.c02),
            ("c12", self.c12.unwrap_or(0)),
        ]
    }
}
