//! The canonical block zoo and descriptors for canonical structures.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::{ExactMatrix, GaussianRational, Kind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlockError {
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("bad structure: {0}")]
    BadStructure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    J,
    Gamma,
    Delta,
    H,
    F,
    G,
}

/// Build one canonical block. `H` has dimension `2 * size`; `F` and `G`
/// are `size x (size + 1)`.
pub fn build_block(kind: BlockKind, size: usize, param: Option<&GaussianRational>) -> Result<ExactMatrix, BlockError> {
    use BlockKind::*;
    if size == 0 && !matches!(kind, F | G) {
        return Err(BlockError::BadParam(format!("{kind:?} needs size >= 1")));
    }
    let need = |p: Option<&GaussianRational>| {
        p.cloned().ok_or_else(|| BlockError::BadParam(format!("{kind:?} needs a parameter")))
    };
    let n = size;
    Ok(match kind {
        J => jordan(n, &need(param)?),
        Gamma => ExactMatrix::from_fn(n, n, |i, j| {
            let sign = if (n - 1 - i) % 2 == 0 { 1 } else { -1 };
            if i + j == n - 1 || (i >= 1 && i + j == n) {
                GaussianRational::int(sign)
            } else {
                GaussianRational::zero()
            }
        }),
        Delta => ExactMatrix::from_fn(n, n, |i, j| {
            if i + j == n - 1 {
                GaussianRational::one()
            } else if i >= 1 && i + j == n {
                GaussianRational::i()
            } else {
                GaussianRational::zero()
            }
        }),
        H => {
            let mu = need(param)?;
            if mu.is_zero() {
                return Err(BlockError::BadParam("H block needs mu != 0".into()));
            }
            let mut h = ExactMatrix::zeros(2 * n, 2 * n);
            h.set_block(0, n, &ExactMatrix::identity(n));
            h.set_block(n, 0, &jordan(n, &mu));
            h
        }
        F => ExactMatrix::from_fn(n, n + 1, |i, j| one_if(j == i + 1)),
        G => ExactMatrix::from_fn(n, n + 1, |i, j| one_if(j == i)),
    })
}

fn one_if(b: bool) -> GaussianRational {
    if b {
        GaussianRational::one()
    } else {
        GaussianRational::zero()
    }
}

fn jordan(n: usize, lambda: &GaussianRational) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda.clone()
        } else {
            one_if(j == i + 1)
        }
    })
}

/// `antidiag(1, -1, 1, ...)` read from the top-right corner down, or all ones.
fn antidiag(n: usize, alternating: bool) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |i, j| {
        if i + j != n - 1 {
            GaussianRational::zero()
        } else if alternating && i % 2 == 1 {
            GaussianRational::int(-1)
        } else {
            GaussianRational::one()
        }
    })
}

/// Type I summand: `Gamma_size` for T kind (alpha is then always 1), or
/// `alpha * Delta_size` for Star kind with `|alpha| = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeOne {
    pub size: usize,
    pub alpha: GaussianRational,
}

/// Type II summand `H_{2 half}(mu)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeTwo {
    pub half: usize,
    pub mu: GaussianRational,
}

/// Multiset description of a congruence canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruenceStructure {
    pub kind: Kind,
    /// sizes of `J_p(0)` summands
    pub type0: Vec<usize>,
    pub type1: Vec<TypeOne>,
    pub type2: Vec<TypeTwo>,
}

impl CongruenceStructure {
    pub fn new(kind: Kind) -> Self {
        CongruenceStructure { kind, type0: vec![], type1: vec![], type2: vec![] }
    }

    pub fn with_type0(mut self, p: usize) -> Self {
        self.type0.push(p);
        self
    }

    pub fn with_gamma(mut self, q: usize) -> Self {
        self.type1.push(TypeOne { size: q, alpha: GaussianRational::one() });
        self
    }

    pub fn with_delta(mut self, q: usize, alpha: GaussianRational) -> Self {
        self.type1.push(TypeOne { size: q, alpha });
        self
    }

    pub fn with_h(mut self, half: usize, mu: GaussianRational) -> Self {
        self.type2.push(TypeTwo { half, mu });
        self
    }

    pub fn dim(&self) -> usize {
        self.type0.iter().sum::<usize>()
            + self.type1.iter().map(|t| t.size).sum::<usize>()
            + self.type2.iter().map(|t| 2 * t.half).sum::<usize>()
    }

    /// Dimension of the nonsingular (Type I and II) part.
    pub fn regular_dim(&self) -> usize {
        self.dim() - self.type0.iter().sum::<usize>()
    }

    /// Admissibility of every summand; does not require canonical representatives.
    pub fn validate(&self) -> Result<(), BlockError> {
        let bad = |m: String| Err(BlockError::BadParam(m));
        if self.type0.iter().any(|&p| p == 0)
            || self.type1.iter().any(|t| t.size == 0)
            || self.type2.iter().any(|t| t.half == 0)
        {
            return Err(BlockError::BadStructure("block sizes must be positive".into()));
        }
        for t in &self.type1 {
            match self.kind {
                Kind::T if !t.alpha.is_one() => return bad(format!("Gamma block carries alpha = {}", t.alpha)),
                Kind::Star if !t.alpha.is_unit_modulus() => return bad(format!("|alpha| != 1 for alpha = {}", t.alpha)),
                _ => {}
            }
        }
        for t in &self.type2 {
            match self.kind {
                Kind::T => {
                    if t.mu.is_zero() || t.mu == forbidden_mu(t.half) {
                        return bad(format!("H_{}({}) is not a Type II block", 2 * t.half, t.mu));
                    }
                }
                Kind::Star => {
                    if t.mu.norm_sqr() <= num_rational::BigRational::one() {
                        return bad(format!("Star Type II needs |mu| > 1, got {}", t.mu));
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical representatives and sorted summands.
    pub fn normalize(&self) -> Result<Self, BlockError> {
        self.validate()?;
        let mut s = self.clone();
        if s.kind == Kind::T {
            for t in &mut s.type2 {
                t.mu = mu_representative(&t.mu);
            }
        }
        s.type0.sort_unstable_by(|a, b| b.cmp(a));
        s.type1.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.alpha.cmp_lex(&b.alpha)));
        s.type2.sort_by(|a, b| b.half.cmp(&a.half).then_with(|| a.mu.cmp_lex(&b.mu)));
        Ok(s)
    }

    /// Realize as a single matrix: Type II (ascending mu), Type I (ascending), Type 0 (descending).
    pub fn realize(&self) -> Result<ExactMatrix, BlockError> {
        let (regular, nilpotent) = self.realized_parts()?;
        let parts: Vec<ExactMatrix> = regular.into_iter().chain(nilpotent).collect();
        Ok(ExactMatrix::direct_sum_all(&parts))
    }

    /// The regular summands and the `J_p(0)` summands, each in realization order.
    pub(crate) fn realized_parts(&self) -> Result<(Vec<ExactMatrix>, Vec<ExactMatrix>), BlockError> {
        self.validate()?;
        let mut regular = Vec::new();
        for t in self.type2_in_order() {
            regular.push(build_block(BlockKind::H, t.half, Some(&t.mu))?);
        }
        for t in self.type1_in_order() {
            let b = match self.kind {
                Kind::T => build_block(BlockKind::Gamma, t.size, None)?,
                Kind::Star => build_block(BlockKind::Delta, t.size, None)?.scale(&t.alpha),
            };
            regular.push(b);
        }
        let zero = GaussianRational::zero();
        let nilpotent = self
            .type0_in_order()
            .into_iter()
            .map(|p| build_block(BlockKind::J, p, Some(&zero)))
            .collect::<Result<_, _>>()?;
        Ok((regular, nilpotent))
    }

    pub(crate) fn type2_in_order(&self) -> Vec<&TypeTwo> {
        let mut v: Vec<&TypeTwo> = self.type2.iter().collect();
        v.sort_by(|a, b| a.mu.cmp_lex(&b.mu).then(a.half.cmp(&b.half)));
        v
    }

    pub(crate) fn type1_in_order(&self) -> Vec<&TypeOne> {
        let mut v: Vec<&TypeOne> = self.type1.iter().collect();
        v.sort_by(|a, b| a.size.cmp(&b.size).then_with(|| a.alpha.cmp_lex(&b.alpha)));
        v
    }

    pub(crate) fn type0_in_order(&self) -> Vec<usize> {
        let mut v = self.type0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

/// `(-1)^{m+1}`, the excluded Type II parameter for `H_{2m}` under T-congruence.
pub(crate) fn forbidden_mu(half: usize) -> GaussianRational {
    GaussianRational::int(if half % 2 == 1 { 1 } else { -1 })
}

/// The member of `{mu, 1/mu}` kept in normalized T structures: larger modulus;
/// on the unit circle, nonnegative imaginary part, then nonnegative real part.
pub fn mu_representative(mu: &GaussianRational) -> GaussianRational {
    let inv = mu.inv().expect("mu must be nonzero");
    match mu.norm_sqr().cmp(&num_rational::BigRational::one()) {
        Ordering::Greater => mu.clone(),
        Ordering::Less => inv,
        Ordering::Equal => {
            let key = |z: &GaussianRational| (!z.im().is_negative(), !z.re().is_negative());
            if key(mu) >= key(&inv) {
                mu.clone()
            } else {
                inv
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pivot {
    ENonsingular,
    QNonsingular,
}

/// Canonical form of a pair with one nonsingular member: the congruence
/// structure of `E^T Q` (or `E^* Q`) plus which side was nonsingular.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairCanonicalStructure {
    pub pivot: Pivot,
    pub structure: CongruenceStructure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Standard,
    /// `(I_k, Gamma_k)` and `(I_2k, H_2k(mu))` swapped for the forms that avoid Gamma and H.
    Alternate,
}

impl PairCanonicalStructure {
    pub fn normalize(&self) -> Result<Self, BlockError> {
        Ok(PairCanonicalStructure { pivot: self.pivot, structure: self.structure.normalize()? })
    }

    pub fn realize(&self, variant: Variant) -> Result<(ExactMatrix, ExactMatrix), BlockError> {
        let s = &self.structure;
        let (mut e_parts, mut q_parts) = (Vec::new(), Vec::new());
        match variant {
            Variant::Standard => {
                let (regular, _) = s.realized_parts()?;
                for r in regular {
                    e_parts.push(ExactMatrix::identity(r.rows()));
                    q_parts.push(r);
                }
            }
            Variant::Alternate => {
                if s.kind != Kind::T {
                    return Err(BlockError::BadStructure("the alternate form exists for T pairs only".into()));
                }
                s.validate()?;
                for t in s.type2_in_order() {
                    let k = t.half;
                    e_parts.push(antidiag(2 * k, false));
                    q_parts.push(jordan(k, &t.mu).direct_sum(&ExactMatrix::identity(k)));
                }
                for t in s.type1_in_order() {
                    e_parts.push(antidiag(t.size, true));
                    q_parts.push(jordan(t.size, &GaussianRational::one()));
                }
            }
        }
        let zero = GaussianRational::zero();
        for p in s.type0_in_order() {
            let j = jordan(p, &zero);
            match self.pivot {
                Pivot::ENonsingular => {
                    e_parts.push(ExactMatrix::identity(p));
                    q_parts.push(j);
                }
                Pivot::QNonsingular => {
                    // J_p(0)^T and J_p(0)^* coincide
                    e_parts.push(j.transpose());
                    q_parts.push(ExactMatrix::identity(p));
                }
            }
        }
        Ok((ExactMatrix::direct_sum_all(&e_parts), ExactMatrix::direct_sum_all(&q_parts)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    SymT,
    SkewSymT,
    HermStar,
    SkewHermStar,
}

impl Flavor {
    pub fn kind(self) -> Kind {
        match self {
            Flavor::SymT | Flavor::SkewSymT => Kind::T,
            Flavor::HermStar | Flavor::SkewHermStar => Kind::Star,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::SymT => "sym",
            Flavor::SkewSymT => "skew-sym",
            Flavor::HermStar => "herm",
            Flavor::SkewHermStar => "skew-herm",
        }
    }

    pub const ALL: [Flavor; 4] = [Flavor::SymT, Flavor::SkewSymT, Flavor::HermStar, Flavor::SkewHermStar];
}

/// Block counts of a structured pair.
///
/// `n_plus`/`n_minus` count `(1,1)`/`(1,-1)` (Herm) or `(1,i)`/`(1,-i)` (SkewHerm);
/// for SymT `n_plus` counts `(1,1)` and for SkewSymT it counts `(I_2, H_2(-1))`,
/// with `n_minus = 0` in both. `a, b, c, d` count `(1,0)`, `(0,1)`, `(0,0)` and
/// the 2x2 block `([[1,0],[0,0]], [[0,0],[1,0]])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuredPairForm {
    pub flavor: Flavor,
    pub n_plus: usize,
    pub n_minus: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl StructuredPairForm {
    pub fn dim(&self) -> usize {
        let regular = match self.flavor {
            Flavor::SkewSymT => 2 * self.n_plus,
            _ => self.n_plus + self.n_minus,
        };
        regular + self.a + self.b + self.c + 2 * self.d
    }

    /// No `(1,-1)` block: the positive semidefinite refinement of the Hermitian case.
    pub fn is_psd(&self) -> bool {
        self.flavor == Flavor::HermStar && self.n_minus == 0
    }

    pub fn realize(&self) -> Result<(ExactMatrix, ExactMatrix), BlockError> {
        if matches!(self.flavor, Flavor::SymT | Flavor::SkewSymT) && self.n_minus != 0 {
            return Err(BlockError::BadStructure(format!("{} pairs have no n_minus blocks", self.flavor.name())));
        }
        let (mut e, mut q) = (Vec::new(), Vec::new());
        let g = |v: i64| ExactMatrix::from_rows(vec![vec![GaussianRational::int(v)]]);
        let scalar = |z: GaussianRational| ExactMatrix::from_rows(vec![vec![z]]);
        for _ in 0..self.n_plus {
            match self.flavor {
                Flavor::SkewSymT => {
                    e.push(ExactMatrix::identity(2));
                    q.push(build_block(BlockKind::H, 1, Some(&GaussianRational::int(-1)))?);
                }
                Flavor::SkewHermStar => {
                    e.push(g(1));
                    q.push(scalar(GaussianRational::i()));
                }
                _ => {
                    e.push(g(1));
                    q.push(g(1));
                }
            }
        }
        for _ in 0..self.n_minus {
            e.push(g(1));
            q.push(match self.flavor {
                Flavor::SkewHermStar => scalar(-GaussianRational::i()),
                _ => g(-1),
            });
        }
        for (count, ev, qv) in [(self.a, 1, 0), (self.b, 0, 1), (self.c, 0, 0)] {
            for _ in 0..count {
                e.push(g(ev));
                q.push(g(qv));
            }
        }
        let (ne, nq) = nilpotent_block();
        for _ in 0..self.d {
            e.push(ne.clone());
            q.push(nq.clone());
        }
        Ok((ExactMatrix::direct_sum_all(&e), ExactMatrix::direct_sum_all(&q)))
    }
}

/// `(G_1^T, F_1^T) + (G_0, F_0)` as a 2x2 pair.
pub fn nilpotent_block() -> (ExactMatrix, ExactMatrix) {
    let g1 = build_block(BlockKind::G, 1, None).unwrap().transpose();
    let f1 = build_block(BlockKind::F, 1, None).unwrap().transpose();
    let g0 = build_block(BlockKind::G, 0, None).unwrap();
    let f0 = build_block(BlockKind::F, 0, None).unwrap();
    (g1.direct_sum(&g0), f1.direct_sum(&f0))
}
