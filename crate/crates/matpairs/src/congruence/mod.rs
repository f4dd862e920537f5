//! Canonical structure of a single square matrix under T- and *-congruence.
//!
//! The `J_p(0)` part comes from an exact quotient iteration. The regular part
//! is classified by the Jordan data of its cosquare `A^{-T} A` (or
//! `A^{-*} A`), plus, for *-congruence, the sign characteristic of the
//! unit-circle eigenvalues.

mod float;
mod poly;
mod sign;
mod type0;

pub use type0::type0_split;

use num_complex::Complex64;
use num_traits::One;

use crate::blocks::{CongruenceStructure, TypeOne, TypeTwo};
use crate::exactmat::{inverse, rank};
use crate::{ExactMatrix, GaussianRational, Kind};

/// Relative clustering gap of the double-precision backend.
pub const DEFAULT_TAU: f64 = 1e-8;

/// Largest denominator tried when snapping a double-precision eigenvalue to `Q(i)`.
const SNAP_DENOMINATOR: i64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EigenBackend {
    /// Exact roots in `Q(i)` of the characteristic polynomial; falls back to
    /// `Float(DEFAULT_TAU)` when they do not exhaust the spectrum.
    #[default]
    ExactCandidates,
    Float { tau: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CongruenceError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),
    #[error("inconsistent canonical structure: {0}")]
    StructureInconsistent(String),
    #[error("parameter outside Q(i): {0}")]
    IrrationalParameter(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenValue {
    Exact(GaussianRational),
    Approx(Complex64),
}

impl EigenValue {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            EigenValue::Exact(z) => {
                let (re, im) = z.to_f64_pair();
                Complex64::new(re, im)
            }
            EigenValue::Approx(z) => *z,
        }
    }
}

/// One eigenvalue of a cosquare with its Weyr characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub value: EigenValue,
    pub weyr: Vec<usize>,
}

impl Eigen {
    pub fn is_exact(&self) -> bool {
        matches!(self.value, EigenValue::Exact(_))
    }

    pub fn multiplicity(&self) -> usize {
        self.weyr.iter().sum()
    }

    /// Jordan block sizes, descending.
    pub fn jordan_sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (j, &w) in self.weyr.iter().enumerate() {
            let next = self.weyr.get(j + 1).copied().unwrap_or(0);
            out.extend(std::iter::repeat(j + 1).take(w - next));
        }
        out.reverse();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub eigenvalues: Vec<Eigen>,
}

fn cosquare(a: &ExactMatrix, kind: Kind) -> Result<ExactMatrix, CongruenceError> {
    if !a.is_square() {
        return Err(CongruenceError::NotSquare(a.rows(), a.cols()));
    }
    Ok(inverse(&a.adjoint(kind)).ok_or(CongruenceError::Singular)?.mul(a))
}

/// Nullity increments of `(C - mu I)^j` until they stop.
fn exact_weyr(c: &ExactMatrix, mu: &GaussianRational) -> Vec<usize> {
    let n = c.rows();
    let shifted = c.sub(&ExactMatrix::identity(n).scale(mu));
    let mut power = shifted.clone();
    let mut prev = n;
    let mut out = Vec::new();
    loop {
        let r = rank(&power);
        if r >= prev {
            break;
        }
        out.push(prev - r);
        prev = r;
        if r == 0 {
            break;
        }
        power = power.mul(&shifted);
    }
    out
}

fn exact_report(c: &ExactMatrix) -> Option<EigenReport> {
    let roots = poly::gaussian_roots(&poly::charpoly(c))?;
    let eigenvalues = roots
        .into_iter()
        .map(|(mu, mult)| {
            let weyr = exact_weyr(c, &mu);
            debug_assert_eq!(weyr.iter().sum::<usize>(), mult);
            Eigen { value: EigenValue::Exact(mu), weyr }
        })
        .collect();
    Some(EigenReport { eigenvalues })
}

fn float_report(c: &ExactMatrix, tau: f64) -> Result<EigenReport, CongruenceError> {
    let n = c.rows();
    let d = float::to_dmatrix(c);
    let mut raw = float::eigenvalues(&d)?;
    let mut eigenvalues: Vec<Eigen> = Vec::new();
    // eigenvalues that snap to an exact root keep exact Jordan data
    let mut exact: Vec<GaussianRational> = Vec::new();
    // defective eigenvalues split by about eps^(1/k), so cluster means are tried
    // too; every snapped value is verified exactly before it is used
    let mut candidates = raw.clone();
    for gap in [1e-6, 1e-4, 1e-2] {
        candidates.extend(float::cluster(&raw, gap).into_iter().map(|c| c.0));
    }
    for z in &candidates {
        if let Some(mu) = float::snap(*z, SNAP_DENOMINATOR, 1e-3) {
            if !exact.contains(&mu) && rank(&c.sub(&ExactMatrix::identity(n).scale(&mu))) < n {
                exact.push(mu);
            }
        }
    }
    for mu in exact {
        let weyr = exact_weyr(c, &mu);
        let mult: usize = weyr.iter().sum();
        let target = EigenValue::Exact(mu.clone()).to_complex();
        raw.sort_by(|x, y| (x - target).norm().total_cmp(&(y - target).norm()));
        if raw.len() < mult {
            return Err(CongruenceError::EigenFailure("exact multiplicities exceed the spectrum".into()));
        }
        raw.drain(..mult);
        eigenvalues.push(Eigen { value: EigenValue::Exact(mu), weyr });
    }
    for (mu, mult) in float::cluster(&raw, tau) {
        let weyr = float::weyr(&d, mu, mult, tau)?;
        eigenvalues.push(Eigen { value: EigenValue::Approx(mu), weyr });
    }
    if eigenvalues.iter().map(Eigen::multiplicity).sum::<usize>() != n {
        return Err(CongruenceError::EigenFailure("multiplicities do not cover the spectrum".into()));
    }
    Ok(EigenReport { eigenvalues })
}

fn report_for(c: &ExactMatrix, backend: EigenBackend) -> Result<EigenReport, CongruenceError> {
    match backend {
        EigenBackend::ExactCandidates => match exact_report(c) {
            Some(r) => Ok(r),
            None => float_report(c, DEFAULT_TAU),
        },
        EigenBackend::Float { tau } => float_report(c, tau),
    }
}

/// Jordan data of the cosquare `A^{-T} A` (T) or `A^{-*} A` (Star) of a nonsingular `A`.
pub fn cosquare_jordan(a: &ExactMatrix, kind: Kind, backend: EigenBackend) -> Result<EigenReport, CongruenceError> {
    report_for(&cosquare(a, kind)?, backend)
}

fn tolerance(backend: EigenBackend) -> f64 {
    match backend {
        EigenBackend::ExactCandidates => DEFAULT_TAU,
        EigenBackend::Float { tau } => tau,
    }
    .sqrt()
}

/// Index of the unused eigenvalue equal to `target`.
fn partner(report: &EigenReport, used: &[bool], skip: usize, target: Complex64, exact: Option<&GaussianRational>, tol: f64) -> Option<usize> {
    report.eigenvalues.iter().enumerate().position(|(j, e)| {
        if j == skip || used[j] {
            return false;
        }
        match (&e.value, exact) {
            (EigenValue::Exact(v), Some(t)) => v == t,
            (v, _) => (v.to_complex() - target).norm() <= tol * target.norm().max(1.0),
        }
    })
}

fn value_of(e: &Eigen) -> GaussianRational {
    match &e.value {
        EigenValue::Exact(z) => z.clone(),
        EigenValue::Approx(z) => float::exact_value(*z),
    }
}

fn regular_structure(
    core: &ExactMatrix,
    kind: Kind,
    backend: EigenBackend,
) -> Result<(Vec<TypeOne>, Vec<TypeTwo>), CongruenceError> {
    let c = cosquare(core, kind)?;
    let report = report_for(&c, backend)?;
    let tol = tolerance(backend);
    let mut used = vec![false; report.eigenvalues.len()];
    let mut type1 = Vec::new();
    let mut type2 = Vec::new();
    let one = GaussianRational::one();
    for i in 0..report.eigenvalues.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let e = &report.eigenvalues[i];
        let z = e.value.to_complex();
        let sizes = e.jordan_sizes();
        let on_circle = match &e.value {
            EigenValue::Exact(v) => v.norm_sqr().is_one(),
            EigenValue::Approx(v) => (v.norm() - 1.0).abs() <= tol,
        };
        if kind == Kind::T {
            if let EigenValue::Exact(v) = &e.value {
                if v == &one || v == &-one.clone() {
                    let mut pending = std::collections::BTreeMap::new();
                    for k in sizes {
                        let gamma_sign = if k % 2 == 1 { one.clone() } else { -one.clone() };
                        if *v == gamma_sign {
                            type1.push(TypeOne { size: k, alpha: one.clone() });
                        } else {
                            *pending.entry(k).or_insert(0usize) += 1;
                        }
                    }
                    for (k, cnt) in pending {
                        if cnt % 2 == 1 {
                            return Err(CongruenceError::StructureInconsistent(format!(
                                "odd number of J_{k}({v}) blocks in the cosquare"
                            )));
                        }
                        for _ in 0..cnt / 2 {
                            type2.push(TypeTwo { half: k, mu: v.clone() });
                        }
                    }
                    continue;
                }
            } else if (z - 1.0).norm() <= tol || (z + 1.0).norm() <= tol {
                return Err(CongruenceError::EigenFailure(format!("eigenvalue {z} is too close to +-1 to classify")));
            }
        } else if on_circle {
            match &e.value {
                EigenValue::Exact(v) => {
                    type1.extend(sign::unit_circle_blocks(core, &c, v, e.multiplicity())?);
                    continue;
                }
                EigenValue::Approx(_) => {
                    return Err(CongruenceError::EigenFailure(format!(
                        "unit-circle eigenvalue {z} is not exact, so its sign characteristic is unavailable"
                    )))
                }
            }
        }
        // T pairs mu with 1/mu, Star pairs mu with 1/conj(mu)
        let exact_target = match (&e.value, kind) {
            (EigenValue::Exact(v), Kind::T) => v.inv(),
            (EigenValue::Exact(v), Kind::Star) => v.conj().inv(),
            _ => None,
        };
        let target = match kind {
            Kind::T => 1.0 / z,
            Kind::Star => 1.0 / z.conj(),
        };
        let j = partner(&report, &used, i, target, exact_target.as_ref(), tol).ok_or_else(|| {
            CongruenceError::StructureInconsistent(format!("cosquare eigenvalue {z} has no reciprocal partner"))
        })?;
        used[j] = true;
        if report.eigenvalues[j].jordan_sizes() != sizes {
            return Err(CongruenceError::StructureInconsistent(format!(
                "Jordan blocks at {z} and its reciprocal partner differ"
            )));
        }
        let mut mu = value_of(e);
        if kind == Kind::Star && mu.norm_sqr() < one.norm_sqr() {
            mu = value_of(&report.eigenvalues[j]);
        }
        for k in sizes {
            type2.push(TypeTwo { half: k, mu: mu.clone() });
        }
    }
    Ok((type1, type2))
}

/// Canonical structure of `A` under congruence of the given kind.
pub fn congruence_structure(a: &ExactMatrix, kind: Kind, backend: EigenBackend) -> Result<CongruenceStructure, CongruenceError> {
    let (type0, core) = type0_split(a, kind)?;
    let (type1, type2) = if core.rows() == 0 { (vec![], vec![]) } else { regular_structure(&core, kind, backend)? };
    let s = CongruenceStructure { kind, type0, type1, type2 };
    s.normalize().map_err(|e| CongruenceError::StructureInconsistent(e.to_string()))
}

pub fn t_congruence_structure(a: &ExactMatrix, backend: EigenBackend) -> Result<CongruenceStructure, CongruenceError> {
    congruence_structure(a, Kind::T, backend)
}

pub fn star_congruence_structure(a: &ExactMatrix, backend: EigenBackend) -> Result<CongruenceStructure, CongruenceError> {
    congruence_structure(a, Kind::Star, backend)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{build_block, BlockKind};
    use crate::fuzz;
    use crate::GaussianRational as G;
    use proptest::prelude::*;

    const EXACT: EigenBackend = EigenBackend::ExactCandidates;

    fn scramble(m: &ExactMatrix, kind: Kind, seed: u64) -> ExactMatrix {
        let s = fuzz::nonsingular(&mut fuzz::rng(seed), m.rows(), 3);
        s.adjoint(kind).mul(m).mul(&s)
    }

    #[test]
    fn cosquare_examples() {
        let g2 = build_block(BlockKind::Gamma, 2, None).unwrap();
        let r = cosquare_jordan(&g2, Kind::T, EXACT).unwrap();
        assert_eq!(r.eigenvalues, vec![Eigen { value: EigenValue::Exact(G::int(-1)), weyr: vec![1, 1] }]);
        let h = build_block(BlockKind::H, 1, Some(&G::int(3))).unwrap();
        let r = cosquare_jordan(&h, Kind::T, EXACT).unwrap();
        let mut vals: Vec<_> = r.eigenvalues.iter().map(|e| (value_of(e), e.weyr.clone())).collect();
        vals.sort_by(|a, b| a.0.cmp_lex(&b.0));
        assert_eq!(vals, vec![(G::from_fracs(1, 3, 0, 1), vec![1]), (G::int(3), vec![1])]);
        let r = cosquare_jordan(&ExactMatrix::identity(3), Kind::T, EXACT).unwrap();
        assert_eq!(r.eigenvalues[0].weyr, vec![3]);
        assert_eq!(cosquare_jordan(&ExactMatrix::zeros(2, 2), Kind::T, EXACT), Err(CongruenceError::Singular));
    }

    #[test]
    fn t_examples() {
        let s = t_congruence_structure(&ExactMatrix::identity(3), EXACT).unwrap();
        assert_eq!(s, CongruenceStructure::new(Kind::T).with_gamma(1).with_gamma(1).with_gamma(1));
        let h = build_block(BlockKind::H, 1, Some(&G::from_fracs(1, 2, 0, 1))).unwrap();
        let s = t_congruence_structure(&h, EXACT).unwrap();
        assert_eq!(s, CongruenceStructure::new(Kind::T).with_h(1, G::int(2)));
        let planted = CongruenceStructure::new(Kind::T).with_h(1, G::int(2)).with_gamma(2).with_type0(2).normalize().unwrap();
        let a = scramble(&planted.realize().unwrap(), Kind::T, 9);
        assert_eq!(t_congruence_structure(&a, EXACT).unwrap(), planted);
    }

    #[test]
    fn star_examples() {
        let s = star_congruence_structure(&ExactMatrix::diag(&[G::int(1), G::int(-1)]), EXACT).unwrap();
        let want = CongruenceStructure::new(Kind::Star).with_delta(1, G::int(1)).with_delta(1, G::int(-1));
        assert_eq!(s, want.normalize().unwrap());
        let s = star_congruence_structure(&ExactMatrix::diag(&[G::int(2)]), EXACT).unwrap();
        assert_eq!(s, CongruenceStructure::new(Kind::Star).with_delta(1, G::int(1)));
        let s = star_congruence_structure(&ExactMatrix::diag(&[G::i()]), EXACT).unwrap();
        assert_eq!(s, CongruenceStructure::new(Kind::Star).with_delta(1, G::i()));
    }

    #[test]
    fn even_gamma_sign_pairs_into_h() {
        // two J_1(-1) cosquare blocks cannot be Gamma_1, they form H_2(-1)
        let h = build_block(BlockKind::H, 1, Some(&G::int(-1))).unwrap();
        let a = scramble(&h, Kind::T, 4);
        assert_eq!(t_congruence_structure(&a, EXACT).unwrap(), CongruenceStructure::new(Kind::T).with_h(1, G::int(-1)));
        let h4 = build_block(BlockKind::H, 2, Some(&G::int(1))).unwrap();
        assert_eq!(t_congruence_structure(&h4, EXACT).unwrap(), CongruenceStructure::new(Kind::T).with_h(2, G::int(1)));
    }

    #[test]
    fn float_backend_agrees_on_rational_spectra() {
        let planted = CongruenceStructure::new(Kind::Star)
            .with_h(1, G::from_ints(0, 3))
            .with_delta(2, G::from_ints(0, -1))
            .with_type0(1)
            .normalize()
            .unwrap();
        let a = scramble(&planted.realize().unwrap(), Kind::Star, 21);
        let s = star_congruence_structure(&a, EigenBackend::Float { tau: 1e-8 }).unwrap();
        assert_eq!(s, planted);
    }

    #[test]
    fn irrational_spectrum_uses_float_values() {
        // cosquare eigenvalues of H_2(mu) are mu and 1/mu; sqrt(2) is not in Q(i)
        let a = ExactMatrix::from_rows(vec![vec![G::int(1), G::int(1)], vec![G::int(-1), G::int(1)]]);
        let s = t_congruence_structure(&a, EXACT).unwrap();
        assert_eq!(s.type2.len() + s.type1.len(), 1);
        assert!(s.type1.is_empty());
    }

    #[test]
    fn transposed_input_has_same_t_structure() {
        let planted = CongruenceStructure::new(Kind::T).with_h(2, G::int(3)).with_gamma(1).with_type0(3);
        let a = scramble(&planted.realize().unwrap(), Kind::T, 77);
        assert_eq!(t_congruence_structure(&a, EXACT).unwrap(), t_congruence_structure(&a.transpose(), EXACT).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn star_structure_survives_congruence(seed in any::<u64>(), pick in 0usize..6) {
            let alphas = [G::int(1), G::int(-1), G::i(), G::from_ints(0, -1)];
            let mut s = CongruenceStructure::new(Kind::Star).with_delta(1 + pick % 3, alphas[pick % 4].clone());
            s = s.with_delta(2, alphas[(pick + 1) % 4].clone()).with_type0(1 + pick % 2);
            if pick % 2 == 0 {
                s = s.with_h(1, G::int(2));
            }
            let s = s.normalize().unwrap();
            let a = scramble(&s.realize().unwrap(), Kind::Star, seed);
            prop_assert_eq!(star_congruence_structure(&a, EXACT).unwrap(), s);
        }
    }
}
