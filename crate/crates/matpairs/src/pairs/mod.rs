//! Canonical forms of pairs `(E, Q)` under `(UEV, U^{-T}QV)` and `(UEV, U^{-*}QV)`.
//!
//! A pair with one nonsingular member is classified by the congruence class
//! of its product `E^T Q` (or `E^* Q`). Pairs whose product is symmetric,
//! skew-symmetric, Hermitian or skew-Hermitian are handled even when both
//! members are singular: a regular part splits off and the rest is a
//! nilpotent pair with `E^T Q = 0`.

mod forms;
mod nilpotent;
mod split;
mod structured;

pub use nilpotent::{nilpotent_pair_counts, DEFAULT_UNITARY_TAU, nilpotent_pair_reduce, FloatWitness, NilpotentCounts, NilpotentReduction, ReduceMode, ReductionWitness};
pub use split::{split_regular_nilpotent, RegularNilpotentSplit};
pub use structured::{detect_flavor, structured_pair_canonical, StructuredCanonical};

use crate::blocks::{BlockError, CongruenceStructure, PairCanonicalStructure, Pivot};
use crate::congruence::{congruence_structure, CongruenceError, EigenBackend};
use crate::exactmat::{inverse, is_nonsingular, rank};
use crate::{ExactMatrix, GaussianRational, Kind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PairError {
    #[error("pair members must be square of equal size, got {0:?} and {1:?}")]
    Shape((usize, usize), (usize, usize)),
    #[error("both E and Q are singular; use the structured path")]
    BothSingular,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("product has no symmetric, skew-symmetric, Hermitian or skew-Hermitian structure for {0} equivalence")]
    UnsupportedFlavor(String),
    #[error("nilpotent pair is not orthogonal: the adjoint product of E and Q is nonzero")]
    NotOrthogonal,
    #[error("V is not unitary within tolerance: defect {defect:e} > {tau:e}")]
    ToleranceFailure { defect: f64, tau: f64 },
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// `(U, V)` acting by `(E, Q) -> (UEV, U^{-T}QV)` or `(UEV, U^{-*}QV)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceWitness {
    pub u: ExactMatrix,
    pub v: ExactMatrix,
    pub kind: Kind,
    pub v_unitary: bool,
}

impl EquivalenceWitness {
    pub fn identity(n: usize, kind: Kind) -> Self {
        EquivalenceWitness { u: ExactMatrix::identity(n), v: ExactMatrix::identity(n), kind, v_unitary: true }
    }

    pub fn apply(&self, e: &ExactMatrix, q: &ExactMatrix) -> Option<(ExactMatrix, ExactMatrix)> {
        let u_adj_inv = inverse(&self.u.adjoint(self.kind))?;
        Some((self.u.mul(e).mul(&self.v), u_adj_inv.mul(q).mul(&self.v)))
    }

    /// Applies `other` after `self`.
    pub fn then(&self, other: &EquivalenceWitness) -> EquivalenceWitness {
        EquivalenceWitness {
            u: other.u.mul(&self.u),
            v: self.v.mul(&other.v),
            kind: self.kind,
            v_unitary: self.v_unitary && other.v_unitary,
        }
    }

    pub fn direct_sum(&self, other: &EquivalenceWitness) -> EquivalenceWitness {
        EquivalenceWitness {
            u: self.u.direct_sum(&other.u),
            v: self.v.direct_sum(&other.v),
            kind: self.kind,
            v_unitary: self.v_unitary && other.v_unitary,
        }
    }

    pub fn is_nonsingular(&self) -> bool {
        is_nonsingular(&self.u) && is_nonsingular(&self.v)
    }

    pub fn maps(&self, from: (&ExactMatrix, &ExactMatrix), to: (&ExactMatrix, &ExactMatrix)) -> bool {
        self.apply(from.0, from.1).is_some_and(|(e, q)| &e == to.0 && &q == to.1)
    }
}

pub(crate) fn check_shapes(e: &ExactMatrix, q: &ExactMatrix) -> Result<usize, PairError> {
    if !e.is_square() || e.shape() != q.shape() {
        return Err(PairError::Shape(e.shape(), q.shape()));
    }
    Ok(e.rows())
}

/// `E^T Q` or `E^* Q`.
pub fn pair_product(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> ExactMatrix {
    e.adjoint(kind).mul(q)
}

pub fn pair_canonical(
    e: &ExactMatrix,
    q: &ExactMatrix,
    kind: Kind,
    backend: EigenBackend,
) -> Result<PairCanonicalStructure, PairError> {
    let n = check_shapes(e, q)?;
    let pivot = if rank(e) == n {
        Pivot::ENonsingular
    } else if rank(q) == n {
        Pivot::QNonsingular
    } else {
        return Err(PairError::BothSingular);
    };
    let structure = congruence_structure(&pair_product(e, q, kind), kind, backend)?;
    Ok(PairCanonicalStructure { pivot, structure })
}

/// Whether `(E, Q)` and `(E1, Q1)` lie in the same orbit.
///
/// Ranks of `E` and `Q` are invariants, so a mismatch decides the question
/// before any canonical form is computed.
pub fn check_equivalence(
    e: &ExactMatrix,
    q: &ExactMatrix,
    e1: &ExactMatrix,
    q1: &ExactMatrix,
    kind: Kind,
    backend: EigenBackend,
) -> Result<bool, PairError> {
    let n = check_shapes(e, q)?;
    let n1 = check_shapes(e1, q1)?;
    if n != n1 {
        return Ok(false);
    }
    let (re, rq, re1, rq1) = (rank(e), rank(q), rank(e1), rank(q1));
    let one_sided = re == n || rq == n;
    let one_sided1 = re1 == n || rq1 == n;
    if one_sided || one_sided1 {
        if re != re1 || rq != rq1 {
            return Ok(false);
        }
        let a = pair_canonical(e, q, kind, backend)?.normalize()?;
        let b = pair_canonical(e1, q1, kind, backend)?.normalize()?;
        return Ok(a.pivot == b.pivot && structures_match(&a.structure, &b.structure));
    }
    let lhs = structured_pair_canonical(e, q, kind, None);
    let rhs = structured_pair_canonical(e1, q1, kind, None);
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => Ok(a.form == b.form),
        (Err(PairError::UnsupportedFlavor(_)), _) | (_, Err(PairError::UnsupportedFlavor(_))) => Err(PairError::Unsupported(
            "both pairs are singular and not both structured; no canonical form is available".into(),
        )),
        (Err(err), _) | (_, Err(err)) => Err(err),
    }
}

/// Relative tolerance for parameters that came from the float eigenvalue
/// fallback; exact parameters agree bit for bit and pass trivially.
const PARAMETER_TOL: f64 = 1e-8;

/// Same block sizes, parameters equal up to `PARAMETER_TOL`. Two pairs with an
/// irrational spectrum reach the float fallback along different paths, so
/// their parameters are close but not identical rationals.
fn structures_match(a: &CongruenceStructure, b: &CongruenceStructure) -> bool {
    let close = |x: &GaussianRational, y: &GaussianRational| {
        if x == y {
            return true;
        }
        let ((xr, xi), (yr, yi)) = (x.to_f64_pair(), y.to_f64_pair());
        let scale = xr.hypot(xi).max(yr.hypot(yi)).max(1.0);
        (xr - yr).hypot(xi - yi) <= PARAMETER_TOL * scale
    };
    a.kind == b.kind
        && a.type0 == b.type0
        && a.type1.len() == b.type1.len()
        && a.type2.len() == b.type2.len()
        && a.type1.iter().zip(&b.type1).all(|(s, t)| s.size == t.size && close(&s.alpha, &t.alpha))
        && a.type2.iter().zip(&b.type2).all(|(s, t)| s.half == t.half && close(&s.mu, &t.mu))
}

/// Columns of `[E; Q]` span a Lagrangian subspace for the form `[[0, I], [-I, 0]]`.
pub fn is_lagrangian(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> bool {
    let Ok(n) = check_shapes(e, q) else {
        return false;
    };
    rank(&e.vstack(q)) == n && pair_product(e, q, kind) == pair_product(q, e, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{build_block, BlockKind, Variant};
    use crate::fuzz;
    use crate::GaussianRational as G;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| G::int(v)).collect()).collect())
    }

    fn scalar(v: i64) -> ExactMatrix {
        m(&[&[v]])
    }

    #[test]
    fn worked_example_pair() {
        let j2 = build_block(BlockKind::J, 2, Some(&G::int(0))).unwrap();
        let h = build_block(BlockKind::H, 1, Some(&G::int(2))).unwrap();
        let g2 = build_block(BlockKind::Gamma, 2, None).unwrap();
        let e = ExactMatrix::identity(4).direct_sum(&j2.transpose());
        let q = h.direct_sum(&g2).direct_sum(&ExactMatrix::identity(2));
        let got = pair_canonical(&e, &q, Kind::T, EigenBackend::default()).unwrap();
        let want = CongruenceStructure::new(Kind::T).with_h(1, G::int(2)).with_gamma(2).with_type0(2);
        assert_eq!(got.pivot, Pivot::QNonsingular);
        assert_eq!(got.structure, want.normalize().unwrap());
        assert_eq!(got.realize(Variant::Standard).unwrap(), (e, q));
    }

    #[test]
    fn identity_pair_is_gammas() {
        let got = pair_canonical(&ExactMatrix::identity(3), &ExactMatrix::identity(3), Kind::T, EigenBackend::default()).unwrap();
        assert_eq!(got.pivot, Pivot::ENonsingular);
        assert_eq!(got.structure.type1.len(), 3);
        assert!(got.structure.type1.iter().all(|t| t.size == 1));
    }

    #[test]
    fn both_singular_is_refused() {
        let z = ExactMatrix::zeros(2, 2);
        assert_eq!(pair_canonical(&z, &z, Kind::T, EigenBackend::default()), Err(PairError::BothSingular));
    }

    #[test]
    fn equivalence_examples() {
        let b = EigenBackend::default();
        let i2 = ExactMatrix::identity(2);
        let h = build_block(BlockKind::H, 1, Some(&G::int(2))).unwrap();
        assert!(!check_equivalence(&i2, &i2, &i2, &h, Kind::T, b).unwrap());
        assert!(check_equivalence(&scalar(1), &scalar(1), &scalar(1), &scalar(2), Kind::T, b).unwrap());
        // *-congruence keeps the sign of a real scalar
        assert!(!check_equivalence(&scalar(1), &scalar(1), &scalar(1), &scalar(-2), Kind::Star, b).unwrap());
        let mut rng = fuzz::rng(11);
        // T: a random pair (the float fallback may be needed); Star: a planted
        // pair with exact unit-circle eigenvalues so the sign characteristic exists
        let star_q = ExactMatrix::from_rows(vec![
            vec![G::int(1), G::int(0), G::int(0)],
            vec![G::int(0), G::int(-1), G::int(0)],
            vec![G::int(0), G::int(0), G::from_ints(0, 2)],
        ]);
        for kind in [Kind::T, Kind::Star] {
            let (e, q) = match kind {
                Kind::T => (fuzz::small_matrix(&mut rng, 3, 3, 2), fuzz::nonsingular(&mut rng, 3, 2)),
                Kind::Star => (ExactMatrix::identity(3), star_q.clone()),
            };
            let w = EquivalenceWitness { u: fuzz::nonsingular(&mut rng, 3, 2), v: fuzz::nonsingular(&mut rng, 3, 2), kind, v_unitary: false };
            let (e1, q1) = w.apply(&e, &q).unwrap();
            assert!(check_equivalence(&e, &q, &e1, &q1, kind, b).unwrap(), "{kind:?}");
        }
    }

    #[test]
    fn rank_mismatch_is_inequivalent() {
        let b = EigenBackend::default();
        let e = ExactMatrix::identity(2);
        let q = m(&[&[1, 0], &[0, 0]]);
        assert!(!check_equivalence(&e, &q, &q, &e, Kind::T, b).unwrap());
    }

    #[test]
    fn unstructured_singular_pairs_are_refused() {
        let e = m(&[&[1, 0], &[0, 0]]);
        let q = m(&[&[0, 1], &[0, 0]]);
        let r = check_equivalence(&e, &q, &e, &q, Kind::T, EigenBackend::default());
        assert!(matches!(r, Err(PairError::Unsupported(_))), "{r:?}");
    }

    #[test]
    fn lagrangian_examples() {
        let i = ExactMatrix::identity(2);
        assert!(is_lagrangian(&i, &i, Kind::T));
        assert!(is_lagrangian(&scalar(1), &scalar(0), Kind::Star));
        assert!(!is_lagrangian(&i, &m(&[&[0, 1], &[-1, 0]]), Kind::T));
        assert!(!is_lagrangian(&scalar(0), &scalar(0), Kind::T));
    }
}
