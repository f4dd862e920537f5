//! Brute-force nullities of the matrix equations behind every codimension.
//!
//! Each system is assembled through `vec(L X R) = (R^T kron L) vec(X)` and the
//! commutation matrix `K` with `K vec(X) = vec(X^T)`. Star systems are only
//! real-linear (they involve `X^*`), so they are split into real and imaginary
//! parts before elimination.

use num_rational::BigRational;
use num_traits::Zero;

use crate::exactmat::rank;
use crate::{ExactMatrix, GaussianRational, Kind, RealMatrix};

/// Largest number of real unknowns the oracle will eliminate.
pub const MAX_REAL_UNKNOWNS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("system has {0} real unknowns, above the limit of {MAX_REAL_UNKNOWNS}")]
    DeskScaleExceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystemNullity {
    /// absent for Star systems, which are not complex-linear
    pub complex_dim: Option<usize>,
    pub real_dim: usize,
    pub unknown_shapes: Vec<(usize, usize)>,
}

/// The tangent vector `(XE + EY, -X^T Q + QY)` (`X^*` for Star).
pub fn tangent_map(
    e: &ExactMatrix,
    q: &ExactMatrix,
    x: &ExactMatrix,
    y: &ExactMatrix,
    kind: Kind,
) -> Result<(ExactMatrix, ExactMatrix), OracleError> {
    let n = e.rows();
    for (name, m) in [("E", e), ("Q", q), ("X", x), ("Y", y)] {
        if m.shape() != (n, n) {
            return Err(OracleError::ShapeMismatch(format!("{name} is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
        }
    }
    let first = x.mul(e).add(&e.mul(y));
    let second = q.mul(y).sub(&x.adjoint(kind).mul(q));
    Ok((first, second))
}

/// One term `L * X * R` or `L * adj(X) * R` of a matrix equation.
struct Term<'a> {
    unknown: usize,
    left: &'a ExactMatrix,
    right: &'a ExactMatrix,
    adjoint: bool,
}

struct System<'a> {
    kind: Kind,
    unknowns: Vec<(usize, usize)>,
    /// each equation is a sum of terms equal to zero
    equations: Vec<Vec<Term<'a>>>,
}

/// `K` with `K vec(X) = vec(X^T)` for `X` of shape `r x c`.
pub fn commutation_matrix(r: usize, c: usize) -> ExactMatrix {
    let mut k = ExactMatrix::zeros(r * c, r * c);
    for i in 0..r {
        for j in 0..c {
            // X[i,j] sits at i + j*r in vec(X) and at j + i*c in vec(X^T)
            k[(j + i * c, i + j * r)] = GaussianRational::from(1);
        }
    }
    k
}

impl System<'_> {
    fn real_unknowns(&self) -> usize {
        2 * self.unknowns.iter().map(|(r, c)| r * c).sum::<usize>()
    }

    /// Coefficient matrices of `A x + B conj(x) = 0`; `B` is zero for T systems.
    fn assemble(&self) -> (ExactMatrix, ExactMatrix) {
        let offsets: Vec<usize> = self
            .unknowns
            .iter()
            .scan(0, |acc, (r, c)| {
                let o = *acc;
                *acc += r * c;
                Some(o)
            })
            .collect();
        let total: usize = self.unknowns.iter().map(|(r, c)| r * c).sum();
        let mut lin_rows = Vec::new();
        let mut anti_rows = Vec::new();
        for eq in &self.equations {
            let shape = (eq[0].left.rows(), eq[0].right.cols());
            let mut lin = ExactMatrix::zeros(shape.0 * shape.1, total);
            let mut anti = lin.clone();
            for t in eq {
                assert_eq!((t.left.rows(), t.right.cols()), shape, "inconsistent equation shape");
                let (r, c) = self.unknowns[t.unknown];
                let mut coef = t.right.transpose().kron(t.left);
                if t.adjoint {
                    coef = coef.mul(&commutation_matrix(r, c));
                }
                let target = if t.adjoint && self.kind == Kind::Star { &mut anti } else { &mut lin };
                let off = offsets[t.unknown];
                for i in 0..coef.rows() {
                    for j in 0..coef.cols() {
                        if !coef[(i, j)].is_zero() {
                            target[(i, off + j)] += &coef[(i, j)];
                        }
                    }
                }
            }
            lin_rows.push(lin);
            anti_rows.push(anti);
        }
        let stack = |rows: Vec<ExactMatrix>| rows.into_iter().reduce(|a, b| a.vstack(&b)).unwrap();
        (stack(lin_rows), stack(anti_rows))
    }

    fn solve(&self) -> Result<LinearSystemNullity, OracleError> {
        let real_unknowns = self.real_unknowns();
        if real_unknowns > MAX_REAL_UNKNOWNS {
            return Err(OracleError::DeskScaleExceeded(real_unknowns));
        }
        let (a, b) = self.assemble();
        let unknown_shapes = self.unknowns.clone();
        Ok(match self.kind {
            Kind::T => {
                let c = a.cols() - rank(&a);
                LinearSystemNullity { complex_dim: Some(c), real_dim: 2 * c, unknown_shapes }
            }
            Kind::Star => {
                let r = realify(&a, &b);
                LinearSystemNullity { complex_dim: None, real_dim: r.cols() - rank(&r), unknown_shapes }
            }
        })
    }
}

/// Real form of `A x + B conj(x)` acting on `[Re x; Im x]`.
pub fn realify(a: &ExactMatrix, b: &ExactMatrix) -> RealMatrix {
    let (m, n) = a.shape();
    RealMatrix::from_fn(2 * m, 2 * n, |i, j| {
        let (ii, jj) = (i % m, j % n);
        let (ar, ai) = (a[(ii, jj)].re(), a[(ii, jj)].im());
        let (br, bi) = (b[(ii, jj)].re(), b[(ii, jj)].im());
        let v: BigRational = match (i < m, j < n) {
            (true, true) => ar + br,
            (true, false) => bi - ai,
            (false, true) => ai + bi,
            (false, false) => ar - br,
        };
        v
    })
}

/// Nullity of `XM + M adj(X) = 0`: the codimension of the congruence orbit of `M`.
pub fn nullity_congruence_system(m: &ExactMatrix, kind: Kind) -> Result<LinearSystemNullity, OracleError> {
    if !m.is_square() {
        return Err(OracleError::ShapeMismatch("M must be square".into()));
    }
    let n = m.rows();
    let id = ExactMatrix::identity(n);
    System {
        kind,
        unknowns: vec![(n, n)],
        equations: vec![vec![
            Term { unknown: 0, left: &id, right: m, adjoint: false },
            Term { unknown: 0, left: m, right: &id, adjoint: true },
        ]],
    }
    .solve()
}

/// Nullity of `XE + EY = 0, -adj(X) Q + QY = 0` in `(X, Y)`.
pub fn nullity_pair_system(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> Result<LinearSystemNullity, OracleError> {
    let n = e.rows();
    if !e.is_square() || q.shape() != (n, n) {
        return Err(OracleError::ShapeMismatch("E and Q must be square of equal size".into()));
    }
    let id = ExactMatrix::identity(n);
    let neg_id = id.neg();
    System {
        kind,
        unknowns: vec![(n, n), (n, n)],
        equations: vec![
            vec![
                Term { unknown: 0, left: &id, right: e, adjoint: false },
                Term { unknown: 1, left: e, right: &id, adjoint: false },
            ],
            vec![
                Term { unknown: 0, left: &neg_id, right: q, adjoint: true },
                Term { unknown: 1, left: q, right: &id, adjoint: false },
            ],
        ],
    }
    .solve()
}

/// Nullity of `XM + N adj(Y) = 0, YN + M adj(X) = 0` with `X` of shape `k x m`
/// and `Y` of shape `m x k`.
pub fn interaction_nullity(m: &ExactMatrix, n: &ExactMatrix, kind: Kind) -> Result<LinearSystemNullity, OracleError> {
    if !m.is_square() || !n.is_square() {
        return Err(OracleError::ShapeMismatch("M and N must be square".into()));
    }
    let (mm, kk) = (m.rows(), n.rows());
    let id_m = ExactMatrix::identity(mm);
    let id_k = ExactMatrix::identity(kk);
    if mm == 0 || kk == 0 {
        let unknown_shapes = vec![(kk, mm), (mm, kk)];
        return Ok(LinearSystemNullity {
            complex_dim: (kind == Kind::T).then_some(0),
            real_dim: 0,
            unknown_shapes,
        });
    }
    System {
        kind,
        unknowns: vec![(kk, mm), (mm, kk)],
        equations: vec![
            vec![
                Term { unknown: 0, left: &id_k, right: m, adjoint: false },
                Term { unknown: 1, left: n, right: &id_m, adjoint: true },
            ],
            vec![
                Term { unknown: 1, left: &id_m, right: n, adjoint: false },
                Term { unknown: 0, left: m, right: &id_k, adjoint: true },
            ],
        ],
    }
    .solve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{build_block, BlockKind, CongruenceStructure, PairCanonicalStructure, Pivot, Variant};
    use crate::fuzz;
    use crate::GaussianRational as G;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| G::int(v)).collect()).collect())
    }

    fn example_pair() -> (ExactMatrix, ExactMatrix) {
        PairCanonicalStructure {
            pivot: Pivot::QNonsingular,
            structure: CongruenceStructure::new(Kind::T).with_h(1, G::int(2)).with_gamma(2).with_type0(2),
        }
        .realize(Variant::Standard)
        .unwrap()
    }

    #[test]
    fn tangent_examples() {
        let z = ExactMatrix::zeros(2, 2);
        let i2 = ExactMatrix::identity(2);
        assert_eq!(tangent_map(&i2, &i2, &z, &z, Kind::T).unwrap(), (z.clone(), z.clone()));
        let x = m(&[&[0, 3], &[-3, 0]]);
        assert_eq!(tangent_map(&i2, &i2, &x, &x.neg(), Kind::T).unwrap(), (z.clone(), z));
        let one = m(&[&[1]]);
        let zero = m(&[&[0]]);
        assert_eq!(tangent_map(&one, &one, &one, &zero, Kind::T).unwrap(), (one.clone(), one.neg()));
        assert!(tangent_map(&one, &i2, &one, &one, Kind::T).is_err());
    }

    #[test]
    fn congruence_examples() {
        let c = nullity_congruence_system(&ExactMatrix::identity(4), Kind::T).unwrap();
        assert_eq!(c.complex_dim, Some(6));
        let s = nullity_congruence_system(&ExactMatrix::identity(2), Kind::Star).unwrap();
        assert_eq!((s.complex_dim, s.real_dim), (None, 4));
        let j2 = build_block(BlockKind::J, 2, Some(&G::int(0))).unwrap();
        assert_eq!(nullity_congruence_system(&j2, Kind::T).unwrap().complex_dim, Some(1));
    }

    #[test]
    fn pair_examples() {
        let (e, q) = example_pair();
        assert_eq!(nullity_pair_system(&e, &q, Kind::T).unwrap().complex_dim, Some(3));
        let one = m(&[&[1]]);
        assert_eq!(nullity_pair_system(&one, &one, Kind::T).unwrap().complex_dim, Some(0));
        assert_eq!(nullity_pair_system(&one, &m(&[&[0]]), Kind::T).unwrap().complex_dim, Some(1));
        assert_eq!(nullity_pair_system(&one, &one, Kind::Star).unwrap().real_dim, 1);
    }

    #[test]
    fn interaction_examples() {
        let core = build_block(BlockKind::H, 1, Some(&G::int(2)))
            .unwrap()
            .direct_sum(&build_block(BlockKind::Gamma, 2, None).unwrap());
        let j2 = build_block(BlockKind::J, 2, Some(&G::int(0))).unwrap();
        assert_eq!(interaction_nullity(&core, &j2, Kind::T).unwrap().complex_dim, Some(0));
        let j1 = m(&[&[0]]);
        assert_eq!(interaction_nullity(&j1, &j1, Kind::T).unwrap().complex_dim, Some(2));
        assert_eq!(interaction_nullity(&j1, &j1, Kind::Star).unwrap().real_dim, 4);
    }

    #[test]
    fn commutation_transposes() {
        let x = m(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(commutation_matrix(2, 3).mul(&x.vec()), x.transpose().vec());
    }

    #[test]
    fn realified_t_system_doubles() {
        let (e, q) = example_pair();
        let id = ExactMatrix::identity(6);
        let neg_id = id.neg();
        let sys = System {
            kind: Kind::T,
            unknowns: vec![(6, 6), (6, 6)],
            equations: vec![
                vec![
                    Term { unknown: 0, left: &id, right: &e, adjoint: false },
                    Term { unknown: 1, left: &e, right: &id, adjoint: false },
                ],
                vec![
                    Term { unknown: 0, left: &neg_id, right: &q, adjoint: true },
                    Term { unknown: 1, left: &q, right: &id, adjoint: false },
                ],
            ],
        };
        let (a, b) = sys.assemble();
        let r = realify(&a, &b);
        assert_eq!(r.cols() - rank(&r), 6);
    }

    #[test]
    fn guard_refuses_huge_systems() {
        let big = ExactMatrix::zeros(71, 71);
        assert!(matches!(nullity_pair_system(&big, &big, Kind::T), Err(OracleError::DeskScaleExceeded(_))));
    }

    #[test]
    fn direct_sum_decomposes() {
        let blocks = [
            build_block(BlockKind::Gamma, 2, None).unwrap(),
            build_block(BlockKind::H, 1, Some(&G::int(3))).unwrap(),
            build_block(BlockKind::J, 2, Some(&G::int(0))).unwrap(),
            m(&[&[0]]),
        ];
        for kind in [Kind::T, Kind::Star] {
            for a in &blocks {
                for b in &blocks {
                    let whole = nullity_congruence_system(&a.direct_sum(b), kind).unwrap().real_dim;
                    let parts = nullity_congruence_system(a, kind).unwrap().real_dim
                        + nullity_congruence_system(b, kind).unwrap().real_dim
                        + interaction_nullity(a, b, kind).unwrap().real_dim;
                    assert_eq!(whole, parts, "{a:?} + {b:?}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn pair_nullity_is_equivalence_invariant(seed in any::<u64>(), star in any::<bool>()) {
            let kind = if star { Kind::Star } else { Kind::T };
            let mut r = fuzz::rng(seed);
            let (e, q) = example_pair();
            let (u, u_inv) = fuzz::nonsingular_pair(&mut r, 6, 3);
            let v = fuzz::nonsingular(&mut r, 6, 3);
            let e1 = u.mul(&e).mul(&v);
            let q1 = u_inv.adjoint(kind).mul(&q).mul(&v);
            prop_assert_eq!(
                nullity_pair_system(&e, &q, kind).unwrap().real_dim,
                nullity_pair_system(&e1, &q1, kind).unwrap().real_dim
            );
        }

        #[test]
        fn congruence_nullity_is_invariant(seed in any::<u64>(), star in any::<bool>()) {
            let kind = if star { Kind::Star } else { Kind::T };
            let mut r = fuzz::rng(seed);
            let a = fuzz::small_matrix(&mut r, 3, 3, 2);
            let s = fuzz::nonsingular(&mut r, 3, 3);
            let b = s.adjoint(kind).mul(&a).mul(&s);
            prop_assert_eq!(
                nullity_congruence_system(&a, kind).unwrap(),
                nullity_congruence_system(&b, kind).unwrap()
            );
        }
    }
}
