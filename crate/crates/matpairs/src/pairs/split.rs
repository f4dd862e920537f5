use super::{check_shapes, pair_product, EquivalenceWitness, PairError};
use crate::exactmat::{completion_basis, extend_to_basis, inverse, nullspace, rank};
use crate::{ExactMatrix, Kind};

/// `(E, Q) ~ (I_k + E_nil, R + Q_nil)` with `R` nonsingular and `E_nil^T Q_nil = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularNilpotentSplit {
    pub witness: EquivalenceWitness,
    pub k: usize,
    pub r: ExactMatrix,
    pub e_nil: ExactMatrix,
    pub q_nil: ExactMatrix,
}

pub(crate) fn product_is_structured(p: &ExactMatrix, kind: Kind) -> bool {
    let adj = p.adjoint(kind);
    adj == *p || adj == p.neg()
}

/// Splits off the regular part of a pair whose product is (skew-)symmetric
/// or (skew-)Hermitian.
///
/// With `V = [W | ker P]` the product becomes `R + 0`. Writing `EV = [C1 C2]`
/// and `QV = [D1 D2]`, the columns `F = [C1 | C3]` with `C3` spanning
/// `ker D1^T` give `U = F^{-1}`; the off-diagonal blocks vanish because
/// `C1^T D2`, `C2^T D1` and `C2^T D2` are blocks of `V^T P V`.
pub fn split_regular_nilpotent(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> Result<RegularNilpotentSplit, PairError> {
    let n = check_shapes(e, q)?;
    let p = pair_product(e, q, kind);
    if !product_is_structured(&p, kind) {
        return Err(PairError::UnsupportedFlavor(kind.name().into()));
    }
    let ker = nullspace(&p);
    let k = n - ker.cols();
    let w = extend_to_basis(&ker);
    let v = w.hstack(&ker);
    let (c, d) = (e.mul(&v), q.mul(&v));
    let c1 = c.block(0, n, 0, k);
    let d1 = d.block(0, n, 0, k);
    let f = if k == n {
        c1.clone()
    } else if k == 0 {
        ExactMatrix::identity(n)
    } else {
        let c3 = completion_basis(&c1, &d1.adjoint(kind)).map_err(|err| PairError::Inconsistent(err.to_string()))?;
        c1.hstack(&c3)
    };
    let u = inverse(&f).ok_or_else(|| PairError::Inconsistent("split basis is singular".into()))?;
    let witness = EquivalenceWitness { u, v, kind, v_unitary: false };
    let (e2, q2) = witness.apply(e, q).ok_or_else(|| PairError::Inconsistent("split witness".into()))?;
    let r = q2.block(0, k, 0, k);
    let e_nil = e2.block(k, n, k, n);
    let q_nil = q2.block(k, n, k, n);
    let expect_e = ExactMatrix::identity(k).direct_sum(&e_nil);
    let expect_q = r.direct_sum(&q_nil);
    if e2 != expect_e || q2 != expect_q || rank(&r) != k || !pair_product(&e_nil, &q_nil, kind).is_zero() {
        return Err(PairError::Inconsistent("regular/nilpotent split did not decouple".into()));
    }
    Ok(RegularNilpotentSplit { witness, k, r, e_nil, q_nil })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz;
    use crate::GaussianRational as G;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| G::int(v)).collect()).collect())
    }

    #[test]
    fn identity_has_no_nilpotent_part() {
        let i = ExactMatrix::identity(3);
        let s = split_regular_nilpotent(&i, &i, Kind::T).unwrap();
        assert_eq!(s.k, 3);
        assert_eq!(s.e_nil.shape(), (0, 0));
    }

    #[test]
    fn rank_one_hermitian() {
        let e = m(&[&[1, 0], &[0, 0]]);
        let s = split_regular_nilpotent(&e, &e, Kind::Star).unwrap();
        assert_eq!((s.k, s.r.clone()), (1, m(&[&[1]])));
        assert_eq!((s.e_nil.clone(), s.q_nil.clone()), (m(&[&[0]]), m(&[&[0]])));
        let (e2, q2) = s.witness.apply(&e, &e).unwrap();
        assert_eq!((e2, q2), (ExactMatrix::identity(1).direct_sum(&s.e_nil), s.r.direct_sum(&s.q_nil)));
    }

    #[test]
    fn planted_splits_are_recovered() {
        let mut rng = fuzz::rng(5);
        for kind in [Kind::T, Kind::Star] {
            // (I_2, diag(1, 2)) + nilpotent block + (1, 0)
            let r = m(&[&[1, 0], &[0, 2]]);
            let (ne, nq) = crate::blocks::nilpotent_block();
            let e0 = ExactMatrix::identity(2).direct_sum(&ne).direct_sum(&m(&[&[1]]));
            let q0 = r.direct_sum(&nq).direct_sum(&m(&[&[0]]));
            let w = EquivalenceWitness { u: fuzz::nonsingular(&mut rng, 5, 2), v: fuzz::nonsingular(&mut rng, 5, 2), kind, v_unitary: false };
            let (e, q) = w.apply(&e0, &q0).unwrap();
            let s = split_regular_nilpotent(&e, &q, kind).unwrap();
            assert_eq!(s.k, 2);
            assert!(pair_product(&s.e_nil, &s.q_nil, kind).is_zero());
        }
    }

    #[test]
    fn unstructured_product_is_rejected() {
        let e = ExactMatrix::identity(2);
        let q = m(&[&[1, 1], &[0, 1]]);
        assert!(matches!(split_regular_nilpotent(&e, &q, Kind::T), Err(PairError::UnsupportedFlavor(_))));
    }
}
