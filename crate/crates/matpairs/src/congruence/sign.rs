//! Sign characteristic for unit-circle eigenvalues of the *-cosquare.
//!
//! Compressed to the root subspace of `lambda = alpha0^2` and rescaled by
//! `alpha0^{-1}`, the matrix `B` is *-congruent to a sum of `±Delta_k`. Its
//! cosquare `C` is unipotent and unitary for `H = B + B^*`, so with
//! `N = C - I` the form `Z_k^* H (iN)^{k-1} Z_k` on `ker N^k` is Hermitian and
//! sees exactly the blocks of size `k`, one signed square each. The sign
//! convention is calibrated on `Delta_k` itself.

use super::CongruenceError;
use crate::blocks::{build_block, BlockKind, TypeOne};
use crate::exactmat::{hermitian_inertia, inverse, nullspace};
use crate::{ExactMatrix, GaussianRational};

/// Per size `k`: (count of `+` forms, count of `-` forms).
fn signed_forms(b: &ExactMatrix) -> Result<Vec<(usize, usize)>, CongruenceError> {
    let n = b.rows();
    let bs = b.conj_transpose();
    let c = inverse(&bs)
        .ok_or_else(|| CongruenceError::StructureInconsistent("compressed block is singular".into()))?
        .mul(b);
    let nil = c.sub(&ExactMatrix::identity(n));
    let h = b.add(&bs);
    let mut out = Vec::new();
    let mut covered = 0;
    let mut nk = ExactMatrix::identity(n);
    // (iN)^{k-1}
    let mut inp = ExactMatrix::identity(n);
    let i_nil = nil.scale(&GaussianRational::i());
    let mut k = 0;
    while covered < n {
        k += 1;
        if k > n {
            return Err(CongruenceError::StructureInconsistent("cosquare of the unit-circle part is not unipotent".into()));
        }
        nk = nk.mul(&nil);
        let z = nullspace(&nk);
        let g = z.conj_transpose().mul(&h).mul(&inp).mul(&z);
        let (p, q, _) = hermitian_inertia(&g)
            .map_err(|e| CongruenceError::StructureInconsistent(format!("sign form: {e}")))?;
        out.push((p, q));
        covered += k * (p + q);
        inp = inp.mul(&i_nil);
    }
    if covered != n {
        return Err(CongruenceError::StructureInconsistent("sign forms do not account for the root subspace".into()));
    }
    Ok(out)
}

/// `+1` when `Delta_k` shows a positive form at size `k`.
fn calibration(k: usize) -> Result<bool, CongruenceError> {
    let d = build_block(BlockKind::Delta, k, None).expect("Delta_k exists for k >= 1");
    let forms = signed_forms(&d)?;
    match forms.get(k - 1) {
        Some(&(1, 0)) => Ok(true),
        Some(&(0, 1)) => Ok(false),
        _ => Err(CongruenceError::StructureInconsistent(format!("calibration of Delta_{k} failed"))),
    }
}

/// Type I summands carried by the unit-circle eigenvalue `lambda` of the
/// *-cosquare `C = A^{-*} A`.
pub(crate) fn unit_circle_blocks(
    a: &ExactMatrix,
    c: &ExactMatrix,
    lambda: &GaussianRational,
    mult: usize,
) -> Result<Vec<TypeOne>, CongruenceError> {
    let alpha0 = lambda.sqrt().ok_or_else(|| {
        CongruenceError::IrrationalParameter(format!("square root of the cosquare eigenvalue {lambda} is not in Q(i)"))
    })?;
    let n = c.rows();
    let shifted = c.sub(&ExactMatrix::identity(n).scale(lambda));
    let z = nullspace(&shifted.pow(mult as u32));
    if z.cols() != mult {
        return Err(CongruenceError::StructureInconsistent(format!("root subspace of {lambda} has the wrong dimension")));
    }
    let b = z.conj_transpose().mul(a).mul(&z).scale(&alpha0.conj());
    let mut out = Vec::new();
    for (idx, (p, q)) in signed_forms(&b)?.into_iter().enumerate() {
        if p + q == 0 {
            continue;
        }
        let size = idx + 1;
        let (plus, minus) = if calibration(size)? { (p, q) } else { (q, p) };
        for _ in 0..plus {
            out.push(TypeOne { size, alpha: alpha0.clone() });
        }
        for _ in 0..minus {
            out.push(TypeOne { size, alpha: -alpha0.clone() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GaussianRational as G;

    fn star_cosquare(a: &ExactMatrix) -> ExactMatrix {
        inverse(&a.conj_transpose()).unwrap().mul(a)
    }

    #[test]
    fn signs_of_scaled_deltas() {
        for alpha in [G::int(1), G::int(-1), G::i(), G::from_ints(0, -1)] {
            for k in 1..=4 {
                let a = build_block(BlockKind::Delta, k, None).unwrap().scale(&alpha);
                let c = star_cosquare(&a);
                let lambda = &alpha * &alpha;
                let got = unit_circle_blocks(&a, &c, &lambda, k).unwrap();
                assert_eq!(got, vec![TypeOne { size: k, alpha: alpha.clone() }], "alpha {alpha} k {k}");
            }
        }
    }

    #[test]
    fn mixed_signs_same_eigenvalue() {
        let d1 = build_block(BlockKind::Delta, 1, None).unwrap();
        let d2 = build_block(BlockKind::Delta, 2, None).unwrap();
        let a = ExactMatrix::direct_sum_all([&d2.neg(), &d1, &d1.neg(), &d2]);
        let c = star_cosquare(&a);
        let mut got = unit_circle_blocks(&a, &c, &G::int(1), 6).unwrap();
        got.sort_by(|x, y| x.size.cmp(&y.size).then(x.alpha.cmp_lex(&y.alpha)));
        let t = |size, a: i64| TypeOne { size, alpha: G::int(a) };
        assert_eq!(got, vec![t(1, -1), t(1, 1), t(2, -1), t(2, 1)]);
    }

    #[test]
    fn irrational_square_root_is_refused() {
        let alpha = G::from_fracs(3, 5, 4, 5);
        let a = build_block(BlockKind::Delta, 1, None).unwrap().scale(&alpha);
        let got = unit_circle_blocks(&a, &star_cosquare(&a), &(&alpha * &alpha), 1).unwrap();
        assert_eq!(got[0].alpha, alpha);
        // [2+i] has *-cosquare (3+4i)/5, whose square roots are (2+i)/sqrt(5)
        let b = ExactMatrix::diag(&[G::from_ints(2, 1)]);
        let c = star_cosquare(&b);
        assert!(matches!(unit_circle_blocks(&b, &c, &c[(0, 0)], 1), Err(CongruenceError::IrrationalParameter(_))));
    }
}
