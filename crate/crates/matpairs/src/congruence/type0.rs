//! Exact extraction of the `J_p(0)` summands by quotient iteration.
//!
//! For the form `f(x, y) = x^† A y` let `K = ker A` and `L = ker A^†`. On
//! `V1 = { v : f(K, v) = 0, f(v, L) = 0 }` the subspace `(K + L) ∩ V1` lies in
//! both radicals, so `f` descends to the quotient. A canonical summand
//! `J_p(0)` disappears when `p <= 4` and becomes `J_{p-4}(0)` otherwise, while
//! the regular part passes through unchanged. The dimensions seen at each
//! step determine how many blocks of size 1, 2, 3 and `>= 4` there are.

use super::CongruenceError;
use crate::exactmat::{column_basis, extend_to_basis, nullspace, rank};
use crate::{ExactMatrix, Kind};

struct Step {
    /// blocks of size 1, 2, 3 and at least 4 at this level
    counts: [usize; 4],
    next: ExactMatrix,
}

fn step(a: &ExactMatrix, kind: Kind) -> Result<Step, CongruenceError> {
    let n = a.rows();
    let k = nullspace(a);
    let l = nullspace(&a.adjoint(kind));
    let dim_k = k.cols();
    let both = k.hstack(&l);
    let sum = column_basis(&both);
    let n1 = dim_k + l.cols() - sum.cols();

    let conditions = k.adjoint(kind).mul(a).vstack(&l.adjoint(kind).mul(&a.adjoint(kind)));
    let v1 = nullspace(&conditions);
    let codim = n - v1.cols();
    let w = sum.mul(&nullspace(&conditions.mul(&sum)));

    // dim K - n1 = n2 + n3 + n4,  codim V1 = 2 n2 + n3 + 2 n4,  dim W - n1 = 2 n3 + 2 n4
    let d = dim_k - n1;
    let e = w.cols().checked_sub(n1);
    let n3 = (2 * d).checked_sub(codim);
    let (Some(e), Some(n3)) = (e, n3) else {
        return Err(CongruenceError::StructureInconsistent("type 0 dimension count went negative".into()));
    };
    if e % 2 != 0 || e / 2 < n3 || d < e / 2 {
        return Err(CongruenceError::StructureInconsistent("type 0 dimension counts are not consistent".into()));
    }
    let n4 = e / 2 - n3;
    let n2 = d - e / 2;

    // complement of W inside V1, in coordinates of V1
    let w_in_v1 = crate::exactmat::solve(&v1, &w)
        .ok_or_else(|| CongruenceError::StructureInconsistent("radical is not inside V1".into()))?;
    let comp = v1.mul(&extend_to_basis(&w_in_v1));
    let next = comp.adjoint(kind).mul(a).mul(&comp);
    debug_assert_eq!(rank(&w), w.cols());
    Ok(Step { counts: [n1, n2, n3, n4], next })
}

/// Sizes of the `J_p(0)` summands (descending) and a nonsingular matrix
/// congruent to the regular part.
pub fn type0_split(a: &ExactMatrix, kind: Kind) -> Result<(Vec<usize>, ExactMatrix), CongruenceError> {
    if !a.is_square() {
        return Err(CongruenceError::NotSquare(a.rows(), a.cols()));
    }
    let mut levels: Vec<[usize; 4]> = Vec::new();
    let mut cur = a.clone();
    loop {
        if rank(&cur) == cur.rows() {
            break;
        }
        let s = step(&cur, kind)?;
        if s.next.rows() >= cur.rows() {
            return Err(CongruenceError::StructureInconsistent("quotient step made no progress".into()));
        }
        levels.push(s.counts);
        cur = s.next;
    }
    // a block of size p >= 4 at level t survives to level t+1 as p - 4, unless p = 4
    let mut sizes = Vec::new();
    for (t, c) in levels.iter().enumerate() {
        let shift = 4 * t;
        let survivors: usize = levels.get(t + 1).map_or(0, |nx| nx.iter().sum());
        let fours = c[3].checked_sub(survivors).ok_or_else(|| {
            CongruenceError::StructureInconsistent("more surviving blocks than long blocks".into())
        })?;
        for (size, count) in [(1, c[0]), (2, c[1]), (3, c[2]), (4, fours)] {
            sizes.extend(std::iter::repeat(shift + size).take(count));
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let total: usize = sizes.iter().sum();
    if total + cur.rows() != a.rows() {
        return Err(CongruenceError::StructureInconsistent("type 0 sizes do not add up".into()));
    }
    Ok((sizes, cur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::CongruenceStructure;
    use crate::exactmat::is_nonsingular;
    use crate::fuzz;
    use crate::GaussianRational as G;

    fn planted(kind: Kind, sizes: &[usize]) -> CongruenceStructure {
        let mut s = CongruenceStructure::new(kind).with_h(1, G::int(2));
        if kind == Kind::T {
            s = s.with_gamma(2);
        } else {
            s = s.with_delta(2, G::i());
        }
        for &p in sizes {
            s = s.with_type0(p);
        }
        s
    }

    #[test]
    fn canonical_inputs() {
        let j3 = CongruenceStructure::new(Kind::T).with_type0(3).realize().unwrap();
        let (sizes, core) = type0_split(&j3, Kind::T).unwrap();
        assert_eq!(sizes, vec![3]);
        assert_eq!(core.shape(), (0, 0));
        let s = CongruenceStructure::new(Kind::T).with_gamma(2).with_type0(1).realize().unwrap();
        let (sizes, core) = type0_split(&s, Kind::T).unwrap();
        assert_eq!(sizes, vec![1]);
        assert_eq!(core.rows(), 2);
    }

    #[test]
    fn recovers_long_and_mixed_blocks() {
        let mut r = fuzz::rng(3);
        let cases: &[&[usize]] = &[&[4], &[5], &[6, 1], &[9, 4, 2], &[8, 5, 3, 3, 1], &[2, 2, 1, 1]];
        for kind in [Kind::T, Kind::Star] {
            for sizes in cases {
                let s = planted(kind, sizes);
                let m = s.realize().unwrap();
                let q = fuzz::nonsingular(&mut r, m.rows(), 2);
                let scrambled = q.adjoint(kind).mul(&m).mul(&q);
                let (got, core) = type0_split(&scrambled, kind).unwrap();
                let mut want = sizes.to_vec();
                want.sort_unstable_by(|a, b| b.cmp(a));
                assert_eq!(got, want, "{kind:?} {sizes:?}");
                assert_eq!(core.rows(), 4);
                assert!(is_nonsingular(&core));
            }
        }
    }
}
