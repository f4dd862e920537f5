use num_traits::{Signed, Zero};

use super::{ExactMatError, Field};
use crate::{ExactMatrix, GaussianRational};

/// Sylvester inertia of a Hermitian matrix as `(n_plus, n_minus, n_zero)`.
///
/// Exact block LDL^*: a nonzero diagonal entry is a 1x1 pivot; when the
/// remaining diagonal vanishes, a nonzero off-diagonal pair forms a 2x2
/// hyperbolic pivot worth one positive and one negative square.
pub fn hermitian_inertia(a: &ExactMatrix) -> Result<(usize, usize, usize), ExactMatError> {
    if !a.is_hermitian() {
        return Err(ExactMatError::NotHermitian);
    }
    let n = a.rows();
    let mut m: Vec<Vec<GaussianRational>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let (mut plus, mut minus) = (0, 0);
    while !alive.is_empty() {
        if let Some(pos) = alive.iter().position(|&k| !m[k][k].is_zero()) {
            let k = alive.swap_remove(pos);
            let d = m[k][k].clone();
            if d.re().is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            let col: Vec<GaussianRational> = alive.iter().map(|&i| m[i][k].clone()).collect();
            for (ii, &i) in alive.iter().enumerate() {
                if col[ii].is_zero() {
                    continue;
                }
                let f = &col[ii] / &d;
                for (jj, &j) in alive.iter().enumerate() {
                    // M[k][j] = conj(M[j][k])
                    let rhs = col[jj].conj();
                    m[i][j].sub_mul_assign(&f, &rhs);
                }
            }
            continue;
        }
        let pair = alive.iter().enumerate().find_map(|(pj, &j)| {
            alive.iter().enumerate().find(|&(_, &k)| k != j && !m[j][k].is_zero()).map(|(pk, _)| (pj, pk))
        });
        let Some((pj, pk)) = pair else { break };
        let (j, k) = (alive[pj], alive[pk]);
        // B = [[0, a], [conj(a), 0]], B^{-1} = [[0, 1/conj(a)], [1/a, 0]]
        let a_jk = m[j][k].clone();
        let inv_a = a_jk.inv().unwrap();
        let inv_ac = inv_a.conj();
        plus += 1;
        minus += 1;
        alive.retain(|&x| x != j && x != k);
        let cj: Vec<GaussianRational> = alive.iter().map(|&i| m[i][j].clone()).collect();
        let ck: Vec<GaussianRational> = alive.iter().map(|&i| m[i][k].clone()).collect();
        for (ii, &i) in alive.iter().enumerate() {
            // row i of C B^{-1} = [ck_i / a, cj_i / conj(a)]
            let u = &ck[ii] * &inv_a;
            let v = &cj[ii] * &inv_ac;
            for (jj, &l) in alive.iter().enumerate() {
                // (C B^{-1} C^*)_{il} = u * conj(cj_l) + v * conj(ck_l)
                m[i][l].sub_mul_assign(&u, &cj[jj].conj());
                m[i][l].sub_mul_assign(&v, &ck[jj].conj());
            }
        }
    }
    Ok((plus, minus, n - plus - minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::rank;
    use crate::GaussianRational as G;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| G::int(v)).collect()).collect())
    }

    #[test]
    fn small_hermitian_examples() {
        assert_eq!(hermitian_inertia(&ExactMatrix::diag(&[G::int(2), G::int(-3), G::int(0)])).unwrap(), (1, 1, 1));
        assert_eq!(hermitian_inertia(&ExactMatrix::identity(4)).unwrap(), (4, 0, 0));
        assert_eq!(hermitian_inertia(&m(&[&[0, 1], &[1, 0]])).unwrap(), (1, 1, 0));
    }

    #[test]
    fn rejects_non_hermitian() {
        assert_eq!(hermitian_inertia(&m(&[&[0, 1], &[0, 0]])), Err(ExactMatError::NotHermitian));
        let a = ExactMatrix::from_rows(vec![vec![G::i()]]);
        assert_eq!(hermitian_inertia(&a), Err(ExactMatError::NotHermitian));
    }

    #[test]
    fn hyperbolic_pivots_with_complex_entries() {
        let a = ExactMatrix::from_rows(vec![
            vec![G::int(0), G::from_ints(1, 2), G::int(0)],
            vec![G::from_ints(1, -2), G::int(0), G::int(1)],
            vec![G::int(0), G::int(1), G::int(0)],
        ]);
        let (p, q, z) = hermitian_inertia(&a).unwrap();
        assert_eq!(p + q, rank(&a));
        assert_eq!((p, q, z), (1, 1, 1));
    }
}
