//! Double-precision fallback: Schur eigenvalues, clustering and numerical Weyr data.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use super::CongruenceError;
use crate::exactmat::rat_to_f64;
use crate::{ExactMatrix, GaussianRational};

pub(crate) fn to_dmatrix(a: &ExactMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.rows(), a.cols(), |r, c| {
        let z = &a[(r, c)];
        Complex64::new(rat_to_f64(z.re()), rat_to_f64(z.im()))
    })
}

pub(crate) fn eigenvalues(c: &DMatrix<Complex64>) -> Result<Vec<Complex64>, CongruenceError> {
    if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CongruenceError::EigenFailure("matrix entries overflow double precision".into()));
    }
    let schur = nalgebra::Schur::try_new(c.clone(), 1e-15, 10_000)
        .ok_or_else(|| CongruenceError::EigenFailure("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Group eigenvalues whose distance is at most `tau * max(1, |z|)`; returns
/// the cluster means and sizes.
pub(crate) fn cluster(values: &[Complex64], tau: f64) -> Vec<(Complex64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = values[i].norm().max(values[j].norm()).max(1.0);
            if (values[i] - values[j]).norm() <= tau * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += values[i];
                g.2 += 1;
            }
            None => groups.push((r, values[i], 1)),
        }
    }
    groups.into_iter().map(|(_, s, k)| (s / k as f64, k)).collect()
}

fn numeric_rank(m: &DMatrix<Complex64>, tau: f64) -> usize {
    if m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max).max(1.0);
    sv.iter().filter(|&&s| s > tau * top).count()
}

/// Weyr characteristic at `mu` from numerical ranks of powers of `C - mu I`;
/// fails unless the nullities reach `mult`.
pub(crate) fn weyr(c: &DMatrix<Complex64>, mu: Complex64, mult: usize, tau: f64) -> Result<Vec<usize>, CongruenceError> {
    let n = c.nrows();
    let shifted = c - DMatrix::from_diagonal_element(n, n, mu);
    let mut power = DMatrix::identity(n, n);
    let mut prev_rank = n;
    let mut out = Vec::new();
    let mut nullity = 0;
    while nullity < mult {
        power = &power * &shifted;
        let r = numeric_rank(&power, tau);
        if r >= prev_rank {
            break;
        }
        out.push(prev_rank - r);
        nullity += prev_rank - r;
        prev_rank = r;
    }
    if nullity != mult {
        return Err(CongruenceError::EigenFailure(format!(
            "eigenvalue {mu} has numerical nullity {nullity}, expected multiplicity {mult}"
        )));
    }
    Ok(out)
}

/// Best rational approximation with denominator at most `max_den`, if it is
/// within relative distance `accept` of `x`.
fn snap_real(x: f64, max_den: i64, accept: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let approx = h1 as f64 / k1 as f64;
    ((approx - x).abs() <= accept * x.abs().max(1.0)).then(|| BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Gaussian rational with small denominators near `z`, if any.
pub(crate) fn snap(z: Complex64, max_den: i64, accept: f64) -> Option<GaussianRational> {
    Some(GaussianRational::new(snap_real(z.re, max_den, accept)?, snap_real(z.im, max_den, accept)?))
}

/// Exact binary value of a double-precision eigenvalue.
pub(crate) fn exact_value(z: Complex64) -> GaussianRational {
    let f = |x: f64| BigRational::from_float(x).unwrap_or_else(|| BigRational::from_integer(0.into()));
    GaussianRational::new(f(z.re), f(z.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GaussianRational as G;

    #[test]
    fn snapping() {
        assert_eq!(snap(Complex64::new(0.5, -1.0 / 3.0), 100, 1e-9), Some(G::from_fracs(1, 2, -1, 3)));
        assert_eq!(snap(Complex64::new(std::f64::consts::PI, 0.0), 100, 1e-9), None);
    }

    #[test]
    fn defective_block_weyr() {
        let m = ExactMatrix::from_rows(vec![
            vec![G::int(2), G::int(1), G::int(0)],
            vec![G::int(0), G::int(2), G::int(0)],
            vec![G::int(0), G::int(0), G::int(5)],
        ]);
        let d = to_dmatrix(&m);
        let ev = eigenvalues(&d).unwrap();
        let cl = cluster(&ev, 1e-6);
        assert_eq!(cl.len(), 2);
        let two = cl.iter().find(|c| (c.0.re - 2.0).abs() < 1e-6).unwrap();
        assert_eq!(two.1, 2);
        assert_eq!(weyr(&d, two.0, 2, 1e-8).unwrap(), vec![1, 1]);
    }
}
