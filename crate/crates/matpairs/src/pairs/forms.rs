//! Exact reduction of the nonsingular regular part `R` of a structured pair
//! to unit pivots: `S^* R S = I_p + (-I_q)`, `S^T R S = I`, or a symplectic basis.
//!
//! Over `Q(i)` the first two need the pivots to be norms (resp. squares),
//! which is a number-theoretic question rather than an algebraic one. When
//! the form is not isometric to the unit form over `Q(i)` there is no exact
//! witness at all, and the caller gets the reason instead.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactmat::gauss::{norm_preimage, quick_norm_preimage, solve_conic, GInt};
use crate::exactmat::{determinant, nullspace};
use crate::{ExactMatrix, GaussianRational as G, Kind};

const PROBE_SEED: u64 = 0x5eed;
const RANDOM_PROBES: usize = 4000;
const REBASIS_ATTEMPTS: usize = 12;

fn quad(g: &ExactMatrix, x: &ExactMatrix, kind: Kind) -> G {
    x.adjoint(kind).mul(g).mul(x)[(0, 0)].clone()
}

/// Basis of `{ y in span(B) : X^+ R y = 0 }`, as columns in ambient coordinates.
fn complement(r: &ExactMatrix, b: &ExactMatrix, found: &ExactMatrix, kind: Kind) -> ExactMatrix {
    let rows = found.adjoint(kind).mul(r).mul(b);
    b.mul(&nullspace(&rows))
}

/// Probe vectors: unit vectors, then `e_j + c e_l`, then seeded random ones.
fn probes(m: usize) -> impl Iterator<Item = ExactMatrix> {
    let unit = move |j: usize| {
        let mut v = ExactMatrix::zeros(m, 1);
        v[(j, 0)] = G::one();
        v
    };
    let coeffs = [G::int(1), G::int(-1), G::i(), -G::i(), G::int(2), G::from_ints(1, 1)];
    let mut pairs = Vec::new();
    for j in 0..m {
        for l in j + 1..m {
            for c in &coeffs {
                pairs.push((j, l, c.clone()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let random = (0..RANDOM_PROBES).map(move |_| {
        ExactMatrix::from_fn(m, 1, |_, _| G::from_ints(rng.gen_range(-2..=2), rng.gen_range(-2..=2)))
    });
    (0..m)
        .map(unit)
        .chain(pairs.into_iter().map(move |(j, l, c)| {
            let mut v = unit(j);
            v[(l, 0)] = c;
            v
        }))
        .chain(random)
}

/// `S` with `S^* R S = diag(I_p, -I_q)` for Hermitian nonsingular `R`.
pub(crate) fn hermitian_units(r: &ExactMatrix) -> Result<(ExactMatrix, usize, usize), String> {
    let k = r.rows();
    let det = determinant(r).re().abs();
    if let Some(None) = norm_preimage(&det) {
        return Err(format!("|det R| = {det} is not a norm from Q(i); R is not isometric to a signature form"));
    }
    let (mut pos, mut neg) = (ExactMatrix::zeros(k, 0), ExactMatrix::zeros(k, 0));
    let mut basis = ExactMatrix::identity(k);
    while basis.cols() > 0 {
        let g = basis.conj_transpose().mul(r).mul(&basis);
        let pick = probes(g.rows()).find_map(|c| {
            let v = quad(&g, &c, Kind::Star).re().clone();
            if v.is_zero() {
                return None;
            }
            let gamma = quick_norm_preimage(&(BigRational::one() / v.abs()))??;
            Some((basis.mul(&c).scale(&gamma), v.is_positive()))
        });
        let Some((x, positive)) = pick else {
            return Err(format!("no norm-valued pivot found in a {}-dimensional remainder", g.rows()));
        };
        basis = complement(r, &basis, &x, Kind::Star);
        if positive {
            pos = pos.hstack(&x);
        } else {
            neg = neg.hstack(&x);
        }
    }
    let (p, q) = (pos.cols(), neg.cols());
    let s = pos.hstack(&neg);
    let target = ExactMatrix::identity(p).direct_sum(&ExactMatrix::identity(q).neg());
    if s.conj_transpose().mul(r).mul(&s) != target {
        return Err("internal: Hermitian reduction failed verification".into());
    }
    Ok((s, p, q))
}

/// `d L^2` as a Gaussian integer, with `L` the common denominator of `d`;
/// coefficient `x` against `d L^2` is coefficient `L x` against `d`.
fn integral(d: &G) -> (GInt, BigRational) {
    let l = d.re_den().lcm(d.im_den());
    let l2 = &l * &l;
    let re = d.re_num() * (&l2 / d.re_den());
    let im = d.im_num() * (&l2 / d.im_den());
    (GInt::new(re, im), BigRational::from_integer(l))
}

/// R-orthogonal basis of the current block, or an isotropic vector.
fn diagonalize(g: &ExactMatrix) -> Result<Vec<(ExactMatrix, G)>, ExactMatrix> {
    let m = g.rows();
    let mut rest: Vec<ExactMatrix> = (0..m).map(|j| ExactMatrix::identity(m).col(j)).collect();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let p = rest.remove(0);
        let v = quad(g, &p, Kind::T);
        if v.is_zero() {
            return Err(p);
        }
        for c in rest.iter_mut() {
            let f = &quad_bilinear(g, &p, c) / &v;
            *c = c.sub(&p.scale(&f));
        }
        out.push((p, v));
    }
    Ok(out)
}

fn quad_bilinear(g: &ExactMatrix, x: &ExactMatrix, y: &ExactMatrix) -> G {
    x.transpose().mul(g).mul(y)[(0, 0)].clone()
}

/// Two `G`-orthonormal vectors spanning a hyperbolic plane through the isotropic `c`.
fn hyperbolic_units(g: &ExactMatrix, c: &ExactMatrix) -> [ExactMatrix; 2] {
    let row = c.transpose().mul(g);
    let j = (0..row.cols()).find(|&j| !row[(0, j)].is_zero()).expect("nonsingular form");
    let mut y = ExactMatrix::zeros(g.rows(), 1);
    y[(j, 0)] = row[(0, j)].inv().unwrap();
    let half = G::from_fracs(1, 2, 0, 1);
    let y = y.sub(&c.scale(&(&quad(g, &y, Kind::T) * &half)));
    let u = c.add(&y.scale(&half));
    let w = c.sub(&y.scale(&half)).scale(&G::i());
    [u, w]
}

/// Next batch of `G`-orthonormal vectors (coordinates in the current block).
fn symmetric_step(g: &ExactMatrix) -> Option<Vec<ExactMatrix>> {
    let diag = match diagonalize(g) {
        Ok(d) => d,
        Err(iso) => return Some(hyperbolic_units(g, &iso).to_vec()),
    };
    for (b, d) in &diag {
        if let Some(s) = d.sqrt() {
            return Some(vec![b.scale(&s.inv().unwrap())]);
        }
    }
    for (i, (bi, di)) in diag.iter().enumerate() {
        for (bj, dj) in &diag[i + 1..] {
            if let Some(s) = (di / dj).sqrt() {
                // <v, v> = I_2 via (a, b) with a + ib = 1, a - ib = 1/v
                let bj = bj.scale(&s);
                let vinv = di.inv().unwrap();
                let half = G::from_fracs(1, 2, 0, 1);
                let a = &(&G::one() + &vinv) * &half;
                let b = &(&(&G::one() - &vinv) * &half) / &G::i();
                let u = bi.scale(&a).add(&bj.scale(&b));
                let w = bj.scale(&a).sub(&bi.scale(&b));
                return Some(vec![u, w]);
            }
        }
    }
    let ints: Vec<(GInt, BigRational)> = diag.iter().map(|(_, d)| integral(d)).collect();
    let scaled = |i: usize, x: &G| diag[i].0.scale(&(x * &G::real(ints[i].1.clone())));
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            if let Some([x, y, z]) = solve_conic(&ints[i].0, &ints[j].0) {
                let v = scaled(i, &x).add(&scaled(j, &y));
                return Some(match z.inv() {
                    Some(zi) => vec![v.scale(&zi)],
                    None => hyperbolic_units(g, &v).to_vec(),
                });
            }
        }
    }
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            for l in j + 1..diag.len() {
                let (di, dj, dl) = (&ints[i].0, &ints[j].0, &ints[l].0);
                let neg = |p: GInt| GInt::new(-p.re, -p.im);
                if let Some([x, y, w]) = solve_conic(&neg(di.mul(dl)), &neg(dj.mul(dl))) {
                    let z = &w / &dl.to_rational();
                    let v = scaled(i, &x).add(&scaled(j, &y)).add(&scaled(l, &z));
                    if !v.is_zero() {
                        return Some(hyperbolic_units(g, &v).to_vec());
                    }
                }
            }
        }
    }
    None
}

/// `S` with `S^T R S = I` for symmetric nonsingular `R`.
pub(crate) fn symmetric_units(r: &ExactMatrix) -> Result<ExactMatrix, String> {
    let k = r.rows();
    let det = determinant(r);
    if det.sqrt().is_none() {
        return Err(format!("det R = {det} is not a square in Q(i); R is not congruent to I over Q(i)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut s = ExactMatrix::zeros(k, 0);
    let mut basis = ExactMatrix::identity(k);
    while basis.cols() > 0 {
        let mut step = None;
        for _ in 0..REBASIS_ATTEMPTS {
            let g = basis.transpose().mul(r).mul(&basis);
            if let Some(vs) = symmetric_step(&g) {
                step = Some(vs);
                break;
            }
            // a different diagonalization may pair up better
            let m = basis.cols();
            let t = ExactMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    G::one()
                } else if i < j {
                    G::from_ints(rng.gen_range(-2..=2), rng.gen_range(-1..=1))
                } else {
                    G::zero()
                }
            });
            let perm = (rng.gen_range(0..m), rng.gen_range(0..m));
            let mut t = t;
            t.swap_rows(perm.0, perm.1);
            basis = basis.mul(&t);
        }
        let Some(vs) = step else {
            return Err(format!("no square pivot or isotropic vector found in a {}-dimensional remainder", basis.cols()));
        };
        let found = vs.iter().fold(ExactMatrix::zeros(k, 0), |acc, v| acc.hstack(&basis.mul(v)));
        basis = complement(r, &basis, &found, Kind::T);
        s = s.hstack(&found);
    }
    if s.transpose().mul(r).mul(&s) != ExactMatrix::identity(k) {
        return Err("internal: symmetric reduction failed verification".into());
    }
    Ok(s)
}

/// `S` with `S^T R S = H_2(-1) + ... + H_2(-1)` for skew-symmetric nonsingular `R`.
pub(crate) fn symplectic_basis(r: &ExactMatrix) -> ExactMatrix {
    let k = r.rows();
    let mut s = ExactMatrix::zeros(k, 0);
    let mut basis = ExactMatrix::identity(k);
    while basis.cols() > 0 {
        let g = basis.transpose().mul(r).mul(&basis);
        let l = (1..g.cols()).find(|&l| !g[(0, l)].is_zero()).expect("nonsingular skew form");
        let u = basis.col(0);
        let w = basis.col(l).scale(&g[(0, l)].inv().unwrap());
        let pair = u.hstack(&w);
        basis = complement(r, &basis, &pair, Kind::T);
        s = s.hstack(&pair);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> ExactMatrix {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&(a, b)| G::from_ints(a, b)).collect()).collect())
    }

    fn scramble(seed: u64, n: usize) -> ExactMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let v = ExactMatrix::from_fn(n, n, |_, _| G::from_ints(rng.gen_range(-2..=2), rng.gen_range(-2..=2)));
            if !determinant(&v).is_zero() {
                return v;
            }
        }
    }

    #[test]
    fn hermitian_signature_forms() {
        let r = m(&[&[(2, 0), (1, 1)], &[(1, -1), (-3, 0)]]);
        // det = -8, |det| = 8 = 4 + 4
        let (s, p, q) = hermitian_units(&r).unwrap();
        assert_eq!((p, q), (1, 1));
        assert_eq!(s.conj_transpose().mul(&r).mul(&s), ExactMatrix::diag(&[G::int(1), G::int(-1)]));
        assert!(hermitian_units(&m(&[&[(3, 0)]])).is_err());
        for seed in 0..6 {
            let v = scramble(seed, 4);
            let d = ExactMatrix::diag(&[G::int(1), G::int(1), G::int(-1), G::int(1)]);
            let r = v.conj_transpose().mul(&d).mul(&v);
            let (_, p, q) = hermitian_units(&r).unwrap();
            assert_eq!((p, q), (3, 1));
        }
    }

    #[test]
    fn symmetric_unit_forms() {
        for seed in 0..10 {
            let n = 2 + (seed as usize % 5);
            let v = scramble(100 + seed, n);
            let r = v.transpose().mul(&v);
            let s = symmetric_units(&r).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert_eq!(s.transpose().mul(&r).mul(&s), ExactMatrix::identity(n));
        }
        assert!(symmetric_units(&m(&[&[(2, 0)]])).is_err());
    }

    #[test]
    fn symplectic_forms() {
        let v = scramble(7, 4);
        let h = m(&[&[(0, 0), (1, 0)], &[(-1, 0), (0, 0)]]);
        let r = v.transpose().mul(&h.direct_sum(&h)).mul(&v);
        let s = symplectic_basis(&r);
        assert_eq!(s.transpose().mul(&r).mul(&s), h.direct_sum(&h));
    }
}
