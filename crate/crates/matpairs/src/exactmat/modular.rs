//! Multi-modular rank and nullspace with an exact certificate.
//!
//! The matrix is reduced modulo word-size primes `p = 1 mod 4`, where `i` maps
//! to a square root of `-1`. Every prime gives a lower bound on the rank (a
//! nonzero minor mod p is nonzero over Q). The RREF coefficients are lifted by
//! CRT and rational reconstruction, and the resulting nullspace is checked with
//! exact integer arithmetic, which supplies the matching upper bound. When
//! reconstruction does not settle within the prime budget the caller falls back
//! to rational elimination.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::Matrix;
use super::scalar::Field;

const MAX_PRIMES: usize = 400;

#[derive(Clone, Copy)]
struct ModPrime {
    p: u64,
    /// square root of -1 mod p
    s: u64,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes() -> impl Iterator<Item = ModPrime> {
    static PRIMES: OnceLock<Vec<ModPrime>> = OnceLock::new();
    PRIMES
        .get_or_init(|| {
            // descending from 2^62 so reductions never overflow an add
            let mut cand: u64 = (1 << 62) + 1;
            let mut out = Vec::with_capacity(MAX_PRIMES);
            while out.len() < MAX_PRIMES {
                cand -= 4;
                if is_prime_u64(cand) {
                    let p = cand;
                    let nonresidue = (2..).find(|&c| pow_mod(c, (p - 1) / 2, p) == p - 1).unwrap();
                    out.push(ModPrime { p, s: pow_mod(nonresidue, (p - 1) / 4, p) });
                }
            }
            out
        })
        .iter()
        .copied()
}

/// Entries scaled row by row to Gaussian integers `(re, im)`.
struct IntMatrix {
    rows: usize,
    cols: usize,
    re: Vec<BigInt>,
    im: Vec<BigInt>,
    complex: bool,
}

impl IntMatrix {
    fn from<T: Field>(a: &Matrix<T>) -> Self {
        let (rows, cols) = a.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        let mut complex = false;
        for r in 0..rows {
            let row = a.row(r);
            let mut l = BigInt::one();
            for x in row {
                x.denom_lcm_into(&mut l);
            }
            for x in row {
                let (a, b) = x.scaled_parts(&l);
                complex |= !b.is_zero();
                re.push(a);
                im.push(b);
            }
        }
        IntMatrix { rows, cols, re, im, complex }
    }

    fn reduce(&self, p: u64, s: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let red = |x: &BigInt| -> u64 {
            if x.is_zero() {
                0
            } else {
                x.mod_floor(&pb).to_u64().unwrap()
            }
        };
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| {
                let ra = red(a);
                if b.is_zero() {
                    ra
                } else {
                    (ra + mul_mod(red(b), s, p)) % p
                }
            })
            .collect()
    }
}

/// RREF mod p in place; returns pivot columns.
fn rref_mod(m: &mut [u64], rows: usize, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(r) = (pr..rows).find(|&r| m[r * cols + c] != 0) else {
            continue;
        };
        if r != pr {
            for k in 0..cols {
                m.swap(r * cols + k, pr * cols + k);
            }
        }
        let inv = inv_mod(m[pr * cols + c], p);
        for k in c..cols {
            m[pr * cols + k] = mul_mod(m[pr * cols + k], inv, p);
        }
        for r in 0..rows {
            if r == pr {
                continue;
            }
            let f = m[r * cols + c];
            if f == 0 {
                continue;
            }
            for k in c..cols {
                let t = mul_mod(f, m[pr * cols + k], p);
                let v = m[r * cols + k];
                m[r * cols + k] = if v >= t { v - t } else { v + p - t };
            }
        }
        pivots.push(c);
        pr += 1;
    }
    pivots
}

/// Rational `a/b` with `|a|, b <= sqrt(m/2)` and `a = u b mod m`.
fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (q, r2) = r0.div_rem(&r1);
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let r = BigRational::new(r1, t1);
    // a/b must reproduce u
    let back = (r.numer() - u * r.denom()).mod_floor(m);
    back.is_zero().then_some(r)
}

struct Lift {
    rank: usize,
    pivots: Vec<usize>,
    modulus: BigInt,
    /// CRT images of the RREF coefficients on free columns, `rank x free` row-major
    re: Vec<BigInt>,
    im: Vec<BigInt>,
}

/// Residues of the RREF free-column block for one prime: real and imaginary
/// parts mod p, recovered from the two embeddings `i -> s` and `i -> -s`.
fn image(a: &IntMatrix, mp: ModPrime) -> Option<(Vec<usize>, Vec<u64>, Vec<u64>)> {
    let (rows, cols, p) = (a.rows, a.cols, mp.p);
    let mut m1 = a.reduce(p, mp.s);
    let piv = rref_mod(&mut m1, rows, cols, p);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    let take = |m: &[u64]| -> Vec<u64> {
        (0..piv.len()).flat_map(|i| free.iter().map(move |&f| m[i * cols + f])).collect()
    };
    let c1 = take(&m1);
    if !a.complex {
        let zeros = vec![0; c1.len()];
        return Some((piv, c1, zeros));
    }
    let mut m2 = a.reduce(p, p - mp.s);
    let piv2 = rref_mod(&mut m2, rows, cols, p);
    if piv2 != piv {
        return None;
    }
    let c2 = take(&m2);
    let inv2 = inv_mod(2, p);
    let inv2s = inv_mod(mul_mod(2, mp.s, p), p);
    let re = c1.iter().zip(&c2).map(|(&x, &y)| mul_mod((x + y) % p, inv2, p)).collect();
    let im = c1.iter().zip(&c2).map(|(&x, &y)| mul_mod((x + p - y) % p, inv2s, p)).collect();
    Some((piv, re, im))
}

fn crt(old: &BigInt, m: &BigInt, r: u64, p: u64) -> BigInt {
    // x = old + m * ((r - old) / m mod p)
    let pb = BigInt::from(p);
    let old_p = old.mod_floor(&pb).to_u64().unwrap();
    let m_p = m.mod_floor(&pb).to_u64().unwrap();
    let diff = (r + p - old_p) % p;
    let k = mul_mod(diff, inv_mod(m_p, p), p);
    old + m * BigInt::from(k)
}

/// Outcome of the modular attempt: rank with the RREF-style nullspace basis
/// (identity on free columns), certified exactly.
pub(crate) struct ModularNull<T> {
    pub rank: usize,
    pub null: Matrix<T>,
}

/// Certified rank only. Full-rank answers need no lifting.
pub(crate) fn rank<T: Field>(a: &Matrix<T>) -> Option<usize> {
    let im = IntMatrix::from(a);
    let mut best: Option<(usize, Vec<usize>)> = None;
    // a couple of primes for the lower bound; full row or column rank is then final
    for mp in primes().take(2) {
        if let Some((piv, _, _)) = image(&im, mp) {
            if best.as_ref().is_none_or(|b| piv.len() > b.0) {
                best = Some((piv.len(), piv));
            }
        }
    }
    if let Some((r, _)) = &best {
        if *r == a.rows() || *r == a.cols() {
            return Some(*r);
        }
    }
    nullspace_with(&im, a).map(|n| n.rank)
}

pub(crate) fn nullspace<T: Field>(a: &Matrix<T>) -> Option<ModularNull<T>> {
    nullspace_with(&IntMatrix::from(a), a)
}

fn nullspace_with<T: Field>(im: &IntMatrix, a: &Matrix<T>) -> Option<ModularNull<T>> {
    let cols = im.cols;
    let mut lift: Option<Lift> = None;
    let mut fail_at = 0usize;
    for mp in primes().take(MAX_PRIMES) {
        let Some((piv, re, imv)) = image(im, mp) else { continue };
        let better = match &lift {
            None => true,
            // unlucky primes lose rank or push pivots right
            Some(l) => piv.len() > l.rank || (piv.len() == l.rank && piv < l.pivots),
        };
        if better {
            lift = Some(Lift {
                rank: piv.len(),
                pivots: piv,
                modulus: BigInt::from(mp.p),
                re: re.into_iter().map(BigInt::from).collect(),
                im: imv.into_iter().map(BigInt::from).collect(),
            });
        } else {
            let l = lift.as_mut().unwrap();
            if piv != l.pivots {
                continue;
            }
            for (x, r) in l.re.iter_mut().zip(re) {
                *x = crt(x, &l.modulus, r, mp.p);
            }
            for (x, r) in l.im.iter_mut().zip(imv) {
                *x = crt(x, &l.modulus, r, mp.p);
            }
            l.modulus *= mp.p;
        }
        let l = lift.as_ref().unwrap();
        if let Some(n) = try_certify(im, a, l, cols, &mut fail_at) {
            return Some(n);
        }
    }
    None
}

fn try_certify<T: Field>(
    im: &IntMatrix,
    a: &Matrix<T>,
    l: &Lift,
    cols: usize,
    fail_at: &mut usize,
) -> Option<ModularNull<T>> {
    let free: Vec<usize> = (0..cols).filter(|c| !l.pivots.contains(c)).collect();
    let nf = free.len();
    if nf == 0 {
        return Some(ModularNull { rank: l.rank, null: Matrix::zeros(cols, 0) });
    }
    // check the entry that failed last time first; it is the likeliest to fail again
    let total = l.re.len();
    let recon = |k: usize| -> Option<(BigRational, BigRational)> {
        let re = rational_reconstruct(&l.re[k], &l.modulus)?;
        let imv = if im.complex { rational_reconstruct(&l.im[k], &l.modulus)? } else { BigRational::zero() };
        Some((re, imv))
    };
    if total > 0 && recon(*fail_at % total).is_none() {
        return None;
    }
    let mut coeffs = Vec::with_capacity(total);
    for k in 0..total {
        match recon(k) {
            Some(c) => coeffs.push(c),
            None => {
                *fail_at = k;
                return None;
            }
        }
    }
    let mut null = Matrix::<T>::zeros(cols, nf);
    for (j, &f) in free.iter().enumerate() {
        null[(f, j)] = T::one();
        for (i, &pc) in l.pivots.iter().enumerate() {
            let (re, imv) = &coeffs[i * nf + j];
            null[(pc, j)] = -T::from_parts(re.clone(), imv.clone());
        }
    }
    verify_null(im, &null).then(|| {
        debug_assert!(a.mul(&null).is_zero());
        ModularNull { rank: l.rank, null }
    })
}

/// `A N = 0` in exact integer arithmetic after clearing denominators of `N`.
fn verify_null<T: Field>(im: &IntMatrix, null: &Matrix<T>) -> bool {
    let (rows, cols) = (im.rows, im.cols);
    for j in 0..null.cols() {
        let mut l = BigInt::one();
        for r in 0..cols {
            null[(r, j)].denom_lcm_into(&mut l);
        }
        let col: Vec<(BigInt, BigInt)> = (0..cols).map(|r| null[(r, j)].scaled_parts(&l)).collect();
        for r in 0..rows {
            let (mut sr, mut si) = (BigInt::zero(), BigInt::zero());
            for (k, (nr, ni)) in col.iter().enumerate() {
                let (ar, ai) = (&im.re[r * cols + k], &im.im[r * cols + k]);
                if nr.sign() == Sign::NoSign && ni.sign() == Sign::NoSign {
                    continue;
                }
                if !ar.is_zero() {
                    sr += ar * nr;
                    si += ar * ni;
                }
                if !ai.is_zero() {
                    sr -= ai * ni;
                    si += ai * nr;
                }
            }
            if !sr.is_zero() || !si.is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::elim;
    use crate::fuzz;

    #[test]
    fn primes_have_square_roots_of_minus_one() {
        for mp in primes().take(5) {
            assert_eq!(mp.p % 4, 1);
            assert_eq!(mul_mod(mp.s, mp.s, mp.p), mp.p - 1);
        }
    }

    #[test]
    fn reconstruction_round_trip() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        let q = BigRational::new((-37).into(), 91.into());
        let u = (q.numer() * q.denom().modinv(&m).unwrap()).mod_floor(&m);
        assert_eq!(rational_reconstruct(&u, &m), Some(q));
    }

    #[test]
    fn agrees_with_rational_elimination() {
        let mut r = fuzz::rng(3);
        for trial in 0..30 {
            let (m, n) = (2 + trial % 5, 3 + trial % 4);
            // low-rank products exercise the lifting path
            let k = 1 + trial % 3;
            let a = fuzz::small_matrix(&mut r, m, k, 3).mul(&fuzz::small_matrix(&mut r, k, n, 3));
            let got = nullspace(&a).expect("modular nullspace");
            assert_eq!(got.rank, elim::rref(&a).1.len());
            assert!(a.mul(&got.null).is_zero());
            assert_eq!(rank(&a), Some(got.rank));
        }
    }
}
