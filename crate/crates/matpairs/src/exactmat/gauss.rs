//! Gaussian integers, factoring by bounded trial division, and the norm
//! equations that decide when a scalar can be absorbed into a unit pivot.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modular::is_prime_u64;
use super::scalar::Field;
use crate::GaussianRational;

const TRIAL_LIMIT: u64 = 1 << 20;
/// Trial bound for wide values when giving up early is cheap for the caller.
const QUICK_TRIAL_LIMIT: u64 = 1 << 12;
pub(crate) const MAX_DIVISORS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct GInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GInt {
    pub(crate) fn new(re: BigInt, im: BigInt) -> Self {
        GInt { re, im }
    }

    pub(crate) fn from_u(re: u64, im: i64) -> Self {
        GInt::new(BigInt::from(re), BigInt::from(im))
    }

    pub(crate) fn one() -> Self {
        GInt::from_u(1, 0)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub(crate) fn mul(&self, o: &GInt) -> GInt {
        GInt::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }

    pub(crate) fn add(&self, o: &GInt) -> GInt {
        GInt::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub(crate) fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `self / d` when the quotient lies in `Z[i]`.
    pub(crate) fn div_exact(&self, d: &GInt) -> Option<GInt> {
        let n = d.norm();
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        let (qr, rr) = re.div_rem(&n);
        let (qi, ri) = im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then(|| GInt::new(qr, qi))
    }

    /// Nearest-integer Euclidean remainder.
    pub(crate) fn rem(&self, d: &GInt) -> GInt {
        let n = d.norm();
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        let round = |x: &BigInt| -> BigInt {
            let two = BigInt::from(2);
            (x * &two + &n).div_floor(&(&n * &two))
        };
        let q = GInt::new(round(&re), round(&im));
        let qd = q.mul(d);
        GInt::new(&self.re - &qd.re, &self.im - &qd.im)
    }

    pub(crate) fn to_rational(&self) -> GaussianRational {
        GaussianRational::from_parts(self.re.clone().into(), self.im.clone().into())
    }
}

fn ggcd(mut a: GInt, mut b: GInt) -> GInt {
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// The Gaussian prime `a + bi` of norm `q` for a prime `q = 1 mod 4`.
fn split_prime(q: u64) -> GInt {
    let s = (2..q)
        .map(|c| pow_mod(c, (q - 1) / 4, q))
        .find(|&s| mul_mod(s, s, q) == q - 1)
        .expect("q = 1 mod 4 has a square root of -1");
    ggcd(GInt::from_u(q, 0), GInt::from_u(s, 1))
}

pub(crate) fn rational_prime_factors(n: &BigInt) -> Option<Vec<u64>> {
    prime_factors_within(n, TRIAL_LIMIT)
}

/// Distinct prime factors of `|n|`. Values wider than 64 bits are
/// trial-divided up to `wide_limit` until they fit; from there it is trial
/// division to `TRIAL_LIMIT` and Pollard rho. `None` when a wide cofactor remains.
fn prime_factors_within(n: &BigInt, wide_limit: u64) -> Option<Vec<u64>> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while n > BigInt::one() {
        if let Some(small) = n.to_u64() {
            // the rest is native arithmetic
            factor_u64(small, p, &mut out)?;
            out.sort_unstable();
            out.dedup();
            return Some(out);
        }
        if p > wide_limit {
            // past this, a cofactor wider than 64 bits is not worth chasing
            return None;
        }
        if (&n % p).is_zero() {
            out.push(p);
            while (&n % p).is_zero() {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// Appends the prime factors of `n`, none of which is below `from` except by
/// trial division from there.
fn factor_u64(mut n: u64, from: u64, out: &mut Vec<u64>) -> Option<()> {
    let mut p = from.max(2);
    while p <= TRIAL_LIMIT && p.saturating_mul(p) <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_u64(n, out)
}

fn split_u64(n: u64, out: &mut Vec<u64>) -> Option<()> {
    if n == 1 {
        return Some(());
    }
    if is_prime_u64(n) {
        out.push(n);
        return Some(());
    }
    let d = pollard_rho(n)?;
    split_u64(d, out)?;
    split_u64(n / d, out)
}

/// A nontrivial factor of the odd composite `n` by Brent's cycle search.
fn pollard_rho(n: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        let mut steps = 0u32;
        while d == 1 && steps < 1 << 22 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
            steps += 1;
        }
        if d != 1 && d != n {
            return Some(d);
        }
    }
    None
}

/// Divisors of `c` in `Z[i]` up to units.
pub(crate) fn gaussian_divisors(c: &GInt) -> Option<Vec<GInt>> {
    let mut primes = Vec::new();
    for q in rational_prime_factors(&c.norm())? {
        match q % 4 {
            2 => primes.push(GInt::from_u(1, 1)),
            3 => primes.push(GInt::from_u(q, 0)),
            _ => {
                let pi = split_prime(q);
                let conj = GInt::new(pi.re.clone(), -pi.im.clone());
                primes.push(pi);
                primes.push(conj);
            }
        }
    }
    let mut divisors = vec![GInt::one()];
    let mut rest = c.clone();
    for pi in &primes {
        let mut e = 0;
        while let Some(q) = rest.div_exact(pi) {
            rest = q;
            e += 1;
        }
        let base = divisors.clone();
        let mut pw = GInt::one();
        for _ in 0..e {
            pw = pw.mul(pi);
            divisors.extend(base.iter().map(|d| d.mul(&pw)));
            if divisors.len() > MAX_DIVISORS {
                return None;
            }
        }
    }
    debug_assert_eq!(rest.norm(), BigInt::one());
    Some(divisors)
}

impl GInt {
    pub(crate) fn units() -> [GInt; 4] {
        let u = |a: i64, b: i64| GInt::new(BigInt::from(a), BigInt::from(b));
        [u(1, 0), u(0, 1), u(-1, 0), u(0, -1)]
    }
}

/// Exponents of the rational primes in `n`, or `None` when trial division cannot finish.
fn factor(n: &BigInt, wide_limit: u64) -> Option<Vec<(u64, u32)>> {
    let mut rest = n.abs();
    let mut out = Vec::new();
    for p in prime_factors_within(n, wide_limit)? {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        out.push((p, e));
    }
    Some(out)
}

/// A Gaussian integer of norm `n > 0`, if `n` is a sum of two squares.
fn two_squares(n: &BigInt, wide_limit: u64) -> Option<Option<GInt>> {
    let mut acc = GInt::one();
    for (p, e) in factor(n, wide_limit)? {
        let pi = match p % 4 {
            2 => GInt::from_u(1, 1),
            3 => {
                if e % 2 == 1 {
                    return Some(None);
                }
                GInt::from_u(p, 0)
            }
            _ => split_prime(p),
        };
        let times = if p % 4 == 3 { e / 2 } else { e };
        for _ in 0..times {
            acc = acc.mul(&pi);
        }
    }
    Some(Some(acc))
}

/// Some `g` in `Q(i)` with `|g|^2 = r`, for a positive rational `r`.
///
/// Outer `None`: factoring exceeded its bounds. Inner `None`: `r` is not a norm.
pub(crate) fn norm_preimage(r: &BigRational) -> Option<Option<GaussianRational>> {
    norm_preimage_within(r, TRIAL_LIMIT)
}

/// [`norm_preimage`] with a small factoring budget, for callers that can
/// move on to another candidate.
pub(crate) fn quick_norm_preimage(r: &BigRational) -> Option<Option<GaussianRational>> {
    norm_preimage_within(r, QUICK_TRIAL_LIMIT)
}

fn norm_preimage_within(r: &BigRational, wide_limit: u64) -> Option<Option<GaussianRational>> {
    if !r.is_positive() {
        return Some(None);
    }
    // |g/d|^2 = n d / d^2
    let (n, d) = (r.numer(), r.denom());
    // factor the two halves apart; each is far more likely to fit in 64 bits
    let (gn, gd) = (two_squares(n, wide_limit)?, two_squares(d, wide_limit)?);
    Some(gn.zip(gd).map(|(a, b)| a.mul(&b)).map(|g| {
        let den = BigRational::from_integer(d.clone());
        GaussianRational::from_parts(BigRational::from_integer(g.re) / &den, BigRational::from_integer(g.im) / &den)
    }))
}

impl GInt {
    pub(crate) fn from_i(re: i64, im: i64) -> Self {
        GInt::new(BigInt::from(re), BigInt::from(im))
    }

    pub(crate) fn sub(&self, o: &GInt) -> GInt {
        GInt::new(&self.re - &o.re, &self.im - &o.im)
    }

    fn conj(&self) -> GInt {
        GInt::new(self.re.clone(), -&self.im)
    }

    fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// Square root in `Z[i]`, if `self` is a perfect square.
    fn sqrt(&self) -> Option<GInt> {
        let r = self.to_rational().sqrt()?;
        (r.re_den().is_one() && r.im_den().is_one()).then(|| GInt::new(r.re_num().clone(), r.im_num().clone()))
    }
}

/// `(g, x)` with `a x = g (mod b)` and `g` a gcd of `a` and `b`.
fn gext(a: &GInt, b: &GInt) -> (GInt, GInt) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut x0, mut x1) = (GInt::one(), GInt::from_i(0, 0));
    while !r1.is_zero() {
        let r = r0.rem(&r1);
        let q = r0.sub(&r).div_exact(&r1).expect("remainder leaves an exact quotient");
        let x = x0.sub(&q.mul(&x1));
        r0 = std::mem::replace(&mut r1, r);
        x0 = std::mem::replace(&mut x1, x);
    }
    (r0, x0)
}

/// Gaussian prime factorization `(unit, [(prime, exponent)])`, `None` if factoring gives up.
fn gfactor(g: &GInt) -> Option<(GInt, Vec<(GInt, u32)>)> {
    let mut rest = g.clone();
    let mut out = Vec::new();
    for p in rational_prime_factors(&g.norm())? {
        let primes = match p % 4 {
            2 => vec![GInt::from_i(1, 1)],
            3 => vec![GInt::from_u(p, 0)],
            _ => {
                let pi = split_prime(p);
                vec![pi.conj(), pi]
            }
        };
        for pi in primes {
            let mut e = 0;
            while let Some(q) = rest.div_exact(&pi) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((pi, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    Some((rest, out))
}

/// `(core, s)` with `g = core * s^2` and `core` squarefree.
fn squarefree(g: &GInt) -> Option<(GInt, GInt)> {
    let (unit, fs) = gfactor(g)?;
    let (mut core, mut s) = (unit, GInt::one());
    for (pi, e) in fs {
        for _ in 0..e / 2 {
            s = s.mul(&pi);
        }
        if e % 2 == 1 {
            core = core.mul(&pi);
        }
    }
    Some((core, s))
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    // Tonelli-Shanks
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let (mut m, mut c, mut t, mut r) = (s, pow_mod(z, q, p), pow_mod(a, q, p), pow_mod(a, (q + 1) / 2, p));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

fn modp(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Square root of `u + v i` in `F_p[i] = F_{p^2}` for `p = 3 mod 4`.
fn sqrt_mod_inert(u: u64, v: u64, p: u64) -> Option<(u64, u64)> {
    let n = (mul_mod(u, u, p) + mul_mod(v, v, p)) % p;
    let s = sqrt_mod_p(n, p)?;
    let half = inv_mod(2, p);
    for cand in [(u + s) % p, (u + p - s) % p] {
        let x2 = mul_mod(cand, half, p);
        let Some(x) = sqrt_mod_p(x2, p) else { continue };
        let y = if x != 0 {
            mul_mod(v, inv_mod(mul_mod(2, x, p), p), p)
        } else {
            sqrt_mod_p((p - u) % p, p)?
        };
        let re = (mul_mod(x, x, p) + p - mul_mod(y, y, p)) % p;
        let im = mul_mod(mul_mod(2, x, p), y, p);
        if re == u && im == v {
            return Some((x, y));
        }
    }
    None
}

/// `t` with `t^2 = a (mod pi)` for a Gaussian prime `pi`.
fn sqrt_mod_prime(a: &GInt, pi: &GInt) -> Option<GInt> {
    let n = pi.norm().to_u64()?;
    if pi.im.is_zero() {
        let p = pi.re.abs().to_u64()?;
        let (x, y) = sqrt_mod_inert(modp(&a.re, p), modp(&a.im, p), p)?;
        return Some(GInt::from_u(x, y as i64));
    }
    // Z[i]/pi = F_p with i = -re/im
    let p = n;
    let r = mul_mod(p - modp(&pi.re, p) % p, inv_mod(modp(&pi.im, p), p), p) % p;
    let val = (modp(&a.re, p) + mul_mod(r, modp(&a.im, p), p)) % p;
    Some(GInt::from_u(sqrt_mod_p(val, p)?, 0))
}

/// `t` with `t^2 = a (mod b)` for squarefree `b`, reduced so `|t|^2 <= |b|^2 / 2`.
fn sqrt_mod(a: &GInt, b: &GInt) -> Option<GInt> {
    let (_, fs) = gfactor(b)?;
    let (mut t, mut m) = (GInt::from_i(0, 0), GInt::one());
    for (pi, _) in fs {
        let r = sqrt_mod_prime(a, &pi)?;
        // t + m k = r (mod pi)
        let (g, minv) = gext(&m.rem(&pi), &pi);
        let minv = minv.mul(&g.conj());
        let k = r.sub(&t).mul(&minv).rem(&pi);
        t = t.add(&m.mul(&k));
        m = m.mul(&pi);
    }
    let t = t.rem(b);
    (t.mul(&t).sub(a).rem(b).is_zero()).then_some(t)
}

const CONIC_DEPTH: usize = 400;

/// A nontrivial `(x, y, z)` with `a x^2 + b y^2 = z^2` over `Q(i)`, by
/// Legendre-style descent on the norm of `b`. `None` when there is none,
/// or when factoring gives up.
pub(crate) fn solve_conic(a: &GInt, b: &GInt) -> Option<[GaussianRational; 3]> {
    let sol = conic_rec(a, b, 0)?;
    let [x, y, z] = &sol;
    let lhs = a.to_rational() * x.clone() * x.clone() + b.to_rational() * y.clone() * y.clone();
    let nontrivial = !(x.is_zero() && y.is_zero() && z.is_zero());
    (nontrivial && lhs == z.clone() * z.clone()).then_some(sol)
}

fn conic_rec(a: &GInt, b: &GInt, depth: usize) -> Option<[GaussianRational; 3]> {
    let (zero, one) = (GaussianRational::zero(), GaussianRational::one());
    if a.is_zero() {
        return Some([one, zero.clone(), zero]);
    }
    if b.is_zero() {
        return Some([zero.clone(), one, zero]);
    }
    if depth > CONIC_DEPTH {
        return None;
    }
    let (a0, sa) = squarefree(a)?;
    let (b0, sb) = squarefree(b)?;
    let [x, y, z] = conic_core(&a0, &b0, depth)?;
    Some([x / sa.to_rational(), y / sb.to_rational(), z])
}

fn conic_core(a: &GInt, b: &GInt, depth: usize) -> Option<[GaussianRational; 3]> {
    let (zero, one) = (GaussianRational::zero(), GaussianRational::one());
    if let Some(s) = a.sqrt() {
        return Some([one, zero, s.to_rational()]);
    }
    if let Some(s) = b.sqrt() {
        return Some([zero, one, s.to_rational()]);
    }
    if let Some(r) = (-b.to_rational() / a.to_rational()).sqrt() {
        return Some([r, one, zero]);
    }
    if a.norm() > b.norm() {
        let [x, y, z] = conic_core(b, a, depth)?;
        return Some([y, x, z]);
    }
    if b.norm() <= BigInt::from(4) {
        return conic_small(a, b);
    }
    let t = sqrt_mod(a, b)?;
    let b1 = t.mul(&t).sub(a).div_exact(b)?;
    if b1.is_zero() {
        return Some([one, zero, t.to_rational()]);
    }
    // a x'^2 + b1 y'^2 = z'^2 lifts through (z' + x' sqrt a)(t + sqrt a)
    let [x1, y1, z1] = conic_rec(a, &b1, depth + 1)?;
    let (t, a, b1) = (t.to_rational(), a.to_rational(), b1.to_rational());
    Some([z1.clone() + x1.clone() * t.clone(), b1 * y1, z1 * t + a * x1])
}

fn conic_small(a: &GInt, b: &GInt) -> Option<[GaussianRational; 3]> {
    let r = 4i64;
    let pts: Vec<GInt> = (-r..=r).flat_map(|u| (-r..=r).map(move |v| GInt::from_i(u, v))).collect();
    for x in &pts {
        for y in &pts {
            if x.is_zero() && y.is_zero() {
                continue;
            }
            let v = a.mul(&x.mul(x)).add(&b.mul(&y.mul(y)));
            if let Some(z) = v.sqrt() {
                return Some([x.to_rational(), y.to_rational(), z.to_rational()]);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_past_the_trial_limit() {
        // two primes above 2^20
        let n = BigInt::from(1_048_583u64) * BigInt::from(1_048_589u64) * 12;
        assert_eq!(rational_prime_factors(&n), Some(vec![2, 3, 1_048_583, 1_048_589]));
        assert_eq!(rational_prime_factors(&BigInt::from(97)), Some(vec![97]));
        assert_eq!(rational_prime_factors(&BigInt::from(1)), Some(vec![]));
    }

    #[test]
    fn split_primes() {
        for q in [5u64, 13, 17, 1_000_000_009] {
            if q % 4 == 1 && is_prime_u64(q) {
                assert_eq!(split_prime(q).norm(), BigInt::from(q));
            }
        }
    }

    #[test]
    fn modular_square_roots() {
        assert_eq!(sqrt_mod_p(2, 7).map(|r| r * r % 7), Some(2));
        assert_eq!(sqrt_mod_p(3, 7), None);
        for (u, v) in [(2u64, 3u64), (0, 1), (5, 0), (6, 6)] {
            if let Some((x, y)) = sqrt_mod_inert(u, v, 7) {
                assert_eq!(((x * x + 49 - y * y) % 7, (2 * x * y) % 7), (u, v));
            }
        }
        let b = GInt::from_i(5, 0).mul(&GInt::from_i(3, 0)).mul(&GInt::from_i(1, 1));
        let a = GInt::from_i(2, 1).mul(&GInt::from_i(2, 1));
        let t = sqrt_mod(&a, &b).unwrap();
        assert!(t.mul(&t).sub(&a).rem(&b).is_zero());
    }

    #[test]
    fn conics() {
        // b = z^2 - a x^2 makes (x, 1, z) a witness of solvability
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 19) as i64 - 9
        };
        for _ in 0..60 {
            let a = GInt::from_i(next(), next());
            let (x, z) = (GInt::from_i(next(), next()), GInt::from_i(next(), next()));
            let b = z.mul(&z).sub(&a.mul(&x.mul(&x)));
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let [x, y, z] = solve_conic(&a, &b).expect("solvable by construction");
            assert_eq!(a.to_rational() * x.clone() * x + b.to_rational() * y.clone() * y, z.clone() * z);
        }
        assert!(solve_conic(&GInt::from_i(3, 0), &GInt::from_i(3, 0)).is_some());
    }

    #[test]
    fn norms() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        for r in [q(1, 2), q(5, 1), q(25, 9), q(13, 10), q(1, 1)] {
            let g = norm_preimage(&r).unwrap().unwrap();
            assert_eq!(g.norm_sqr(), r);
        }
        for r in [q(3, 1), q(1, 3), q(6, 5), q(-1, 1)] {
            assert_eq!(norm_preimage(&r), Some(None));
        }
    }
}
