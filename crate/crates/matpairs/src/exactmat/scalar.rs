use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An element `re + im*i` of the Gaussian rationals.
///
/// Both parts are kept in lowest terms with positive denominators by
/// `BigRational`, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {0:?} as a Gaussian rational")]
pub struct ParseScalarError(pub String);

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`; panics on a zero denominator.
    pub fn from_fracs(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn int(v: i64) -> Self {
        Self::from_ints(v, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn re_num(&self) -> &BigInt {
        self.re.numer()
    }

    pub fn re_den(&self) -> &BigInt {
        self.re.denom()
    }

    pub fn im_num(&self) -> &BigInt {
        self.im.numer()
    }

    pub fn im_den(&self) -> &BigInt {
        self.im.denom()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_unit_modulus(&self) -> bool {
        self.norm_sqr().is_one()
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Total order used to sort canonical parameters: real part first,
    /// then imaginary part.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    /// Exact square root in `Q(i)` when one exists, choosing the root with
    /// positive real part (or positive imaginary part when purely imaginary).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        // (x + iy)^2 = a + bi  =>  x^2 = (|z| + a)/2,  y^2 = (|z| - a)/2
        let modulus = rat_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let x = rat_sqrt(&((&modulus + &self.re) / &two))?;
        let y_abs = rat_sqrt(&((&modulus - &self.re) / &two))?;
        let y = if self.im.is_negative() { -y_abs } else { y_abs };
        let root = Self::new(x, y);
        debug_assert_eq!(&(&root * &root), self);
        Some(root)
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(q.numer())?;
    let d = int_sqrt_exact(q.denom())?;
    Some(BigRational::new(n, d))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub(crate) fn rat_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self { re: BigRational::one(), im: BigRational::zero() }
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::int(v)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(v: BigRational) -> Self {
        Self::real(v)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        // cheap paths: most entries in this domain are real or zero
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::real(&self.re * &o.re);
        }
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: &GaussianRational) -> GaussianRational {
        if o.im.is_zero() {
            return GaussianRational { re: &self.re / &o.re, im: &self.im / &o.re };
        }
        let inv = o.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

impl<'a> Neg for &'a GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -&self.re, im: -&self.im }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &GaussianRational) -> GaussianRational {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &GaussianRational) {
        *self = &*self * o;
    }
}

impl fmt::Display for GaussianRational {
    /// `a/b` for reals and `a/b+c/di` (or `a/b-c/di`) otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.re.numer(), self.re.denom())?;
        if !self.im.is_zero() {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}/{}i", sign, self.im.numer().abs(), self.im.denom())?;
        }
        Ok(())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if !d.is_positive() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for GaussianRational {
    type Err = ParseScalarError;

    /// Accepts `a`, `a/b`, `a/b+c/di`, `a/b-c/di`, `a/b+-c/di`, `c/di` and `i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let Some(body) = t.strip_suffix('i') else {
            return parse_rational(&t).map(Self::real).ok_or_else(err);
        };
        // split at the last sign that is not the leading character
        let split = body
            .char_indices()
            .rev()
            .find(|&(k, c)| k > 0 && (c == '+' || c == '-') && !body[..k].ends_with(['+', '-']))
            .map(|(k, _)| k);
        let (re_s, im_s) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im_s = im_s.strip_prefix('+').unwrap_or(im_s);
        let im_s = im_s.replace("+-", "-").replace("--", "");
        let im = match im_s.as_str() {
            "" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other).ok_or_else(err)?,
        };
        let re = parse_rational(re_s).ok_or_else(err)?;
        Ok(Self::new(re, im))
    }
}

/// Exact field operations needed by the generic dense kernels.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
    /// Build from real and imaginary parts; real fields ignore `im`.
    fn from_parts(re: BigRational, im: BigRational) -> Self;
    /// Fold the denominators of every part into the running lcm `acc`.
    fn denom_lcm_into(&self, acc: &mut BigInt);
    /// `(re, im)` multiplied by `scale`, which must clear all denominators.
    fn scaled_parts(&self, scale: &BigInt) -> (BigInt, BigInt);
    /// `self -= a * b`
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = self.sub_ref(&a.mul_ref(b));
    }
}

impl Field for GaussianRational {
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
    fn from_parts(re: BigRational, im: BigRational) -> Self {
        GaussianRational::new(re, im)
    }
    fn denom_lcm_into(&self, acc: &mut BigInt) {
        if !self.re.is_integer() {
            *acc = acc.lcm(self.re.denom());
        }
        if !self.im.is_integer() {
            *acc = acc.lcm(self.im.denom());
        }
    }
    fn scaled_parts(&self, scale: &BigInt) -> (BigInt, BigInt) {
        (scaled(&self.re, scale), scaled(&self.im, scale))
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= &(a * b);
    }
}

impl Field for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_parts(re: BigRational, _im: BigRational) -> Self {
        re
    }
    fn denom_lcm_into(&self, acc: &mut BigInt) {
        if !self.is_integer() {
            *acc = acc.lcm(self.denom());
        }
    }
    fn scaled_parts(&self, scale: &BigInt) -> (BigInt, BigInt) {
        (scaled(self, scale), BigInt::zero())
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }
}

fn scaled(q: &BigRational, scale: &BigInt) -> BigInt {
    if q.is_zero() {
        return BigInt::zero();
    }
    q.numer() * (scale / q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0/1", "3/4", "-1/2", "1/2+3/4i", "1/1-2/3i", "0/1+1/1i"] {
            assert_eq!(g(s).to_string(), s);
        }
        assert_eq!(g("i"), GaussianRational::i());
        assert_eq!(g("-i"), -GaussianRational::i());
        assert_eq!(g("2-3i"), GaussianRational::from_ints(2, -3));
        assert_eq!(g("1/2+-3/4i"), GaussianRational::from_fracs(1, 2, -3, 4));
        assert_eq!(g("6/4"), GaussianRational::from_fracs(3, 2, 0, 1));
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("abc".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn zero_is_unique() {
        let z = &g("1/2+1/3i") - &g("2/4+2/6i");
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0/1");
        assert_eq!(z, GaussianRational::zero());
    }

    #[test]
    fn inverse_and_division() {
        let x = g("3/5+4/5i");
        assert!(x.is_unit_modulus());
        assert_eq!(x.inv().unwrap(), x.conj());
        let y = g("2-7i");
        assert_eq!(&(&y / &x) * &x, y);
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(g("-1").sqrt().unwrap(), GaussianRational::i());
        assert_eq!(g("2i").sqrt().unwrap(), g("1+i"));
        assert_eq!(g("-7/25+24/25i").sqrt().unwrap(), g("3/5+4/5i"));
        // (2+i)/sqrt(5) is not Gaussian rational
        assert!(g("3/5+4/5i").sqrt().is_none());
        assert!(g("i").sqrt().is_none());
        assert!(g("2").sqrt().is_none());
    }
}
