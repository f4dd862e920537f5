//! Exact characteristic polynomials and their roots in `Q(i)`.
//!
//! Roots `a/b` of a polynomial with Gaussian-integer coefficients satisfy
//! `a | c_0` and `b | c_d` in `Z[i]`, so the candidates are products of the
//! Gaussian prime factors of the two end coefficients. Factoring uses trial
//! division up to a fixed bound; anything beyond it is reported as unresolved.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exactmat::gauss::{gaussian_divisors, GInt, MAX_DIVISORS};
use crate::exactmat::Field;
use crate::{ExactMatrix, GaussianRational};

const MAX_CANDIDATES: usize = MAX_DIVISORS;

/// Characteristic polynomial `det(xI - A)`, coefficients from the constant term up.
pub(crate) fn charpoly(a: &ExactMatrix) -> Vec<GaussianRational> {
    let n = a.rows();
    let h = hessenberg(a);
    let mut polys: Vec<Vec<GaussianRational>> = vec![vec![GaussianRational::one()]];
    for k in 1..=n {
        // (x - h_kk) p_{k-1}
        let prev = &polys[k - 1];
        let mut p = vec![GaussianRational::zero(); k + 1];
        for (i, c) in prev.iter().enumerate() {
            p[i + 1] += c;
            p[i] -= &(c * &h[(k - 1, k - 1)]);
        }
        let mut prod = GaussianRational::one();
        for i in (1..k).rev() {
            prod = &prod * &h[(i, i - 1)];
            if prod.is_zero() {
                break;
            }
            let coef = &h[(i - 1, k - 1)] * &prod;
            for (j, c) in polys[i - 1].iter().enumerate() {
                p[j] -= &(&coef * c);
            }
        }
        polys.push(p);
    }
    polys.pop().unwrap()
}

/// Similar upper Hessenberg matrix.
fn hessenberg(a: &ExactMatrix) -> ExactMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(p) = (j + 1..n).find(|&i| !h[(i, j)].is_zero()) else { continue };
        if p != j + 1 {
            h.swap_rows(p, j + 1);
            for r in 0..n {
                let t = h[(r, p)].clone();
                h[(r, p)] = h[(r, j + 1)].clone();
                h[(r, j + 1)] = t;
            }
        }
        let piv = h[(j + 1, j)].clone();
        for r in j + 2..n {
            if h[(r, j)].is_zero() {
                continue;
            }
            let f = &h[(r, j)] / &piv;
            for c in 0..n {
                let v = &f * &h[(j + 1, c)];
                h[(r, c)] -= &v;
            }
            for rr in 0..n {
                let v = &f * &h[(rr, r)];
                h[(rr, j + 1)] += &v;
            }
        }
    }
    h
}

fn to_gaussian_integers(p: &[GaussianRational]) -> Vec<GInt> {
    let mut l = BigInt::one();
    for c in p {
        c.denom_lcm_into(&mut l);
    }
    p.iter()
        .map(|c| {
            let (re, im) = c.scaled_parts(&l);
            GInt::new(re, im)
        })
        .collect()
}

/// `b^d p(a/b)`, which vanishes exactly when `a/b` is a root.
fn eval_homogeneous(p: &[GInt], a: &GInt, b: &GInt) -> GInt {
    let mut acc = GInt::new(BigInt::zero(), BigInt::zero());
    let mut bpow = GInt::one();
    let d = p.len() - 1;
    // Horner in a, carrying powers of b from the top
    let mut bpows = vec![GInt::one(); d + 1];
    for i in 1..=d {
        bpow = bpow.mul(b);
        bpows[i] = bpow.clone();
    }
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc.mul(a).add(&c.mul(&bpows[d - i]));
    }
    acc
}

/// Synthetic division by `x - r`.
fn deflate(p: &[GaussianRational], r: &GaussianRational) -> Vec<GaussianRational> {
    let d = p.len() - 1;
    let mut q = vec![GaussianRational::zero(); d];
    let mut carry = GaussianRational::zero();
    for i in (0..d).rev() {
        carry = &p[i + 1] + &(&carry * r);
        q[i] = carry.clone();
    }
    q
}

fn horner(p: &[GaussianRational], x: &GaussianRational) -> GaussianRational {
    p.iter().rev().fold(GaussianRational::zero(), |acc, c| &(&acc * x) + c)
}

/// All roots with multiplicity when every root lies in `Q(i)` and the
/// candidate search is within bounds; `None` otherwise.
pub(crate) fn gaussian_roots(p: &[GaussianRational]) -> Option<Vec<(GaussianRational, usize)>> {
    let mut p: Vec<GaussianRational> = p.to_vec();
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let mut roots: Vec<(GaussianRational, usize)> = Vec::new();
    let mut zeros = 0;
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        zeros += 1;
    }
    if zeros > 0 {
        roots.push((GaussianRational::zero(), zeros));
    }
    if p.len() == 1 {
        return Some(roots);
    }
    let int_p = to_gaussian_integers(&p);
    let nums = gaussian_divisors(&int_p[0])?;
    let dens = gaussian_divisors(int_p.last().unwrap())?;
    if nums.len().saturating_mul(dens.len()).saturating_mul(4) > MAX_CANDIDATES {
        return None;
    }
    let units = GInt::units();
    let mut seen = HashSet::new();
    for b in &dens {
        for a0 in &nums {
            for u in &units {
                let a = a0.mul(u);
                if !seen.insert((a.clone(), b.clone())) {
                    continue;
                }
                if !eval_homogeneous(&int_p, &a, b).is_zero() {
                    continue;
                }
                let r = &a.to_rational() / &b.to_rational();
                let mut mult = 0;
                while p.len() > 1 && horner(&p, &r).is_zero() {
                    p = deflate(&p, &r);
                    mult += 1;
                }
                if mult > 0 {
                    roots.push((r, mult));
                }
                if p.len() == 1 {
                    return Some(roots);
                }
            }
        }
    }
    None
}
