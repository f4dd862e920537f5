//! Seeded random generators for exact test fixtures.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::blocks::{CongruenceStructure, Flavor, PairCanonicalStructure, Pivot, StructuredPairForm, TypeOne, TypeTwo, Variant};
use crate::exactmat::{inverse, nullspace};
use crate::pairs::{EquivalenceWitness, NilpotentCounts};
use crate::{ExactMatrix, GaussianRational, Kind};

pub type FuzzRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FuzzRng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Per-trial generator split off a master seed.
pub fn trial_rng(master: u64, trial: u64) -> FuzzRng {
    let mut r = rng(master);
    r.set_stream(trial);
    r
}

/// `a/b + (c/d) i` with `|a|, |c| <= bound` and `1 <= b, d <= bound`.
pub fn small_scalar(rng: &mut impl Rng, bound: i64) -> GaussianRational {
    let bound = bound.max(1);
    GaussianRational::from_fracs(
        rng.gen_range(-bound..=bound),
        rng.gen_range(1..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(1..=bound),
    )
}

pub fn small_nonzero_scalar(rng: &mut impl Rng, bound: i64) -> GaussianRational {
    loop {
        let z = small_scalar(rng, bound);
        if !num_traits::Zero::is_zero(&z) {
            return z;
        }
    }
}

pub fn small_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> ExactMatrix {
    ExactMatrix::from_fn(rows, cols, |_, _| small_scalar(rng, bound))
}

/// A nonsingular matrix and its inverse, built as a product of elementary
/// matrices (shears, scalings, swaps) so nonsingularity is guaranteed by construction.
pub fn nonsingular_pair(rng: &mut impl Rng, n: usize, bound: i64) -> (ExactMatrix, ExactMatrix) {
    let mut s = ExactMatrix::identity(n);
    let mut s_inv = ExactMatrix::identity(n);
    if n == 0 {
        return (s, s_inv);
    }
    let steps = 3 * n;
    for _ in 0..steps {
        match rng.gen_range(0..6) {
            0 => {
                // scaling of one row
                let i = rng.gen_range(0..n);
                let c = small_nonzero_scalar(rng, bound);
                let ci = c.inv().unwrap();
                scale_row(&mut s, i, &c);
                scale_col(&mut s_inv, i, &ci);
            }
            1 if n > 1 => {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                s.swap_rows(i, j);
                swap_cols(&mut s_inv, i, j);
            }
            _ if n > 1 => {
                // row_i += c * row_j; the inverse subtracts column i from column j
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                let c = small_nonzero_scalar(rng, bound);
                for k in 0..n {
                    let v = &s[(j, k)] * &c;
                    s[(i, k)] += &v;
                    let w = &s_inv[(k, i)] * &c;
                    s_inv[(k, j)] -= &w;
                }
            }
            _ => {}
        }
    }
    (s, s_inv)
}

pub fn nonsingular(rng: &mut impl Rng, n: usize, bound: i64) -> ExactMatrix {
    nonsingular_pair(rng, n, bound).0
}

/// Unitary over `Q(i)`: the Cayley transform `(I - S)(I + S)^{-1}` of a skew-Hermitian `S`.
pub fn cayley_unitary(s: &ExactMatrix) -> Option<ExactMatrix> {
    let i = ExactMatrix::identity(s.rows());
    Some(i.sub(s).mul(&inverse(&i.add(s))?))
}

pub fn random_unitary(rng: &mut impl Rng, n: usize, bound: i64) -> ExactMatrix {
    let a = small_matrix(rng, n, n, bound);
    // I + S is nonsingular for skew-Hermitian S, so the transform always exists
    cayley_unitary(&a.sub(&a.conj_transpose())).expect("I + S is nonsingular")
}

pub fn random_witness(rng: &mut impl Rng, n: usize, kind: Kind, bound: i64) -> EquivalenceWitness {
    EquivalenceWitness { u: nonsingular(rng, n, bound), v: nonsingular(rng, n, bound), kind, v_unitary: false }
}

fn g(s: &str) -> GaussianRational {
    s.parse().expect("literal scalar")
}

/// `mu` values used by the planting generators; inadmissible ones are skipped per block.
pub fn planting_mus(kind: Kind) -> Vec<GaussianRational> {
    let pool: &[&str] = match kind {
        Kind::T => &["2", "3", "-2", "1/3", "2i", "1+1i", "-1", "1"],
        Kind::Star => &["2", "3i", "1+1i", "-2", "3/2-1i"],
    };
    pool.iter().map(|s| g(s)).collect()
}

/// Unit-modulus `alpha` values used by the Star planting generators.
pub fn planting_alphas() -> Vec<GaussianRational> {
    ["1", "-1", "i", "-i", "3/5+4/5i", "-4/5+3/5i"].iter().map(|s| g(s)).collect()
}

/// A random normalized congruence structure of total size `1..=max_dim`.
pub fn random_structure(rng: &mut impl Rng, kind: Kind, max_dim: usize) -> CongruenceStructure {
    let target = rng.gen_range(1..=max_dim.max(1));
    let mus = planting_mus(kind);
    let alphas = planting_alphas();
    let mut s = CongruenceStructure::new(kind);
    let mut room = target;
    while room > 0 {
        match rng.gen_range(0..3) {
            0 => {
                let p = rng.gen_range(1..=room.min(3));
                s.type0.push(p);
                room -= p;
            }
            1 => {
                let size = rng.gen_range(1..=room.min(3));
                let alpha = match kind {
                    Kind::T => GaussianRational::int(1),
                    Kind::Star => alphas.choose(rng).expect("nonempty pool").clone(),
                };
                s.type1.push(TypeOne { size, alpha });
                room -= size;
            }
            _ if room >= 2 => {
                let half = rng.gen_range(1..=(room / 2).min(2));
                let mu = mus.choose(rng).expect("nonempty pool").clone();
                let probe = CongruenceStructure::new(kind).with_h(half, mu.clone());
                if probe.validate().is_ok() {
                    s.type2.push(TypeTwo { half, mu });
                    room -= 2 * half;
                }
            }
            _ => {}
        }
    }
    s.normalize().expect("planted blocks are admissible")
}

/// `S^T A S` (or `S^* A S`) with `A` the realized structure and `S` random.
pub fn planted_congruence(rng: &mut impl Rng, s: &CongruenceStructure, bound: i64) -> ExactMatrix {
    let a = s.realize().expect("planted structure realizes");
    let t = nonsingular(rng, a.rows(), bound);
    t.adjoint(s.kind).mul(&a).mul(&t)
}

/// A realized pair for `structure`, scrambled by a random equivalence.
pub fn planted_pair(rng: &mut impl Rng, structure: &CongruenceStructure, bound: i64) -> (PairCanonicalStructure, ExactMatrix, ExactMatrix) {
    // a Q pivot is only reported when E is singular, which takes a Type-0 summand
    let pivot = if !structure.type0.is_empty() && rng.gen_bool(0.5) { Pivot::QNonsingular } else { Pivot::ENonsingular };
    let plant = PairCanonicalStructure { pivot, structure: structure.clone() };
    let (e0, q0) = plant.realize(Variant::Standard).expect("planted structure realizes");
    let w = random_witness(rng, e0.rows(), structure.kind, bound);
    let (e, q) = w.apply(&e0, &q0).expect("random witness is nonsingular");
    (plant, e, q)
}

/// A random structured form of dimension `1..=max_dim` (at least 2 for skew-symmetric).
pub fn random_structured_form(rng: &mut impl Rng, flavor: Flavor, max_dim: usize) -> StructuredPairForm {
    loop {
        let mut f = StructuredPairForm { flavor, n_plus: 0, n_minus: 0, a: 0, b: 0, c: 0, d: 0 };
        let target = rng.gen_range(1..=max_dim.max(1));
        let mut room = target;
        while room > 0 {
            match rng.gen_range(0..6) {
                0 if flavor == Flavor::SkewSymT => {
                    if room >= 2 {
                        f.n_plus += 1;
                        room -= 2;
                    }
                }
                0 => {
                    f.n_plus += 1;
                    room -= 1;
                }
                1 if matches!(flavor, Flavor::HermStar | Flavor::SkewHermStar) => {
                    f.n_minus += 1;
                    room -= 1;
                }
                2 => {
                    f.a += 1;
                    room -= 1;
                }
                3 => {
                    f.b += 1;
                    room -= 1;
                }
                4 => {
                    f.c += 1;
                    room -= 1;
                }
                5 if room >= 2 => {
                    f.d += 1;
                    room -= 2;
                }
                _ => {}
            }
        }
        if f.dim() == target {
            return f;
        }
    }
}

/// The realized structured form scrambled by a random equivalence.
pub fn planted_structured(rng: &mut impl Rng, f: &StructuredPairForm, bound: i64) -> (ExactMatrix, ExactMatrix) {
    let (e0, q0) = f.realize().expect("structured form realizes");
    let w = random_witness(rng, e0.rows(), f.flavor.kind(), bound);
    w.apply(&e0, &q0).expect("random witness is nonsingular")
}

/// Canonical nilpotent pair with the given counts, scrambled by a nonsingular
/// `U` and a `V` that is unitary when `unitary_v` is set.
pub fn planted_nilpotent(rng: &mut impl Rng, counts: NilpotentCounts, kind: Kind, unitary_v: bool, bound: i64) -> (ExactMatrix, ExactMatrix) {
    let (e0, q0) = counts.realize();
    let n = e0.rows();
    let v = if unitary_v { random_unitary(rng, n, bound) } else { nonsingular(rng, n, bound) };
    let w = EquivalenceWitness { u: nonsingular(rng, n, bound), v, kind, v_unitary: unitary_v };
    w.apply(&e0, &q0).expect("random witness is nonsingular")
}

/// Random `n x n` matrix of rank at most `r`, as a product of `n x r` and `r x n` factors.
pub fn low_rank(rng: &mut impl Rng, n: usize, r: usize, bound: i64) -> ExactMatrix {
    if r == 0 {
        return ExactMatrix::zeros(n, n);
    }
    small_matrix(rng, n, r, bound).mul(&small_matrix(rng, r, n, bound))
}

/// A random pair with `E^T Q = 0` (or `E^* Q = 0`): the columns of `Q` are
/// drawn from the left kernel of `E`.
pub fn orthogonal_pair(rng: &mut impl Rng, n: usize, kind: Kind, bound: i64) -> (ExactMatrix, ExactMatrix) {
    let r = rng.gen_range(0..=n);
    let e = low_rank(rng, n, r, bound);
    let left = nullspace(&e.adjoint(kind));
    let k = left.cols();
    let q = if k == 0 {
        ExactMatrix::zeros(n, n)
    } else {
        let r = rng.gen_range(0..=k);
        left.mul(&low_rank_rect(rng, k, n, r, bound))
    };
    (e, q)
}

fn low_rank_rect(rng: &mut impl Rng, rows: usize, cols: usize, r: usize, bound: i64) -> ExactMatrix {
    if r == 0 {
        return ExactMatrix::zeros(rows, cols);
    }
    small_matrix(rng, rows, r, bound).mul(&small_matrix(rng, r, cols, bound))
}

/// Random Hermitian (Star) or symmetric (T) matrix of rank at most `r`.
fn self_adjoint(rng: &mut impl Rng, n: usize, r: usize, kind: Kind, bound: i64) -> ExactMatrix {
    let b = small_matrix(rng, r, n, bound);
    let d = ExactMatrix::from_fn(r, r, |i, j| if i == j { GaussianRational::int(rng.gen_range(1..=bound.max(1)) * if rng.gen_bool(0.5) { 1 } else { -1 }) } else { GaussianRational::int(0) });
    b.adjoint(kind).mul(&d).mul(&b)
}

/// A pair whose columns `[E; Q]` span a Lagrangian subspace.
///
/// Starts from the graph `[I; S]` of a self-adjoint `S` (zero for the skew
/// flavors, whose products must vanish), swaps a random set of coordinate
/// pairs `(x_j, y_j) -> (y_j, -x_j)`, which is symplectic, and then applies a
/// random equivalence, which keeps both rank and the self-adjoint product.
pub fn lagrangian_pair(rng: &mut impl Rng, flavor: Flavor, max_dim: usize, bound: i64) -> (ExactMatrix, ExactMatrix) {
    let kind = flavor.kind();
    let n = rng.gen_range(1..=max_dim.max(1));
    let s = match flavor {
        Flavor::SymT | Flavor::HermStar => {
            let r = rng.gen_range(0..=n);
            self_adjoint(rng, n, r, kind, bound)
        }
        Flavor::SkewSymT | Flavor::SkewHermStar => ExactMatrix::zeros(n, n),
    };
    let mut e = ExactMatrix::identity(n);
    let mut q = s;
    for j in 0..n {
        if rng.gen_bool(0.5) {
            for k in 0..n {
                let x = e[(j, k)].clone();
                e[(j, k)] = q[(j, k)].clone();
                q[(j, k)] = -x;
            }
        }
    }
    let w = random_witness(rng, n, kind, bound);
    w.apply(&e, &q).expect("random witness is nonsingular")
}

fn scale_row(m: &mut ExactMatrix, i: usize, c: &GaussianRational) {
    for k in 0..m.cols() {
        m[(i, k)] *= c;
    }
}

fn scale_col(m: &mut ExactMatrix, j: usize, c: &GaussianRational) {
    for k in 0..m.rows() {
        m[(k, j)] *= c;
    }
}

fn swap_cols(m: &mut ExactMatrix, i: usize, j: usize) {
    for k in 0..m.rows() {
        let t = m[(k, i)].clone();
        m[(k, i)] = m[(k, j)].clone();
        m[(k, j)] = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_is_exact() {
        let mut r = rng(7);
        for n in 0..6 {
            let (s, si) = nonsingular_pair(&mut r, n, 3);
            assert_eq!(s.mul(&si), ExactMatrix::identity(n));
        }
    }

    #[test]
    fn cayley_transform_is_unitary() {
        let mut r = rng(3);
        for n in 1..5 {
            let u = random_unitary(&mut r, n, 3);
            assert_eq!(u.conj_transpose().mul(&u), ExactMatrix::identity(n));
        }
    }

    #[test]
    fn generators_meet_their_contracts() {
        let mut r = rng(19);
        for trial in 0..40 {
            let kind = if trial % 2 == 0 { Kind::T } else { Kind::Star };
            let s = random_structure(&mut r, kind, 6);
            assert!(s.dim() >= 1 && s.dim() <= 6);
            let (e, q) = orthogonal_pair(&mut r, 4, kind, 2);
            assert!(e.adjoint(kind).mul(&q).is_zero());
            let flavor = Flavor::ALL[trial % 4];
            let (e, q) = lagrangian_pair(&mut r, flavor, 5, 2);
            assert!(crate::pairs::is_lagrangian(&e, &q, flavor.kind()), "{flavor:?}");
            let f = random_structured_form(&mut r, flavor, 6);
            assert!(f.dim() <= 6);
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = nonsingular(&mut rng(11), 4, 3);
        let b = nonsingular(&mut rng(11), 4, 3);
        assert_eq!(a, b);
        assert_ne!(trial_rng(1, 0).gen::<u64>(), trial_rng(1, 1).gen::<u64>());
    }
}
