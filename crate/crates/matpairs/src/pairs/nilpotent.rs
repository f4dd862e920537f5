//! Pairs `(E, Q)` with `E^T Q = 0` (or `E^* Q = 0`).
//!
//! Every such pair is a direct sum of `(1,0)`, `(0,1)`, `(0,0)` and the 2x2
//! block `([[1,0],[0,0]], [[0,0],[1,0]])`. Under nonsingular `U, V` the
//! multiplicities are fixed by `rank E`, `rank Q` and `rank [E; Q]`; the 2x2
//! block is a column on which both `E` and `Q` act nontrivially.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_shapes, pair_product, EquivalenceWitness, PairError};
use crate::blocks::nilpotent_block;
use crate::exactmat::{column_basis, extend_to_basis, inverse, nullspace, rank, solve};
use crate::{ExactMatrix, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NilpotentCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl NilpotentCounts {
    pub fn dim(&self) -> usize {
        self.a + self.b + self.c + 2 * self.d
    }

    /// `(1,0)^a + (0,1)^b + (0,0)^c + block^d`, in that order.
    pub fn realize(&self) -> (ExactMatrix, ExactMatrix) {
        let one = || ExactMatrix::identity(1);
        let zero = || ExactMatrix::zeros(1, 1);
        let (mut e, mut q) = (Vec::new(), Vec::new());
        for (count, ev, qv) in [(self.a, true, false), (self.b, false, true), (self.c, false, false)] {
            for _ in 0..count {
                e.push(if ev { one() } else { zero() });
                q.push(if qv { one() } else { zero() });
            }
        }
        let (ne, nq) = nilpotent_block();
        for _ in 0..self.d {
            e.push(ne.clone());
            q.push(nq.clone());
        }
        (ExactMatrix::direct_sum_all(&e), ExactMatrix::direct_sum_all(&q))
    }
}

fn check_orthogonal(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> Result<usize, PairError> {
    let n = check_shapes(e, q)?;
    if !pair_product(e, q, kind).is_zero() {
        return Err(PairError::NotOrthogonal);
    }
    Ok(n)
}

/// Block counts from `d = rank(Q E^*)`, `a = rank E - d`, `b = rank Q - d`,
/// `c = n - a - b - 2d`.
///
/// These are the multiplicities that a reduction with unitary `V` would
/// produce, for either kind: `Q E^*` picks up `V V^* = I`. It is not
/// invariant under a general nonsingular `V`; for the
/// counts that every nonsingular `V` preserves see [`NilpotentReduction::counts`].
pub fn nilpotent_pair_counts(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> Result<NilpotentCounts, PairError> {
    let n = check_orthogonal(e, q, kind)?;
    let d = rank(&q.mul(&e.conj_transpose()));
    let (re, rq) = (rank(e), rank(q));
    let (a, b) = (re - d, rq - d);
    Ok(NilpotentCounts { a, b, c: n - a - b - 2 * d, d })
}

/// Counts invariant under every `(U, V)`: `d = rank E + rank Q - rank [E; Q]`.
pub(crate) fn orbit_counts(e: &ExactMatrix, q: &ExactMatrix) -> NilpotentCounts {
    let n = e.rows();
    let (re, rq, rs) = (rank(e), rank(q), rank(&e.vstack(q)));
    let d = re + rq - rs;
    NilpotentCounts { a: re - d, b: rq - d, c: n - rs - d, d }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReduceMode {
    /// Exact arithmetic with `V` merely nonsingular.
    ExactNonsingularV,
    /// Double precision with `V` unitary to within `tau`.
    FloatUnitaryV { tau: f64 },
}

pub const DEFAULT_UNITARY_TAU: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FloatWitness {
    pub u: DMatrix<Complex64>,
    pub v: DMatrix<Complex64>,
    pub kind: Kind,
    /// `max |V^* V - I|`.
    pub unitarity_defect: f64,
    /// Largest entry error of the reconstructed canonical pair.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReductionWitness {
    Exact(EquivalenceWitness),
    Float(FloatWitness),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentReduction {
    /// Multiplicities realized by the witness.
    pub counts: NilpotentCounts,
    pub canonical: (ExactMatrix, ExactMatrix),
    pub witness: ReductionWitness,
}

/// Reduces `(E, Q)` with `E^T Q = 0` to its block form.
///
/// The domain splits as `V_A + V_B + K + V_S`: `K = ker E ∩ ker Q`,
/// `V_A` completes `K` in `ker Q` (columns where only `E` acts), `V_B`
/// completes `K` in `ker E`, and `V_S` completes `ker E + ker Q` (columns
/// where both act). Each `V_S` column is paired with a `K` column to form a
/// 2x2 block. On the left, `W = U^{-1}` takes the images `E v` for the
/// `E`-columns and a right inverse of `Q_m^T` for the `Q`-columns; `E^T Q = 0`
/// makes these choices compatible.
pub fn nilpotent_pair_reduce(
    e: &ExactMatrix,
    q: &ExactMatrix,
    kind: Kind,
    mode: ReduceMode,
) -> Result<NilpotentReduction, PairError> {
    check_orthogonal(e, q, kind)?;
    match mode {
        ReduceMode::ExactNonsingularV => reduce_exact(e, q, kind),
        ReduceMode::FloatUnitaryV { tau } => reduce_float(e, q, kind, tau),
    }
}

/// Columns of `space` completing the independent columns of `sub`.
fn complete_in(sub: &ExactMatrix, space: &ExactMatrix) -> ExactMatrix {
    let (_, pivots) = crate::exactmat::rref(&sub.hstack(space));
    let extra: Vec<usize> = pivots.iter().filter(|&&p| p >= sub.cols()).map(|&p| p - sub.cols()).collect();
    space.select_cols(&extra)
}

/// Position of each column of `V` (and `W`) in the canonical order.
struct Layout {
    counts: NilpotentCounts,
}

impl Layout {
    fn a(&self, i: usize) -> usize {
        i
    }
    fn b(&self, i: usize) -> usize {
        self.counts.a + i
    }
    fn c(&self, i: usize) -> usize {
        self.counts.a + self.counts.b + i
    }
    fn block(&self, j: usize) -> usize {
        self.counts.a + self.counts.b + self.counts.c + 2 * j
    }
}

fn reduce_exact(e: &ExactMatrix, q: &ExactMatrix, kind: Kind) -> Result<NilpotentReduction, PairError> {
    let n = e.rows();
    let counts = orbit_counts(e, q);
    let lay = Layout { counts };
    let k = nullspace(&e.vstack(q));
    let ker_e = nullspace(e);
    let ker_q = nullspace(q);
    let va = complete_in(&k, &ker_q);
    let vb = complete_in(&k, &ker_e);
    let vs = extend_to_basis(&column_basis(&ker_e.hstack(&ker_q)));
    let NilpotentCounts { a, b, c, d } = counts;
    if (va.cols(), vb.cols(), vs.cols(), k.cols()) != (a, b, d, c + d) {
        return Err(PairError::Inconsistent("nilpotent subspace dimensions disagree with ranks".into()));
    }
    let mut v = ExactMatrix::zeros(n, n);
    let mut w = ExactMatrix::zeros(n, n);
    for i in 0..a {
        v.set_block(0, lay.a(i), &va.col(i));
        w.set_block(0, lay.a(i), &e.mul(&va.col(i)));
    }
    for i in 0..b {
        v.set_block(0, lay.b(i), &vb.col(i));
    }
    for i in 0..c {
        v.set_block(0, lay.c(i), &k.col(i));
    }
    for j in 0..d {
        let p = lay.block(j);
        v.set_block(0, p, &vs.col(j));
        v.set_block(0, p + 1, &k.col(c + j));
        w.set_block(0, p, &e.mul(&vs.col(j)));
    }
    // Q-columns: W^T (Q v) = e_target
    let qm = q.mul(&vb).hstack(&q.mul(&vs));
    let targets: Vec<usize> = (0..b).map(|i| lay.b(i)).chain((0..d).map(|j| lay.block(j) + 1)).collect();
    if !targets.is_empty() {
        let right_inv = solve(&qm.adjoint(kind), &ExactMatrix::identity(targets.len()))
            .ok_or_else(|| PairError::Inconsistent("Q-images are dependent".into()))?;
        for (col, &t) in targets.iter().enumerate() {
            w.set_block(0, t, &right_inv.col(col));
        }
    }
    let e_images: Vec<usize> = (0..a).map(|i| lay.a(i)).chain((0..d).map(|j| lay.block(j))).collect();
    let kc = complete_in(&w.select_cols(&e_images), &nullspace(&qm.adjoint(kind)));
    if kc.cols() != c {
        return Err(PairError::Inconsistent("left complement has the wrong dimension".into()));
    }
    for i in 0..c {
        w.set_block(0, lay.c(i), &kc.col(i));
    }
    let u = inverse(&w).ok_or_else(|| PairError::Inconsistent("left basis is singular".into()))?;
    let witness = EquivalenceWitness { u, v, kind, v_unitary: false };
    let canonical = counts.realize();
    if !witness.maps((e, q), (&canonical.0, &canonical.1)) {
        return Err(PairError::Inconsistent("nilpotent witness does not reproduce the block form".into()));
    }
    Ok(NilpotentReduction { counts, canonical, witness: ReductionWitness::Exact(witness) })
}

type CMat = DMatrix<Complex64>;

fn to_c(m: &ExactMatrix) -> CMat {
    CMat::from_fn(m.rows(), m.cols(), |i, j| {
        let (re, im) = m[(i, j)].to_f64_pair();
        Complex64::new(re, im)
    })
}

fn adj_c(m: &CMat, kind: Kind) -> CMat {
    match kind {
        Kind::T => m.transpose(),
        Kind::Star => m.adjoint(),
    }
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis of `ker m`: the orthogonal complement of the row space.
fn null_c(m: &CMat, tol: f64) -> CMat {
    let c = m.ncols();
    let scale = max_abs(m).max(1.0);
    let rows = orth_c(&m.adjoint(), tol * scale);
    orth_c(&project_out(&CMat::identity(c, c), &rows), 1e-8)
}

/// Orthonormal basis of the column space: Gram-Schmidt with column
/// pivoting and one re-orthogonalization pass.
fn orth_c(m: &CMat, tol: f64) -> CMat {
    let r = m.nrows();
    let mut rest: Vec<_> = m.column_iter().map(|c| c.into_owned()).collect();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    loop {
        let Some((best, norm)) = rest.iter().map(|c| c.norm()).enumerate().max_by(|a, b| a.1.total_cmp(&b.1)) else {
            break;
        };
        if norm <= tol {
            break;
        }
        let mut x = rest.swap_remove(best);
        for _ in 0..2 {
            for b in &basis {
                x -= b * b.dotc(&x);
            }
        }
        let nx = x.norm();
        if nx <= tol {
            continue;
        }
        let x = x / Complex64::from(nx);
        for c in rest.iter_mut() {
            *c -= &x * x.dotc(c);
        }
        basis.push(x);
    }
    CMat::from_fn(r, basis.len(), |i, j| basis[j][i])
}

fn project_out(x: &CMat, basis: &CMat) -> CMat {
    if basis.ncols() == 0 {
        return x.clone();
    }
    x - basis * (basis.adjoint() * x)
}

fn hcat(parts: &[&CMat], rows: usize) -> CMat {
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        out.view_mut((0, at), (rows, p.ncols())).copy_from(p);
        at += p.ncols();
    }
    out
}

fn reduce_float(e: &ExactMatrix, q: &ExactMatrix, kind: Kind, tau: f64) -> Result<NilpotentReduction, PairError> {
    let n = e.rows();
    let (ef, qf) = (to_c(e), to_c(q));
    let scale = max_abs(&ef).max(max_abs(&qf)).max(1.0);
    let tol = 1e-9 * scale;
    let stacked = {
        let mut s = CMat::zeros(2 * n, n);
        s.view_mut((0, 0), (n, n)).copy_from(&ef);
        s.view_mut((n, 0), (n, n)).copy_from(&qf);
        s
    };
    let k = null_c(&stacked, 1e-9);
    let ker_e = null_c(&ef, 1e-9);
    let ker_q = null_c(&qf, 1e-9);
    let va = orth_c(&project_out(&ker_q, &k), 1e-6);
    let vb = orth_c(&project_out(&ker_e, &k), 1e-6);
    let span = hcat(&[&ker_e, &ker_q], n);
    let vs = null_c(&span.adjoint(), 1e-9);
    let (a, b, d) = (va.ncols(), vb.ncols(), vs.ncols());
    let c = k.ncols().checked_sub(d).ok_or_else(|| PairError::Inconsistent("numerical ranks disagree".into()))?;
    let counts = NilpotentCounts { a, b, c, d };
    if counts.dim() != n {
        return Err(PairError::Inconsistent("numerical ranks disagree".into()));
    }
    let lay = Layout { counts };
    let mut v = CMat::zeros(n, n);
    let mut w = CMat::zeros(n, n);
    for i in 0..a {
        v.set_column(lay.a(i), &va.column(i));
        w.set_column(lay.a(i), &(&ef * va.column(i)));
    }
    for i in 0..b {
        v.set_column(lay.b(i), &vb.column(i));
    }
    for i in 0..c {
        v.set_column(lay.c(i), &k.column(i));
    }
    for j in 0..d {
        let p = lay.block(j);
        v.set_column(p, &vs.column(j));
        v.set_column(p + 1, &k.column(c + j));
        w.set_column(p, &(&ef * vs.column(j)));
    }
    let defect = max_abs(&(v.adjoint() * &v - CMat::identity(n, n)));
    if defect > tau {
        return Err(PairError::ToleranceFailure { defect, tau });
    }
    let qm = hcat(&[&(&qf * &vb), &(&qf * &vs)], n);
    let targets: Vec<usize> = (0..b).map(|i| lay.b(i)).chain((0..d).map(|j| lay.block(j) + 1)).collect();
    let qa = adj_c(&qm, kind);
    if !targets.is_empty() {
        let gram = &qa * qa.adjoint();
        let gi = gram.try_inverse().ok_or_else(|| PairError::Inconsistent("Q-images are dependent".into()))?;
        let right_inv = qa.adjoint() * gi;
        for (col, &t) in targets.iter().enumerate() {
            w.set_column(t, &right_inv.column(col));
        }
    }
    let e_images: Vec<usize> = (0..a).map(|i| lay.a(i)).chain((0..d).map(|j| lay.block(j))).collect();
    let x0 = CMat::from_fn(n, e_images.len(), |i, j| w[(i, e_images[j])]);
    let kc = orth_c(&project_out(&null_c(&qa, 1e-9), &orth_c(&x0, tol)), 1e-6);
    if kc.ncols() != c {
        return Err(PairError::Inconsistent("left complement has the wrong dimension".into()));
    }
    for i in 0..c {
        w.set_column(lay.c(i), &kc.column(i));
    }
    let u = w.clone().try_inverse().ok_or_else(|| PairError::Inconsistent("left basis is singular".into()))?;
    let canonical = counts.realize();
    let (ce, cq) = (to_c(&canonical.0), to_c(&canonical.1));
    let residual = max_abs(&(&u * &ef * &v - ce)).max(max_abs(&(adj_c(&w, kind) * &qf * &v - cq)));
    if residual > tau.sqrt() {
        return Err(PairError::ToleranceFailure { defect: residual, tau: tau.sqrt() });
    }
    let witness = FloatWitness { u, v, kind, unitarity_defect: defect, residual };
    Ok(NilpotentReduction { counts, canonical, witness: ReductionWitness::Float(witness) })
}
