use super::matrix::Matrix;
use super::modular;
use super::scalar::Field;
use super::ExactMatError;

/// Reduced row-echelon form with the pivot column of every nonzero row.
///
/// Pivoting takes the first nonzero entry in column order, which keeps the
/// output deterministic; no magnitude heuristics are needed in exact arithmetic.
pub fn rref<T: Field>(a: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let (rows, cols) = a.shape();
    let mut m: Vec<Vec<T>> = (0..rows).map(|r| a.row(r).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(p) = (pr..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(pr, p);
        let inv = T::one().div_ref(&m[pr][c]);
        for x in m[pr][c..].iter_mut() {
            if !x.is_zero() {
                *x = x.mul_ref(&inv);
            }
        }
        let (head, tail) = m.split_at_mut(pr);
        let (prow, tail) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(tail.iter_mut()) {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (x, p) in row[c..].iter_mut().zip(&prow[c..]) {
                x.sub_mul_assign(&f, p);
            }
        }
        pivots.push(c);
        pr += 1;
    }
    let data = m.into_iter().flatten().collect();
    (Matrix::from_vec(rows, cols, data), pivots)
}

/// Below this many entries plain rational elimination beats the modular path.
const MODULAR_THRESHOLD: usize = 100;

pub fn rank<T: Field>(a: &Matrix<T>) -> usize {
    if a.rows() * a.cols() >= MODULAR_THRESHOLD {
        if let Some(r) = modular::rank(a) {
            return r;
        }
    }
    rational_rank(a)
}

pub(crate) fn rational_rank<T: Field>(a: &Matrix<T>) -> usize {
    // forward elimination only; cheaper than a full RREF
    let (rows, cols) = a.shape();
    let mut m: Vec<Vec<T>> = (0..rows).map(|r| a.row(r).to_vec()).collect();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(p) = (pr..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(pr, p);
        let (top, below) = m.split_at_mut(pr + 1);
        let prow = &top[pr];
        for row in below.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].div_ref(&prow[c]);
            for (x, p) in row[c..].iter_mut().zip(&prow[c..]) {
                x.sub_mul_assign(&f, p);
            }
        }
        pr += 1;
    }
    pr
}

/// Basis of the right nullspace from the RREF, one column per free variable.
pub fn nullspace<T: Field>(a: &Matrix<T>) -> Matrix<T> {
    if a.rows() * a.cols() >= MODULAR_THRESHOLD {
        if let Some(m) = modular::nullspace(a) {
            return m.null;
        }
    }
    let (r, pivots) = rref(a);
    nullspace_from_rref(&r, &pivots)
}

fn nullspace_from_rref<T: Field>(r: &Matrix<T>, pivots: &[usize]) -> Matrix<T> {
    let cols = r.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut n = Matrix::zeros(cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        n[(f, k)] = T::one();
        for (i, &p) in pivots.iter().enumerate() {
            n[(p, k)] = -r[(i, f)].clone();
        }
    }
    n
}

/// `(R, rank, N)`: RREF, rank and a nullspace basis with `A N = 0`.
pub fn rref_rank_nullspace<T: Field>(a: &Matrix<T>) -> (Matrix<T>, usize, Matrix<T>) {
    let (r, pivots) = rref(a);
    let n = nullspace_from_rref(&r, &pivots);
    (r, pivots.len(), n)
}

/// Some `X` with `A X = B`, or `None` when the system is inconsistent.
pub fn solve<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> Option<Matrix<T>> {
    assert_eq!(a.rows(), b.rows(), "solve: row mismatch");
    let n = a.cols();
    let (r, pivots) = rref(&a.hstack(b));
    if pivots.iter().any(|&p| p >= n) {
        return None;
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (i, &p) in pivots.iter().enumerate() {
        for c in 0..b.cols() {
            x[(p, c)] = r[(i, n + c)].clone();
        }
    }
    Some(x)
}

pub fn inverse<T: Field>(a: &Matrix<T>) -> Option<Matrix<T>> {
    if !a.is_square() {
        return None;
    }
    let n = a.rows();
    if n == 0 {
        return Some(Matrix::zeros(0, 0));
    }
    let (r, pivots) = rref(&a.hstack(&Matrix::identity(n)));
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.block(0, n, n, 2 * n))
}

pub fn determinant<T: Field>(a: &Matrix<T>) -> T {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.rows();
    let mut m: Vec<Vec<T>> = (0..n).map(|r| a.row(r).to_vec()).collect();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return T::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = det.mul_ref(&m[c][c]);
        let (top, below) = m.split_at_mut(c + 1);
        let prow = &top[c];
        for row in below.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].div_ref(&prow[c]);
            for (x, p) in row[c..].iter_mut().zip(&prow[c..]) {
                x.sub_mul_assign(&f, p);
            }
        }
    }
    det
}

pub fn is_nonsingular<T: Field>(a: &Matrix<T>) -> bool {
    a.is_square() && rank(a) == a.rows()
}

/// Columns extending the independent columns of `b` to a basis of the
/// whole space: standard basis vectors, chosen greedily in index order.
pub fn extend_to_basis<T: Field>(b: &Matrix<T>) -> Matrix<T> {
    let n = b.rows();
    let mut cur = b.clone();
    let mut added = Matrix::zeros(n, 0);
    let mut r = rank(&cur);
    for k in 0..n {
        if r == n {
            break;
        }
        let mut e = Matrix::zeros(n, 1);
        e[(k, 0)] = T::one();
        let cand = cur.hstack(&e);
        let rc = rank(&cand);
        if rc > r {
            cur = cand;
            added = added.hstack(&e);
            r = rc;
        }
    }
    added
}

/// Columns of `b` forming a basis of its column space (first independent ones).
pub fn column_basis<T: Field>(b: &Matrix<T>) -> Matrix<T> {
    let (_, pivots) = rref(b);
    b.select_cols(&pivots)
}

/// `Y2` with `P Y2 = 0` and `[Y1 | Y2]` nonsingular, for `P Y1` nonsingular.
pub fn completion_basis<T: Field>(y1: &Matrix<T>, p: &Matrix<T>) -> Result<Matrix<T>, ExactMatError> {
    let (n, k) = y1.shape();
    if p.shape() != (k, n) {
        return Err(ExactMatError::BadInput(format!(
            "P must be {k}x{n}, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    if k >= n {
        return Err(ExactMatError::BadInput(format!("need k < n, got k = {k}, n = {n}")));
    }
    if !is_nonsingular(&p.mul(y1)) {
        return Err(ExactMatError::BadInput("P*Y1 is singular".into()));
    }
    // any y in span(Y1) with P y = 0 is zero, so ker P completes Y1
    Ok(nullspace(p))
}
