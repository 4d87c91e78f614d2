//! Spectral primitives: leading singular subspaces, principal angles,
//! Schatten sin-Θ distances, projectors and complements.
//!
//! Small matrices go through a one-sided Jacobi SVD (tall ones after a thin
//! QR), which is slow for big inputs but accurate and dependable on
//! rank-deficient ones. Wide
//! matrices with many entries, which is what matricizations of the larger
//! experiment tensors look like, are handled through the `rows x rows` Gram
//! matrix and nalgebra's symmetric eigensolver; that costs one GEMM and never
//! touches the long side twice. The eigensolver's output is checked by its
//! residual, with the Jacobi SVD as the fallback.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{contract, Error, Result};
use crate::tensor::{gemm, matricize, Matrix, Mode, Operand, Tensor3};

const ORTHO_TOL: f64 = 1e-10;
const SVD_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 10_000;
const JACOBI_SWEEPS: usize = 100;
/// Accepted residual of a Gram eigendecomposition, relative to its norm.
const EIGEN_CHECK: f64 = 1e-9;
/// Above this many entries a wide matrix is decomposed through its Gram matrix.
const GRAM_THRESHOLD: usize = 4096;

/// A `p x r` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    cols: Matrix,
}

impl OrthonormalBasis {
    /// Validates `colsᵀ · cols = I_r` to within 1e-10.
    pub fn new(cols: Matrix) -> Result<Self> {
        let (p, r) = cols.shape();
        if r == 0 || r > p {
            return contract(format!("orthonormal basis needs 1 <= r <= p, got {p}x{r}"));
        }
        let gram = cols.t_matmul(&cols)?;
        let dev = gram.max_abs_diff(&Matrix::identity(r));
        if dev > ORTHO_TOL {
            return contract(format!("columns are not orthonormal (deviation {dev:.3e})"));
        }
        Ok(OrthonormalBasis { cols })
    }

    pub(crate) fn from_raw(cols: Matrix) -> Self {
        OrthonormalBasis { cols }
    }

    /// Standard basis vectors `e_{idx}` for the given indices.
    pub fn coordinate(p: usize, idx: &[usize]) -> Result<Self> {
        let m = Matrix::from_fn(p, idx.len(), |i, j| if idx[j] == i { 1.0 } else { 0.0 });
        Self::new(m)
    }

    pub fn p(&self) -> usize {
        self.cols.rows()
    }

    pub fn r(&self) -> usize {
        self.cols.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.cols
    }

    pub fn into_matrix(self) -> Matrix {
        self.cols
    }
}

/// Cosines of the principal angles, nonincreasing, in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles {
    cosines: Vec<f64>,
}

impl PrincipalAngles {
    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    pub fn angles(&self) -> Vec<f64> {
        self.cosines.iter().map(|c| c.acos()).collect()
    }
}

pub(crate) fn to_dmatrix(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Flips each column so that its largest-magnitude entry is positive.
fn canonical_signs(m: &mut Matrix) {
    let (rows, cols) = m.shape();
    let mut data = std::mem::replace(m, Matrix::zeros(0, 0)).into_vec();
    for j in 0..cols {
        let pivot = (0..rows).map(|i| data[i * cols + j]).fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
        if pivot < 0.0 {
            (0..rows).for_each(|i| data[i * cols + j] = -data[i * cols + j]);
        }
    }
    *m = Matrix::from_raw(rows, cols, data);
}

fn use_gram(rows: usize, cols: usize) -> bool {
    rows <= cols && rows * cols > GRAM_THRESHOLD
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One-sided (Hestenes) Jacobi on the rows of a row-major `k x len` array:
/// applies plane rotations until the rows are mutually orthogonal. Returns
/// the accumulated `k x k` orthogonal `V` with `rows_out = V · rows_in`.
fn jacobi_orthogonalize(w: &mut [f64], k: usize, len: usize) -> Result<Vec<f64>> {
    let mut v = vec![0.0; k * k];
    (0..k).for_each(|i| v[i * k + i] = 1.0);
    // Rotations cannot push relative inner products much below len·eps.
    let tol = (len.max(1) as f64) * f64::EPSILON;
    // Vectors shorter than 1e-30 of the whole are zero for every purpose
    // here; rotating them only chases roundoff into the subnormal range.
    let floor = dot(w, w) * 1e-60;
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let (head, tail) = w.split_at_mut(j * len);
                let (wi, wj) = (&mut head[i * len..(i + 1) * len], &mut tail[..len]);
                let (alpha, beta, gamma) = (dot(wi, wi), dot(wj, wj), dot(wi, wj));
                if alpha <= floor || beta <= floor || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in wi.iter_mut().zip(wj.iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
                let (vh, vt) = v.split_at_mut(j * k);
                for (x, y) in vh[i * k..(i + 1) * k].iter_mut().zip(vt[..k].iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
            }
        }
        if !rotated {
            return Ok(v);
        }
    }
    Err(Error::Numerical("Jacobi SVD did not converge".into()))
}

/// Takes `cand` through two rounds of Gram–Schmidt against `cols` and
/// appends it normalized, unless it kept less than `min_norm` of its length.
fn push_orthonormal(cols: &mut Vec<Vec<f64>>, mut cand: Vec<f64>, min_norm: f64) -> bool {
    let before = dot(&cand, &cand).sqrt();
    for _ in 0..2 {
        for c in cols.iter() {
            let d = dot(c, &cand);
            cand.iter_mut().zip(c).for_each(|(x, y)| *x -= d * y);
        }
    }
    let norm = dot(&cand, &cand).sqrt();
    if norm <= min_norm * before || norm == 0.0 {
        return false;
    }
    cand.iter_mut().for_each(|x| *x /= norm);
    cols.push(cand);
    true
}

/// Fills `cols` up to `want` columns, each time taking the standard basis
/// vector with the largest component outside the current span. That
/// component has length at least `1/√p`, so the projection is well
/// conditioned.
fn complete_basis(cols: &mut Vec<Vec<f64>>, p: usize, want: usize) {
    let mut inside: Vec<f64> = (0..p).map(|i| cols.iter().map(|c| c[i] * c[i]).sum()).collect();
    while cols.len() < want.min(p) {
        let i = (0..p).min_by(|&a, &b| inside[a].total_cmp(&inside[b]).then(a.cmp(&b))).expect("p > 0");
        let mut e = vec![0.0; p];
        e[i] = 1.0;
        if !push_orthonormal(cols, e, 1e-3) {
            break;
        }
        let last = cols.last().expect("just pushed");
        inside.iter_mut().zip(last).for_each(|(s, v)| *s += v * v);
    }
}

fn columns_to_matrix(cols: &[Vec<f64>], p: usize) -> Matrix {
    Matrix::from_fn(p, cols.len(), |i, j| cols[j][i])
}

/// Left singular pairs of `a` by one-sided Jacobi: singular values
/// nonincreasing, and, if `want > 0`, the leading `want` left singular
/// vectors. Vectors for (numerically) zero singular values are completed to
/// an orthonormal set.
fn jacobi_svd(a: &Matrix, want: usize) -> Result<(Vec<f64>, Matrix)> {
    // Work on a copy scaled by a power of two so the largest entry is near 1
    // and squared norms neither overflow nor underflow.
    let peak = a.as_slice().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let scale = if peak > 0.0 && peak.is_finite() { 2f64.powi(-(peak.log2().ceil() as i32)) } else { 1.0 };
    let a = &a.scaled(scale);
    let (sv, u) = jacobi_svd_scaled(a, want)?;
    Ok((sv.into_iter().map(|s| s / scale).collect(), u))
}

fn jacobi_svd_scaled(a: &Matrix, want: usize) -> Result<(Vec<f64>, Matrix)> {
    let (m, n) = a.shape();
    if m <= n {
        // Rows of A are rotated; U is the transpose of the rotation.
        let mut w = a.as_slice().to_vec();
        let v = jacobi_orthogonalize(&mut w, m, n)?;
        let mut sv: Vec<(f64, usize)> = (0..m).map(|i| (dot(&w[i * n..(i + 1) * n], &w[i * n..(i + 1) * n]).sqrt(), i)).collect();
        sv.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        let u = Matrix::from_fn(m, want, |row, col| v[sv[col].1 * m + row]);
        Ok((sv.into_iter().map(|(s, _)| s).collect(), u))
    } else {
        // A = QR reduces the tall case to the square R: the left singular
        // vectors of A are Q times those of R, and Q has orthonormal columns
        // whatever the rank, so no basis completion is needed.
        let (q, r) = qr_positive(a)?;
        let (sv, ur) = jacobi_svd_scaled(&r, want)?;
        let u = if want == 0 { Matrix::from_fn(m, 0, |_, _| 0.0) } else { q.matmul(&ur)? };
        Ok((sv, u))
    }
}

/// Eigenpairs of a symmetric positive semidefinite Gram matrix, eigenvalues
/// nonincreasing. The result is checked through its residual; `None` means
/// the eigensolver's answer was rejected.
fn checked_gram_eigen(g: &Matrix, want: usize) -> Option<(Vec<f64>, Matrix)> {
    let n = g.rows();
    let eig = SymmetricEigen::try_new(to_dmatrix(g), SVD_EPS, MAX_SWEEPS)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let check = want.max(1);
    let vecs = Matrix::from_fn(n, check, |i, j| eig.eigenvectors[(i, order[j])]);
    let scale = values[0].abs().max(f64::MIN_POSITIVE);
    let gv = g.matmul(&vecs).ok()?;
    let resid = (0..n)
        .flat_map(|i| (0..check).map(move |j| (i, j)))
        .map(|(i, j)| (gv.get(i, j) - values[j] * vecs.get(i, j)).abs())
        .fold(0.0, f64::max);
    let ortho = vecs.t_matmul(&vecs).ok()?.max_abs_diff(&Matrix::identity(check));
    if resid > EIGEN_CHECK * scale || ortho > EIGEN_CHECK {
        return None;
    }
    // For singular values the whole spectrum must be trusted as well.
    if want == 0 {
        let trace: f64 = (0..n).map(|i| g.get(i, i)).sum();
        if (values.iter().sum::<f64>() - trace).abs() > EIGEN_CHECK * trace.max(scale) {
            return None;
        }
    }
    Some((values, vecs))
}

fn gram_of_rows(m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut g = vec![0.0; n * n];
    gemm(m.operand(), m.operand().t(), &mut g, n, 1);
    Matrix::from_raw(n, n, g)
}

fn finish_basis(mut u: Matrix) -> OrthonormalBasis {
    canonical_signs(&mut u);
    OrthonormalBasis::from_raw(u)
}

/// Leading subspace from the Gram matrix, or from Jacobi on `unfold()` when
/// the eigensolver's answer fails its check.
fn leading_via_gram(g: &Matrix, r: usize, unfold: impl FnOnce() -> Matrix) -> Result<OrthonormalBasis> {
    match checked_gram_eigen(g, r) {
        Some((_, vecs)) => Ok(finish_basis(vecs)),
        None => Ok(finish_basis(jacobi_svd(&unfold(), r)?.1)),
    }
}

fn values_via_gram(g: &Matrix, unfold: impl FnOnce() -> Matrix) -> Result<Vec<f64>> {
    match checked_gram_eigen(g, 0) {
        Some((vals, _)) => Ok(vals.into_iter().map(|v| v.max(0.0).sqrt()).collect()),
        None => Ok(jacobi_svd(&unfold(), 0)?.0),
    }
}

/// `SVD_r(A)`: the leading `r` left singular vectors of `a`.
pub fn svd_leading(a: &Matrix, r: usize) -> Result<OrthonormalBasis> {
    let (rows, cols) = a.shape();
    if r == 0 || r > rows.min(cols) {
        return contract(format!("rank {r} infeasible for a {rows}x{cols} matrix"));
    }
    if use_gram(rows, cols) {
        return leading_via_gram(&gram_of_rows(a), r, || a.clone());
    }
    if rows > cols {
        // Left singular vectors of A = QR are Q times those of R.
        let (q, rf) = qr_positive(a)?;
        let ur = match checked_gram_eigen(&gram_of_rows(&rf), r) {
            Some((_, vecs)) => vecs,
            None => jacobi_svd(&rf, r)?.1,
        };
        return Ok(finish_basis(q.matmul(&ur)?));
    }
    Ok(finish_basis(jacobi_svd(a, r)?.1))
}

/// All `min(rows, cols)` singular values of `a`, nonincreasing.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    if use_gram(rows, cols) {
        return values_via_gram(&gram_of_rows(a), || a.clone());
    }
    Ok(jacobi_svd(a, 0)?.0)
}

/// Gram matrix `M_k(X) · M_k(X)ᵀ` computed directly from tensor storage.
fn mode_gram(x: &Tensor3, mode: Mode) -> Matrix {
    let [p1, p2, p3] = x.dims();
    let data = x.as_slice();
    match mode {
        Mode::One => {
            let op = Operand::row_major(data, p1, p2 * p3);
            let mut g = vec![0.0; p1 * p1];
            gemm(op, op.t(), &mut g, p1, 1);
            Matrix::from_raw(p1, p1, g)
        }
        Mode::Two => {
            let mut acc = vec![0.0; p2 * p2];
            let mut g = vec![0.0; p2 * p2];
            for slab in data.chunks_exact(p2 * p3) {
                let op = Operand::row_major(slab, p2, p3);
                gemm(op, op.t(), &mut g, p2, 1);
                acc.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
            }
            Matrix::from_raw(p2, p2, acc)
        }
        Mode::Three => {
            let op = Operand::row_major(data, p1 * p2, p3);
            let mut g = vec![0.0; p3 * p3];
            gemm(op.t(), op, &mut g, p3, 1);
            Matrix::from_raw(p3, p3, g)
        }
    }
}

fn mode_shape(x: &Tensor3, mode: Mode) -> (usize, usize) {
    let d = x.dim(mode);
    (d, x.len() / d)
}

/// `svd_leading(matricize(x, mode), r)` without materializing the unfolding
/// when the Gram route applies.
pub fn mode_leading_subspace(x: &Tensor3, mode: Mode, r: usize) -> Result<OrthonormalBasis> {
    let (rows, cols) = mode_shape(x, mode);
    if r == 0 || r > rows.min(cols) {
        return contract(format!(
            "rank {r} infeasible for the {rows}x{cols} mode-{mode} matricization"
        ));
    }
    if use_gram(rows, cols) {
        leading_via_gram(&mode_gram(x, mode), r, || matricize(x, mode))
    } else {
        svd_leading(&matricize(x, mode), r)
    }
}

/// Singular values of `M_k(x)`, nonincreasing.
pub fn mode_singular_values(x: &Tensor3, mode: Mode) -> Result<Vec<f64>> {
    let (rows, cols) = mode_shape(x, mode);
    if use_gram(rows, cols) {
        values_via_gram(&mode_gram(x, mode), || matricize(x, mode))
    } else {
        singular_values(&matricize(x, mode))
    }
}

fn same_shape(u: &OrthonormalBasis, v: &OrthonormalBasis) -> Result<()> {
    if u.p() != v.p() || u.r() != v.r() {
        return contract(format!(
            "subspace shapes differ: {}x{} vs {}x{}",
            u.p(),
            u.r(),
            v.p(),
            v.r()
        ));
    }
    Ok(())
}

pub fn principal_angles(u: &OrthonormalBasis, v: &OrthonormalBasis) -> Result<PrincipalAngles> {
    same_shape(u, v)?;
    let cross = u.matrix().t_matmul(v.matrix())?;
    let mut cosines = singular_values(&cross)?;
    for c in &mut cosines {
        *c = c.clamp(0.0, 1.0);
    }
    cosines.sort_by(|a, b| b.total_cmp(a));
    Ok(PrincipalAngles { cosines })
}

/// Sines of the principal angles, nonincreasing.
///
/// Taken as the singular values of `(I - UUᵀ)V` rather than `sqrt(1 - cos²)`,
/// which keeps full relative accuracy for nearly aligned subspaces.
pub fn principal_sines(u: &OrthonormalBasis, v: &OrthonormalBasis) -> Result<Vec<f64>> {
    same_shape(u, v)?;
    let cross = u.matrix().t_matmul(v.matrix())?;
    let residual = v.matrix().minus(&u.matrix().matmul(&cross)?);
    let mut sines = singular_values(&residual)?;
    for s in &mut sines {
        *s = s.clamp(0.0, 1.0);
    }
    Ok(sines)
}

/// Schatten-`q` norm of a vector of singular values; `q = f64::INFINITY`
/// gives the maximum.
pub fn schatten(values: &[f64], q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return contract(format!("Schatten index must lie in [1, inf], got {q}"));
    }
    if q.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    Ok(values.iter().map(|s| s.abs().powf(q)).sum::<f64>().powf(q.recip()))
}

/// `‖sin Θ(U, V)‖_q`, with `q = f64::INFINITY` for the spectral norm.
pub fn sin_theta_norm(u: &OrthonormalBasis, v: &OrthonormalBasis, q: f64) -> Result<f64> {
    let sines = principal_sines(u, v)?;
    schatten(&sines, q)
}

/// Schatten-`q` norm of an arbitrary matrix.
pub fn matrix_schatten(m: &Matrix, q: f64) -> Result<f64> {
    schatten(&singular_values(m)?, q)
}

/// Orthogonal projector `UUᵀ`.
pub fn projector(u: &OrthonormalBasis) -> Matrix {
    u.matrix()
        .matmul_t(u.matrix())
        .expect("U and U share their column count")
}

/// An orthonormal basis of the orthogonal complement of `span(U)`.
pub fn orthonormal_complement(u: &OrthonormalBasis) -> Result<OrthonormalBasis> {
    let (p, r) = (u.p(), u.r());
    if r >= p {
        return contract(format!("complement of a full {p}x{r} basis is empty"));
    }
    let mut cols: Vec<Vec<f64>> = (0..r).map(|j| u.matrix().column(j)).collect();
    complete_basis(&mut cols, p, p);
    if cols.len() != p {
        return Err(Error::Numerical("could not complete the basis".into()));
    }
    let mut comp = columns_to_matrix(&cols[r..], p);
    canonical_signs(&mut comp);
    OrthonormalBasis::new(comp)
}

/// Thin QR with the diagonal of `R` made nonnegative, so `Q` is uniquely
/// determined by the column span sequence of `m`.
pub fn qr_positive(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let (rows, cols) = m.shape();
    if cols > rows {
        return contract(format!("thin QR needs rows >= cols, got {rows}x{cols}"));
    }
    let qr = to_dmatrix(m).qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
            r.row_mut(j).neg_mut();
        }
    }
    Ok((from_dmatrix(&q), from_dmatrix(&r)))
}

/// `λ = min_k σ_{r_k}(M_k(X))`.
pub fn signal_strength(x: &Tensor3, ranks: [usize; 3]) -> Result<f64> {
    let mut lambda = f64::INFINITY;
    for mode in Mode::ALL {
        let (rows, cols) = mode_shape(x, mode);
        let r = ranks[mode.index()];
        if r == 0 || r > rows.min(cols) {
            return contract(format!(
                "rank {r} infeasible for the {rows}x{cols} mode-{mode} matricization"
            ));
        }
        let sv = mode_singular_values(x, mode)?;
        lambda = lambda.min(sv[r - 1]);
    }
    Ok(lambda)
}
