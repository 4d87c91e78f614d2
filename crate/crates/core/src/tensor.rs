//! Dense order-3 tensors, row-major matrices, and the multilinear primitives
//! built on them.
//!
//! A [`Tensor3`] with dims `(p1, p2, p3)` keeps entry `(i, j, k)` at flat
//! index `i * p2 * p3 + j * p3 + k`, which is exactly the row-major layout of
//! its mode-1 matricization. Modes 2 and 3 follow the cyclic convention:
//!
//! * `M2(X)` is `p2 x (p3 * p1)` with column `k * p1 + i`,
//! * `M3(X)` is `p3 x (p1 * p2)` with column `i * p2 + j`,
//!
//! so `M1` pairs with `U2 ⊗ U3`, `M2` with `U3 ⊗ U1` and `M3` with `U1 ⊗ U2`.
//! All indices in this crate are zero-based.

use std::fmt;
use std::ops::Range;

use crate::error::{contract, Result};

/// One of the three tensor modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    /// Zero-based position, usable to index `dims`.
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
            Mode::Three => 2,
        }
    }

    /// One-based mode number, as used in the CLI and in cell names.
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn from_number(n: usize) -> Result<Mode> {
        match n {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            _ => contract(format!("mode must be 1, 2 or 3, got {n}")),
        }
    }

    /// The remaining two modes in cyclic order `(k+1, k+2)`.
    pub fn others(self) -> (Mode, Mode) {
        match self {
            Mode::One => (Mode::Two, Mode::Three),
            Mode::Two => (Mode::Three, Mode::One),
            Mode::Three => (Mode::One, Mode::Two),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Strided read-only operand handed to the GEMM kernel.
#[derive(Clone, Copy)]
pub(crate) struct Operand<'a> {
    data: &'a [f64],
    rows: usize,
    cols: usize,
    rs: usize,
    cs: usize,
}

impl<'a> Operand<'a> {
    pub(crate) fn row_major(data: &'a [f64], rows: usize, cols: usize) -> Self {
        debug_assert!(data.len() >= rows * cols);
        Operand { data, rows, cols, rs: cols, cs: 1 }
    }

    pub(crate) fn t(self) -> Self {
        Operand { data: self.data, rows: self.cols, cols: self.rows, rs: self.cs, cs: self.rs }
    }

    fn check(&self) {
        if self.rows > 0 && self.cols > 0 {
            let last = (self.rows - 1) * self.rs + (self.cols - 1) * self.cs;
            assert!(last < self.data.len(), "operand out of bounds");
        }
    }
}

/// `C <- A * B` with `C` given by row and column strides.
pub(crate) fn gemm(a: Operand<'_>, b: Operand<'_>, c: &mut [f64], c_rs: usize, c_cs: usize) {
    assert_eq!(a.cols, b.rows, "gemm inner dimension mismatch");
    a.check();
    b.check();
    let (m, k, n) = (a.rows, a.cols, b.cols);
    if m == 0 || n == 0 {
        return;
    }
    let last = (m - 1) * c_rs + (n - 1) * c_cs;
    assert!(last < c.len(), "gemm output out of bounds");
    if k == 0 {
        for i in 0..m {
            for j in 0..n {
                c[i * c_rs + j * c_cs] = 0.0;
            }
        }
        return;
    }
    // SAFETY: every operand was bounds-checked above against its strides and
    // shape, and `c` is uniquely borrowed.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.data.as_ptr(),
            a.rs as isize,
            a.cs as isize,
            b.data.as_ptr(),
            b.rs as isize,
            b.cs as isize,
            0.0,
            c.as_mut_ptr(),
            c_rs as isize,
            c_cs as isize,
        );
    }
}

fn all_finite(data: &[f64]) -> bool {
    data.iter().all(|x| x.is_finite())
}

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return contract(format!("matrix shape must be positive, got {rows}x{cols}"));
        }
        if data.len() != rows * cols {
            return contract(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if !all_finite(&data) {
            return contract("matrix entries must be finite");
        }
        Ok(Matrix { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            data.extend_from_slice(row.as_ref());
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub(crate) fn operand(&self) -> Operand<'_> {
        Operand::row_major(&self.data, self.rows, self.cols)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return contract(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        gemm(self.operand(), rhs.operand(), &mut out, rhs.cols, 1);
        Ok(Matrix::from_raw(self.rows, rhs.cols, out))
    }

    /// `selfᵀ · rhs` without materializing the transpose.
    pub fn t_matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows {
            return contract(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        let mut out = vec![0.0; self.cols * rhs.cols];
        gemm(self.operand().t(), rhs.operand(), &mut out, rhs.cols, 1);
        Ok(Matrix::from_raw(self.cols, rhs.cols, out))
    }

    /// `self · rhsᵀ` without materializing the transpose.
    pub fn matmul_t(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.cols {
            return contract(format!(
                "cannot multiply {}x{} by ({}x{})ᵀ",
                self.rows, self.cols, rhs.rows, rhs.cols
            ));
        }
        let mut out = vec![0.0; self.rows * rhs.rows];
        gemm(self.operand(), rhs.operand().t(), &mut out, rhs.rows, 1);
        Ok(Matrix::from_raw(self.rows, rhs.rows, out))
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|x| x * s).collect())
    }

    /// Entrywise `self + rhs`. Panics on shape mismatch.
    pub fn plus(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    /// Entrywise `self - rhs`. Panics on shape mismatch.
    pub fn minus(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix::from_raw(self.rows, self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Dense order-3 tensor stored in mode-1 matricization order.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3")
            .field("dims", &self.dims)
            .field("data", &self.data)
            .finish()
    }
}

impl Tensor3 {
    pub fn new(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return contract(format!("tensor dims must be positive, got {dims:?}"));
        }
        let len = dims[0] * dims[1] * dims[2];
        if data.len() != len {
            return contract(format!(
                "tensor {dims:?} needs {len} entries, got {}",
                data.len()
            ));
        }
        if !all_finite(&data) {
            return contract("tensor entries must be finite");
        }
        Ok(Tensor3 { dims, data })
    }

    pub(crate) fn from_raw(dims: [usize; 3], data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims[0] * dims[1] * dims[2]);
        Tensor3 { dims, data }
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        Tensor3 { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { dims, data }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self, mode: Mode) -> usize {
        self.dims[mode.index()]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let [_, p2, p3] = self.dims;
        self.data[(i * p2 + j) * p3 + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3::from_raw(self.dims, self.data.iter().map(|&x| f(x)).collect())
    }

    pub fn scaled(&self, s: f64) -> Tensor3 {
        self.map(|x| x * s)
    }

    /// Entrywise `self + rhs`. Panics on shape mismatch.
    pub fn plus(&self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, rhs.dims, "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Tensor3::from_raw(self.dims, data)
    }

    /// Entrywise `self - rhs`. Panics on shape mismatch.
    pub fn minus(&self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims, rhs.dims, "shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Tensor3::from_raw(self.dims, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(self)
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.dims, other.dims, "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Unfolds `x` along `mode`. Mode 1 is a plain copy of the storage.
pub fn matricize(x: &Tensor3, mode: Mode) -> Matrix {
    let [p1, p2, p3] = x.dims;
    match mode {
        Mode::One => Matrix::from_raw(p1, p2 * p3, x.data.clone()),
        Mode::Two => {
            let mut out = vec![0.0; x.len()];
            let cols = p3 * p1;
            for i in 0..p1 {
                for j in 0..p2 {
                    for k in 0..p3 {
                        out[j * cols + k * p1 + i] = x.get(i, j, k);
                    }
                }
            }
            Matrix::from_raw(p2, cols, out)
        }
        Mode::Three => {
            let mut out = vec![0.0; x.len()];
            let cols = p1 * p2;
            for i in 0..p1 {
                for j in 0..p2 {
                    let base = (i * p2 + j) * p3;
                    for k in 0..p3 {
                        out[k * cols + i * p2 + j] = x.data[base + k];
                    }
                }
            }
            Matrix::from_raw(p3, cols, out)
        }
    }
}

/// Inverse of [`matricize`]: folds a mode-`mode` unfolding back into a tensor.
pub fn fold(m: &Matrix, mode: Mode, dims: [usize; 3]) -> Result<Tensor3> {
    let [p1, p2, p3] = dims;
    let expected = match mode {
        Mode::One => (p1, p2 * p3),
        Mode::Two => (p2, p3 * p1),
        Mode::Three => (p3, p1 * p2),
    };
    if m.shape() != expected {
        return contract(format!(
            "cannot fold {:?} into mode-{mode} unfolding of {dims:?}",
            m.shape()
        ));
    }
    Ok(Tensor3::from_fn(dims, |i, j, k| match mode {
        Mode::One => m.get(i, j * p3 + k),
        Mode::Two => m.get(j, k * p1 + i),
        Mode::Three => m.get(k, i * p2 + j),
    }))
}

fn contract_mode(x: &Tensor3, mode: Mode, a: Operand<'_>) -> Tensor3 {
    let [p1, p2, p3] = x.dims;
    let q = a.rows;
    match mode {
        Mode::One => {
            let mut out = vec![0.0; q * p2 * p3];
            gemm(a, Operand::row_major(&x.data, p1, p2 * p3), &mut out, p2 * p3, 1);
            Tensor3::from_raw([q, p2, p3], out)
        }
        Mode::Two => {
            let mut out = vec![0.0; p1 * q * p3];
            let in_slab = p2 * p3;
            let out_slab = q * p3;
            for (i, chunk) in out.chunks_exact_mut(out_slab).enumerate() {
                let slice = &x.data[i * in_slab..(i + 1) * in_slab];
                gemm(a, Operand::row_major(slice, p2, p3), chunk, p3, 1);
            }
            Tensor3::from_raw([p1, q, p3], out)
        }
        Mode::Three => {
            let mut out = vec![0.0; p1 * p2 * q];
            gemm(Operand::row_major(&x.data, p1 * p2, p3), a.t(), &mut out, q, 1);
            Tensor3::from_raw([p1, p2, q], out)
        }
    }
}

/// Marginal multiplication `X ×_mode A`, i.e. `M_mode(result) = A · M_mode(X)`.
pub fn mode_product(x: &Tensor3, mode: Mode, a: &Matrix) -> Result<Tensor3> {
    if a.cols != x.dim(mode) {
        return contract(format!(
            "mode-{mode} product needs {} columns, matrix is {}x{}",
            x.dim(mode),
            a.rows,
            a.cols
        ));
    }
    Ok(contract_mode(x, mode, a.operand()))
}

/// `X ×_mode Uᵀ` for a `p_mode x r` matrix `U`, without forming `Uᵀ`.
pub fn mode_product_t(x: &Tensor3, mode: Mode, u: &Matrix) -> Result<Tensor3> {
    if u.rows != x.dim(mode) {
        return contract(format!(
            "mode-{mode} projection needs {} rows, matrix is {}x{}",
            x.dim(mode),
            u.rows,
            u.cols
        ));
    }
    Ok(contract_mode(x, mode, u.operand().t()))
}

/// Kronecker product with block `(i, k)` equal to `a[i,k] · b`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let cols = ac * bc;
    let mut data = vec![0.0; ar * br * cols];
    for i in 0..ar {
        for k in 0..ac {
            let s = a.get(i, k);
            for j in 0..br {
                let row = i * br + j;
                let dst = &mut data[row * cols + k * bc..row * cols + (k + 1) * bc];
                for (d, &v) in dst.iter_mut().zip(b.row(j)) {
                    *d = s * v;
                }
            }
        }
    }
    Matrix::from_raw(ar * br, cols, data)
}

/// `S ×₁ U1 ×₂ U2 ×₃ U3`.
pub fn tucker_compose(s: &Tensor3, u1: &Matrix, u2: &Matrix, u3: &Matrix) -> Result<Tensor3> {
    let t = mode_product(s, Mode::One, u1)?;
    let t = mode_product(&t, Mode::Two, u2)?;
    mode_product(&t, Mode::Three, u3)
}

pub fn frobenius_norm(x: &Tensor3) -> f64 {
    x.data.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Copies the block `x[r0, r1, r2]` (half-open zero-based ranges).
pub fn subtensor(x: &Tensor3, ranges: [Range<usize>; 3]) -> Result<Tensor3> {
    for (m, r) in ranges.iter().enumerate() {
        if r.start >= r.end || r.end > x.dims[m] {
            return contract(format!(
                "range {r:?} invalid for mode {} of length {}",
                m + 1,
                x.dims[m]
            ));
        }
    }
    let [r0, r1, r2] = ranges;
    let dims = [r0.len(), r1.len(), r2.len()];
    let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    let [_, p2, p3] = x.dims;
    for i in r0 {
        for j in r1.clone() {
            let base = (i * p2 + j) * p3;
            data.extend_from_slice(&x.data[base + r2.start..base + r2.end]);
        }
    }
    Ok(Tensor3::from_raw(dims, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counting() -> Tensor3 {
        Tensor3::from_fn([2, 2, 2], |i, j, k| (4 * i + 2 * j + k) as f64)
    }

    #[test]
    fn matricize_mode1_by_hand() {
        let m = matricize(&counting(), Mode::One);
        assert_eq!(m, Matrix::from_rows(&[[0., 1., 2., 3.], [4., 5., 6., 7.]]));
    }

    #[test]
    fn matricize_mode2_cyclic() {
        let m = matricize(&counting(), Mode::Two);
        assert_eq!(m, Matrix::from_rows(&[[0., 4., 1., 5.], [2., 6., 3., 7.]]));
    }

    #[test]
    fn matricize_mode3_cyclic() {
        let m = matricize(&counting(), Mode::Three);
        assert_eq!(m, Matrix::from_rows(&[[0., 2., 4., 6.], [1., 3., 5., 7.]]));
    }

    #[test]
    fn matricize_zero_tensor() {
        let x = Tensor3::zeros([2, 3, 4]);
        for mode in Mode::ALL {
            let m = matricize(&x, mode);
            assert_eq!(m.rows() * m.cols(), 24);
            assert_eq!(m.rows(), x.dim(mode));
            assert!(m.as_slice().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn fold_inverts_matricize() {
        let x = Tensor3::from_fn([2, 3, 4], |i, j, k| (i * 100 + j * 10 + k) as f64);
        for mode in Mode::ALL {
            assert_eq!(fold(&matricize(&x, mode), mode, x.dims()).unwrap(), x);
        }
    }

    #[test]
    fn mode_product_sums_slices() {
        let a = Matrix::from_rows(&[[1., 1.]]);
        let y = mode_product(&counting(), Mode::One, &a).unwrap();
        assert_eq!(y.dims(), [1, 2, 2]);
        assert_eq!(y.as_slice(), &[4., 6., 8., 10.]);
    }

    #[test]
    fn mode_product_identity_is_bit_exact() {
        let x = Tensor3::from_fn([3, 2, 4], |i, j, k| ((i * 7 + j * 3 + k) as f64).sin());
        for mode in Mode::ALL {
            let id = Matrix::identity(x.dim(mode));
            assert_eq!(mode_product(&x, mode, &id).unwrap().as_slice(), x.as_slice());
        }
    }

    #[test]
    fn mode_product_zero_tensor() {
        let x = Tensor3::zeros([2, 3, 2]);
        let a = Matrix::from_fn(5, 3, |i, j| (i + j) as f64);
        let y = mode_product(&x, Mode::Two, &a).unwrap();
        assert_eq!(y.dims(), [2, 5, 2]);
        assert!(y.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mode_product_rejects_bad_shape() {
        let a = Matrix::zeros(2, 3);
        let err = mode_product(&counting(), Mode::Two, &a).unwrap_err();
        assert!(err.to_string().contains("mode-2"), "{err}");
    }

    #[test]
    fn mode_product_matches_matricized_form() {
        let x = Tensor3::from_fn([3, 4, 2], |i, j, k| ((i + 2 * j + 5 * k) as f64).cos());
        for mode in Mode::ALL {
            let a = Matrix::from_fn(3, x.dim(mode), |i, j| (i as f64 - j as f64) * 0.5);
            let y = mode_product(&x, mode, &a).unwrap();
            let lhs = matricize(&y, mode);
            let rhs = a.matmul(&matricize(&x, mode)).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
            let yt = mode_product_t(&x, mode, &a.transpose()).unwrap();
            assert!(yt.max_abs_diff(&y) < 1e-12);
        }
    }

    #[test]
    fn kronecker_examples() {
        let id = Matrix::identity(2);
        assert_eq!(kronecker(&id, &id), Matrix::identity(4));
        let k = kronecker(&Matrix::from_rows(&[[2.]]), &Matrix::from_rows(&[[3., 4.]]));
        assert_eq!(k, Matrix::from_rows(&[[6., 8.]]));
        let a = Matrix::from_rows(&[[1., 2.], [3., 4.]]);
        let b = Matrix::from_rows(&[[0., 1.], [1., 0.]]);
        let expected = Matrix::from_rows(&[
            [0., 1., 0., 2.],
            [1., 0., 2., 0.],
            [0., 3., 0., 4.],
            [3., 0., 4., 0.],
        ]);
        assert_eq!(kronecker(&a, &b), expected);
    }

    #[test]
    fn tucker_rank_one_indicator() {
        let s = Tensor3::new([1, 1, 1], vec![1.0]).unwrap();
        let e1 = Matrix::from_rows(&[[1.], [0.]]);
        let x = tucker_compose(&s, &e1, &e1, &e1).unwrap();
        assert_eq!(x.dims(), [2, 2, 2]);
        assert_eq!(x.get(0, 0, 0), 1.0);
        assert_eq!(x.frobenius_norm(), 1.0);
    }

    #[test]
    fn tucker_identity_factors() {
        let s = counting();
        let id = Matrix::identity(2);
        assert_eq!(tucker_compose(&s, &id, &id, &id).unwrap(), s);
    }

    #[test]
    fn tucker_rejects_mismatch() {
        let s = counting();
        let bad = Matrix::zeros(3, 3);
        assert!(tucker_compose(&s, &bad, &bad, &bad).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_norm(&Tensor3::zeros([2, 2, 2])), 0.0);
        let mut data = vec![0.0; 8];
        data[5] = 3.0;
        assert_eq!(frobenius_norm(&Tensor3::new([2, 2, 2], data).unwrap()), 3.0);
        let ones = Tensor3::from_fn([2, 2, 2], |_, _, _| 1.0);
        assert!((frobenius_norm(&ones) - 2.8284271).abs() < 1e-7);
    }

    #[test]
    fn subtensor_examples() {
        let x = counting();
        assert_eq!(subtensor(&x, [0..2, 0..2, 0..2]).unwrap(), x);
        let s = subtensor(&x, [0..1, 0..2, 0..2]).unwrap();
        assert_eq!(s.as_slice(), &[0., 1., 2., 3.]);
        let s = subtensor(&x, [1..2, 1..2, 1..2]).unwrap();
        assert_eq!(s.as_slice(), &[7.]);
        assert!(subtensor(&x, [0..3, 0..2, 0..2]).is_err());
        assert!(subtensor(&x, [1..1, 0..2, 0..2]).is_err());
    }

    #[test]
    fn construction_checks() {
        assert!(Tensor3::new([2, 2, 2], vec![0.0; 7]).is_err());
        assert!(Tensor3::new([1, 1, 1], vec![f64::NAN]).is_err());
        assert!(Tensor3::new([0, 1, 1], vec![]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
        assert!(Mode::from_number(4).is_err());
    }
}
