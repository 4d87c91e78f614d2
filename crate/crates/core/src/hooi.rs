//! Higher-order orthogonal iteration for low Tucker-rank tensor denoising.
//!
//! Given `Y = X + Z` with `X = S ×₁ U1 ×₂ U2 ×₃ U3`, [`hooi`] starts from
//! per-mode spectral estimates (or caller-provided bases), refines each basis
//! in turn against the projections through the other two, and finally
//! projects `Y` onto the estimated subspaces.

use crate::error::{contract, Result};
use crate::linalg::{mode_leading_subspace, orthonormal_complement, qr_positive, svd_leading, OrthonormalBasis};
use crate::rng::Sampler;
use crate::tensor::{matricize, mode_product_t, tucker_compose, Matrix, Mode, Tensor3};

/// Core tensor plus one orthonormal basis per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerFactors {
    pub core: Tensor3,
    pub bases: [OrthonormalBasis; 3],
}

impl TuckerFactors {
    pub fn new(core: Tensor3, bases: [OrthonormalBasis; 3]) -> Result<Self> {
        let ranks = bases.each_ref().map(|b| b.r());
        if core.dims() != ranks {
            return contract(format!(
                "core dims {:?} do not match basis ranks {ranks:?}",
                core.dims()
            ));
        }
        Ok(TuckerFactors { core, bases })
    }

    pub fn ranks(&self) -> [usize; 3] {
        self.core.dims()
    }

    pub fn compose(&self) -> Tensor3 {
        let [u1, u2, u3] = &self.bases;
        tucker_compose(&self.core, u1.matrix(), u2.matrix(), u3.matrix())
            .expect("bases conform to the core by construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// HOSVD: leading singular vectors of each matricization of `Y`.
    Spectral,
    Provided([OrthonormalBasis; 3]),
}

/// Stopping threshold on the increase of `‖Y ×₁ U1ᵀ ×₂ U2ᵀ ×₃ U3ᵀ‖_F`
/// between sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// Multiple of `‖Y‖_F`.
    Relative(f64),
}

impl Tolerance {
    fn resolve(self, y: &Tensor3) -> f64 {
        match self {
            Tolerance::Absolute(e) => e,
            Tolerance::Relative(e) => e * y.frobenius_norm(),
        }
    }

    fn value(self) -> f64 {
        match self {
            Tolerance::Absolute(e) | Tolerance::Relative(e) => e,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HooiConfig {
    pub ranks: [usize; 3],
    pub tolerance: Tolerance,
    pub max_iters: usize,
    pub init: Init,
}

impl HooiConfig {
    pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-6;
    pub const DEFAULT_MAX_ITERS: usize = 50;

    pub fn new(ranks: [usize; 3]) -> Self {
        HooiConfig {
            ranks,
            tolerance: Tolerance::Relative(Self::DEFAULT_RELATIVE_TOLERANCE),
            max_iters: Self::DEFAULT_MAX_ITERS,
            init: Init::Spectral,
        }
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn validate(&self, dims: [usize; 3]) -> Result<()> {
        check_ranks(dims, self.ranks)?;
        if self.max_iters == 0 {
            return contract("max_iters must be at least 1");
        }
        let eps = self.tolerance.value();
        if !(eps >= 0.0 && eps.is_finite()) {
            return contract(format!("tolerance must be finite and nonnegative, got {eps}"));
        }
        if let Init::Provided(bases) = &self.init {
            for (k, b) in bases.iter().enumerate() {
                if b.p() != dims[k] || b.r() != self.ranks[k] {
                    return contract(format!(
                        "provided basis {} is {}x{}, expected {}x{}",
                        k + 1,
                        b.p(),
                        b.r(),
                        dims[k],
                        self.ranks[k]
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `1 <= r_k <= p_k` and `r_k <= r_{k+1} r_{k+2}`, so every update has a
/// well-defined rank-`r_k` leading subspace.
fn check_ranks(dims: [usize; 3], ranks: [usize; 3]) -> Result<()> {
    for k in 0..3 {
        let (a, b) = (ranks[(k + 1) % 3], ranks[(k + 2) % 3]);
        if ranks[k] == 0 || ranks[k] > dims[k] || ranks[k] > a * b {
            return contract(format!("ranks {ranks:?} infeasible for dims {dims:?}"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ToleranceMet,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct HooiResult {
    pub factors: TuckerFactors,
    pub reconstruction: Tensor3,
    /// `‖Y ×₁ Û1ᵀ ×₂ Û2ᵀ ×₃ Û3ᵀ‖_F` after initialization (entry 0) and after
    /// every sweep.
    pub objective_trace: Vec<f64>,
    pub iters_run: usize,
    pub stop_reason: StopReason,
}

impl HooiResult {
    pub fn bases(&self) -> &[OrthonormalBasis; 3] {
        &self.factors.bases
    }
}

/// Spectral initialization: `SVD_{r_k}(M_k(Y))` for each mode.
pub fn hosvd_init(y: &Tensor3, ranks: [usize; 3]) -> Result<[OrthonormalBasis; 3]> {
    for mode in Mode::ALL {
        let (r, p) = (ranks[mode.index()], y.dim(mode));
        let cols = y.len() / p;
        if r == 0 || r > p.min(cols) {
            return contract(format!("rank {r} infeasible for mode {mode} of {:?}", y.dims()));
        }
    }
    Ok([
        mode_leading_subspace(y, Mode::One, ranks[0])?,
        mode_leading_subspace(y, Mode::Two, ranks[1])?,
        mode_leading_subspace(y, Mode::Three, ranks[2])?,
    ])
}

fn conform(y: &Tensor3, bases: [&OrthonormalBasis; 3]) -> Result<()> {
    for (k, b) in bases.iter().enumerate() {
        if b.p() != y.dims()[k] {
            return contract(format!(
                "basis {} has {} rows, tensor mode has length {}",
                k + 1,
                b.p(),
                y.dims()[k]
            ));
        }
    }
    Ok(())
}

fn project_core(y: &Tensor3, u1: &Matrix, u2: &Matrix, u3: &Matrix) -> Tensor3 {
    let t = mode_product_t(y, Mode::One, u1).expect("conformity checked");
    let t = mode_product_t(&t, Mode::Two, u2).expect("conformity checked");
    mode_product_t(&t, Mode::Three, u3).expect("conformity checked")
}

/// `‖Y ×₁ V1ᵀ ×₂ V2ᵀ ×₃ V3ᵀ‖²_F`, the quantity the maximum-likelihood
/// estimator maximizes over orthonormal bases.
pub fn objective(
    y: &Tensor3,
    v1: &OrthonormalBasis,
    v2: &OrthonormalBasis,
    v3: &OrthonormalBasis,
) -> Result<f64> {
    conform(y, [v1, v2, v3])?;
    let n = project_core(y, v1.matrix(), v2.matrix(), v3.matrix()).frobenius_norm();
    Ok(n * n)
}

/// Returns `(Ŝ, X̂)` with `Ŝ = Y ×₁ U1ᵀ ×₂ U2ᵀ ×₃ U3ᵀ` and
/// `X̂ = Ŝ ×₁ U1 ×₂ U2 ×₃ U3`.
pub fn project_estimate(
    y: &Tensor3,
    u1: &OrthonormalBasis,
    u2: &OrthonormalBasis,
    u3: &OrthonormalBasis,
) -> Result<(Tensor3, Tensor3)> {
    conform(y, [u1, u2, u3])?;
    let core = project_core(y, u1.matrix(), u2.matrix(), u3.matrix());
    let xhat = tucker_compose(&core, u1.matrix(), u2.matrix(), u3.matrix())?;
    Ok((core, xhat))
}

pub fn hooi(y: &Tensor3, config: &HooiConfig) -> Result<HooiResult> {
    config.validate(y.dims())?;
    let [r1, r2, r3] = config.ranks;
    let eps = config.tolerance.resolve(y);

    let [mut u1, mut u2, mut u3] = match &config.init {
        Init::Spectral => hosvd_init(y, config.ranks)?,
        Init::Provided(b) => b.clone(),
    };

    let mut core = project_core(y, u1.matrix(), u2.matrix(), u3.matrix());
    let mut trace = vec![core.frobenius_norm()];
    let mut stop_reason = StopReason::MaxIters;
    let mut iters_run = 0;

    for _ in 0..config.max_iters {
        iters_run += 1;
        // Y ×₃ U3ᵀ is shared by the mode-1 and mode-2 updates, both of which
        // use the previous U3.
        let t3 = mode_product_t(y, Mode::Three, u3.matrix())?;
        let w1 = mode_product_t(&t3, Mode::Two, u2.matrix())?;
        u1 = svd_leading(&matricize(&w1, Mode::One), r1)?;

        let w2 = mode_product_t(&t3, Mode::One, u1.matrix())?;
        u2 = svd_leading(&matricize(&w2, Mode::Two), r2)?;

        let t1 = mode_product_t(y, Mode::One, u1.matrix())?;
        let w3 = mode_product_t(&t1, Mode::Two, u2.matrix())?;
        u3 = svd_leading(&matricize(&w3, Mode::Three), r3)?;

        core = mode_product_t(&w3, Mode::Three, u3.matrix())?;
        let value = core.frobenius_norm();
        let increment = value - trace.last().copied().unwrap_or(0.0);
        trace.push(value);
        // A negative increment can only be roundoff; it counts as converged.
        if increment <= eps {
            stop_reason = StopReason::ToleranceMet;
            break;
        }
    }

    let reconstruction = tucker_compose(&core, u1.matrix(), u2.matrix(), u3.matrix())?;
    Ok(HooiResult {
        factors: TuckerFactors { core, bases: [u1, u2, u3] },
        reconstruction,
        objective_trace: trace,
        iters_run,
        stop_reason,
    })
}

/// Standard Gaussian `rows x cols` matrix.
pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Sampler) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.standard_normal())
}

/// Oracle warm start `(U + U⊥·O) / √2` with `O` Haar on `O(p-r, r)`; every
/// principal angle to `U` is exactly 45 degrees.
pub fn warm_start(u: &OrthonormalBasis, rng: &mut Sampler) -> Result<OrthonormalBasis> {
    let (p, r) = (u.p(), u.r());
    if r > p - r {
        return contract(format!("warm start needs r <= p - r, got p={p}, r={r}"));
    }
    let perp = orthonormal_complement(u)?;
    let (rot, _) = qr_positive(&gaussian_matrix(p - r, r, rng))?;
    let other = perp.matrix().matmul(&rot)?;
    let mixed = u.matrix().plus(&other).scaled(std::f64::consts::FRAC_1_SQRT_2);
    OrthonormalBasis::new(mixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{principal_angles, sin_theta_norm};
    use crate::rng::RngStream;

    fn random_basis(p: usize, r: usize, seed: u64) -> OrthonormalBasis {
        let mut rng = RngStream::new(seed, 0).sampler();
        let (q, _) = qr_positive(&gaussian_matrix(p, r, &mut rng)).unwrap();
        OrthonormalBasis::new(q).unwrap()
    }

    fn random_tensor(dims: [usize; 3], seed: u64) -> Tensor3 {
        let mut rng = RngStream::new(seed, 1).sampler();
        Tensor3::from_fn(dims, |_, _, _| rng.standard_normal())
    }

    fn low_rank(dims: [usize; 3], ranks: [usize; 3], seed: u64) -> (Tensor3, [OrthonormalBasis; 3]) {
        let core = random_tensor(ranks, seed).scaled(10.0);
        let bases = [0, 1, 2].map(|k| random_basis(dims[k], ranks[k], seed * 7 + k as u64));
        let x = TuckerFactors::new(core, bases.clone()).unwrap().compose();
        (x, bases)
    }

    #[test]
    fn hosvd_exact_without_noise() {
        let (x, truth) = low_rank([6, 7, 8], [1, 1, 1], 3);
        let init = hosvd_init(&x, [1, 1, 1]).unwrap();
        for k in 0..3 {
            assert!(sin_theta_norm(&init[k], &truth[k], f64::INFINITY).unwrap() < 1e-10);
        }
    }

    #[test]
    fn hosvd_on_pure_noise_is_well_posed() {
        let z = random_tensor([10, 10, 10], 5);
        let init = hosvd_init(&z, [1, 1, 1]).unwrap();
        for b in &init {
            assert!(OrthonormalBasis::new(b.matrix().clone()).is_ok());
        }
        assert!(hosvd_init(&z, [11, 1, 1]).is_err());
    }

    #[test]
    fn hooi_fixed_point_without_noise() {
        let (x, truth) = low_rank([9, 11, 10], [2, 3, 2], 4);
        let res = hooi(&x, &HooiConfig::new([2, 3, 2])).unwrap();
        let rel = res.reconstruction.minus(&x).frobenius_norm() / x.frobenius_norm();
        assert!(rel < 1e-8, "{rel}");
        for (est, want) in res.bases().iter().zip(&truth) {
            assert!(sin_theta_norm(est, want, 2.0).unwrap() < 1e-8);
        }
        assert!(res.iters_run <= 2);
        assert_eq!(res.stop_reason, StopReason::ToleranceMet);
    }

    #[test]
    fn hooi_trace_monotone_and_stop_rule() {
        let (x, _) = low_rank([12, 10, 8], [2, 2, 2], 9);
        let y = x.plus(&random_tensor([12, 10, 8], 10).scaled(2.0));
        let cfg = HooiConfig::new([2, 2, 2]).with_tolerance(Tolerance::Absolute(1e-12));
        let res = hooi(&y, &cfg).unwrap();
        for w in res.objective_trace.windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-9));
        }
        assert_eq!(res.objective_trace.len(), res.iters_run + 1);
        if res.stop_reason == StopReason::ToleranceMet {
            let n = res.objective_trace.len();
            assert!(res.objective_trace[n - 1] - res.objective_trace[n - 2] <= 1e-12);
        }
        assert!(res.reconstruction.frobenius_norm() <= y.frobenius_norm());
    }

    #[test]
    fn hooi_max_iters_respected() {
        let y = random_tensor([8, 8, 8], 2);
        let cfg = HooiConfig::new([2, 2, 2]).with_tolerance(Tolerance::Absolute(0.0)).with_max_iters(3);
        let res = hooi(&y, &cfg).unwrap();
        assert!(res.iters_run <= 3);
    }

    #[test]
    fn hooi_rejects_bad_configs() {
        let y = random_tensor([4, 4, 4], 2);
        assert!(hooi(&y, &HooiConfig::new([5, 1, 1])).is_err());
        assert!(hooi(&y, &HooiConfig::new([3, 1, 1])).is_err());
        assert!(hooi(&y, &HooiConfig::new([1, 1, 1]).with_max_iters(0)).is_err());
        assert!(hooi(&y, &HooiConfig::new([1, 1, 1]).with_tolerance(Tolerance::Absolute(-1.0))).is_err());
        let wrong = [random_basis(5, 1, 1), random_basis(4, 1, 2), random_basis(4, 1, 3)];
        assert!(hooi(&y, &HooiConfig::new([1, 1, 1]).with_init(Init::Provided(wrong))).is_err());
    }

    #[test]
    fn objective_examples() {
        let (x, truth) = low_rank([5, 6, 7], [2, 2, 2], 1);
        let obj = objective(&x, &truth[0], &truth[1], &truth[2]).unwrap();
        let nx = x.frobenius_norm();
        assert!((obj - nx * nx).abs() < 1e-9 * nx * nx);
        let comps = [0, 1, 2].map(|k| orthonormal_complement(&truth[k]).unwrap());
        let zero = objective(&x, &comps[0], &comps[1], &comps[2]).unwrap();
        assert!(zero < 1e-20 * nx * nx);
        let y = random_tensor([3, 3, 3], 8);
        let full = [0, 1, 2].map(|k| random_basis(3, 3, 20 + k));
        let ny = y.frobenius_norm();
        assert!((objective(&y, &full[0], &full[1], &full[2]).unwrap() - ny * ny).abs() < 1e-10);
    }

    #[test]
    fn project_estimate_examples() {
        let (x, truth) = low_rank([5, 6, 7], [2, 2, 2], 6);
        let (_, xhat) = project_estimate(&x, &truth[0], &truth[1], &truth[2]).unwrap();
        assert!(xhat.max_abs_diff(&x) < 1e-12);

        let y = random_tensor([3, 4, 2], 3);
        let id = [3, 4, 2].map(|p| OrthonormalBasis::new(Matrix::identity(p)).unwrap());
        let (_, same) = project_estimate(&y, &id[0], &id[1], &id[2]).unwrap();
        assert_eq!(same, y);

        let bases = [0, 1, 2].map(|k| random_basis([3, 4, 2][k], 1, 40 + k as u64));
        let (core, xhat) = project_estimate(&y, &bases[0], &bases[1], &bases[2]).unwrap();
        let again = tucker_compose(&core, bases[0].matrix(), bases[1].matrix(), bases[2].matrix()).unwrap();
        assert!(again.max_abs_diff(&xhat) < 1e-12);
        let (_, twice) = project_estimate(&xhat, &bases[0], &bases[1], &bases[2]).unwrap();
        assert!(twice.max_abs_diff(&xhat) < 1e-12);
        assert!(xhat.frobenius_norm() <= y.frobenius_norm());
    }

    #[test]
    fn warm_start_angles() {
        let u = random_basis(10, 2, 77);
        let mut rng = RngStream::new(1, 2).sampler();
        let w = warm_start(&u, &mut rng).unwrap();
        let s = sin_theta_norm(&w, &u, f64::INFINITY).unwrap();
        assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        for c in principal_angles(&w, &u).unwrap().cosines() {
            assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        }
    }

    #[test]
    fn warm_start_in_the_plane() {
        let e1 = OrthonormalBasis::coordinate(2, &[0]).unwrap();
        let w = warm_start(&e1, &mut RngStream::new(5, 5).sampler()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w.matrix().get(0, 0).abs() - h).abs() < 1e-12);
        assert!((w.matrix().get(1, 0).abs() - h).abs() < 1e-12);
    }

    #[test]
    fn warm_start_deterministic_and_checked() {
        let u = random_basis(8, 3, 12);
        let a = warm_start(&u, &mut RngStream::new(9, 9).sampler()).unwrap();
        let b = warm_start(&u, &mut RngStream::new(9, 9).sampler()).unwrap();
        assert_eq!(a, b);
        let big = random_basis(5, 3, 1);
        assert!(warm_start(&big, &mut RngStream::new(0, 0).sampler()).is_err());
    }
}
