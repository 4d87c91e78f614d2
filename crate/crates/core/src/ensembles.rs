//! Random instance generation for the simulation studies.

use std::fmt;

use crate::error::{contract, Error, Result};
use crate::hooi::{gaussian_matrix, TuckerFactors};
use crate::linalg::{qr_positive, signal_strength, OrthonormalBasis};
use crate::rng::{Role, RngStream, Sampler};
use crate::tensor::{Tensor3, Mode};

/// Distribution of the i.i.d. noise entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    /// Unif[-√3, √3]: mean 0, variance 1.
    Uniform,
}

impl NoiseKind {
    pub fn standard_gaussian() -> Self {
        NoiseKind::Gaussian { sigma: 1.0 }
    }

    /// Short label used in cell names.
    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::Gaussian { .. } => "gaussian",
            NoiseKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreKind {
    /// Gaussian core rescaled so its smallest relevant singular value is λ.
    RescaledGaussian,
    /// λ on the superdiagonal, zero elsewhere; needs equal ranks.
    Diagonal,
}

/// A full simulated problem `Y = X + Z` with its ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub y: Tensor3,
    pub x: Tensor3,
    pub truth: TuckerFactors,
    pub lambda_actual: f64,
    pub noise: NoiseKind,
}

/// Q factor (nonnegative `R` diagonal) of a standard Gaussian `p x r` matrix.
pub fn haar_orthonormal(p: usize, r: usize, rng: &mut Sampler) -> Result<OrthonormalBasis> {
    if r == 0 || r > p {
        return contract(format!("Haar basis needs 1 <= r <= p, got p={p}, r={r}"));
    }
    let (q, _) = qr_positive(&gaussian_matrix(p, r, rng))?;
    OrthonormalBasis::new(q)
}

fn gaussian_tensor(dims: [usize; 3], rng: &mut Sampler) -> Tensor3 {
    Tensor3::from_fn(dims, |_, _, _| rng.standard_normal())
}

fn check_core_ranks(ranks: [usize; 3]) -> Result<()> {
    for k in 0..3 {
        let (a, b) = (ranks[(k + 1) % 3], ranks[(k + 2) % 3]);
        if ranks[k] == 0 || ranks[k] > a * b {
            return contract(format!("core ranks {ranks:?} cannot have full multilinear rank"));
        }
    }
    Ok(())
}

/// `S̃ · λ / min_k σ_{r_k}(M_k(S̃))` for an i.i.d. Gaussian `S̃`.
pub fn rescaled_core(ranks: [usize; 3], lambda: f64, rng: &mut Sampler) -> Result<Tensor3> {
    check_core_ranks(ranks)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return contract(format!("target signal strength must be positive, got {lambda}"));
    }
    for _ in 0..2 {
        let raw = gaussian_tensor(ranks, rng);
        let s = signal_strength(&raw, ranks)?;
        if s > 0.0 && s.is_finite() {
            return Ok(raw.scaled(lambda / s));
        }
    }
    Err(Error::Numerical("Gaussian core was rank deficient twice".into()))
}

/// `r x r x r` tensor with `strength` on the superdiagonal.
pub fn diagonal_core(r: usize, strength: f64) -> Result<Tensor3> {
    if r == 0 {
        return contract("diagonal core needs r >= 1");
    }
    if !(strength > 0.0 && strength.is_finite()) {
        return contract(format!("diagonal strength must be positive, got {strength}"));
    }
    Ok(Tensor3::from_fn([r, r, r], |i, j, k| if i == j && j == k { strength } else { 0.0 }))
}

/// Adds i.i.d. noise of the given law onto `base` in place of allocating `Z`.
fn add_noise(base: Tensor3, kind: NoiseKind, rng: &mut Sampler) -> Result<Tensor3> {
    let dims = base.dims();
    let mut data = base.into_vec();
    match kind {
        NoiseKind::Gaussian { sigma } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return contract(format!("Gaussian noise needs sigma > 0, got {sigma}"));
            }
            for v in &mut data {
                *v += sigma * rng.standard_normal();
            }
        }
        NoiseKind::Uniform => {
            let half_width = 3f64.sqrt();
            for v in &mut data {
                *v += half_width * (2.0 * rng.uniform() - 1.0);
            }
        }
    }
    Tensor3::new(dims, data)
}

pub fn noise_tensor(dims: [usize; 3], kind: NoiseKind, rng: &mut Sampler) -> Result<Tensor3> {
    if dims.contains(&0) {
        return contract(format!("noise dims must be positive, got {dims:?}"));
    }
    add_noise(Tensor3::zeros(dims), kind, rng)
}

/// Everything needed to draw one [`Instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub dims: [usize; 3],
    pub ranks: [usize; 3],
    pub lambda: f64,
    pub core: CoreKind,
    pub noise: NoiseKind,
}

/// Draws factors, core and noise from the `Factors`, `Core` and `Noise`
/// sub-streams of `stream`.
pub fn make_instance(spec: &InstanceSpec, stream: RngStream) -> Result<Instance> {
    let InstanceSpec { dims, ranks, lambda, core, noise } = *spec;
    for mode in Mode::ALL {
        let k = mode.index();
        if ranks[k] == 0 || ranks[k] > dims[k] {
            return contract(format!("ranks {ranks:?} infeasible for dims {dims:?}"));
        }
    }
    let core = match core {
        CoreKind::RescaledGaussian => rescaled_core(ranks, lambda, &mut stream.role(Role::Core).sampler())?,
        CoreKind::Diagonal => {
            if ranks[0] != ranks[1] || ranks[1] != ranks[2] {
                return contract(format!("diagonal core needs equal ranks, got {ranks:?}"));
            }
            diagonal_core(ranks[0], lambda)?
        }
    };
    let mut frng = stream.role(Role::Factors).sampler();
    let bases = [
        haar_orthonormal(dims[0], ranks[0], &mut frng)?,
        haar_orthonormal(dims[1], ranks[1], &mut frng)?,
        haar_orthonormal(dims[2], ranks[2], &mut frng)?,
    ];
    // Orthonormal factors leave every matricization's singular values
    // unchanged, so the strength of X is read off the small core.
    let lambda_actual = signal_strength(&core, ranks)?;
    let truth = TuckerFactors::new(core, bases)?;
    let x = truth.compose();
    let y = add_noise(x.clone(), noise, &mut stream.role(Role::Noise).sampler())?;
    Ok(Instance { y, x, truth, lambda_actual, noise })
}
