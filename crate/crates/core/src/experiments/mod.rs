//! Monte Carlo harness for the simulation studies.
//!
//! Replication `rep` of a cell always draws from
//! `RngStream::replication(base_seed, cell.stream_key(), rep)`, and each
//! replication runs on a single thread, so output is identical for every
//! worker count. The core tensor is redrawn in every replication.

pub mod exec;
pub mod grid;
pub mod report;

pub use grid::{default_grid, parse_grid, Experiment, GridCell, StartKind};
pub use report::{aggregate, format_csv, format_summary, phase_dat, ResultRow, SummaryRow, CSV_HEADER};

use crate::ensembles::{make_instance, CoreKind, InstanceSpec, NoiseKind};
use crate::error::{contract, Result};
use crate::hooi::{hooi, hosvd_init, warm_start, HooiConfig, Init};
use crate::linalg::{sin_theta_norm, OrthonormalBasis};
use crate::planted_clique::{detect_half, direction_sines, recover_clique, sample_hypergraph, spectral_estimate_in, Half};
use crate::rng::{Role, RngStream};

pub const DEFAULT_REPS: usize = 100;

/// Schatten orders reported for the cubic study.
pub const SCHATTEN_ORDERS: [(f64, &str); 4] = [(1.0, "l1"), (2.0, "l2"), (5.0, "l5"), (f64::INFINITY, "linf")];

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub grid: Vec<GridCell>,
    pub reps: usize,
    pub base_seed: u64,
    pub workers: usize,
}

impl SimConfig {
    /// Reference grid for `experiment`, 100 replications, seed 0, one worker.
    pub fn new(experiment: Experiment) -> Self {
        SimConfig { experiment, grid: default_grid(experiment), reps: DEFAULT_REPS, base_seed: 0, workers: 1 }
    }

    pub fn with_grid(mut self, grid: Vec<GridCell>) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return contract("reps must be at least 1");
        }
        if self.grid.is_empty() {
            return contract("grid is empty");
        }
        if let Some(cell) = self.grid.iter().find(|c| !c.experiment_matches(self.experiment)) {
            return contract(format!("cell {} does not belong to {}", cell.name(), self.experiment));
        }
        Ok(())
    }
}

type Metrics = Vec<(String, f64)>;

fn run_with(config: &SimConfig, expected: Experiment, rep_fn: fn(&GridCell, RngStream) -> Result<Metrics>) -> Result<Vec<ResultRow>> {
    if config.experiment != expected {
        return contract(format!("config is for {}, not {expected}", config.experiment));
    }
    config.validate()?;
    let names: Vec<String> = config.grid.iter().map(GridCell::name).collect();
    let reps = config.reps;
    let chunks = exec::map_tasks(config.grid.len() * reps, config.workers, |task| {
        let (c, rep) = (task / reps, task % reps);
        let cell = &config.grid[c];
        let stream = RngStream::replication(config.base_seed, cell.stream_key(), rep as u64);
        let row = |metric: String, value: f64, note: Option<String>| ResultRow {
            experiment: expected,
            cell: names[c].clone(),
            rep,
            seed: stream.stream_id,
            metric,
            value,
            note,
        };
        match rep_fn(cell, stream) {
            Ok(metrics) => match metrics.iter().find(|(_, v)| !v.is_finite()) {
                None => metrics.into_iter().map(|(m, v)| row(m, v, None)).collect(),
                Some((m, v)) => vec![row(report::ERROR_METRIC.into(), 1.0, Some(format!("{m} = {v}")))],
            },
            Err(e) => vec![row(report::ERROR_METRIC.into(), 1.0, Some(e.to_string()))],
        }
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Dispatches on `config.experiment`.
pub fn run(config: &SimConfig) -> Result<Vec<ResultRow>> {
    match config.experiment {
        Experiment::Table1 => run_table1(config),
        Experiment::Table2 => run_table2(config),
        Experiment::Phase => run_phase(config),
        Experiment::CliqueCurve => run_clique_curve(config),
    }
}

/// Mean over modes of `‖sinΘ(Û_k, U_k)‖_q`.
pub fn mean_sin_theta(est: &[OrthonormalBasis; 3], truth: &[OrthonormalBasis; 3], q: f64) -> Result<f64> {
    let mut total = 0.0;
    for (u, v) in est.iter().zip(truth) {
        total += sin_theta_norm(u, v, q)?;
    }
    Ok(total / 3.0)
}

fn tucker_spec(cell: &GridCell) -> Result<InstanceSpec> {
    match *cell {
        GridCell::Tucker { dims, ranks, lambda } => Ok(InstanceSpec {
            dims,
            ranks,
            lambda,
            core: CoreKind::RescaledGaussian,
            noise: NoiseKind::standard_gaussian(),
        }),
        _ => contract(format!("cell {} is not a Tucker cell", cell.name())),
    }
}

fn table1_rep(cell: &GridCell, stream: RngStream) -> Result<Metrics> {
    let spec = tucker_spec(cell)?;
    let inst = make_instance(&spec, stream)?;
    let init = hosvd_init(&inst.y, spec.ranks)?;
    let fit = hooi(&inst.y, &HooiConfig::new(spec.ranks).with_init(Init::Provided(init.clone())))?;
    let truth = &inst.truth.bases;
    let mut out = Vec::with_capacity(8);
    for (q, label) in SCHATTEN_ORDERS {
        out.push((format!("{label}_hooi"), mean_sin_theta(fit.bases(), truth, q)?));
        out.push((format!("{label}_hosvd"), mean_sin_theta(&init, truth, q)?));
    }
    Ok(out)
}

fn table2_rep(cell: &GridCell, stream: RngStream) -> Result<Metrics> {
    let spec = tucker_spec(cell)?;
    let inst = make_instance(&spec, stream)?;
    let fit = hooi(&inst.y, &HooiConfig::new(spec.ranks))?;
    let mut out = Vec::with_capacity(8);
    for (k, (u, v)) in fit.bases().iter().zip(&inst.truth.bases).enumerate() {
        out.push((format!("linf_u{}", k + 1), sin_theta_norm(u, v, f64::INFINITY)?));
        out.push((format!("l2_u{}", k + 1), sin_theta_norm(u, v, 2.0)?));
    }
    let err = fit.reconstruction.minus(&inst.x).frobenius_norm();
    out.push(("frob_err".into(), err));
    out.push(("rel_err".into(), err / inst.x.frobenius_norm()));
    Ok(out)
}

fn phase_rep(cell: &GridCell, stream: RngStream) -> Result<Metrics> {
    let GridCell::Phase { p, r, alpha, noise, start } = *cell else {
        return contract(format!("cell {} is not a phase cell", cell.name()));
    };
    let spec = InstanceSpec {
        dims: [p; 3],
        ranks: [r; 3],
        lambda: (p as f64).powf(alpha),
        core: CoreKind::Diagonal,
        noise,
    };
    let inst = make_instance(&spec, stream)?;
    let truth = &inst.truth.bases;
    let init = match start {
        StartKind::Spectral => Init::Spectral,
        StartKind::Warm => {
            let mut rng = stream.role(Role::WarmStart).sampler();
            Init::Provided([warm_start(&truth[0], &mut rng)?, warm_start(&truth[1], &mut rng)?, warm_start(&truth[2], &mut rng)?])
        }
    };
    let fit = hooi(&inst.y, &HooiConfig::new(spec.ranks).with_init(init))?;
    Ok(vec![("linf".into(), mean_sin_theta(fit.bases(), truth, f64::INFINITY)?)])
}

fn clique_rep(cell: &GridCell, stream: RngStream) -> Result<Metrics> {
    let GridCell::Clique { n, kappa } = *cell else {
        return contract(format!("cell {} is not a clique cell", cell.name()));
    };
    let mut rng = stream.role(Role::Graph).sampler();
    let half = if rng.next_u64() & 1 == 0 { Half::First } else { Half::Second };
    let inst = sample_hypergraph(n, kappa, half, &mut rng)?;
    let detected = detect_half(&inst.adjacency, n, kappa)?;
    let est = spectral_estimate_in(&inst.adjacency, half)?;
    let found = recover_clique(&est, kappa);
    let hits = found.iter().filter(|v| inst.clique.binary_search(v).is_ok()).count();
    let sines = direction_sines(&est, &inst.clique);
    Ok(vec![
        ("accuracy".into(), if detected == half { 1.0 } else { 0.0 }),
        ("overlap".into(), hits as f64 / kappa as f64),
        ("sin_theta".into(), sines.iter().sum::<f64>() / 3.0),
    ])
}

/// Per replication: `l{1,2,5,inf}_{hooi,hosvd}`, the mean over modes of the
/// Schatten-q sin-Θ loss of the final and spectral estimates.
pub fn run_table1(config: &SimConfig) -> Result<Vec<ResultRow>> {
    run_with(config, Experiment::Table1, table1_rep)
}

/// Per replication: `linf_uk` and `l2_uk` for each mode, `frob_err` and
/// `rel_err` of the reconstruction.
pub fn run_table2(config: &SimConfig) -> Result<Vec<ResultRow>> {
    run_with(config, Experiment::Table2, table2_rep)
}

/// Per replication: `linf`, the mean over modes of the spectral sin-Θ loss.
pub fn run_phase(config: &SimConfig) -> Result<Vec<ResultRow>> {
    run_with(config, Experiment::Phase, phase_rep)
}

/// Per replication, with the clique planted in a uniformly chosen half:
/// `accuracy` of the half test, `overlap` of the recovered set with the
/// clique (as a fraction of κ), and `sin_theta`, the mean over blocks of the
/// angle between the spectral direction and the clique indicator.
pub fn run_clique_curve(config: &SimConfig) -> Result<Vec<ResultRow>> {
    run_with(config, Experiment::CliqueCurve, clique_rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(Experiment::Table1).with_reps(0).validate().is_err());
        assert!(SimConfig::new(Experiment::Table1).with_grid(vec![]).validate().is_err());
        let wrong = SimConfig::new(Experiment::Phase).with_grid(grid::table1_grid());
        assert!(wrong.validate().is_err());
        assert!(run_table1(&SimConfig::new(Experiment::Table2)).is_err());
    }

    #[test]
    fn infeasible_cells_become_error_rows() {
        let grid = vec![
            GridCell::Tucker { dims: [4, 4, 4], ranks: [5, 5, 5], lambda: 10.0 },
            GridCell::Tucker { dims: [6, 6, 6], ranks: [2, 2, 2], lambda: 10.0 },
        ];
        let rows = run_table1(&SimConfig::new(Experiment::Table1).with_grid(grid).with_reps(2)).unwrap();
        let errors: Vec<&ResultRow> = rows.iter().filter(|r| r.is_error()).collect();
        assert_eq!(errors.len(), 2);
        assert!(errors.iter().all(|r| r.note.is_some() && r.cell.starts_with("4x4x4")));
        assert_eq!(rows.len() - errors.len(), 2 * 8);
    }

    #[test]
    fn strong_signal_table1() {
        let grid = vec![GridCell::Tucker { dims: [12, 12, 12], ranks: [2, 2, 2], lambda: 1e6 }];
        let rows = run_table1(&SimConfig::new(Experiment::Table1).with_grid(grid).with_reps(1)).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.value < 1e-3), "{rows:?}");
    }

    #[test]
    fn rows_ordered_by_cell_then_rep() {
        let grid = vec![
            GridCell::Clique { n: 24, kappa: 6 },
            GridCell::Clique { n: 24, kappa: 12 },
        ];
        let rows = run_clique_curve(&SimConfig::new(Experiment::CliqueCurve).with_grid(grid).with_reps(3).with_workers(2)).unwrap();
        let keys: Vec<(String, usize)> = rows.iter().map(|r| (r.cell.clone(), r.rep)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by_key(|(c, r)| (c == "n24_k12", *r));
        assert_eq!(keys, sorted);
        assert_eq!(rows.len(), 2 * 3 * 3);
    }
}
