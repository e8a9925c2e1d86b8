//! The seven pipelines behind the subcommands.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use distorted_fourier::io;
use distorted_fourier::oracle::discretize;
use distorted_fourier::transform::{intertwining_defect, plancherel_defect, roundtrip_defect, x_norm};
use distorted_fourier::{
    apply_spectral, apply_via_transform, assemble_kernel, build_eigenbasis, find_bound_states,
    forward, BoundStates, EigenBasis, SpectralError,
};
use num_complex::Complex64;

use crate::config::{ConfigError, RunConfig};
use crate::report::{Check, Counts, Defects, Report};

/// Floor below which oracle eigenvalues count as zero when comparing counts.
const ORACLE_COUNT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Eigenfunctions,
    Scattering,
    Boundstates,
    Transform,
    Kernel,
    Apply,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigenfunctions => "eigenfunctions",
            Command::Scattering => "scattering",
            Command::Boundstates => "boundstates",
            Command::Transform => "transform",
            Command::Kernel => "kernel",
            Command::Apply => "apply",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Precondition(#[from] SpectralError),
    #[error("{0}")]
    Output(String),
}

impl RunError {
    /// 2 for configuration problems, 3 for precondition or numerical-health failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Precondition(_) | RunError::Output(_) => 3,
        }
    }
}

/// Tolerances checked by `validate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub plancherel: f64,
    pub roundtrip: f64,
    pub intertwining: f64,
    pub kernel_vs_oracle: f64,
    pub route_equivalence: f64,
    pub unitarity: f64,
}

impl Tolerances {
    pub fn for_config(cfg: &RunConfig) -> Self {
        if cfg.potential.is_zero() {
            // The oracle comparison is limited by the box discretization, not by V.
            Self {
                plancherel: 1e-6,
                roundtrip: 1e-6,
                intertwining: 1e-6,
                kernel_vs_oracle: 1e-2,
                route_equivalence: 1e-8,
                unitarity: 1e-6,
            }
        } else {
            Self {
                plancherel: 1e-3,
                roundtrip: 1e-2,
                intertwining: 1e-3,
                kernel_vs_oracle: 1e-2,
                route_equivalence: 1e-8,
                unitarity: 1e-6,
            }
        }
    }
}

/// Outcome of a run: the report written to `report.json` and the files produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.passed.unwrap_or(true)
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>, RunError> {
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| RunError::Output(format!("{}: {e}", path.display())))?;
        self.files.push(path);
        Ok(BufWriter::new(file))
    }

    fn basis(&self) -> Result<EigenBasis, RunError> {
        Ok(build_eigenbasis(&self.cfg.potential, &self.cfg.grid, self.cfg.xi_max, self.cfg.n_xi)?)
    }

    fn states(&self) -> Result<BoundStates, RunError> {
        Ok(find_bound_states(&self.cfg.potential, &self.cfg.grid)?)
    }
}

fn max_unitarity(basis: &EigenBasis) -> f64 {
    basis
        .active_columns()
        .map(|j| basis.scattering[j].unitarity_defect())
        .fold(0.0, f64::max)
}

fn rel_diff(cfg: &RunConfig, a: &[Complex64], b: &[Complex64], f: &[Complex64]) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let nf = x_norm(&cfg.grid, f);
    if nf == 0.0 {
        0.0
    } else {
        x_norm(&cfg.grid, &d) / nf
    }
}

/// Runs one subcommand, writing its artifacts and `report.json` into `out`.
pub fn run(command: Command, cfg: &RunConfig, out: &Path) -> Result<Outcome, RunError> {
    std::fs::create_dir_all(out).map_err(|e| RunError::Output(format!("{}: {e}", out.display())))?;
    let mut ctx = Ctx {
        cfg,
        out,
        files: Vec::new(),
    };
    let mut defects = Defects::default();
    let mut counts = Counts::default();
    let mut checks = Vec::new();

    match command {
        Command::Eigenfunctions => {
            let basis = ctx.basis()?;
            io::write_eigenbasis_csv(ctx.create("eigenfunctions.csv")?, &basis)?;
            defects.unitarity = Some(max_unitarity(&basis));
            counts.masked_xi = Some(basis.masked_count());
        }
        Command::Scattering => {
            let basis = ctx.basis()?;
            io::write_scattering_csv(ctx.create("scattering.csv")?, &basis)?;
            defects.unitarity = Some(max_unitarity(&basis));
            counts.masked_xi = Some(basis.masked_count());
        }
        Command::Boundstates => {
            let states = ctx.states()?;
            io::write_bound_states_csv(ctx.create("bound_states.csv")?, &states)?;
            counts.bound_states = Some(states.len());
        }
        Command::Transform => {
            let basis = ctx.basis()?;
            let states = ctx.states()?;
            let f = cfg.sample_function()?;
            io::write_transform_csv(ctx.create("transform.csv")?, &forward(&f, &basis)?)?;
            defects.plancherel = Some(plancherel_defect(&f, &basis, &states)?);
            let (d1, d2) = roundtrip_defect(&basis, &states, &f)?;
            defects.roundtrip_ffstar = Some(d1);
            defects.roundtrip_fstarf = Some(d2);
            defects.intertwining = Some(intertwining_defect(&f, &basis)?);
            counts.bound_states = Some(states.len());
            counts.masked_xi = Some(basis.masked_count());
        }
        Command::Kernel => {
            let basis = ctx.basis()?;
            let states = ctx.states()?;
            let k = assemble_kernel(&basis, &states, &cfg.multiplier)?;
            io::write_kernel_csv(ctx.create("kernel.csv")?, &k)?;
            io::write_kernel_binary(ctx.create("kernel.bin")?, &k)?;
            counts.bound_states = Some(states.len());
            counts.masked_xi = Some(basis.masked_count());
        }
        Command::Apply => {
            let basis = ctx.basis()?;
            let states = ctx.states()?;
            let f = cfg.sample_function()?;
            let k = assemble_kernel(&basis, &states, &cfg.multiplier)?;
            let applied = apply_spectral(&k, &f)?;
            io::write_function_csv(ctx.create("applied.csv")?, &cfg.grid, &applied)?;
            let routed = apply_via_transform(&basis, &states, &cfg.multiplier, &f)?;
            let hd = discretize(&cfg.potential, &cfg.grid)?;
            let oracle = hd.functional_calculus(&cfg.multiplier, &f)?;
            defects.route_equivalence = Some(rel_diff(cfg, &applied, &routed, &f));
            defects.kernel_vs_oracle = Some(rel_diff(cfg, &applied, &oracle, &f));
            counts.bound_states = Some(states.len());
            counts.masked_xi = Some(basis.masked_count());
        }
        Command::Validate => {
            let tol = Tolerances::for_config(cfg);
            let basis = ctx.basis()?;
            let states = ctx.states()?;
            let f = cfg.sample_function()?;
            let hd = discretize(&cfg.potential, &cfg.grid)?;
            io::write_spectrum_csv(ctx.create("spectrum.csv")?, &hd)?;

            let plancherel = plancherel_defect(&f, &basis, &states)?;
            let (d1, d2) = roundtrip_defect(&basis, &states, &f)?;
            let intertwining = intertwining_defect(&f, &basis)?;
            let k = assemble_kernel(&basis, &states, &cfg.multiplier)?;
            let applied = apply_spectral(&k, &f)?;
            let routed = apply_via_transform(&basis, &states, &cfg.multiplier, &f)?;
            let oracle = hd.functional_calculus(&cfg.multiplier, &f)?;
            let kernel_vs_oracle = rel_diff(cfg, &applied, &oracle, &f);
            let route = rel_diff(cfg, &applied, &routed, &f);
            let unitarity = max_unitarity(&basis);

            defects = Defects {
                plancherel: Some(plancherel),
                roundtrip_ffstar: Some(d1),
                roundtrip_fstarf: Some(d2),
                intertwining: Some(intertwining),
                kernel_vs_oracle: Some(kernel_vs_oracle),
                route_equivalence: Some(route),
                unitarity: Some(unitarity),
            };
            let oracle_count = hd.negative_count(ORACLE_COUNT_FLOOR);
            counts = Counts {
                bound_states: Some(states.len()),
                oracle_bound_states: Some(oracle_count),
                masked_xi: Some(basis.masked_count()),
            };
            let check = |name: &str, value: f64, tolerance: f64| Check {
                name: name.to_string(),
                value,
                tolerance,
                passed: value < tolerance,
            };
            checks = vec![
                check("plancherel", plancherel, tol.plancherel),
                check("roundtrip_ffstar", d1, tol.roundtrip),
                check("roundtrip_fstarf", d2, tol.roundtrip),
                check("intertwining", intertwining, tol.intertwining),
                check("kernel_vs_oracle", kernel_vs_oracle, tol.kernel_vs_oracle),
                check("route_equivalence", route, tol.route_equivalence),
                check("unitarity", unitarity, tol.unitarity),
                Check {
                    name: "bound_state_count".into(),
                    value: states.len() as f64,
                    tolerance: oracle_count as f64,
                    passed: states.len() == oracle_count,
                },
            ];
        }
    }

    let passed = (command == Command::Validate).then(|| checks.iter().all(|c| c.passed));
    let report = Report {
        command: command.name().to_string(),
        potential: cfg.potential.to_string(),
        multiplier: format!("{}[{},{}]", cfg.multiplier.kind_name(), cfg.multiplier.center, cfg.multiplier.radius),
        grid: [cfg.grid.x_min(), cfg.grid.x_max(), cfg.grid.len() as f64],
        xi: [cfg.xi_max, cfg.n_xi as f64],
        defects,
        counts,
        checks,
        passed,
    };
    let path = out.join("report.json");
    report
        .write(&path)
        .map_err(|e| RunError::Output(format!("{}: {e}", path.display())))?;
    ctx.files.push(path);
    Ok(Outcome {
        report,
        files: ctx.files,
    })
}
