//! The four experiment subcommands. Each renders a complete CSV document.

use std::fmt::Write as _;

use crate::diagnostics::{
    convergence_sweep, dissipation_rate_series, dissipation_slope, method_structure_report,
};
use crate::error::{Error, Result};
use crate::integrators::{integrate_partial, steps_for, Trajectory};
use crate::reference::{
    stride_for, HarmonicAnalytic, NumericalReference, Reference, REFERENCE_STEP,
};
use crate::system::Potential;

use super::config::{ExperimentConfig, PotentialKind, Stepping, Subcommand};
use super::format::{fmt_f64, fmt_opt};

/// Number of trajectory states probed by `structure`.
pub const STRUCTURE_SAMPLES: usize = 100;

/// Rendered CSV plus the number of diagnostic error rows it contains.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub error_rows: usize,
}

impl CommandOutput {
    pub fn success(&self) -> bool {
        self.error_rows == 0
    }
}

struct Csv {
    text: String,
    error_rows: usize,
}

impl Csv {
    fn new(config: &ExperimentConfig) -> Self {
        let mut text = String::new();
        writeln!(text, "# generic-integrate {}", config.command).unwrap();
        writeln!(text, "# config: {}", config.to_line()).unwrap();
        Csv {
            text,
            error_rows: 0,
        }
    }

    fn comment(&mut self, line: impl AsRef<str>) {
        writeln!(self.text, "# {}", line.as_ref()).unwrap();
    }

    fn error(&mut self, line: impl AsRef<str>) {
        self.error_rows += 1;
        writeln!(self.text, "# error: {}", line.as_ref()).unwrap();
    }

    fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for c in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(c.as_ref());
        }
        self.text.push('\n');
    }

    fn finish(self) -> CommandOutput {
        CommandOutput {
            csv: self.text,
            error_rows: self.error_rows,
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<CommandOutput> {
    match config.command {
        Subcommand::Integrate => cmd_integrate(config),
        Subcommand::Sweep => cmd_sweep(config),
        Subcommand::Dissipation => cmd_dissipation(config),
        Subcommand::Structure => cmd_structure(config),
    }
}

fn require_single_h(config: &ExperimentConfig) -> Result<f64> {
    config
        .single_h()
        .ok_or_else(|| Error::InvalidParams(format!("{} needs a single stepsize", config.command)))
}

fn check_methods(config: &ExperimentConfig, pot: &dyn Potential) -> Result<()> {
    for m in &config.methods {
        if !m.supports(pot) {
            return Err(Error::NotApplicable {
                method: m.to_string(),
                reason: format!("no closed-form step for the {} potential", pot.name()),
            });
        }
    }
    Ok(())
}

/// Reference states on the grid of `h`, when one applies.
fn grid_reference(
    config: &ExperimentConfig,
    pot: &dyn Potential,
    h: f64,
    n: usize,
) -> Result<(Option<Trajectory>, String)> {
    match config.potential {
        PotentialKind::Harmonic => {
            match HarmonicAnalytic::new(config.params, config.k, config.initial) {
                Ok(a) => Ok((Some(a.trajectory(h, n)), "analytic".into())),
                Err(Error::Overdamped { .. }) => {
                    Ok((None, "none (overdamped, no closed form)".into()))
                }
                Err(e) => Err(e),
            }
        }
        PotentialKind::Cosine => {
            if stride_for(h, REFERENCE_STEP).is_err() {
                return Ok((
                    None,
                    format!("none (h is not a multiple of {})", fmt_f64(REFERENCE_STEP)),
                ));
            }
            let r = Reference::Numerical(NumericalReference::compute(
                pot,
                &config.params,
                config.initial,
                n as f64 * h,
            )?);
            Ok((
                Some(r.on_grid(h, n)?),
                format!("mybaby h={}", fmt_f64(REFERENCE_STEP)),
            ))
        }
    }
}

/// `t, q, p, S, E, Ẽ_h` along one trajectory, with absolute errors when a
/// reference exists.
pub fn cmd_integrate(config: &ExperimentConfig) -> Result<CommandOutput> {
    let h = require_single_h(config)?;
    let pot = config.build_potential();
    check_methods(config, pot.as_ref())?;
    let method = match config.methods.as_slice() {
        [m] => *m,
        _ => {
            return Err(Error::InvalidParams(
                "integrate takes exactly one method".into(),
            ))
        }
    };
    let n = steps_for(config.tsim, h);
    let (traj, status) =
        integrate_partial(&method, config.initial, h, n, &config.params, pot.as_ref());
    let (reference, label) = grid_reference(config, pot.as_ref(), h, n)?;

    let mut csv = Csv::new(config);
    csv.comment(format!("reference: {label}"));
    let mut header = vec!["t", "q", "p", "S", "E", "Etilde"];
    if reference.is_some() {
        header.extend(["absErrE", "absErrS"]);
    }
    csv.row(header);

    let energies = traj.energies(&config.params, pot.as_ref());
    let modified = traj.modified_energies(&config.params, pot.as_ref());
    let exact_energies = reference
        .as_ref()
        .map(|r| r.energies(&config.params, pot.as_ref()));
    for (i, x) in traj.states.iter().enumerate() {
        let mut cells = vec![
            fmt_f64(traj.time(i)),
            fmt_f64(x.q),
            fmt_f64(x.p),
            fmt_f64(x.s),
            fmt_f64(energies[i]),
            fmt_f64(modified[i]),
        ];
        if let (Some(r), Some(e)) = (&reference, &exact_energies) {
            cells.push(fmt_f64((energies[i] - e[i]).abs()));
            cells.push(fmt_f64((x.s - r.states[i].s).abs()));
        }
        csv.row(cells);
    }
    if let Err(e) = status {
        csv.error(format!("method={method} {e}"));
    }
    Ok(csv.finish())
}

/// The stepsizes actually swept. For the cosine problem each grid point is
/// rounded to a multiple of the reference step so the reference can be
/// subsampled rather than interpolated.
pub fn sweep_grid(config: &ExperimentConfig) -> Result<Vec<f64>> {
    let spec = match config.stepping {
        Stepping::Sweep(s) => s,
        Stepping::Single(_) => {
            return Err(Error::InvalidParams(
                "sweep needs a sweep specification".into(),
            ))
        }
    };
    let grid = spec.grid();
    if config.potential == PotentialKind::Harmonic {
        return Ok(grid);
    }
    let mut snapped: Vec<f64> = grid
        .iter()
        .map(|h| (h / REFERENCE_STEP).round().max(1.0) * REFERENCE_STEP)
        .collect();
    snapped.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    Ok(snapped)
}

/// RMSE in `E` and `S` over a stepsize grid, then fitted orders per method.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<CommandOutput> {
    let pot = config.build_potential();
    check_methods(config, pot.as_ref())?;
    let grid = sweep_grid(config)?;
    let reference =
        Reference::for_problem(pot.as_ref(), &config.params, config.initial, config.tsim)?;

    let mut methods = config.methods.clone();
    methods.sort_by_key(|m| m.as_str());
    let results = methods
        .iter()
        .map(|&m| {
            convergence_sweep(
                m,
                &grid,
                config.tsim,
                config.initial,
                &config.params,
                pot.as_ref(),
                &reference,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = Csv::new(config);
    let snapped = if config.potential == PotentialKind::Cosine {
        format!(", rounded to multiples of {}", fmt_f64(REFERENCE_STEP))
    } else {
        String::new()
    };
    csv.comment(format!("grid: {} stepsizes{snapped}", grid.len()));
    csv.comment(match &reference {
        Reference::Analytic(_) => "reference: analytic".to_string(),
        Reference::Numerical(_) => format!("reference: mybaby h={}", fmt_f64(REFERENCE_STEP)),
    });
    csv.row(["method", "h", "RMSE_E", "RMSE_S"]);
    for r in &results {
        for p in &r.points {
            let energy = if r.reports_energy() {
                fmt_f64(p.rmse_energy)
            } else {
                String::new()
            };
            csv.row([
                r.method.to_string(),
                fmt_f64(p.h),
                energy,
                fmt_f64(p.rmse_entropy),
            ]);
        }
    }
    for r in &results {
        csv.comment(format!(
            "slope: method={} RMSE_E={} RMSE_S={}",
            r.method,
            fmt_opt(r.order_energy),
            fmt_opt(r.order_entropy)
        ));
    }
    for r in &results {
        for (h, e) in &r.failures {
            csv.error(format!("method={} h={} {e}", r.method, fmt_f64(*h)));
        }
    }
    Ok(csv.finish())
}

/// Logarithm of successive local maxima of `q` (or `p`) and the fitted decay slope.
pub fn cmd_dissipation(config: &ExperimentConfig) -> Result<CommandOutput> {
    let h = require_single_h(config)?;
    let pot = config.build_potential();
    check_methods(config, pot.as_ref())?;
    let n = steps_for(config.tsim, h);

    let mut runs: Vec<(String, Trajectory, Option<Error>)> = Vec::new();
    for m in &config.methods {
        let (traj, status) =
            integrate_partial(m, config.initial, h, n, &config.params, pot.as_ref());
        runs.push((m.to_string(), traj, status.err()));
    }
    let mut csv = Csv::new(config);
    match (
        config.potential,
        HarmonicAnalytic::new(config.params, config.k, config.initial),
    ) {
        (PotentialKind::Harmonic, Ok(a)) => runs.push(("exact".into(), a.trajectory(h, n), None)),
        (PotentialKind::Harmonic, Err(e)) => csv.comment(format!("no exact series: {e}")),
        (PotentialKind::Cosine, _) => csv.comment("no exact series for the cosine potential"),
    }

    csv.row(["t", "ln_u", "method"]);
    let mut slopes = Vec::new();
    let mut errors = Vec::new();
    for (name, traj, failure) in &runs {
        if let Some(e) = failure {
            errors.push(format!("method={name} {e}"));
        }
        match dissipation_rate_series(traj, config.observable) {
            Ok(series) => {
                for (t, ln_u) in &series {
                    csv.row([fmt_f64(*t), fmt_f64(*ln_u), name.clone()]);
                }
                match dissipation_slope(&series) {
                    Ok(s) => slopes.push((name.clone(), s)),
                    Err(e) => errors.push(format!("method={name} {e}")),
                }
            }
            Err(e) => errors.push(format!("method={name} {e}")),
        }
    }
    for (name, s) in &slopes {
        csv.comment(format!("slope: method={name} value={}", fmt_f64(*s)));
    }
    for e in errors {
        csv.error(e);
    }
    Ok(csv.finish())
}

/// Structure-preservation residuals of each method over states sampled from
/// its own trajectory.
pub fn cmd_structure(config: &ExperimentConfig) -> Result<CommandOutput> {
    let h = require_single_h(config)?;
    let pot = config.build_potential();
    check_methods(config, pot.as_ref())?;
    let n = steps_for(config.tsim, h);

    let mut csv = Csv::new(config);
    csv.comment(format!(
        "samples: up to {STRUCTURE_SAMPLES} states per trajectory; poisson columns use gamma=0; \
         entropy_violations counts decreasing steps over the whole trajectory"
    ));
    csv.row([
        "method",
        "samples",
        "two_form",
        "poisson_b12",
        "poisson_b13",
        "poisson_b23",
        "degeneracy_friction",
        "degeneracy_poisson",
        "degeneracy_modified",
        "rank_residual",
        "rank_mismatches",
        "entropy_violations",
    ]);
    let mut errors = Vec::new();
    for &m in &config.methods {
        let (traj, status) =
            integrate_partial(&m, config.initial, h, n, &config.params, pot.as_ref());
        if let Err(e) = status {
            errors.push(format!("method={m} {e}"));
        }
        let stride = (traj.len() / STRUCTURE_SAMPLES).max(1);
        let samples: Vec<_> = traj
            .states
            .iter()
            .step_by(stride)
            .take(STRUCTURE_SAMPLES)
            .copied()
            .collect();
        match method_structure_report(m, &config.params, pot.as_ref(), h, &samples) {
            Ok(r) => csv.row([
                m.to_string(),
                r.samples.to_string(),
                fmt_opt(r.two_form_residual),
                fmt_f64(r.poisson_residuals[0]),
                fmt_f64(r.poisson_residuals[1]),
                fmt_f64(r.poisson_residuals[2]),
                fmt_f64(r.degeneracy_friction),
                fmt_f64(r.degeneracy_poisson),
                fmt_f64(r.degeneracy_modified),
                fmt_f64(r.rank_residual),
                r.rank_mismatches.to_string(),
                traj.entropy_decreases().to_string(),
            ]),
            Err(e) => errors.push(format!("method={m} {e}")),
        }
    }
    for e in errors {
        csv.error(e);
    }
    Ok(csv.finish())
}

/// Parse the `# config:` line of a CSV produced by [`run`].
pub fn config_from_csv(command: Subcommand, csv: &str) -> Option<ExperimentConfig> {
    let line = csv.lines().find_map(|l| l.strip_prefix("# config: "))?;
    ExperimentConfig::from_line(command, line).ok()
}
