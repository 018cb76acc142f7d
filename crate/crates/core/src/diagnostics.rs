//! Error measures and structure probes.
//!
//! * RMSE against a reference and least-squares convergence order.
//! * Finite-difference Jacobians of a one-step map, from which the `(q, p)`
//!   two-form contraction and the Poisson conditions `B₁₂, B₁₃, B₂₃` follow.
//! * Dissipation rate from the logarithm of successive local maxima.
//! * Degeneracy, rank and entropy-production checks aggregated over a sample.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::integrators::{integrate, steps_for, Method, Stepper, Trajectory};
use crate::reference::Reference;
use crate::system::{
    energy_gradient, entropy_gradient, friction_matrix, mat_vec, max_abs, modified_energy_gradient,
    modified_friction_matrix, norm, poisson_matrix, Mat3, Potential, State, SystemParams,
};

/// Perturbation used by [`one_step_jacobian`].
pub const JACOBIAN_STEP: f64 = 1e-6;

pub fn rmse(approx: &[f64], exact: &[f64]) -> Result<f64> {
    if approx.len() != exact.len() {
        return Err(Error::LengthMismatch {
            left: approx.len(),
            right: exact.len(),
        });
    }
    if approx.is_empty() {
        return Err(Error::DegenerateFit("rmse of an empty series".into()));
    }
    let sum: f64 = approx
        .iter()
        .zip(exact)
        .map(|(a, e)| (a - e) * (a - e))
        .sum();
    Ok((sum / approx.len() as f64).sqrt())
}

/// RMSE over `i = 1..N`, i.e. skipping the shared initial point.
pub fn rmse_after_initial(approx: &[f64], exact: &[f64]) -> Result<f64> {
    if approx.len() != exact.len() {
        return Err(Error::LengthMismatch {
            left: approx.len(),
            right: exact.len(),
        });
    }
    rmse(
        approx.get(1..).unwrap_or(&[]),
        exact.get(1..).unwrap_or(&[]),
    )
}

/// Least-squares slope of `y` against `t`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(t, y) in points {
        sxx += (t - mean_t) * (t - mean_t);
        sxy += (t - mean_t) * (y - mean_y);
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("abscissae are not distinct".into()));
    }
    Ok(sxy / sxx)
}

/// Slope of `log(rmse)` against `log(h)`.
pub fn convergence_order(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 (h, rmse) points, got {}",
            points.len()
        )));
    }
    if let Some(&(h, e)) = points.iter().find(|(h, e)| !(*h > 0.0 && *e > 0.0)) {
        return Err(Error::DegenerateFit(format!(
            "non-positive point (h={h}, rmse={e})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    fit_slope(&logs)
}

/// Central-difference Jacobian `Ω = ∂x'/∂x` of one step.
pub fn one_step_jacobian(
    stepper: &dyn Stepper,
    state: &State,
    h: f64,
    params: &SystemParams,
    pot: &dyn Potential,
) -> Result<Mat3> {
    let x = state.to_array();
    let mut jac = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut plus = x;
        let mut minus = x;
        plus[col] += JACOBIAN_STEP;
        minus[col] -= JACOBIAN_STEP;
        let fp = stepper.step(&State::from_array(plus), h, params, pot)?;
        let fm = stepper.step(&State::from_array(minus), h, params, pot)?;
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(Error::NonFinite {
                step: 1,
                valid_states: 0,
            });
        }
        let (fp, fm) = (fp.to_array(), fm.to_array());
        for row in 0..3 {
            jac[row][col] = (fp[row] - fm[row]) / (2.0 * JACOBIAN_STEP);
        }
    }
    Ok(jac)
}

/// Determinant of the `(q, p)` block, the contraction factor of `dq ∧ dp`.
pub fn two_form_factor(jac: &Mat3) -> f64 {
    jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]
}

/// The three 2×2 minors that must equal `(1, 0, 0)` for a map preserving
/// the Poisson matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonConditions {
    pub b12: f64,
    pub b13: f64,
    pub b23: f64,
}

impl PoissonConditions {
    /// `(|B₁₂ - target|, |B₁₃|, |B₂₃|)`.
    pub fn residuals(&self, b12_target: f64) -> [f64; 3] {
        [
            (self.b12 - b12_target).abs(),
            self.b13.abs(),
            self.b23.abs(),
        ]
    }
}

pub fn poisson_conditions(jac: &Mat3) -> PoissonConditions {
    let a = jac;
    PoissonConditions {
        b12: a[0][0] * a[1][1] - a[0][1] * a[1][0],
        b13: a[0][0] * a[2][1] - a[0][1] * a[2][0],
        b23: a[1][0] * a[2][1] - a[1][1] * a[2][0],
    }
}

/// `|det(Ω_qp) - e^{-K h}|` for a claimed decay rate `K`.
pub fn two_form_decay_residual(
    stepper: &dyn Stepper,
    state: &State,
    h: f64,
    params: &SystemParams,
    pot: &dyn Potential,
    expected_rate: f64,
) -> Result<f64> {
    let jac = one_step_jacobian(stepper, state, h, params, pot)?;
    Ok((two_form_factor(&jac) - (-expected_rate * h).exp()).abs())
}

/// Which coordinate to track for local maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Observable {
    #[default]
    Position,
    Momentum,
}

impl Observable {
    pub fn as_str(&self) -> &'static str {
        match self {
            Observable::Position => "q",
            Observable::Momentum => "p",
        }
    }

    pub fn series(&self, traj: &Trajectory) -> Vec<f64> {
        match self {
            Observable::Position => traj.positions(),
            Observable::Momentum => traj.momenta(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "q" => Ok(Observable::Position),
            "p" => Ok(Observable::Momentum),
            _ => Err(format!("unknown observable `{s}` (expected q or p)")),
        }
    }
}

/// Indices `i` with `u[i-1] < u[i] > u[i+1]`.
pub fn strict_local_maxima(u: &[f64]) -> Vec<usize> {
    (1..u.len().saturating_sub(1))
        .filter(|&i| u[i - 1] < u[i] && u[i] > u[i + 1])
        .collect()
}

/// `(t_n, ln u_n)` for every positive strict local maximum `u_n`.
pub fn dissipation_rate_series(
    traj: &Trajectory,
    observable: Observable,
) -> Result<Vec<(f64, f64)>> {
    let u = observable.series(traj);
    let points: Vec<(f64, f64)> = strict_local_maxima(&u)
        .into_iter()
        .filter(|&i| u[i] > 0.0)
        .map(|i| (traj.time(i), u[i].ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::TooFewExtrema {
            found: points.len(),
            needed: 3,
        });
    }
    Ok(points)
}

/// Fitted slope of a dissipation-rate series, discarding the first maximum.
pub fn dissipation_slope(series: &[(f64, f64)]) -> Result<f64> {
    fit_slope(series.get(1..).unwrap_or(&[]))
}

/// Worst-case probe residuals of one method over a set of sample states.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub method: String,
    pub samples: usize,
    /// `max |det(Ω_qp) - e^{-K h}|`; absent when the method has no constant
    /// decay rate for this potential.
    pub two_form_residual: Option<f64>,
    /// `max |B₁₂ - 1|, |B₁₃|, |B₂₃|` with damping switched off.
    pub poisson_residuals: [f64; 3],
    /// `max ‖M ∂E/∂x‖`
    pub degeneracy_friction: f64,
    /// `max ‖L ∂S/∂x‖`
    pub degeneracy_poisson: f64,
    /// `max ‖M̃ ∂Ẽ_h/∂x‖`
    pub degeneracy_modified: f64,
    /// Largest normalised 2×2 minor of `M` or `M̃`; zero for rank ≤ 1.
    pub rank_residual: f64,
    /// States where `rank(M) != rank(M̃)`.
    pub rank_mismatches: usize,
    /// Sample states whose entropy decreased over one step.
    pub entropy_violations: usize,
}

/// Largest 2×2 minor relative to the squared largest entry.
pub fn rank_one_residual(a: &Mat3) -> f64 {
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut worst: f64 = 0.0;
    for (i, j) in pairs {
        for (k, l) in pairs {
            let minor = a[i][k] * a[j][l] - a[i][l] * a[j][k];
            worst = worst.max(minor.abs());
        }
    }
    worst / (scale * scale)
}

/// Numerical rank of a matrix known to have rank at most one, or two when the
/// minors do not vanish.
pub fn numerical_rank(a: &Mat3) -> usize {
    if max_abs(a) == 0.0 {
        0
    } else if rank_one_residual(a) < 1e-10 {
        1
    } else {
        2
    }
}

pub fn structure_report(
    stepper: &dyn Stepper,
    params: &SystemParams,
    pot: &dyn Potential,
    h: f64,
    sample_states: &[State],
    expected_rate: Option<f64>,
) -> Result<StructureReport> {
    if sample_states.is_empty() {
        return Err(Error::InvalidParams(
            "structure report needs sample states".into(),
        ));
    }
    let reversible = params.with_gamma(0.0);
    let mut report = StructureReport {
        method: stepper.tag().to_string(),
        samples: sample_states.len(),
        two_form_residual: expected_rate.map(|_| 0.0),
        poisson_residuals: [0.0; 3],
        degeneracy_friction: 0.0,
        degeneracy_poisson: 0.0,
        degeneracy_modified: 0.0,
        rank_residual: 0.0,
        rank_mismatches: 0,
        entropy_violations: 0,
    };
    let l_ds = norm(&mat_vec(&poisson_matrix(), &entropy_gradient()));
    for x in sample_states {
        if let (Some(rate), Some(worst)) = (expected_rate, report.two_form_residual.as_mut()) {
            let r = two_form_decay_residual(stepper, x, h, params, pot, rate)?;
            *worst = worst.max(r);
        }

        let jac = one_step_jacobian(stepper, x, h, &reversible, pot)?;
        let res = poisson_conditions(&jac).residuals(1.0);
        for (worst, r) in report.poisson_residuals.iter_mut().zip(res) {
            *worst = worst.max(r);
        }

        let m = friction_matrix(x, params);
        let mt = modified_friction_matrix(x, h, params, pot);
        report.degeneracy_friction = report
            .degeneracy_friction
            .max(norm(&mat_vec(&m, &energy_gradient(x, params, pot))));
        report.degeneracy_modified = report.degeneracy_modified.max(norm(&mat_vec(
            &mt,
            &modified_energy_gradient(x, h, params, pot),
        )));
        report.degeneracy_poisson = report.degeneracy_poisson.max(l_ds);
        report.rank_residual = report
            .rank_residual
            .max(rank_one_residual(&m))
            .max(rank_one_residual(&mt));
        if numerical_rank(&m) != numerical_rank(&mt) {
            report.rank_mismatches += 1;
        }

        let next = stepper.step(x, h, params, pot)?;
        if next.s < x.s {
            report.entropy_violations += 1;
        }
    }
    Ok(report)
}

/// [`structure_report`] with the decay rate each built-in method should show.
pub fn method_structure_report(
    method: Method,
    params: &SystemParams,
    pot: &dyn Potential,
    h: f64,
    sample_states: &[State],
) -> Result<StructureReport> {
    let rate = method.expected_decay_rate(h, params, pot);
    structure_report(&method, params, pot, h, sample_states, rate)
}

/// Errors of one integration against the reference on the same grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub h: f64,
    pub rmse_energy: f64,
    pub rmse_entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub method: Method,
    /// Sorted by increasing `h`.
    pub points: Vec<SweepPoint>,
    /// Stepsizes whose integration failed, with the error message.
    pub failures: Vec<(f64, String)>,
    /// `None` when fewer than three usable points remain or, for ADG, whose
    /// energy error is pure round-off.
    pub order_energy: Option<f64>,
    pub order_entropy: Option<f64>,
}

impl SweepResult {
    pub fn point(&self, h: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| (p.h - h).abs() <= 1e-12 * h.max(1.0))
    }

    /// ADG conserves the energy exactly; its energy column carries no error signal.
    pub fn reports_energy(&self) -> bool {
        self.method != Method::Adg
    }
}

/// RMSE in `E` and `S`, excluding the shared initial point.
pub fn trajectory_errors(
    traj: &Trajectory,
    reference: &Trajectory,
    params: &SystemParams,
    pot: &dyn Potential,
) -> Result<(f64, f64)> {
    let e = rmse_after_initial(
        &traj.energies(params, pot),
        &reference.energies(params, pot),
    )?;
    let s = rmse_after_initial(&traj.entropies(), &reference.entropies())?;
    Ok((e, s))
}

/// RMSE of `method` at every stepsize of `grid` over `[0, tsim]`.
pub fn convergence_sweep(
    method: Method,
    grid: &[f64],
    tsim: f64,
    initial: State,
    params: &SystemParams,
    pot: &dyn Potential,
    reference: &Reference,
) -> Result<SweepResult> {
    let mut hs = grid.to_vec();
    hs.sort_by(f64::total_cmp);
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for h in hs {
        let n = steps_for(tsim, h);
        let cell = integrate(&method, initial, h, n, params, pot).and_then(|traj| {
            let exact = reference.on_grid(h, n)?;
            trajectory_errors(&traj, &exact, params, pot)
        });
        match cell {
            Ok((rmse_energy, rmse_entropy)) => points.push(SweepPoint {
                h,
                rmse_energy,
                rmse_entropy,
            }),
            Err(e @ Error::NotApplicable { .. }) => return Err(e),
            Err(e) => failures.push((h, e.to_string())),
        }
    }
    let fit = |f: fn(&SweepPoint) -> f64| {
        let pts: Vec<(f64, f64)> = points.iter().map(|p| (p.h, f(p))).collect();
        convergence_order(&pts).ok()
    };
    let order_energy = if method == Method::Adg {
        None
    } else {
        fit(|p| p.rmse_energy)
    };
    let order_entropy = fit(|p| p.rmse_entropy);
    Ok(SweepResult {
        method,
        points,
        failures,
        order_energy,
        order_entropy,
    })
}
