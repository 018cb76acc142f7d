//! Ground-truth solutions used to measure integrator error.

use crate::error::{Error, Result};
use crate::integrators::{integrate, steps_for, Method, Trajectory};
use crate::system::{hamiltonian, Harmonic, Potential, State, SystemParams};

/// Stepsize of the fine mYBABY run that stands in for the exact solution
/// when no closed form is available.
pub const REFERENCE_STEP: f64 = 0.001;

/// Closed-form solution of the underdamped oscillator `m q̈ = -k q - γ m q̇`.
///
/// The entropy follows from conservation of `E = H + T S` along the exact
/// flow: `S(t) = S₀ + (H₀ - H(t)) / T`.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicAnalytic {
    params: SystemParams,
    k: f64,
    initial: State,
    decay: f64,
    omega: f64,
    // q(t) = e^{-decay t} (a cos ωt + b sin ωt)
    a: f64,
    b: f64,
    h0: f64,
}

impl HarmonicAnalytic {
    pub fn new(params: SystemParams, k: f64, initial: State) -> Result<Self> {
        params.validate()?;
        let m = params.mass;
        let decay = 0.5 * params.gamma;
        let discriminant = k / m - decay * decay;
        if !(discriminant > 0.0) {
            return Err(Error::Overdamped { discriminant });
        }
        let omega = discriminant.sqrt();
        let a = initial.q;
        let b = (initial.p / m + decay * a) / omega;
        let h0 = hamiltonian(initial.q, initial.p, &params, &Harmonic::new(k));
        Ok(Self {
            params,
            k,
            initial,
            decay,
            omega,
            a,
            b,
            h0,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    /// Exponential decay rate of the position amplitude, `γ/2`.
    pub fn amplitude_decay_rate(&self) -> f64 {
        self.decay
    }

    /// Damped angular frequency `√(k/m - γ²/4)`.
    pub fn frequency(&self) -> f64 {
        self.omega
    }

    pub fn state_at(&self, t: f64) -> State {
        if t == 0.0 {
            return self.initial;
        }
        let m = self.params.mass;
        let envelope = (-self.decay * t).exp();
        let (sin, cos) = (self.omega * t).sin_cos();
        let q = envelope * (self.a * cos + self.b * sin);
        let velocity = envelope
            * ((self.omega * self.b - self.decay * self.a) * cos
                - (self.omega * self.a + self.decay * self.b) * sin);
        let p = m * velocity;
        let h = hamiltonian(q, p, &self.params, &Harmonic::new(self.k));
        let s = self.initial.s + (self.h0 - h) / self.params.temperature;
        State::new(q, p, s)
    }

    /// The exact solution sampled on `t_n = n h`, `n = 0..=n_steps`.
    pub fn trajectory(&self, h: f64, n_steps: usize) -> Trajectory {
        Trajectory {
            t0: 0.0,
            h,
            states: (0..=n_steps).map(|n| self.state_at(n as f64 * h)).collect(),
        }
    }
}

pub fn dho_exact(t: f64, reference: &HarmonicAnalytic) -> State {
    reference.state_at(t)
}

/// Integer ratio between a coarse stepsize and the reference stepsize.
pub fn stride_for(coarse_h: f64, reference_h: f64) -> Result<usize> {
    let ratio = (coarse_h / reference_h).round();
    if !(ratio >= 1.0) || (coarse_h - ratio * reference_h).abs() > 1e-12 {
        return Err(Error::GridMismatch {
            coarse: coarse_h,
            reference: reference_h,
        });
    }
    Ok(ratio as usize)
}

/// Fine-step mYBABY solution, computed once and subsampled onto coarser grids.
#[derive(Debug, Clone)]
pub struct NumericalReference {
    fine: Trajectory,
}

impl NumericalReference {
    pub fn compute(
        pot: &dyn Potential,
        params: &SystemParams,
        initial: State,
        tsim: f64,
    ) -> Result<Self> {
        let n = steps_for(tsim, REFERENCE_STEP);
        let fine = integrate(&Method::Mybaby, initial, REFERENCE_STEP, n, params, pot)?;
        Ok(Self { fine })
    }

    pub fn fine(&self) -> &Trajectory {
        &self.fine
    }

    /// The reference on the grid `t_n = n·coarse_h`.
    pub fn on_grid(&self, coarse_h: f64) -> Result<Trajectory> {
        let stride = stride_for(coarse_h, self.fine.h)?;
        let mut t = self.fine.subsample(stride);
        t.h = coarse_h;
        Ok(t)
    }
}

/// Reference trajectory for the test grid with stepsize `coarse_h`.
pub fn nonlinear_reference(
    pot: &dyn Potential,
    params: &SystemParams,
    initial: State,
    tsim: f64,
    coarse_h: f64,
) -> Result<Trajectory> {
    stride_for(coarse_h, REFERENCE_STEP)?;
    NumericalReference::compute(pot, params, initial, tsim)?.on_grid(coarse_h)
}

/// Whichever ground truth applies to a problem: the closed form for a
/// harmonic potential, otherwise the fine-step numerical solution.
#[derive(Debug, Clone)]
pub enum Reference {
    Analytic(HarmonicAnalytic),
    Numerical(NumericalReference),
}

impl Reference {
    pub fn for_problem(
        pot: &dyn Potential,
        params: &SystemParams,
        initial: State,
        tsim: f64,
    ) -> Result<Self> {
        match pot.harmonic_stiffness() {
            Some(k) => Ok(Reference::Analytic(HarmonicAnalytic::new(
                *params, k, initial,
            )?)),
            None => Ok(Reference::Numerical(NumericalReference::compute(
                pot, params, initial, tsim,
            )?)),
        }
    }

    /// Reference states `x(n h)` for `n = 0..=n_steps`.
    pub fn on_grid(&self, h: f64, n_steps: usize) -> Result<Trajectory> {
        match self {
            Reference::Analytic(a) => Ok(a.trajectory(h, n_steps)),
            Reference::Numerical(r) => {
                let mut t = r.on_grid(h)?;
                if t.len() < n_steps + 1 {
                    return Err(Error::LengthMismatch {
                        left: n_steps + 1,
                        right: t.len(),
                    });
                }
                t.states.truncate(n_steps + 1);
                Ok(t)
            }
        }
    }
}
