//! The linearly damped particle coupled to a thermal bath.
//!
//! State variables are `(q, p, S)`: position, momentum and bath entropy. The
//! dynamics is generated by the total energy `E = p²/2m + U(q) + T·S` through
//! a constant Poisson matrix and a rank-one friction matrix. The functions here
//! also provide the second-order modified energy conserved by the split
//! integrators, together with the friction matrix that satisfies the modified
//! degeneracy condition for it.

use crate::error::{Error, Result};

/// Dense 3×3 matrix, row-major, indexed in `(q, p, S)` order.
pub type Mat3 = [[f64; 3]; 3];

/// Phase-space point `(q, p, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub q: f64,
    pub p: f64,
    pub s: f64,
}

impl State {
    pub const fn new(q: f64, p: f64, s: f64) -> Self {
        Self { q, p, s }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite() && self.s.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.q, self.p, self.s]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self::new(x[0], x[1], x[2])
    }
}

/// Mass, damping rate and bath temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub mass: f64,
    pub gamma: f64,
    pub temperature: f64,
}

impl SystemParams {
    pub fn new(mass: f64, gamma: f64, temperature: f64) -> Result<Self> {
        let params = Self {
            mass,
            gamma,
            temperature,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        if !(self.mass.is_finite() && self.mass > 0.0) {
            violations.push(format!("mass must be > 0 (got {})", self.mass));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            violations.push(format!("gamma must be >= 0 (got {})", self.gamma));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            violations.push(format!(
                "temperature must be > 0 (got {})",
                self.temperature
            ));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(violations.join("; ")))
        }
    }

    /// Same mass and temperature with a different damping rate.
    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }
}

/// One-dimensional potential `U(q)` with analytic derivatives up to third order.
pub trait Potential: Send + Sync {
    fn name(&self) -> &'static str;
    fn value(&self, q: f64) -> f64;
    /// `U'(q)`
    fn first_derivative(&self, q: f64) -> f64;
    /// `U''(q)`
    fn second_derivative(&self, q: f64) -> f64;
    /// `U'''(q)`
    fn third_derivative(&self, q: f64) -> f64;

    fn force(&self, q: f64) -> f64 {
        -self.first_derivative(q)
    }

    /// Spring constant, if this is `U = k q²/2`.
    fn harmonic_stiffness(&self) -> Option<f64> {
        None
    }

    /// The Hessian, if it does not depend on `q`.
    fn constant_hessian(&self) -> Option<f64> {
        None
    }
}

/// `U(q) = k q²/2`. `k = 0` gives the free particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub k: f64,
}

impl Harmonic {
    pub const fn new(k: f64) -> Self {
        Self { k }
    }
}

impl Potential for Harmonic {
    fn name(&self) -> &'static str {
        "harmonic"
    }
    fn value(&self, q: f64) -> f64 {
        0.5 * self.k * q * q
    }
    fn first_derivative(&self, q: f64) -> f64 {
        self.k * q
    }
    fn second_derivative(&self, _q: f64) -> f64 {
        self.k
    }
    fn third_derivative(&self, _q: f64) -> f64 {
        0.0
    }
    fn harmonic_stiffness(&self) -> Option<f64> {
        Some(self.k)
    }
    fn constant_hessian(&self) -> Option<f64> {
        Some(self.k)
    }
}

/// `U(q) = -k cos q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub k: f64,
}

impl Cosine {
    pub const fn new(k: f64) -> Self {
        Self { k }
    }
}

impl Potential for Cosine {
    fn name(&self) -> &'static str {
        "cosine"
    }
    fn value(&self, q: f64) -> f64 {
        -self.k * q.cos()
    }
    fn first_derivative(&self, q: f64) -> f64 {
        self.k * q.sin()
    }
    fn second_derivative(&self, q: f64) -> f64 {
        self.k * q.cos()
    }
    fn third_derivative(&self, q: f64) -> f64 {
        -self.k * q.sin()
    }
}

pub fn hamiltonian(q: f64, p: f64, params: &SystemParams, pot: &dyn Potential) -> f64 {
    p * p / (2.0 * params.mass) + pot.value(q)
}

/// `E = H(q, p) + T·S`.
pub fn total_energy(state: &State, params: &SystemParams, pot: &dyn Potential) -> f64 {
    hamiltonian(state.q, state.p, params, pot) + params.temperature * state.s
}

/// `α(q) = 1 + h² U''(q) / 6m`, the factor by which the modified energy
/// rescales `∂E/∂p`.
pub fn modified_factor(q: f64, h: f64, params: &SystemParams, pot: &dyn Potential) -> f64 {
    1.0 + h * h * pot.second_derivative(q) / (6.0 * params.mass)
}

/// Total energy with the second-order backward-error correction of Verlet.
pub fn modified_energy(state: &State, h: f64, params: &SystemParams, pot: &dyn Potential) -> f64 {
    let m = params.mass;
    let (q, p) = (state.q, state.p);
    let du = pot.first_derivative(q);
    let correction = pot.second_derivative(q) * p * p / (12.0 * m * m) - du * du / (24.0 * m);
    total_energy(state, params, pot) + h * h * correction
}

/// `∂E/∂x = (U'(q), p/m, T)`.
pub fn energy_gradient(state: &State, params: &SystemParams, pot: &dyn Potential) -> [f64; 3] {
    [
        pot.first_derivative(state.q),
        state.p / params.mass,
        params.temperature,
    ]
}

/// `∂Ẽ_h/∂x`.
pub fn modified_energy_gradient(
    state: &State,
    h: f64,
    params: &SystemParams,
    pot: &dyn Potential,
) -> [f64; 3] {
    let m = params.mass;
    let (q, p) = (state.q, state.p);
    let du = pot.first_derivative(q);
    let d2u = pot.second_derivative(q);
    let d3u = pot.third_derivative(q);
    let dq = du + h * h * (d3u * p * p / (12.0 * m * m) - du * d2u / (12.0 * m));
    [
        dq,
        p * modified_factor(q, h, params, pot) / m,
        params.temperature,
    ]
}

/// `∂S/∂x`; the entropy is an independent variable.
pub fn entropy_gradient() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Canonical Poisson matrix acting on `(q, p)` only.
pub fn poisson_matrix() -> Mat3 {
    [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
}

/// Factor `y` of `M = y yᵀ`.
pub fn friction_factor(state: &State, params: &SystemParams) -> [f64; 3] {
    let mt = params.mass * params.temperature;
    let scale = (params.gamma / mt).sqrt();
    [0.0, scale * mt, -scale * state.p]
}

pub fn friction_matrix(state: &State, params: &SystemParams) -> Mat3 {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let p = state.p;
    [
        [0.0, 0.0, 0.0],
        [0.0, g * m * t, -g * p],
        [0.0, -g * p, g * p * p / (m * t)],
    ]
}

/// Factor `ỹ` of `M̃ = ỹ ỹᵀ`; the entropy component carries `α(q)`.
pub fn modified_friction_factor(
    state: &State,
    h: f64,
    params: &SystemParams,
    pot: &dyn Potential,
) -> [f64; 3] {
    let mt = params.mass * params.temperature;
    let scale = (params.gamma / mt).sqrt();
    let alpha = modified_factor(state.q, h, params, pot);
    [0.0, scale * mt, -scale * state.p * alpha]
}

pub fn modified_friction_matrix(
    state: &State,
    h: f64,
    params: &SystemParams,
    pot: &dyn Potential,
) -> Mat3 {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let p = state.p;
    let alpha = modified_factor(state.q, h, params, pot);
    [
        [0.0, 0.0, 0.0],
        [0.0, g * m * t, -g * p * alpha],
        [0.0, -g * p * alpha, g * p * p * alpha * alpha / (m * t)],
    ]
}

/// Right-hand side `(q̇, ṗ, Ṡ)` of the damped equations of motion.
pub fn generic_rhs(state: &State, params: &SystemParams, pot: &dyn Potential) -> [f64; 3] {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let p = state.p;
    [p / m, pot.force(state.q) - g * p, g * p * p / (m * t)]
}

/// Right-hand side of the modified system generated by `Ẽ_h` and `M̃`.
pub fn modified_generic_rhs(
    state: &State,
    h: f64,
    params: &SystemParams,
    pot: &dyn Potential,
) -> [f64; 3] {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let (q, p) = (state.q, state.p);
    let alpha = modified_factor(q, h, params, pot);
    let du = pot.first_derivative(q);
    let correction = h * h / (12.0 * m * m)
        * (pot.third_derivative(q) * p * p - m * du * pot.second_derivative(q));
    [
        p * alpha / m,
        -du - correction - g * p * alpha,
        g * p * p * alpha * alpha / (m * t),
    ]
}

pub fn mat_vec(a: &Mat3, x: &[f64; 3]) -> [f64; 3] {
    let mut y = [0.0; 3];
    for (yi, row) in y.iter_mut().zip(a) {
        *yi = row.iter().zip(x).map(|(aij, xj)| aij * xj).sum();
    }
    y
}

pub fn outer(x: &[f64; 3], y: &[f64; 3]) -> Mat3 {
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = x[i] * y[j];
        }
    }
    a
}

pub fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Euclidean norm.
pub fn norm(x: &[f64; 3]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(a: &Mat3) -> f64 {
    a.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &Mat3, b: &Mat3) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
