//! One-step maps and the trajectory driver.
//!
//! The split methods compose the exact irreversible flow `Y` (or its modified
//! counterpart `Y_m`) with Verlet for the Hamiltonian part:
//!
//! ```text
//! YBABY  = Y(h/2)   ∘ B(h/2) ∘ A(h) ∘ B(h/2) ∘ Y(h/2)
//! mYBABY = Y_m(h/2) ∘ B(h/2) ∘ A(h) ∘ B(h/2) ∘ Y_m(h/2)
//! ```
//!
//! RK3 and the average discrete gradient (closed form, harmonic force only)
//! are provided as reference methods.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::system::{generic_rhs, modified_factor, Potential, State, SystemParams};

/// A deterministic one-step map.
pub trait Stepper {
    fn tag(&self) -> &str;
    fn step(
        &self,
        state: &State,
        h: f64,
        params: &SystemParams,
        pot: &dyn Potential,
    ) -> Result<State>;
}

/// The built-in integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Verlet,
    Ybaby,
    Mybaby,
    Rk3,
    Adg,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Verlet,
        Method::Ybaby,
        Method::Mybaby,
        Method::Rk3,
        Method::Adg,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Verlet => "verlet",
            Method::Ybaby => "ybaby",
            Method::Mybaby => "mybaby",
            Method::Rk3 => "rk3",
            Method::Adg => "adg",
        }
    }

    /// Whether the method can integrate the given potential.
    pub fn supports(&self, pot: &dyn Potential) -> bool {
        !matches!(self, Method::Adg) || pot.harmonic_stiffness().is_some()
    }

    /// Rate `K` in `dq' ∧ dp' = e^{-K h} dq ∧ dp`, when the method is
    /// conformal symplectic for this potential. RK3 reports the physical
    /// damping rate it is meant to reproduce.
    pub fn expected_decay_rate(
        &self,
        h: f64,
        params: &SystemParams,
        pot: &dyn Potential,
    ) -> Option<f64> {
        match self {
            Method::Verlet => Some(0.0),
            Method::Ybaby | Method::Rk3 => Some(params.gamma),
            Method::Mybaby => pot
                .constant_hessian()
                .map(|c| modified_decay_rate(h, c, params)),
            Method::Adg => pot
                .harmonic_stiffness()
                .map(|k| adg_decay_rate(h, k, params)),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                format!("unknown method `{s}` (expected one of verlet, ybaby, mybaby, rk3, adg)")
            })
    }
}

impl Stepper for Method {
    fn tag(&self) -> &str {
        self.as_str()
    }

    fn step(
        &self,
        state: &State,
        h: f64,
        params: &SystemParams,
        pot: &dyn Potential,
    ) -> Result<State> {
        Ok(match self {
            Method::Verlet => verlet_step(state, h, params, pot),
            Method::Ybaby => ybaby_step(state, h, params, pot),
            Method::Mybaby => mybaby_step(state, h, params, pot),
            Method::Rk3 => rk3_step(state, h, params, pot),
            Method::Adg => {
                let k = pot
                    .harmonic_stiffness()
                    .ok_or_else(|| Error::NotApplicable {
                        method: "adg".into(),
                        reason: format!(
                        "the closed-form discrete gradient step needs a linear force, got `{}` \
                         (a nonlinear force requires an iterative solve)",
                        pot.name()
                    ),
                    })?;
                adg_step(state, h, params, k)?
            }
        })
    }
}

/// Decay rate of the two-form under mYBABY for a constant Hessian `c`.
pub fn modified_decay_rate(h: f64, hessian: f64, params: &SystemParams) -> f64 {
    params.gamma * (1.0 + h * h * hessian / (6.0 * params.mass))
}

/// Decay rate of the two-form under the closed-form discrete gradient step.
pub fn adg_decay_rate(h: f64, k: f64, params: &SystemParams) -> f64 {
    let m = params.mass;
    let damping = 2.0 * m * h * params.gamma;
    let base = 4.0 * m + h * h * k;
    -((base - damping) / (base + damping)).ln() / h
}

/// Velocity Verlet (kick, drift, kick). Entropy is untouched.
pub fn verlet_step(state: &State, h: f64, params: &SystemParams, pot: &dyn Potential) -> State {
    let half = 0.5 * h;
    let p_half = state.p + half * pot.force(state.q);
    let q = state.q + h * p_half / params.mass;
    let p = p_half + half * pot.force(q);
    State::new(q, p, state.s)
}

/// Exact flow of `ṗ = -γp`, `Ṡ = γp²/(mT)` over a time `dt`.
pub fn irreversible_flow_exact(state: &State, dt: f64, params: &SystemParams) -> State {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let p = state.p;
    let p_new = (-g * dt).exp() * p;
    let s_new = state.s + p * p * (1.0 - (-2.0 * g * dt).exp()) / (2.0 * m * t);
    State::new(state.q, p_new, s_new)
}

/// Exact flow of `ṗ = -γαp`, `Ṡ = γα²p²/(mT)` with `α = α(q; h_outer)`
/// frozen at the current position (position does not move under this flow).
pub fn irreversible_flow_modified(
    state: &State,
    dt: f64,
    h_outer: f64,
    params: &SystemParams,
    pot: &dyn Potential,
) -> State {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let a = modified_factor(state.q, h_outer, params, pot);
    let p = state.p;
    let p_new = (-g * a * dt).exp() * p;
    let s_new = state.s + p * p * a * (1.0 - (-2.0 * g * a * dt).exp()) / (2.0 * m * t);
    State::new(state.q, p_new, s_new)
}

pub fn ybaby_step(state: &State, h: f64, params: &SystemParams, pot: &dyn Potential) -> State {
    let half = 0.5 * h;
    let x = irreversible_flow_exact(state, half, params);
    let x = verlet_step(&x, h, params, pot);
    irreversible_flow_exact(&x, half, params)
}

pub fn mybaby_step(state: &State, h: f64, params: &SystemParams, pot: &dyn Potential) -> State {
    let half = 0.5 * h;
    let x = irreversible_flow_modified(state, half, h, params, pot);
    let x = verlet_step(&x, h, params, pot);
    irreversible_flow_modified(&x, half, h, params, pot)
}

/// Third-order Runge–Kutta step for an autonomous system `ẋ = f(x)`.
pub fn rk3_step_with<const N: usize, F>(x: &[f64; N], h: f64, f: F) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let k1 = f(x);
    let mut stage = [0.0; N];
    for i in 0..N {
        stage[i] = x[i] + h * k1[i] / 2.0;
    }
    let k2 = f(&stage);
    for i in 0..N {
        stage[i] = x[i] - h * k1[i] + 2.0 * h * k2[i];
    }
    let k3 = f(&stage);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = x[i] + h / 6.0 * (k1[i] + 4.0 * k2[i] + k3[i]);
    }
    out
}

pub fn rk3_step(state: &State, h: f64, params: &SystemParams, pot: &dyn Potential) -> State {
    State::from_array(rk3_step_with(&state.to_array(), h, |x| {
        generic_rhs(&State::from_array(*x), params, pot)
    }))
}

/// Average discrete gradient step for `U = k q²/2`. With a linear force the
/// implicit midpoint equations are solved in closed form.
pub fn adg_step(state: &State, h: f64, params: &SystemParams, k: f64) -> Result<State> {
    let (m, g, t) = (params.mass, params.gamma, params.temperature);
    let (q, p) = (state.q, state.p);
    let damping = 2.0 * m * h * g;
    let stiff = h * h * k;
    let denom = 4.0 * m + damping + stiff;
    if denom == 0.0 {
        return Err(Error::NotApplicable {
            method: "adg".into(),
            reason: "singular implicit midpoint system (4m + 2mhγ + h²k = 0)".into(),
        });
    }
    let q_new = ((4.0 * m + damping - stiff) * q + 4.0 * h * p) / denom;
    let p_new = (-4.0 * m * h * k * q + (4.0 * m - damping - stiff) * p) / denom;
    let p_mid = 0.5 * (p + p_new);
    let s_new = state.s + h * g * p_mid * p_mid / (m * t);
    Ok(State::new(q_new, p_new, s_new))
}

/// States on the uniform grid `t_n = t0 + n h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub h: f64,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.h
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.states.len()).map(|n| self.time(n)).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.states.iter().map(|x| x.q).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.states.iter().map(|x| x.p).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.states.iter().map(|x| x.s).collect()
    }

    pub fn energies(&self, params: &SystemParams, pot: &dyn Potential) -> Vec<f64> {
        self.states
            .iter()
            .map(|x| crate::system::total_energy(x, params, pot))
            .collect()
    }

    /// `Ẽ_h` along the trajectory, using the trajectory's own stepsize.
    pub fn modified_energies(&self, params: &SystemParams, pot: &dyn Potential) -> Vec<f64> {
        self.states
            .iter()
            .map(|x| crate::system::modified_energy(x, self.h, params, pot))
            .collect()
    }

    /// Every `stride`-th state, starting with the first.
    pub fn subsample(&self, stride: usize) -> Trajectory {
        assert!(stride > 0, "stride must be positive");
        Trajectory {
            t0: self.t0,
            h: self.h * stride as f64,
            states: self.states.iter().step_by(stride).copied().collect(),
        }
    }

    /// Number of steps with `S_{n+1} < S_n`.
    pub fn entropy_decreases(&self) -> usize {
        self.states.windows(2).filter(|w| w[1].s < w[0].s).count()
    }
}

/// Number of whole steps of size `h` that fit in a simulation of length `tsim`.
pub fn steps_for(tsim: f64, h: f64) -> usize {
    (tsim / h + 1e-9).floor() as usize
}

/// Integrate until `n_steps` are taken or the first failure. The returned
/// trajectory always holds the valid prefix.
pub fn integrate_partial(
    stepper: &dyn Stepper,
    state0: State,
    h: f64,
    n_steps: usize,
    params: &SystemParams,
    pot: &dyn Potential,
) -> (Trajectory, Result<()>) {
    let mut traj = Trajectory {
        t0: 0.0,
        h,
        states: Vec::with_capacity(n_steps + 1),
    };
    traj.states.push(state0);
    if !(h.is_finite() && h > 0.0) {
        return (
            traj,
            Err(Error::InvalidParams(format!(
                "stepsize must be > 0 (got {h})"
            ))),
        );
    }
    if let Err(e) = params.validate() {
        return (traj, Err(e));
    }
    let mut x = state0;
    for n in 0..n_steps {
        match stepper.step(&x, h, params, pot) {
            Ok(next) if next.is_finite() => {
                traj.states.push(next);
                x = next;
            }
            Ok(_) => {
                let valid_states = traj.states.len();
                return (
                    traj,
                    Err(Error::NonFinite {
                        step: n + 1,
                        valid_states,
                    }),
                );
            }
            Err(e) => return (traj, Err(e)),
        }
    }
    (traj, Ok(()))
}

pub fn integrate(
    stepper: &dyn Stepper,
    state0: State,
    h: f64,
    n_steps: usize,
    params: &SystemParams,
    pot: &dyn Potential,
) -> Result<Trajectory> {
    let (traj, status) = integrate_partial(stepper, state0, h, n_steps, params, pot);
    status.map(|()| traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{modified_energy, total_energy, Cosine, Harmonic};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const FREE: Harmonic = Harmonic::new(0.0);
    const SPRING: Harmonic = Harmonic::new(1.0);

    fn params(gamma: f64) -> SystemParams {
        SystemParams::new(1.0, gamma, 1.0).unwrap()
    }

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(m.tag(), m.to_string());
        }
        assert!("leapfrog".parse::<Method>().is_err());
    }

    #[test]
    fn verlet_examples() {
        let x = verlet_step(&State::new(1.0, 0.0, 0.0), 0.1, &params(0.0), &SPRING);
        // p½ = -0.05, q' = 1 - 0.005, p' = -0.05 - 0.05·0.995
        assert_abs_diff_eq!(x.q, 0.995, epsilon = 1e-15);
        assert_abs_diff_eq!(x.p, -0.09975, epsilon = 1e-15);
        assert_eq!(x.s, 0.0);

        let x = verlet_step(&State::new(0.0, 1.0, 0.0), 0.5, &params(0.0), &FREE);
        assert_eq!(x, State::new(0.5, 1.0, 0.0));

        let x = verlet_step(
            &State::new(0.3, -2.0, 4.25),
            0.7,
            &params(0.5),
            &Cosine::new(1.0),
        );
        assert_eq!(x.s, 4.25);
    }

    #[test]
    fn exact_irreversible_flow_examples() {
        let p = params(1.0);
        let x = irreversible_flow_exact(&State::new(0.0, 2.0, 0.0), 2f64.ln(), &p);
        assert_abs_diff_eq!(x.p, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x.s, 1.5, epsilon = 1e-15);
        assert_eq!(x.q, 0.0);

        let x0 = State::new(0.4, -1.3, 0.2);
        assert_eq!(irreversible_flow_exact(&x0, 0.8, &params(0.0)), x0);
    }

    #[test]
    fn modified_flow_reduces_where_hessian_vanishes() {
        let p = params(0.3);
        let cos = Cosine::new(1.0);
        let x0 = State::new(std::f64::consts::FRAC_PI_2, 1.1, 0.0);
        let a = irreversible_flow_modified(&x0, 0.25, 0.5, &p, &cos);
        let b = irreversible_flow_exact(&x0, 0.25, &p);
        assert_abs_diff_eq!(a.p, b.p, epsilon = 1e-15);
        assert_abs_diff_eq!(a.s, b.s, epsilon = 1e-15);
        assert_eq!(
            irreversible_flow_modified(&x0, 0.25, 0.5, &params(0.0), &cos),
            x0
        );
    }

    #[test]
    fn ybaby_free_particle_example() {
        let h = 2.0 * 2f64.ln();
        let p = params(1.0);
        let x0 = State::new(0.0, 2.0, 0.0);
        let x = ybaby_step(&x0, h, &p, &FREE);
        assert_abs_diff_eq!(x.q, 2.0 * 2f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(x.p, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(x.s, 1.875, epsilon = 1e-14);
        assert_abs_diff_eq!(total_energy(&x0, &p, &FREE), 2.0);
        assert_abs_diff_eq!(total_energy(&x, &p, &FREE), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn ybaby_matches_printed_update_sequence() {
        // The seven scalar updates written out in order.
        let (m, g, t, h) = (1.3, 0.2, 0.7, 0.37);
        let p = SystemParams::new(m, g, t).unwrap();
        let pot = Cosine::new(1.1);
        let (q0, p0, s0) = (0.6, -0.8, 0.05);
        let f = |q: f64| pot.force(q);
        let p1 = (-g * h / 2.0).exp() * p0;
        let s_half = s0 + p0 * p0 * (1.0 - (-g * h).exp()) / (2.0 * m * t);
        let p2 = p1 + h / 2.0 * f(q0);
        let q1 = q0 + h / m * p2;
        let p3 = p2 + h / 2.0 * f(q1);
        let p4 = (-g * h / 2.0).exp() * p3;
        let s1 = s_half + p3 * p3 * (1.0 - (-g * h).exp()) / (2.0 * m * t);
        let x = ybaby_step(&State::new(q0, p0, s0), h, &p, &pot);
        assert_abs_diff_eq!(x.q, q1, epsilon = 1e-15);
        assert_abs_diff_eq!(x.p, p4, epsilon = 1e-15);
        assert_abs_diff_eq!(x.s, s1, epsilon = 1e-15);
    }

    #[test]
    fn rk3_examples() {
        let x = rk3_step(&State::new(0.0, 1.0, 0.0), 0.5, &params(0.0), &FREE);
        assert_eq!(x, State::new(0.5, 1.0, 0.0));

        // ẋ = x: k1 = 1, k2 = 1.05, k3 = 1.11, x' = 1 + 0.1/6·(1 + 4.2 + 1.11)
        let y = rk3_step_with(&[1.0], 0.1, |x| [x[0]]);
        assert_abs_diff_eq!(y[0], 1.0 + 0.1 + 0.005 + 0.001 / 6.0, epsilon = 1e-15);

        let z = rk3_step_with(&[0.3, -7.0, 2.0], 0.9, |_| [0.0; 3]);
        assert_eq!(z, [0.3, -7.0, 2.0]);
    }

    #[test]
    fn adg_examples() {
        let x = adg_step(&State::new(1.0, 0.0, 0.0), 2.0, &params(0.0), 1.0).unwrap();
        assert_abs_diff_eq!(x.q, 0.0);
        assert_abs_diff_eq!(x.p, -1.0);
        assert_eq!(x.s, 0.0);

        let err = Method::Adg
            .step(
                &State::new(1.0, 0.0, 0.0),
                0.1,
                &params(0.01),
                &Cosine::new(1.0),
            )
            .unwrap_err();
        assert!(matches!(err, Error::NotApplicable { .. }));
    }

    #[test]
    fn adg_conserves_energy_without_damping() {
        let p = params(0.0);
        let traj = integrate(
            &Method::Adg,
            State::new(1.0, 0.0, 0.0),
            0.5,
            1000,
            &p,
            &SPRING,
        )
        .unwrap();
        for e in traj.energies(&p, &SPRING) {
            assert_abs_diff_eq!(e, 0.5, epsilon = 1e-13);
        }
    }

    #[test]
    fn adg_decay_rate_example() {
        // -(1/0.5)·ln(4.24/4.26)
        let rate = adg_decay_rate(0.5, 1.0, &params(0.01));
        assert_abs_diff_eq!(rate, 0.009_411_782_074_825, epsilon = 1e-14);
        assert_abs_diff_eq!(
            modified_decay_rate(0.5, 1.0, &params(0.01)),
            0.01 * (1.0 + 0.25 / 6.0)
        );
    }

    #[test]
    fn integrate_basics() {
        let p = params(0.01);
        let x0 = State::new(1.0, 0.0, 0.0);
        let t = integrate(&Method::Ybaby, x0, 0.1, 0, &p, &SPRING).unwrap();
        assert_eq!(t.states, vec![x0]);

        let a = integrate(&Method::Mybaby, x0, 0.1, 500, &p, &Cosine::new(1.0)).unwrap();
        let b = integrate(&Method::Mybaby, x0, 0.1, 500, &p, &Cosine::new(1.0)).unwrap();
        assert_eq!(a.len(), 501);
        assert_eq!(a, b);
        assert_eq!(a.states[0], x0);
        assert_eq!(a.time(10), 10.0 * 0.1);
    }

    #[test]
    fn integrate_reports_blow_up() {
        // RK3 on a stiff spring diverges at a large stepsize.
        let p = params(0.0);
        let (traj, status) = integrate_partial(
            &Method::Rk3,
            State::new(1.0, 0.0, 0.0),
            3.0,
            10_000,
            &p,
            &Harmonic::new(1.0),
        );
        match status {
            Err(Error::NonFinite { step, valid_states }) => {
                assert_eq!(valid_states, traj.len());
                assert_eq!(step, valid_states);
                assert!(traj.states.iter().all(State::is_finite));
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
        assert!(matches!(
            integrate(
                &Method::Adg,
                State::default(),
                0.1,
                3,
                &p,
                &Cosine::new(1.0)
            ),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn steps_for_counts_whole_steps() {
        assert_eq!(steps_for(500.0, 0.1), 5000);
        assert_eq!(steps_for(500.0, 0.5), 1000);
        assert_eq!(steps_for(100.0, 0.03), 3333);
    }

    #[test]
    fn ybaby_plateau_in_energy_error() {
        let p = params(0.01);
        let traj = integrate(
            &Method::Ybaby,
            State::new(1.0, 0.0, 0.0),
            0.1,
            5000,
            &p,
            &SPRING,
        )
        .unwrap();
        let err: Vec<f64> = traj
            .energies(&p, &SPRING)
            .iter()
            .map(|e| (e - 0.5).abs())
            .collect();
        // After the transient the error envelope stops growing.
        let late = err[2500..].iter().cloned().fold(0.0, f64::max);
        let mid = err[1000..2500].iter().cloned().fold(0.0, f64::max);
        assert!(late < 1.05 * mid, "late {late} mid {mid}");
    }

    fn arb_state() -> impl Strategy<Value = State> {
        (-3.0..3.0f64, -3.0..3.0f64, -1.0..1.0f64).prop_map(|(q, p, s)| State::new(q, p, s))
    }

    proptest! {
        #[test]
        fn exact_flow_conserves_total_energy(x in arb_state(), dt in 0.0..2.0f64, g in 0.0..2.0f64, k in 0.1..3.0f64) {
            let p = params(g);
            let pot = Cosine::new(k);
            let before = total_energy(&x, &p, &pot);
            let after = total_energy(&irreversible_flow_exact(&x, dt, &p), &p, &pot);
            prop_assert!((after - before).abs() <= 1e-13 * before.abs().max(1.0));
        }

        #[test]
        fn modified_flow_conserves_modified_energy(x in arb_state(), dt in 0.0..2.0f64, h in 0.0..1.0f64, g in 0.0..2.0f64) {
            let p = params(g);
            let pot = Cosine::new(1.0);
            let before = modified_energy(&x, h, &p, &pot);
            let after = modified_energy(&irreversible_flow_modified(&x, dt, h, &p, &pot), h, &p, &pot);
            prop_assert!((after - before).abs() <= 1e-13 * before.abs().max(1.0));
        }

        #[test]
        fn split_methods_never_decrease_entropy(x in arb_state(), h in 0.01..3.0f64, g in 0.0..2.0f64, k in 0.1..3.0f64) {
            let p = params(g);
            for pot in [&Harmonic::new(k) as &dyn Potential, &Cosine::new(k)] {
                prop_assert!(ybaby_step(&x, h, &p, pot).s >= x.s);
                prop_assert!(mybaby_step(&x, h, &p, pot).s >= x.s);
            }
            // α can be negative for cos q < 0 with a big stepsize; the increment still cannot be.
            prop_assert!(adg_step(&x, h, &p, k).unwrap().s >= x.s);
        }

        #[test]
        fn reduction_chain_is_bitwise(x in arb_state(), h in 0.01..1.0f64, k in 0.1..3.0f64, g in 0.0..1.0f64) {
            let undamped = params(0.0);
            let pot = Cosine::new(k);
            let v = verlet_step(&x, h, &undamped, &pot);
            prop_assert_eq!(ybaby_step(&x, h, &undamped, &pot), v);
            prop_assert_eq!(mybaby_step(&x, h, &undamped, &pot), v);
            let damped = params(g);
            prop_assert_eq!(mybaby_step(&x, h, &damped, &FREE), ybaby_step(&x, h, &damped, &FREE));
        }

        #[test]
        fn steppers_are_deterministic(x in arb_state(), h in 0.01..1.0f64) {
            let p = params(0.1);
            for m in Method::ALL {
                let a = m.step(&x, h, &p, &SPRING).unwrap();
                let b = m.step(&x, h, &p, &SPRING).unwrap();
                prop_assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
            }
        }
    }
}
