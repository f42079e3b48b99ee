//! Closed- and open-loop simulation of the plant recursion
//! `x_{k+1} = A x_k + B u_k + w_k + eta_k`.

use crate::numerics::{gaussian_stream, vec_norm, GaussianStream, RngSpec};

use super::system::LinearSystem;
use super::unmodeled::UnmodeledMap;
use super::DynamicsError;

/// Norm guard above which a simulation is declared divergent.
pub const DEFAULT_STATE_GUARD: f64 = 1e12;

/// A fully recorded simulation: `T + 1` states and `T` of each of inputs,
/// unmodeled disturbances, and noise draws, so the recursion can be replayed
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub unmodeled: Vec<Vec<f64>>,
    pub noises: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Number of transitions (inputs), not states.
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory always has an initial state")
    }

    /// Regressor `phi_k = [x_k; u_k]`.
    pub fn regressor(&self, k: usize) -> Vec<f64> {
        let mut phi = self.states[k].clone();
        phi.extend_from_slice(&self.inputs[k]);
        phi
    }

    /// All regressors `phi_0 .. phi_{T-1}`.
    pub fn regressors(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.regressor(k)).collect()
    }

    /// Append a continuation segment. The segment's initial state must equal
    /// this trajectory's final state (it is dropped to avoid duplication).
    pub fn extend(&mut self, segment: Trajectory) {
        assert_eq!(
            self.final_state(),
            segment.states[0].as_slice(),
            "segment does not continue this trajectory"
        );
        self.states.extend(segment.states.into_iter().skip(1));
        self.inputs.extend(segment.inputs);
        self.unmodeled.extend(segment.unmodeled);
        self.noises.extend(segment.noises);
    }

    /// CSV export: `k, x_1..x_n, u_1..u_m, w_1..w_n`, one row per
    /// transition index `k = 0..T-1`, full-precision floats.
    pub fn to_csv(&self) -> String {
        let n = self.state_dim();
        let m = self.input_dim();
        let mut out = String::from("k");
        for i in 1..=n {
            out.push_str(&format!(",x_{i}"));
        }
        for i in 1..=m {
            out.push_str(&format!(",u_{i}"));
        }
        for i in 1..=n {
            out.push_str(&format!(",w_{i}"));
        }
        out.push('\n');
        for k in 0..self.len() {
            out.push_str(&k.to_string());
            for v in &self.states[k] {
                out.push_str(&format!(",{v:.16e}"));
            }
            for v in &self.inputs[k] {
                out.push_str(&format!(",{v:.16e}"));
            }
            for v in &self.unmodeled[k] {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Simulate `t_len` steps with a caller-owned noise stream and an explicit
/// divergence guard, starting from `x0`. The `policy` sees the step index
/// and current state; the unmodeled map is advanced through the simulation
/// and its outputs recorded.
pub fn simulate_with(
    system: &LinearSystem,
    map: &mut dyn UnmodeledMap,
    policy: &mut dyn FnMut(usize, &[f64]) -> Vec<f64>,
    t_len: usize,
    stream: &mut GaussianStream,
    x0: &[f64],
    guard: f64,
) -> Result<Trajectory, DynamicsError> {
    let n = system.state_dim();
    let m = system.input_dim();
    if x0.len() != n {
        return Err(DynamicsError::DimensionMismatch(format!(
            "initial state has length {}, plant expects {n}",
            x0.len()
        )));
    }

    let mut states = Vec::with_capacity(t_len + 1);
    let mut inputs = Vec::with_capacity(t_len);
    let mut unmodeled = Vec::with_capacity(t_len);
    let mut noises = Vec::with_capacity(t_len);
    states.push(x0.to_vec());

    for k in 0..t_len {
        let x = states.last().unwrap().clone();
        let u = policy(k, &x);
        if u.len() != m {
            return Err(DynamicsError::DimensionMismatch(format!(
                "policy returned an input of length {}, plant expects {m}",
                u.len()
            )));
        }
        let w = map.step(&u);
        if w.len() != n {
            return Err(DynamicsError::DimensionMismatch(format!(
                "unmodeled map returned length {}, plant expects {n}",
                w.len()
            )));
        }
        let eta: Vec<f64> = if system.sigma > 0.0 {
            (0..n).map(|_| system.sigma * stream.gaussian()).collect()
        } else {
            vec![0.0; n]
        };
        let mut next = system.step(&x, &u);
        for i in 0..n {
            next[i] += w[i] + eta[i];
        }
        let norm = vec_norm(&next);
        if !norm.is_finite() || norm > guard {
            return Err(DynamicsError::StateBlowup { step: k, norm });
        }
        states.push(next);
        inputs.push(u);
        unmodeled.push(w);
        noises.push(eta);
    }

    Ok(Trajectory { states, inputs, unmodeled, noises })
}

/// Simulate with a fresh noise stream drawn from `rng` and the default
/// divergence guard.
pub fn simulate(
    system: &LinearSystem,
    map: &mut dyn UnmodeledMap,
    policy: &mut dyn FnMut(usize, &[f64]) -> Vec<f64>,
    t_len: usize,
    rng: RngSpec,
    x0: &[f64],
) -> Result<Trajectory, DynamicsError> {
    let mut stream = gaussian_stream(rng);
    simulate_with(system, map, policy, t_len, &mut stream, x0, DEFAULT_STATE_GUARD)
}
