//! Numerical checks of two gradient flows: the Rabinowitz flow on Fourier coefficients
//! and the heat flow of loops on the round two-sphere. Everything here is floating point
//! and every claim carries a tolerance.

mod heat;
mod rabinowitz;

pub use heat::{
    count_c1, heat_closed_form, heat_flow_check, heat_rhs, loop_point, pde_residual,
    residual_convergence, C1Count, ConvergenceFit, HeatReport, HeatState, OrientationRun,
};
pub use rabinowitz::{
    directional_derivative_check, gradient_identity, heteroclinic, integrate_rabinowitz,
    rabinowitz_rhs, Heteroclinic, RabinowitzRun, RabinowitzState,
};

use ode_solvers::{DVector, Dopri5, OutputType, System};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when a caller does not pick one.
pub const DEFAULT_RTOL: f64 = 1e-10;

/// Sampled solution of an ODE: `states[i]` at `s[i]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub s: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64])> {
        Some((*self.s.last()?, self.states.last()?.as_slice()))
    }

    /// Plain columnar text: `s`, the state components, then one extra column per record.
    pub fn to_columns(&self, extra: impl Fn(&[f64]) -> f64) -> String {
        let mut out = String::new();
        for (s, y) in self.s.iter().zip(&self.states) {
            let mut cols: Vec<String> = vec![format!("{s:.10e}")];
            cols.extend(y.iter().map(|v| format!("{v:.10e}")));
            cols.push(format!("{:.10e}", extra(y)));
            out.push_str(&cols.join(" "));
            out.push('\n');
        }
        out
    }
}

struct Field<F, S> {
    rhs: F,
    stop: S,
}

impl<F, S> System<f64, DVector<f64>> for Field<F, S>
where
    F: Fn(&[f64], &mut [f64]),
    S: FnMut(&[f64]) -> bool,
{
    fn system(&self, _s: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        (self.rhs)(y.as_slice(), dy.as_mut_slice());
    }

    fn solout(&mut self, _s: f64, y: &DVector<f64>, _dy: &DVector<f64>) -> bool {
        (self.stop)(y.as_slice())
    }
}

/// Dormand-Prince 5(4) from `s0` to `s1` (either direction), stopping early once `stop` holds.
/// The solution is sampled at accepted steps; the stepper's dense interpolation is not used.
pub(crate) fn solve<F, S>(
    rhs: F,
    stop: S,
    s0: f64,
    s1: f64,
    y0: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Trajectory>
where
    F: Fn(&[f64], &mut [f64]),
    S: FnMut(&[f64]) -> bool,
{
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(Error::BadParams("tolerances must be positive".into()));
    }
    let span = (s1 - s0).abs();
    let mut stepper = Dopri5::from_param(
        Field { rhs, stop },
        s0,
        s1,
        0.0,
        DVector::from_column_slice(y0),
        rtol,
        atol,
        0.9,
        0.04,
        0.2,
        10.0,
        span,
        0.0,
        2_000_000,
        u32::MAX,
        OutputType::Sparse,
    );
    stepper.integrate().map_err(|e| Error::StepFailure {
        s: match e {
            ode_solvers::dop_shared::IntegrationError::MaxNumStepReached { x, .. }
            | ode_solvers::dop_shared::IntegrationError::StepSizeUnderflow { x }
            | ode_solvers::dop_shared::IntegrationError::StiffnessDetected { x } => x,
        },
        reason: e.to_string(),
    })?;
    let (s, ys) = stepper.results().get();
    Ok(Trajectory {
        s: s.clone(),
        states: ys.iter().map(|y| y.as_slice().to_vec()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_both_directions() {
        let f = |y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let fwd = solve(f, |_: &[f64]| false, 0.0, 1.0, &[1.0], 1e-12, 1e-14).unwrap();
        let (s, y) = fwd.last().unwrap();
        assert!((s - 1.0).abs() < 1e-12 && (y[0] - 1f64.exp()).abs() < 1e-10);
        let back = solve(f, |_: &[f64]| false, 0.0, -1.0, &[1.0], 1e-12, 1e-14).unwrap();
        let (_, y) = back.last().unwrap();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn early_stop() {
        let f = |_: &[f64], dy: &mut [f64]| dy[0] = 1.0;
        let t = solve(f, |y: &[f64]| y[0] > 0.5, 0.0, 10.0, &[0.0], 1e-10, 1e-12).unwrap();
        assert!(t.last().unwrap().0 < 10.0);
    }
}
