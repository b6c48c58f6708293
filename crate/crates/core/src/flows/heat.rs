//! The heat flow of loops on the round two-sphere near the equator, in the rotation-
//! invariant family `v = (x, sqrt(1 - x^2) cos(2 pi t - y), sqrt(1 - x^2) sin(2 pi t - y))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{solve, DEFAULT_RTOL};
use crate::error::{Error, Result};

const RATE: f64 = 4.0 * PI * PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatState {
    pub x: f64,
    pub y: f64,
}

/// `x' = 4 pi^2 (1 - x^2) x`, `y' = 0`.
pub fn heat_rhs(s: HeatState) -> HeatState {
    HeatState {
        x: RATE * (1.0 - s.x * s.x) * s.x,
        y: 0.0,
    }
}

/// `x(s) = x0 / sqrt((1 - x0^2) e^(-8 pi^2 s) + x0^2)`.
pub fn heat_closed_form(x0: f64, s: f64) -> f64 {
    x0 / ((1.0 - x0 * x0) * (-2.0 * RATE * s).exp() + x0 * x0).sqrt()
}

/// The loop at time `s` through the closed form, with phase `y = 0`.
pub fn loop_point(x0: f64, s: f64, t: f64) -> [f64; 3] {
    let decay = (1.0 - x0 * x0) * (-2.0 * RATE * s).exp();
    let denom = decay + x0 * x0;
    let x = x0 / denom.sqrt();
    // sqrt(1 - x^2), written without cancellation
    let r = (decay / denom).sqrt();
    let theta = 2.0 * PI * t;
    [x, r * theta.cos(), r * theta.sin()]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeatReport {
    pub x0: f64,
    pub max_relative_error: f64,
    pub sign_preserved: bool,
    pub final_x: f64,
    /// `+1` or `-1` for the pole reached, `0` when the flow stays on the equator.
    pub pole: i8,
    pub y_constant: bool,
    pub within_tolerance: bool,
}

/// Integrates from `s = 0` to both ends of `span` and compares with the closed form.
pub fn heat_flow_check(x0: f64, span: (f64, f64), tol: f64) -> Result<HeatReport> {
    if x0.is_nan() || x0.abs() >= 1.0 {
        return Err(Error::BadParams(format!("x0 = {x0} is not in (-1, 1)")));
    }
    if !(span.0 <= 0.0 && span.1 >= 0.0) {
        return Err(Error::BadParams("the span must contain 0".into()));
    }
    let rhs = |v: &[f64], dv: &mut [f64]| {
        let d = heat_rhs(HeatState { x: v[0], y: v[1] });
        dv[0] = d.x;
        dv[1] = d.y;
    };
    let mut worst: f64 = 0.0;
    let mut sign_preserved = true;
    let mut y_constant = true;
    let mut final_x = x0;
    for end in [span.0, span.1] {
        if end == 0.0 {
            continue;
        }
        let t = solve(
            rhs,
            |_: &[f64]| false,
            0.0,
            end,
            &[x0, 0.0],
            DEFAULT_RTOL,
            1e-300,
        )?;
        for (s, v) in t.s.iter().zip(&t.states) {
            let exact = heat_closed_form(x0, *s);
            if exact != 0.0 {
                worst = worst.max((v[0] - exact).abs() / exact.abs());
            } else {
                worst = worst.max(v[0].abs());
            }
            sign_preserved &= v[0].signum() == x0.signum() || (x0 == 0.0 && v[0] == 0.0);
            y_constant &= v[1] == 0.0;
        }
        if end == span.1 {
            final_x = t.last().expect("nonempty").1[0];
        }
    }
    let pole = if x0 == 0.0 {
        0
    } else if (final_x.abs() - 1.0).abs() < 1e-6 {
        final_x.signum() as i8
    } else {
        0
    };
    Ok(HeatReport {
        x0,
        max_relative_error: worst,
        sign_preserved,
        final_x,
        pole,
        y_constant,
        within_tolerance: worst <= tol,
    })
}

/// Largest norm of `d_s v - d_t^2 v - |d_t v|^2 v` over a grid of `n_s` times in `s_range`
/// (interior points only) and `n_t` periodic points in `t`, by centred differences.
pub fn pde_residual(x0: f64, s_range: (f64, f64), n_s: usize, n_t: usize) -> f64 {
    let hs = (s_range.1 - s_range.0) / (n_s - 1) as f64;
    let ht = 1.0 / n_t as f64;
    let mut worst: f64 = 0.0;
    for i in 1..n_s - 1 {
        let s = s_range.0 + i as f64 * hs;
        for j in 0..n_t {
            let t = j as f64 * ht;
            let v = loop_point(x0, s, t);
            let (sp, sm) = (loop_point(x0, s + hs, t), loop_point(x0, s - hs, t));
            let (tp, tm) = (loop_point(x0, s, t + ht), loop_point(x0, s, t - ht));
            let dt: Vec<f64> = (0..3).map(|c| (tp[c] - tm[c]) / (2.0 * ht)).collect();
            let speed: f64 = dt.iter().map(|x| x * x).sum();
            let r: f64 = (0..3)
                .map(|c| {
                    let ds = (sp[c] - sm[c]) / (2.0 * hs);
                    let dtt = (tp[c] - 2.0 * v[c] + tm[c]) / (ht * ht);
                    (ds - dtt - speed * v[c]).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceFit {
    /// `(grid points per direction, residual)`.
    pub samples: Vec<(usize, f64)>,
    /// Least-squares slope of `log residual` against `log h`.
    pub order: f64,
}

/// Residuals on grids `base, 2 base, 4 base, ...` and the fitted order.
pub fn residual_convergence(
    x0: f64,
    s_range: (f64, f64),
    base: usize,
    refinements: usize,
) -> ConvergenceFit {
    let samples: Vec<(usize, f64)> = (0..=refinements)
        .map(|r| {
            let n = base << r;
            (n, pde_residual(x0, s_range, n, n))
        })
        .collect();
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(n, r)| ((1.0 / n as f64).ln(), r.ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    ConvergenceFit {
        samples,
        order: num / den,
    }
}

/// One simulated flow line leaving the equator, parametrised in a given direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrientationRun {
    /// `+1` for `t -> (0, cos 2 pi t, sin 2 pi t)`, `-1` for the reversed loop.
    pub orientation: i8,
    pub x0: f64,
    /// Largest distance of the final loop from the pole with the sign of `x0`.
    pub distance_to_pole: f64,
    pub reaches_north: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct C1Count {
    pub runs: Vec<OrientationRun>,
    pub count: usize,
}

const LOOP_POINTS: usize = 48;
const LOOP_HORIZON: f64 = 1.0;

/// Method of lines for the loop flow, written as the tangential part of the discrete
/// Laplacian so the sphere constraint is respected by the discretisation.
fn simulate_loop(orientation: i8, x0: f64) -> Result<OrientationRun> {
    let m = LOOP_POINTS;
    let h = 1.0 / m as f64;
    let r0 = (1.0 - x0 * x0).sqrt();
    let mut y0 = Vec::with_capacity(3 * m);
    for j in 0..m {
        let theta = 2.0 * PI * orientation as f64 * j as f64 * h;
        y0.extend([x0, r0 * theta.cos(), r0 * theta.sin()]);
    }
    let rhs = move |v: &[f64], dv: &mut [f64]| {
        for j in 0..m {
            let (p, q) = ((j + 1) % m, (j + m - 1) % m);
            let lap: [f64; 3] = std::array::from_fn(|c| {
                (v[3 * p + c] - 2.0 * v[3 * j + c] + v[3 * q + c]) / (h * h)
            });
            let normal: f64 = (0..3).map(|c| lap[c] * v[3 * j + c]).sum();
            for c in 0..3 {
                dv[3 * j + c] = lap[c] - normal * v[3 * j + c];
            }
        }
    };
    let t = solve(rhs, |_: &[f64]| false, 0.0, LOOP_HORIZON, &y0, 1e-9, 1e-12)?;
    let (_, last) = t.last().expect("nonempty");
    let pole = [x0.signum(), 0.0, 0.0];
    let distance_to_pole = (0..m)
        .map(|j| {
            (0..3)
                .map(|c| (last[3 * j + c] - pole[c]).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    Ok(OrientationRun {
        orientation,
        x0,
        distance_to_pole,
        reaches_north: x0 > 0.0 && distance_to_pole < 1e-6,
    })
}

/// Flow lines from the two orientations of the equator that end at the north pole.
pub fn count_c1() -> Result<C1Count> {
    let mut runs = Vec::new();
    for orientation in [1, -1] {
        for x0 in [0.01, -0.01] {
            runs.push(simulate_loop(orientation, x0)?);
        }
    }
    let count = [1i8, -1]
        .iter()
        .filter(|&&o| runs.iter().any(|r| r.orientation == o && r.reaches_north))
        .count();
    Ok(C1Count { runs, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_integration() {
        for x0 in [0.5, -0.5] {
            let r = heat_flow_check(x0, (-0.2, 1.0), 1e-8).unwrap();
            assert!(r.within_tolerance, "x0 = {x0}: {}", r.max_relative_error);
            assert!(r.sign_preserved && r.y_constant);
            assert_eq!(r.pole, x0.signum() as i8);
        }
        let still = heat_flow_check(0.0, (-0.2, 1.0), 1e-8).unwrap();
        assert_eq!((still.final_x, still.pole), (0.0, 0));
    }

    #[test]
    fn closed_form_solves_the_loop_equation() {
        // halving h quarters the residual; on the equator only the discretisation error remains
        for x0 in [0.3, 0.0] {
            let fit = residual_convergence(x0, (-0.05, 0.05), 50, 2);
            assert!(
                (fit.order - 2.0).abs() < 0.05,
                "x0 = {x0}: order {}",
                fit.order
            );
        }
        // on the equator the residual is the gap between the discrete second derivative and
        // the discrete speed of a unit circle: 4 sin^2(pi h) / h^2 - sin^2(2 pi h) / h^2
        let h = 1.0 / 200.0;
        let gap = (4.0 * (PI * h).sin().powi(2) - (2.0 * PI * h).sin().powi(2)) / (h * h);
        assert!((pde_residual(0.0, (-0.05, 0.05), 200, 200) - gap).abs() < 1e-9);
    }

    #[test]
    fn both_orientations_reach_the_north_pole() {
        let c = count_c1().unwrap();
        assert_eq!(c.count, 2);
        assert!(c.runs.iter().all(|r| r.distance_to_pole < 1e-6));
    }
}
