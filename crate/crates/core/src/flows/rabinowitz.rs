//! The positive gradient flow of the Rabinowitz action for the unit circle in `C`,
//! truncated to a finite window of Fourier modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{solve, Trajectory};
use crate::error::{Error, Result};

/// Fourier coefficients `z_k` for `k = k_min .. k_min + z.len() - 1` and the multiplier `eta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RabinowitzState {
    pub k_min: i64,
    pub z: Vec<Complex64>,
    pub eta: f64,
}

impl RabinowitzState {
    pub fn zero(k_min: i64, k_max: i64, eta: f64) -> Self {
        assert!(k_min <= k_max, "empty mode window");
        RabinowitzState {
            k_min,
            z: vec![Complex64::new(0.0, 0.0); (k_max - k_min + 1) as usize],
            eta,
        }
    }

    /// The critical pair `(e^(2 pi i l t), l)` inside the window.
    pub fn critical(level: i64, k_min: i64, k_max: i64) -> Self {
        let mut s = Self::zero(k_min, k_max, level as f64);
        *s.mode_mut(level) = Complex64::new(1.0, 0.0);
        s
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.z.len() as i64 - 1
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.z
            .iter()
            .enumerate()
            .map(|(i, z)| (self.k_min + i as i64, *z))
    }

    pub fn mode(&self, k: i64) -> Complex64 {
        self.z[(k - self.k_min) as usize]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut Complex64 {
        &mut self.z[(k - self.k_min) as usize]
    }

    pub fn norm_sq(&self) -> f64 {
        self.z.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `pi sum k |z_k|^2 - eta pi (|z|^2 - 1)`.
    pub fn action(&self) -> f64 {
        let symplectic: f64 = self.modes().map(|(k, z)| k as f64 * z.norm_sqr()).sum();
        PI * symplectic - self.eta * PI * (self.norm_sq() - 1.0)
    }

    /// `(-i dz/dt - 2 pi eta z, -pi (|z|^2 - 1))`, with `dz/dt` taken mode by mode.
    pub fn gradient(&self) -> RabinowitzState {
        let i = Complex64::new(0.0, 1.0);
        let z = self
            .modes()
            .map(|(k, zk)| {
                let dz_dt = i * (2.0 * PI * k as f64) * zk;
                -i * dz_dt - 2.0 * PI * self.eta * zk
            })
            .collect();
        RabinowitzState {
            k_min: self.k_min,
            z,
            eta: -PI * (self.norm_sq() - 1.0),
        }
    }

    /// Real `L^2` inner product plus the product of the multipliers.
    pub fn dot(&self, other: &RabinowitzState) -> f64 {
        let zs: f64 = self
            .z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        zs + self.eta * other.eta
    }

    pub fn axpy(&self, c: f64, other: &RabinowitzState) -> RabinowitzState {
        RabinowitzState {
            k_min: self.k_min,
            z: self
                .z
                .iter()
                .zip(&other.z)
                .map(|(a, b)| a + b * c)
                .collect(),
            eta: self.eta + c * other.eta,
        }
    }

    /// Real coordinates `re z_kmin, im z_kmin, ..., eta`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.z.iter().flat_map(|z| [z.re, z.im]).collect();
        v.push(self.eta);
        v
    }

    pub fn from_slice(k_min: i64, v: &[f64]) -> Self {
        let n = (v.len() - 1) / 2;
        RabinowitzState {
            k_min,
            z: (0..n)
                .map(|i| Complex64::new(v[2 * i], v[2 * i + 1]))
                .collect(),
            eta: v[2 * n],
        }
    }

    /// Distance to the circle of critical pairs at `level`.
    pub fn distance_to_critical(&self, level: i64) -> f64 {
        let off: f64 = self
            .modes()
            .filter(|(k, _)| *k != level)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        let on = if (self.k_min..=self.k_max()).contains(&level) {
            (self.mode(level).norm() - 1.0).powi(2)
        } else {
            1.0
        };
        (off + on + (self.eta - level as f64).powi(2)).sqrt()
    }

    /// Closest critical level in the window and its distance.
    pub fn nearest_critical(&self) -> (i64, f64) {
        (self.k_min..=self.k_max())
            .map(|l| (l, self.distance_to_critical(l)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty window")
    }
}

/// `z_k' = 2 pi (k - eta) z_k`, `eta' = -pi (|z|^2 - 1)`.
pub fn rabinowitz_rhs(s: &RabinowitzState) -> RabinowitzState {
    RabinowitzState {
        k_min: s.k_min,
        z: s.modes()
            .map(|(k, z)| z * (2.0 * PI * (k as f64 - s.eta)))
            .collect(),
        eta: -PI * (s.norm_sq() - 1.0),
    }
}

fn flat_rhs(k_min: i64) -> impl Fn(&[f64], &mut [f64]) {
    move |y, dy| {
        let n = (y.len() - 1) / 2;
        let eta = y[2 * n];
        let mut norm = 0.0;
        for i in 0..n {
            let rate = 2.0 * PI * ((k_min + i as i64) as f64 - eta);
            dy[2 * i] = rate * y[2 * i];
            dy[2 * i + 1] = rate * y[2 * i + 1];
            norm += y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1];
        }
        dy[2 * n] = -PI * (norm - 1.0);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RabinowitzRun {
    pub k_min: i64,
    pub trajectory: Trajectory,
    /// Largest `|z_k|` reached by modes that started at zero.
    pub drift: f64,
    /// The action never decreased by more than the tolerance between samples.
    pub action_monotone: bool,
    pub nearest_critical: (i64, f64),
    pub tolerance: f64,
}

impl RabinowitzRun {
    pub fn state(&self, i: usize) -> RabinowitzState {
        RabinowitzState::from_slice(self.k_min, &self.trajectory.states[i])
    }

    pub fn final_state(&self) -> RabinowitzState {
        self.state(self.trajectory.len() - 1)
    }

    /// Columns `s`, state, action.
    pub fn dump(&self) -> String {
        let k_min = self.k_min;
        self.trajectory
            .to_columns(|y| RabinowitzState::from_slice(k_min, y).action())
    }
}

/// Integrates over `[0, s_span]` with relative tolerance `tol`, sampling every accepted step.
pub fn integrate_rabinowitz(
    start: &RabinowitzState,
    s_span: f64,
    tol: f64,
) -> Result<RabinowitzRun> {
    if tol <= 0.0 {
        return Err(Error::BadParams("tolerance must be positive".into()));
    }
    let k_min = start.k_min;
    let trajectory = solve(
        flat_rhs(k_min),
        |_: &[f64]| false,
        0.0,
        s_span,
        &start.to_vec(),
        tol,
        tol * 1e-2,
    )?;
    let zero_modes: Vec<usize> = start
        .z
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() == 0.0)
        .map(|(i, _)| i)
        .collect();
    let drift = trajectory
        .states
        .iter()
        .flat_map(|y| {
            zero_modes
                .iter()
                .map(move |&i| y[2 * i].hypot(y[2 * i + 1]))
        })
        .fold(0.0, f64::max);
    let actions: Vec<f64> = trajectory
        .states
        .iter()
        .map(|y| RabinowitzState::from_slice(k_min, y).action())
        .collect();
    let action_monotone = actions
        .windows(2)
        .all(|w| w[1] >= w[0] - tol * (1.0 + w[0].abs()));
    let last =
        RabinowitzState::from_slice(k_min, trajectory.states.last().expect("at least the start"));
    Ok(RabinowitzRun {
        k_min,
        nearest_critical: last.nearest_critical(),
        trajectory,
        drift,
        action_monotone,
        tolerance: tol,
    })
}

/// Largest relative gap between a centred difference of the action along the flow and
/// `|grad A|^2`, over `samples` points of a run from `start`.
pub fn gradient_identity(start: &RabinowitzState, s_span: f64, samples: usize) -> Result<f64> {
    let run = integrate_rabinowitz(start, s_span, 1e-12)?;
    let steps = run.trajectory.len();
    if samples == 0 || steps < 2 {
        return Err(Error::BadParams(
            "need at least one sample and one step".into(),
        ));
    }
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for n in 0..samples {
        let x = run.state(n * (steps - 1) / samples);
        let ahead = integrate_rabinowitz(&x, h, 1e-14)?.final_state().action();
        let behind = integrate_rabinowitz(&x, -h, 1e-14)?.final_state().action();
        let centred = (ahead - behind) / (2.0 * h);
        let g = x.gradient();
        let expected = g.dot(&g);
        worst = worst.max((centred - expected).abs() / expected.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Largest relative gap between `<grad A, d>` and a centred difference of the action in
/// direction `d`, over `count` random unit-scale directions at `at`.
pub fn directional_derivative_check(at: &RabinowitzState, count: usize, rng: &mut impl Rng) -> f64 {
    let h = 1e-5;
    let g = at.gradient();
    (0..count)
        .map(|_| {
            let mut d = RabinowitzState::zero(at.k_min, at.k_max(), rng.gen_range(-1.0..1.0));
            for z in d.z.iter_mut() {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let fd = (at.axpy(h, &d).action() - at.axpy(-h, &d).action()) / (2.0 * h);
            let exact = g.dot(&d);
            (fd - exact).abs() / exact.abs().max(1e-3)
        })
        .fold(0.0, f64::max)
}

/// A connecting orbit from the critical pair at `from` to the one at `from + 1`, inside the
/// invariant subspace of those two modes with real coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Heteroclinic {
    pub from: i64,
    /// Angle in the two-dimensional unstable plane at the start.
    pub angle: f64,
    pub start_action: f64,
    /// Action at the point of closest approach to the target pair.
    pub end_action: f64,
    pub closest_distance: f64,
    pub trajectory: Trajectory,
}

const UNSTABLE_OFFSET: f64 = 1e-7;
const SHOOTING_HORIZON: f64 = 40.0;

fn shooting_start(from: i64, angle: f64) -> RabinowitzState {
    let mut s = RabinowitzState::critical(from, from, from + 1);
    // both unstable directions grow at rate 2 pi: (dz_from, dz_(from+1), d eta) = (1, 0, -1)/sqrt 2 and (0, 1, 0)
    let (c, sn) = (
        UNSTABLE_OFFSET * angle.cos() / 2f64.sqrt(),
        UNSTABLE_OFFSET * angle.sin(),
    );
    *s.mode_mut(from) += c;
    *s.mode_mut(from + 1) += sn;
    s.eta -= c;
    s
}

/// +1 when the upper mode runs away, -1 when the loop collapses towards zero.
fn shoot(from: i64, angle: f64) -> Result<(i8, Trajectory)> {
    let start = shooting_start(from, angle);
    // flat layout (re z_from, im z_from, re z_(from+1), im z_(from+1), eta)
    let upper = |y: &[f64]| y[2].abs() > 1.5;
    let collapsed = |y: &[f64]| y[..4].iter().map(|v| v * v).sum::<f64>() < 0.25;
    let t = solve(
        flat_rhs(from),
        |y: &[f64]| upper(y) || collapsed(y),
        0.0,
        SHOOTING_HORIZON,
        &start.to_vec(),
        1e-12,
        1e-15,
    )?;
    let (_, y) = t.last().expect("nonempty");
    let side = if upper(y) {
        1
    } else if collapsed(y) {
        -1
    } else {
        0
    };
    Ok((side, t))
}

/// Finds the connecting orbit by bisecting the launch angle between runaway and collapse.
pub fn heteroclinic(from: i64) -> Result<Heteroclinic> {
    let grid: Vec<f64> = (1..40).map(|i| PI * i as f64 / 40.0).collect();
    let sides: Vec<i8> = grid
        .iter()
        .map(|&a| shoot(from, a).map(|r| r.0))
        .collect::<Result<_>>()?;
    let idx = (0..grid.len() - 1)
        .find(|&i| sides[i] != 0 && sides[i + 1] != 0 && sides[i] != sides[i + 1])
        .ok_or_else(|| Error::BadParams("no change of outcome across launch angles".into()))?;
    let (mut lo, mut hi, lo_side) = (grid[idx], grid[idx + 1], sides[idx]);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shoot(from, mid)?.0 == lo_side {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let angle = 0.5 * (lo + hi);
    let (_, trajectory) = shoot(from, angle)?;
    let states: Vec<RabinowitzState> = trajectory
        .states
        .iter()
        .map(|y| RabinowitzState::from_slice(from, y))
        .collect();
    let closest = states
        .iter()
        .min_by(|a, b| {
            a.distance_to_critical(from + 1)
                .total_cmp(&b.distance_to_critical(from + 1))
        })
        .expect("nonempty");
    Ok(Heteroclinic {
        from,
        angle,
        start_action: states[0].action(),
        end_action: closest.action(),
        closest_distance: closest.distance_to_critical(from + 1),
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn critical_pairs_are_stationary() {
        for l in -2..=2 {
            let c = RabinowitzState::critical(l, -3, 3);
            let d = rabinowitz_rhs(&c);
            assert!(d.dot(&d) == 0.0, "level {l}");
            assert!((c.action() - PI * l as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn origin_pushes_the_multiplier() {
        let d = rabinowitz_rhs(&RabinowitzState::zero(-2, 2, 0.0));
        assert_eq!(d.eta, PI);
        assert!(d.z.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn two_modes_match_a_hand_written_field() {
        // modes 0 and 1, coordinates (re z0, im z0, re z1, im z1, eta)
        let y = [0.3, -0.2, 0.7, 0.1, 0.4];
        let n = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
        let expected = [
            -2.0 * PI * y[4] * y[0],
            -2.0 * PI * y[4] * y[1],
            2.0 * PI * (1.0 - y[4]) * y[2],
            2.0 * PI * (1.0 - y[4]) * y[3],
            -PI * (n - 1.0),
        ];
        let got = rabinowitz_rhs(&RabinowitzState::from_slice(0, &y)).to_vec();
        for (a, b) in got.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        // the gradient written with dz/dt agrees with the flow field
        let s = RabinowitzState::from_slice(0, &y);
        let diff = s.gradient().axpy(-1.0, &rabinowitz_rhs(&s));
        assert!(diff.dot(&diff).sqrt() < 1e-14);
    }

    #[test]
    fn invariant_subspace_and_stationary_start() {
        let mut s = RabinowitzState::zero(-1, 2, 0.2);
        *s.mode_mut(0) = Complex64::new(0.8, 0.1);
        *s.mode_mut(1) = Complex64::new(0.3, -0.2);
        // this start blows up near s = 0.46
        let run = integrate_rabinowitz(&s, 0.3, 1e-10).unwrap();
        assert!(run.drift <= 1e-12);
        assert!(run.action_monotone);
        let crit = integrate_rabinowitz(&RabinowitzState::critical(1, -1, 2), 1.0, 1e-10).unwrap();
        assert!(crit.final_state().distance_to_critical(1) <= 1e-12);
    }

    #[test]
    fn gradient_identity_and_directions() {
        let mut s = RabinowitzState::zero(-2, 2, 0.3);
        for (k, z) in [
            (-2, (0.2, 0.1)),
            (-1, (0.3, -0.4)),
            (0, (0.5, 0.2)),
            (1, (-0.2, 0.3)),
            (2, (0.1, 0.1)),
        ] {
            *s.mode_mut(k) = Complex64::new(z.0, z.1);
        }
        assert!(gradient_identity(&s, 0.3, 20).unwrap() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(directional_derivative_check(&s, 20, &mut rng) < 1e-6);
    }

    #[test]
    fn connecting_orbit_between_neighbours() {
        let h = heteroclinic(0).unwrap();
        assert!(h.start_action.abs() < 1e-6);
        assert!(
            (h.end_action - PI).abs() < 1e-6,
            "end action {}",
            h.end_action
        );
    }
}
