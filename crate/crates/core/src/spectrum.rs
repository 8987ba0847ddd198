//! General-energy spectra by transfer matrices.
//!
//! Away from spikes `psi'' = -(E/gamma) psi`, so over a spike-free segment
//! of width `d` the pair `(psi, psi')` propagates linearly:
//!
//! ```text
//! | psi  |        |      C        S | | psi  |
//! |      |   ->   |                 | |      |
//! | psi' |        | -(E/gamma)S   C | | psi' |
//! ```
//!
//! with `C = cos(sqrt(u))`, `S = d sin(sqrt(u))/sqrt(u)`, `u = (E/gamma)d^2`
//! for `E > 0`, and the `cosh`/`sinh` analogues for `E < 0`. Near `u = 0`
//! both pairs collapse to the same Taylor series, which is what the code
//! uses there — the shooting function is smooth through `E = 0`, no special
//! casing, no 0/0. Each spike adds `(c/gamma) psi` to the derivative.
//!
//! An energy is an eigenvalue exactly when the shot from `(0, 1)` at the
//! left wall lands on zero at the right wall, so eigenvalues are the roots
//! of `f(E) = psi_E(wall_right)`, found by grid scan plus bisection.

use thiserror::Error;

use crate::model::{DeltaPotential, WellConfig};

pub const DEFAULT_GRID_N: u32 = 2000;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Uniform intervals used when sampling a shot densely (node counting).
pub const NODE_SAMPLING_INTERVALS: usize = 4096;
/// Uniform sample points stored per eigenvalue in a [`SpectrumResult`].
pub const EIGENVALUE_SAMPLE_POINTS: usize = 129;
/// Wall residual (relative to the largest amplitude of the shot) above
/// which an energy is rejected as "not an eigenvalue".
pub const EIGEN_RESIDUAL_REL_TOL: f64 = 1e-6;

const MAX_BISECTIONS: u32 = 200;
/// Below this |u| the closed forms lose digits to cancellation; switch to
/// the shared Taylor series (error ~ u^3/5040 < 1e-22).
const SERIES_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("scan range must satisfy e_min < e_max with both finite")]
    BadRange,
    #[error("scan grid needs at least two points")]
    GridTooSmall,
    #[error("bisection tolerance must be positive and finite")]
    BadTolerance,
    #[error("sampling needs at least two points")]
    TooFewSamples,
    #[error("E = {energy} is not an eigenvalue: wall residual {residual:e} relative to the peak amplitude")]
    NotAnEigenvalue { energy: f64, residual: f64 },
}

/// Shooting state at a point: amplitude and derivative. Never both zero
/// along a shot (the propagators are invertible and spikes only shear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorState {
    pub psi: f64,
    pub dpsi: f64,
}

/// Scan window and root-polish settings for [`find_eigenvalues`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub e_min: f64,
    pub e_max: f64,
    pub grid_n: u32,
    pub tol: f64,
}

impl ScanParams {
    /// Default window for a well: `[-10, +40] * gamma / L^2` with
    /// `L = width/2`, which covers the lowest few levels of any
    /// desk-scale potential (the bare well's first four positive levels
    /// land at `(n pi / 2)^2 * gamma / L^2`, all below 40).
    pub fn default_for(config: &WellConfig) -> ScanParams {
        let width = config.wall_right().to_f64() - config.wall_left().to_f64();
        let half = width / 2.0;
        let scale = config.gamma().to_f64() / (half * half);
        ScanParams {
            e_min: -10.0 * scale,
            e_max: 40.0 * scale,
            grid_n: DEFAULT_GRID_N,
            tol: DEFAULT_TOL,
        }
    }

    fn validate(&self) -> Result<(), SpectrumError> {
        if !self.e_min.is_finite() || !self.e_max.is_finite() || self.e_min >= self.e_max {
            return Err(SpectrumError::BadRange);
        }
        if self.grid_n < 2 {
            return Err(SpectrumError::GridTooSmall);
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(SpectrumError::BadTolerance);
        }
        Ok(())
    }
}

/// One eigenvalue found by the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue {
    pub energy: f64,
    /// Interior nodes of the eigenfunction (0 for the ground state).
    pub nodes: u32,
    /// `|psi(wall_right)|` at the polished energy, relative to the peak.
    pub residual: f64,
    /// `(x, psi)` pairs, max-normalized to 1.
    pub samples: Vec<(f64, f64)>,
}

/// A sign-change bracket the bisection failed to polish within budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketFailure {
    pub e_lo: f64,
    pub e_hi: f64,
}

/// The scan window actually used (recorded in reports).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanInfo {
    pub e_min: f64,
    pub e_max: f64,
    pub grid_n: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub scan: ScanInfo,
    pub eigenvalues: Vec<Eigenvalue>,
    pub failures: Vec<BracketFailure>,
}

/// Float view of a potential, converted once per scan.
struct FloatPotential {
    a: f64,
    b: f64,
    gamma: f64,
    spikes: Vec<(f64, f64)>,
}

impl FloatPotential {
    fn of(potential: &DeltaPotential) -> FloatPotential {
        FloatPotential {
            a: potential.config().wall_left().to_f64(),
            b: potential.config().wall_right().to_f64(),
            gamma: potential.config().gamma().to_f64(),
            spikes: potential
                .spikes()
                .iter()
                .map(|s| (s.position().to_f64(), s.coefficient().to_f64()))
                .collect(),
        }
    }
}

/// Segment propagator coefficients `(C, S)` for width `d` at `E/gamma`.
fn propagator_coeffs(e_over_gamma: f64, d: f64) -> (f64, f64) {
    let u = e_over_gamma * d * d;
    if u.abs() < SERIES_THRESHOLD {
        let c = 1.0 - u / 2.0 + u * u / 24.0;
        let s = d * (1.0 - u / 6.0 + u * u / 120.0);
        (c, s)
    } else if u > 0.0 {
        let r = u.sqrt();
        (r.cos(), d * r.sin() / r)
    } else {
        let r = (-u).sqrt();
        (r.cosh(), d * r.sinh() / r)
    }
}

fn propagate(state: PropagatorState, e_over_gamma: f64, d: f64) -> PropagatorState {
    let (c, s) = propagator_coeffs(e_over_gamma, d);
    PropagatorState {
        psi: c * state.psi + s * state.dpsi,
        dpsi: -e_over_gamma * s * state.psi + c * state.dpsi,
    }
}

fn shoot_impl(p: &FloatPotential, energy: f64) -> f64 {
    let e_over_gamma = energy / p.gamma;
    let mut state = PropagatorState {
        psi: 0.0,
        dpsi: 1.0,
    };
    let mut x = p.a;
    for &(x0, c) in &p.spikes {
        state = propagate(state, e_over_gamma, x0 - x);
        state.dpsi += (c / p.gamma) * state.psi;
        x = x0;
    }
    state = propagate(state, e_over_gamma, p.b - x);
    debug_assert!(
        state.psi != 0.0 || state.dpsi != 0.0,
        "propagators are invertible; the shot cannot vanish identically"
    );
    state.psi
}

/// Wall amplitude of the energy-`E` shot: `f(E) = psi_E(wall_right)` with
/// `psi(wall_left) = 0`, `psi'(wall_left) = 1`. Roots are eigenvalues.
/// Smooth through `E = 0`; for the bare well `f(0) = width` exactly.
pub fn shoot(potential: &DeltaPotential, energy: f64) -> f64 {
    shoot_impl(&FloatPotential::of(potential), energy)
}

/// Sample positions: `intervals` uniform steps over `[a, b]` plus every
/// spike position, sorted and deduplicated.
fn sample_positions(p: &FloatPotential, intervals: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=intervals)
        .map(|i| p.a + (p.b - p.a) * (i as f64) / (intervals as f64))
        .collect();
    xs.extend(p.spikes.iter().map(|&(x, _)| x));
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite positions"));
    xs.dedup();
    xs
}

/// Amplitudes of the energy-`E` shot at ascending positions `xs`. Each
/// value is propagated from the start of its containing segment, so the
/// result at any `x` does not depend on which other points were requested.
fn sample_values(p: &FloatPotential, energy: f64, xs: &[f64]) -> Vec<f64> {
    let e_over_gamma = energy / p.gamma;
    let mut values = Vec::with_capacity(xs.len());
    let mut state = PropagatorState {
        psi: 0.0,
        dpsi: 1.0,
    };
    let mut seg_start = p.a;
    let mut next_spike = 0;
    for &x in xs {
        while next_spike < p.spikes.len() && p.spikes[next_spike].0 <= x {
            let (x0, c) = p.spikes[next_spike];
            state = propagate(state, e_over_gamma, x0 - seg_start);
            state.dpsi += (c / p.gamma) * state.psi;
            seg_start = x0;
            next_spike += 1;
        }
        let here = propagate(state, e_over_gamma, x - seg_start);
        values.push(here.psi);
    }
    values
}

/// Interior sign changes of a dense sample (walls excluded). Exact zeros
/// are skipped rather than double-counted.
fn count_nodes(values: &[f64]) -> u32 {
    let interior = &values[1..values.len() - 1];
    let mut nodes = 0;
    let mut last_sign = 0i8;
    for &v in interior {
        let sign = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                nodes += 1;
            }
            last_sign = sign;
        }
    }
    nodes
}

fn bisect(p: &FloatPotential, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Option<f64> {
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            return Some(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval no longer splittable in f64
            return if hi - lo <= tol { Some(mid) } else { None };
        }
        let f_mid = shoot_impl(p, mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_lo < 0.0) == (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol {
        Some(0.5 * (lo + hi))
    } else {
        None
    }
}

/// Characterizes one polished root: residual, node count, stored samples.
fn describe_eigenvalue(p: &FloatPotential, energy: f64) -> Eigenvalue {
    let dense_xs = sample_positions(p, NODE_SAMPLING_INTERVALS);
    let dense = sample_values(p, energy, &dense_xs);
    let peak = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = if peak > 0.0 {
        dense.last().unwrap().abs() / peak
    } else {
        0.0
    };
    let nodes = count_nodes(&dense);

    let stored_xs = sample_positions(p, EIGENVALUE_SAMPLE_POINTS - 1);
    let stored = sample_values(p, energy, &stored_xs);
    let stored_peak = stored.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if stored_peak > 0.0 {
        1.0 / stored_peak
    } else {
        1.0
    };
    let samples = stored_xs
        .iter()
        .zip(&stored)
        .map(|(&x, &v)| (x, v * scale))
        .collect();

    Eigenvalue {
        energy,
        nodes,
        residual,
        samples,
    }
}

/// Scans `f(E)` on a uniform grid, polishes every sign change by bisection,
/// and reports eigenvalues in ascending energy order. Brackets the
/// bisection cannot close within budget land in `failures` instead of
/// being silently dropped.
pub fn find_eigenvalues(
    potential: &DeltaPotential,
    params: &ScanParams,
) -> Result<SpectrumResult, SpectrumError> {
    params.validate()?;
    let p = FloatPotential::of(potential);
    let n = params.grid_n as usize;
    let step = (params.e_max - params.e_min) / ((n - 1) as f64);
    let energies: Vec<f64> = (0..n).map(|i| params.e_min + step * i as f64).collect();
    let f: Vec<f64> = energies.iter().map(|&e| shoot_impl(&p, e)).collect();

    let mut eigenvalues = Vec::new();
    let mut failures = Vec::new();
    for i in 0..n {
        if f[i] == 0.0 {
            eigenvalues.push(describe_eigenvalue(&p, energies[i]));
            continue;
        }
        if i + 1 < n && f[i + 1] != 0.0 && (f[i] < 0.0) != (f[i + 1] < 0.0) {
            match bisect(&p, energies[i], energies[i + 1], f[i], params.tol) {
                Some(root) => eigenvalues.push(describe_eigenvalue(&p, root)),
                None => failures.push(BracketFailure {
                    e_lo: energies[i],
                    e_hi: energies[i + 1],
                }),
            }
        }
    }

    Ok(SpectrumResult {
        scan: ScanInfo {
            e_min: params.e_min,
            e_max: params.e_max,
            grid_n: params.grid_n,
        },
        eigenvalues,
        failures,
    })
}

/// Max-normalized samples of the eigenfunction at `energy`: `n_samples`
/// uniform points plus the spike positions. Rejects energies whose shot
/// misses the far wall by more than [`EIGEN_RESIDUAL_REL_TOL`] of the peak.
pub fn eigenstate_samples(
    potential: &DeltaPotential,
    energy: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>, SpectrumError> {
    if n_samples < 2 {
        return Err(SpectrumError::TooFewSamples);
    }
    let p = FloatPotential::of(potential);

    let dense_xs = sample_positions(&p, NODE_SAMPLING_INTERVALS);
    let dense = sample_values(&p, energy, &dense_xs);
    let peak = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = if peak > 0.0 {
        dense.last().unwrap().abs() / peak
    } else {
        1.0
    };
    if residual > EIGEN_RESIDUAL_REL_TOL {
        return Err(SpectrumError::NotAnEigenvalue { energy, residual });
    }

    let xs = sample_positions(&p, n_samples - 1);
    let values = sample_values(&p, energy, &xs);
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { 1.0 / peak } else { 1.0 };
    Ok(xs
        .iter()
        .zip(&values)
        .map(|(&x, &v)| (x, v * scale))
        .collect())
}
