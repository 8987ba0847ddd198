//! The inverse problem and its forward check.
//!
//! Between spikes a zero-energy state is a straight line, and each spike
//! bends the line according to the jump rule
//!
//! ```text
//! psi'(x0+) - psi'(x0-) = (c / gamma) * psi(x0)
//! ```
//!
//! so a polyline hands us the potential directly: every genuine kink at a
//! nonzero amplitude yields one spike with
//! `c = gamma * (slope_right - slope_left) / psi(x0)`. Straight knots
//! (collinear) yield nothing. [`invert`] implements exactly that reading;
//! [`forward_construct`] runs the shooting construction the other way and
//! accepts the state only when it reaches the far wall at zero.
//!
//! Energy bookkeeping uses the first-derivative form of the kinetic term,
//! `T = gamma * integral(psi'^2) = gamma * sum(slope_i^2 * d_i)`, which for
//! rational states cancels `V = sum(c_j * psi(x_j)^2)` *identically*: a
//! zero-energy state satisfies `T + V = 0` with no rounding at all.

use thiserror::Error;

use crate::model::{
    DeltaPotential, DeltaSpike, Knot, ModelError, PiecewiseLinearState, ValidationReport,
    Violation, WellConfig,
};
use crate::scalar::{Scalar, ScalarError};

/// Relative tolerance for the far-wall hit in float-mode shooting.
pub const WALL_HIT_REL_TOL: f64 = 1e-12;
/// Expectation values are meaningful for unit-norm states only; this is the
/// allowed slack on `norm_squared - 1`.
pub const NORM_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum JeopardyError {
    #[error("state is not admissible: {report}")]
    InvalidState { report: ValidationReport },
    /// A kink at a zero of psi has no finite coefficient. Kept separate from
    /// the blanket invalid-state error because it is the one physics failure
    /// a student actually runs into when inventing states.
    #[error("kink at knot {knot} sits on a zero of the wavefunction; no finite delta strength produces it")]
    UnsolvableKink { knot: usize },
    #[error("initial slope must be nonzero")]
    ZeroInitialSlope,
    #[error("state is not normalized (norm_squared = {norm_squared}); normalize first")]
    NotNormalized { norm_squared: f64 },
    #[error("state and potential describe different wells")]
    WellMismatch,
    #[error("round-trip reconstruction rejected its own potential (shooting missed the far wall)")]
    RoundTripRejected,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Expectation values of a (state, potential) pair, in the state's mode.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub kinetic: Scalar,
    pub potential: Scalar,
    pub total: Scalar,
}

/// Result of [`roundtrip_check`]: the forward reconstruction matches the
/// original up to `scale`, with worst-case amplitude deviation
/// `max_deviation` (exactly zero for rational states).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripReport {
    pub scale: Scalar,
    pub max_deviation: Scalar,
}

/// Reads the delta potential off an admissible polyline: one spike per
/// genuine kink, `c = gamma * jump / psi`. Rational in, rational out.
pub fn invert(state: &PiecewiseLinearState) -> Result<DeltaPotential, JeopardyError> {
    let report = state.validate();
    if !report.is_valid() {
        // when the only trouble is kink-at-zero, say so specifically
        let first_kink = report.violations().iter().find_map(|v| match v {
            Violation::KinkAtZero { knot } => Some(*knot),
            _ => None,
        });
        let only_kinks = report
            .violations()
            .iter()
            .all(|v| matches!(v, Violation::KinkAtZero { .. }));
        if let (Some(knot), true) = (first_kink, only_kinks) {
            return Err(JeopardyError::UnsolvableKink { knot });
        }
        return Err(JeopardyError::InvalidState { report });
    }

    let gamma = state.config().gamma();
    let slopes = state.slopes()?;
    let mut spikes = Vec::new();
    for i in 1..state.knots().len() - 1 {
        let jump = slopes[i].slope.checked_sub(&slopes[i - 1].slope)?;
        if jump.is_zero() {
            continue; // collinear knot, no spike
        }
        let knot = &state.knots()[i];
        let c = gamma.checked_mul(&jump)?.checked_div(knot.psi())?;
        spikes.push(DeltaSpike::new(*knot.x(), c)?);
    }
    Ok(DeltaPotential::new(spikes, state.config().clone())?)
}

/// Shooting construction of the zero-energy state of `potential`, unit
/// initial slope. `Ok(None)` means the potential has no zero-energy state
/// (the shot misses the far wall); this is an answer, not an error.
pub fn forward_construct(
    potential: &DeltaPotential,
) -> Result<Option<PiecewiseLinearState>, JeopardyError> {
    forward_construct_with_slope(potential, &Scalar::one())
}

/// Same construction with an arbitrary nonzero initial slope. Zero-energy
/// admissibility is scale-invariant, so every nonzero slope accepts or
/// rejects identically (the states differ by that scale).
pub fn forward_construct_with_slope(
    potential: &DeltaPotential,
    initial_slope: &Scalar,
) -> Result<Option<PiecewiseLinearState>, JeopardyError> {
    if initial_slope.is_zero() {
        return Err(JeopardyError::ZeroInitialSlope);
    }
    let config = potential.config();
    let gamma = config.gamma();
    let rational_mode = potential.is_rational()
        && initial_slope.is_rational()
        && config.wall_left().is_rational()
        && config.wall_right().is_rational();
    let zero = if rational_mode {
        Scalar::zero()
    } else {
        Scalar::float(0.0)
    };

    let mut knots = vec![Knot::new(*config.wall_left(), zero)];
    let mut x = *config.wall_left();
    let mut psi = zero;
    let mut slope = *initial_slope;
    for spike in potential.spikes() {
        let step = spike.position().checked_sub(&x)?;
        psi = psi.checked_add(&slope.checked_mul(&step)?)?;
        knots.push(Knot::new(*spike.position(), psi));
        // the jump rule, applied forward
        let jump = spike.coefficient().checked_div(gamma)?.checked_mul(&psi)?;
        slope = slope.checked_add(&jump)?;
        x = *spike.position();
    }
    let step = config.wall_right().checked_sub(&x)?;
    let psi_end = psi.checked_add(&slope.checked_mul(&step)?)?;

    let hits_wall = if psi_end.is_rational() {
        psi_end.is_zero()
    } else {
        // relative to the largest amplitude the shot reached
        let scale = knots
            .iter()
            .map(|k| k.psi().to_f64().abs())
            .fold(psi_end.to_f64().abs(), f64::max);
        psi_end.to_f64().abs() <= WALL_HIT_REL_TOL * scale
    };
    if !hits_wall {
        return Ok(None);
    }
    knots.push(Knot::new(*config.wall_right(), zero));
    Ok(Some(PiecewiseLinearState::new(knots, config.clone())?))
}

/// Kinetic expectation in first-derivative form, valid for any norm:
/// `gamma * sum(slope_i^2 * d_i)`.
pub fn kinetic_form(state: &PiecewiseLinearState) -> Result<Scalar, JeopardyError> {
    let mut total = Scalar::zero();
    for s in state.slopes()? {
        let knots = state.knots();
        let d = knots[s.segment + 1].x().checked_sub(knots[s.segment].x())?;
        total = total.checked_add(&s.slope.checked_mul(&s.slope)?.checked_mul(&d)?)?;
    }
    Ok(state.config().gamma().checked_mul(&total)?)
}

/// Potential expectation `sum(c_j * psi(x_j)^2)`, valid for any norm.
pub fn potential_form(
    state: &PiecewiseLinearState,
    potential: &DeltaPotential,
) -> Result<Scalar, JeopardyError> {
    let mut total = Scalar::zero();
    for spike in potential.spikes() {
        let amp = state.eval(spike.position())?;
        total = total.checked_add(&spike.coefficient().checked_mul(&amp.checked_mul(&amp)?)?)?;
    }
    Ok(total)
}

/// Expectation values for a normalized state. Requires
/// `|norm_squared - 1| <= NORM_REL_TOL` and matching wells; use
/// [`kinetic_form`]/[`potential_form`] for raw unnormalized sums.
pub fn expectations(
    state: &PiecewiseLinearState,
    potential: &DeltaPotential,
) -> Result<EnergyReport, JeopardyError> {
    if !state.config().numeric_eq(potential.config()) {
        return Err(JeopardyError::WellMismatch);
    }
    let n2 = state.norm_squared()?.to_f64();
    if !n2.is_finite() || (n2 - 1.0).abs() > NORM_REL_TOL {
        return Err(JeopardyError::NotNormalized { norm_squared: n2 });
    }
    let kinetic = kinetic_form(state)?;
    let potential = potential_form(state, potential)?;
    let total = kinetic.checked_add(&potential)?;
    Ok(EnergyReport {
        kinetic,
        potential,
        total,
    })
}

/// Inverts the state, shoots the resulting potential forward, and measures
/// how far the reconstruction is from the original. For admissible rational
/// states the deviation is exactly zero and `scale` is the original's first
/// kink slope (the shot starts at slope one).
pub fn roundtrip_check(state: &PiecewiseLinearState) -> Result<RoundTripReport, JeopardyError> {
    let potential = invert(state)?;
    let rebuilt = forward_construct(&potential)?.ok_or(JeopardyError::RoundTripRejected)?;

    // An admissible state has at least one kink, so both polylines have an
    // interior knot there; match amplitudes at the first one.
    let x1 = potential.spikes()[0].position();
    let original_amp = state.eval(x1)?;
    let rebuilt_amp = rebuilt.eval(x1)?;
    if rebuilt_amp.is_zero() {
        return Err(JeopardyError::RoundTripRejected);
    }
    let scale = original_amp.checked_div(&rebuilt_amp)?;

    let mut max_deviation = Scalar::zero();
    let mut positions: Vec<&Scalar> = state
        .knots()
        .iter()
        .chain(rebuilt.knots().iter())
        .map(Knot::x)
        .collect();
    positions.sort_by(|a, b| a.numeric_cmp(b).expect("knot positions are finite"));
    for x in positions {
        let dev = rebuilt
            .eval(x)?
            .checked_mul(&scale)?
            .checked_sub(&state.eval(x)?)?
            .abs();
        if dev.numeric_cmp(&max_deviation) == Some(std::cmp::Ordering::Greater) {
            max_deviation = dev;
        }
    }
    Ok(RoundTripReport {
        scale,
        max_deviation,
    })
}

/// Convenience for the common symmetric-well tests.
pub fn natural_config() -> WellConfig {
    WellConfig::default()
}
