//! Domain model: the well, piecewise-linear candidate states, and delta
//! potentials.
//!
//! A zero-energy wavefunction has zero curvature away from the spikes, so
//! inside an infinite well it is a polyline pinned to zero at both walls.
//! [`PiecewiseLinearState`] stores exactly that polyline as a knot list.
//! Construction enforces only *structural* sanity (ordering, walls present,
//! finite values); physical admissibility is a separate, data-producing
//! check in [`PiecewiseLinearState::validate`] so that callers can show
//! users every violated rule at once instead of failing on the first.

use std::fmt;

use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("left wall must lie strictly left of the right wall")]
    WallOrder,
    #[error("gamma must be positive")]
    GammaNotPositive,
    #[error("a state needs at least two knots (one per wall)")]
    TooFewKnots,
    #[error("knot {index} is out of order (positions must be non-decreasing)")]
    KnotsOutOfOrder { index: usize },
    #[error("first knot must sit on the left wall")]
    FirstKnotOffWall,
    #[error("last knot must sit on the right wall")]
    LastKnotOffWall,
    #[error("evaluation point {x} lies outside the well")]
    OutsideDomain { x: Scalar },
    #[error("segment {segment} has zero width, slope undefined")]
    ZeroWidthSegment { segment: usize },
    #[error("cannot normalize: norm is zero or not finite")]
    UnnormalizableNorm,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("spike {index} is out of order (positions must be strictly increasing)")]
    SpikesOutOfOrder { index: usize },
    #[error("spike {index} lies outside the open interior of the well")]
    SpikeOutsideWell { index: usize },
    #[error("spike coefficient must be nonzero")]
    ZeroCoefficient,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// The infinite square well: walls at `wall_left < wall_right` and the
/// kinetic constant `gamma` = hbar^2/2m (> 0). Defaults to the natural
/// units used throughout the tests: walls at -1 and 1, gamma = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WellConfig {
    wall_left: Scalar,
    wall_right: Scalar,
    gamma: Scalar,
}

impl WellConfig {
    pub fn new(wall_left: Scalar, wall_right: Scalar, gamma: Scalar) -> Result<Self, ModelError> {
        if wall_left.numeric_cmp(&wall_right) != Some(std::cmp::Ordering::Less) {
            return Err(ModelError::WallOrder);
        }
        if !gamma.is_positive() {
            return Err(ModelError::GammaNotPositive);
        }
        Ok(WellConfig {
            wall_left,
            wall_right,
            gamma,
        })
    }

    pub fn wall_left(&self) -> &Scalar {
        &self.wall_left
    }

    pub fn wall_right(&self) -> &Scalar {
        &self.wall_right
    }

    pub fn gamma(&self) -> &Scalar {
        &self.gamma
    }

    /// Well width `wall_right - wall_left`.
    pub fn width(&self) -> Result<Scalar, ScalarError> {
        self.wall_right.checked_sub(&self.wall_left)
    }

    /// Same well by value, regardless of scalar mode.
    pub fn numeric_eq(&self, other: &WellConfig) -> bool {
        self.wall_left.numeric_eq(&other.wall_left)
            && self.wall_right.numeric_eq(&other.wall_right)
            && self.gamma.numeric_eq(&other.gamma)
    }
}

impl Default for WellConfig {
    fn default() -> Self {
        WellConfig {
            wall_left: Scalar::integer(-1),
            wall_right: Scalar::integer(1),
            gamma: Scalar::one(),
        }
    }
}

/// One vertex of the polyline: position and amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    x: Scalar,
    psi: Scalar,
}

impl Knot {
    pub fn new(x: Scalar, psi: Scalar) -> Knot {
        Knot { x, psi }
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }

    pub fn psi(&self) -> &Scalar {
        &self.psi
    }
}

/// A rule violated by a structurally well-formed state.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Wavefunction does not vanish on a wall.
    NonzeroWall { knot: usize },
    /// Two consecutive knots share a position.
    DuplicatePosition { knot: usize },
    /// The slope changes at a knot where the amplitude is zero; no finite
    /// delta coefficient can produce that jump.
    KinkAtZero { knot: usize },
    /// Every amplitude is zero.
    IdenticallyZero,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonzeroWall { knot } => {
                write!(f, "knot {knot}: amplitude must vanish at the wall")
            }
            Violation::DuplicatePosition { knot } => {
                write!(f, "knot {knot}: duplicate position")
            }
            Violation::KinkAtZero { knot } => {
                write!(f, "knot {knot}: kink at a zero of the wavefunction")
            }
            Violation::IdenticallyZero => f.write_str("state is identically zero"),
        }
    }
}

/// Outcome of admissibility validation: empty means admissible.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Slope of one linear segment, tagged with its index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSlope {
    pub segment: usize,
    pub slope: Scalar,
}

/// Candidate zero-energy state: a polyline over the well.
///
/// Invariants enforced at construction: at least two knots, non-decreasing
/// positions, first/last knots exactly on the walls. Everything else
/// (vanishing at walls, no duplicate positions, kinks only at nonzero
/// amplitudes, not identically zero) is reported by [`Self::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearState {
    knots: Vec<Knot>,
    config: WellConfig,
}

impl PiecewiseLinearState {
    pub fn new(knots: Vec<Knot>, config: WellConfig) -> Result<Self, ModelError> {
        if knots.len() < 2 {
            return Err(ModelError::TooFewKnots);
        }
        for i in 1..knots.len() {
            match knots[i - 1].x.numeric_cmp(&knots[i].x) {
                Some(std::cmp::Ordering::Less) | Some(std::cmp::Ordering::Equal) => {}
                _ => return Err(ModelError::KnotsOutOfOrder { index: i }),
            }
        }
        if !knots.first().unwrap().x.numeric_eq(&config.wall_left) {
            return Err(ModelError::FirstKnotOffWall);
        }
        if !knots.last().unwrap().x.numeric_eq(&config.wall_right) {
            return Err(ModelError::LastKnotOffWall);
        }
        Ok(PiecewiseLinearState { knots, config })
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn config(&self) -> &WellConfig {
        &self.config
    }

    /// Interior knots (everything but the walls).
    pub fn interior_knots(&self) -> &[Knot] {
        &self.knots[1..self.knots.len() - 1]
    }

    /// True if every scalar in the state (walls, gamma, knots) is rational.
    pub fn is_rational(&self) -> bool {
        self.config.wall_left.is_rational()
            && self.config.wall_right.is_rational()
            && self.config.gamma.is_rational()
            && self
                .knots
                .iter()
                .all(|k| k.x.is_rational() && k.psi.is_rational())
    }

    /// Checks every admissibility rule and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.knots.len();

        if !self.knots[0].psi.is_zero() {
            violations.push(Violation::NonzeroWall { knot: 0 });
        }
        if !self.knots[n - 1].psi.is_zero() {
            violations.push(Violation::NonzeroWall { knot: n - 1 });
        }
        for i in 1..n {
            if self.knots[i].x.numeric_eq(&self.knots[i - 1].x) {
                violations.push(Violation::DuplicatePosition { knot: i });
            }
        }
        if self.knots.iter().all(|k| k.psi.is_zero()) {
            violations.push(Violation::IdenticallyZero);
        }
        // Kink-at-zero: compare slopes across each interior knot. Segments
        // of zero width have no slope; skip checks that would need one.
        for i in 1..n - 1 {
            if !self.knots[i].psi.is_zero() {
                continue;
            }
            let (Some(left), Some(right)) = (self.segment_slope(i - 1), self.segment_slope(i))
            else {
                continue;
            };
            if !left.numeric_eq(&right) {
                violations.push(Violation::KinkAtZero { knot: i });
            }
        }

        ValidationReport { violations }
    }

    /// Slope of segment `i`, or `None` when the segment has zero width or
    /// the arithmetic overflows (validation must not abort).
    fn segment_slope(&self, i: usize) -> Option<Scalar> {
        let dx = self.knots[i + 1].x.checked_sub(&self.knots[i].x).ok()?;
        if dx.is_zero() {
            return None;
        }
        let dpsi = self.knots[i + 1].psi.checked_sub(&self.knots[i].psi).ok()?;
        dpsi.checked_div(&dx).ok()
    }

    /// Evaluates the polyline at `x` by linear interpolation. Exact hits on
    /// a knot return that knot's amplitude (important at duplicate
    /// positions, where the containing segment is ambiguous).
    pub fn eval(&self, x: &Scalar) -> Result<Scalar, ModelError> {
        use std::cmp::Ordering::*;
        let below = x.numeric_cmp(&self.config.wall_left) == Some(Less);
        let above = x.numeric_cmp(&self.config.wall_right) == Some(Greater);
        if below || above || x.numeric_cmp(&self.config.wall_left).is_none() {
            return Err(ModelError::OutsideDomain { x: *x });
        }
        for (i, knot) in self.knots.iter().enumerate() {
            match x.numeric_cmp(&knot.x) {
                Some(Equal) => return Ok(knot.psi),
                Some(Less) => {
                    // walls are pinned to the knot list, so i >= 1 here
                    let lo = &self.knots[i - 1];
                    let dx = knot.x.checked_sub(&lo.x)?;
                    let dpsi = knot.psi.checked_sub(&lo.psi)?;
                    let t = x.checked_sub(&lo.x)?;
                    return Ok(lo
                        .psi
                        .checked_add(&t.checked_mul(&dpsi)?.checked_div(&dx)?)?);
                }
                _ => {}
            }
        }
        unreachable!("x inside the well always hits or precedes a knot");
    }

    /// Slopes of all segments, in order. Errors on zero-width segments.
    pub fn slopes(&self) -> Result<Vec<SegmentSlope>, ModelError> {
        let mut out = Vec::with_capacity(self.knots.len() - 1);
        for i in 0..self.knots.len() - 1 {
            let dx = self.knots[i + 1].x.checked_sub(&self.knots[i].x)?;
            if dx.is_zero() {
                return Err(ModelError::ZeroWidthSegment { segment: i });
            }
            let dpsi = self.knots[i + 1].psi.checked_sub(&self.knots[i].psi)?;
            out.push(SegmentSlope {
                segment: i,
                slope: dpsi.checked_div(&dx)?,
            });
        }
        Ok(out)
    }

    /// Integral of psi^2 over the well. On each segment the integrand is a
    /// quadratic, so the closed form `(d/3)(p^2 + p q + q^2)` is exact;
    /// rational states get a rational norm with no rounding anywhere.
    pub fn norm_squared(&self) -> Result<Scalar, ModelError> {
        let third = Scalar::rational(1, 3).expect("1/3 is representable");
        let mut total = Scalar::zero();
        for pair in self.knots.windows(2) {
            let d = pair[1].x.checked_sub(&pair[0].x)?;
            let p = &pair[0].psi;
            let q = &pair[1].psi;
            let quad = p
                .checked_mul(p)?
                .checked_add(&p.checked_mul(q)?)?
                .checked_add(&q.checked_mul(q)?)?;
            total = total.checked_add(&d.checked_mul(&third)?.checked_mul(&quad)?)?;
        }
        Ok(total)
    }

    /// Rescales every amplitude by `k` (positions untouched).
    pub fn scaled(&self, k: &Scalar) -> Result<PiecewiseLinearState, ModelError> {
        if k.is_zero() {
            return Err(ModelError::ZeroScale);
        }
        let knots = self
            .knots
            .iter()
            .map(|knot| Ok(Knot::new(knot.x, knot.psi.checked_mul(k)?)))
            .collect::<Result<Vec<_>, ScalarError>>()?;
        PiecewiseLinearState::new(knots, self.config.clone())
    }

    /// Returns the unit-norm version of the state and the norm it divided
    /// out. Norms are irrational in general, so the result is float-mode in
    /// its amplitudes; positions keep their original mode.
    pub fn normalize(&self) -> Result<(PiecewiseLinearState, f64), ModelError> {
        let n2 = self.norm_squared()?.to_f64();
        if !n2.is_finite() || n2 <= 0.0 {
            return Err(ModelError::UnnormalizableNorm);
        }
        let norm = n2.sqrt();
        let knots = self
            .knots
            .iter()
            .map(|knot| Knot::new(knot.x, Scalar::float(knot.psi.to_f64() / norm)))
            .collect();
        Ok((PiecewiseLinearState::new(knots, self.config.clone())?, norm))
    }
}

/// One Dirac delta term `c * delta(x - position)`.
///
/// `coefficient` is the signed, energy-scaled strength: negative
/// coefficients attract (an attractive well of strength `alpha > 0` has
/// `c = -alpha`). Zero coefficients are rejected; an absent spike is
/// represented by absence.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSpike {
    position: Scalar,
    coefficient: Scalar,
}

impl DeltaSpike {
    pub fn new(position: Scalar, coefficient: Scalar) -> Result<Self, ModelError> {
        if coefficient.is_zero() {
            return Err(ModelError::ZeroCoefficient);
        }
        Ok(DeltaSpike {
            position,
            coefficient,
        })
    }

    pub fn position(&self) -> &Scalar {
        &self.position
    }

    pub fn coefficient(&self) -> &Scalar {
        &self.coefficient
    }
}

/// A finite sum of delta spikes strictly inside the well, sorted by
/// position. The empty potential (bare well) is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaPotential {
    spikes: Vec<DeltaSpike>,
    config: WellConfig,
}

impl DeltaPotential {
    pub fn new(spikes: Vec<DeltaSpike>, config: WellConfig) -> Result<Self, ModelError> {
        use std::cmp::Ordering::Less;
        for (i, spike) in spikes.iter().enumerate() {
            let inside = config.wall_left.numeric_cmp(&spike.position) == Some(Less)
                && spike.position.numeric_cmp(&config.wall_right) == Some(Less);
            if !inside {
                return Err(ModelError::SpikeOutsideWell { index: i });
            }
            if i > 0 && spikes[i - 1].position.numeric_cmp(&spike.position) != Some(Less) {
                return Err(ModelError::SpikesOutOfOrder { index: i });
            }
        }
        Ok(DeltaPotential { spikes, config })
    }

    /// The bare well.
    pub fn empty(config: WellConfig) -> DeltaPotential {
        DeltaPotential {
            spikes: Vec::new(),
            config,
        }
    }

    pub fn spikes(&self) -> &[DeltaSpike] {
        &self.spikes
    }

    pub fn config(&self) -> &WellConfig {
        &self.config
    }

    pub fn is_rational(&self) -> bool {
        self.config.wall_left.is_rational()
            && self.config.wall_right.is_rational()
            && self.config.gamma.is_rational()
            && self
                .spikes
                .iter()
                .all(|s| s.position.is_rational() && s.coefficient.is_rational())
    }
}
