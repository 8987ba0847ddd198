//! Worksheet generation and grading.
//!
//! A problem is a state whose potential the student must recover. The
//! generator draws knots on the rational grid `a + width * m / q`
//! (`m = 1..q-1`) with amplitudes `+-n/q` (`n = 1..q`), so every produced
//! problem — state, solution, energies — lives entirely in exact
//! arithmetic, and grading against the reference solution is exact too.
//!
//! Determinism is part of the contract: the same `(seed, kinks, q)` must
//! produce byte-identical problems on every platform, so the randomness
//! is a hand-rolled splitmix64 (the 64-bit finalizer from Steele et al.'s
//! "Fast splittable pseudorandom number generators", with the published
//! golden-gamma increment and mixing constants) plus rejection sampling
//! for range reduction. No platform- or version-dependent RNG is involved.

use std::fmt;

use thiserror::Error;

use crate::jeopardy::{invert, JeopardyError};
use crate::model::{
    DeltaPotential, DeltaSpike, Knot, ModelError, PiecewiseLinearState, WellConfig,
};
use crate::scalar::{Scalar, ScalarError};

pub const MAX_KINKS: u32 = 8;
pub const MAX_GENERATE_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbGenError {
    #[error("kinks must lie in 1..={MAX_KINKS} (got {0})")]
    KinksOutOfRange(u32),
    #[error("denominator bound must be at least 2 (got {0})")]
    DenomBoundTooSmall(i64),
    #[error("denominator bound {denom_bound} leaves fewer than {kinks} interior grid positions")]
    DenomBoundTooTight { kinks: u32, denom_bound: i64 },
    #[error("generation needs an exact-rational well configuration")]
    NonRationalConfig,
    #[error("no admissible state after {0} attempts")]
    BudgetExhausted(usize),
    #[error("inconsistent problem: {0}")]
    InconsistentProblem(String),
    #[error("problem and answer describe different wells")]
    WellMismatch,
    #[error("grading tolerances must be finite and non-negative")]
    BadTolerance,
    #[error(transparent)]
    Jeopardy(#[from] JeopardyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// splitmix64: walks the state by the golden-gamma increment and scrambles
/// it with the murmur-style finalizer. Passes BigCrush, needs eight lines.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..n` by rejection (no modulo bias).
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

/// Difficulty knobs: number of genuine interior kinks and the denominator
/// `q` of the position/amplitude grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Difficulty {
    pub kinks: u32,
    pub denom_bound: i64,
}

/// A generated (or reassembled) worksheet problem. Invariants: everything
/// is rational-mode, the state is admissible, and `solution` is exactly
/// `invert(state)` with one spike per claimed kink.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    id: String,
    state: PiecewiseLinearState,
    solution: DeltaPotential,
    difficulty: Difficulty,
}

impl Problem {
    /// Reassembles a problem from stored parts, re-checking the invariants
    /// (tampered or hand-edited documents fail here, loudly).
    pub fn from_parts(
        id: String,
        state: PiecewiseLinearState,
        solution: DeltaPotential,
        difficulty: Difficulty,
    ) -> Result<Problem, ProbGenError> {
        if !state.is_rational() || !solution.is_rational() {
            return Err(ProbGenError::InconsistentProblem(
                "problems are exact-rational; found float scalars".into(),
            ));
        }
        if state.config() != solution.config() {
            return Err(ProbGenError::InconsistentProblem(
                "state and solution disagree about the well".into(),
            ));
        }
        let derived = invert(&state)?;
        if derived != solution {
            return Err(ProbGenError::InconsistentProblem(
                "stored solution is not invert(state)".into(),
            ));
        }
        if solution.spikes().len() != difficulty.kinks as usize {
            return Err(ProbGenError::InconsistentProblem(format!(
                "difficulty claims {} kinks but the state has {}",
                difficulty.kinks,
                solution.spikes().len()
            )));
        }
        if difficulty.denom_bound < 2 {
            return Err(ProbGenError::DenomBoundTooSmall(difficulty.denom_bound));
        }
        Ok(Problem {
            id,
            state,
            solution,
            difficulty,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> &PiecewiseLinearState {
        &self.state
    }

    pub fn solution(&self) -> &DeltaPotential {
        &self.solution
    }

    pub fn difficulty(&self) -> Difficulty {
        self.difficulty
    }
}

/// Draws an admissible rational state with exactly `kinks` genuine kinks on
/// the `denom_bound` grid, and its exact solution. Deterministic in
/// `(seed, kinks, denom_bound)`; the well must be rational.
pub fn generate(
    seed: u64,
    kinks: u32,
    denom_bound: i64,
    config: &WellConfig,
) -> Result<Problem, ProbGenError> {
    if kinks == 0 || kinks > MAX_KINKS {
        return Err(ProbGenError::KinksOutOfRange(kinks));
    }
    if denom_bound < 2 {
        return Err(ProbGenError::DenomBoundTooSmall(denom_bound));
    }
    // interior grid positions are m/q for m = 1..q-1: need kinks of them
    if (denom_bound - 1) < kinks as i64 {
        return Err(ProbGenError::DenomBoundTooTight { kinks, denom_bound });
    }
    if !config.wall_left().is_rational()
        || !config.wall_right().is_rational()
        || !config.gamma().is_rational()
    {
        return Err(ProbGenError::NonRationalConfig);
    }

    let q = denom_bound;
    let width = config.width()?;
    let mut rng = SplitMix64::new(seed);

    for _ in 0..MAX_GENERATE_ATTEMPTS {
        // distinct interior grid indices, then sort into knot order
        let mut ms: Vec<i64> = Vec::with_capacity(kinks as usize);
        while ms.len() < kinks as usize {
            let m = 1 + rng.next_below((q - 1) as u64) as i64;
            if !ms.contains(&m) {
                ms.push(m);
            }
        }
        ms.sort_unstable();

        let mut knots = Vec::with_capacity(kinks as usize + 2);
        knots.push(Knot::new(*config.wall_left(), Scalar::zero()));
        for &m in &ms {
            let x = config
                .wall_left()
                .checked_add(&width.checked_mul(&Scalar::rational(m, q)?)?)?;
            let numerator = 1 + rng.next_below(q as u64) as i64;
            let sign = if rng.next_below(2) == 1 { -1 } else { 1 };
            knots.push(Knot::new(x, Scalar::rational(sign * numerator, q)?));
        }
        knots.push(Knot::new(*config.wall_right(), Scalar::zero()));

        let state = PiecewiseLinearState::new(knots, config.clone())?;
        if !state.validate().is_valid() {
            continue; // can't happen with nonzero amplitudes; cheap to keep
        }
        let solution = invert(&state)?;
        if solution.spikes().len() != kinks as usize {
            continue; // a collinear knot swallowed a kink; redraw
        }
        let id = format!("zw-{seed:016x}-k{kinks}-q{q}");
        return Ok(Problem {
            id,
            state,
            solution,
            difficulty: Difficulty { kinks, denom_bound },
        });
    }
    Err(ProbGenError::BudgetExhausted(MAX_GENERATE_ATTEMPTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradeOptions {
    /// Allowed relative error on each matched coefficient.
    pub rel_tol: f64,
    /// Position slack for matching spikes; 0 demands exact positions.
    pub pos_tol: f64,
}

impl Default for GradeOptions {
    fn default() -> Self {
        GradeOptions {
            rel_tol: 1e-6,
            pos_tol: 0.0,
        }
    }
}

/// Per-expected-spike grading detail.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeGrade {
    pub position: Scalar,
    pub expected_coefficient: Scalar,
    pub matched: bool,
    pub proposed_coefficient: Option<Scalar>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradeReport {
    pub verdict: Verdict,
    pub rel_tol: f64,
    pub pos_tol: f64,
    /// One entry per reference spike, in position order.
    pub per_spike: Vec<SpikeGrade>,
    /// Proposed spikes that match no reference spike.
    pub extras: Vec<DeltaSpike>,
    /// Reference spikes the answer missed.
    pub missing: Vec<DeltaSpike>,
}

/// Grades a proposed potential against the problem's exact solution.
/// Spikes are matched by position (exactly when `pos_tol == 0`), then each
/// matched coefficient is scored by relative error. A wrong answer is a
/// *fail report*, not an error; errors are reserved for ill-posed requests
/// (mismatched wells, bad tolerances).
pub fn grade(
    problem: &Problem,
    proposed: &DeltaPotential,
    options: &GradeOptions,
) -> Result<GradeReport, ProbGenError> {
    if !options.rel_tol.is_finite() || options.rel_tol < 0.0 {
        return Err(ProbGenError::BadTolerance);
    }
    if !options.pos_tol.is_finite() || options.pos_tol < 0.0 {
        return Err(ProbGenError::BadTolerance);
    }
    if !problem.solution().config().numeric_eq(proposed.config()) {
        return Err(ProbGenError::WellMismatch);
    }

    let expected = problem.solution().spikes();
    let answer = proposed.spikes();
    let mut claimed = vec![false; answer.len()];
    let mut per_spike = Vec::with_capacity(expected.len());
    let mut all_within_tol = true;

    for reference in expected {
        // nearest unclaimed answer spike within the position tolerance
        let mut best: Option<(usize, f64)> = None;
        for (j, candidate) in answer.iter().enumerate() {
            if claimed[j] {
                continue;
            }
            let hit = if options.pos_tol == 0.0 {
                candidate.position().numeric_eq(reference.position())
            } else {
                let dist = (candidate.position().to_f64() - reference.position().to_f64()).abs();
                dist <= options.pos_tol
            };
            if !hit {
                continue;
            }
            let dist = (candidate.position().to_f64() - reference.position().to_f64()).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }

        match best {
            Some((j, _)) => {
                claimed[j] = true;
                let ce = reference.coefficient().to_f64();
                let cp = answer[j].coefficient().to_f64();
                let rel = (cp - ce).abs() / ce.abs();
                if rel > options.rel_tol {
                    all_within_tol = false;
                }
                per_spike.push(SpikeGrade {
                    position: *reference.position(),
                    expected_coefficient: *reference.coefficient(),
                    matched: true,
                    proposed_coefficient: Some(*answer[j].coefficient()),
                    relative_error: Some(rel),
                });
            }
            None => per_spike.push(SpikeGrade {
                position: *reference.position(),
                expected_coefficient: *reference.coefficient(),
                matched: false,
                proposed_coefficient: None,
                relative_error: None,
            }),
        }
    }

    let extras: Vec<DeltaSpike> = answer
        .iter()
        .zip(&claimed)
        .filter(|(_, &c)| !c)
        .map(|(s, _)| s.clone())
        .collect();
    let missing: Vec<DeltaSpike> = expected
        .iter()
        .zip(&per_spike)
        .filter(|(_, g)| !g.matched)
        .map(|(s, _)| s.clone())
        .collect();

    let verdict = if extras.is_empty() && missing.is_empty() && all_within_tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    Ok(GradeReport {
        verdict,
        rel_tol: options.rel_tol,
        pos_tol: options.pos_tol,
        per_spike,
        extras,
        missing,
    })
}
