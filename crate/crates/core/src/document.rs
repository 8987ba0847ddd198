//! JSON documents: the single interchange format of the toolkit.
//!
//! Every file the tools read or write is an envelope
//! `{"kind": K, "version": "1", "payload": P}`. Parsing is strict —
//! unknown fields, unknown kinds, non-canonical rationals, and versions
//! other than `"1"` are errors — and rendering is byte-deterministic:
//! fixed field order, no whitespace, rationals as canonical strings,
//! floats as shortest-round-trip JSON numbers. The same document value
//! always renders to the same bytes.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use thiserror::Error;

use crate::jeopardy::EnergyReport;
use crate::model::{
    DeltaPotential, DeltaSpike, Knot, ModelError, PiecewiseLinearState, WellConfig,
};
use crate::probgen::{Difficulty, GradeReport, ProbGenError, Problem, SpikeGrade, Verdict};
use crate::scalar::Scalar;
use crate::spectrum::{BracketFailure, Eigenvalue, ScanInfo, SpectrumResult};

pub const DOCUMENT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Syntax(#[source] serde_json::Error),
    #[error("unknown document kind {0:?}")]
    UnknownKind(String),
    #[error("unsupported document version {0:?} (this tool reads version \"1\")")]
    UnsupportedVersion(String),
    #[error("invalid {kind} payload: {source}")]
    Payload {
        kind: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Problem(#[from] ProbGenError),
    #[error("cannot render document: {0}")]
    Render(#[source] serde_json::Error),
}

/// A parsed document of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    State(PiecewiseLinearState),
    Potential(DeltaPotential),
    Problem(Problem),
    Spectrum(SpectrumResult),
    Grade(GradeReport),
    Energy(EnergyReport),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::State(_) => "state",
            Document::Potential(_) => "potential",
            Document::Problem(_) => "problem",
            Document::Spectrum(_) => "spectrum",
            Document::Grade(_) => "grade-report",
            Document::Energy(_) => "energy-report",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvelopeIn<'a> {
    kind: String,
    version: String,
    #[serde(borrow)]
    payload: &'a RawValue,
}

#[derive(Serialize)]
struct EnvelopeOut<'a, T: Serialize> {
    kind: &'static str,
    version: &'static str,
    payload: &'a T,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateWire {
    wall: [Scalar; 2],
    gamma: Scalar,
    knots: Vec<[Scalar; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpikeWire {
    x: Scalar,
    c: Scalar,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialWire {
    wall: [Scalar; 2],
    gamma: Scalar,
    spikes: Vec<SpikeWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DifficultyWire {
    kinks: u32,
    denom_bound: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemWire {
    id: String,
    wall: [Scalar; 2],
    gamma: Scalar,
    difficulty: DifficultyWire,
    knots: Vec<[Scalar; 2]>,
    solution: Vec<SpikeWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanWire {
    e_min: f64,
    e_max: f64,
    grid_n: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EigenvalueWire {
    energy: f64,
    nodes: u32,
    residual: f64,
    samples: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FailureWire {
    e_lo: f64,
    e_hi: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumWire {
    scan: ScanWire,
    eigenvalues: Vec<EigenvalueWire>,
    failures: Vec<FailureWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum VerdictWire {
    Pass,
    Fail,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerSpikeWire {
    x: Scalar,
    expected_c: Scalar,
    matched: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    proposed_c: Option<Scalar>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rel_error: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GradeWire {
    verdict: VerdictWire,
    rel_tol: f64,
    pos_tol: f64,
    per_spike: Vec<PerSpikeWire>,
    extras: Vec<SpikeWire>,
    missing: Vec<SpikeWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnergyWire {
    kinetic: Scalar,
    potential: Scalar,
    total: Scalar,
}

fn wall_of(config: &WellConfig) -> [Scalar; 2] {
    [*config.wall_left(), *config.wall_right()]
}

fn config_from(wall: [Scalar; 2], gamma: Scalar) -> Result<WellConfig, ModelError> {
    WellConfig::new(wall[0], wall[1], gamma)
}

fn state_to_wire(state: &PiecewiseLinearState) -> StateWire {
    StateWire {
        wall: wall_of(state.config()),
        gamma: *state.config().gamma(),
        knots: state.knots().iter().map(|k| [*k.x(), *k.psi()]).collect(),
    }
}

fn state_from_wire(wire: StateWire) -> Result<PiecewiseLinearState, DocumentError> {
    let config = config_from(wire.wall, wire.gamma)?;
    let knots = wire
        .knots
        .into_iter()
        .map(|[x, psi]| Knot::new(x, psi))
        .collect();
    Ok(PiecewiseLinearState::new(knots, config)?)
}

fn spikes_to_wire(spikes: &[DeltaSpike]) -> Vec<SpikeWire> {
    spikes
        .iter()
        .map(|s| SpikeWire {
            x: *s.position(),
            c: *s.coefficient(),
        })
        .collect()
}

fn spikes_from_wire(wire: Vec<SpikeWire>) -> Result<Vec<DeltaSpike>, ModelError> {
    wire.into_iter()
        .map(|s| DeltaSpike::new(s.x, s.c))
        .collect()
}

fn potential_to_wire(potential: &DeltaPotential) -> PotentialWire {
    PotentialWire {
        wall: wall_of(potential.config()),
        gamma: *potential.config().gamma(),
        spikes: spikes_to_wire(potential.spikes()),
    }
}

fn potential_from_wire(wire: PotentialWire) -> Result<DeltaPotential, DocumentError> {
    let config = config_from(wire.wall, wire.gamma)?;
    Ok(DeltaPotential::new(spikes_from_wire(wire.spikes)?, config)?)
}

fn problem_to_wire(problem: &Problem) -> ProblemWire {
    ProblemWire {
        id: problem.id().to_owned(),
        wall: wall_of(problem.state().config()),
        gamma: *problem.state().config().gamma(),
        difficulty: DifficultyWire {
            kinks: problem.difficulty().kinks,
            denom_bound: problem.difficulty().denom_bound,
        },
        knots: problem
            .state()
            .knots()
            .iter()
            .map(|k| [*k.x(), *k.psi()])
            .collect(),
        solution: spikes_to_wire(problem.solution().spikes()),
    }
}

fn problem_from_wire(wire: ProblemWire) -> Result<Problem, DocumentError> {
    let config = config_from(wire.wall, wire.gamma)?;
    let knots = wire
        .knots
        .into_iter()
        .map(|[x, psi]| Knot::new(x, psi))
        .collect();
    let state = PiecewiseLinearState::new(knots, config.clone())?;
    let solution = DeltaPotential::new(spikes_from_wire(wire.solution)?, config)?;
    let difficulty = Difficulty {
        kinks: wire.difficulty.kinks,
        denom_bound: wire.difficulty.denom_bound,
    };
    Ok(Problem::from_parts(wire.id, state, solution, difficulty)?)
}

fn spectrum_to_wire(result: &SpectrumResult) -> SpectrumWire {
    SpectrumWire {
        scan: ScanWire {
            e_min: result.scan.e_min,
            e_max: result.scan.e_max,
            grid_n: result.scan.grid_n,
        },
        eigenvalues: result
            .eigenvalues
            .iter()
            .map(|e| EigenvalueWire {
                energy: e.energy,
                nodes: e.nodes,
                residual: e.residual,
                samples: e.samples.clone(),
            })
            .collect(),
        failures: result
            .failures
            .iter()
            .map(|f| FailureWire {
                e_lo: f.e_lo,
                e_hi: f.e_hi,
            })
            .collect(),
    }
}

fn spectrum_from_wire(wire: SpectrumWire) -> SpectrumResult {
    SpectrumResult {
        scan: ScanInfo {
            e_min: wire.scan.e_min,
            e_max: wire.scan.e_max,
            grid_n: wire.scan.grid_n,
        },
        eigenvalues: wire
            .eigenvalues
            .into_iter()
            .map(|e| Eigenvalue {
                energy: e.energy,
                nodes: e.nodes,
                residual: e.residual,
                samples: e.samples,
            })
            .collect(),
        failures: wire
            .failures
            .into_iter()
            .map(|f| BracketFailure {
                e_lo: f.e_lo,
                e_hi: f.e_hi,
            })
            .collect(),
    }
}

fn grade_to_wire(report: &GradeReport) -> GradeWire {
    GradeWire {
        verdict: match report.verdict {
            Verdict::Pass => VerdictWire::Pass,
            Verdict::Fail => VerdictWire::Fail,
        },
        rel_tol: report.rel_tol,
        pos_tol: report.pos_tol,
        per_spike: report
            .per_spike
            .iter()
            .map(|s| PerSpikeWire {
                x: s.position,
                expected_c: s.expected_coefficient,
                matched: s.matched,
                proposed_c: s.proposed_coefficient,
                rel_error: s.relative_error,
            })
            .collect(),
        extras: spikes_to_wire(&report.extras),
        missing: spikes_to_wire(&report.missing),
    }
}

fn grade_from_wire(wire: GradeWire) -> Result<GradeReport, DocumentError> {
    Ok(GradeReport {
        verdict: match wire.verdict {
            VerdictWire::Pass => Verdict::Pass,
            VerdictWire::Fail => Verdict::Fail,
        },
        rel_tol: wire.rel_tol,
        pos_tol: wire.pos_tol,
        per_spike: wire
            .per_spike
            .into_iter()
            .map(|s| SpikeGrade {
                position: s.x,
                expected_coefficient: s.expected_c,
                matched: s.matched,
                proposed_coefficient: s.proposed_c,
                relative_error: s.rel_error,
            })
            .collect(),
        extras: spikes_from_wire(wire.extras)?,
        missing: spikes_from_wire(wire.missing)?,
    })
}

fn energy_to_wire(report: &EnergyReport) -> EnergyWire {
    EnergyWire {
        kinetic: report.kinetic,
        potential: report.potential,
        total: report.total,
    }
}

fn energy_from_wire(wire: EnergyWire) -> EnergyReport {
    EnergyReport {
        kinetic: wire.kinetic,
        potential: wire.potential,
        total: wire.total,
    }
}

fn parse_payload<T: DeserializeOwned>(
    kind: &'static str,
    payload: &RawValue,
) -> Result<T, DocumentError> {
    serde_json::from_str(payload.get()).map_err(|source| DocumentError::Payload { kind, source })
}

/// Parses any document. Strict: the envelope and the payload must match
/// their schemas exactly.
pub fn parse(text: &str) -> Result<Document, DocumentError> {
    let envelope: EnvelopeIn = serde_json::from_str(text).map_err(DocumentError::Syntax)?;
    if envelope.version != DOCUMENT_VERSION {
        return Err(DocumentError::UnsupportedVersion(envelope.version));
    }
    match envelope.kind.as_str() {
        "state" => Ok(Document::State(state_from_wire(parse_payload(
            "state",
            envelope.payload,
        )?)?)),
        "potential" => Ok(Document::Potential(potential_from_wire(parse_payload(
            "potential",
            envelope.payload,
        )?)?)),
        "problem" => Ok(Document::Problem(problem_from_wire(parse_payload(
            "problem",
            envelope.payload,
        )?)?)),
        "spectrum" => Ok(Document::Spectrum(spectrum_from_wire(parse_payload(
            "spectrum",
            envelope.payload,
        )?))),
        "grade-report" => Ok(Document::Grade(grade_from_wire(parse_payload(
            "grade-report",
            envelope.payload,
        )?)?)),
        "energy-report" => Ok(Document::Energy(energy_from_wire(parse_payload(
            "energy-report",
            envelope.payload,
        )?))),
        other => Err(DocumentError::UnknownKind(other.to_owned())),
    }
}

fn seal<T: Serialize>(kind: &'static str, payload: &T) -> Result<String, DocumentError> {
    serde_json::to_string(&EnvelopeOut {
        kind,
        version: DOCUMENT_VERSION,
        payload,
    })
    .map_err(DocumentError::Render)
}

/// Renders a document to its canonical byte-deterministic JSON line.
pub fn render(doc: &Document) -> Result<String, DocumentError> {
    match doc {
        Document::State(s) => seal("state", &state_to_wire(s)),
        Document::Potential(v) => seal("potential", &potential_to_wire(v)),
        Document::Problem(p) => seal("problem", &problem_to_wire(p)),
        Document::Spectrum(r) => seal("spectrum", &spectrum_to_wire(r)),
        Document::Grade(g) => seal("grade-report", &grade_to_wire(g)),
        Document::Energy(e) => seal("energy-report", &energy_to_wire(e)),
    }
}
