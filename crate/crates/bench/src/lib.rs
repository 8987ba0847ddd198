//! Shared fixtures for the solver benchmarks (see `benches/solvers.rs`).

use zerowell::{DeltaPotential, DeltaSpike, Knot, PiecewiseLinearState, Scalar, WellConfig};

fn r(num: i64, den: i64) -> Scalar {
    Scalar::rational(num, den).expect("fixture literals are valid")
}

/// Walls at ±1, gamma = 1.
pub fn natural_well() -> WellConfig {
    WellConfig::default()
}

/// The five-knot M state: the canonical three-spike inverse problem.
pub fn m_state() -> PiecewiseLinearState {
    let knots = vec![
        Knot::new(r(-1, 1), r(0, 1)),
        Knot::new(r(-1, 3), r(2, 3)),
        Knot::new(r(1, 3), r(1, 3)),
        Knot::new(r(2, 3), r(2, 3)),
        Knot::new(r(1, 1), r(0, 1)),
    ];
    PiecewiseLinearState::new(knots, natural_well()).expect("M state is well formed")
}

/// The exact solution of the M state.
pub fn m_potential() -> DeltaPotential {
    let spikes = vec![
        DeltaSpike::new(r(-1, 3), r(-9, 4)).unwrap(),
        DeltaSpike::new(r(1, 3), r(9, 2)).unwrap(),
        DeltaSpike::new(r(2, 3), r(-9, 2)).unwrap(),
    ];
    DeltaPotential::new(spikes, natural_well()).expect("M potential is well formed")
}

/// A single tuned spike whose spectrum contains E = 0.
pub fn tuned_potential() -> DeltaPotential {
    DeltaPotential::new(
        vec![DeltaSpike::new(r(0, 1), r(-2, 1)).unwrap()],
        natural_well(),
    )
    .unwrap()
}
