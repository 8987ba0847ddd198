//! Deterministic CSV and SVG renderings of documents.
//!
//! Output is a pure function of the document (and options): no timestamps,
//! no locale, no external assets. CSV carries the curve (or the spike list
//! for bare potentials) at full float precision; SVG is a small
//! self-contained picture with the well walls, the zero axis, the polyline,
//! and one stem per spike (downward stems are attractive spikes).

use std::fmt::Write as _;

use thiserror::Error;

use crate::document::Document;
use crate::model::DeltaPotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default)]
pub struct PlotOptions {
    /// Which eigenvalue of a spectrum document to draw.
    pub eigenvalue_index: usize,
    /// Spike markers to overlay on a state or problem curve.
    pub overlay: Option<DeltaPotential>,
}

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("cannot plot a {0} document")]
    UnplottableKind(&'static str),
    #[error("eigenvalue index {index} out of range: spectrum has {count}")]
    EigenvalueIndexOutOfRange { index: usize, count: usize },
    #[error("overlay potential describes a different well than the document")]
    OverlayWellMismatch,
    #[error("an overlay only applies to state, problem, or spectrum documents")]
    OverlayNotApplicable,
}

/// What ends up on the canvas.
struct Scene {
    wall_left: f64,
    wall_right: f64,
    /// Polyline samples, ascending in x.
    series: Vec<(f64, f64)>,
    /// Spike markers `(x, c)`.
    spikes: Vec<(f64, f64)>,
    /// Column header for the series CSV.
    csv_header: &'static str,
}

fn spike_pairs(potential: &DeltaPotential) -> Vec<(f64, f64)> {
    potential
        .spikes()
        .iter()
        .map(|s| (s.position().to_f64(), s.coefficient().to_f64()))
        .collect()
}

fn build_scene(doc: &Document, options: &PlotOptions) -> Result<Scene, PlotError> {
    let overlay_pairs = |config: &crate::model::WellConfig| -> Result<Vec<(f64, f64)>, PlotError> {
        match &options.overlay {
            None => Ok(Vec::new()),
            Some(v) => {
                if !v.config().numeric_eq(config) {
                    return Err(PlotError::OverlayWellMismatch);
                }
                Ok(spike_pairs(v))
            }
        }
    };
    match doc {
        Document::State(state) => Ok(Scene {
            wall_left: state.config().wall_left().to_f64(),
            wall_right: state.config().wall_right().to_f64(),
            series: state
                .knots()
                .iter()
                .map(|k| (k.x().to_f64(), k.psi().to_f64()))
                .collect(),
            spikes: overlay_pairs(state.config())?,
            csv_header: "x,psi",
        }),
        Document::Problem(problem) => {
            // by default the reference solution is drawn; an explicit
            // overlay (say, a student's answer) replaces it
            let spikes = if options.overlay.is_some() {
                overlay_pairs(problem.state().config())?
            } else {
                spike_pairs(problem.solution())
            };
            Ok(Scene {
                wall_left: problem.state().config().wall_left().to_f64(),
                wall_right: problem.state().config().wall_right().to_f64(),
                series: problem
                    .state()
                    .knots()
                    .iter()
                    .map(|k| (k.x().to_f64(), k.psi().to_f64()))
                    .collect(),
                spikes,
                csv_header: "x,psi",
            })
        }
        Document::Potential(potential) => {
            if options.overlay.is_some() {
                return Err(PlotError::OverlayNotApplicable);
            }
            Ok(Scene {
                wall_left: potential.config().wall_left().to_f64(),
                wall_right: potential.config().wall_right().to_f64(),
                series: Vec::new(),
                spikes: spike_pairs(potential),
                csv_header: "x,c",
            })
        }
        Document::Spectrum(result) => {
            let count = result.eigenvalues.len();
            let eig = result.eigenvalues.get(options.eigenvalue_index).ok_or(
                PlotError::EigenvalueIndexOutOfRange {
                    index: options.eigenvalue_index,
                    count,
                },
            )?;
            // spectrum documents carry no well geometry beyond the samples
            let wall_left = eig.samples.first().map_or(0.0, |&(x, _)| x);
            let wall_right = eig.samples.last().map_or(1.0, |&(x, _)| x);
            let spikes = match &options.overlay {
                None => Vec::new(),
                Some(v) => spike_pairs(v),
            };
            Ok(Scene {
                wall_left,
                wall_right,
                series: eig.samples.clone(),
                spikes,
                csv_header: "x,psi",
            })
        }
        Document::Grade(_) | Document::Energy(_) => Err(PlotError::UnplottableKind(doc.kind())),
    }
}

fn csv(scene: &Scene) -> String {
    let mut out = String::new();
    if scene.series.is_empty() {
        out.push_str("x,c\n");
        for &(x, c) in &scene.spikes {
            let _ = writeln!(out, "{x},{c}");
        }
    } else {
        out.push_str(scene.csv_header);
        out.push('\n');
        for &(x, y) in &scene.series {
            let _ = writeln!(out, "{x},{y}");
        }
    }
    out
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 400.0;
const PLOT_LEFT: f64 = 56.0;
const PLOT_RIGHT: f64 = 616.0;
const PLOT_MID_Y: f64 = 190.0;
const PLOT_HALF_Y: f64 = 160.0;

fn svg(scene: &Scene) -> String {
    let x_span = scene.wall_right - scene.wall_left;
    let to_px_x = |x: f64| PLOT_LEFT + (x - scene.wall_left) / x_span * (PLOT_RIGHT - PLOT_LEFT);

    let series_peak = scene
        .series
        .iter()
        .fold(0.0f64, |m, &(_, y)| m.max(y.abs()));
    let y_scale = if series_peak > 0.0 {
        series_peak * 1.1
    } else {
        1.0
    };
    let to_px_y = |y: f64| PLOT_MID_Y - y / y_scale * PLOT_HALF_Y;
    let spike_peak = scene
        .spikes
        .iter()
        .fold(0.0f64, |m, &(_, c)| m.max(c.abs()));

    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    out.push_str(r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    // zero axis and walls
    let _ = write!(
        out,
        r##"<line x1="{PLOT_LEFT}" y1="{PLOT_MID_Y}" x2="{PLOT_RIGHT}" y2="{PLOT_MID_Y}" stroke="#aaaaaa" stroke-width="1"/>"##
    );
    for (x, label) in [(scene.wall_left, "left"), (scene.wall_right, "right")] {
        let px = to_px_x(x);
        let _ = write!(
            out,
            r##"<line x1="{px:.2}" y1="20" x2="{px:.2}" y2="360" stroke="#222222" stroke-width="2.5"/>"##
        );
        let _ = write!(
            out,
            r##"<text x="{px:.2}" y="382" font-family="monospace" font-size="13" fill="#333333" text-anchor="middle" data-wall="{label}">{x}</text>"##
        );
    }
    // spike stems: attractive (c < 0) point down, repulsive up
    for &(x, c) in &scene.spikes {
        let px = to_px_x(x);
        let len = if spike_peak > 0.0 {
            c.abs() / spike_peak * (PLOT_HALF_Y * 0.85)
        } else {
            0.0
        };
        let tip = if c < 0.0 {
            PLOT_MID_Y + len
        } else {
            PLOT_MID_Y - len
        };
        let color = if c < 0.0 { "#c23b22" } else { "#2a7e43" };
        let _ = write!(
            out,
            r#"<line x1="{px:.2}" y1="{PLOT_MID_Y}" x2="{px:.2}" y2="{tip:.2}" stroke="{color}" stroke-width="2" stroke-dasharray="5 3"/>"#
        );
        let _ = write!(
            out,
            r#"<circle cx="{px:.2}" cy="{tip:.2}" r="3.5" fill="{color}"/>"#
        );
    }
    // the curve
    if !scene.series.is_empty() {
        out.push_str(r##"<polyline fill="none" stroke="#1f6fb5" stroke-width="2" points=""##);
        for (i, &(x, y)) in scene.series.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.2},{:.2}", to_px_x(x), to_px_y(y));
        }
        out.push_str(r#""/>"#);
    }
    out.push_str("</svg>");
    out
}

/// Renders a plottable document (state, problem, potential, spectrum) to
/// the requested format. Pure: identical inputs give identical bytes.
pub fn plot_document(
    doc: &Document,
    format: PlotFormat,
    options: &PlotOptions,
) -> Result<String, PlotError> {
    let scene = build_scene(doc, options)?;
    Ok(match format {
        PlotFormat::Csv => csv(&scene),
        PlotFormat::Svg => svg(&scene),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jeopardy::invert;
    use crate::model::{Knot, PiecewiseLinearState, WellConfig};
    use crate::scalar::Scalar;
    use crate::spectrum::{find_eigenvalues, ScanParams};

    fn tent_doc() -> Document {
        Document::State(
            PiecewiseLinearState::new(
                vec![
                    Knot::new(Scalar::integer(-1), Scalar::zero()),
                    Knot::new(Scalar::zero(), Scalar::one()),
                    Knot::new(Scalar::integer(1), Scalar::zero()),
                ],
                WellConfig::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn state_csv_is_exact_and_stable() {
        let out = plot_document(&tent_doc(), PlotFormat::Csv, &PlotOptions::default()).unwrap();
        assert_eq!(out, "x,psi\n-1,0\n0,1\n1,0\n");
        let again = plot_document(&tent_doc(), PlotFormat::Csv, &PlotOptions::default()).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn potential_csv_lists_spikes() {
        let Document::State(state) = tent_doc() else {
            unreachable!()
        };
        let v = invert(&state).unwrap();
        let out = plot_document(
            &Document::Potential(v),
            PlotFormat::Csv,
            &PlotOptions::default(),
        )
        .unwrap();
        assert_eq!(out, "x,c\n0,-2\n");
    }

    #[test]
    fn svg_is_self_contained_and_deterministic() {
        let opts = PlotOptions::default();
        let out = plot_document(&tent_doc(), PlotFormat::Svg, &opts).unwrap();
        assert!(out.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(out.ends_with("</svg>"));
        assert!(out.contains("<polyline"));
        assert!(!out.contains("NaN"));
        // self-contained: the only URL is the xmlns namespace
        assert_eq!(out.matches("http").count(), 1);
        let again = plot_document(&tent_doc(), PlotFormat::Svg, &opts).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn overlay_draws_spike_stems() {
        let Document::State(state) = tent_doc() else {
            unreachable!()
        };
        let v = invert(&state).unwrap();
        let opts = PlotOptions {
            overlay: Some(v),
            ..Default::default()
        };
        let out = plot_document(&tent_doc(), PlotFormat::Svg, &opts).unwrap();
        assert!(out.contains("stroke-dasharray"));
        assert!(
            out.contains("#c23b22"),
            "attractive spike drawn downward-red"
        );
    }

    #[test]
    fn overlay_well_mismatch_is_rejected() {
        let other = WellConfig::new(Scalar::integer(0), Scalar::integer(1), Scalar::one()).unwrap();
        let opts = PlotOptions {
            overlay: Some(crate::model::DeltaPotential::empty(other)),
            ..Default::default()
        };
        assert!(matches!(
            plot_document(&tent_doc(), PlotFormat::Svg, &opts),
            Err(PlotError::OverlayWellMismatch)
        ));
    }

    #[test]
    fn spectrum_plots_selected_eigenvalue() {
        let Document::State(state) = tent_doc() else {
            unreachable!()
        };
        let v = invert(&state).unwrap();
        let spec = find_eigenvalues(&v, &ScanParams::default_for(&WellConfig::default())).unwrap();
        let n = spec.eigenvalues.len();
        let doc = Document::Spectrum(spec);
        let ground = plot_document(&doc, PlotFormat::Csv, &PlotOptions::default()).unwrap();
        assert!(ground.starts_with("x,psi\n"));
        let opts = PlotOptions {
            eigenvalue_index: n,
            ..Default::default()
        };
        assert!(matches!(
            plot_document(&doc, PlotFormat::Csv, &opts),
            Err(PlotError::EigenvalueIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn reports_are_unplottable() {
        let Document::State(state) = tent_doc() else {
            unreachable!()
        };
        let v = invert(&state).unwrap();
        let (unit, _) = state.normalize().unwrap();
        let energy = crate::jeopardy::expectations(&unit, &v).unwrap();
        assert!(matches!(
            plot_document(
                &Document::Energy(energy),
                PlotFormat::Csv,
                &PlotOptions::default()
            ),
            Err(PlotError::UnplottableKind("energy-report"))
        ));
    }
}
