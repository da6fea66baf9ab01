//! Two-parameter family of centrally symmetric six-segment shapes and its
//! rolling-direction map.
//!
//! A family member is described by the interior angle at the rear contact of
//! the supporting segment (`alpha`) and at the front contact (`zeta`); the
//! remaining angle is fixed by the hexagon angle sum, and opposite joints are
//! equal. Closed-form level and slope tests classify each shape without
//! building the chain; the generic projection path is kept as an oracle.

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{ChainShape, GeometryError};
use crate::stability::{roll_outcome, RollDirection, RollOutcome};

#[derive(Debug, Error, PartialEq)]
pub enum ShapeSpaceError {
    #[error(
        "no centrally symmetric shape for alpha {alpha} rad, zeta {zeta} rad: {reason}"
    )]
    InvalidShapeParams {
        alpha: f64,
        zeta: f64,
        reason: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Angle pair selecting one centrally symmetric shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    /// Interior angle at the rear contact of the supporting segment, radians.
    pub alpha: f64,
    /// Interior angle at the front contact of the supporting segment, radians.
    pub zeta: f64,
}

impl ShapeParams {
    pub const fn new(alpha: f64, zeta: f64) -> Self {
        ShapeParams { alpha, zeta }
    }

    /// Third interior angle, fixed by the angle sum of the hexagon.
    pub fn gamma(&self) -> f64 {
        std::f64::consts::TAU - self.alpha - self.zeta
    }

    /// All three angles must lie in (0, pi] for the loop to be convex.
    pub fn is_valid(&self) -> bool {
        let in_domain = |a: f64| a > 0.0 && a <= std::f64::consts::PI + 1e-12;
        in_domain(self.alpha) && in_domain(self.zeta) && in_domain(self.gamma())
    }
}

/// Realize the shape as a closed chain with the given segment length.
///
/// The angle sequence is [alpha, zeta, gamma, alpha, zeta, gamma]; central
/// symmetry makes the walk close for every valid parameter pair.
pub fn parallelogon(params: ShapeParams, segment_length: f64) -> Result<ChainShape, ShapeSpaceError> {
    if !params.is_valid() {
        return Err(ShapeSpaceError::InvalidShapeParams {
            alpha: params.alpha,
            zeta: params.zeta,
            reason: format!("third angle {:.6} rad outside (0, pi]", params.gamma()),
        });
    }
    let g = params.gamma();
    let angles = [params.alpha, params.zeta, g, params.alpha, params.zeta, g];
    Ok(ChainShape::from_interior_angles(6, segment_length, &angles)?)
}

/// Closed-form level-ground classification.
///
/// The shape tips forward when cos(alpha) - cos(zeta) > 1, backward when
/// below -1, and balances otherwise. Inequalities are strict.
pub fn classify_level(params: ShapeParams) -> RollDirection {
    let d = params.alpha.cos() - params.zeta.cos();
    if d > 1.0 {
        RollDirection::Forward
    } else if d < -1.0 {
        RollDirection::Backward
    } else {
        RollDirection::None
    }
}

/// Closed-form classification on an incline of `theta_deg` degrees.
///
/// Tips uphill (+x) when cos(alpha + theta) - cos(zeta - theta) > cos(theta),
/// downhill when below -cos(theta). Reduces exactly to the level test at
/// theta = 0.
pub fn classify_slope(params: ShapeParams, theta_deg: f64) -> RollDirection {
    let t = theta_deg.to_radians();
    let d = (params.alpha + t).cos() - (params.zeta - t).cos();
    let bound = t.cos();
    if d > bound {
        RollDirection::Forward
    } else if d < -bound {
        RollDirection::Backward
    } else {
        RollDirection::None
    }
}

/// One grid cell of a classification map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapCell {
    pub alpha: f64,
    pub zeta: f64,
    /// Some(outcome) for realizable shapes, None where the angle pair has no
    /// convex realization (such cells are never classified).
    pub outcome: Option<RollOutcome>,
}

/// Rolling-direction map over the angle grid at one incline.
#[derive(Debug, Clone)]
pub struct ClassificationMap {
    pub grid_n: usize,
    pub theta_deg: f64,
    pub segment_length: f64,
    /// Row-major: alpha varies in the outer loop, zeta in the inner.
    pub cells: Vec<MapCell>,
}

/// Per-class cell totals of a map: forward, backward, none, invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub forward: usize,
    pub backward: usize,
    pub none: usize,
    pub invalid: usize,
}

/// Grid coordinate: uniform steps over (0, pi], inclusive at pi and open at
/// zero, so point i of n is (i + 1) * pi / n.
pub fn grid_point(index: usize, grid_n: usize) -> f64 {
    (index + 1) as f64 * std::f64::consts::PI / grid_n as f64
}

/// Classify the full grid at one incline.
///
/// Outcomes come from the closed-form slope test; margins come from the
/// generic projection path on the realized chain. The two agree everywhere
/// (verified in tests away from a vanishing boundary band).
pub fn sweep(grid_n: usize, theta_deg: f64, segment_length: f64) -> ClassificationMap {
    let cells: Vec<MapCell> = (0..grid_n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let alpha = grid_point(i, grid_n);
            (0..grid_n).map(move |j| {
                let zeta = grid_point(j, grid_n);
                let params = ShapeParams::new(alpha, zeta);
                if !params.is_valid() {
                    return MapCell {
                        alpha,
                        zeta,
                        outcome: None,
                    };
                }
                let direction = classify_slope(params, theta_deg);
                let shape = parallelogon(params, segment_length)
                    .expect("valid params always realize");
                let frame = shape
                    .support_frame(0)
                    .expect("convex realization has positive center height");
                let margin = roll_outcome(&frame, theta_deg).margin_m;
                MapCell {
                    alpha,
                    zeta,
                    outcome: Some(RollOutcome {
                        direction,
                        margin_m: margin,
                    }),
                }
            })
        })
        .collect();
    ClassificationMap {
        grid_n,
        theta_deg,
        segment_length,
        cells,
    }
}

impl ClassificationMap {
    pub fn counts(&self) -> ClassCounts {
        let mut counts = ClassCounts {
            forward: 0,
            backward: 0,
            none: 0,
            invalid: 0,
        };
        for cell in &self.cells {
            match cell.outcome.map(|o| o.direction) {
                Some(RollDirection::Forward) => counts.forward += 1,
                Some(RollDirection::Backward) => counts.backward += 1,
                Some(RollDirection::None) => counts.none += 1,
                None => counts.invalid += 1,
            }
        }
        counts
    }

    /// Render the map as CSV. Invalid cells carry empty outcome and margin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha_rad,zeta_rad,valid,outcome,margin_m\n");
        for cell in &self.cells {
            match cell.outcome {
                Some(o) => out.push_str(&format!(
                    "{},{},true,{},{}\n",
                    cell.alpha, cell.zeta, o.direction, o.margin_m
                )),
                None => out.push_str(&format!("{},{},false,,\n", cell.alpha, cell.zeta)),
            }
        }
        out
    }
}
