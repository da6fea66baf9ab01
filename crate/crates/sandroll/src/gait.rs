//! Cyclic shape-change programs ("gaits") and their switching kinematics.
//!
//! A gait is a set of closing keyframe angle sequences over one stride,
//! interpolated cyclically in phase. Keyframe angles are support-relative:
//! joint 0 is the rear contact of the current supporting segment, so the
//! chain realized from any keyframe has segment 0 as its support.
//!
//! Linear blends of closing angle sequences stay closed in their turn sum but
//! can drift off positional closure. Interpolated configurations are
//! re-projected: the turn residual is first distributed equally across
//! joints, then a minimum-norm Gauss-Newton step removes the position
//! residual while preserving the angle sum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ChainShape, GeometryError, Vec2};
use crate::stability::{roll_outcome, RollDirection};

/// Stride period of the reference robot, seconds.
pub const DEFAULT_STRIDE_PERIOD_S: f64 = 3.0;

/// Residual below which a projected configuration is accepted as closed.
const PROJECTION_TOL: f64 = 1e-10;
const PROJECTION_MAX_ITERS: usize = 16;

#[derive(Debug, Error)]
pub enum GaitError {
    #[error("gait has no keyframes")]
    EmptyGait,
    #[error("keyframe phase {0} outside [0, 1)")]
    PhaseOutOfRange(f64),
    #[error("keyframe phases must be strictly increasing")]
    PhasesNotIncreasing,
    #[error("keyframes disagree on joint count")]
    JointCountMismatch,
    #[error("keyframe at phase {phase} does not close: {source}")]
    NonClosingKeyframe {
        phase: f64,
        source: GeometryError,
    },
    #[error("closure projection stalled at residual {residual:.3e} m")]
    ClosureProjectionFailed { residual: f64 },
    #[error("no built-in gait named {0}")]
    UnknownBuiltin(String),
    #[error("malformed gait file: {0}")]
    MalformedFile(String),
    #[error("cannot read gait file: {0}")]
    Io(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One posture sample of the cycle.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Keyframe {
    pub phase: f64,
    pub interior_angles_rad: Vec<f64>,
}

/// A cyclic shape-change program.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Gait {
    pub name: String,
    pub stride_period_s: f64,
    pub keyframes: Vec<Keyframe>,
    /// Phases at which support transfer is intended.
    pub switching_phases: Vec<f64>,
}

/// The chain realized at a switching phase, with its supporting segment.
#[derive(Debug, Clone)]
pub struct SwitchingConfig {
    pub phase: f64,
    pub shape: ChainShape,
    /// Index of the outgoing supporting segment. Keyframe angles are
    /// support-relative, so this is always segment 0.
    pub support_index: usize,
}

/// Solve the 3x3 system M y = b by Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &c| m[a][col].abs().total_cmp(&m[c][col].abs()))
            .unwrap();
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut y = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc -= m[row][k] * y[k];
        }
        y[row] = acc / m[row][row];
    }
    Some(y)
}

/// Position residual of the vertex walk for an angle sequence.
fn walk_residual(angles: &[f64]) -> Vec2 {
    let mut heading = 0.0;
    let mut residual = Vec2::unit(0.0);
    for &angle in &angles[1..] {
        heading += std::f64::consts::PI - angle;
        residual = residual.add(Vec2::unit(heading));
    }
    residual
}

/// Project an angle sequence onto the closure manifold.
///
/// Distributes the turn residual equally, then applies minimum-norm
/// Gauss-Newton corrections that keep the angle sum fixed until the walk
/// returns to its start.
pub fn project_to_closure(angles: &mut [f64]) -> Result<(), GaitError> {
    let n = angles.len();
    let target_sum = (n as f64 - 2.0) * std::f64::consts::PI;
    let sum: f64 = angles.iter().sum();
    let per_joint = (sum - target_sum) / n as f64;
    for a in angles.iter_mut() {
        *a -= per_joint;
    }

    for _ in 0..PROJECTION_MAX_ITERS {
        let residual = walk_residual(angles);
        if residual.norm() < PROJECTION_TOL {
            return Ok(());
        }
        // Heading of segment i accumulates -theta_j for every joint j <= i,
        // so column j of the Jacobian sums (sin d_i, -cos d_i) over i >= j.
        let mut headings = vec![0.0; n];
        for i in 1..n {
            headings[i] = headings[i - 1] + std::f64::consts::PI - angles[i];
        }
        let mut jx = vec![0.0; n];
        let mut jz = vec![0.0; n];
        let mut sx = 0.0;
        let mut sz = 0.0;
        for j in (1..n).rev() {
            sx += headings[j].sin();
            sz -= headings[j].cos();
            jx[j] = sx;
            jz[j] = sz;
        }
        // Minimum-norm solve of [J; 1] delta = [-residual; 0].
        let ones = vec![1.0; n];
        let rows: [&[f64]; 3] = [&jx, &jz, &ones];
        let mut m = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] = rows[r].iter().zip(rows[c]).map(|(a, b)| a * b).sum();
            }
        }
        let b = [-residual.x, -residual.z, 0.0];
        let Some(y) = solve3(m, b) else {
            return Err(GaitError::ClosureProjectionFailed {
                residual: residual.norm(),
            });
        };
        for j in 0..n {
            angles[j] += jx[j] * y[0] + jz[j] * y[1] + y[2];
        }
    }

    let residual = walk_residual(angles).norm();
    if residual < PROJECTION_TOL {
        Ok(())
    } else {
        Err(GaitError::ClosureProjectionFailed { residual })
    }
}

impl Gait {
    /// Validate keyframe ordering, phase domain, and keyframe closure.
    pub fn validate(&self) -> Result<(), GaitError> {
        if self.keyframes.is_empty() {
            return Err(GaitError::EmptyGait);
        }
        let joints = self.keyframes[0].interior_angles_rad.len();
        let mut previous = -1.0;
        for kf in &self.keyframes {
            if !(0.0..1.0).contains(&kf.phase) {
                return Err(GaitError::PhaseOutOfRange(kf.phase));
            }
            if kf.phase <= previous {
                return Err(GaitError::PhasesNotIncreasing);
            }
            previous = kf.phase;
            if kf.interior_angles_rad.len() != joints {
                return Err(GaitError::JointCountMismatch);
            }
            // Closure is scale-free; validate at unit segment length.
            ChainShape::from_interior_angles(joints, 1.0, &kf.interior_angles_rad).map_err(
                |source| GaitError::NonClosingKeyframe {
                    phase: kf.phase,
                    source,
                },
            )?;
        }
        let mut previous = -1.0;
        for &phase in &self.switching_phases {
            if !(0.0..1.0).contains(&phase) {
                return Err(GaitError::PhaseOutOfRange(phase));
            }
            if phase <= previous {
                return Err(GaitError::PhasesNotIncreasing);
            }
            previous = phase;
        }
        Ok(())
    }

    pub fn joint_count(&self) -> usize {
        self.keyframes
            .first()
            .map(|kf| kf.interior_angles_rad.len())
            .unwrap_or(0)
    }

    /// Interior angles at an arbitrary phase of the cycle.
    ///
    /// Exactly at a keyframe the keyframe angles are returned untouched;
    /// between keyframes a linear blend is re-projected onto closure. The
    /// cycle wraps from the last keyframe back to the first.
    pub fn config_at(&self, phase: f64) -> Result<Vec<f64>, GaitError> {
        if self.keyframes.is_empty() {
            return Err(GaitError::EmptyGait);
        }
        let phase = phase.rem_euclid(1.0);
        if let Some(kf) = self.keyframes.iter().find(|kf| kf.phase == phase) {
            return Ok(kf.interior_angles_rad.clone());
        }
        // Last keyframe at or before the phase, wrapping backward.
        let (a, b, span, offset) = {
            let idx = self
                .keyframes
                .iter()
                .rposition(|kf| kf.phase <= phase)
                .unwrap_or(self.keyframes.len() - 1);
            let a = &self.keyframes[idx];
            let next = (idx + 1) % self.keyframes.len();
            let b = &self.keyframes[next];
            let mut span = b.phase - a.phase;
            let mut offset = phase - a.phase;
            if span <= 0.0 {
                span += 1.0;
            }
            if offset < 0.0 {
                offset += 1.0;
            }
            (a, b, span, offset)
        };
        let t = offset / span;
        let mut blended: Vec<f64> = a
            .interior_angles_rad
            .iter()
            .zip(&b.interior_angles_rad)
            .map(|(&x, &y)| x * (1.0 - t) + y * t)
            .collect();
        project_to_closure(&mut blended)?;
        Ok(blended)
    }

    /// Realized chain and support identity at each switching phase.
    pub fn switching_configs(&self, segment_length: f64) -> Result<Vec<SwitchingConfig>, GaitError> {
        self.switching_phases
            .iter()
            .map(|&phase| {
                let angles = self.config_at(phase)?;
                let shape = ChainShape::from_interior_angles(
                    angles.len(),
                    segment_length,
                    &angles,
                )?;
                Ok(SwitchingConfig {
                    phase,
                    shape,
                    support_index: 0,
                })
            })
            .collect()
    }

    /// Kinematic ground advance per switching event on rigid flat ground.
    ///
    /// The body tips about the front contact of its support until the next
    /// joint lands; the incoming segment's rear joint is that pivot, so the
    /// rear contact advances by the pivot position. A gait with no switching
    /// events never advances.
    pub fn geometric_step_length(&self, segment_length: f64) -> Result<f64, GaitError> {
        let configs = self.switching_configs(segment_length)?;
        if configs.is_empty() {
            return Ok(0.0);
        }
        let total: f64 = configs
            .iter()
            .map(|c| tip_advance(&c.shape, c.support_index).map(|(advance, _)| advance))
            .sum::<Result<f64, GaitError>>()?;
        Ok(total / configs.len() as f64)
    }

    /// All switching configurations must tip forward on level ground for the
    /// gait to make progress.
    pub fn rolls_forward_on_level(&self, segment_length: f64) -> Result<bool, GaitError> {
        let configs = self.switching_configs(segment_length)?;
        for config in &configs {
            let frame = config.shape.support_frame(config.support_index)?;
            if roll_outcome(&frame, 0.0).direction != RollDirection::Forward {
                return Ok(false);
            }
        }
        Ok(!configs.is_empty())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gait serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GaitError> {
        let gait: Gait =
            serde_json::from_str(text).map_err(|e| GaitError::MalformedFile(e.to_string()))?;
        gait.validate()?;
        Ok(gait)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, GaitError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GaitError::Io(format!("{}: {e}", path.display())))?;
        Gait::from_json(&text)
    }

    /// Load one of the shipped gaits: "hexagon", "quadrilateral", "triangle".
    pub fn builtin(name: &str) -> Result<Self, GaitError> {
        let text = match name {
            "hexagon" => include_str!("../gaits/hexagon.json"),
            "quadrilateral" => include_str!("../gaits/quadrilateral.json"),
            "triangle" => include_str!("../gaits/triangle.json"),
            other => return Err(GaitError::UnknownBuiltin(other.to_string())),
        };
        Gait::from_json(text)
    }
}

/// Tip a chain rigidly about the front contact of its support until another
/// joint reaches the ground ahead. Returns the rear-contact advance and the
/// landing joint index.
pub fn tip_advance(shape: &ChainShape, support_index: usize) -> Result<(f64, usize), GaitError> {
    let posed = shape.posed_on_support(support_index)?;
    let n = posed.segment_count;
    let pivot_index = (support_index + 1) % n;
    let pivot = posed.vertices[pivot_index];
    let mut best: Option<(f64, usize)> = None;
    for (j, &v) in posed.vertices.iter().enumerate() {
        if j == pivot_index {
            continue;
        }
        let rel = v.sub(pivot);
        if rel.norm() < 1e-12 {
            continue;
        }
        // Clockwise rotation needed to bring the joint down to the ground
        // ahead of the pivot.
        let angle = rel.z.atan2(rel.x).rem_euclid(std::f64::consts::TAU);
        if angle < 1e-12 {
            continue;
        }
        match best {
            Some((a, _)) if a <= angle => {}
            _ => best = Some((angle, j)),
        }
    }
    let (_, landing) = best.expect("a closed chain always has a landing joint");
    // The incoming segment's rear joint is the pivot itself; the rear contact
    // moves from the origin to the pivot.
    Ok((pivot.x, landing))
}
