//! Planar closed-chain geometry for a segmented rolling body.
//!
//! A body is a closed chain of equal-length rigid segments in the sagittal
//! (x, z) plane, described by its interior joint angles. Chains are traversed
//! counter-clockwise, so the body interior lies above a supporting segment
//! placed on the +x axis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Segment count of the reference robot (six joints, six segments).
pub const DEFAULT_SEGMENT_COUNT: usize = 6;
/// Segment length in meters of the reference robot.
pub const DEFAULT_SEGMENT_LENGTH: f64 = 0.056;
/// Segment width in meters. The model is planar; this is metadata used only
/// to derive a default ground contact area.
pub const SEGMENT_WIDTH: f64 = 0.072;

/// Positional closure tolerance for the vertex walk, in meters.
pub const CLOSURE_TOL_M: f64 = 1e-6;
/// Tolerance on the exterior-turn sum (must be 2*pi for a simple convex loop).
pub const TURN_TOL_RAD: f64 = 1e-9;

/// A point or displacement in the sagittal plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub z: f64,
}

impl Vec2 {
    pub const fn new(x: f64, z: f64) -> Self {
        Vec2 { x, z }
    }

    pub fn add(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x + other.x, self.z + other.z)
    }

    pub fn sub(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x - other.x, self.z - other.z)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.z * s)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.z)
    }

    /// Rotate counter-clockwise about the origin.
    pub fn rotate(self, angle_rad: f64) -> Vec2 {
        let (s, c) = angle_rad.sin_cos();
        Vec2::new(c * self.x - s * self.z, s * self.x + c * self.z)
    }

    /// Unit vector at the given heading (0 = +x, pi/2 = +z).
    pub fn unit(angle_rad: f64) -> Vec2 {
        let (s, c) = angle_rad.sin_cos();
        Vec2::new(c, s)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("chain does not close: position residual ({x:.3e}, {z:.3e}) m, turn residual {turn:.3e} rad")]
    NonClosingChain { x: f64, z: f64, turn: f64 },
    #[error("interior angle {value} rad at joint {index} outside (0, pi]")]
    InvalidAngle { index: usize, value: f64 },
    #[error("segment count {0} below minimum of 3")]
    InvalidSegmentCount(usize),
    #[error("segment length {0} must be positive")]
    InvalidSegmentLength(f64),
    #[error("angle count {angles} does not match segment count {segments}")]
    AngleCountMismatch { angles: usize, segments: usize },
    #[error("vertex spacing {found} differs from segment length {expected} at segment {index}")]
    UnequalSegment { index: usize, expected: f64, found: f64 },
    #[error("support segment {0} leaves the body center on or below the ground line")]
    DegenerateSupport(usize),
    #[error("support index {index} out of range for {segments} segments")]
    SupportIndexOutOfRange { index: usize, segments: usize },
    #[error("malformed shape file: {0}")]
    MalformedFile(String),
}

/// Serialized form of a chain shape. Angles are radians; lengths are meters.
#[derive(Debug, Serialize, Deserialize)]
struct ShapeFile {
    segment_count: usize,
    segment_length_m: f64,
    interior_angles_rad: Vec<f64>,
}

/// A closed chain of equal-length segments with its realized vertex loop.
///
/// `vertices[i]` is joint i; segment i runs from joint i to joint (i+1) mod n.
/// `interior_angles[i]` is the interior angle at joint i, between segments
/// i-1 and i.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainShape {
    pub segment_count: usize,
    pub segment_length: f64,
    pub interior_angles: Vec<f64>,
    pub vertices: Vec<Vec2>,
}

/// A shape re-expressed in the frame of one supporting segment: the segment
/// spans the ground interval [ersp_min, ersp_max] on the +x axis and the body
/// center sits at `com` with com.z > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportFrame {
    pub com: Vec2,
    pub ersp_min: f64,
    pub ersp_max: f64,
    pub support_index: usize,
}

fn validate_angles(angles: &[f64]) -> Result<(), GeometryError> {
    for (index, &value) in angles.iter().enumerate() {
        // Open at zero, closed at pi: a straight joint is a legal shape vertex.
        if !(value > 0.0 && value <= std::f64::consts::PI + 1e-12) {
            return Err(GeometryError::InvalidAngle { index, value });
        }
    }
    Ok(())
}

/// Walk the chain from the origin along +x, turning by the exterior angle
/// (pi - interior) at each joint. Returns segment headings.
fn segment_headings(interior_angles: &[f64]) -> Vec<f64> {
    let mut headings = Vec::with_capacity(interior_angles.len());
    let mut heading = 0.0;
    headings.push(heading);
    for &angle in &interior_angles[1..] {
        heading += std::f64::consts::PI - angle;
        headings.push(heading);
    }
    headings
}

impl ChainShape {
    /// Build the chain realized by an interior-angle sequence.
    ///
    /// The first segment lies on the +x axis from the origin. Fails when the
    /// walk does not return to the origin within [`CLOSURE_TOL_M`] or the
    /// exterior turns do not sum to one full revolution.
    pub fn from_interior_angles(
        segment_count: usize,
        segment_length: f64,
        interior_angles: &[f64],
    ) -> Result<Self, GeometryError> {
        if segment_count < 3 {
            return Err(GeometryError::InvalidSegmentCount(segment_count));
        }
        if !(segment_length > 0.0) {
            return Err(GeometryError::InvalidSegmentLength(segment_length));
        }
        if interior_angles.len() != segment_count {
            return Err(GeometryError::AngleCountMismatch {
                angles: interior_angles.len(),
                segments: segment_count,
            });
        }
        validate_angles(interior_angles)?;

        // Exterior turns of a simple CCW loop sum to exactly 2*pi. A sum of
        // 4*pi (e.g. six joints all at pi/3) walks the loop twice and is
        // rejected even though its position residual vanishes.
        let turn_sum: f64 = interior_angles
            .iter()
            .map(|a| std::f64::consts::PI - a)
            .sum();
        let turn_residual = turn_sum - std::f64::consts::TAU;

        let headings = segment_headings(interior_angles);
        let mut vertices = Vec::with_capacity(segment_count);
        let mut cursor = Vec2::default();
        for &heading in &headings {
            vertices.push(cursor);
            cursor = cursor.add(Vec2::unit(heading).scale(segment_length));
        }
        // `cursor` is now the walk's return point; it must land on vertex 0.
        if turn_residual.abs() > TURN_TOL_RAD || cursor.norm() > CLOSURE_TOL_M {
            return Err(GeometryError::NonClosingChain {
                x: cursor.x,
                z: cursor.z,
                turn: turn_residual,
            });
        }

        Ok(ChainShape {
            segment_count,
            segment_length,
            interior_angles: interior_angles.to_vec(),
            vertices,
        })
    }

    /// Build from an explicit vertex loop (any rigid pose), deriving angles.
    pub fn from_vertices(segment_length: f64, vertices: &[Vec2]) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::InvalidSegmentCount(n));
        }
        if !(segment_length > 0.0) {
            return Err(GeometryError::InvalidSegmentLength(segment_length));
        }
        for i in 0..n {
            let found = vertices[(i + 1) % n].sub(vertices[i]).norm();
            if (found - segment_length).abs() > 1e-9 {
                return Err(GeometryError::UnequalSegment {
                    index: i,
                    expected: segment_length,
                    found,
                });
            }
        }
        let mut interior_angles = Vec::with_capacity(n);
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n].sub(vertices[i]);
            let next = vertices[(i + 1) % n].sub(vertices[i]);
            let dot = (prev.x * next.x + prev.z * next.z) / (prev.norm() * next.norm());
            interior_angles.push(dot.clamp(-1.0, 1.0).acos());
        }
        validate_angles(&interior_angles)?;
        Ok(ChainShape {
            segment_count: n,
            segment_length,
            interior_angles,
            vertices: vertices.to_vec(),
        })
    }

    /// Unweighted mean of the joint positions (uniform joint masses).
    pub fn com(&self) -> Vec2 {
        let sum = self
            .vertices
            .iter()
            .fold(Vec2::default(), |acc, &v| acc.add(v));
        sum.scale(1.0 / self.segment_count as f64)
    }

    /// The same shape under a rigid transform (rotation then translation).
    pub fn transformed(&self, rotation_rad: f64, translation: Vec2) -> ChainShape {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.rotate(rotation_rad).add(translation))
            .collect();
        ChainShape {
            segment_count: self.segment_count,
            segment_length: self.segment_length,
            interior_angles: self.interior_angles.clone(),
            vertices,
        }
    }

    /// Re-express the shape in the frame of the given supporting segment.
    ///
    /// The support spans [0, segment_length] on the +x axis with the rear
    /// contact at the origin; the body must lie above it.
    pub fn support_frame(&self, support_index: usize) -> Result<SupportFrame, GeometryError> {
        if support_index >= self.segment_count {
            return Err(GeometryError::SupportIndexOutOfRange {
                index: support_index,
                segments: self.segment_count,
            });
        }
        let rear = self.vertices[support_index];
        let front = self.vertices[(support_index + 1) % self.segment_count];
        let span = front.sub(rear);
        let heading = span.z.atan2(span.x);
        let com = self.com().sub(rear).rotate(-heading);
        if com.z <= 0.0 {
            return Err(GeometryError::DegenerateSupport(support_index));
        }
        Ok(SupportFrame {
            com,
            ersp_min: 0.0,
            ersp_max: self.segment_length,
            support_index,
        })
    }

    /// The same shape rigidly moved so the given segment spans
    /// [0, segment_length] on the +x axis (the support frame pose).
    pub fn posed_on_support(&self, support_index: usize) -> Result<ChainShape, GeometryError> {
        // Borrow the validity checks; the frame itself is recomputed below.
        self.support_frame(support_index)?;
        let rear = self.vertices[support_index];
        let front = self.vertices[(support_index + 1) % self.segment_count];
        let span = front.sub(rear);
        let heading = span.z.atan2(span.x);
        Ok(self.transformed(-heading, rear.scale(-1.0).rotate(-heading)))
    }

    /// Serialize to the shape file format.
    pub fn to_file_json(&self) -> String {
        let file = ShapeFile {
            segment_count: self.segment_count,
            segment_length_m: self.segment_length,
            interior_angles_rad: self.interior_angles.clone(),
        };
        serde_json::to_string_pretty(&file).expect("shape file serialization cannot fail")
    }

    /// Parse the shape file format and realize the chain.
    pub fn from_file_json(text: &str) -> Result<Self, GeometryError> {
        let file: ShapeFile =
            serde_json::from_str(text).map_err(|e| GeometryError::MalformedFile(e.to_string()))?;
        ChainShape::from_interior_angles(
            file.segment_count,
            file.segment_length_m,
            &file.interior_angles_rad,
        )
    }
}
