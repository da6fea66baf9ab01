//! Quasi-static rolling toolkit for shape-shifting segmented robots.
//!
//! The crate models a planar closed chain of equal rigid segments that rolls
//! by changing its interior joint angles: geometry and closure checks
//! ([`geometry`]), support-polygon stability and critical pitch
//! ([`stability`]), the two-parameter space of centrally symmetric hexagon
//! shapes ([`shape_space`]), cyclic shape-change programs ([`gait`]),
//! stride-resolved rolling simulation on rigid and granular ground
//! ([`substrate`]), trajectory post-processing ([`analysis`]), and SVG
//! result views ([`svg`]).

pub mod analysis;
pub mod gait;
pub mod geometry;
pub mod shape_space;
pub mod stability;
pub mod substrate;
pub mod svg;

use gait::{Gait, GaitError};
use stability::{critical_pitch, CriticalPitch};

/// Critical pitch of one switching configuration of a gait.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitCriticalPitch {
    /// Cycle phase of the switching configuration.
    pub phase: f64,
    pub critical_pitch: CriticalPitch,
}

/// Critical forward-tipping pitch at every switching phase of a gait.
pub fn critical_pitch_of_gait(
    gait: &Gait,
    segment_length: f64,
) -> Result<Vec<GaitCriticalPitch>, GaitError> {
    gait.validate()?;
    gait.switching_configs(segment_length)?
        .into_iter()
        .map(|config| {
            let frame = config.shape.support_frame(config.support_index)?;
            let critical = critical_pitch(&frame)
                .expect("support frames always have positive center height");
            Ok(GaitCriticalPitch {
                phase: config.phase,
                critical_pitch: critical,
            })
        })
        .collect()
}
