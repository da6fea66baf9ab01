//! Quasi-static support-polygon stability on an incline.
//!
//! The body rests on a single supporting segment spanning [x_l, x_u] along
//! the slope line. It rolls when the gravity projection of its center leaves
//! that interval: past the front contact it tips forward (+x, uphill for a
//! positive incline), behind the rear contact it tips backward. Inclines and
//! pitches are degrees throughout; positive means +x points uphill.

use thiserror::Error;

use crate::geometry::{SupportFrame, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum StabilityError {
    #[error("support frame has center height {0} on or below the ground line")]
    DegenerateSupport(f64),
}

/// Direction the body tips, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RollDirection {
    Forward,
    Backward,
    None,
}

impl std::fmt::Display for RollDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RollDirection::Forward => "forward",
            RollDirection::Backward => "backward",
            RollDirection::None => "none",
        };
        f.write_str(s)
    }
}

/// Tipping verdict plus a signed stability margin in meters.
///
/// Forward: distance of the projection past the front contact. Backward:
/// distance behind the rear contact. None: negative distance from the
/// projection to the nearer contact (how far it sits inside the interval).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollOutcome {
    pub direction: RollDirection,
    pub margin_m: f64,
}

/// Largest incline a configuration still rolls forward on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalPitch {
    /// Forward rolling stops above this incline, in degrees.
    Limit(f64),
    /// The configuration cannot roll forward on any non-negative incline.
    NonRolling,
}

/// Project the center of mass along gravity onto the support line.
///
/// On an incline of `incline_deg`, a center at (x_c, z_c) in the support
/// frame lands at x_c - z_c * tan(incline).
pub fn gravity_project(com: Vec2, incline_deg: f64) -> f64 {
    com.x - com.z * incline_deg.to_radians().tan()
}

/// Decide whether the frame tips on the given incline, with margin.
///
/// Both comparisons are strict: a projection exactly on a contact point is
/// balanced and does not roll.
pub fn roll_outcome(frame: &SupportFrame, incline_deg: f64) -> RollOutcome {
    let x_p = gravity_project(frame.com, incline_deg);
    if x_p > frame.ersp_max {
        RollOutcome {
            direction: RollDirection::Forward,
            margin_m: x_p - frame.ersp_max,
        }
    } else if x_p < frame.ersp_min {
        RollOutcome {
            direction: RollDirection::Backward,
            margin_m: frame.ersp_min - x_p,
        }
    } else {
        let inside = (x_p - frame.ersp_min).min(frame.ersp_max - x_p);
        RollOutcome {
            direction: RollDirection::None,
            margin_m: -inside,
        }
    }
}

/// Critical forward-rolling pitch of a support frame, in degrees.
///
/// Closed form: the projection x_c - z_c * tan(b) meets the front contact
/// when tan(b) = (x_c - x_u) / z_c. A center at or behind the front contact
/// never rolls forward uphill.
pub fn critical_pitch(frame: &SupportFrame) -> Result<CriticalPitch, StabilityError> {
    if frame.com.z <= 0.0 {
        return Err(StabilityError::DegenerateSupport(frame.com.z));
    }
    if frame.com.x <= frame.ersp_max {
        return Ok(CriticalPitch::NonRolling);
    }
    let limit = ((frame.com.x - frame.ersp_max) / frame.com.z).atan();
    Ok(CriticalPitch::Limit(limit.to_degrees()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChainShape;
    use std::f64::consts::{FRAC_PI_3, PI};

    fn leaning_parallelogon(segment_length: f64) -> ChainShape {
        let angles = [
            FRAC_PI_3,
            5.0 * PI / 6.0,
            5.0 * PI / 6.0,
            FRAC_PI_3,
            5.0 * PI / 6.0,
            5.0 * PI / 6.0,
        ];
        ChainShape::from_interior_angles(6, segment_length, &angles).unwrap()
    }

    fn frame(com: Vec2, span: f64) -> SupportFrame {
        SupportFrame {
            com,
            ersp_min: 0.0,
            ersp_max: span,
            support_index: 0,
        }
    }

    /// Sweep-based oracle: march the incline in small steps and report the
    /// last one that still tips forward.
    fn critical_pitch_by_sweep(f: &SupportFrame) -> Option<f64> {
        let step = 1e-4;
        let mut last_forward = None;
        let mut incline = 0.0;
        while incline < 89.0 {
            if roll_outcome(f, incline).direction == RollDirection::Forward {
                last_forward = Some(incline);
            } else if last_forward.is_some() {
                break;
            }
            incline += step;
        }
        last_forward
    }

    #[test]
    fn test_gravity_projection_example_values() {
        let com = Vec2::new(1.1830, 0.6830);
        assert!((gravity_project(com, 0.0) - 1.1830).abs() < 1e-12);
        assert!((gravity_project(com, 20.0) - 0.9344).abs() < 5e-5);
        // The exact leaning-parallelogon center projects onto the front
        // contact at exactly 15 degrees: (x_c - 1) / z_c = 2 - sqrt(3).
        let exact = leaning_parallelogon(1.0).com();
        assert!((gravity_project(exact, 15.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn test_roll_outcome_leaning_parallelogon_level_and_steep() {
        let shape = leaning_parallelogon(1.0);
        let f = shape.support_frame(0).unwrap();
        let level = roll_outcome(&f, 0.0);
        assert_eq!(level.direction, RollDirection::Forward);
        assert!((level.margin_m - 0.183_012_701_892_219_3).abs() < 1e-12);

        let steep = roll_outcome(&f, 20.0);
        assert_eq!(steep.direction, RollDirection::None);
        assert!(steep.margin_m < 0.0);
    }

    #[test]
    fn test_roll_outcome_margins_scale_with_size() {
        for scale in [0.056, 1.0, 3.7] {
            let f = leaning_parallelogon(scale).support_frame(0).unwrap();
            let outcome = roll_outcome(&f, 0.0);
            assert_eq!(outcome.direction, RollDirection::Forward);
            assert!((outcome.margin_m - 0.183_012_701_892_219_3 * scale).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn test_boundary_projection_is_balanced() {
        // Center directly above the front contact: strictly no roll.
        let f = frame(Vec2::new(1.0, 0.5), 1.0);
        let outcome = roll_outcome(&f, 0.0);
        assert_eq!(outcome.direction, RollDirection::None);
        assert_eq!(outcome.margin_m, 0.0);
    }

    #[test]
    fn test_backward_tumble_on_steep_climb() {
        // Climbing shifts the projection rearward: a weakly leaning body
        // tips backward once the projection clears the rear contact.
        // x_p = 0.2 - 0.8 tan(20 deg) = -0.091 < 0.
        let f = frame(Vec2::new(0.2, 0.8), 1.0);
        let outcome = roll_outcome(&f, 20.0);
        assert_eq!(outcome.direction, RollDirection::Backward);
        assert!(outcome.margin_m > 0.0);
    }

    #[test]
    fn test_critical_pitch_leaning_parallelogon_is_fifteen_degrees() {
        let f = leaning_parallelogon(1.0).support_frame(0).unwrap();
        match critical_pitch(&f).unwrap() {
            CriticalPitch::Limit(deg) => {
                assert!((deg - 15.0).abs() < 1e-9, "expected 15 deg, got {deg}");
                // tan(15 deg) = 2 - sqrt(3) exactly.
                assert!((deg.to_radians().tan() - (2.0 - 3.0f64.sqrt())).abs() < 1e-12);
            }
            CriticalPitch::NonRolling => panic!("leaning parallelogon must roll"),
        }
    }

    #[test]
    fn test_critical_pitch_matches_incline_sweep() {
        for com in [
            Vec2::new(1.183_012_701_892_219_3, 0.683_012_701_892_219_3),
            Vec2::new(1.4, 0.9),
            Vec2::new(1.05, 0.3),
        ] {
            let f = frame(com, 1.0);
            let closed = match critical_pitch(&f).unwrap() {
                CriticalPitch::Limit(deg) => deg,
                CriticalPitch::NonRolling => panic!("test frames all roll"),
            };
            let swept = critical_pitch_by_sweep(&f).expect("sweep finds forward region");
            assert!(
                (closed - swept).abs() < 2e-4,
                "closed {closed} vs sweep {swept}"
            );
        }
    }

    #[test]
    fn test_critical_pitch_non_rolling_cases() {
        // Center exactly above the front contact, and one behind it.
        for x in [1.0, 0.8] {
            let f = frame(Vec2::new(x, 0.7), 1.0);
            assert_eq!(critical_pitch(&f).unwrap(), CriticalPitch::NonRolling);
        }
    }

    #[test]
    fn test_critical_pitch_rejects_degenerate_frame() {
        let f = frame(Vec2::new(1.2, 0.0), 1.0);
        assert!(matches!(
            critical_pitch(&f),
            Err(StabilityError::DegenerateSupport(_))
        ));
    }

    #[test]
    fn test_forward_to_none_transition_is_sharp() {
        let f = leaning_parallelogon(0.056).support_frame(0).unwrap();
        let limit = match critical_pitch(&f).unwrap() {
            CriticalPitch::Limit(deg) => deg,
            CriticalPitch::NonRolling => unreachable!(),
        };
        let eps_deg = 1e-6_f64.to_degrees();
        assert_eq!(
            roll_outcome(&f, limit - eps_deg).direction,
            RollDirection::Forward
        );
        assert_eq!(
            roll_outcome(&f, limit + eps_deg).direction,
            RollDirection::None
        );
    }

    #[test]
    fn test_margin_monotone_in_incline() {
        let f = leaning_parallelogon(1.0).support_frame(0).unwrap();
        let mut previous = f64::INFINITY;
        for k in 0..40 {
            let incline = k as f64;
            let x_p = gravity_project(f.com, incline);
            assert!(x_p < previous, "projection must decrease with incline");
            previous = x_p;
        }
    }
}
