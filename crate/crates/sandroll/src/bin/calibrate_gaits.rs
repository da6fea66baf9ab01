//! Regenerates the shipped gait files.
//!
//! Each gait's switching configuration is a forward-leaning shape whose
//! critical pitch is tuned by bisection inside a one-parameter family of
//! centrally symmetric shapes. The cycle then morphs from the switching
//! configuration through its post-switch relabeling and the nominal shape
//! and back. Keyframes are densified until every interpolated phase
//! realizes as a closed chain with all joints in (0, pi].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::path::PathBuf;

use sandroll::gait::{project_to_closure, tip_advance, Gait, Keyframe};
use sandroll::geometry::{ChainShape, DEFAULT_SEGMENT_LENGTH};
use sandroll::shape_space::{parallelogon, ShapeParams};
use sandroll::stability::CriticalPitch;

/// Phases sampled when checking that a whole cycle realizes. A multiple of
/// the simulator's per-stride sampling so every logged phase is covered.
const SCAN_SAMPLES: usize = 2160;

fn critical_pitch_deg(alpha: f64, zeta: f64) -> f64 {
    let shape = parallelogon(ShapeParams::new(alpha, zeta), DEFAULT_SEGMENT_LENGTH)
        .expect("family member must realize");
    let frame = shape.support_frame(0).expect("support frame");
    match sandroll::stability::critical_pitch(&frame).expect("valid frame") {
        CriticalPitch::Limit(deg) => deg,
        CriticalPitch::NonRolling => f64::NEG_INFINITY,
    }
}

/// Find alpha in [lo, hi] with the requested critical pitch, given that the
/// pitch decreases as alpha grows.
fn bisect_alpha(zeta: f64, target_deg: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = critical_pitch_deg(lo, zeta);
    let f_hi = critical_pitch_deg(hi, zeta);
    assert!(
        f_lo > target_deg && f_hi < target_deg,
        "target {target_deg} deg not bracketed: [{f_lo}, {f_hi}]"
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if critical_pitch_deg(mid, zeta) > target_deg {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn parallelogon_angles(alpha: f64, zeta: f64) -> Vec<f64> {
    let gamma = std::f64::consts::TAU - alpha - zeta;
    vec![alpha, zeta, gamma, alpha, zeta, gamma]
}

/// Cyclic relabeling after a one-segment advance: the new joint 0 is the old
/// joint 1.
fn rotate_labels(angles: &[f64]) -> Vec<f64> {
    let mut out = angles.to_vec();
    out.rotate_left(1);
    out
}

/// Equilateral near-triangle: three corners opened by delta, three straight
/// joints bent by delta. Closes exactly for every delta.
fn rounded_triangle_angles(delta: f64) -> Vec<f64> {
    vec![
        FRAC_PI_3 + delta,
        PI - delta,
        FRAC_PI_3 + delta,
        PI - delta,
        FRAC_PI_3 + delta,
        PI - delta,
    ]
}

/// True when the angle sequence realizes as a closed chain in (0, pi].
fn realizes(angles: &[f64]) -> bool {
    ChainShape::from_interior_angles(angles.len(), DEFAULT_SEGMENT_LENGTH, angles).is_ok()
}

/// First sampled phase whose interpolated configuration fails to realize.
fn first_failing_phase(gait: &Gait) -> Option<f64> {
    (0..SCAN_SAMPLES).map(|k| k as f64 / SCAN_SAMPLES as f64).find(|&phase| {
        match gait.config_at(phase) {
            Ok(angles) => !realizes(&angles),
            Err(_) => true,
        }
    })
}

/// Project onto closure while respecting the (0, pi] joint domain: clamp any
/// overshoot and re-project until both constraints hold.
fn project_into_domain(angles: &mut [f64]) -> bool {
    for _ in 0..40 {
        if project_to_closure(angles).is_err() {
            return false;
        }
        let mut clamped = false;
        for a in angles.iter_mut() {
            if *a > PI {
                *a = PI - 1e-9;
                clamped = true;
            } else if *a < 1e-6 {
                *a = 1e-6;
                clamped = true;
            }
        }
        if !clamped {
            return true;
        }
    }
    false
}

/// Insert projected midpoint keyframes until the whole cycle realizes.
fn densify(gait: &mut Gait) -> usize {
    let mut inserted = 0;
    while let Some(phase) = first_failing_phase(gait) {
        assert!(inserted < 64, "densification failed to converge");
        // Bracketing keyframes of the failing phase, cyclically.
        let idx = gait
            .keyframes
            .iter()
            .rposition(|kf| kf.phase <= phase)
            .unwrap_or(gait.keyframes.len() - 1);
        let next = (idx + 1) % gait.keyframes.len();
        let lo = gait.keyframes[idx].phase;
        let hi = if next == 0 { 1.0 } else { gait.keyframes[next].phase };
        let mid = 0.5 * (lo + hi);
        let a = &gait.keyframes[idx].interior_angles_rad;
        let b = &gait.keyframes[next].interior_angles_rad;
        let mut angles: Vec<f64> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| 0.5 * (x + y))
            .collect();
        assert!(
            project_into_domain(&mut angles),
            "midpoint at phase {mid} cannot be projected into the joint domain"
        );
        assert!(realizes(&angles), "projected midpoint at phase {mid} does not realize");
        gait.keyframes.insert(idx + 1, Keyframe {
            phase: mid,
            interior_angles_rad: angles,
        });
        inserted += 1;
    }
    inserted
}

/// Assemble a gait cycle: switching lunge at phase 0, its post-switch
/// relabeling shortly after, the nominal shape mid-cycle.
fn assemble(name: &str, lunge: Vec<f64>, nominal: Vec<f64>) -> Gait {
    let relabeled = rotate_labels(&lunge);
    let mut gait = Gait {
        name: name.to_string(),
        stride_period_s: 3.0,
        keyframes: vec![
            Keyframe { phase: 0.0, interior_angles_rad: lunge },
            Keyframe { phase: 0.12, interior_angles_rad: relabeled },
            Keyframe { phase: 0.55, interior_angles_rad: nominal },
        ],
        switching_phases: vec![0.0],
    };
    let inserted = densify(&mut gait);
    gait.validate().expect("assembled gait must validate");
    println!("  {name}: {} keyframes ({inserted} inserted by densification)", gait.keyframes.len());
    gait
}

/// All vertices other than the two support contacts must sit strictly above
/// the ground for the lunge to be a single-segment support.
fn assert_single_contact(gait: &Gait) {
    for config in gait.switching_configs(DEFAULT_SEGMENT_LENGTH).expect("switching configs") {
        let posed = config
            .shape
            .posed_on_support(config.support_index)
            .expect("posed switching config");
        for (j, v) in posed.vertices.iter().enumerate() {
            if j == config.support_index || j == config.support_index + 1 {
                continue;
            }
            assert!(
                v.z > 1e-6,
                "{}: joint {j} touches the ground at the switching phase",
                gait.name
            );
        }
    }
}

fn report(gait: &Gait) {
    let configs = gait.switching_configs(DEFAULT_SEGMENT_LENGTH).expect("switching configs");
    for config in &configs {
        let frame = config.shape.support_frame(config.support_index).expect("frame");
        let pitch = match sandroll::stability::critical_pitch(&frame).expect("pitch") {
            CriticalPitch::Limit(deg) => deg,
            CriticalPitch::NonRolling => f64::NAN,
        };
        let (advance, landing) = tip_advance(&config.shape, config.support_index).expect("tip");
        let threshold = DEFAULT_SEGMENT_LENGTH * pitch.to_radians().sin();
        println!(
            "  {:<13} critical pitch {:7.3} deg  step {:.4} m  landing joint {}  sinkage threshold {:.5} m",
            gait.name, pitch, advance, landing, threshold
        );
    }
    assert!(
        gait.rolls_forward_on_level(DEFAULT_SEGMENT_LENGTH).expect("level check"),
        "{} must tip forward on level ground",
        gait.name
    );
}

fn main() {
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("gaits");

    println!("calibrating switching configurations");
    // Hexagon: lean the ideal rolling shape a little more upright.
    let hex_zeta = 5.0 * PI / 6.0;
    let hex_alpha = bisect_alpha(hex_zeta, 13.6, FRAC_PI_3, 2.0 * FRAC_PI_3);
    // Flattened lunges for the slow shapes share a nearly straight front
    // joint; the rear angle sets how far the mass hangs over the contact.
    let lunge_zeta = PI - 0.2;
    let tri_alpha = bisect_alpha(lunge_zeta, 33.4, 0.4, 1.4);
    let quad_alpha = bisect_alpha(lunge_zeta, 39.5, 0.4, 1.4);
    println!("  hexagon       alpha = {hex_alpha:.12} rad (zeta {hex_zeta:.12})");
    println!("  triangle      alpha = {tri_alpha:.12} rad (zeta {lunge_zeta:.12})");
    println!("  quadrilateral alpha = {quad_alpha:.12} rad (zeta {lunge_zeta:.12})");

    println!("assembling cycles");
    let hexagon = assemble(
        "hexagon",
        parallelogon_angles(hex_alpha, hex_zeta),
        vec![2.0 * FRAC_PI_3; 6],
    );
    let quadrilateral = assemble(
        "quadrilateral",
        parallelogon_angles(quad_alpha, lunge_zeta),
        parallelogon_angles(FRAC_PI_2, PI),
    );
    let triangle = assemble(
        "triangle",
        parallelogon_angles(tri_alpha, lunge_zeta),
        rounded_triangle_angles(0.1),
    );

    println!("verifying");
    for gait in [&hexagon, &quadrilateral, &triangle] {
        assert_single_contact(gait);
        report(gait);
    }

    for gait in [&hexagon, &quadrilateral, &triangle] {
        let path = out_dir.join(format!("{}.json", gait.name));
        let mut text = gait.to_json();
        text.push('\n');
        std::fs::write(&path, text).expect("write gait file");
        println!("wrote {}", path.display());
    }
}
