//! Motion-capture style analysis of joint trajectory logs.
//!
//! Consumes uniformly sampled joint time series (from the simulator or any
//! compatible capture), reconstructs the body-center path, segments it into
//! stride windows, measures the body pitch at each support switch, and
//! aggregates per-trial locomotion statistics with the same stopping rules
//! the trial driver uses.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec2;

/// A step shorter than this is treated as failing / no progress.
pub const STEP_SUCCESS_THRESHOLD_M: f64 = 0.02;

/// A trial that stops before traversing this distance counts as a failure.
pub const TRIAL_FAILURE_DISTANCE_M: f64 = 0.20;

/// Minimum spacing between two reported support-switch events.
pub const SWITCH_DEBOUNCE_S: f64 = 0.1;

/// A segment must undercut the incumbent by this much before the tracked
/// lowest-segment identity changes. Poses passing through shapes with two
/// ground-level segments (straightened joints) tie at rounding-noise level;
/// a nanometer of hysteresis ignores those without masking real transfers.
pub const SWITCH_HYSTERESIS_M: f64 = 1e-9;

/// Exact header of the 6-joint trajectory CSV schema.
pub const TRAJECTORY_HEADER: &str = "t_s,j1x,j1z,j2x,j2z,j3x,j3z,j4x,j4z,j5x,j5z,j6x,j6z";

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("trajectory schema violation: {0}")]
    SchemaError(String),
    #[error("non-uniform sampling at row {index}: interval {actual_s} s, expected {expected_s} s")]
    NonUniformSampling {
        index: usize,
        expected_s: f64,
        actual_s: f64,
    },
    #[error("trajectory too short: {samples} samples, need at least {needed}")]
    TooShort { samples: usize, needed: usize },
    #[error("switch time {0} s falls outside the recorded trajectory")]
    OutOfRange(f64),
    #[error("no step records to summarize")]
    EmptyRecords,
    #[error("failed to read trajectory: {0}")]
    Io(String),
}

/// Uniformly sampled 6-joint planar trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub sample_rate_hz: f64,
    pub times_s: Vec<f64>,
    pub joints: Vec<[Vec2; 6]>,
}

impl Trajectory {
    /// Validate and wrap a sampled series: at least two samples, and sample
    /// intervals uniform to within a microsecond.
    pub fn from_samples(times_s: Vec<f64>, joints: Vec<[Vec2; 6]>) -> Result<Self, AnalysisError> {
        if times_s.len() != joints.len() {
            return Err(AnalysisError::SchemaError(format!(
                "{} timestamps but {} joint rows",
                times_s.len(),
                joints.len()
            )));
        }
        if times_s.len() < 2 {
            return Err(AnalysisError::TooShort {
                samples: times_s.len(),
                needed: 2,
            });
        }
        let dt = times_s[1] - times_s[0];
        if dt <= 0.0 {
            return Err(AnalysisError::NonUniformSampling {
                index: 1,
                expected_s: dt,
                actual_s: dt,
            });
        }
        for i in 2..times_s.len() {
            let actual = times_s[i] - times_s[i - 1];
            if (actual - dt).abs() > 1e-6 {
                return Err(AnalysisError::NonUniformSampling {
                    index: i,
                    expected_s: dt,
                    actual_s: actual,
                });
            }
        }
        Ok(Trajectory {
            sample_rate_hz: 1.0 / dt,
            times_s,
            joints,
        })
    }

    pub fn len(&self) -> usize {
        self.times_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_s.is_empty()
    }

    fn sample_index(&self, time_s: f64) -> Result<usize, AnalysisError> {
        let raw = time_s * self.sample_rate_hz;
        let index = raw.round();
        if index < 0.0 || index as usize >= self.len() {
            return Err(AnalysisError::OutOfRange(time_s));
        }
        Ok(index as usize)
    }
}

/// Parse the fixed 13-column CSV schema.
pub fn parse_trajectory(text: &str) -> Result<Trajectory, AnalysisError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| AnalysisError::SchemaError("empty file".into()))?;
    if header.trim_end() != TRAJECTORY_HEADER {
        return Err(AnalysisError::SchemaError(format!(
            "unexpected header {header:?}"
        )));
    }
    let mut times_s = Vec::new();
    let mut joints = Vec::new();
    for (row, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(AnalysisError::SchemaError(format!(
                "row {}: expected 13 fields, found {}",
                row + 2,
                fields.len()
            )));
        }
        let mut values = [0.0f64; 13];
        for (i, field) in fields.iter().enumerate() {
            values[i] = field.parse().map_err(|_| {
                AnalysisError::SchemaError(format!(
                    "row {}: field {} is not a number: {field:?}",
                    row + 2,
                    i + 1
                ))
            })?;
        }
        times_s.push(values[0]);
        let mut row_joints = [Vec2::default(); 6];
        for (j, slot) in row_joints.iter_mut().enumerate() {
            *slot = Vec2::new(values[1 + 2 * j], values[2 + 2 * j]);
        }
        joints.push(row_joints);
    }
    Trajectory::from_samples(times_s, joints)
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory, AnalysisError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AnalysisError::Io(format!("{}: {e}", path.display())))?;
    parse_trajectory(&text)
}

/// Body center (joint mean) at every sample.
pub fn com_series(traj: &Trajectory) -> Vec<Vec2> {
    traj.joints
        .iter()
        .map(|row| {
            let sum = row.iter().fold(Vec2::default(), |acc, &v| acc.add(v));
            sum.scale(1.0 / row.len() as f64)
        })
        .collect()
}

/// Index of the segment with the lowest mean joint height.
fn lowest_segment(row: &[Vec2; 6]) -> usize {
    (0..6)
        .min_by(|&a, &b| {
            let za = row[a].z + row[(a + 1) % 6].z;
            let zb = row[b].z + row[(b + 1) % 6].z;
            za.total_cmp(&zb)
        })
        .expect("six segments")
}

/// Angle of a segment from horizontal, degrees; positive when the
/// larger-x joint is higher.
fn segment_pitch_deg(row: &[Vec2; 6], segment: usize) -> f64 {
    let a = row[segment];
    let b = row[(segment + 1) % 6];
    let (rear, front) = if a.x <= b.x { (a, b) } else { (b, a) };
    (front.z - rear.z).atan2(front.x - rear.x).to_degrees()
}

/// Pitch of the lowest segment at each queried switch time.
pub fn pitch_at_switch(traj: &Trajectory, times_s: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    times_s
        .iter()
        .map(|&t| {
            let index = traj.sample_index(t)?;
            let row = &traj.joints[index];
            Ok(segment_pitch_deg(row, lowest_segment(row)))
        })
        .collect()
}

fn segment_mean_z(row: &[Vec2; 6], segment: usize) -> f64 {
    (row[segment].z + row[(segment + 1) % 6].z) / 2.0
}

/// Times at which the lowest-segment identity changes, debounced so one
/// physical transfer is not reported as a burst of events.
pub fn detect_switch_events(traj: &Trajectory) -> Vec<f64> {
    let mut events = Vec::new();
    if traj.is_empty() {
        return events;
    }
    let mut previous = lowest_segment(&traj.joints[0]);
    let mut last_event = f64::NEG_INFINITY;
    for i in 1..traj.len() {
        let row = &traj.joints[i];
        let current = lowest_segment(row);
        if current != previous
            && segment_mean_z(row, current) < segment_mean_z(row, previous) - SWITCH_HYSTERESIS_M
        {
            if traj.times_s[i] - last_event >= SWITCH_DEBOUNCE_S {
                events.push(traj.times_s[i]);
                last_event = traj.times_s[i];
            }
            previous = current;
        }
    }
    events
}

/// One stride window as recovered from a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisStep {
    pub step: usize,
    pub step_length_m: f64,
    pub pitch_deg: f64,
    pub success: bool,
}

/// Cut the trajectory into windows of one commanded stride period and
/// measure each window's displacement and end-of-window pitch.
pub fn segment_steps(
    traj: &Trajectory,
    stride_period_s: f64,
) -> Result<Vec<AnalysisStep>, AnalysisError> {
    let spp = (stride_period_s * traj.sample_rate_hz).round() as usize;
    if spp == 0 {
        return Err(AnalysisError::SchemaError(format!(
            "stride period {stride_period_s} s is below the sampling interval"
        )));
    }
    if traj.len() < spp + 1 {
        return Err(AnalysisError::TooShort {
            samples: traj.len(),
            needed: spp + 1,
        });
    }
    let com = com_series(traj);
    let steps = (traj.len() - 1) / spp;
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let start = k * spp;
        let end = (k + 1) * spp;
        let length = com[end].x - com[start].x;
        let row = &traj.joints[end];
        let pitch = segment_pitch_deg(row, lowest_segment(row));
        out.push(AnalysisStep {
            step: k,
            step_length_m: length,
            pitch_deg: pitch,
            success: length >= STEP_SUCCESS_THRESHOLD_M,
        });
    }
    Ok(out)
}

pub fn steps_to_csv(steps: &[AnalysisStep]) -> String {
    use std::fmt::Write;
    let mut out = String::from("step,step_length_m,pitch_deg,success\n");
    for s in steps {
        writeln!(
            out,
            "{},{},{},{}",
            s.step, s.step_length_m, s.pitch_deg, s.success
        )
        .unwrap();
    }
    out
}

/// Why a trial (or its record stream) ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCause {
    CourseComplete,
    Stuck,
    RecordsEnd,
}

impl fmt::Display for StopCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopCause::CourseComplete => write!(f, "course_complete"),
            StopCause::Stuck => write!(f, "stuck"),
            StopCause::RecordsEnd => write!(f, "records_end"),
        }
    }
}

/// Aggregated locomotion statistics of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    /// Mean of per-step speeds over pre-stop steps, m/s.
    pub mean_speed_m_s: f64,
    /// Population standard deviation of those speeds, m/s.
    pub std_speed_m_s: f64,
    /// Total displacement up to the stopping point, m.
    pub distance_m: f64,
    pub failure: bool,
    /// Steps contributing to the speed statistics (the terminal stuck run,
    /// when present, is excluded).
    pub pre_stop_steps: usize,
    pub stop: StopCause,
}

/// Summary artifact schema (centimeter units at the reporting surface).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryJson {
    pub mean_speed_cm_s: f64,
    pub std_cm_s: f64,
    pub failure: bool,
    pub distance_cm: f64,
}

impl TrialStats {
    pub fn to_summary_json(&self) -> SummaryJson {
        SummaryJson {
            mean_speed_cm_s: self.mean_speed_m_s * 100.0,
            std_cm_s: self.std_speed_m_s * 100.0,
            failure: self.failure,
            distance_cm: self.distance_m * 100.0,
        }
    }
}

/// Apply the stopping rules to a stream of per-step displacements and
/// aggregate speed statistics over the pre-stop steps.
///
/// Stopping scan, in order per step: course complete once cumulative
/// displacement reaches `course_m`; stuck once two consecutive steps fall
/// below the success threshold. Steps after the stopping point are ignored.
pub fn summarize_lengths(
    lengths_m: &[f64],
    stride_period_s: f64,
    course_m: f64,
) -> Result<TrialStats, AnalysisError> {
    if lengths_m.is_empty() {
        return Err(AnalysisError::EmptyRecords);
    }
    let mut considered = lengths_m.len();
    let mut stop = StopCause::RecordsEnd;
    let mut cumulative = 0.0;
    for (i, &length) in lengths_m.iter().enumerate() {
        cumulative += length;
        if cumulative >= course_m {
            considered = i + 1;
            stop = StopCause::CourseComplete;
            break;
        }
        if i >= 1
            && length < STEP_SUCCESS_THRESHOLD_M
            && lengths_m[i - 1] < STEP_SUCCESS_THRESHOLD_M
        {
            considered = i + 1;
            stop = StopCause::Stuck;
            break;
        }
    }
    let mut pre_stop = considered;
    if stop == StopCause::Stuck {
        while pre_stop > 0 && lengths_m[pre_stop - 1] < STEP_SUCCESS_THRESHOLD_M {
            pre_stop -= 1;
        }
    }
    let distance_m: f64 = lengths_m[..considered].iter().sum();
    let speeds: Vec<f64> = lengths_m[..pre_stop]
        .iter()
        .map(|l| l / stride_period_s)
        .collect();
    let mean = if speeds.is_empty() {
        0.0
    } else {
        speeds.iter().sum::<f64>() / speeds.len() as f64
    };
    let variance = if speeds.is_empty() {
        0.0
    } else {
        speeds.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / speeds.len() as f64
    };
    Ok(TrialStats {
        mean_speed_m_s: mean,
        std_speed_m_s: variance.sqrt(),
        distance_m,
        failure: distance_m < TRIAL_FAILURE_DISTANCE_M,
        pre_stop_steps: pre_stop,
        stop,
    })
}

/// Summarize recovered stride windows against a course length.
pub fn summarize(
    steps: &[AnalysisStep],
    stride_period_s: f64,
    course_m: f64,
) -> Result<TrialStats, AnalysisError> {
    let lengths: Vec<f64> = steps.iter().map(|s| s.step_length_m).collect();
    summarize_lengths(&lengths, stride_period_s, course_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChainShape;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Regular hexagon resting on its first segment, translated by `dx`
    /// and tilted by `tilt_deg` about its center.
    fn hexagon_row(dx: f64, tilt_deg: f64) -> [Vec2; 6] {
        let angles = vec![2.0 * PI / 3.0; 6];
        let shape = ChainShape::from_interior_angles(6, 0.056, &angles)
            .unwrap()
            .posed_on_support(0)
            .unwrap();
        let com = shape.com();
        let tilt = tilt_deg.to_radians();
        let mut row = [Vec2::default(); 6];
        for (j, &v) in shape.vertices.iter().enumerate() {
            let tilted = com.add(v.sub(com).rotate(tilt));
            row[j] = Vec2::new(tilted.x + dx, tilted.z);
        }
        row
    }

    fn uniform_times(n: usize, rate_hz: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 / rate_hz).collect()
    }

    #[test]
    fn test_steady_drift_segments_into_equal_steps() {
        let rate = 120.0;
        let n = 3 * 360 + 1;
        let times = uniform_times(n, rate);
        let joints: Vec<[Vec2; 6]> = times.iter().map(|&t| hexagon_row(0.03 * t, 0.0)).collect();
        let traj = Trajectory::from_samples(times, joints).unwrap();
        let steps = segment_steps(&traj, 3.0).unwrap();
        assert_eq!(steps.len(), 3);
        for s in &steps {
            assert!((s.step_length_m - 0.09).abs() < 1e-9, "{s:?}");
            assert!(s.success);
            assert!(s.pitch_deg.abs() < 1e-9);
        }
    }

    #[test]
    fn test_zero_net_oscillation_yields_failing_steps() {
        let rate = 120.0;
        let n = 2 * 360 + 1;
        let times = uniform_times(n, rate);
        let joints: Vec<[Vec2; 6]> = times
            .iter()
            .map(|&t| hexagon_row(0.005 * (2.0 * PI * t / 3.0).sin(), 0.0))
            .collect();
        let traj = Trajectory::from_samples(times, joints).unwrap();
        let steps = segment_steps(&traj, 3.0).unwrap();
        assert_eq!(steps.len(), 2);
        for s in &steps {
            assert!(s.step_length_m.abs() < 1e-9);
            assert!(!s.success);
        }
    }

    #[test]
    fn test_pitch_at_switch_recovers_tilt_with_sign() {
        let rate = 120.0;
        let times = uniform_times(121, rate);
        let joints: Vec<[Vec2; 6]> = times.iter().map(|_| hexagon_row(0.0, 10.0)).collect();
        let traj = Trajectory::from_samples(times.clone(), joints).unwrap();
        let pitches = pitch_at_switch(&traj, &[0.0, 0.5, 1.0]).unwrap();
        for p in pitches {
            assert!((p - 10.0).abs() < 1e-9, "got {p}");
        }

        let joints: Vec<[Vec2; 6]> = times.iter().map(|_| hexagon_row(0.0, -10.0)).collect();
        let traj = Trajectory::from_samples(times, joints).unwrap();
        let pitches = pitch_at_switch(&traj, &[0.25]).unwrap();
        assert!((pitches[0] + 10.0).abs() < 1e-9, "got {}", pitches[0]);

        assert_eq!(
            pitch_at_switch(&traj, &[5.0]),
            Err(AnalysisError::OutOfRange(5.0))
        );
    }

    #[test]
    fn test_switch_events_are_debounced() {
        let rate = 120.0;
        let n = 121;
        let times = uniform_times(n, rate);
        let base = hexagon_row(0.0, 0.0);
        let mut shifted = base;
        shifted.rotate_right(1);
        let joints: Vec<[Vec2; 6]> = (0..n)
            .map(|i| {
                if i < 12 && i % 2 == 1 {
                    shifted
                } else if i >= 60 {
                    shifted
                } else {
                    base
                }
            })
            .collect();
        let traj = Trajectory::from_samples(times, joints).unwrap();
        let events = detect_switch_events(&traj);
        assert_eq!(events.len(), 2, "flicker burst plus one real change: {events:?}");
        assert!((events[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn test_csv_round_trip_is_exact() {
        let rate = 120.0;
        let n = 25;
        let times = uniform_times(n, rate);
        let joints: Vec<[Vec2; 6]> = times
            .iter()
            .map(|&t| hexagon_row(0.031 * t + 1e-7, 3.21))
            .collect();
        let traj = Trajectory::from_samples(times, joints).unwrap();
        let mut csv = String::from(TRAJECTORY_HEADER);
        csv.push('\n');
        for (t, row) in traj.times_s.iter().zip(&traj.joints) {
            use std::fmt::Write;
            write!(csv, "{t}").unwrap();
            for v in row {
                write!(csv, ",{},{}", v.x, v.z).unwrap();
            }
            csv.push('\n');
        }
        let parsed = parse_trajectory(&csv).unwrap();
        assert_eq!(parsed, traj, "shortest-round-trip floats must survive CSV");
    }

    #[test]
    fn test_schema_violations_are_rejected() {
        assert!(matches!(
            parse_trajectory(""),
            Err(AnalysisError::SchemaError(_))
        ));
        assert!(matches!(
            parse_trajectory("time,stuff\n1,2\n"),
            Err(AnalysisError::SchemaError(_))
        ));
        let short_row = format!("{TRAJECTORY_HEADER}\n0.0,1,2,3\n");
        assert!(matches!(
            parse_trajectory(&short_row),
            Err(AnalysisError::SchemaError(_))
        ));
        let bad_float = format!(
            "{TRAJECTORY_HEADER}\n0.0,a,0,0,0,0,0,0,0,0,0,0,0\n0.1,0,0,0,0,0,0,0,0,0,0,0,0\n"
        );
        assert!(matches!(
            parse_trajectory(&bad_float),
            Err(AnalysisError::SchemaError(_))
        ));
        let only_header = format!("{TRAJECTORY_HEADER}\n");
        assert!(matches!(
            parse_trajectory(&only_header),
            Err(AnalysisError::TooShort { .. })
        ));
    }

    #[test]
    fn test_non_uniform_sampling_is_rejected() {
        let mut times = uniform_times(10, 120.0);
        times[7] += 0.003;
        let joints: Vec<[Vec2; 6]> = (0..10).map(|_| hexagon_row(0.0, 0.0)).collect();
        assert!(matches!(
            Trajectory::from_samples(times, joints),
            Err(AnalysisError::NonUniformSampling { .. })
        ));
    }

    #[test]
    fn test_summarize_single_step() {
        let stats = summarize_lengths(&[0.09], 3.0, 1.0).unwrap();
        assert!((stats.mean_speed_m_s - 0.03).abs() < 1e-12);
        assert_eq!(stats.std_speed_m_s, 0.0);
        assert_eq!(stats.pre_stop_steps, 1);
        assert_eq!(stats.stop, StopCause::RecordsEnd);
        assert!(stats.failure, "0.09 m is short of the failure distance");
    }

    #[test]
    fn test_summarize_stuck_excludes_terminal_run() {
        let stats = summarize_lengths(&[0.15, 0.01, 0.005], 3.0, 1.0).unwrap();
        assert_eq!(stats.stop, StopCause::Stuck);
        assert_eq!(stats.pre_stop_steps, 1);
        assert!((stats.mean_speed_m_s - 0.05).abs() < 1e-12);
        assert_eq!(stats.std_speed_m_s, 0.0);
        assert!((stats.distance_m - 0.165).abs() < 1e-12);
        assert!(stats.failure);
    }

    #[test]
    fn test_summarize_course_completion() {
        let stats = summarize_lengths(&[0.3, 0.3, 0.3, 0.3, 0.3], 3.0, 1.0).unwrap();
        assert_eq!(stats.stop, StopCause::CourseComplete);
        assert_eq!(stats.pre_stop_steps, 4, "steps after completion are ignored");
        assert!((stats.distance_m - 1.2).abs() < 1e-12);
        assert!(!stats.failure);
        assert!((stats.mean_speed_m_s - 0.1).abs() < 1e-12);
    }

    #[test]
    fn test_summarize_rejects_empty_records() {
        assert_eq!(
            summarize_lengths(&[], 3.0, 1.0),
            Err(AnalysisError::EmptyRecords)
        );
    }

    #[test]
    fn test_summary_json_units() {
        let stats = summarize_lengths(&[0.09], 3.0, 1.0).unwrap();
        let json = stats.to_summary_json();
        assert!((json.mean_speed_cm_s - 3.0).abs() < 1e-9);
        assert!((json.distance_cm - 9.0).abs() < 1e-9);
        assert!(json.failure);
        let text = serde_json::to_string(&json).unwrap();
        let back: SummaryJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
    }

    proptest! {
        #[test]
        fn prop_mean_speed_times_time_equals_displacement(
            lengths in proptest::collection::vec(0.0f64..0.1, 1..40),
            period in 0.5f64..5.0,
        ) {
            let stats = summarize_lengths(&lengths, period, 10.0).unwrap();
            let pre: f64 = lengths[..stats.pre_stop_steps].iter().sum();
            let reconstructed = stats.mean_speed_m_s * (stats.pre_stop_steps as f64 * period);
            prop_assert!((reconstructed - pre).abs() < 1e-9);
        }

        #[test]
        fn prop_success_labels_match_threshold(
            lengths in proptest::collection::vec(0.0f64..0.1, 2..30),
        ) {
            let rate = 120.0;
            let spp = 360;
            let mut times = Vec::new();
            let mut joints = Vec::new();
            let mut x = 0.0;
            let mut pushed = 0usize;
            for &len in &lengths {
                for s in 0..spp {
                    times.push(pushed as f64 / rate);
                    joints.push(hexagon_row(x + len * (s as f64 / spp as f64), 0.0));
                    pushed += 1;
                }
                x += len;
            }
            times.push(pushed as f64 / rate);
            joints.push(hexagon_row(x, 0.0));
            let traj = Trajectory::from_samples(times, joints).unwrap();
            let steps = segment_steps(&traj, 3.0).unwrap();
            prop_assert_eq!(steps.len(), lengths.len());
            for (s, &len) in steps.iter().zip(&lengths) {
                prop_assert!((s.step_length_m - len).abs() < 1e-9);
                prop_assert_eq!(s.success, s.step_length_m >= STEP_SUCCESS_THRESHOLD_M);
            }
        }
    }
}
