//! Quasi-static stride-by-stride rolling simulation on deformable ground.
//!
//! Each stride attempts one support transfer. The incoming segment's leading
//! end probes the terrain ahead; its sinkage tilts the body like a local
//! slope, and the stability model decides whether the transfer succeeds.
//! A rejected transfer ("oscillation in place") deepens the ground under the
//! current contacts, so repeated failure is self-reinforcing.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{self, AnalysisError, TrialStats};
use crate::gait::{Gait, GaitError};
use crate::geometry::{ChainShape, GeometryError, Vec2, DEFAULT_SEGMENT_LENGTH};
use crate::stability::{
    critical_pitch, roll_outcome, CriticalPitch, RollDirection, StabilityError,
};

/// Samples per second in emitted trajectory logs.
pub const CAPTURE_RATE_HZ: f64 = 120.0;

/// Consecutive rejected transfers after which a trial stops as stuck.
pub const STUCK_STRIDE_LIMIT: usize = 2;

#[derive(Debug, Error)]
pub enum SubstrateError {
    #[error("contact area must be positive, got {0} m^2")]
    NonPositiveArea(f64),
    #[error("load must be non-negative, got {0} N")]
    NegativeLoad(f64),
    #[error("bearing stiffness must be positive for deformable ground, got {0} N/m^3")]
    NonPositiveStiffness(f64),
    #[error("shear slip must lie in [0, 1], got {0}")]
    InvalidSlip(f64),
    #[error("adaptation factor must be at least 1, got {0}")]
    InvalidAdaptation(f64),
    #[error("feedback gain must be non-negative, got {0}")]
    NegativeGain(f64),
    #[error("terrain noise amplitude must be non-negative, got {0} m")]
    NegativeNoise(f64),
    #[error("terrain cell size must be positive, got {0} m")]
    NonPositiveCellSize(f64),
    #[error("at least one stride is required, got max_strides 0")]
    NoStrides,
    #[error("course length must be positive, got {0} m")]
    NonPositiveCourse(f64),
    #[error("sinkage depth must be non-negative, got {0} m")]
    NegativeDepth(f64),
    #[error("sinkage {depth_m} m reaches the segment length {limit_m} m; substrate parameters are out of the model's range")]
    ExcessiveSinkage { depth_m: f64, limit_m: f64 },
    #[error("trajectory schema requires 6 joints, gait has {0}")]
    UnsupportedJointCount(usize),
    #[error("the simulator models exactly one support transfer per stride, gait has {0} switching phases")]
    UnsupportedSwitchingCount(usize),
    #[error("gait {0} cannot tip forward even on level ground")]
    NonRollingGait(String),
    #[error("malformed scenario config: {0}")]
    MalformedConfig(String),
    #[error(transparent)]
    Gait(#[from] GaitError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Ground mechanical parameters and interaction constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstrateParams {
    /// Zero sinkage everywhere when set; stiffness is then ignored.
    pub rigid: bool,
    /// Bearing pressure per unit sinkage depth, N/m^3.
    pub bearing_stiffness_n_m3: f64,
    /// Fraction of the kinematic step lost to stance slip, in [0, 1].
    pub shear_slip: f64,
    /// Per-reload sinkage amplification of previously loaded ground.
    pub feedback_gain: f64,
    /// Effective-area multiplier of a ground-adapted body (>= 1).
    pub adaptation_factor: f64,
    /// Total robot weight carried by the probing contact, N.
    pub load_n: f64,
    /// Nominal contact patch of one segment face, m^2.
    pub contact_area_m2: f64,
    /// Amplitude of the seeded initial terrain depth noise, m.
    pub terrain_noise_m: f64,
    /// Width of one terrain cell along the travel axis, m.
    ///
    /// Kept below the segment length so a landing site never shares a cell
    /// with the current front contact, and above the per-stride advance so
    /// consecutive landings revisit cells.
    pub cell_size_m: f64,
}

impl SubstrateParams {
    pub fn validate(&self) -> Result<(), SubstrateError> {
        if !self.rigid && self.bearing_stiffness_n_m3 <= 0.0 {
            return Err(SubstrateError::NonPositiveStiffness(
                self.bearing_stiffness_n_m3,
            ));
        }
        if !(0.0..=1.0).contains(&self.shear_slip) {
            return Err(SubstrateError::InvalidSlip(self.shear_slip));
        }
        if self.feedback_gain < 0.0 {
            return Err(SubstrateError::NegativeGain(self.feedback_gain));
        }
        if self.adaptation_factor < 1.0 {
            return Err(SubstrateError::InvalidAdaptation(self.adaptation_factor));
        }
        if self.load_n < 0.0 {
            return Err(SubstrateError::NegativeLoad(self.load_n));
        }
        if self.contact_area_m2 <= 0.0 {
            return Err(SubstrateError::NonPositiveArea(self.contact_area_m2));
        }
        if self.terrain_noise_m < 0.0 {
            return Err(SubstrateError::NegativeNoise(self.terrain_noise_m));
        }
        if self.cell_size_m <= 0.0 {
            return Err(SubstrateError::NonPositiveCellSize(self.cell_size_m));
        }
        Ok(())
    }
}

/// One trial scenario: substrate, course, and batch size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub substrate: SubstrateParams,
    pub course_length_m: f64,
    pub max_strides: usize,
    pub seeds: usize,
    /// Optional gait file overriding the CLI shape selection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gait_file: Option<String>,
    /// Free-form provenance of the numbers above.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), SubstrateError> {
        self.substrate.validate()?;
        if self.max_strides == 0 {
            return Err(SubstrateError::NoStrides);
        }
        if self.course_length_m <= 0.0 {
            return Err(SubstrateError::NonPositiveCourse(self.course_length_m));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SubstrateError> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| SubstrateError::MalformedConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Shipped scenario presets: "rigid", "sand", "sand_adapted".
    pub fn builtin(name: &str) -> Result<Self, SubstrateError> {
        let text = match name {
            "rigid" => include_str!("../configs/rigid.json"),
            "sand" => include_str!("../configs/sand.json"),
            "sand_adapted" => include_str!("../configs/sand_adapted.json"),
            other => {
                return Err(SubstrateError::MalformedConfig(format!(
                    "no built-in scenario named {other}"
                )))
            }
        };
        RunConfig::from_json(text)
    }
}

/// State of one terrain cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainCell {
    /// Static initial deformation depth from seeded surface noise, m.
    pub depth_m: f64,
    /// How many completed loads this cell has carried.
    pub load_count: u32,
}

/// 1-D deformation field along the travel axis, discretized into cells.
#[derive(Debug, Clone)]
pub struct TerrainField {
    cell_size_m: f64,
    noise_amplitude_m: f64,
    seed: u64,
    cells: HashMap<i64, TerrainCell>,
}

impl TerrainField {
    pub fn new(cell_size_m: f64, noise_amplitude_m: f64, seed: u64) -> Self {
        TerrainField {
            cell_size_m,
            noise_amplitude_m,
            seed,
            cells: HashMap::new(),
        }
    }

    pub fn cell_index(&self, x_m: f64) -> i64 {
        (x_m / self.cell_size_m).floor() as i64
    }

    fn initial_depth(&self, index: i64) -> f64 {
        if self.noise_amplitude_m == 0.0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng.gen::<f64>() * self.noise_amplitude_m
    }

    /// Cell state at a position, created from the seeded noise on first use.
    pub fn cell(&mut self, x_m: f64) -> TerrainCell {
        let index = self.cell_index(x_m);
        let depth = self.initial_depth(index);
        *self.cells.entry(index).or_insert(TerrainCell {
            depth_m: depth,
            load_count: 0,
        })
    }

    /// Record one completed load on the cell at a position.
    pub fn record_load(&mut self, x_m: f64) {
        let index = self.cell_index(x_m);
        let depth = self.initial_depth(index);
        self.cells
            .entry(index)
            .or_insert(TerrainCell {
                depth_m: depth,
                load_count: 0,
            })
            .load_count += 1;
    }
}

/// Sinkage of a fresh touchdown on a cell, meters.
///
/// Linear bearing law: depth = pressure / stiffness, with the effective
/// pressure reduced by the adaptation factor and amplified per previous
/// load on the same cell. Rigid ground never sinks.
pub fn touchdown_sinkage(
    load_n: f64,
    contact_area_m2: f64,
    params: &SubstrateParams,
    cell: &TerrainCell,
) -> Result<f64, SubstrateError> {
    if contact_area_m2 <= 0.0 {
        return Err(SubstrateError::NonPositiveArea(contact_area_m2));
    }
    if load_n < 0.0 {
        return Err(SubstrateError::NegativeLoad(load_n));
    }
    if params.rigid {
        return Ok(0.0);
    }
    if params.bearing_stiffness_n_m3 <= 0.0 {
        return Err(SubstrateError::NonPositiveStiffness(
            params.bearing_stiffness_n_m3,
        ));
    }
    let pressure = load_n / (contact_area_m2 * params.adaptation_factor);
    let depth = pressure / params.bearing_stiffness_n_m3
        * (1.0 + params.feedback_gain * f64::from(cell.load_count));
    Ok(depth)
}

/// Virtual slope of a segment whose leading end sank by `depth_m`, degrees.
pub fn induced_pitch(depth_m: f64, segment_length_m: f64) -> Result<f64, SubstrateError> {
    if depth_m < 0.0 {
        return Err(SubstrateError::NegativeDepth(depth_m));
    }
    if depth_m >= segment_length_m {
        return Err(SubstrateError::ExcessiveSinkage {
            depth_m,
            limit_m: segment_length_m,
        });
    }
    Ok((depth_m / segment_length_m).asin().to_degrees())
}

/// Gait-derived quantities reused across strides.
#[derive(Debug, Clone)]
pub struct GaitContext {
    pub gait: Gait,
    /// The chain realized at the switching phase, support-relative.
    pub switching_shape: ChainShape,
    pub frame: crate::geometry::SupportFrame,
    /// Critical pitch of the switching configuration, degrees.
    pub beta_m_deg: f64,
    /// Ground advance per successful transfer on rigid flat ground, m.
    pub kinematic_step_m: f64,
    pub segment_length_m: f64,
    pub samples_per_stride: usize,
}

impl GaitContext {
    pub fn new(gait: &Gait, segment_length_m: f64) -> Result<Self, SubstrateError> {
        gait.validate()?;
        if gait.joint_count() != 6 {
            return Err(SubstrateError::UnsupportedJointCount(gait.joint_count()));
        }
        let configs = gait.switching_configs(segment_length_m)?;
        if configs.len() != 1 {
            return Err(SubstrateError::UnsupportedSwitchingCount(configs.len()));
        }
        let config = configs.into_iter().next().unwrap();
        let frame = config.shape.support_frame(config.support_index)?;
        let beta_m_deg = match critical_pitch(&frame)? {
            CriticalPitch::Limit(deg) => deg,
            CriticalPitch::NonRolling => {
                return Err(SubstrateError::NonRollingGait(gait.name.clone()))
            }
        };
        let kinematic_step_m = gait.geometric_step_length(segment_length_m)?;
        let samples_per_stride = (CAPTURE_RATE_HZ * gait.stride_period_s).round().max(1.0) as usize;
        Ok(GaitContext {
            gait: gait.clone(),
            switching_shape: config.shape,
            frame,
            beta_m_deg,
            kinematic_step_m,
            segment_length_m,
            samples_per_stride,
        })
    }
}

/// Mutable state of one trial.
#[derive(Debug, Clone)]
pub struct SimState {
    /// World x of the rear support contact, m. Always advances * step.
    pub rear_x_m: f64,
    /// Pitch recorded at the latest transfer attempt, degrees.
    pub pitch_deg: f64,
    /// Completed support transfers so far.
    pub advances: usize,
    /// Consecutive rejected transfers.
    pub stuck_cycles: usize,
    pub step_index: usize,
    pub terrain: TerrainField,
}

impl SimState {
    pub fn new(seed: u64, params: &SubstrateParams) -> Self {
        SimState {
            rear_x_m: 0.0,
            pitch_deg: 0.0,
            advances: 0,
            stuck_cycles: 0,
            step_index: 0,
            terrain: TerrainField::new(params.cell_size_m, params.terrain_noise_m, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Advance,
    Oscillate,
}

impl std::fmt::Display for StepOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepOutcome::Advance => write!(f, "advance"),
            StepOutcome::Oscillate => write!(f, "oscillate"),
        }
    }
}

/// One stride's outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub step_length_m: f64,
    /// Pitch passed to the stability gate at the transfer attempt, degrees.
    pub pitch_deg: f64,
    pub outcome: StepOutcome,
    /// World CoM x after the stride, m.
    pub com_x_m: f64,
}

/// Attempt one support transfer.
///
/// The landing probe sits one segment ahead of the current front contact.
/// A rejected transfer deposits one extra load on each of the two current
/// contact cells, deepening the ground the body keeps rocking on.
pub fn step(
    state: &mut SimState,
    ctx: &GaitContext,
    params: &SubstrateParams,
) -> Result<StepRecord, SubstrateError> {
    let landing_x = state.rear_x_m + 2.0 * ctx.segment_length_m;
    let cell = state.terrain.cell(landing_x);
    let sinkage = touchdown_sinkage(params.load_n, params.contact_area_m2, params, &cell)?;
    let effective_depth = cell.depth_m + sinkage;
    let pitch_deg = induced_pitch(effective_depth, ctx.segment_length_m)?;

    let advance_m = ctx.kinematic_step_m * (1.0 - params.shear_slip);
    let outcome = if roll_outcome(&ctx.frame, pitch_deg).direction == RollDirection::Forward {
        state.advances += 1;
        state.stuck_cycles = 0;
        state.terrain.record_load(landing_x);
        // Multiplying keeps displacement exactly advances * step.
        state.rear_x_m = state.advances as f64 * advance_m;
        StepOutcome::Advance
    } else {
        state.stuck_cycles += 1;
        state.terrain.record_load(state.rear_x_m);
        state.terrain.record_load(state.rear_x_m + ctx.segment_length_m);
        StepOutcome::Oscillate
    };
    state.pitch_deg = pitch_deg;

    let record = StepRecord {
        step: state.step_index,
        step_length_m: match outcome {
            StepOutcome::Advance => advance_m,
            StepOutcome::Oscillate => 0.0,
        },
        pitch_deg,
        outcome,
        com_x_m: state.rear_x_m + ctx.frame.com.x,
    };
    state.step_index += 1;
    Ok(record)
}

/// Pose snapshot shared by all samples of one stride window.
#[derive(Debug, Clone, Copy)]
struct WindowState {
    rear_x_m: f64,
    pitch_deg: f64,
    advances: usize,
}

/// Joint time series of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub times_s: Vec<f64>,
    pub joints: Vec<[Vec2; 6]>,
}

impl TrajectoryLog {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out =
            String::from("t_s,j1x,j1z,j2x,j2z,j3x,j3z,j4x,j4z,j5x,j5z,j6x,j6z\n");
        for (t, row) in self.times_s.iter().zip(&self.joints) {
            write!(out, "{t}").unwrap();
            for v in row {
                write!(out, ",{},{}", v.x, v.z).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// World joints at one sample: chain posed on its support, tilted by the
/// window pitch about the CoM, advanced to the window's rear contact, and
/// with columns relabeled by the completed transfers so joint identity in
/// the log follows the physical body around the loop.
fn pose_joints(
    gait: &Gait,
    phase: f64,
    window: &WindowState,
    segment_length_m: f64,
) -> Result<[Vec2; 6], SubstrateError> {
    let angles = gait.config_at(phase)?;
    let shape = ChainShape::from_interior_angles(angles.len(), segment_length_m, &angles)?;
    let posed = shape.posed_on_support(0)?;
    let com = posed.com();
    let tilt = window.pitch_deg.to_radians();
    let mut out = [Vec2::default(); 6];
    for (j, &v) in posed.vertices.iter().enumerate() {
        let tilted = com.add(v.sub(com).rotate(tilt));
        out[(j + window.advances) % 6] = Vec2::new(tilted.x + window.rear_x_m, tilted.z);
    }
    Ok(out)
}

fn render_trajectory(
    gait: &Gait,
    windows: &[WindowState],
    ctx: &GaitContext,
) -> Result<TrajectoryLog, SubstrateError> {
    let spp = ctx.samples_per_stride;
    let dt = gait.stride_period_s / spp as f64;
    let strides = windows.len() - 1;
    let mut times_s = Vec::with_capacity(strides * spp + 1);
    let mut joints = Vec::with_capacity(strides * spp + 1);
    for (k, window) in windows[..strides].iter().enumerate() {
        for s in 0..spp {
            times_s.push((k * spp + s) as f64 * dt);
            joints.push(pose_joints(gait, s as f64 / spp as f64, window, ctx.segment_length_m)?);
        }
    }
    // Trailing boundary sample: the state right after the final stride.
    let last = windows.last().unwrap();
    times_s.push((strides * spp) as f64 * dt);
    joints.push(pose_joints(gait, 0.0, last, ctx.segment_length_m)?);
    Ok(TrajectoryLog { times_s, joints })
}

/// Everything one trial produces.
#[derive(Debug, Clone)]
pub struct TrialOutput {
    pub steps: Vec<StepRecord>,
    pub trajectory: TrajectoryLog,
    pub summary: TrialStats,
}

pub fn steps_to_csv(records: &[StepRecord]) -> String {
    use std::fmt::Write;
    let mut out = String::from("step,step_length_m,pitch_deg,outcome,com_x_m\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.step, r.step_length_m, r.pitch_deg, r.outcome, r.com_x_m
        )
        .unwrap();
    }
    out
}

/// Run one seeded trial: strides repeat until the course is complete, the
/// body is stuck for two consecutive strides, or the stride budget runs out.
pub fn run(gait: &Gait, config: &RunConfig, seed: u64) -> Result<TrialOutput, SubstrateError> {
    config.validate()?;
    let ctx = GaitContext::new(gait, DEFAULT_SEGMENT_LENGTH)?;
    let mut state = SimState::new(seed, &config.substrate);
    let mut windows = Vec::new();
    let mut records = Vec::new();
    for _ in 0..config.max_strides {
        windows.push(WindowState {
            rear_x_m: state.rear_x_m,
            pitch_deg: state.pitch_deg,
            advances: state.advances,
        });
        let record = step(&mut state, &ctx, &config.substrate)?;
        records.push(record);
        if state.rear_x_m >= config.course_length_m || state.stuck_cycles >= STUCK_STRIDE_LIMIT {
            break;
        }
    }
    windows.push(WindowState {
        rear_x_m: state.rear_x_m,
        pitch_deg: state.pitch_deg,
        advances: state.advances,
    });
    let trajectory = render_trajectory(gait, &windows, &ctx)?;

    let lengths: Vec<f64> = records.iter().map(|r| r.step_length_m).collect();
    let mut summary =
        analysis::summarize_lengths(&lengths, gait.stride_period_s, config.course_length_m)?;
    // The final rear-contact position is the exact displacement; the summed
    // step lengths agree mathematically but not always to the last bit.
    summary.distance_m = state.rear_x_m;
    summary.failure = summary.distance_m < analysis::TRIAL_FAILURE_DISTANCE_M;
    Ok(TrialOutput {
        steps: records,
        trajectory,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::StopCause;
    use proptest::prelude::*;

    fn sand_params() -> SubstrateParams {
        RunConfig::builtin("sand").unwrap().substrate
    }

    fn sand_config() -> RunConfig {
        RunConfig::builtin("sand").unwrap()
    }

    fn untouched() -> TerrainCell {
        TerrainCell {
            depth_m: 0.0,
            load_count: 0,
        }
    }

    #[test]
    fn test_touchdown_sinkage_reference_values() {
        let params = SubstrateParams {
            rigid: false,
            bearing_stiffness_n_m3: 250_000.0,
            shear_slip: 0.0,
            feedback_gain: 0.0,
            adaptation_factor: 1.0,
            load_n: 5.0,
            contact_area_m2: 0.004,
            terrain_noise_m: 0.0,
            cell_size_m: 0.05,
        };
        let depth = touchdown_sinkage(5.0, 0.004, &params, &untouched()).unwrap();
        assert!((depth - 0.005).abs() < 1e-12, "got {depth}");

        let adapted = SubstrateParams {
            adaptation_factor: 2.0,
            ..params.clone()
        };
        let depth = touchdown_sinkage(5.0, 0.004, &adapted, &untouched()).unwrap();
        assert!((depth - 0.0025).abs() < 1e-12, "got {depth}");

        assert_eq!(
            touchdown_sinkage(0.0, 0.004, &params, &untouched()).unwrap(),
            0.0
        );

        let rigid = SubstrateParams {
            rigid: true,
            ..params
        };
        assert_eq!(
            touchdown_sinkage(5.0, 0.004, &rigid, &untouched()).unwrap(),
            0.0
        );
    }

    #[test]
    fn test_touchdown_sinkage_loading_history_multipliers() {
        let params = sand_params();
        let fresh = touchdown_sinkage(params.load_n, params.contact_area_m2, &params, &untouched())
            .unwrap();
        assert!((fresh - 0.010000640).abs() < 1e-8, "fresh {fresh}");
        for count in 1..3u32 {
            let cell = TerrainCell {
                depth_m: 0.0,
                load_count: count,
            };
            let depth =
                touchdown_sinkage(params.load_n, params.contact_area_m2, &params, &cell).unwrap();
            let expected = fresh * (1.0 + params.feedback_gain * f64::from(count));
            assert!((depth - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn test_touchdown_sinkage_domain_errors() {
        let params = sand_params();
        assert!(matches!(
            touchdown_sinkage(5.0, 0.0, &params, &untouched()),
            Err(SubstrateError::NonPositiveArea(_))
        ));
        assert!(matches!(
            touchdown_sinkage(-1.0, 0.004, &params, &untouched()),
            Err(SubstrateError::NegativeLoad(_))
        ));
        let soft = SubstrateParams {
            bearing_stiffness_n_m3: 0.0,
            ..params
        };
        assert!(matches!(
            touchdown_sinkage(5.0, 0.004, &soft, &untouched()),
            Err(SubstrateError::NonPositiveStiffness(_))
        ));
    }

    #[test]
    fn test_induced_pitch_reference_values() {
        assert_eq!(induced_pitch(0.0, 0.056).unwrap(), 0.0);
        let hex_limit = induced_pitch(0.01317, 0.056).unwrap();
        assert!((hex_limit - 13.60).abs() < 5e-3, "got {hex_limit}");
        let thirty = induced_pitch(0.028, 0.056).unwrap();
        assert!((thirty - 30.0).abs() < 1e-9, "got {thirty}");
        assert!(matches!(
            induced_pitch(0.056, 0.056),
            Err(SubstrateError::ExcessiveSinkage { .. })
        ));
        assert!(matches!(
            induced_pitch(-0.001, 0.056),
            Err(SubstrateError::NegativeDepth(_))
        ));
    }

    #[test]
    fn test_terrain_noise_bounds_and_determinism() {
        let mut a = TerrainField::new(0.052, 0.002, 7);
        let mut b = TerrainField::new(0.052, 0.002, 7);
        let mut c = TerrainField::new(0.052, 0.002, 8);
        let mut seen_positive = false;
        for k in -20..60 {
            let x = k as f64 * 0.03;
            let cell_a = a.cell(x);
            assert!(cell_a.depth_m >= 0.0 && cell_a.depth_m < 0.002);
            assert_eq!(cell_a, b.cell(x), "same seed must agree");
            seen_positive |= cell_a.depth_m > 0.0;
            let _ = c.cell(x);
        }
        assert!(seen_positive, "noise must actually perturb the field");
        let diff = (-20..60).any(|k| {
            let x = k as f64 * 0.03;
            a.cell(x).depth_m != c.cell(x).depth_m
        });
        assert!(diff, "different seeds must differ somewhere");

        let mut flat = TerrainField::new(0.052, 0.0, 3);
        assert_eq!(flat.cell(0.3).depth_m, 0.0);
        flat.record_load(0.3);
        flat.record_load(0.3);
        assert_eq!(flat.cell(0.3).load_count, 2);
        assert_eq!(flat.cell(0.36).load_count, 0, "neighbor cell untouched");
    }

    #[test]
    fn test_rigid_run_is_pure_kinematic_rolling() {
        let config = RunConfig::builtin("rigid").unwrap();
        for name in ["hexagon", "quadrilateral", "triangle"] {
            let gait = Gait::builtin(name).unwrap();
            let out = run(&gait, &config, 0).unwrap();
            assert!(
                out.steps.iter().all(|r| r.outcome == StepOutcome::Advance),
                "{name}: rigid ground never rejects a transfer"
            );
            assert!(out.steps.iter().all(|r| r.pitch_deg == 0.0));
            let switches = out.steps.len();
            let expected = switches as f64 * gait.geometric_step_length(0.056).unwrap();
            assert_eq!(out.summary.distance_m, expected, "{name}: exact kinematic identity");
            assert!(!out.summary.failure);
            assert_eq!(out.summary.stop, StopCause::CourseComplete);
            assert_eq!(
                out.trajectory.times_s.len(),
                switches * 360 + 1,
                "{name}: 120 Hz over {switches} strides plus the boundary sample"
            );
        }
    }

    #[test]
    fn test_hexagon_on_sand_advances_once_then_oscillates() {
        let gait = Gait::builtin("hexagon").unwrap();
        let config = sand_config();
        for seed in 0..10 {
            let out = run(&gait, &config, seed).unwrap();
            let outcomes: Vec<StepOutcome> = out.steps.iter().map(|r| r.outcome).collect();
            assert_eq!(
                outcomes,
                vec![
                    StepOutcome::Advance,
                    StepOutcome::Oscillate,
                    StepOutcome::Oscillate
                ],
                "seed {seed}"
            );
            assert!(out.summary.failure);
            assert_eq!(out.summary.stop, StopCause::Stuck);
            assert!((out.summary.distance_m - 0.0392).abs() < 1e-12);
            // The rejected touchdown lands on ground it already packed once.
            assert!(out.steps[1].pitch_deg > out.steps[0].pitch_deg);
            assert!(out.steps[1].pitch_deg > 13.6);
            assert!(out.steps[0].pitch_deg < 13.6);
        }
    }

    #[test]
    fn test_quadrilateral_on_sand_completes_course() {
        let gait = Gait::builtin("quadrilateral").unwrap();
        let config = sand_config();
        for seed in 0..10 {
            let out = run(&gait, &config, seed).unwrap();
            assert!(
                out.steps.iter().all(|r| r.outcome == StepOutcome::Advance),
                "seed {seed}: the tall critical pitch clears every double load"
            );
            assert!(!out.summary.failure, "seed {seed}");
            assert!(out.summary.distance_m >= config.course_length_m);
            assert_eq!(out.summary.stop, StopCause::CourseComplete);
        }
    }

    #[test]
    fn test_triangle_on_sand_usually_sticks_early() {
        let gait = Gait::builtin("triangle").unwrap();
        let config = sand_config();
        let mut failures = 0;
        for seed in 0..20 {
            let out = run(&gait, &config, seed).unwrap();
            if out.summary.failure {
                failures += 1;
                assert_eq!(out.summary.stop, StopCause::Stuck, "seed {seed}");
            }
        }
        assert!(failures > 10, "only {failures}/20 trials failed");
    }

    #[test]
    fn test_adaptation_lowers_pitch_and_restores_progress() {
        let base = sand_config();
        let adapted = RunConfig::builtin("sand_adapted").unwrap();
        assert_eq!(adapted.substrate.adaptation_factor, 3.0);
        for name in ["hexagon", "triangle"] {
            let gait = Gait::builtin(name).unwrap();
            for seed in 0..5 {
                let out_base = run(&gait, &base, seed).unwrap();
                let out_adapted = run(&gait, &adapted, seed).unwrap();
                let common = out_base.steps.len().min(out_adapted.steps.len());
                for i in 0..common {
                    assert!(
                        out_adapted.steps[i].pitch_deg <= out_base.steps[i].pitch_deg + 1e-12,
                        "{name} seed {seed} step {i}: adaptation must not raise pitch"
                    );
                }
                assert!(!out_adapted.summary.failure, "{name} seed {seed}");
                assert!(out_adapted.summary.distance_m >= out_base.summary.distance_m);
            }
        }
    }

    #[test]
    fn test_identical_seeds_reproduce_bitwise() {
        let gait = Gait::builtin("triangle").unwrap();
        let config = sand_config();
        let a = run(&gait, &config, 11).unwrap();
        let b = run(&gait, &config, 11).unwrap();
        assert_eq!(a.steps, b.steps);
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(steps_to_csv(&a.steps), steps_to_csv(&b.steps));
        assert_eq!(a.trajectory.to_csv(), b.trajectory.to_csv());
    }

    #[test]
    fn test_runaway_sinkage_is_reported_not_masked() {
        let gait = Gait::builtin("hexagon").unwrap();
        let mut config = sand_config();
        config.substrate.bearing_stiffness_n_m3 = 100.0;
        assert!(matches!(
            run(&gait, &config, 0),
            Err(SubstrateError::ExcessiveSinkage { .. })
        ));
    }

    #[test]
    fn test_trajectory_advances_relabel_joint_columns() {
        let gait = Gait::builtin("hexagon").unwrap();
        let config = RunConfig::builtin("rigid").unwrap();
        let out = run(&gait, &config, 0).unwrap();
        // At the first window the rear support contact is column 0; after
        // one transfer the boundary sample holds it in column 1.
        let first = &out.trajectory.joints[0];
        let after = &out.trajectory.joints[360];
        let lowest =
            |row: &[Vec2; 6]| -> usize {
                (0..6)
                    .min_by(|&a, &b| {
                        let za = row[a].z + row[(a + 1) % 6].z;
                        let zb = row[b].z + row[(b + 1) % 6].z;
                        za.total_cmp(&zb)
                    })
                    .unwrap()
            };
        assert_eq!(lowest(first), 0);
        assert_eq!(lowest(after), 1);
    }

    #[test]
    fn test_step_outcome_agrees_with_critical_pitch_gate() {
        let config = sand_config();
        for name in ["hexagon", "triangle", "quadrilateral"] {
            let gait = Gait::builtin(name).unwrap();
            let ctx = GaitContext::new(&gait, DEFAULT_SEGMENT_LENGTH).unwrap();
            for seed in 0..8 {
                let out = run(&gait, &config, seed).unwrap();
                for r in &out.steps {
                    assert_eq!(
                        r.outcome == StepOutcome::Oscillate,
                        r.pitch_deg > ctx.beta_m_deg,
                        "{name} seed {seed} step {}",
                        r.step
                    );
                }
            }
        }
    }

    #[test]
    fn test_scenario_config_round_trip_and_validation() {
        let config = sand_config();
        let parsed = RunConfig::from_json(&config.to_json()).unwrap();
        assert_eq!(parsed, config);
        assert!(matches!(
            RunConfig::from_json("{}"),
            Err(SubstrateError::MalformedConfig(_))
        ));
        let mut bad = sand_config();
        bad.substrate.shear_slip = 1.5;
        assert!(matches!(
            bad.validate(),
            Err(SubstrateError::InvalidSlip(_))
        ));
        assert!(matches!(
            RunConfig::builtin("lava"),
            Err(SubstrateError::MalformedConfig(_))
        ));
    }

    proptest! {
        #[test]
        fn prop_sinkage_monotone_in_load_count_and_adaptation(
            load in 1.0f64..8.0,
            count in 0u32..4,
            factor in 1.0f64..4.0,
        ) {
            let params = sand_params();
            let shallow = TerrainCell { depth_m: 0.0, load_count: count };
            let deeper = TerrainCell { depth_m: 0.0, load_count: count + 1 };
            let d0 = touchdown_sinkage(load, params.contact_area_m2, &params, &shallow).unwrap();
            let d1 = touchdown_sinkage(load, params.contact_area_m2, &params, &deeper).unwrap();
            prop_assert!(d1 >= d0);

            let adapted = SubstrateParams { adaptation_factor: factor, ..params.clone() };
            let da = touchdown_sinkage(load, params.contact_area_m2, &adapted, &shallow).unwrap();
            prop_assert!(da <= d0 + 1e-15);

            let heavier = touchdown_sinkage(load + 0.5, params.contact_area_m2, &params, &shallow).unwrap();
            prop_assert!(heavier >= d0);
        }

        #[test]
        fn prop_induced_pitch_inverts_depth(beta_deg in 0.5f64..85.0) {
            let length = 0.056;
            let depth = length * beta_deg.to_radians().sin();
            let pitch = induced_pitch(depth, length).unwrap();
            prop_assert!((pitch - beta_deg).abs() < 1e-9);
        }
    }
}
