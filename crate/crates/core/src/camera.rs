//! Kite camera simulation.
//!
//! The camera is a point mass tethered by a spring to a target point mass,
//! which is in turn tethered by a second spring to the protagonist. Both
//! springs are Hookean with linear damping on the relative velocity, both
//! bodies feel linear drag, and the target-protagonist spring goes slack
//! while the target is closer than `min_distance_m`. An optional impulse
//! kicks the camera at `t = 0`.
//!
//! Integration is semi-implicit Euler at 300 Hz: spring forces are evaluated
//! at the current positions, the linear damping and drag terms are solved
//! implicitly for the new velocities, and positions advance with the new
//! velocities. Output frames are emitted at 30 Hz.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::UniformRange;
use crate::error::{Error, Result};
use crate::scenario::CameraBehavior;

pub type Vec3 = [f64; 3];

pub const FRAME_RATE_HZ: f64 = 30.0;
pub const SUBSTEPS_PER_FRAME: usize = 10;
pub const SUBSTEP_S: f64 = 1.0 / (FRAME_RATE_HZ * SUBSTEPS_PER_FRAME as f64);

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn is_finite(a: Vec3) -> bool {
    a.iter().all(|x| x.is_finite())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpringParams {
    /// N/m
    pub stiffness: f64,
    /// N*s/m
    pub damping: f64,
    /// m
    pub rest_length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Impulse {
    pub direction: Vec3,
    /// N*s
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraRig {
    pub behavior: CameraBehavior,
    pub camera_mass: f64,
    /// 1/s
    pub camera_drag: f64,
    pub target_mass: f64,
    pub target_drag: f64,
    pub spring_ct: SpringParams,
    pub spring_tp: SpringParams,
    pub min_distance_m: f64,
    pub impulse: Impulse,
    /// Static cameras never move: their velocity is held at zero.
    pub pinned: bool,
    /// Unit vector from the protagonist towards the initial camera position.
    pub approach_direction: Vec3,
}

pub const MIN_DISTANCE_CHOICES: [f64; 3] = [0.0, 1.0, 2.0];

impl CameraRig {
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Err(Error::ParameterDomain(format!("camera rig: {what}")));
        if !(self.camera_mass > 0.0 && self.target_mass > 0.0) {
            return fail(format!(
                "masses must be positive (camera {}, target {})",
                self.camera_mass, self.target_mass
            ));
        }
        if !(self.camera_drag >= 0.0 && self.target_drag >= 0.0) {
            return fail("drags must be non-negative".into());
        }
        for (name, s) in [
            ("camera-target", &self.spring_ct),
            ("target-protagonist", &self.spring_tp),
        ] {
            if !(s.stiffness >= 0.0 && s.damping >= 0.0 && s.rest_length >= 0.0) {
                return fail(format!("{name} spring parameters must be non-negative"));
            }
            if !(s.stiffness.is_finite() && s.damping.is_finite() && s.rest_length.is_finite()) {
                return fail(format!("{name} spring parameters must be finite"));
            }
        }
        if !MIN_DISTANCE_CHOICES.contains(&self.min_distance_m) {
            return fail(format!("min_distance_m {} not in {{0, 1, 2}}", self.min_distance_m));
        }
        if !(self.impulse.magnitude >= 0.0 && self.impulse.magnitude.is_finite()) {
            return fail("impulse magnitude must be finite and non-negative".into());
        }
        if self.impulse.magnitude > 0.0 && (norm(self.impulse.direction) - 1.0).abs() > 1e-9 {
            return fail("impulse direction must be a unit vector".into());
        }
        if (norm(self.approach_direction) - 1.0).abs() > 1e-9 {
            return fail("approach direction must be a unit vector".into());
        }
        if self.pinned && self.impulse.magnitude != 0.0 {
            return fail("a pinned camera cannot receive an impulse".into());
        }
        Ok(())
    }
}

/// Uniform sampling ranges for one camera behavior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviorRanges {
    pub camera_mass: UniformRange,
    pub camera_drag: UniformRange,
    pub target_mass: UniformRange,
    pub target_drag: UniformRange,
    pub stiffness: UniformRange,
    pub damping: UniformRange,
    pub ct_rest_length: UniformRange,
    pub impulse: UniformRange,
    pub elevation_deg: UniformRange,
}

impl BehaviorRanges {
    fn validate(&self, behavior: CameraBehavior) -> Result<()> {
        let b = behavior.as_str();
        let positive = |name: &str, r: &UniformRange| {
            r.validate(&format!("camera.{b}.{name}"))?;
            if r.lo <= 0.0 {
                return Err(Error::Config(format!("camera.{b}.{name} must be positive")));
            }
            Ok(())
        };
        let non_negative = |name: &str, r: &UniformRange| {
            r.validate(&format!("camera.{b}.{name}"))?;
            if r.lo < 0.0 {
                return Err(Error::Config(format!("camera.{b}.{name} must be non-negative")));
            }
            Ok(())
        };
        positive("camera_mass", &self.camera_mass)?;
        positive("target_mass", &self.target_mass)?;
        non_negative("camera_drag", &self.camera_drag)?;
        non_negative("target_drag", &self.target_drag)?;
        non_negative("stiffness", &self.stiffness)?;
        non_negative("damping", &self.damping)?;
        non_negative("ct_rest_length", &self.ct_rest_length)?;
        non_negative("impulse", &self.impulse)?;
        self.elevation_deg.validate(&format!("camera.{b}.elevation_deg"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraRanges {
    pub kite: BehaviorRanges,
    pub closeup: BehaviorRanges,
    pub indoors: BehaviorRanges,
    #[serde(rename = "static")]
    pub static_: BehaviorRanges,
}

impl CameraRanges {
    pub fn for_behavior(&self, behavior: CameraBehavior) -> &BehaviorRanges {
        match behavior {
            CameraBehavior::Kite => &self.kite,
            CameraBehavior::Closeup => &self.closeup,
            CameraBehavior::Indoors => &self.indoors,
            CameraBehavior::Static => &self.static_,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for b in CameraBehavior::ALL {
            self.for_behavior(*b).validate(*b)?;
        }
        Ok(())
    }
}

fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), z, r * phi.sin()]
}

/// Draw a rig for `behavior` with every parameter uniform on its range and
/// the dead-zone radius uniform over {0, 1, 2} m.
pub fn sample_camera_params<R: Rng + ?Sized>(
    rng: &mut R,
    behavior: CameraBehavior,
    ranges: &CameraRanges,
) -> CameraRig {
    let r = ranges.for_behavior(behavior);
    let pinned = behavior == CameraBehavior::Static;
    let camera_mass = r.camera_mass.sample(rng);
    let camera_drag = r.camera_drag.sample(rng);
    let target_mass = r.target_mass.sample(rng);
    let target_drag = r.target_drag.sample(rng);
    let spring_ct = SpringParams {
        stiffness: r.stiffness.sample(rng),
        damping: r.damping.sample(rng),
        rest_length: r.ct_rest_length.sample(rng),
    };
    let min_distance_m = MIN_DISTANCE_CHOICES[rng.random_range(0..MIN_DISTANCE_CHOICES.len())];
    // the slack zone ends where the spring is relaxed, so the force is continuous
    let spring_tp = SpringParams {
        stiffness: r.stiffness.sample(rng),
        damping: r.damping.sample(rng),
        rest_length: min_distance_m,
    };
    let magnitude = r.impulse.sample(rng);
    let direction = random_unit_vector(rng);
    let azimuth = std::f64::consts::TAU * rng.random::<f64>();
    let elevation = r.elevation_deg.sample(rng).to_radians();
    let approach_direction = [
        elevation.cos() * azimuth.cos(),
        elevation.sin(),
        elevation.cos() * azimuth.sin(),
    ];
    CameraRig {
        behavior,
        camera_mass,
        camera_drag,
        target_mass,
        target_drag,
        spring_ct,
        spring_tp,
        min_distance_m,
        impulse: Impulse {
            direction,
            magnitude: if pinned { 0.0 } else { magnitude },
        },
        pinned,
        approach_direction,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraState {
    pub camera_pos: Vec3,
    pub camera_vel: Vec3,
    pub target_pos: Vec3,
    pub target_vel: Vec3,
}

/// Protagonist position and velocity at the start of a step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Anchor {
    pub position: Vec3,
    pub velocity: Vec3,
}

impl Anchor {
    pub fn at_rest(position: Vec3) -> Self {
        Self {
            position,
            velocity: [0.0; 3],
        }
    }
}

/// Elastic force on `from` exerted by a spring to `to`.
fn elastic_force(from: Vec3, to: Vec3, stiffness: f64, rest_length: f64) -> Vec3 {
    let d = sub(from, to);
    let len = norm(d);
    if len == 0.0 {
        return [0.0; 3];
    }
    scale(d, -stiffness * (len - rest_length) / len)
}

/// Whether the target-protagonist spring acts at the given state.
pub fn tp_spring_active(rig: &CameraRig, target_pos: Vec3, protagonist_pos: Vec3) -> bool {
    norm(sub(target_pos, protagonist_pos)) >= rig.min_distance_m
}

/// Force of the target-protagonist spring on the target. Exactly zero inside
/// the dead zone.
pub fn tp_spring_force(rig: &CameraRig, state: &CameraState, anchor: &Anchor) -> Vec3 {
    if !tp_spring_active(rig, state.target_pos, anchor.position) {
        return [0.0; 3];
    }
    let elastic = elastic_force(
        state.target_pos,
        anchor.position,
        rig.spring_tp.stiffness,
        rig.spring_tp.rest_length,
    );
    let v_rel = sub(state.target_vel, anchor.velocity);
    sub(elastic, scale(v_rel, rig.spring_tp.damping))
}

/// Advance the two bodies by one semi-implicit Euler step of length `dt_s`.
pub fn step(state: &CameraState, rig: &CameraRig, anchor: &Anchor, dt_s: f64) -> CameraState {
    let ct = &rig.spring_ct;
    let tp = &rig.spring_tp;
    let f_ct_on_cam = elastic_force(state.camera_pos, state.target_pos, ct.stiffness, ct.rest_length);
    let tp_active = tp_spring_active(rig, state.target_pos, anchor.position);
    let f_tp_on_tgt = if tp_active {
        elastic_force(state.target_pos, anchor.position, tp.stiffness, tp.rest_length)
    } else {
        [0.0; 3]
    };
    let c_ct = ct.damping;
    let c_tp = if tp_active { tp.damping } else { 0.0 };
    let (mc, mt) = (rig.camera_mass, rig.target_mass);

    // (M (1 + drag dt) + dt C) v' = M v + dt F_elastic + dt c_tp v_anchor
    let a22 = mt * (1.0 + rig.target_drag * dt_s) + dt_s * (c_ct + c_tp);
    let mut camera_vel = [0.0; 3];
    let mut target_vel = [0.0; 3];
    if rig.pinned {
        for k in 0..3 {
            let rhs_t = mt * state.target_vel[k] - dt_s * f_ct_on_cam[k]
                + dt_s * f_tp_on_tgt[k]
                + dt_s * c_tp * anchor.velocity[k];
            target_vel[k] = rhs_t / a22;
        }
    } else {
        let a11 = mc * (1.0 + rig.camera_drag * dt_s) + dt_s * c_ct;
        let a12 = -dt_s * c_ct;
        let det = a11 * a22 - a12 * a12;
        for k in 0..3 {
            let rhs_c = mc * state.camera_vel[k] + dt_s * f_ct_on_cam[k];
            let rhs_t = mt * state.target_vel[k] - dt_s * f_ct_on_cam[k]
                + dt_s * f_tp_on_tgt[k]
                + dt_s * c_tp * anchor.velocity[k];
            camera_vel[k] = (a22 * rhs_c - a12 * rhs_t) / det;
            target_vel[k] = (a11 * rhs_t - a12 * rhs_c) / det;
        }
    }
    CameraState {
        camera_pos: add(state.camera_pos, scale(camera_vel, dt_s)),
        camera_vel,
        target_pos: add(state.target_pos, scale(target_vel, dt_s)),
        target_vel,
    }
}

/// Kinetic energy of both bodies plus the elastic energy of both springs.
/// The target-protagonist potential is zero inside the dead zone and
/// continuous at its boundary.
pub fn mechanical_energy(state: &CameraState, rig: &CameraRig, protagonist_pos: Vec3) -> f64 {
    let kinetic = 0.5 * rig.camera_mass * dot(state.camera_vel, state.camera_vel)
        + 0.5 * rig.target_mass * dot(state.target_vel, state.target_vel);
    let l_ct = norm(sub(state.camera_pos, state.target_pos));
    let u_ct = 0.5 * rig.spring_ct.stiffness * (l_ct - rig.spring_ct.rest_length).powi(2);
    let l_tp = norm(sub(state.target_pos, protagonist_pos));
    let u_tp = if l_tp >= rig.min_distance_m {
        let r = rig.spring_tp.rest_length;
        0.5 * rig.spring_tp.stiffness * ((l_tp - r).powi(2) - (rig.min_distance_m - r).powi(2))
    } else {
        0.0
    };
    kinetic + u_ct + u_tp
}

/// Equilibrium placement: target at the slack radius from the protagonist,
/// camera at the camera-target rest length beyond it.
pub fn initial_state(rig: &CameraRig, protagonist_pos: Vec3) -> CameraState {
    let dir = rig.approach_direction;
    let target_pos = add(protagonist_pos, scale(dir, rig.spring_tp.rest_length));
    let camera_pos = add(target_pos, scale(dir, rig.spring_ct.rest_length));
    CameraState {
        camera_pos,
        camera_vel: [0.0; 3],
        target_pos,
        target_vel: [0.0; 3],
    }
}

/// Camera velocity change caused by the rig's impulse.
pub fn apply_impulse(state: &mut CameraState, rig: &CameraRig) {
    if rig.pinned {
        return;
    }
    let dv = scale(rig.impulse.direction, rig.impulse.magnitude / rig.camera_mass);
    state.camera_vel = add(state.camera_vel, dv);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraFrame {
    pub t_s: f64,
    pub camera_pos: Vec3,
    pub target_pos: Vec3,
    pub look_at: Vec3,
    pub camera_vel: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraTrajectory {
    pub frames: Vec<CameraFrame>,
}

pub fn frame_count(duration_s: f64) -> usize {
    (duration_s * FRAME_RATE_HZ).round() as usize
}

fn look_direction(from: Vec3, to: Vec3, fallback: Vec3) -> Vec3 {
    let d = sub(to, from);
    let n = norm(d);
    if n > 1e-12 {
        scale(d, 1.0 / n)
    } else {
        fallback
    }
}

/// Integrate the rig following `protagonist_path` for `duration_s` seconds.
pub fn simulate<P>(rig: &CameraRig, protagonist_path: P, duration_s: f64) -> Result<CameraTrajectory>
where
    P: Fn(f64) -> Vec3,
{
    if !(duration_s >= 1.0 / FRAME_RATE_HZ) || !duration_s.is_finite() {
        return Err(Error::ParameterDomain(format!(
            "camera simulation needs at least one frame, got duration {duration_s} s"
        )));
    }
    rig.validate()?;
    let n_frames = frame_count(duration_s);
    let mut state = initial_state(rig, protagonist_path(0.0));
    apply_impulse(&mut state, rig);
    let mut look = scale(rig.approach_direction, -1.0);
    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let frame_t = i as f64 / FRAME_RATE_HZ;
        look = look_direction(state.camera_pos, state.target_pos, look);
        frames.push(CameraFrame {
            t_s: frame_t,
            camera_pos: state.camera_pos,
            target_pos: state.target_pos,
            look_at: look,
            camera_vel: state.camera_vel,
        });
        if i + 1 == n_frames {
            break;
        }
        for s in 0..SUBSTEPS_PER_FRAME {
            let t = frame_t + s as f64 * SUBSTEP_S;
            let p0 = protagonist_path(t);
            let p1 = protagonist_path(t + SUBSTEP_S);
            let anchor = Anchor {
                position: p0,
                velocity: scale(sub(p1, p0), 1.0 / SUBSTEP_S),
            };
            state = step(&state, rig, &anchor, SUBSTEP_S);
            if !(is_finite(state.camera_pos)
                && is_finite(state.target_pos)
                && is_finite(state.camera_vel)
                && is_finite(state.target_vel))
            {
                return Err(Error::SimulationDiverged { t_s: t + SUBSTEP_S });
            }
        }
    }
    Ok(CameraTrajectory { frames })
}

impl CameraTrajectory {
    pub const CSV_HEADER: &'static str = "t_s,cam_x,cam_y,cam_z,target_x,target_y,target_z,look_x,look_y,look_z";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for f in &self.frames {
            let [cx, cy, cz] = f.camera_pos;
            let [tx, ty, tz] = f.target_pos;
            let [lx, ly, lz] = f.look_at;
            writeln!(out, "{},{cx},{cy},{cz},{tx},{ty},{tz},{lx},{ly},{lz}", f.t_s)?;
        }
        Ok(())
    }

    pub fn final_camera_speed(&self) -> f64 {
        self.frames.last().map_or(0.0, |f| norm(f.camera_vel))
    }
}
