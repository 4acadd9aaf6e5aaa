//! Motion variations on the 15-muscle ragdoll: random perturbation, muscle
//! weakening, action blending and object interaction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{frame_count, Vec3, FRAME_RATE_HZ};
use crate::distributions::UniformRange;
use crate::error::{Error, Result};
use crate::motion::{ActionCategory, MotionClip, MotionManifest};
use crate::muscle::MuscleId;
use crate::scenario::Variation;

pub const MAX_BLEND_SOURCES: usize = 2;

/// Horizontal circular orbit of a perturbation body around a muscle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub amplitude_m: f64,
    pub frequency_hz: f64,
    pub phase_rad: f64,
}

impl Orbit {
    pub fn offset_at(&self, t_s: f64) -> Vec3 {
        let angle = std::f64::consts::TAU * self.frequency_hz * t_s + self.phase_rad;
        [self.amplitude_m * angle.cos(), 0.0, self.amplitude_m * angle.sin()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectPlan {
    pub object: String,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationPlan {
    pub mode: Variation,
    pub affected_muscles: Vec<MuscleId>,
    pub perturbation: BTreeMap<MuscleId, Orbit>,
    /// Strength factor in (0, 1] per weakened muscle.
    pub weakening: BTreeMap<MuscleId, f64>,
    pub blend_sources: Vec<String>,
    /// Index into `blend_sources` for each replaced muscle track.
    pub blend_map: BTreeMap<MuscleId, usize>,
    pub object_plan: Option<ObjectPlan>,
}

impl VariationPlan {
    pub fn none() -> Self {
        Self {
            mode: Variation::None,
            affected_muscles: Vec::new(),
            perturbation: BTreeMap::new(),
            weakening: BTreeMap::new(),
            blend_sources: Vec::new(),
            blend_map: BTreeMap::new(),
            object_plan: None,
        }
    }

    fn with_mode(mode: Variation) -> Self {
        Self { mode, ..Self::none() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationRanges {
    pub amplitude_m: UniformRange,
    pub frequency_hz: UniformRange,
    /// Strength factors are drawn from `(lo, hi]`.
    pub weakening: UniformRange,
}

impl VariationRanges {
    pub fn validate(&self) -> Result<()> {
        self.amplitude_m.validate("variation.amplitude_m")?;
        self.frequency_hz.validate("variation.frequency_hz")?;
        self.weakening.validate("variation.weakening")?;
        if self.amplitude_m.lo < 0.0 || self.frequency_hz.lo <= 0.0 {
            return Err(Error::Config(
                "variation amplitude must be >= 0 and frequency > 0".into(),
            ));
        }
        if self.weakening.lo < 0.0 || self.weakening.hi > 1.0 || self.weakening.hi <= 0.0 {
            return Err(Error::Config("variation.weakening must lie within (0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for VariationRanges {
    fn default() -> Self {
        Self {
            amplitude_m: UniformRange::new(0.01, 0.10),
            frequency_hz: UniformRange::new(0.25, 2.0),
            weakening: UniformRange::new(0.3, 1.0),
        }
    }
}

/// Uniform random non-empty subset: size uniform on `1..=n`, then members
/// uniform without replacement. Returned sorted.
fn random_subset<R: Rng + ?Sized>(rng: &mut R, pool: &[MuscleId]) -> Vec<MuscleId> {
    let mut items = pool.to_vec();
    let k = rng.random_range(1..=items.len());
    for i in 0..k {
        let j = rng.random_range(i..items.len());
        items.swap(i, j);
    }
    items.truncate(k);
    items.sort();
    items
}

fn complementary_or_err(action: &ActionCategory) -> Result<Vec<MuscleId>> {
    let pool = action.complementary_muscles();
    if pool.is_empty() {
        return Err(Error::EmptySupport(format!(
            "action '{}' has no complementary muscles",
            action.name
        )));
    }
    Ok(pool)
}

/// Draw the variation-specific parameters for `mode`.
///
/// Perturbation and blending only touch the action's complementary muscles;
/// weakening may touch any muscle. Blend sources are other clips at least
/// `t_min_s` long.
pub fn sample_variation_plan<R: Rng + ?Sized>(
    rng: &mut R,
    action: &ActionCategory,
    base: &MotionClip,
    mode: Variation,
    manifest: &MotionManifest,
    t_min_s: f64,
    ranges: &VariationRanges,
) -> Result<VariationPlan> {
    let mut plan = VariationPlan::with_mode(mode);
    match mode {
        Variation::None => {}
        Variation::RandomPerturbation => {
            let muscles = random_subset(rng, &complementary_or_err(action)?);
            for &m in &muscles {
                let orbit = Orbit {
                    amplitude_m: ranges.amplitude_m.sample(rng),
                    frequency_hz: ranges.frequency_hz.sample(rng),
                    phase_rad: std::f64::consts::TAU * rng.random::<f64>(),
                };
                plan.perturbation.insert(m, orbit);
            }
            plan.affected_muscles = muscles;
        }
        Variation::Weakening => {
            let muscles = random_subset(rng, &MuscleId::ALL);
            for &m in &muscles {
                plan.weakening.insert(m, ranges.weakening.sample_upper_closed(rng));
            }
            plan.affected_muscles = muscles;
        }
        Variation::Blend => {
            let mut candidates: Vec<&MotionClip> = manifest
                .clips
                .iter()
                .filter(|c| c.id != base.id && c.duration_s >= t_min_s)
                .collect();
            if candidates.is_empty() {
                return Err(Error::EmptySupport(format!(
                    "no blend source at least {t_min_s} s long besides '{}'",
                    base.id
                )));
            }
            let wanted = rng.random_range(1..=MAX_BLEND_SOURCES).min(candidates.len());
            for i in 0..wanted {
                let j = rng.random_range(i..candidates.len());
                candidates.swap(i, j);
            }
            plan.blend_sources = candidates[..wanted].iter().map(|c| c.id.clone()).collect();
            let muscles = random_subset(rng, &complementary_or_err(action)?);
            for &m in &muscles {
                plan.blend_map.insert(m, rng.random_range(0..wanted));
            }
            plan.affected_muscles = muscles;
        }
        Variation::Objects => {
            if base.object_windows.is_empty() {
                return Err(Error::EmptySupport(format!(
                    "motion '{}' has no annotated object windows",
                    base.id
                )));
            }
            let w = &base.object_windows[rng.random_range(0..base.object_windows.len())];
            plan.object_plan = Some(ObjectPlan {
                object: w.object.clone(),
                start_s: w.start_s,
                end_s: w.end_s,
            });
        }
    }
    Ok(plan)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationFrame {
    pub t_s: f64,
    /// Positional offset per muscle, indexed by [`MuscleId::index`].
    pub offsets: [Vec3; 15],
    pub strength: [f64; 15],
    /// Blend source index per muscle, if the track is replaced.
    pub blend_source: [Option<usize>; 15],
    pub object_active: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationSchedule {
    pub frames: Vec<VariationFrame>,
}

/// Realize `plan` at 30 Hz for `duration_s` seconds.
pub fn render_schedule(plan: &VariationPlan, duration_s: f64) -> VariationSchedule {
    let n = frame_count(duration_s);
    let mut blend_source = [None; 15];
    for (m, &src) in &plan.blend_map {
        blend_source[m.index()] = Some(src);
    }
    let mut strength = [1.0; 15];
    for (m, &s) in &plan.weakening {
        strength[m.index()] = s;
    }
    let frames = (0..n)
        .map(|i| {
            let t_s = i as f64 / FRAME_RATE_HZ;
            let mut offsets = [[0.0; 3]; 15];
            for (m, orbit) in &plan.perturbation {
                offsets[m.index()] = orbit.offset_at(t_s);
            }
            let object_active = plan
                .object_plan
                .as_ref()
                .is_some_and(|o| t_s >= o.start_s && t_s <= o.end_s);
            VariationFrame {
                t_s,
                offsets,
                strength,
                blend_source,
                object_active,
            }
        })
        .collect();
    VariationSchedule { frames }
}

impl VariationSchedule {
    /// One row per (frame, muscle).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t_s,muscle,dx,dy,dz,strength,blend_source,object_active")?;
        for f in &self.frames {
            for m in MuscleId::ALL {
                let i = m.index();
                let [dx, dy, dz] = f.offsets[i];
                let src = f.blend_source[i].map(|s| s.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{m},{dx},{dy},{dz},{},{src},{}",
                    f.t_s, f.strength[i], f.object_active as u8
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanViolation {
    pub muscle: Option<MuscleId>,
    pub rule: String,
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.muscle {
            Some(m) => write!(f, "{} ({m})", self.rule),
            None => f.write_str(&self.rule),
        }
    }
}

/// Check every plan invariant against `action`. Empty means valid.
pub fn validate_plan(plan: &VariationPlan, action: &ActionCategory) -> Vec<PlanViolation> {
    let mut out = Vec::new();
    let mut push = |muscle: Option<MuscleId>, rule: &str| {
        out.push(PlanViolation {
            muscle,
            rule: rule.to_owned(),
        })
    };

    let mut seen = BTreeSet::new();
    for &m in &plan.affected_muscles {
        if !seen.insert(m) {
            push(Some(m), "muscle listed twice");
        }
    }
    let affected: BTreeSet<MuscleId> = plan.affected_muscles.iter().copied().collect();

    let uses = |mode: Variation| plan.mode == mode;
    if !uses(Variation::RandomPerturbation) && !plan.perturbation.is_empty() {
        push(None, "perturbation parameters present outside perturbation mode");
    }
    if !uses(Variation::Weakening) && !plan.weakening.is_empty() {
        push(None, "weakening factors present outside weakening mode");
    }
    if !uses(Variation::Blend) && (!plan.blend_sources.is_empty() || !plan.blend_map.is_empty()) {
        push(None, "blend sources present outside blend mode");
    }
    if !uses(Variation::Objects) && plan.object_plan.is_some() {
        push(None, "object plan present outside objects mode");
    }

    match plan.mode {
        Variation::None => {
            if !plan.affected_muscles.is_empty() {
                push(None, "mode none must not affect any muscle");
            }
        }
        Variation::RandomPerturbation => {
            if plan.perturbation.is_empty() {
                push(None, "perturbation mode without perturbed muscles");
            }
            let keys: BTreeSet<MuscleId> = plan.perturbation.keys().copied().collect();
            if keys != affected {
                push(None, "perturbed muscles differ from affected muscles");
            }
            for (&m, orbit) in &plan.perturbation {
                if action.is_critical(m) {
                    push(Some(m), "critical muscle perturbed");
                }
                if !(orbit.amplitude_m >= 0.0
                    && orbit.frequency_hz > 0.0
                    && orbit.amplitude_m.is_finite()
                    && orbit.frequency_hz.is_finite()
                    && orbit.phase_rad.is_finite())
                {
                    push(Some(m), "invalid orbit parameters");
                }
            }
        }
        Variation::Weakening => {
            if plan.weakening.is_empty() {
                push(None, "weakening mode without weakened muscles");
            }
            let keys: BTreeSet<MuscleId> = plan.weakening.keys().copied().collect();
            if keys != affected {
                push(None, "weakened muscles differ from affected muscles");
            }
            for (&m, &s) in &plan.weakening {
                if !(s > 0.0 && s <= 1.0) {
                    push(Some(m), "weakening factor outside (0, 1]");
                }
            }
        }
        Variation::Blend => {
            if plan.blend_sources.is_empty() {
                push(None, "blend mode without blend sources");
            }
            if plan.blend_sources.len() > MAX_BLEND_SOURCES {
                push(None, "blend count > 2");
            }
            let keys: BTreeSet<MuscleId> = plan.blend_map.keys().copied().collect();
            if keys != affected {
                push(None, "blended muscles differ from affected muscles");
            }
            for (&m, &src) in &plan.blend_map {
                if action.is_critical(m) {
                    push(Some(m), "critical muscle blended");
                }
                if src >= plan.blend_sources.len() {
                    push(Some(m), "blend source index out of range");
                }
            }
        }
        Variation::Objects => match &plan.object_plan {
            None => push(None, "objects mode without an object plan"),
            Some(o) => {
                if !(o.start_s >= 0.0 && o.start_s <= o.end_s) {
                    push(None, "object window is inverted or negative");
                }
                if !plan.affected_muscles.is_empty() {
                    push(None, "objects mode must not list affected muscles");
                }
            }
        },
    }
    out
}
