//! Ancestral sampling of complete recipes.
//!
//! A recipe factorizes into three independent parts: P1 draws the day
//! phase, weather, clock time and weather state; P2 draws the human model;
//! P3 draws action, environment, camera, variation, base motion, duration
//! and placement. Every part reads its own substream of
//! `recipe/<index>`, so a recipe depends only on `(master_seed, index)`.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::camera::{sample_camera_params, CameraRig};
use crate::distributions::{triangular_sample_wrapped, CategoricalParams, TriangularParams};
use crate::error::{Error, Result};
use crate::motion::{build_theta_ab, eligible_clips, ActionCategory, MotionClip, MotionManifest, Taxonomy, ThetaAb};
use crate::rng::SeedPath;
use crate::variation::{sample_variation_plan, validate_plan, VariationPlan};

use super::config::{categorical_over, GeneratorConfig, CLOCK_MODULUS_H};
use super::placement::{sample_placement, ScenePlacement, WaypointAtlas};
use super::vocab::{CameraBehavior, DayPhase, Environment, HumanModel, Variation, Weather};
use super::weather::{check_weather_state, sample_weather_state, WeatherState};

/// One sampled assignment of every generator variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub seed_path: SeedPath,
    pub human_model: HumanModel,
    pub action: String,
    pub duration_s: f64,
    pub base_motion: String,
    pub variation: Variation,
    pub camera: CameraBehavior,
    pub environment: Environment,
    pub day_phase: DayPhase,
    pub weather: Weather,
    pub clock_h: f64,
    pub weather_state: WeatherState,
    pub placement: ScenePlacement,
    pub camera_rig: CameraRig,
    pub variation_plan: VariationPlan,
}

impl Recipe {
    pub fn frame_count(&self) -> usize {
        crate::camera::frame_count(self.duration_s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct P1Sample {
    pub day_phase: DayPhase,
    pub weather: Weather,
    pub clock_h: f64,
    pub weather_state: WeatherState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct P3Sample {
    pub action: usize,
    pub environment: Environment,
    pub camera: CameraBehavior,
    pub variation: Variation,
    pub base_motion: usize,
    pub duration_s: f64,
    pub placement: ScenePlacement,
}

/// Clip duration given the base motion length:
/// `Tr(t_min, min(L_b, t_max), min(t_mod, L_b))`.
pub fn duration_params(config: &GeneratorConfig, clip_duration_s: f64) -> Result<TriangularParams> {
    TriangularParams::new(
        config.t_min_s,
        clip_duration_s.min(config.t_max_s),
        config.t_mod_s.min(clip_duration_s),
    )
}

pub fn sample_p1<R: Rng + ?Sized>(rng: &mut R, config: &GeneratorConfig) -> Result<P1Sample> {
    let day_phase = *categorical_over(DayPhase::ALL, &config.theta_d)?.sample(rng);
    let weather = *categorical_over(Weather::ALL, &config.theta_w)?.sample(rng);
    let clock_h = triangular_sample_wrapped(rng, *config.clock.for_phase(day_phase), CLOCK_MODULUS_H)?;
    let weather_state = sample_weather_state(rng, weather, clock_h, &config.weather)?;
    Ok(P1Sample {
        day_phase,
        weather,
        clock_h,
        weather_state,
    })
}

pub fn sample_p2<R: Rng + ?Sized>(rng: &mut R, config: &GeneratorConfig) -> Result<HumanModel> {
    let models: Vec<HumanModel> = HumanModel::all().collect();
    let dist = match &config.theta_h {
        None => CategoricalParams::uniform(models)?,
        Some(table) if table.is_empty() => return Err(Error::Config("theta_h: empty human model list".into())),
        Some(table) => categorical_over(&models, table)?,
    };
    Ok(*dist.sample(rng))
}

struct ActionSupport {
    eligible: Vec<usize>,
    with_objects: Vec<usize>,
}

/// Immutable sampling context: configuration, motion library, taxonomy,
/// waypoint graphs and everything precomputed from them.
pub struct Generator {
    config: GeneratorConfig,
    manifest: MotionManifest,
    taxonomy: Taxonomy,
    atlas: WaypointAtlas,
    theta_ab: ThetaAb,
    theta_a: CategoricalParams<usize>,
    environments: Vec<CategoricalParams<Environment>>,
    variations: CategoricalParams<Variation>,
    support: Vec<ActionSupport>,
}

impl Generator {
    pub fn new(
        config: GeneratorConfig,
        manifest: MotionManifest,
        taxonomy: Taxonomy,
        atlas: WaypointAtlas,
    ) -> Result<Self> {
        config.validate()?;
        manifest.validate()?;
        taxonomy.validate()?;
        atlas.validate()?;
        let names = taxonomy.names();
        let known = |name: &String, table: &str| {
            if names.contains(name) {
                Ok(())
            } else {
                Err(Error::Config(format!("{table} references unknown action '{name}'")))
            }
        };
        if let Some(a) = &config.theta_a {
            for name in a.keys() {
                known(name, "theta_a")?;
            }
        }
        for name in config.theta_ae.rows.keys() {
            known(name, "theta_ae")?;
        }
        for name in config.theta_ac.rows.keys() {
            known(name, "theta_ac")?;
        }

        let theta_ab = build_theta_ab(&manifest, &taxonomy.actions)?;
        let indices: Vec<usize> = (0..names.len()).collect();
        let theta_a = match &config.theta_a {
            None => CategoricalParams::uniform(indices)?,
            Some(table) => {
                let weights = names.iter().map(|n| table.get(n).copied().unwrap_or(0.0)).collect();
                CategoricalParams::new(indices, weights)?
            }
        };
        let environments = names
            .iter()
            .map(|n| {
                categorical_over(Environment::ALL, config.theta_ae.row(n))
                    .map_err(|e| Error::Config(format!("theta_ae row for '{n}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let variations = categorical_over(Variation::ALL, &config.theta_v)?;
        let support = taxonomy
            .actions
            .iter()
            .map(|a| {
                let eligible = eligible_clips(a, &theta_ab, &manifest, config.t_min_s)?;
                let with_objects = eligible
                    .iter()
                    .copied()
                    .filter(|&i| !manifest.clips[i].object_windows.is_empty())
                    .collect();
                Ok(ActionSupport { eligible, with_objects })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            manifest,
            taxonomy,
            atlas,
            theta_ab,
            theta_a,
            environments,
            variations,
            support,
        })
    }

    /// Generator over the committed fixtures and the builtin config.
    pub fn with_defaults() -> Result<Self> {
        Self::new(
            GeneratorConfig::default(),
            MotionManifest::default_fixture(),
            Taxonomy::default_fixture(),
            WaypointAtlas::default_fixture(),
        )
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn manifest(&self) -> &MotionManifest {
        &self.manifest
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn atlas(&self) -> &WaypointAtlas {
        &self.atlas
    }

    pub fn theta_ab(&self) -> &ThetaAb {
        &self.theta_ab
    }

    pub fn action_distribution(&self) -> &CategoricalParams<usize> {
        &self.theta_a
    }

    pub fn action(&self, index: usize) -> &ActionCategory {
        &self.taxonomy.actions[index]
    }

    fn action_index(&self, name: &str) -> Result<usize> {
        self.taxonomy
            .index_of(name)
            .ok_or_else(|| Error::UnknownClass(name.to_owned()))
    }

    /// Draw the P3 variables; `forced_action` skips the draw of A.
    pub fn sample_p3<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        weather: Weather,
        forced_action: Option<usize>,
    ) -> Result<P3Sample> {
        let action = match forced_action {
            Some(a) => a,
            None => *self.theta_a.sample(rng),
        };
        let category = self.action(action);
        let environment = *self.environments[action].sample(rng);
        let camera_weights = self.config.camera_weights(&category.name, environment, weather);
        let camera = *CategoricalParams::new(CameraBehavior::ALL.to_vec(), camera_weights)
            .map_err(|_| {
                Error::EmptySupport(format!(
                    "no camera allowed for action '{}' in '{environment}' under '{weather}'",
                    category.name
                ))
            })?
            .sample(rng);
        let variation = *self.variations.sample(rng);

        let support = &self.support[action];
        let pool = if variation == Variation::Objects {
            &support.with_objects
        } else {
            &support.eligible
        };
        if pool.is_empty() {
            return Err(Error::EmptySupport(format!(
                "no base motion for action '{}' (variation '{variation}', t_min {} s)",
                category.name, self.config.t_min_s
            )));
        }
        let base_motion = pool[rng.random_range(0..pool.len())];
        let clip = &self.manifest.clips[base_motion];
        let duration_s = duration_params(&self.config, clip.duration_s)?.sample(rng);
        let placement = sample_placement(
            rng,
            environment,
            category.supporting_characters,
            &self.atlas,
            &self.config.placement,
        )?;
        Ok(P3Sample {
            action,
            environment,
            camera,
            variation,
            base_motion,
            duration_s,
            placement,
        })
    }

    pub fn sample_recipe(&self, master_seed: u64, index: u64) -> Result<Recipe> {
        self.sample_inner(master_seed, index, None)
    }

    /// Like [`Generator::sample_recipe`] with the action fixed, as used when
    /// following a dataset plan.
    pub fn sample_recipe_for_action(&self, master_seed: u64, index: u64, action: &str) -> Result<Recipe> {
        let a = self.action_index(action)?;
        self.sample_inner(master_seed, index, Some(a))
    }

    fn sample_inner(&self, master_seed: u64, index: u64, forced_action: Option<usize>) -> Result<Recipe> {
        let seed_path = SeedPath::root(master_seed).child("recipe", index);
        let p1 = sample_p1(&mut seed_path.child("p1", 0).stream(), &self.config)?;
        let human_model = sample_p2(&mut seed_path.child("p2", 0).stream(), &self.config)?;
        let p3 = self.sample_p3(&mut seed_path.child("p3", 0).stream(), p1.weather, forced_action)?;
        let camera_rig = sample_camera_params(
            &mut seed_path.child("camera", 0).stream(),
            p3.camera,
            &self.config.camera,
        );
        let category = self.action(p3.action);
        let base = &self.manifest.clips[p3.base_motion];
        let variation_plan = sample_variation_plan(
            &mut seed_path.child("variation", 0).stream(),
            category,
            base,
            p3.variation,
            &self.manifest,
            self.config.t_min_s,
            &self.config.variation,
        )?;
        Ok(Recipe {
            seed_path,
            human_model,
            action: category.name.clone(),
            duration_s: p3.duration_s,
            base_motion: base.id.clone(),
            variation: p3.variation,
            camera: p3.camera,
            environment: p3.environment,
            day_phase: p1.day_phase,
            weather: p1.weather,
            clock_h: p1.clock_h,
            weather_state: p1.weather_state,
            placement: p3.placement,
            camera_rig,
            variation_plan,
        })
    }

    /// Split `total` clips over the actions: every action gets
    /// `per_class_min`, the remainder is shared in proportion to theta_A by
    /// largest remainder (ties to the earlier action).
    pub fn plan_dataset(&self, per_class_min: usize, total: usize) -> Result<Vec<(String, usize)>> {
        plan_counts(&self.taxonomy.names(), self.theta_a.weights(), per_class_min, total)
    }

    /// The action of each index when following a plan, in index order.
    pub fn planned_actions(&self, per_class_min: usize, total: usize) -> Result<Vec<String>> {
        Ok(self
            .plan_dataset(per_class_min, total)?
            .into_iter()
            .flat_map(|(name, n)| std::iter::repeat_n(name, n))
            .collect())
    }

    /// Check every recipe-level constraint. Empty means valid.
    pub fn validate_recipe(&self, r: &Recipe) -> Vec<RecipeViolation> {
        let mut out = Vec::new();
        let mut push = |rule: &'static str, detail: String| out.push(RecipeViolation { rule, detail });
        let cfg = &self.config;

        let Some(action) = self.taxonomy.get(&r.action) else {
            push("known-action", format!("action '{}' is not in the taxonomy", r.action));
            return out;
        };
        let clip: Option<&MotionClip> = self.manifest.get(&r.base_motion);

        if r.camera == CameraBehavior::Indoors && r.environment != Environment::House {
            push("indoors-camera", format!("indoors camera used in '{}'", r.environment));
        }
        let c = r.camera;
        if cfg.theta_c.get(&c).copied().unwrap_or(0.0) == 0.0 {
            push("camera-weight", format!("camera '{c}' has zero weight"));
        }
        if cfg.theta_ac.weight(&r.action, c) == 0.0 {
            push(
                "camera-action",
                format!("camera '{c}' not allowed for action '{}'", r.action),
            );
        }
        if cfg.theta_ec.weight(&r.environment, c) == 0.0 {
            push(
                "camera-environment",
                format!("camera '{c}' not allowed in environment '{}'", r.environment),
            );
        }
        if cfg.theta_wc.weight(&r.weather, c) == 0.0 {
            push(
                "camera-weather",
                format!("camera '{c}' not allowed under weather '{}'", r.weather),
            );
        }
        if cfg.theta_ae.weight(&r.action, r.environment) == 0.0 {
            push(
                "environment-action",
                format!("environment '{}' not allowed for '{}'", r.environment, r.action),
            );
        }
        if cfg.theta_d.get(&r.day_phase).copied().unwrap_or(0.0) == 0.0 {
            push(
                "day-phase-weight",
                format!("day phase '{}' has zero weight", r.day_phase),
            );
        }
        if cfg.theta_w.get(&r.weather).copied().unwrap_or(0.0) == 0.0 {
            push("weather-weight", format!("weather '{}' has zero weight", r.weather));
        }
        if cfg.theta_v.get(&r.variation).copied().unwrap_or(0.0) == 0.0 {
            push(
                "variation-weight",
                format!("variation '{}' has zero weight", r.variation),
            );
        }
        if let Some(h) = &cfg.theta_h {
            if h.get(&r.human_model).copied().unwrap_or(0.0) == 0.0 {
                push(
                    "human-model-weight",
                    format!("human model '{}' has zero weight", r.human_model),
                );
            }
        }

        let support = cfg.clock.for_phase(r.day_phase);
        if !(r.clock_h >= 0.0 && r.clock_h < CLOCK_MODULUS_H && support.contains(r.clock_h)) {
            push(
                "clock-support",
                format!("clock {} h outside the '{}' support", r.clock_h, r.day_phase),
            );
        }
        for msg in check_weather_state(r.weather, &r.weather_state) {
            push("weather-state", msg);
        }

        match clip {
            None => push(
                "known-motion",
                format!("base motion '{}' is not in the manifest", r.base_motion),
            ),
            Some(clip) => {
                let ai = self.taxonomy.index_of(&r.action).unwrap_or(0);
                let bi = self.manifest.index_of(&clip.id).unwrap_or(0);
                if !self.theta_ab.get(ai, bi) {
                    push(
                        "motion-action",
                        format!("motion '{}' does not match action '{}'", clip.id, r.action),
                    );
                }
                if clip.duration_s < cfg.t_min_s {
                    push("motion-length", format!("motion '{}' is shorter than t_min", clip.id));
                }
                let hi = clip.duration_s.min(cfg.t_max_s);
                if !(r.duration_s >= cfg.t_min_s && r.duration_s <= hi) {
                    push(
                        "duration-bounds",
                        format!("duration {} s outside [{}, {hi}]", r.duration_s, cfg.t_min_s),
                    );
                }
                if r.variation == Variation::Objects {
                    let matches_window = r.variation_plan.object_plan.as_ref().is_some_and(|o| {
                        clip.object_windows
                            .iter()
                            .any(|w| w.object == o.object && w.start_s == o.start_s && w.end_s == o.end_s)
                    });
                    if !matches_window {
                        push(
                            "object-window",
                            format!("object plan is not an annotated window of '{}'", clip.id),
                        );
                    }
                }
            }
        }

        if r.variation_plan.mode != r.variation {
            push(
                "variation-mode",
                format!("plan mode '{}' differs from '{}'", r.variation_plan.mode, r.variation),
            );
        }
        for v in validate_plan(&r.variation_plan, action) {
            push("variation-plan", v.to_string());
        }
        for src in &r.variation_plan.blend_sources {
            match self.manifest.get(src) {
                None => push("blend-source", format!("blend source '{src}' is not in the manifest")),
                Some(c) if c.duration_s < cfg.t_min_s => {
                    push("blend-source", format!("blend source '{src}' is shorter than t_min"))
                }
                Some(c) if c.id == r.base_motion => {
                    push("blend-source", format!("blend source '{src}' is the base motion"))
                }
                _ => {}
            }
        }

        if r.camera_rig.behavior != r.camera {
            push(
                "camera-rig",
                format!("rig behavior '{}' differs from '{}'", r.camera_rig.behavior, r.camera),
            );
        }
        if let Err(e) = r.camera_rig.validate() {
            push("camera-rig", e.to_string());
        }
        if r.camera_rig.pinned != (r.camera == CameraBehavior::Static) {
            push("camera-rig", "only static cameras are pinned".into());
        }

        match self.atlas.graphs(r.environment) {
            None => push(
                "placement",
                format!("environment '{}' has no waypoint graph", r.environment),
            ),
            Some(g) => match g.protagonist.get(&r.placement.waypoint) {
                None => push(
                    "placement",
                    format!("waypoint '{}' not in '{}'", r.placement.waypoint, r.environment),
                ),
                Some(wp) => {
                    if wp.position != r.placement.protagonist_xyz {
                        push("placement", "protagonist position differs from its waypoint".into());
                    }
                    if r.environment.is_indoor() && !r.placement.background_spawns.is_empty() {
                        push("placement", "background actors spawned indoors".into());
                    }
                    for s in &r.placement.background_spawns {
                        let ok = g
                            .background
                            .as_ref()
                            .is_some_and(|bg| bg.get(&s.start).is_some() && bg.get(&s.destination).is_some());
                        if !ok {
                            push(
                                "placement",
                                format!("spawn {} -> {} not in the background graph", s.start, s.destination),
                            );
                        }
                    }
                }
            },
        }
        if r.placement.supporting_xyz.len() != action.supporting_characters as usize {
            push(
                "placement",
                format!(
                    "{} supporting characters, action needs {}",
                    r.placement.supporting_xyz.len(),
                    action.supporting_characters
                ),
            );
        }
        out
    }
}

/// Largest-remainder split used by [`Generator::plan_dataset`].
pub fn plan_counts(
    names: &[String],
    weights: &[f64],
    per_class_min: usize,
    total: usize,
) -> Result<Vec<(String, usize)>> {
    let n = names.len();
    if n == 0 || weights.len() != n {
        return Err(Error::Infeasible(
            "the plan needs at least one class and one weight per class".into(),
        ));
    }
    let floor_total = n
        .checked_mul(per_class_min)
        .ok_or_else(|| Error::Infeasible("per-class minimum overflows".into()))?;
    if total < floor_total {
        return Err(Error::Infeasible(format!(
            "{total} clips cannot give {n} classes at least {per_class_min} each (need {floor_total})"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::Infeasible("all class weights are zero".into()));
    }
    let rest = total - floor_total;
    let quotas: Vec<f64> = weights.iter().map(|w| rest as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let fi = quotas[i] - quotas[i].floor();
        let fj = quotas[j] - quotas[j].floor();
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    for &i in order.iter().take(rest.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    Ok(names
        .iter()
        .zip(counts)
        .map(|(name, c)| (name.clone(), c + per_class_min))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeViolation {
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for RecipeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.detail)
    }
}
