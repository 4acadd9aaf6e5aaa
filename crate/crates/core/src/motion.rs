//! Base-motion catalog, action taxonomy and the action/motion compatibility
//! matrix built by matching per-action regular expressions against motion
//! descriptions.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use crate::distributions::CategoricalParams;
use crate::error::{Error, Result};
use crate::muscle::MuscleId;

const DEFAULT_MANIFEST: &str = include_str!("../data/manifest.toml");
const DEFAULT_TAXONOMY: &str = include_str!("../data/taxonomy.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionSource {
    Mocap,
    Artist,
    Programmed,
}

/// Instant range during which the actor manipulates an object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectWindow {
    pub start_s: f64,
    pub end_s: f64,
    pub object: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionClip {
    pub id: String,
    pub source: MotionSource,
    pub description: String,
    pub duration_s: f64,
    /// One track per muscle, in [`MuscleId::ALL`] order. Derived from the
    /// clip id when omitted from the manifest file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub muscle_track_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub object_windows: Vec<ObjectWindow>,
}

impl MotionClip {
    pub fn default_track_ids(id: &str) -> Vec<String> {
        MuscleId::ALL.iter().map(|m| format!("{id}/{m}")).collect()
    }

    fn validate(&self) -> Result<()> {
        let fail = |why: String| Err(Error::Config(format!("motion clip '{}': {why}", self.id)));
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return fail(format!("duration_s must be > 0, got {}", self.duration_s));
        }
        if self.muscle_track_ids.len() != MuscleId::ALL.len() {
            return fail(format!(
                "expected 15 muscle tracks, found {}",
                self.muscle_track_ids.len()
            ));
        }
        for w in &self.object_windows {
            if !(w.start_s >= 0.0 && w.start_s <= w.end_s && w.end_s <= self.duration_s) {
                return fail(format!(
                    "object window [{}, {}] ({}) outside [0, {}]",
                    w.start_s, w.end_s, w.object, self.duration_s
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionManifest {
    pub version: String,
    pub clips: Vec<MotionClip>,
}

impl MotionManifest {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let mut manifest: MotionManifest = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
        for clip in &mut manifest.clips {
            if clip.muscle_track_ids.is_empty() {
                clip.muscle_track_ids = MotionClip::default_track_ids(&clip.id);
            }
        }
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// The committed 862-clip synthetic manifest.
    pub fn default_fixture() -> Self {
        Self::from_toml_str(DEFAULT_MANIFEST, Path::new("<builtin manifest>")).expect("builtin manifest is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for clip in &self.clips {
            if !seen.insert(clip.id.as_str()) {
                return Err(Error::Config(format!("duplicate motion id '{}'", clip.id)));
            }
            clip.validate()?;
        }
        Ok(())
    }

    /// Serialize with track ids that match the derived defaults left out.
    pub fn to_toml_string(&self) -> String {
        let mut compact = self.clone();
        for clip in &mut compact.clips {
            if clip.muscle_track_ids == MotionClip::default_track_ids(&clip.id) {
                clip.muscle_track_ids.clear();
            }
        }
        toml::to_string(&compact).expect("manifest serializes")
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.clips.iter().position(|c| c.id == id)
    }

    pub fn get(&self, id: &str) -> Option<&MotionClip> {
        self.clips.iter().find(|c| c.id == id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    #[serde(rename = "sub-hmdb")]
    SubHmdb,
    #[serde(rename = "one-person-synthetic")]
    OnePersonSynthetic,
    #[serde(rename = "two-people-synthetic")]
    TwoPeopleSynthetic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionCategory {
    pub name: String,
    pub kind: ActionKind,
    pub regexes: Vec<String>,
    pub critical_muscles: Vec<MuscleId>,
    #[serde(default)]
    pub supporting_characters: u32,
}

impl ActionCategory {
    pub fn is_critical(&self, muscle: MuscleId) -> bool {
        self.critical_muscles.contains(&muscle)
    }

    /// Muscles that may be altered without changing the action's meaning.
    pub fn complementary_muscles(&self) -> Vec<MuscleId> {
        MuscleId::ALL.into_iter().filter(|m| !self.is_critical(*m)).collect()
    }

    fn compile(&self) -> Result<Vec<Regex>> {
        self.regexes
            .iter()
            .map(|pattern| {
                RegexBuilder::new(pattern)
                    .case_insensitive(true)
                    .build()
                    .map_err(|e| Error::TaxonomyLoad {
                        category: self.name.clone(),
                        reason: format!("invalid regex '{pattern}': {e}"),
                    })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub version: String,
    pub actions: Vec<ActionCategory>,
}

impl Taxonomy {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let taxonomy: Taxonomy = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
        taxonomy.validate()?;
        Ok(taxonomy)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// The committed 35-category taxonomy.
    pub fn default_fixture() -> Self {
        Self::from_toml_str(DEFAULT_TAXONOMY, Path::new("<builtin taxonomy>")).expect("builtin taxonomy is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for action in &self.actions {
            let err = |reason: &str| Error::TaxonomyLoad {
                category: action.name.clone(),
                reason: reason.to_owned(),
            };
            if !seen.insert(action.name.as_str()) {
                return Err(err("duplicate category name"));
            }
            if action.critical_muscles.is_empty() {
                return Err(err("critical_muscles must not be empty"));
            }
            if action.regexes.is_empty() {
                return Err(err("at least one regex is required"));
            }
            action.compile()?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ActionCategory> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.actions.iter().map(|a| a.name.clone()).collect()
    }

    pub fn count_by_kind(&self, kind: ActionKind) -> usize {
        self.actions.iter().filter(|a| a.kind == kind).count()
    }
}

/// Binary action-by-motion compatibility matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaAb {
    actions: Vec<String>,
    clips: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl ThetaAb {
    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn clips(&self) -> &[String] {
        &self.clips
    }

    pub fn get(&self, action: usize, clip: usize) -> bool {
        self.rows[action][clip]
    }

    pub fn row(&self, action: usize) -> &[bool] {
        &self.rows[action]
    }

    pub fn row_for(&self, action: &str) -> Option<&[bool]> {
        self.actions
            .iter()
            .position(|a| a == action)
            .map(|i| self.rows[i].as_slice())
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }
}

impl fmt::Display for ThetaAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, row) in self.actions.iter().zip(&self.rows) {
            let bits: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "{name:>24} {bits}")?;
        }
        Ok(())
    }
}

pub fn build_theta_ab(manifest: &MotionManifest, taxonomy: &[ActionCategory]) -> Result<ThetaAb> {
    let mut rows = Vec::with_capacity(taxonomy.len());
    for action in taxonomy {
        let patterns = action.compile()?;
        let row = manifest
            .clips
            .iter()
            .map(|clip| patterns.iter().any(|re| re.is_match(&clip.description)))
            .collect();
        rows.push(row);
    }
    Ok(ThetaAb {
        actions: taxonomy.iter().map(|a| a.name.clone()).collect(),
        clips: manifest.clips.iter().map(|c| c.id.clone()).collect(),
        rows,
    })
}

/// Indices of clips that match `action` and are at least `t_min_s` long.
pub fn eligible_clips(
    action: &ActionCategory,
    theta_ab: &ThetaAb,
    manifest: &MotionManifest,
    t_min_s: f64,
) -> Result<Vec<usize>> {
    let row = theta_ab
        .row_for(&action.name)
        .ok_or_else(|| Error::EmptySupport(format!("action '{}' is not in the compatibility matrix", action.name)))?;
    Ok(manifest
        .clips
        .iter()
        .enumerate()
        .filter(|(i, clip)| row[*i] && clip.duration_s >= t_min_s)
        .map(|(i, _)| i)
        .collect())
}

/// Uniform distribution over the clips that match `action` and are long
/// enough to fill `t_min_s`.
pub fn base_motion_distribution(
    action: &ActionCategory,
    theta_ab: &ThetaAb,
    manifest: &MotionManifest,
    t_min_s: f64,
) -> Result<CategoricalParams<usize>> {
    if !(t_min_s > 0.0) {
        return Err(Error::ParameterDomain(format!("t_min_s must be > 0, got {t_min_s}")));
    }
    let row = theta_ab
        .row_for(&action.name)
        .ok_or_else(|| Error::EmptySupport(format!("action '{}' is not in the compatibility matrix", action.name)))?;
    let weights: Vec<f64> = manifest
        .clips
        .iter()
        .zip(row)
        .map(|(clip, &m)| if m && clip.duration_s >= t_min_s { 1.0 } else { 0.0 })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::EmptySupport(format!(
            "no base motion for action '{}' is at least {t_min_s} s long",
            action.name
        )));
    }
    CategoricalParams::new((0..manifest.clips.len()).collect(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clip(id: &str, desc: &str, dur: f64) -> MotionClip {
        MotionClip {
            id: id.into(),
            source: MotionSource::Mocap,
            description: desc.into(),
            duration_s: dur,
            muscle_track_ids: MotionClip::default_track_ids(id),
            object_windows: vec![],
        }
    }

    fn action(name: &str, regexes: &[&str]) -> ActionCategory {
        ActionCategory {
            name: name.into(),
            kind: ActionKind::SubHmdb,
            regexes: regexes.iter().map(|s| s.to_string()).collect(),
            critical_muscles: vec![MuscleId::Hips],
            supporting_characters: 0,
        }
    }

    fn manifest(clips: Vec<MotionClip>) -> MotionManifest {
        MotionManifest {
            version: "test".into(),
            clips,
        }
    }

    #[test]
    fn direct_match_and_miss() {
        let m = manifest(vec![
            clip("a", "walk with arm swing", 4.0),
            clip("b", "subject runs forward", 4.0),
        ]);
        let tax = vec![action("walk", &["walk"]), action("golf", &["golf|swing club"])];
        let theta = build_theta_ab(&m, &tax).unwrap();
        assert!(theta.get(0, 0));
        assert!(!theta.get(1, 1));
        assert!(!theta.get(1, 0));
    }

    #[test]
    fn matching_is_case_insensitive() {
        let m = manifest(vec![clip("a", "WALK slowly", 2.0)]);
        let theta = build_theta_ab(&m, &[action("walk", &["^walk"])]).unwrap();
        assert!(theta.get(0, 0));
    }

    #[test]
    fn invalid_regex_names_category() {
        let m = manifest(vec![clip("a", "walk", 2.0)]);
        let err = build_theta_ab(&m, &[action("broken", &["(unclosed"])]).unwrap_err();
        match err {
            Error::TaxonomyLoad { category, .. } => assert_eq!(category, "broken"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_clips_get_zero_weight() {
        let m = manifest(vec![
            clip("short", "walk", 0.5),
            clip("x", "walk", 3.0),
            clip("y", "walk", 5.0),
        ]);
        let a = action("walk", &["walk"]);
        let theta = build_theta_ab(&m, std::slice::from_ref(&a)).unwrap();
        let dist = base_motion_distribution(&a, &theta, &m, 1.0).unwrap();
        assert_eq!(dist.probability_at(0), 0.0);
        assert_eq!(dist.probability_at(1), 0.5);
        assert_eq!(dist.probability_at(2), 0.5);
    }

    #[test]
    fn empty_support_names_action() {
        let m = manifest(vec![clip("short", "walk", 0.5)]);
        let a = action("walk", &["walk"]);
        let theta = build_theta_ab(&m, std::slice::from_ref(&a)).unwrap();
        let err = base_motion_distribution(&a, &theta, &m, 1.0).unwrap_err();
        assert!(err.to_string().contains("walk"));
    }

    #[test]
    fn manifest_rejects_bad_windows() {
        let mut c = clip("a", "pick up ball", 2.0);
        c.object_windows.push(ObjectWindow {
            start_s: 1.0,
            end_s: 3.0,
            object: "Ball".into(),
        });
        assert!(manifest(vec![c]).validate().is_err());
    }

    #[test]
    fn default_fixtures_load() {
        let m = MotionManifest::default_fixture();
        assert_eq!(m.clips.len(), 862);
        let t = Taxonomy::default_fixture();
        assert_eq!(t.actions.len(), 35);
        assert_eq!(t.count_by_kind(ActionKind::SubHmdb), 21);
        assert_eq!(t.count_by_kind(ActionKind::OnePersonSynthetic), 10);
        assert_eq!(t.count_by_kind(ActionKind::TwoPeopleSynthetic), 4);
    }
}
