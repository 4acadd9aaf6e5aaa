//! Generator parameters: categorical weight tables, conditional tables,
//! duration bounds and the part-specific sampling ranges.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::camera::CameraRanges;
use crate::distributions::{CategoricalParams, UniformRange, WrappedTriangular};
use crate::error::{Error, Result};
use crate::variation::VariationRanges;

use super::vocab::{CameraBehavior, DayPhase, Environment, HumanModel, Variation, Weather};

const DEFAULT_CONFIG: &str = include_str!("../../data/config.toml");

pub const CLOCK_MODULUS_H: f64 = 24.0;

/// Weight rows keyed by a parent variable. Parents without an explicit row
/// use `default`; labels missing from a row get weight zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable<K: Ord, C: Ord> {
    pub default: BTreeMap<C, f64>,
    #[serde(default = "BTreeMap::new")]
    pub rows: BTreeMap<K, BTreeMap<C, f64>>,
}

impl<K: Ord, C: Ord + Copy> ConditionalTable<K, C> {
    pub fn row(&self, key: &K) -> &BTreeMap<C, f64> {
        self.rows.get(key).unwrap_or(&self.default)
    }

    pub fn weight(&self, key: &K, label: C) -> f64 {
        self.row(key).get(&label).copied().unwrap_or(0.0)
    }
}

fn check_weights<'a, L: std::fmt::Display + 'a>(
    name: &str,
    weights: impl IntoIterator<Item = (&'a L, &'a f64)>,
) -> Result<()> {
    let mut any_positive = false;
    for (label, &w) in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Config(format!(
                "{name}: weight for '{label}' must be finite and >= 0, got {w}"
            )));
        }
        any_positive |= w > 0.0;
    }
    if !any_positive {
        return Err(Error::Config(format!("{name}: needs at least one positive weight")));
    }
    Ok(())
}

/// Build a categorical over every label in `domain`, reading weights from
/// `table` (missing labels get zero).
pub fn categorical_over<L: Ord + Copy>(domain: &[L], table: &BTreeMap<L, f64>) -> Result<CategoricalParams<L>> {
    let weights = domain.iter().map(|l| table.get(l).copied().unwrap_or(0.0)).collect();
    CategoricalParams::new(domain.to_vec(), weights)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockConfig {
    pub dawn: WrappedTriangular,
    pub day: WrappedTriangular,
    pub dusk: WrappedTriangular,
    pub night: WrappedTriangular,
}

impl ClockConfig {
    pub fn for_phase(&self, phase: DayPhase) -> &WrappedTriangular {
        match phase {
            DayPhase::Dawn => &self.dawn,
            DayPhase::Day => &self.day,
            DayPhase::Dusk => &self.dusk,
            DayPhase::Night => &self.night,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeatherConfig {
    /// Activation probability of a dependent toggle once its parent is on.
    pub toggle_p: f64,
    pub sun_brightness: BTreeMap<Weather, UniformRange>,
    pub ambient_luminosity: BTreeMap<Weather, UniformRange>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementConfig {
    /// Distance of supporting characters from the protagonist.
    pub supporting_distance_m: UniformRange,
    /// Inclusive bounds on the number of background pedestrians.
    pub background_actors: [u32; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub version: String,
    pub t_min_s: f64,
    pub t_max_s: f64,
    pub t_mod_s: f64,
    /// Action weights by name; `None` means uniform over the taxonomy.
    #[serde(default)]
    pub theta_a: Option<BTreeMap<String, f64>>,
    pub theta_w: BTreeMap<Weather, f64>,
    pub theta_d: BTreeMap<DayPhase, f64>,
    /// `None` means uniform over all human models.
    #[serde(default)]
    pub theta_h: Option<BTreeMap<HumanModel, f64>>,
    pub theta_v: BTreeMap<Variation, f64>,
    pub theta_c: BTreeMap<CameraBehavior, f64>,
    pub theta_ae: ConditionalTable<String, Environment>,
    pub theta_ac: ConditionalTable<String, CameraBehavior>,
    pub theta_ec: ConditionalTable<Environment, CameraBehavior>,
    pub theta_wc: ConditionalTable<Weather, CameraBehavior>,
    pub clock: ClockConfig,
    pub weather: WeatherConfig,
    pub camera: CameraRanges,
    pub variation: VariationRanges,
    pub placement: PlacementConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG, Path::new("<builtin config>")).expect("builtin config is valid")
    }
}

impl GeneratorConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let config: GeneratorConfig = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks that do not need the taxonomy or the motion library.
    pub fn validate(&self) -> Result<()> {
        let (lo, md, hi) = (self.t_min_s, self.t_mod_s, self.t_max_s);
        if !(lo > 0.0 && lo <= md && md <= hi && hi.is_finite()) {
            return Err(Error::Config(format!(
                "durations must satisfy 0 < t_min <= t_mod <= t_max, got {lo}, {md}, {hi}"
            )));
        }
        if let Some(a) = &self.theta_a {
            check_weights("theta_a", a)?;
        }
        check_weights("theta_w", &self.theta_w)?;
        check_weights("theta_d", &self.theta_d)?;
        if let Some(h) = &self.theta_h {
            if h.is_empty() {
                return Err(Error::Config("theta_h: empty human model list".into()));
            }
            check_weights("theta_h", h)?;
        }
        check_weights("theta_v", &self.theta_v)?;
        check_weights("theta_c", &self.theta_c)?;
        check_weights("theta_ae.default", &self.theta_ae.default)?;
        for (k, row) in &self.theta_ae.rows {
            check_weights(&format!("theta_ae.rows.{k}"), row)?;
        }
        check_weights("theta_ac.default", &self.theta_ac.default)?;
        for (k, row) in &self.theta_ac.rows {
            check_weights(&format!("theta_ac.rows.{k}"), row)?;
        }
        check_weights("theta_ec.default", &self.theta_ec.default)?;
        for (k, row) in &self.theta_ec.rows {
            check_weights(&format!("theta_ec.rows.{k}"), row)?;
        }
        check_weights("theta_wc.default", &self.theta_wc.default)?;
        for (k, row) in &self.theta_wc.rows {
            check_weights(&format!("theta_wc.rows.{k}"), row)?;
        }
        for phase in DayPhase::ALL {
            self.clock
                .for_phase(*phase)
                .unwrapped(CLOCK_MODULUS_H)
                .map_err(|e| Error::Config(format!("clock.{phase}: {e}")))?;
        }
        let w = &self.weather;
        if !(0.0..=1.0).contains(&w.toggle_p) {
            return Err(Error::Config(format!(
                "weather.toggle_p must be in [0, 1], got {}",
                w.toggle_p
            )));
        }
        for weather in Weather::ALL {
            for (name, table) in [
                ("sun_brightness", &w.sun_brightness),
                ("ambient_luminosity", &w.ambient_luminosity),
            ] {
                let r = table
                    .get(weather)
                    .ok_or_else(|| Error::Config(format!("weather.{name} has no range for '{weather}'")))?;
                r.validate(&format!("weather.{name}.{weather}"))?;
                if r.lo < 0.0 || r.hi > 1.0 {
                    return Err(Error::Config(format!(
                        "weather.{name}.{weather} must lie within [0, 1]"
                    )));
                }
            }
        }
        self.camera.validate()?;
        self.variation.validate()?;
        self.placement
            .supporting_distance_m
            .validate("placement.supporting_distance_m")?;
        let [b_lo, b_hi] = self.placement.background_actors;
        if b_lo > b_hi {
            return Err(Error::Config(
                "placement.background_actors must be [lo, hi] with lo <= hi".into(),
            ));
        }
        Ok(())
    }

    /// Combined camera weights for an (action, environment, weather) triple.
    pub fn camera_weights(&self, action: &str, env: Environment, weather: Weather) -> Vec<f64> {
        let action = action.to_owned();
        CameraBehavior::ALL
            .iter()
            .map(|&c| {
                self.theta_c.get(&c).copied().unwrap_or(0.0)
                    * self.theta_ac.weight(&action, c)
                    * self.theta_ec.weight(&env, c)
                    * self.theta_wc.weight(&weather, c)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_config_matches_published_settings() {
        let c = GeneratorConfig::default();
        assert_eq!(c.theta_d[&DayPhase::Night], 0.0);
        for d in [DayPhase::Dawn, DayPhase::Day, DayPhase::Dusk] {
            assert_eq!(c.theta_d[&d], c.theta_d[&DayPhase::Dawn]);
        }
        let w: Vec<f64> = Weather::ALL.iter().map(|w| c.theta_w[w]).collect();
        assert!(w.iter().all(|&x| x == w[0]));
        assert_eq!(c.theta_c.get(&CameraBehavior::Static).copied().unwrap_or(0.0), 0.0);
        assert_eq!(c.clock.day, WrappedTriangular::new(10.0, 16.0, 13.0));
        assert_eq!(c.clock.night, WrappedTriangular::new(20.0, 7.0, 0.0));
        assert!(c.theta_a.is_none());
        assert!(c.theta_h.is_none());
    }

    #[test]
    fn camera_constraints() {
        let c = GeneratorConfig::default();
        let idx = |b: CameraBehavior| CameraBehavior::ALL.iter().position(|x| *x == b).unwrap();
        let lake = c.camera_weights("walk", Environment::Lake, Weather::Clear);
        assert_eq!(lake[idx(CameraBehavior::Indoors)], 0.0);
        assert_eq!(lake[idx(CameraBehavior::Closeup)], 0.0);
        assert!(lake[idx(CameraBehavior::Kite)] > 0.0);
        let house = c.camera_weights("brush hair", Environment::House, Weather::Fog);
        assert!(house[idx(CameraBehavior::Indoors)] > 0.0);
        assert!(house[idx(CameraBehavior::Closeup)] > 0.0);
    }

    #[test]
    fn rejects_bad_durations() {
        let c = GeneratorConfig {
            t_mod_s: 20.0,
            ..GeneratorConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn empty_model_list_is_config_error() {
        let c = GeneratorConfig {
            theta_h: Some(BTreeMap::new()),
            ..GeneratorConfig::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn toml_round_trip() {
        let c = GeneratorConfig::default();
        let back = GeneratorConfig::from_toml_str(&c.to_toml_string(), Path::new("mem")).unwrap();
        assert_eq!(back, c);
    }
}
