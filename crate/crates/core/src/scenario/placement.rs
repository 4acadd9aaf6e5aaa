//! Waypoint graphs per environment and actor placement.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::camera::Vec3;
use crate::error::{Error, Result};

use super::config::PlacementConfig;
use super::vocab::Environment;

const DEFAULT_WAYPOINTS: &str = include_str!("../../data/waypoints.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub id: String,
    pub position: Vec3,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WaypointGraph {
    pub nodes: Vec<Waypoint>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
}

impl WaypointGraph {
    pub fn get(&self, id: &str) -> Option<&Waypoint> {
        self.nodes.iter().find(|n| n.id == id)
    }

    fn validate(&self, what: &str) -> Result<()> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(Error::Config(format!("{what}: duplicate waypoint '{}'", n.id)));
            }
            if !n.position.iter().all(|x| x.is_finite()) {
                return Err(Error::Config(format!("{what}: waypoint '{}' is not finite", n.id)));
            }
        }
        for [a, b] in &self.edges {
            if !ids.contains(a.as_str()) || !ids.contains(b.as_str()) {
                return Err(Error::Config(format!(
                    "{what}: edge {a} - {b} references an unknown waypoint"
                )));
            }
        }
        Ok(())
    }
}

/// The protagonist graph and, for outdoor scenes, the background graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentGraphs {
    pub environment: Environment,
    pub protagonist: WaypointGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<WaypointGraph>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaypointAtlas {
    pub version: String,
    pub environments: Vec<EnvironmentGraphs>,
}

impl WaypointAtlas {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let atlas: WaypointAtlas = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
        atlas.validate()?;
        Ok(atlas)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn default_fixture() -> Self {
        Self::from_toml_str(DEFAULT_WAYPOINTS, Path::new("<builtin waypoints>")).expect("builtin waypoints are valid")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("atlas serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for g in &self.environments {
            let env = g.environment;
            if !seen.insert(env) {
                return Err(Error::Config(format!("waypoints for '{env}' listed twice")));
            }
            if g.protagonist.nodes.is_empty() {
                return Err(Error::Config(format!(
                    "environment '{env}' has an empty protagonist graph"
                )));
            }
            g.protagonist.validate(&format!("{env} protagonist graph"))?;
            if let Some(bg) = &g.background {
                if env.is_indoor() {
                    return Err(Error::Config(format!(
                        "indoor environment '{env}' cannot have background actors"
                    )));
                }
                if bg.nodes.len() < 2 {
                    return Err(Error::Config(format!(
                        "{env} background graph needs at least two waypoints"
                    )));
                }
                bg.validate(&format!("{env} background graph"))?;
            }
        }
        Ok(())
    }

    pub fn graphs(&self, env: Environment) -> Option<&EnvironmentGraphs> {
        self.environments.iter().find(|g| g.environment == env)
    }

    pub fn by_environment(&self) -> BTreeMap<Environment, &EnvironmentGraphs> {
        self.environments.iter().map(|g| (g.environment, g)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackgroundSpawn {
    pub start: String,
    pub destination: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenePlacement {
    pub waypoint: String,
    pub protagonist_xyz: Vec3,
    pub supporting_xyz: Vec<Vec3>,
    pub background_spawns: Vec<BackgroundSpawn>,
}

/// Pick the protagonist waypoint uniformly, ring the supporting characters
/// around it and spawn background pedestrians between distinct waypoints of
/// the background graph.
pub fn sample_placement<R: Rng + ?Sized>(
    rng: &mut R,
    env: Environment,
    supporting_characters: u32,
    atlas: &WaypointAtlas,
    config: &PlacementConfig,
) -> Result<ScenePlacement> {
    let graphs = atlas
        .graphs(env)
        .ok_or_else(|| Error::EmptySupport(format!("environment '{env}' has no waypoint graph")))?;
    let nodes = &graphs.protagonist.nodes;
    let wp = &nodes[rng.random_range(0..nodes.len())];
    let p = wp.position;
    let supporting_xyz = (0..supporting_characters)
        .map(|_| {
            let r = config.supporting_distance_m.sample(rng);
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            [p[0] + r * phi.cos(), p[1], p[2] + r * phi.sin()]
        })
        .collect();
    let mut background_spawns = Vec::new();
    if let (Some(bg), false) = (&graphs.background, env.is_indoor()) {
        let [lo, hi] = config.background_actors;
        let n = rng.random_range(lo..=hi);
        for _ in 0..n {
            let i = rng.random_range(0..bg.nodes.len());
            // destination uniform over the other waypoints
            let mut j = rng.random_range(0..bg.nodes.len() - 1);
            if j >= i {
                j += 1;
            }
            background_spawns.push(BackgroundSpawn {
                start: bg.nodes[i].id.clone(),
                destination: bg.nodes[j].id.clone(),
            });
        }
    }
    Ok(ScenePlacement {
        waypoint: wp.id.clone(),
        protagonist_xyz: p,
        supporting_xyz,
        background_spawns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPath;
    use crate::scenario::GeneratorConfig;

    #[test]
    fn fixture_covers_every_environment() {
        let atlas = WaypointAtlas::default_fixture();
        for env in Environment::ALL {
            let g = atlas.graphs(*env).unwrap();
            assert_eq!(g.background.is_none(), env.is_indoor());
        }
    }

    #[test]
    fn indoor_has_no_background_spawns() {
        let atlas = WaypointAtlas::default_fixture();
        let cfg = GeneratorConfig::default();
        let mut rng = SeedPath::root(3).stream();
        for _ in 0..500 {
            let p = sample_placement(&mut rng, Environment::House, 1, &atlas, &cfg.placement).unwrap();
            assert!(p.background_spawns.is_empty());
            assert_eq!(p.supporting_xyz.len(), 1);
        }
    }

    #[test]
    fn spawns_use_distinct_waypoints() {
        let atlas = WaypointAtlas::default_fixture();
        let cfg = GeneratorConfig::default();
        let mut rng = SeedPath::root(4).stream();
        for _ in 0..500 {
            let p = sample_placement(&mut rng, Environment::Urban, 0, &atlas, &cfg.placement).unwrap();
            assert!(p.background_spawns.iter().all(|s| s.start != s.destination));
        }
    }

    #[test]
    fn missing_environment_is_reported() {
        let atlas = WaypointAtlas {
            version: "t".into(),
            environments: vec![],
        };
        let cfg = GeneratorConfig::default();
        let mut rng = SeedPath::root(5).stream();
        let err = sample_placement(&mut rng, Environment::Lake, 0, &atlas, &cfg.placement).unwrap_err();
        assert!(err.to_string().contains("lake"));
    }
}
