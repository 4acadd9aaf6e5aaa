//! Deterministic generators for the committed data fixtures: the synthetic
//! 862-clip motion manifest and the per-environment waypoint graphs.
//!
//! The files under `data/` are the output of these functions; a test checks
//! that they stay in sync.

use rand::Rng;

use crate::distributions::TriangularParams;
use crate::motion::{MotionClip, MotionManifest, MotionSource, ObjectWindow};
use crate::rng::SeedPath;
use crate::scenario::placement::{EnvironmentGraphs, Waypoint, WaypointAtlas, WaypointGraph};
use crate::scenario::Environment;

pub const FIXTURE_SEED: u64 = 2017;
pub const MOCAP_CLIPS: usize = 859;
pub const ARTIST_CLIPS: usize = 3;

/// (description, object label used for annotated windows)
const TEMPLATES: &[(&str, &str)] = &[
    ("brush hair with the left hand", "Hair Brush"),
    ("comb hair in front of a mirror", "Hair Brush"),
    ("catch a ball thrown from the side", "Ball"),
    ("clap hands while standing", "Ball"),
    ("applaud with arms raised", "Ball"),
    ("climb stairs at a steady pace", "Ball"),
    ("go up the stairs holding the rail", "Ball"),
    ("golf swing with a driver", "Golf Club"),
    ("jump forward with both feet", "Ball"),
    ("leap over an obstacle", "Ball"),
    ("kick the ball with the right foot", "Ball"),
    ("push a heavy box across the floor", "Ball"),
    ("pick up a box from the ground", "Ball"),
    ("pour water from a jug", "Ball"),
    ("pull ups on a horizontal bar", "Ball"),
    ("chin up with wide grip", "Ball"),
    ("subject runs forward", "Ball"),
    ("jog around in a circle", "Ball"),
    ("basketball free throw", "Ball"),
    ("shoot a bow at a target", "Bow"),
    ("aim a pistol and fire", "Gun"),
    ("hold a rifle at the shoulder", "Gun"),
    ("sit down on a chair", "Ball"),
    ("stand up from a chair", "Ball"),
    ("get up from the floor", "Ball"),
    ("swing a bat like a baseball hitter", "Baseball Bat"),
    ("throw a ball overhand", "Ball"),
    ("toss a small object", "Ball"),
    ("walk with arm swing", "Ball"),
    ("walk in a zigzag", "Ball"),
    ("wave hello with the right hand", "Ball"),
    ("crawl on hands and knees", "Ball"),
    ("dive to the floor", "Ball"),
    ("falls down after tripping", "Ball"),
    ("sprint away from a threat", "Ball"),
    ("hop on one foot", "Ball"),
    ("jump in place", "Ball"),
    ("leg split stretch", "Ball"),
    ("stretching legs on the ground", "Ball"),
    ("limp with an injured knee", "Ball"),
    ("walks slowly with a cane", "Ball"),
    ("moonwalk dance move", "Ball"),
    ("walk backwards carefully", "Ball"),
    ("stagger as if dizzy", "Ball"),
    ("stumble over a step", "Ball"),
    ("raise both hands in surrender", "Ball"),
    ("hands up facing a wall", "Ball"),
    ("hug a friend", "Ball"),
    ("two subjects holding hands", "Ball"),
    ("salsa dance steps", "Ball"),
    ("stretch arms overhead", "Ball"),
    ("look around idly", "Ball"),
];

const ADVERBS: &[&str] = &[
    "",
    " twice",
    " casually",
    " energetically",
    " with hesitation",
    " repeatedly",
];

const ARTIST: &[(&str, f64)] = &[
    ("walking hug between two people", 6.5),
    ("walk holding hands with a partner", 8.0),
    ("two people walk and bump into each other", 5.5),
];

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Clip lengths: about 8% of clips are shorter than a second, the rest are
/// `1 + Tr(0, 44, 6)` seconds.
fn sample_duration<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<f64>() < 0.08 {
        round2(0.3 + 0.65 * rng.random::<f64>())
    } else {
        let tr = TriangularParams {
            a: 0.0,
            b: 44.0,
            c: 6.0,
        };
        round2(1.0 + tr.sample(rng))
    }
}

fn sample_window<R: Rng + ?Sized>(rng: &mut R, duration_s: f64, object: &str) -> ObjectWindow {
    let start = round2(duration_s * 0.5 * rng.random::<f64>());
    let end = round2(start + (duration_s - start) * (0.2 + 0.8 * rng.random::<f64>())).min(duration_s);
    ObjectWindow {
        start_s: start,
        end_s: end.max(start),
        object: object.to_owned(),
    }
}

pub fn generate_manifest() -> MotionManifest {
    let mut rng = SeedPath::root(FIXTURE_SEED).child("manifest", 0).stream();
    let mut clips = Vec::with_capacity(MOCAP_CLIPS + ARTIST_CLIPS);
    let mut windows_per_template = vec![0usize; TEMPLATES.len()];
    for i in 0..MOCAP_CLIPS {
        let t = i % TEMPLATES.len();
        let (desc, object) = TEMPLATES[t];
        let adverb = ADVERBS[rng.random_range(0..ADVERBS.len())];
        let mut duration_s = sample_duration(&mut rng);
        // the first two clips of every template carry object windows and
        // are long enough to serve as base motions
        let forced = windows_per_template[t] < 2;
        if forced {
            duration_s = duration_s.max(2.0);
        }
        let annotate = forced || rng.random::<f64>() < 0.15;
        let object_windows = if annotate {
            windows_per_template[t] += 1;
            vec![sample_window(&mut rng, duration_s, object)]
        } else {
            Vec::new()
        };
        let id = format!("mocap_{:04}", i + 1);
        clips.push(MotionClip {
            muscle_track_ids: MotionClip::default_track_ids(&id),
            id,
            source: MotionSource::Mocap,
            description: format!("{desc}{adverb}"),
            duration_s,
            object_windows,
        });
    }
    for (k, (desc, dur)) in ARTIST.iter().enumerate() {
        let id = format!("artist_{:02}", k + 1);
        clips.push(MotionClip {
            muscle_track_ids: MotionClip::default_track_ids(&id),
            id,
            source: MotionSource::Artist,
            description: (*desc).to_owned(),
            duration_s: *dur,
            object_windows: vec![ObjectWindow {
                start_s: 1.0,
                end_s: dur - 1.0,
                object: "Ball".into(),
            }],
        });
    }
    MotionManifest {
        version: "phav-manifest/1".into(),
        clips,
    }
}

fn graph<R: Rng + ?Sized>(rng: &mut R, prefix: &str, n: usize, spacing: f64) -> WaypointGraph {
    let cols = (n as f64).sqrt().ceil() as usize;
    let nodes: Vec<Waypoint> = (0..n)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            let jitter = |rng: &mut R| spacing * 0.3 * (2.0 * rng.random::<f64>() - 1.0);
            Waypoint {
                id: format!("{prefix}{i:02}"),
                position: [
                    round2(c as f64 * spacing + jitter(rng)),
                    0.0,
                    round2(r as f64 * spacing + jitter(rng)),
                ],
            }
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        if (i + 1) % cols != 0 && i + 1 < n {
            edges.push([nodes[i].id.clone(), nodes[i + 1].id.clone()]);
        }
        if i + cols < n {
            edges.push([nodes[i].id.clone(), nodes[i + cols].id.clone()]);
        }
    }
    WaypointGraph { nodes, edges }
}

pub fn generate_waypoints() -> WaypointAtlas {
    let mut environments = Vec::new();
    for (k, env) in Environment::ALL.iter().enumerate() {
        let mut rng = SeedPath::root(FIXTURE_SEED).child("waypoints", k as u64).stream();
        let (n, spacing) = if env.is_indoor() { (8, 2.5) } else { (12, 8.0) };
        let protagonist = graph(&mut rng, "p", n, spacing);
        let background = (!env.is_indoor()).then(|| graph(&mut rng, "b", 10, 15.0));
        environments.push(EnvironmentGraphs {
            environment: *env,
            protagonist,
            background,
        });
    }
    WaypointAtlas {
        version: "phav-waypoints/1".into(),
        environments,
    }
}

const MANIFEST_HEADER: &str = "# Synthetic motion library: 859 motion-capture clips and 3 artist clips.\n\
# Generated by `cargo run --example generate_fixtures`; do not edit by hand.\n\
# Muscle track ids default to \"<id>/<muscle>\" when omitted.\n\n";

const WAYPOINTS_HEADER: &str = "# Waypoint graphs per environment. Indoor scenes have no background graph.\n\
# Generated by `cargo run --example generate_fixtures`; do not edit by hand.\n\n";

pub fn manifest_file_contents() -> String {
    format!("{MANIFEST_HEADER}{}", generate_manifest().to_toml_string())
}

pub fn waypoints_file_contents() -> String {
    format!("{WAYPOINTS_HEADER}{}", generate_waypoints().to_toml_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_fixtures_are_current() {
        let manifest = include_str!("../data/manifest.toml");
        let waypoints = include_str!("../data/waypoints.toml");
        assert!(manifest == manifest_file_contents(), "regenerate data/manifest.toml");
        assert!(waypoints == waypoints_file_contents(), "regenerate data/waypoints.toml");
    }

    #[test]
    fn manifest_shape() {
        let m = generate_manifest();
        assert_eq!(m.clips.len(), 862);
        m.validate().unwrap();
        let short = m.clips.iter().filter(|c| c.duration_s < 1.0).count();
        assert!(short > 30 && short < 120, "{short}");
    }
}
