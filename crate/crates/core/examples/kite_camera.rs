//! Simulate a kite camera following a walking protagonist and write the
//! trajectory to stdout as CSV.

use phavforge::camera::{sample_camera_params, simulate};
use phavforge::rng::SeedPath;
use phavforge::scenario::{CameraBehavior, GeneratorConfig};

fn main() -> phavforge::Result<()> {
    let config = GeneratorConfig::default();
    let mut rng = SeedPath::root(11).child("camera", 0).stream();
    let rig = sample_camera_params(&mut rng, CameraBehavior::Kite, &config.camera);
    eprintln!("{rig:#?}");
    // walk 1.2 m/s for 3 s, then stop
    let path = |t: f64| [1.2 * t.min(3.0), 0.0, 0.0];
    let traj = simulate(&rig, path, 8.0)?;
    eprintln!("final camera speed {:.5} m/s", traj.final_camera_speed());
    traj.write_csv(std::io::stdout().lock()).expect("stdout");
    Ok(())
}
