//! Regenerate the committed motion manifest and waypoint graphs.
//!
//!     cargo run --example generate_fixtures

use std::path::Path;

use phavforge::fixtures;

fn main() -> std::io::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::write(data.join("manifest.toml"), fixtures::manifest_file_contents())?;
    std::fs::write(data.join("waypoints.toml"), fixtures::waypoints_file_contents())?;
    println!("wrote {}", data.display());
    Ok(())
}
