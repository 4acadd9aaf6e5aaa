//! Sample a few recipes with the bundled fixtures and print them.
//!
//!     cargo run --example sample_recipes -- 42 3

use phavforge::recipe_io::serialize_recipe;
use phavforge::scenario::Generator;

fn main() -> phavforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let gen = Generator::with_defaults()?;
    for i in 0..count {
        let r = gen.sample_recipe(seed, i)?;
        println!(
            "#{i}: {} / {} in {} ({}, {} at {:.2}h), camera {}, variation {}, {:.2}s from {}",
            r.action,
            r.human_model,
            r.environment,
            r.weather,
            r.day_phase,
            r.clock_h,
            r.camera,
            r.variation,
            r.duration_s,
            r.base_motion
        );
        assert!(gen.validate_recipe(&r).is_empty());
    }
    let first = gen.sample_recipe(seed, 0)?;
    let text = String::from_utf8(serialize_recipe(&first)).expect("utf-8");
    println!("\n{}", text.lines().take(12).collect::<Vec<_>>().join("\n"));
    Ok(())
}
