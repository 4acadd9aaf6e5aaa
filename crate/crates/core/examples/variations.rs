//! Draw one plan per variation mode for an action and render the
//! perturbation schedule of the first.

use phavforge::motion::{base_motion_distribution, MotionManifest, Taxonomy};
use phavforge::rng::SeedPath;
use phavforge::scenario::{GeneratorConfig, Variation};
use phavforge::variation::{render_schedule, sample_variation_plan, validate_plan};

fn main() -> phavforge::Result<()> {
    let config = GeneratorConfig::default();
    let manifest = MotionManifest::default_fixture();
    let taxonomy = Taxonomy::default_fixture();
    let action = taxonomy
        .actions
        .iter()
        .find(|a| a.name == "kick ball")
        .expect("kick ball");
    let theta_ab = phavforge::motion::build_theta_ab(&manifest, &taxonomy.actions)?;
    let dist = base_motion_distribution(action, &theta_ab, &manifest, config.t_min_s)?;
    let mut rng = SeedPath::root(5).child("variation", 0).stream();
    let base = &manifest.clips[*dist.sample(&mut rng)];
    println!(
        "base motion {} ({:.2}s): {}",
        base.id, base.duration_s, base.description
    );
    for mode in Variation::ALL {
        match sample_variation_plan(
            &mut rng,
            action,
            base,
            *mode,
            &manifest,
            config.t_min_s,
            &config.variation,
        ) {
            Ok(plan) => {
                println!("{mode}: muscles {:?}", plan.affected_muscles);
                assert!(validate_plan(&plan, action).is_empty());
                if *mode == Variation::RandomPerturbation {
                    let sched = render_schedule(&plan, 2.0);
                    sched.write_csv(std::io::stdout().lock()).expect("stdout");
                }
            }
            Err(e) => println!("{mode}: {e}"),
        }
    }
    Ok(())
}
