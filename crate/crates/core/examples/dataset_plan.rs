//! Split a dataset budget over the action classes and summarize a sampled
//! subset of the plan.

use phavforge::scenario::Generator;
use phavforge::stats::aggregate_stats;

fn main() -> phavforge::Result<()> {
    let gen = Generator::with_defaults()?;
    let (per_class_min, total) = (1000, 39_982);
    let plan = gen.plan_dataset(per_class_min, total)?;
    for (name, n) in &plan {
        println!("{name:<22} {n}");
    }
    println!("mean per class {:.1}", total as f64 / plan.len() as f64);
    let actions = gen.planned_actions(per_class_min, total)?;
    let recipes = actions
        .iter()
        .enumerate()
        .step_by(40)
        .map(|(i, a)| gen.sample_recipe_for_action(9, i as u64, a))
        .collect::<phavforge::Result<Vec<_>>>()?;
    println!("\n{}", aggregate_stats(&recipes)?.report());
    Ok(())
}
