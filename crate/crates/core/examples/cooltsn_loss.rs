//! Two-head loss on a toy consensus and a mini-batch layout.

use phavforge::cooltsn::{
    build_minibatch_plan, multitask_loss, multitask_loss_gradient, segmental_consensus, ClassSpace, HeadWeights,
    LossInput, Source,
};
use phavforge::rng::SeedPath;

fn main() -> phavforge::Result<()> {
    let classes = ClassSpace::new(4, 3);
    let snippets = vec![
        vec![0.2, 1.5, -0.3, 0.0, 2.0, 0.1, -1.0],
        vec![0.1, 2.5, -0.1, 0.3, 1.0, 0.4, -0.5],
        vec![0.0, 2.0, 0.2, 0.1, 1.5, 0.0, -0.8],
    ];
    let consensus = segmental_consensus(&snippets)?;
    for (source, label) in [(Source::Real, 1), (Source::Virtual, 0)] {
        let input = LossInput {
            consensus: consensus.clone(),
            label,
            source,
            classes,
            weights: HeadWeights::default(),
        };
        println!("{source:?} label {label}: loss {:.5}", multitask_loss(&input)?);
        println!("  gradient {:?}", multitask_loss_gradient(&input)?);
    }
    let mut rng = SeedPath::root(3).stream();
    let plan = build_minibatch_plan(&mut rng, 9537, 6000)?;
    for (i, b) in plan.blocks.iter().enumerate() {
        println!("block {i}: {} real, {} synthetic", b.real.len(), b.synthetic.len());
    }
    Ok(())
}
