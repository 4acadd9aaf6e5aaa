//! Histogram of sampled times of day per day phase.

use phavforge::distributions::triangular_sample_wrapped;
use phavforge::rng::SeedPath;
use phavforge::scenario::{DayPhase, GeneratorConfig, CLOCK_MODULUS_H};

fn main() -> phavforge::Result<()> {
    let config = GeneratorConfig::default();
    let mut rng = SeedPath::root(7).child("clock", 0).stream();
    for phase in DayPhase::ALL {
        let params = *config.clock.for_phase(*phase);
        let mut bins = [0u32; 24];
        for _ in 0..20_000 {
            let t = triangular_sample_wrapped(&mut rng, params, CLOCK_MODULUS_H)?;
            bins[t as usize % 24] += 1;
        }
        println!("{phase} ({}h .. {}h, mode {}h)", params.a, params.b, params.c);
        for (h, n) in bins.iter().enumerate().filter(|(_, n)| **n > 0) {
            println!("  {h:02}h {:<50} {n}", "#".repeat((*n / 100) as usize));
        }
    }
    Ok(())
}
