//! Depth and flow 16-bit codes, and semantic palette lookups.

use phavforge::codec::{depth_decode, depth_encode, flow_decode, flow_encode, flow_step_px};
use phavforge::palette::SemanticPalette;

fn main() -> phavforge::Result<()> {
    for d in [0.0, 0.01, 1.234, 100.0, 655.35, 800.0] {
        let code = depth_encode(d)?;
        println!("depth {d:>7} m -> {code:>5} -> {} m", depth_decode(code));
    }
    let width = 340;
    println!("flow step at {width}px: {:.6} px", flow_step_px(width));
    for u in [-340.0, -12.5, 0.0, 3.3, 340.0] {
        let code = flow_encode(u, width)?;
        println!("flow {u:>7} px -> {code:>5} -> {:.4} px", flow_decode(code, width)?);
    }
    let palette = SemanticPalette::default();
    println!("{} classes, {} human", palette.len(), palette.human_count());
    for class in ["Road", "Head", "Sky", "Car"] {
        let rgb = palette.lookup(class)?;
        println!("{class:<5} {rgb:?} -> {}", palette.inverse(rgb)?);
    }
    Ok(())
}
