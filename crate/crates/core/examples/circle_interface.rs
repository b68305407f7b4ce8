//! Circular interface on cut triangular meshes, for several interface refinement ratios.
//!
//! ```text
//! cargo run --release --example circle_interface [ratio] [M...]
//! ```

use ddr_interface::scenario::Scenario;
use ddr_interface::study::{run_convergence, MeshFamily, StudySettings};

fn main() -> ddr_interface::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ratio: f64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let refinements: Vec<u32> = if args.len() > 1 {
        args[1..].iter().filter_map(|s| s.parse().ok()).collect()
    } else {
        vec![0, 1, 2, 4]
    };
    let scenario = Scenario::circle(ratio)?;
    for m in refinements {
        let mut settings = StudySettings::new(MeshFamily::Triangular, vec![8, 16, 32, 64]);
        settings.refinement = m;
        let table = run_convergence(&scenario, &settings)?;
        println!("M = {m}, sigma_int / sigma_ext = {ratio:e}");
        print!("{}", table.to_csv());
        for l in &table.levels {
            println!(
                "  level {}: {} elements, eta = {:.3e}, min area ratio = {:.2e}",
                l.level, l.elements, l.eta, l.min_area_ratio
            );
        }
        println!();
    }
    Ok(())
}
