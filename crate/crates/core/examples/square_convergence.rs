//! Convergence of the lowest-order scheme across a square interface for a range of
//! conductivity contrasts.
//!
//! ```text
//! cargo run --release --example square_convergence [cartesian|perturbed]
//! ```

use ddr_interface::scenario::Scenario;
use ddr_interface::study::{run_convergence, MeshFamily, StudySettings};

fn main() -> ddr_interface::Result<()> {
    let family = match std::env::args().nth(1) {
        Some(name) => MeshFamily::parse(&name)?,
        None => MeshFamily::Cartesian,
    };
    let mut settings = StudySettings::new(family, vec![8, 16, 32, 64]);
    settings.seed = 7;
    for ratio in [1e-6, 1e-3, 1e3, 1e6] {
        let table = run_convergence(&Scenario::square(ratio)?, &settings)?;
        println!(
            "sigma_int / sigma_ext = {ratio:e} ({} meshes)",
            family.name()
        );
        print!("{}", table.to_csv());
        println!(
            "eta per level: {:?}\n",
            table.levels.iter().map(|l| l.eta).collect::<Vec<_>>()
        );
    }
    Ok(())
}
