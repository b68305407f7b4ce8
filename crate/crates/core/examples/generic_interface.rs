//! Three-lobed deformed circle on cut triangular meshes with interface refinement ratio 2.
//!
//! ```text
//! cargo run --release --example generic_interface [ratio]
//! ```

use ddr_interface::scenario::Scenario;
use ddr_interface::study::{run_convergence, MeshFamily, StudySettings};

fn main() -> ddr_interface::Result<()> {
    let ratio: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0.1);
    let mut settings = StudySettings::new(MeshFamily::Triangular, vec![8, 16, 32, 64]);
    settings.refinement = 2;
    let table = run_convergence(&Scenario::generic(ratio)?, &settings)?;
    print!("{}", table.to_csv());
    let orders = table.eoc_energy();
    println!("energy orders: {orders:.3?}");
    Ok(())
}
