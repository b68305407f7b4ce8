//! Capacitive relaxation of the interface jump around a circular inclusion.
//!
//! Runs the mesh and time-step sequence (time step divided by 4 per level), prints the temporal
//! error norms with their orders, and the time series of the finest level.
//!
//! ```text
//! cargo run --release --example ldm_relaxation [levels] [steps0]
//! ```

use ddr_interface::ldm::{run_ldm_study, LdmStudySettings};
use ddr_interface::scenario::Scenario;

fn main() -> ddr_interface::Result<()> {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let mut settings = LdmStudySettings::default();
    if let Some(&l) = args.first() {
        settings.levels = (0..l).map(|i| 8 << i).collect();
    }
    if let Some(&n) = args.get(1) {
        settings.steps0 = n;
    }
    let scenario = Scenario::ldm_relaxation(0.1)?;
    println!(
        "t_c = {}, C = {:.6}",
        scenario.relaxation_time(),
        scenario.capacitance
    );
    let table = run_ldm_study(&scenario, &settings)?;
    print!("{}", table.to_csv());
    let finest = &table.levels.last().unwrap().run;
    println!(
        "\nfinest level time series (every {}th step)",
        finest.series.len() / 16
    );
    for s in finest
        .series
        .iter()
        .step_by((finest.series.len() / 16).max(1))
    {
        println!(
            "  t = {:.3}  energy {:.3e}  jump {:.3e}  interior field {:.3e}",
            s.t, s.err_energy, s.err_jump, s.flux_int
        );
    }
    Ok(())
}
