//! Configuration-driven convergence run: reads a TOML configuration (or uses a built-in one)
//! and prints one table per conductivity ratio.
//!
//! ```text
//! cargo run --release --example config_run [config.toml]
//! ```

use ddr_interface::config::RunConfig;
use ddr_interface::study::run_convergence;

const BUILT_IN: &str = r#"
case = "generic"
[mesh]
family = "triangular"
levels = 3
refinements = [2]
[material]
ratios = [0.1, 10.0]
"#;

fn main() -> ddr_interface::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(p) => RunConfig::load(std::path::Path::new(&p))?,
        None => RunConfig::parse(BUILT_IN)?,
    };
    print!("{}", config.to_toml());
    for &m in &config.mesh.refinements {
        for &ratio in &config.material.ratios {
            let table = run_convergence(&config.scenario(ratio)?, &config.study_settings(m))?;
            println!("\nM = {m}, ratio {ratio:e}");
            print!("{}", table.to_csv());
        }
    }
    Ok(())
}
