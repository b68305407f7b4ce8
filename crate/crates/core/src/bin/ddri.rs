//! Command-line driver: convergence studies, relaxation runs, single solves and mesh tools.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 solver failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddr_interface::assembly::vector_to_matrix_market;
use ddr_interface::config::{Eta, RunConfig};
use ddr_interface::ddr::interpolate;
use ddr_interface::geometry::BoundingBox;
use ddr_interface::ldm::{nodal_values, run_ldm, LdmLevel, LdmTable};
use ddr_interface::mesh::{
    build_cartesian_mesh, build_split_triangular_mesh, cut_mesh, discretize_interface,
    perturb_vertices, read_polymesh, write_polymesh, CutOptions, FittedMesh, Region,
};
use ddr_interface::scenario::Case;
use ddr_interface::study::{
    build_scenario_mesh, compute_errors, fitted_order, run_convergence, solve_scenario, MeshFamily,
    PERTURBATION,
};
use ddr_interface::{Error, Result};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ddri",
    version,
    about = "Discrete de Rham solver for elliptic interface problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study over mesh levels, one table per conductivity ratio and refinement ratio.
    Converge(RunArgs),
    /// Relaxation of the interface jump with explicit Euler over a mesh and time-step sequence.
    Ldm(RunArgs),
    /// Single solve on one mesh level, with error report and solution dump.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Level index to solve on.
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Mesh generation, cutting and inspection.
    #[command(subcommand)]
    Mesh(MeshCommand),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Configuration file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_case)]
    case: Option<Case>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = parse_family)]
    family: Option<MeshFamily>,
    /// Background cells per side on level 0.
    #[arg(long)]
    base: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    /// Interface refinement ratios M.
    #[arg(long, value_delimiter = ',')]
    refinements: Option<Vec<u32>>,
    #[arg(long)]
    sigma_ext: Option<f64>,
    /// Conductivity ratios sigma_int / sigma_ext.
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long)]
    patch_degree: Option<usize>,
    /// Penalty parameter, or `auto`.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    t_c: Option<f64>,
    #[arg(long)]
    capacitance: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Time steps on level 0 (multiplied by 4 per level).
    #[arg(long)]
    steps0: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the system matrix and right-hand side in Matrix Market format.
    #[arg(long)]
    matrix_market: bool,
    /// Write per-step solution snapshots (ldm).
    #[arg(long)]
    snapshots: bool,
    /// Print the planned runs without solving.
    #[arg(long)]
    dry_run: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Background mesh of the unit box centered at the origin.
    Generate {
        #[arg(long, value_enum, default_value_t = Background::Cartesian)]
        kind: Background,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Perturb interior vertices with this seed (cartesian only).
        #[arg(long)]
        perturb_seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cuts a mesh file along the interface of a case.
    Cut {
        input: PathBuf,
        #[arg(long, value_parser = parse_case, default_value = "circle")]
        case: Case,
        #[arg(long, default_value_t = 0)]
        refinement: u32,
        /// Background spacing; defaults to the mean boundary edge length.
        #[arg(long)]
        spacing: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prints counts, quality and interface statistics of a mesh file.
    Inspect { input: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Background {
    Cartesian,
    Triangular,
}

fn parse_case(s: &str) -> std::result::Result<Case, String> {
    Case::parse(s).map_err(|e| e.to_string())
}

fn parse_family(s: &str) -> std::result::Result<MeshFamily, String> {
    MeshFamily::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidInput(_) | Error::Parse { .. } => 2,
        _ => 3,
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Converge(a) => with_config(&a, RunConfig::default(), |c| converge(c, a.dry_run)),
        Command::Ldm(a) => with_config(&a, RunConfig::ldm_default(), |c| ldm(c, a.dry_run)),
        Command::Solve { run, level } => {
            with_config(&run, RunConfig::default(), |c| solve(c, level, run.dry_run))
        }
        Command::Mesh(m) => mesh(m),
    }
}

fn with_config(
    a: &RunArgs,
    base: RunConfig,
    f: impl FnOnce(&RunConfig) -> Result<()>,
) -> Result<()> {
    let c = effective_config(a, base)?;
    if a.print_config {
        print!("{}", c.to_toml());
        return Ok(());
    }
    f(&c)
}

fn effective_config(a: &RunArgs, base: RunConfig) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => base,
    };
    macro_rules! set {
        ($src:expr => $dst:expr) => {
            if let Some(v) = $src.clone() {
                $dst = v;
            }
        };
    }
    set!(a.case => c.case);
    set!(a.k => c.k);
    set!(a.family => c.mesh.family);
    set!(a.base => c.mesh.base);
    set!(a.levels => c.mesh.levels);
    set!(a.refinements => c.mesh.refinements);
    set!(a.sigma_ext => c.material.sigma_ext);
    set!(a.ratios => c.material.ratios);
    set!(a.patch_degree => c.material.patch_degree);
    set!(a.t_c => c.ldm.t_c);
    set!(a.t_final => c.ldm.t_final);
    set!(a.steps0 => c.ldm.steps0);
    set!(a.seed => c.seed);
    set!(a.out => c.output.dir);
    if a.capacitance.is_some() {
        c.ldm.capacitance = a.capacitance;
    }
    if let Some(e) = &a.eta {
        c.penalty.eta = match e.as_str() {
            "auto" => Eta::Auto,
            v => Eta::Value(v.parse().map_err(|_| {
                Error::Config(format!("eta must be `auto` or a number, got `{v}`"))
            })?),
        };
    }
    c.output.matrix_market |= a.matrix_market;
    c.output.snapshots |= a.snapshots;
    c.validate()?;
    Ok(c)
}

/// Writes `contents` through a temporary file renamed into place.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn tag(c: &RunConfig, refinement: u32, ratio: f64) -> String {
    format!(
        "{}_{}_k{}_M{}_ratio{:e}",
        c.case.name(),
        c.mesh.family.name(),
        c.k,
        refinement,
        ratio
    )
}

fn gnuplot_stub(csv: &str, x: usize, ys: &[(usize, &str)]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset logscale xy\nset key left top\nset xlabel 'h'\nplot \\\n",
    );
    let lines: Vec<String> = ys
        .iter()
        .map(|(col, title)| {
            format!("  '{csv}' every ::1 using {x}:{col} with linespoints title '{title}'")
        })
        .collect();
    s.push_str(&lines.join(", \\\n"));
    s.push_str("\npause -1\n");
    s
}

fn converge(c: &RunConfig, dry_run: bool) -> Result<()> {
    for &m in &c.mesh.refinements {
        for &ratio in &c.material.ratios {
            let name = tag(c, m, ratio);
            if dry_run {
                println!("{name}: levels {:?}", c.level_sizes());
                continue;
            }
            let scenario = c.scenario(ratio)?;
            let table = run_convergence(&scenario, &c.study_settings(m))?;
            let csv_name = format!("{name}.csv");
            write_atomic(&c.output.dir.join(&csv_name), &table.to_csv())?;
            write_atomic(
                &c.output.dir.join(format!("{name}.gp")),
                &gnuplot_stub(&csv_name, 2, &[(4, "energy"), (6, "L2"), (8, "jump")]),
            )?;
            let eoc = table.eoc_energy();
            let fit = fitted_order(
                &table.h(),
                &table
                    .levels
                    .iter()
                    .map(|l| l.report.err_energy)
                    .collect::<Vec<_>>(),
            );
            println!(
                "{name}: finest energy error {:.3e}, per-step EOC {}, fitted {:.3}",
                table.levels.last().unwrap().report.err_energy,
                format_orders(&eoc),
                fit
            );
        }
    }
    Ok(())
}

fn format_orders(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

fn ldm(c: &RunConfig, dry_run: bool) -> Result<()> {
    if c.case != Case::LdmRelaxation {
        return Err(Error::Config(format!(
            "the ldm command needs case ldm-relaxation, got {}",
            c.case.name()
        )));
    }
    for &m in &c.mesh.refinements {
        for &ratio in &c.material.ratios {
            let settings = c.ldm_settings(m);
            let name = tag(c, m, ratio);
            if dry_run {
                for (l, n) in settings.levels.iter().enumerate() {
                    println!(
                        "{name}: level {l} n={n} steps={} tau={:e}",
                        settings.steps(l),
                        settings.tau(l)
                    );
                }
                continue;
            }
            let scenario = c.scenario(ratio)?;
            let mut levels = Vec::new();
            for (l, &n) in settings.levels.iter().enumerate() {
                let mesh = build_scenario_mesh(&scenario, settings.family, n, m, settings.seed)?;
                let snap_dir = c
                    .output
                    .dir
                    .join(format!("{name}_snapshots"))
                    .join(format!("level{l}"));
                let mut failure = None;
                let run = run_ldm(
                    &scenario,
                    &mesh,
                    c.k,
                    settings.steps(l),
                    settings.tau(l),
                    settings.eta,
                    |step, ops, u| {
                        if c.output.snapshots && failure.is_none() {
                            let nodal = nodal_values(&mesh, &ops.dofs, u);
                            let path = snap_dir.join(format!("step{step:05}.mesh"));
                            if let Err(e) =
                                write_atomic(&path, &write_polymesh(&mesh, Some(&nodal)))
                            {
                                failure = Some(e);
                            }
                        }
                    },
                )?;
                if let Some(e) = failure {
                    return Err(e);
                }
                let series = format!("{name}_level{l}.csv");
                write_atomic(&c.output.dir.join(&series), &run.to_csv())?;
                println!(
                    "{name}: level {l} n={n} steps={} energy {:.3e} jump {:.3e}",
                    settings.steps(l),
                    run.temporal_energy,
                    run.temporal_jump
                );
                levels.push(LdmLevel {
                    level: l,
                    n,
                    steps: settings.steps(l),
                    run,
                });
            }
            let table = LdmTable { levels };
            let csv_name = format!("{name}.csv");
            write_atomic(&c.output.dir.join(&csv_name), &table.to_csv())?;
            write_atomic(
                &c.output.dir.join(format!("{name}.gp")),
                &gnuplot_stub(&csv_name, 2, &[(6, "energy"), (8, "jump")]),
            )?;
            println!(
                "{name}: energy EOC {}, jump EOC {}",
                format_orders(&table.eoc_energy()),
                format_orders(&table.eoc_jump())
            );
        }
    }
    Ok(())
}

fn solve(c: &RunConfig, level: usize, dry_run: bool) -> Result<()> {
    let sizes = c.level_sizes();
    let n = *sizes.get(level).ok_or_else(|| {
        Error::Config(format!(
            "level {level} out of range (levels = {})",
            sizes.len()
        ))
    })?;
    let m = c.mesh.refinements[0];
    let ratio = c.material.ratios[0];
    let name = format!("{}_n{n}", tag(c, m, ratio));
    if dry_run {
        println!(
            "{name}: family {} n={n} M={m} ratio={ratio:e}",
            c.mesh.family.name()
        );
        return Ok(());
    }
    let scenario = c.scenario(ratio)?;
    let mesh = build_scenario_mesh(&scenario, c.mesh.family, n, m, c.seed)?;
    let sol = solve_scenario(&mesh, &scenario, c.k, c.penalty.eta.value())?;
    let p = &sol.problem;
    let r = compute_errors(&mesh, &p.ops, &p.weights, &sol.uh, &scenario);
    println!(
        "elements {} dofs {} eta {:.4}",
        mesh.elements.len(),
        r.ndof,
        p.weights.eta
    );
    println!(
        "energy error {:.6e} (relative {:.6e})",
        r.raw_energy, r.err_energy
    );
    println!("L2 error     {:.6e} (relative {:.6e})", r.raw_l2, r.err_l2);
    println!(
        "jump error   {:.6e} (relative {:.6e})",
        r.raw_jump, r.err_jump
    );
    let nodal = nodal_values(&mesh, p.dofs(), &sol.uh);
    write_atomic(
        &c.output.dir.join(format!("{name}.mesh")),
        &write_polymesh(&mesh, Some(&nodal)),
    )?;
    let exact = interpolate(&mesh, p.dofs(), |reg, x| scenario.exact(reg, x));
    let exact_nodal = nodal_values(&mesh, p.dofs(), &exact);
    write_atomic(
        &c.output.dir.join(format!("{name}_exact.mesh")),
        &write_polymesh(&mesh, Some(&exact_nodal)),
    )?;
    if c.output.matrix_market {
        let b = p.rhs(&mesh, &scenario);
        write_atomic(
            &c.output.dir.join(format!("{name}_A.mtx")),
            &p.matrix.to_matrix_market(),
        )?;
        write_atomic(
            &c.output.dir.join(format!("{name}_b.mtx")),
            &vector_to_matrix_market(&b),
        )?;
    }
    if c.case == Case::Patch && r.raw_energy > 1e-9 {
        return Err(Error::SolveFailure {
            reason: "patch test is not reproduced exactly".into(),
            residual: r.raw_energy,
        });
    }
    Ok(())
}

fn read_mesh(path: &Path) -> Result<FittedMesh> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(read_polymesh(&text)?.0)
}

fn mesh(cmd: MeshCommand) -> Result<()> {
    match cmd {
        MeshCommand::Generate {
            kind,
            n,
            perturb_seed,
            out,
        } => {
            let domain = BoundingBox::unit_centered();
            let mut m = match kind {
                Background::Cartesian => build_cartesian_mesh(n, domain)?,
                Background::Triangular => build_split_triangular_mesh(n, domain)?,
            };
            if let Some(seed) = perturb_seed {
                m = perturb_vertices(&m, PERTURBATION, seed, &HashSet::new())?;
            }
            write_atomic(&out, &write_polymesh(&m, None))?;
            println!("wrote {} elements to {}", m.elements.len(), out.display());
        }
        MeshCommand::Cut {
            input,
            case,
            refinement,
            spacing,
            out,
        } => {
            let background = read_mesh(&input)?;
            let spacing = spacing.unwrap_or_else(|| {
                let total: f64 = background
                    .boundary_edges
                    .iter()
                    .map(|&e| background.edges[e].length)
                    .sum();
                total / background.boundary_edges.len().max(1) as f64
            });
            let scenario = ddr_interface::scenario::Scenario::new(case, 1.0)?;
            let chain = discretize_interface(scenario.interface().as_ref(), refinement, spacing)?;
            let m = cut_mesh(&background, &chain, CutOptions::default())?;
            write_atomic(&out, &write_polymesh(&m, None))?;
            println!(
                "wrote {} elements ({} interface edges) to {}",
                m.elements.len(),
                m.interface_edges.len(),
                out.display()
            );
        }
        MeshCommand::Inspect { input } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
            let (m, nodal) = read_polymesh(&text)?;
            let count = |r: Region| m.elements.iter().filter(|e| e.region == r).count();
            println!("vertices           {}", m.vertices.len());
            println!("edges              {}", m.edges.len());
            println!(
                "elements           {} (int {}, ext {})",
                m.elements.len(),
                count(Region::Int),
                count(Region::Ext)
            );
            println!("interface edges    {}", m.interface_edges.len());
            println!("boundary edges     {}", m.boundary_edges.len());
            println!("mesh size h        {:.6e}", m.h());
            println!("total area         {:.15}", m.total_area());
            println!("min area / h_T^2   {:.3e}", m.diagnostics.min_area_ratio);
            println!(
                "degenerate cells   {}",
                m.diagnostics.degenerate_cells.len()
            );
            println!(
                "max vertices/cell  {}",
                m.elements
                    .iter()
                    .map(|e| e.vertices.len())
                    .max()
                    .unwrap_or(0)
            );
            if let Some(v) = nodal {
                println!("nodal values       {}", v.len());
            }
            match m.check_invariants(1e-12) {
                Ok(()) => println!("invariants         ok"),
                Err(e) => println!("invariants         {e}"),
            }
        }
    }
    Ok(())
}
