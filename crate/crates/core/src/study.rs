//! Error measurement against exact solutions and mesh-refinement convergence studies.

use crate::assembly::{default_eta, InterfaceWeights, StationaryProblem};
use crate::ddr::{build_local_operators, interpolate, DiscreteVector, LocalOperators};
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::mesh::{
    build_cartesian_mesh, build_split_triangular_mesh, cut_mesh, discretize_interface,
    perturb_vertices, CutOptions, FittedMesh,
};
use crate::norms::{
    energy_norm, jump_seminorm, l2_component_norm, reconstruction_l2_error, reconstruction_l2_norm,
};
use crate::scenario::Scenario;
use std::collections::HashSet;
use std::fmt::Write as _;

/// Perturbation radius of the perturbed family, relative to the cell side.
pub const PERTURBATION: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFamily {
    Cartesian,
    /// Cartesian mesh with interior vertices moved randomly off the interface.
    Perturbed,
    /// Cartesian cells split into two triangles.
    Triangular,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 3] = [
        MeshFamily::Cartesian,
        MeshFamily::Perturbed,
        MeshFamily::Triangular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Cartesian => "cartesian",
            MeshFamily::Perturbed => "perturbed",
            MeshFamily::Triangular => "triangular",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown mesh family `{s}`")))
    }
}

/// Background mesh with `n` cells per side on `[-1/2, 1/2]^2`, cut along the scenario interface
/// discretized with refinement ratio `refinement`.
pub fn build_scenario_mesh(
    scenario: &Scenario,
    family: MeshFamily,
    n: usize,
    refinement: u32,
    seed: u64,
) -> Result<FittedMesh> {
    let domain = BoundingBox::unit_centered();
    let background = match family {
        MeshFamily::Cartesian | MeshFamily::Perturbed => build_cartesian_mesh(n, domain)?,
        MeshFamily::Triangular => build_split_triangular_mesh(n, domain)?,
    };
    let chain = discretize_interface(
        scenario.interface().as_ref(),
        refinement,
        domain.width() / n as f64,
    )?;
    let mesh = cut_mesh(&background, &chain, CutOptions::default())?;
    match family {
        MeshFamily::Perturbed => perturb_vertices(&mesh, PERTURBATION, seed, &HashSet::new()),
        _ => Ok(mesh),
    }
}

/// Errors `u_h - I_h u` of one discrete solution.
///
/// Normalized values divide by the same norm of `u_h`; the jump error is normalized by the
/// energy norm of `u_h`, of which the jump seminorm is a part.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub ndof: usize,
    pub err_energy: f64,
    pub err_l2: f64,
    pub err_jump: f64,
    pub err_l2_component: f64,
    pub raw_energy: f64,
    pub raw_l2: f64,
    pub raw_jump: f64,
    pub raw_l2_component: f64,
    pub norm_energy: f64,
    pub norm_l2: f64,
    pub norm_l2_component: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        a
    }
}

pub fn compute_errors(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    weights: &InterfaceWeights,
    uh: &DiscreteVector,
    scenario: &Scenario,
) -> ErrorReport {
    let ih = interpolate(mesh, &ops.dofs, |r, p| scenario.exact(r, p));
    let diff = uh.sub(&ih);
    let raw_energy = energy_norm(mesh, ops, weights, &diff);
    let raw_jump = jump_seminorm(mesh, ops, weights, &diff);
    let raw_l2 = reconstruction_l2_error(mesh, ops, uh, |r, p| scenario.exact(r, p));
    let raw_l2_component = l2_component_norm(mesh, ops, &diff);
    let norm_energy = energy_norm(mesh, ops, weights, uh);
    let norm_l2 = reconstruction_l2_norm(mesh, ops, uh);
    let norm_l2_component = l2_component_norm(mesh, ops, uh);
    ErrorReport {
        h: mesh.h(),
        ndof: ops.dofs.len(),
        err_energy: ratio(raw_energy, norm_energy),
        err_l2: ratio(raw_l2, norm_l2),
        err_jump: ratio(raw_jump, norm_energy),
        err_l2_component: ratio(raw_l2_component, norm_l2_component),
        raw_energy,
        raw_l2,
        raw_jump,
        raw_l2_component,
        norm_energy,
        norm_l2,
        norm_l2_component,
    }
}

/// Orders `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` between consecutive entries.
pub fn eoc(h: &[f64], e: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(e.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_order(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Discretization settings shared by all levels of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct StudySettings {
    pub k: usize,
    pub family: MeshFamily,
    /// Cells per side of the background mesh, one entry per level.
    pub levels: Vec<usize>,
    pub refinement: u32,
    /// Penalty override; `None` selects the trace-inequality default.
    pub eta: Option<f64>,
    pub seed: u64,
}

impl StudySettings {
    pub fn new(family: MeshFamily, levels: Vec<usize>) -> Self {
        Self {
            k: 0,
            family,
            levels,
            refinement: 0,
            eta: None,
            seed: 0,
        }
    }
}

/// Outcome of one refinement level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub n: usize,
    pub elements: usize,
    pub eta: f64,
    pub min_area_ratio: f64,
    pub report: ErrorReport,
}

/// Discrete solution of a scenario on a given mesh.
pub struct Solution {
    pub problem: StationaryProblem,
    pub uh: DiscreteVector,
}

pub fn solve_scenario(
    mesh: &FittedMesh,
    scenario: &Scenario,
    k: usize,
    eta: Option<f64>,
) -> Result<Solution> {
    let ops = build_local_operators(mesh, k)?;
    let eta = match eta {
        Some(e) => e,
        None => default_eta(mesh, &ops),
    };
    let weights = InterfaceWeights::new(scenario.sigma_int, scenario.sigma_ext, eta)?;
    let problem = StationaryProblem::new(mesh, ops, weights)?;
    let uh = problem.solve(mesh, scenario)?;
    Ok(Solution { problem, uh })
}

pub fn run_level(
    scenario: &Scenario,
    settings: &StudySettings,
    level: usize,
) -> Result<LevelResult> {
    let n = settings.levels[level];
    let mesh = build_scenario_mesh(
        scenario,
        settings.family,
        n,
        settings.refinement,
        settings.seed,
    )?;
    let sol = solve_scenario(&mesh, scenario, settings.k, settings.eta)?;
    let p = &sol.problem;
    let report = compute_errors(&mesh, &p.ops, &p.weights, &sol.uh, scenario);
    Ok(LevelResult {
        level,
        n,
        elements: mesh.elements.len(),
        eta: p.weights.eta,
        min_area_ratio: mesh.diagnostics.min_area_ratio,
        report,
    })
}

/// Convergence table of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub levels: Vec<LevelResult>,
}

impl ConvergenceTable {
    fn column(&self, f: impl Fn(&ErrorReport) -> f64) -> Vec<f64> {
        self.levels.iter().map(|l| f(&l.report)).collect()
    }

    pub fn h(&self) -> Vec<f64> {
        self.column(|r| r.h)
    }

    pub fn eoc_energy(&self) -> Vec<f64> {
        eoc(&self.h(), &self.column(|r| r.err_energy))
    }

    pub fn eoc_l2(&self) -> Vec<f64> {
        eoc(&self.h(), &self.column(|r| r.err_l2))
    }

    pub fn eoc_jump(&self) -> Vec<f64> {
        eoc(&self.h(), &self.column(|r| r.err_jump))
    }

    /// `level,h,ndof,err_energy,eoc_energy,err_l2,eoc_l2,err_jump`; orders are empty on the
    /// first level.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,h,ndof,err_energy,eoc_energy,err_l2,eoc_l2,err_jump\n");
        let (ee, el) = (self.eoc_energy(), self.eoc_l2());
        for (i, l) in self.levels.iter().enumerate() {
            let r = &l.report;
            let fmt = |v: &[f64]| {
                if i == 0 {
                    String::new()
                } else {
                    format!("{:.4}", v[i - 1])
                }
            };
            writeln!(
                s,
                "{},{:.6e},{},{:.6e},{},{:.6e},{},{:.6e}",
                l.level,
                r.h,
                r.ndof,
                r.err_energy,
                fmt(&ee),
                r.err_l2,
                fmt(&el),
                r.err_jump
            )
            .unwrap();
        }
        s
    }
}

pub fn run_convergence(scenario: &Scenario, settings: &StudySettings) -> Result<ConvergenceTable> {
    if settings.levels.is_empty() {
        return Err(Error::InvalidInput("at least one level is required".into()));
    }
    let levels = (0..settings.levels.len())
        .map(|l| run_level(scenario, settings, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert!((eoc(&[0.1, 0.05], &[0.1, 0.05])[0] - 1.0).abs() < 1e-14);
        assert!((eoc(&[0.1, 0.05], &[0.01, 0.0025])[0] - 2.0).abs() < 1e-14);
        assert_eq!(eoc(&[0.1, 0.05], &[0.3, 0.3])[0], 0.0);
        assert!(eoc(&[0.1], &[0.3]).is_empty());
    }

    #[test]
    fn family_names() {
        for f in MeshFamily::ALL {
            assert_eq!(MeshFamily::parse(f.name()).unwrap(), f);
        }
        assert!(MeshFamily::parse("hex").is_err());
    }

    #[test]
    fn interpolant_has_zero_error() {
        let s = Scenario::square(0.1).unwrap();
        let mesh = build_scenario_mesh(&s, MeshFamily::Cartesian, 8, 0, 0).unwrap();
        let ops = build_local_operators(&mesh, 0).unwrap();
        let w = InterfaceWeights::new(s.sigma_int, s.sigma_ext, 1.0).unwrap();
        let ih = interpolate(&mesh, &ops.dofs, |r, p| s.exact(r, p));
        let rep = compute_errors(&mesh, &ops, &w, &ih, &s);
        assert_eq!((rep.raw_energy, rep.raw_jump), (0.0, 0.0));
    }

    #[test]
    fn patch_solution_is_exact() {
        for ratio in [1e-3, 1.0, 1e3] {
            let s = Scenario::patch(ratio, 1).unwrap();
            let t =
                run_convergence(&s, &StudySettings::new(MeshFamily::Cartesian, vec![8])).unwrap();
            assert!(
                t.levels[0].report.raw_energy < 1e-9,
                "{:?}",
                t.levels[0].report
            );
        }
        let s = Scenario::patch(0.5, 2).unwrap();
        let mut st = StudySettings::new(MeshFamily::Perturbed, vec![8]);
        st.k = 1;
        st.seed = 4;
        let t = run_convergence(&s, &st).unwrap();
        assert!(
            t.levels[0].report.raw_energy < 1e-9,
            "{:?}",
            t.levels[0].report
        );
    }

    #[test]
    fn csv_layout() {
        let s = Scenario::square(1.0).unwrap();
        let t =
            run_convergence(&s, &StudySettings::new(MeshFamily::Cartesian, vec![4, 8])).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "level,h,ndof,err_energy,eoc_energy,err_l2,eoc_l2,err_jump"
        );
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').nth(4), Some(""));
        assert!(!lines[2].split(',').nth(4).unwrap().is_empty());
    }
}
