//! Evolving potential jump of the leaky dielectric model: a nodal jump on the interface chain
//! advanced by explicit Euler, coupled to the stationary interface problem.

use crate::assembly::{
    default_eta, edge_trace_ops, InterfaceWeights, ProblemData, ReducedSystem, SparseMatrix,
    StationaryProblem,
};
use crate::ddr::{build_local_operators, interpolate, DiscreteVector, DofMap, LocalOperators};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{FittedMesh, NodalValues, Region};
use crate::norms::energy_norm;
use crate::scenario::Scenario;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Blow-up threshold of the jump relative to the equilibrium amplitude.
pub const INSTABILITY_FACTOR: f64 = 1e3;

/// Nodal values on the interface vertices, in the order of `FittedMesh::interface_loop`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceJumpVector(pub Vec<f64>);

impl InterfaceJumpVector {
    pub fn zeros(mesh: &FittedMesh) -> Self {
        Self(vec![0.0; mesh.interface_loop.len()])
    }

    pub fn from_fn(mesh: &FittedMesh, f: impl Fn(Point) -> f64) -> Self {
        Self(
            mesh.interface_loop
                .iter()
                .map(|&v| f(mesh.vertices[v]))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Position of each interface vertex in `interface_loop`.
pub fn interface_positions(mesh: &FittedMesh) -> HashMap<usize, usize> {
    mesh.interface_loop
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect()
}

/// `M[V, W] = sum_E int_E phi_V phi_W` for the continuous piecewise affine hat functions on
/// the chain.
pub fn interface_mass_matrix(mesh: &FittedMesh) -> SparseMatrix {
    let pos = interface_positions(mesh);
    let mut trip = Vec::with_capacity(4 * mesh.interface_edges.len());
    for ie in &mesh.interface_edges {
        let e = &mesh.edges[ie.edge];
        let (a, b) = (pos[&e.vertices[0]], pos[&e.vertices[1]]);
        let l = e.length;
        trip.extend([
            (a, a, l / 3.0),
            (b, b, l / 3.0),
            (a, b, l / 6.0),
            (b, a, l / 6.0),
        ]);
    }
    let n = mesh.interface_loop.len();
    SparseMatrix::from_triplets(n, n, trip)
}

/// `r[V] = sum_E int_E {sigma G u}.n_E phi_V`.
pub fn jump_rhs(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
    u: &DiscreteVector,
) -> Vec<f64> {
    let pos = interface_positions(mesh);
    let mut r = vec![0.0; mesh.interface_loop.len()];
    for ie in &mesh.interface_edges {
        let tr = edge_trace_ops(mesh, ops, ie);
        let e = &mesh.edges[ie.edge];
        let (a, b) = (pos[&e.vertices[0]], pos[&e.vertices[1]]);
        let loc = u.local(&tr.dofs);
        let rule = tr.rule();
        for (q, (x, wq)) in rule.rule.iter().enumerate() {
            let t = rule.params[q];
            let flux = crate::linalg::dot(&tr.flux_average_row(x, w), &loc);
            r[a] += wq * flux * 0.5 * (1.0 - t);
            r[b] += wq * flux * 0.5 * (1.0 + t);
        }
    }
    r
}

/// Value at `x` of the affine interpolant of `j` on interface edge `edge`.
pub fn jump_on_edge(
    mesh: &FittedMesh,
    pos: &HashMap<usize, usize>,
    j: &InterfaceJumpVector,
    edge: usize,
    x: Point,
) -> f64 {
    let [va, vb] = mesh.edges[edge].vertices;
    let (a, b) = (mesh.vertices[va], mesh.vertices[vb]);
    let d = b - a;
    let s = ((x - a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    (1.0 - s) * j.0[pos[&va]] + s * j.0[pos[&vb]]
}

/// `||p(j) - g||_{0,Gamma,h}` with `p(j)` the affine chain function of `j`.
pub fn chain_l2_distance(
    mesh: &FittedMesh,
    j: &InterfaceJumpVector,
    g: impl Fn(Point) -> f64,
) -> f64 {
    let pos = interface_positions(mesh);
    let mut s = 0.0;
    for ie in &mesh.interface_edges {
        let (a, b) = mesh.edge_endpoints(ie.edge);
        for (x, w) in crate::polyquad::edge_quadrature(a, b, 6).rule.iter() {
            s += w * (jump_on_edge(mesh, &pos, j, ie.edge, x) - g(x)).powi(2);
        }
    }
    s.sqrt()
}

/// Explicit Euler update `J^{n+1} = J^n - (tau / C) M^{-1} r`.
pub struct JumpIntegrator {
    mass: ReducedSystem,
    pub capacitance: f64,
    pub tau: f64,
}

impl JumpIntegrator {
    pub fn new(mesh: &FittedMesh, capacitance: f64, tau: f64) -> Result<Self> {
        if !(capacitance > 0.0 && tau > 0.0) {
            return Err(Error::InvalidInput(
                "capacitance and time step must be positive".into(),
            ));
        }
        Ok(Self {
            mass: ReducedSystem::new(&interface_mass_matrix(mesh), &[])?,
            capacitance,
            tau,
        })
    }

    pub fn advance(&self, j: &InterfaceJumpVector, r: &[f64]) -> Result<InterfaceJumpVector> {
        let dj = self.mass.solve(r, &[])?;
        let c = self.tau / self.capacitance;
        Ok(InterfaceJumpVector(
            j.0.iter().zip(&dj.0).map(|(a, d)| a - c * d).collect(),
        ))
    }
}

/// Stationary data with a nodal jump, no flux jump, no source, and boundary data from the
/// relaxation solution at the current time.
struct StepData<'a> {
    mesh: &'a FittedMesh,
    pos: &'a HashMap<usize, usize>,
    jump: &'a InterfaceJumpVector,
    exact: Scenario,
}

impl ProblemData for StepData<'_> {
    fn source(&self, _: Region, _: Point) -> f64 {
        0.0
    }

    fn jump(&self, edge: usize, x: Point) -> f64 {
        jump_on_edge(self.mesh, self.pos, self.jump, edge, x)
    }

    fn flux_jump(&self, _: usize, _: Point, _: Point) -> f64 {
        0.0
    }

    fn dirichlet(&self, x: Point) -> f64 {
        self.exact.dirichlet(x)
    }
}

/// One record of the time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LdmStep {
    pub step: usize,
    pub t: f64,
    pub err_energy: f64,
    pub err_jump: f64,
    /// `||G_h u||` over the interior region.
    pub flux_int: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdmRun {
    pub tau: f64,
    pub h: f64,
    pub ndof: usize,
    pub series: Vec<LdmStep>,
    pub final_jump: InterfaceJumpVector,
    /// `(tau sum_{n >= 1} err_energy_n^2)^{1/2}`.
    pub temporal_energy: f64,
    /// `(tau sum_{n >= 1} err_jump_n^2)^{1/2}`.
    pub temporal_jump: f64,
}

impl LdmRun {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,t,err_energy,err_jump,flux_int\n");
        for r in &self.series {
            writeln!(
                s,
                "{},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.step, r.t, r.err_energy, r.err_jump, r.flux_int
            )
            .unwrap();
        }
        s
    }
}

/// Per-vertex values of `u` on both sides, for snapshots in the mesh text format.
pub fn nodal_values(mesh: &FittedMesh, dofs: &DofMap, u: &DiscreteVector) -> NodalValues {
    let mut out = Vec::new();
    for r in Region::ALL {
        for v in 0..mesh.vertices.len() {
            if let Some(i) = dofs.vertex_dof(r, v) {
                out.push((r, v, u.0[i]));
            }
        }
    }
    out
}

fn interior_gradient_norm(mesh: &FittedMesh, ops: &LocalOperators, u: &DiscreteVector) -> f64 {
    let mut s = 0.0;
    for (t, op) in ops.elements.iter().enumerate() {
        if mesh.elements[t].region != Region::Int {
            continue;
        }
        let loc = u.local(&ops.local_dofs(mesh, t));
        for (x, w) in op.quad.iter() {
            let g = op.gradient_at(&loc, x);
            s += w * g.dot(g);
        }
    }
    s.sqrt()
}

/// Runs `steps` explicit Euler steps of size `tau` from a zero jump.
///
/// Each step solves the stationary problem with the current jump, records errors against the
/// relaxation solution at `t_n`, then advances the jump. `snapshot` receives every solution.
pub fn run_ldm(
    scenario: &Scenario,
    mesh: &FittedMesh,
    k: usize,
    steps: usize,
    tau: f64,
    eta: Option<f64>,
    mut snapshot: impl FnMut(usize, &LocalOperators, &DiscreteVector),
) -> Result<LdmRun> {
    if mesh.interface_loop.is_empty() {
        return Err(Error::InvalidInput("the mesh has no interface".into()));
    }
    let ops = build_local_operators(mesh, k)?;
    let eta = eta.unwrap_or_else(|| default_eta(mesh, &ops));
    let weights = InterfaceWeights::new(scenario.sigma_int, scenario.sigma_ext, eta)?;
    let problem = StationaryProblem::new(mesh, ops, weights)?;
    let integrator = JumpIntegrator::new(mesh, scenario.capacitance, tau)?;
    let pos = interface_positions(mesh);
    let equilibrium = InterfaceJumpVector::from_fn(mesh, |x| {
        scenario.equilibrium(Region::Int, x) - scenario.equilibrium(Region::Ext, x)
    })
    .max_abs();
    let limit = INSTABILITY_FACTOR * equilibrium.max(f64::MIN_POSITIVE);

    let mut jump = InterfaceJumpVector::zeros(mesh);
    let mut series = Vec::with_capacity(steps + 1);
    for n in 0..=steps {
        let t = n as f64 * tau;
        let exact = scenario.at_time(t);
        let data = StepData {
            mesh,
            pos: &pos,
            jump: &jump,
            exact: exact.clone(),
        };
        let u = problem.solve(mesh, &data)?;
        let ih = interpolate(mesh, problem.dofs(), |r, x| exact.exact(r, x));
        let err_energy = energy_norm(mesh, &problem.ops, &problem.weights, &u.sub(&ih));
        let err_jump = chain_l2_distance(mesh, &jump, |x| exact.jump(x));
        let flux_int = interior_gradient_norm(mesh, &problem.ops, &u);
        series.push(LdmStep {
            step: n,
            t,
            err_energy,
            err_jump,
            flux_int,
        });
        snapshot(n, &problem.ops, &u);
        if n < steps {
            let r = jump_rhs(mesh, &problem.ops, &problem.weights, &u);
            jump = integrator.advance(&jump, &r)?;
            let m = jump.max_abs();
            if !(m <= limit) {
                return Err(Error::Instability {
                    step: n + 1,
                    max_jump: m,
                });
            }
        }
    }
    let temporal = |f: fn(&LdmStep) -> f64| {
        (tau * series.iter().skip(1).map(|s| f(s).powi(2)).sum::<f64>()).sqrt()
    };
    Ok(LdmRun {
        tau,
        h: mesh.h(),
        ndof: problem.dofs().len(),
        temporal_energy: temporal(|s| s.err_energy),
        temporal_jump: temporal(|s| s.err_jump),
        series,
        final_jump: jump,
    })
}

/// Mesh and time-step sequence of a relaxation study: level `l` uses `levels[l]` background
/// cells per side and `steps0 * 4^l` steps over `[0, t_final]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LdmStudySettings {
    pub k: usize,
    pub family: crate::study::MeshFamily,
    pub levels: Vec<usize>,
    pub refinement: u32,
    pub steps0: usize,
    pub t_final: f64,
    pub eta: Option<f64>,
    pub seed: u64,
}

impl Default for LdmStudySettings {
    fn default() -> Self {
        Self {
            k: 0,
            family: crate::study::MeshFamily::Triangular,
            levels: vec![8, 16, 32, 64],
            refinement: 2,
            steps0: 8,
            t_final: 2.0,
            eta: None,
            seed: 7,
        }
    }
}

impl LdmStudySettings {
    pub fn steps(&self, level: usize) -> usize {
        self.steps0 * 4usize.pow(level as u32)
    }

    pub fn tau(&self, level: usize) -> f64 {
        self.t_final / self.steps(level) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdmLevel {
    pub level: usize,
    pub n: usize,
    pub steps: usize,
    pub run: LdmRun,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdmTable {
    pub levels: Vec<LdmLevel>,
}

impl LdmTable {
    pub fn h(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.run.h).collect()
    }

    pub fn eoc_energy(&self) -> Vec<f64> {
        crate::study::eoc(
            &self.h(),
            &self
                .levels
                .iter()
                .map(|l| l.run.temporal_energy)
                .collect::<Vec<_>>(),
        )
    }

    pub fn eoc_jump(&self) -> Vec<f64> {
        crate::study::eoc(
            &self.h(),
            &self
                .levels
                .iter()
                .map(|l| l.run.temporal_jump)
                .collect::<Vec<_>>(),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("level,h,tau,steps,ndof,err_energy,eoc_energy,err_jump,eoc_jump\n");
        let (ee, ej) = (self.eoc_energy(), self.eoc_jump());
        for (i, l) in self.levels.iter().enumerate() {
            let fmt = |v: &[f64]| {
                if i == 0 {
                    String::new()
                } else {
                    format!("{:.4}", v[i - 1])
                }
            };
            writeln!(
                s,
                "{},{:.6e},{:.6e},{},{},{:.6e},{},{:.6e},{}",
                l.level,
                l.run.h,
                l.run.tau,
                l.steps,
                l.run.ndof,
                l.run.temporal_energy,
                fmt(&ee),
                l.run.temporal_jump,
                fmt(&ej)
            )
            .unwrap();
        }
        s
    }
}

/// Runs every level of the study, sequentially.
pub fn run_ldm_study(scenario: &Scenario, settings: &LdmStudySettings) -> Result<LdmTable> {
    if settings.levels.is_empty() || settings.steps0 == 0 || !(settings.t_final > 0.0) {
        return Err(Error::InvalidInput(
            "a study needs levels, steps and a positive final time".into(),
        ));
    }
    let mut levels = Vec::with_capacity(settings.levels.len());
    for (l, &n) in settings.levels.iter().enumerate() {
        let mesh = crate::study::build_scenario_mesh(
            scenario,
            settings.family,
            n,
            settings.refinement,
            settings.seed,
        )?;
        let steps = settings.steps(l);
        let run = run_ldm(
            scenario,
            &mesh,
            settings.k,
            steps,
            settings.tau(l),
            settings.eta,
            |_, _, _| {},
        )?;
        levels.push(LdmLevel {
            level: l,
            n,
            steps,
            run,
        });
    }
    Ok(LdmTable { levels })
}
