//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any criterion fails.

use ddr_interface::assembly::{assemble_bilinear, default_eta, InterfaceWeights, ReducedSystem};
use ddr_interface::ddr::{build_local_operators, interpolate, DiscreteVector};
use ddr_interface::geometry::{signed_area, Point};
use ddr_interface::ldm::{run_ldm_study, LdmStudySettings};
use ddr_interface::mesh::{FittedMesh, Region};
use ddr_interface::norms::energy_matrix;
use ddr_interface::scenario::Scenario;
use ddr_interface::study::{
    build_scenario_mesh, compute_errors, fitted_order, run_convergence, solve_scenario,
    ConvergenceTable, MeshFamily, StudySettings,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const RATIOS: [f64; 4] = [1e-6, 1e-3, 1e3, 1e6];
const LEVELS: [usize; 4] = [8, 16, 32, 64];
const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn orders(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn energies(t: &ConvergenceTable) -> Vec<f64> {
    t.levels.iter().map(|l| l.report.err_energy).collect()
}

fn tables(
    family: MeshFamily,
    scenario: impl Fn(f64) -> Scenario,
    refinement: u32,
    ratios: &[f64],
) -> Vec<(f64, ConvergenceTable)> {
    ratios
        .iter()
        .map(|&r| {
            let mut settings = StudySettings::new(family, LEVELS.to_vec());
            settings.refinement = refinement;
            settings.seed = SEED;
            (
                r,
                run_convergence(&scenario(r), &settings).expect("convergence run"),
            )
        })
        .collect()
}

/// Per-ratio energy orders against `threshold`, minimum over every step.
fn energy_orders(runs: &[(f64, ConvergenceTable)], threshold: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, t) in runs {
        let eoc = t.eoc_energy();
        pass &= min(&eoc) >= threshold;
        parts.push(format!(
            "ratio {r:e}: [{}] fit {:.3}",
            orders(&eoc),
            fitted_order(&t.h(), &energies(t))
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn patch_test() -> Outcome {
    let mut worst = 0.0f64;
    for ratio in [1e-3, 1.0, 1e3] {
        let s = Scenario::patch(ratio, 1).unwrap();
        let mesh = build_scenario_mesh(&s, MeshFamily::Cartesian, 8, 0, 0).unwrap();
        let sol = solve_scenario(&mesh, &s, 0, None).unwrap();
        let r = compute_errors(&mesh, &sol.problem.ops, &sol.problem.weights, &sol.uh, &s);
        worst = worst.max(r.raw_energy);
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("max ||u_h - I_h u||_en = {worst:.3e} over ratios 1e-3, 1, 1e3"),
    }
}

fn robustness(runs: &[(f64, ConvergenceTable)]) -> Outcome {
    let finest: Vec<f64> = runs
        .iter()
        .map(|(_, t)| t.levels.last().unwrap().report.err_energy)
        .collect();
    let spread = finest.iter().copied().fold(0.0, f64::max) / min(&finest);
    Outcome {
        pass: spread <= 10.0,
        detail: format!(
            "finest normalized errors [{}], max/min = {spread:.3}",
            finest
                .iter()
                .map(|e| format!("{e:.3e}"))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    }
}

fn second_order(runs: &[(f64, ConvergenceTable)]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, t) in runs {
        let eoc = t.eoc_l2();
        pass &= min(&eoc) >= 1.5;
        parts.push(format!("ratio {r:e}: [{}]", orders(&eoc)));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn circle() -> Outcome {
    let m4 = energy_orders(
        &tables(
            MeshFamily::Triangular,
            |r| Scenario::circle(r).unwrap(),
            4,
            &RATIOS,
        ),
        0.9,
    );
    let m2 = energy_orders(
        &tables(
            MeshFamily::Triangular,
            |r| Scenario::circle(r).unwrap(),
            2,
            &[0.1],
        ),
        0.9,
    );
    Outcome {
        pass: m4.pass && m2.pass,
        detail: format!("M=4 {}; M=2 {}", m4.detail, m2.detail),
    }
}

fn ldm() -> Outcome {
    let s = Scenario::ldm_relaxation(0.1).unwrap();
    let settings = LdmStudySettings::default();
    let t = run_ldm_study(&s, &settings).expect("relaxation study");
    let (ee, ej) = (t.eoc_energy(), t.eoc_jump());
    let h = t.h();
    let fe = fitted_order(
        &h,
        &t.levels
            .iter()
            .map(|l| l.run.temporal_energy)
            .collect::<Vec<_>>(),
    );
    let fj = fitted_order(
        &h,
        &t.levels
            .iter()
            .map(|l| l.run.temporal_jump)
            .collect::<Vec<_>>(),
    );
    Outcome {
        pass: min(&ee) >= 0.7 && min(&ej) >= 0.4,
        detail: format!(
            "levels {:?}, steps0 {}: energy [{}] fit {fe:.3} (>= 0.7); jump [{}] fit {fj:.3} (>= 0.4)",
            settings.levels,
            settings.steps0,
            orders(&ee),
            orders(&ej)
        ),
    }
}

fn invariant_meshes() -> Vec<(&'static str, FittedMesh)> {
    let sq = Scenario::square(1.0).unwrap();
    let ci = Scenario::circle(1.0).unwrap();
    let ge = Scenario::generic(1.0).unwrap();
    vec![
        (
            "square/cartesian",
            build_scenario_mesh(&sq, MeshFamily::Cartesian, 8, 0, 0).unwrap(),
        ),
        (
            "square/perturbed",
            build_scenario_mesh(&sq, MeshFamily::Perturbed, 8, 0, SEED).unwrap(),
        ),
        (
            "circle/triangular M=1",
            build_scenario_mesh(&ci, MeshFamily::Triangular, 8, 1, 0).unwrap(),
        ),
        (
            "circle/cartesian M=2",
            build_scenario_mesh(&ci, MeshFamily::Cartesian, 8, 2, 0).unwrap(),
        ),
        (
            "generic/triangular M=2",
            build_scenario_mesh(&ge, MeshFamily::Triangular, 8, 2, 0).unwrap(),
        ),
    ]
}

/// Random polynomial of total degree `d` as a coefficient list over `x^i y^j`.
fn random_poly(rng: &mut ChaCha8Rng, d: i32) -> Vec<(i32, i32, f64)> {
    let mut c = Vec::new();
    for i in 0..=d {
        for j in 0..=d - i {
            c.push((i, j, rng.random_range(-1.0..1.0)));
        }
    }
    c
}

fn eval(p: &[(i32, i32, f64)], x: Point) -> f64 {
    p.iter()
        .map(|&(i, j, c)| c * x.x.powi(i) * x.y.powi(j))
        .sum()
}

fn eval_grad(p: &[(i32, i32, f64)], x: Point) -> Point {
    let mut g = Point::default();
    for &(i, j, c) in p {
        if i > 0 {
            g.x += c * i as f64 * x.x.powi(i - 1) * x.y.powi(j);
        }
        if j > 0 {
            g.y += c * j as f64 * x.x.powi(i) * x.y.powi(j - 1);
        }
    }
    g
}

fn invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let meshes = invariant_meshes();

    // interface weights
    for _ in 0..1000 {
        let si = 10f64.powf(rng.random_range(-6.0..6.0));
        let se = 10f64.powf(rng.random_range(-6.0..6.0));
        let w = InterfaceWeights::new(si, se, 1.0).unwrap();
        let ulp = 4.0 * f64::EPSILON;
        if (w.lambda_int + w.lambda_ext - 1.0).abs() > ulp
            || (2.0 * w.lambda_int * si - w.alpha).abs() > ulp * w.alpha
            || (2.0 * w.lambda_ext * se - w.alpha).abs() > ulp * w.alpha
        {
            failures.push(format!("weights ({si:e}, {se:e})"));
            break;
        }
    }

    for (name, mesh) in &meshes {
        // area and orientation
        if let Err(e) = mesh.check_invariants(1e-12) {
            failures.push(format!("{name}: {e}"));
        }
        for (t, el) in mesh.elements.iter().enumerate() {
            let a = signed_area(&mesh.element_polygon(t));
            if a.is_nan() || a <= 0.0 || (a - el.area).abs() > 1e-12 * el.area.max(1e-300) {
                failures.push(format!("{name}: element {t} orientation/area"));
                break;
            }
        }

        for k in [0usize, 1, 2] {
            let ops = build_local_operators(mesh, k).unwrap();
            // polynomial consistency of G_T, p_T and v_TE
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let pi = random_poly(&mut rng, k as i32 + 1);
                let pe = random_poly(&mut rng, k as i32 + 1);
                let poly = |r: Region| if r == Region::Int { &pi } else { &pe };
                let v = interpolate(mesh, &ops.dofs, |r, x| eval(poly(r), x));
                for (t, el) in mesh.elements.iter().enumerate() {
                    let op = &ops.elements[t];
                    let p = poly(el.region);
                    let loc = v.local(&ops.local_dofs(mesh, t));
                    for (x, _) in op.quad.iter() {
                        worst = worst
                            .max(el.diameter * (op.gradient_at(&loc, x) - eval_grad(p, x)).norm());
                        worst = worst.max((op.potential_at(&loc, x) - eval(p, x)).abs());
                    }
                    for (i, &e) in el.edges.iter().enumerate() {
                        let (a, b) = mesh.edge_endpoints(e);
                        for t in [-1.0, -0.3, 0.5, 1.0] {
                            let x = a + (0.5 * (t + 1.0)) * (b - a);
                            worst =
                                worst.max((op.edge_potential_at(i, &loc, t) - eval(p, x)).abs());
                        }
                    }
                }
            }
            if worst > 1e-10 {
                failures.push(format!("{name} k={k}: polynomial consistency {worst:.2e}"));
            }

            let w = InterfaceWeights::new(0.5, 2.0, default_eta(mesh, &ops)).unwrap();
            let bd = ops.dofs.boundary_dofs();
            // energy norm definiteness on V_{h,0}
            let e = energy_matrix(mesh, &ops, &w);
            let sys = ReducedSystem::new(&e, bd).unwrap();
            let d = sys.free_matrix().to_dense();
            let sym = faer::Mat::<f64>::from_fn(d.nrows(), d.ncols(), |i, j| {
                0.5 * (d[(i, j)] + d[(j, i)])
            });
            if sym.llt(faer::Side::Lower).is_err() {
                failures.push(format!("{name} k={k}: energy Gram matrix not SPD"));
            }
            // coercivity of a_h at the default penalty
            let a = assemble_bilinear(mesh, &ops, &w);
            let mut fixed = vec![false; ops.dofs.len()];
            for &i in bd {
                fixed[i] = true;
            }
            for _ in 0..100 {
                let v = DiscreteVector(
                    (0..ops.dofs.len())
                        .map(|i| {
                            if fixed[i] {
                                0.0
                            } else {
                                rng.random_range(-1.0..1.0)
                            }
                        })
                        .collect(),
                );
                let q: f64 = a.matvec(&v.0).iter().zip(&v.0).map(|(x, y)| x * y).sum();
                if q.is_nan() || q <= 0.0 {
                    failures.push(format!("{name} k={k}: a_h(v, v) = {q:e}"));
                    break;
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!(
            "{} meshes, k = 0..2, 100 random polynomials and 100 random vectors each",
            meshes.len()
        )
    } else {
        failures.join("; ")
    };
    Outcome {
        pass: failures.is_empty(),
        detail,
    }
}

fn main() {
    let mut all = true;
    let mut failed = Vec::new();
    let mut report = |id: usize, title: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] criterion {id}: {title} | {} | {:.1}s",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        all &= o.pass;
        if !o.pass {
            failed.push(id);
        }
    };

    report(
        1,
        "patch test, k=0, affine per region, energy error <= 1e-9",
        &mut patch_test,
    );

    let start = Instant::now();
    let square = tables(
        MeshFamily::Cartesian,
        |r| Scenario::square(r).unwrap(),
        0,
        &RATIOS,
    );
    let square_time = start.elapsed().as_secs_f64();
    report(
        2,
        "square, Cartesian, energy EOC >= 0.9 for every ratio",
        &mut || {
            let mut o = energy_orders(&square, 0.9);
            o.detail.push_str(&format!(" (runs {square_time:.1}s)"));
            o
        },
    );
    report(
        3,
        "square, finest normalized energy errors within a factor 10",
        &mut || robustness(&square),
    );
    report(
        4,
        "square, perturbed quadrilaterals, energy EOC >= 0.85",
        &mut || {
            energy_orders(
                &tables(
                    MeshFamily::Perturbed,
                    |r| Scenario::square(r).unwrap(),
                    0,
                    &RATIOS,
                ),
                0.85,
            )
        },
    );
    report(5, "square, reconstruction L2 EOC >= 1.5", &mut || {
        second_order(&square)
    });
    report(
        6,
        "circle, triangular cut meshes, energy EOC >= 0.9 (M=4 all ratios, M=2 ratio 0.1)",
        &mut circle,
    );
    report(7, "generic interface, M=2, energy EOC >= 0.9", &mut || {
        energy_orders(
            &tables(
                MeshFamily::Triangular,
                |r| Scenario::generic(r).unwrap(),
                2,
                &RATIOS,
            ),
            0.9,
        )
    });
    report(
        8,
        "relaxation, temporal energy EOC >= 0.7 and jump EOC >= 0.4",
        &mut ldm,
    );
    report(9, "invariant suites", &mut invariants);

    println!(
        "acceptance: {} of 9 criteria passed, failed: {:?}",
        9 - failed.len(),
        failed
    );
    if !all {
        std::process::exit(1);
    }
}
