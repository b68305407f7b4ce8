use ddr_interface::scenario::Scenario;
use ddr_interface::study::{
    build_scenario_mesh, compute_errors, run_convergence, solve_scenario, MeshFamily, StudySettings,
};

#[test]
fn patch_solutions_are_exact_for_each_degree() {
    for (k, degree) in [(0, 1), (1, 2), (2, 2)] {
        for family in [MeshFamily::Cartesian, MeshFamily::Triangular] {
            let s = Scenario::patch(100.0, degree).unwrap();
            let mesh = build_scenario_mesh(&s, family, 8, 0, 0).unwrap();
            let sol = solve_scenario(&mesh, &s, k, None).unwrap();
            let r = compute_errors(&mesh, &sol.problem.ops, &sol.problem.weights, &sol.uh, &s);
            assert!(r.raw_energy <= 1e-9, "k={k} {family:?}: {:e}", r.raw_energy);
        }
    }
}

#[test]
fn square_error_halves_with_the_meshsize() {
    let s = Scenario::square(1e-3).unwrap();
    let t = run_convergence(
        &s,
        &StudySettings::new(MeshFamily::Cartesian, vec![8, 16, 32]),
    )
    .unwrap();
    for pair in t.levels.windows(2) {
        let ratio = pair[0].report.err_energy / pair[1].report.err_energy;
        assert!(ratio > 1.9, "{ratio}");
    }
}

#[test]
fn higher_degree_is_more_accurate_on_the_circle() {
    let s = Scenario::circle(10.0).unwrap();
    let mesh = build_scenario_mesh(&s, MeshFamily::Triangular, 16, 2, 0).unwrap();
    let err = |k| {
        let sol = solve_scenario(&mesh, &s, k, None).unwrap();
        compute_errors(&mesh, &sol.problem.ops, &sol.problem.weights, &sol.uh, &s).err_energy
    };
    assert!(err(1) < 0.5 * err(0));
}
