//! Local reconstructions on a cut polygon: the discrete gradient and potential of an
//! interpolated polynomial of degree `k + 1` match the polynomial itself.
//!
//! ```text
//! cargo run --release --example local_operators [k]
//! ```

use ddr_interface::ddr::{build_local_operators, interpolate};
use ddr_interface::geometry::Point;
use ddr_interface::scenario::Scenario;
use ddr_interface::study::{build_scenario_mesh, MeshFamily};

fn main() -> ddr_interface::Result<()> {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let mesh = build_scenario_mesh(&Scenario::circle(1.0)?, MeshFamily::Triangular, 8, 1, 0)?;
    let ops = build_local_operators(&mesh, k)?;
    let deg = k as i32 + 1;
    let c = if k > 0 { 1.0 } else { 0.0 };
    let u = |p: Point| p.x.powi(deg) - 0.5 * p.y.powi(deg) + c * p.x * p.y;
    let grad = |p: Point| {
        let d = deg as f64;
        Point::new(
            d * p.x.powi(deg - 1) + c * p.y,
            -0.5 * d * p.y.powi(deg - 1) + c * p.x,
        )
    };
    let v = interpolate(&mesh, &ops.dofs, |_, p| u(p));
    let t = (0..mesh.elements.len())
        .max_by_key(|&t| mesh.elements[t].vertices.len())
        .unwrap();
    let el = &mesh.elements[t];
    let op = &ops.elements[t];
    let loc = v.local(&ops.local_dofs(&mesh, t));
    println!(
        "element {t}: {} vertices, region {:?}, {} local unknowns, k = {k}",
        el.vertices.len(),
        el.region,
        op.n_local
    );
    let (mut eg, mut ep) = (0.0f64, 0.0f64);
    for (x, _) in op.quad.iter() {
        eg = eg.max((op.gradient_at(&loc, x) - grad(x)).norm());
        ep = ep.max((op.potential_at(&loc, x) - u(x)).abs());
    }
    println!("max |G_T v - grad u| = {eg:.2e}, max |p_T v - u| = {ep:.2e}");
    let stab = op
        .stabilization
        .iter()
        .flat_map(|s| ddr_interface::linalg::matvec(s, &loc))
        .fold(0.0f64, |m, c| m.max(c.abs()));
    println!("max coefficient of p_T v - v_TE over the edges = {stab:.2e}");
    Ok(())
}
