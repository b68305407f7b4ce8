//! Cutting background meshes along interfaces, text round trip and quality report.
//!
//! ```text
//! cargo run --release --example mesh_cutting [n] [M]
//! ```

use ddr_interface::geometry::BoundingBox;
use ddr_interface::mesh::{
    build_cartesian_mesh, build_split_triangular_mesh, cut_mesh, discretize_interface,
    read_polymesh, write_polymesh, CutOptions, Region,
};
use ddr_interface::scenario::{Case, Scenario};

fn main() -> ddr_interface::Result<()> {
    let args: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|s| s.parse().ok())
        .collect();
    let n = args.first().copied().unwrap_or(16) as usize;
    let m = args.get(1).copied().unwrap_or(2);
    let domain = BoundingBox::unit_centered();
    let backgrounds = [
        ("cartesian", build_cartesian_mesh(n, domain)?),
        ("triangular", build_split_triangular_mesh(n, domain)?),
    ];
    for (name, bg) in &backgrounds {
        for case in [Case::Square, Case::Circle, Case::Generic] {
            let curve = Scenario::new(case, 1.0)?.interface();
            let chain = discretize_interface(curve.as_ref(), m, domain.width() / n as f64)?;
            let mesh = cut_mesh(bg, &chain, CutOptions::default())?;
            mesh.check_invariants(1e-12)?;
            let text = write_polymesh(&mesh, None);
            let (back, _) = read_polymesh(&text)?;
            assert_eq!(back.vertices, mesh.vertices);
            let int_area: f64 = mesh
                .elements
                .iter()
                .filter(|e| e.region == Region::Int)
                .map(|e| e.area)
                .sum();
            println!(
                "{name:>10} {:>8}: {:5} cells, {:4} interface edges, interior area {:.6}, chain area {:.6}, min area ratio {:.2e}, {} bytes",
                case.name(),
                mesh.elements.len(),
                mesh.interface_edges.len(),
                int_area,
                ddr_interface::geometry::signed_area(&chain.vertices),
                mesh.diagnostics.min_area_ratio,
                text.len()
            );
        }
    }
    Ok(())
}
