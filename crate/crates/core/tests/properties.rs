use ddr_interface::assembly::InterfaceWeights;
use ddr_interface::geometry::{signed_area, BoundingBox, Point};
use ddr_interface::mesh::{
    build_cartesian_mesh, build_split_triangular_mesh, cut_mesh, discretize_interface,
    perturb_vertices, read_polymesh, write_polymesh, Circle, CutOptions, Region,
};
use ddr_interface::polyquad::element_quadrature;
use ddr_interface::study::{eoc, fitted_order};
use proptest::prelude::*;
use std::collections::HashSet;

fn sigma() -> impl Strategy<Value = f64> {
    (-6.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn weights_sum_to_one_and_balance_alpha(si in sigma(), se in sigma(), eta in 0.1f64..100.0) {
        let w = InterfaceWeights::new(si, se, eta).unwrap();
        let tol = 4.0 * f64::EPSILON;
        prop_assert!((w.lambda_int + w.lambda_ext - 1.0).abs() <= tol);
        prop_assert!((2.0 * w.lambda_int * si - w.alpha).abs() <= tol * w.alpha);
        prop_assert!((2.0 * w.lambda_ext * se - w.alpha).abs() <= tol * w.alpha);
        prop_assert!(w.alpha <= 2.0 * si.min(se));
    }

    #[test]
    fn product_jump_splits_into_averages(
        si in sigma(), se in sigma(),
        a1 in -1e3f64..1e3, a2 in -1e3f64..1e3, b1 in -1e3f64..1e3, b2 in -1e3f64..1e3,
    ) {
        let w = InterfaceWeights::new(si, se, 1.0).unwrap();
        let avg_a = w.lambda_int * a1 + w.lambda_ext * a2;
        let skew_b = w.lambda_ext * b1 + w.lambda_int * b2;
        let lhs = a1 * b1 - a2 * b2;
        let rhs = avg_a * (b1 - b2) + (a1 - a2) * skew_b;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + a1.abs().max(a2.abs()) * b1.abs().max(b2.abs())));
    }

    #[test]
    fn perturbed_meshes_keep_their_invariants(n in 2usize..10, seed in any::<u64>(), amp in 0.0f64..0.3) {
        let base = build_cartesian_mesh(n, BoundingBox::unit_centered()).unwrap();
        let mesh = perturb_vertices(&base, amp, seed, &HashSet::new()).unwrap();
        prop_assert!(mesh.check_invariants(1e-12).is_ok());
        prop_assert!((mesh.total_area() - 1.0).abs() <= 1e-12);
        for t in 0..mesh.elements.len() {
            prop_assert!(signed_area(&mesh.element_polygon(t)) > 0.0);
        }
    }

    #[test]
    fn cut_meshes_conserve_area(
        n in 4usize..12,
        cx in -0.1f64..0.1, cy in -0.1f64..0.1, radius in 0.15f64..0.3,
        m in 0u32..3, triangles in any::<bool>(),
    ) {
        let domain = BoundingBox::unit_centered();
        let background = if triangles {
            build_split_triangular_mesh(n, domain).unwrap()
        } else {
            build_cartesian_mesh(n, domain).unwrap()
        };
        let circle = Circle { center: Point::new(cx, cy), radius };
        let chain = discretize_interface(&circle, m, background.h()).unwrap();
        let mesh = cut_mesh(&background, &chain, CutOptions::default()).unwrap();
        prop_assert!(mesh.check_invariants(1e-12).is_ok());
        let inner: f64 = mesh.elements.iter().filter(|e| e.region == Region::Int).map(|e| e.area).sum();
        prop_assert!((inner - signed_area(&chain.vertices).abs()).abs() <= 1e-12);
        prop_assert!(mesh.interface_loop.len() >= chain.vertices.len());
    }

    #[test]
    fn polymesh_text_roundtrip(n in 1usize..6, seed in any::<u64>()) {
        let base = build_cartesian_mesh(n, BoundingBox::unit_centered()).unwrap();
        let mesh = perturb_vertices(&base, 0.2, seed, &HashSet::new()).unwrap();
        let (back, nodal) = read_polymesh(&write_polymesh(&mesh, None)).unwrap();
        prop_assert!(nodal.is_none());
        prop_assert_eq!(back.vertices.len(), mesh.vertices.len());
        prop_assert_eq!(back.elements.len(), mesh.elements.len());
        for (p, q) in back.vertices.iter().zip(&mesh.vertices) {
            prop_assert!(p.dist(*q) <= 1e-15);
        }
    }

    #[test]
    fn rectangle_quadrature_integrates_monomials(
        x0 in -1.0f64..1.0, y0 in -1.0f64..1.0, w in 0.01f64..2.0, h in 0.01f64..2.0,
        i in 0i32..5, j in 0i32..5,
    ) {
        let poly = [Point::new(x0, y0), Point::new(x0 + w, y0), Point::new(x0 + w, y0 + h), Point::new(x0, y0 + h)];
        let q = element_quadrature(&poly, Point::new(x0 + 0.5 * w, y0 + 0.5 * h), (i + j) as usize);
        let prim = |a: f64, b: f64, p: i32| (b.powi(p + 1) - a.powi(p + 1)) / (p + 1) as f64;
        let exact = prim(x0, x0 + w, i) * prim(y0, y0 + h, j);
        let got = q.integrate(|p| p.x.powi(i) * p.y.powi(j));
        prop_assert!((got - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn power_laws_have_their_order(c in 0.01f64..100.0, p in 0.25f64..3.0) {
        let h = [0.5f64, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|x| c * x.powf(p)).collect();
        for o in eoc(&h, &e) {
            prop_assert!((o - p).abs() <= 1e-10);
        }
        prop_assert!((fitted_order(&h, &e) - p).abs() <= 1e-10);
    }
}
