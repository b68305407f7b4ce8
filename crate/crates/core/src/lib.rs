//! Discrete de Rham discretization of elliptic interface problems on polygonal meshes.
//!
//! The crate solves `-div(sigma grad u) = f` in two subdomains separated by a closed
//! polygonal interface, with prescribed potential jump `[u] = J` and flux jump
//! `[sigma grad u] . n = Phi`. Interface conditions are imposed weakly with a Nitsche-type
//! penalty and weighted averages, so the scheme stays robust for strongly contrasting
//! conductivities. Fitted meshes are obtained by cutting a background mesh along the
//! interface, which produces general polygonal cells.
//!
//! Modules, bottom-up:
//! - [`geometry`], [`mesh`]: polygons, background meshes and interface cutting;
//! - [`polyquad`]: polynomial bases, quadrature and projections;
//! - [`ddr`]: the discrete space, interpolator and local gradient/potential reconstructions;
//! - [`assembly`]: bilinear and linear forms, Dirichlet elimination and sparse solves;
//! - [`norms`], [`scenario`], [`study`]: error measures, manufactured cases and convergence runs;
//! - [`ldm`]: capacitive relaxation of the interface jump (explicit Euler);
//! - [`config`]: run configuration files used by the `ddri` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod config;
pub mod ddr;
pub mod error;
pub mod geometry;
pub mod ldm;
pub mod linalg;
pub mod mesh;
pub mod norms;
pub mod polyquad;
pub mod scenario;
pub mod study;

pub use error::{Error, Result};
