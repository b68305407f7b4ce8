//! Built-in test cases with closed-form solutions, and the data they induce.
//!
//! All built-in solutions are harmonic in each region, so the source term vanishes. Jump data
//! is evaluated at the actual interface edges of the mesh, i.e. on the polygonal chain.

use crate::assembly::ProblemData;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::{Circle, DeformedCircle, ParametricCurve, Region, SquareLoop};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    /// `u_int = (sigma_ext / sigma_int)(x^2 - y^2)`, `u_ext = x^2 - y^2`, square interface.
    Square,
    /// Conductor in a uniform field with a unit potential offset, circular interface.
    Circle,
    /// The square-case solution across a three-lobed deformed circle.
    Generic,
    /// Piecewise affine (or harmonic quadratic) solution across the square interface.
    Patch,
    /// Charge relaxation of a circular membrane in a uniform field.
    LdmRelaxation,
}

impl Case {
    pub const ALL: [Case; 5] = [
        Case::Square,
        Case::Circle,
        Case::Generic,
        Case::Patch,
        Case::LdmRelaxation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::Square => "square",
            Case::Circle => "circle",
            Case::Generic => "generic",
            Case::Patch => "patch",
            Case::LdmRelaxation => "ldm-relaxation",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown case `{s}`")))
    }
}

/// Interface radius of the circular cases and half side of the square interface.
pub const DEFAULT_RADIUS: f64 = 0.25;
/// Relative amplitude and lobe count of the deformed circle `R (1 + a cos(l theta))`.
pub const GENERIC_AMPLITUDE: f64 = 0.2;
pub const GENERIC_LOBES: u32 = 3;

/// Coefficients `(c, b_x, b_y, q, m)` of `c + b . x + q (x^2 - y^2) + m x y` per region.
const PATCH_INT: [f64; 5] = [0.5, -3.0, 1.0, 0.75, -1.25];
const PATCH_EXT: [f64; 5] = [1.0, 1.0, -2.0, -0.5, 2.0];

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub case: Case,
    pub sigma_int: f64,
    pub sigma_ext: f64,
    pub radius: f64,
    /// Far-field strength of the relaxation case.
    pub field: f64,
    /// Membrane capacitance of the relaxation case.
    pub capacitance: f64,
    /// Polynomial degree of the patch solution (1 or 2).
    pub patch_degree: usize,
    /// Time at which the relaxation solution is evaluated.
    pub time: f64,
}

impl Scenario {
    /// A case with conductivities `sigma_int = ratio`, `sigma_ext = 1`.
    pub fn new(case: Case, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "conductivity ratio must be positive, got {ratio}"
            )));
        }
        let mut s = Self {
            case,
            sigma_int: ratio,
            sigma_ext: 1.0,
            radius: DEFAULT_RADIUS,
            field: 1.0,
            capacitance: 1.0,
            patch_degree: 1,
            time: 0.0,
        };
        if case == Case::LdmRelaxation {
            s.set_relaxation_time(1.0);
        }
        Ok(s)
    }

    pub fn square(ratio: f64) -> Result<Self> {
        Self::new(Case::Square, ratio)
    }

    pub fn circle(ratio: f64) -> Result<Self> {
        Self::new(Case::Circle, ratio)
    }

    pub fn generic(ratio: f64) -> Result<Self> {
        Self::new(Case::Generic, ratio)
    }

    pub fn patch(ratio: f64, degree: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::InvalidInput(format!(
                "patch degree must be 1 or 2, got {degree}"
            )));
        }
        let mut s = Self::new(Case::Patch, ratio)?;
        s.patch_degree = degree;
        Ok(s)
    }

    /// Relaxation case with `R = 1/4`, `E = 1` and `C` chosen so that `t_c = 1`.
    pub fn ldm_relaxation(ratio: f64) -> Result<Self> {
        Self::new(Case::LdmRelaxation, ratio)
    }

    /// `t_c = C R (1 / sigma_int + 1 / sigma_ext)`.
    pub fn relaxation_time(&self) -> f64 {
        self.capacitance * self.radius * (1.0 / self.sigma_int + 1.0 / self.sigma_ext)
    }

    pub fn set_relaxation_time(&mut self, tc: f64) {
        self.capacitance = tc / (self.radius * (1.0 / self.sigma_int + 1.0 / self.sigma_ext));
    }

    pub fn at_time(&self, t: f64) -> Self {
        Self {
            time: t,
            ..self.clone()
        }
    }

    pub fn sigma(&self, r: Region) -> f64 {
        match r {
            Region::Int => self.sigma_int,
            Region::Ext => self.sigma_ext,
        }
    }

    /// Closed curve carrying the interface.
    pub fn interface(&self) -> Box<dyn ParametricCurve> {
        match self.case {
            Case::Square | Case::Patch => Box::new(SquareLoop {
                center: Point::default(),
                half: self.radius,
            }),
            Case::Circle | Case::LdmRelaxation => Box::new(Circle {
                center: Point::default(),
                radius: self.radius,
            }),
            Case::Generic => Box::new(DeformedCircle {
                center: Point::default(),
                radius: self.radius,
                amplitude: GENERIC_AMPLITUDE,
                lobes: GENERIC_LOBES,
            }),
        }
    }

    /// Whether the interface is a polygon that fitted Cartesian meshes can resolve exactly.
    pub fn has_polygonal_interface(&self) -> bool {
        matches!(self.case, Case::Square | Case::Patch)
    }

    fn contrast(&self) -> f64 {
        (self.sigma_ext - self.sigma_int) / (self.sigma_ext + self.sigma_int)
    }

    pub fn exact(&self, r: Region, p: Point) -> f64 {
        let (x, y) = (p.x, p.y);
        match (self.case, r) {
            (Case::Square | Case::Generic, Region::Int) => {
                self.sigma_ext / self.sigma_int * (x * x - y * y)
            }
            (Case::Square | Case::Generic, Region::Ext) => x * x - y * y,
            (Case::Circle, Region::Int) => {
                2.0 * self.sigma_ext / (self.sigma_ext + self.sigma_int) * x
            }
            (Case::Circle, Region::Ext) => {
                1.0 + (1.0 + self.contrast() * self.radius * self.radius / (x * x + y * y)) * x
            }
            (Case::Patch, r) => {
                let c = self.patch_coeffs(r);
                c[0] + c[1] * x + c[2] * y + c[3] * (x * x - y * y) + c[4] * x * y
            }
            (Case::LdmRelaxation, r) => {
                let d = (-self.time / self.relaxation_time()).exp();
                d * (self.initial(r, p) - self.equilibrium(r, p)) + self.equilibrium(r, p)
            }
        }
    }

    pub fn gradient(&self, r: Region, p: Point) -> Point {
        let (x, y) = (p.x, p.y);
        match (self.case, r) {
            (Case::Square | Case::Generic, Region::Int) => {
                (self.sigma_ext / self.sigma_int) * Point::new(2.0 * x, -2.0 * y)
            }
            (Case::Square | Case::Generic, Region::Ext) => Point::new(2.0 * x, -2.0 * y),
            (Case::Circle, Region::Int) => Point::new(
                2.0 * self.sigma_ext / (self.sigma_ext + self.sigma_int),
                0.0,
            ),
            (Case::Circle, Region::Ext) => {
                Point::new(1.0, 0.0) + self.contrast() * dipole_gradient(self.radius, p)
            }
            (Case::Patch, r) => {
                let c = self.patch_coeffs(r);
                Point::new(
                    c[1] + 2.0 * c[3] * x + c[4] * y,
                    c[2] - 2.0 * c[3] * y + c[4] * x,
                )
            }
            (Case::LdmRelaxation, r) => {
                let d = (-self.time / self.relaxation_time()).exp();
                let g0 = self.initial_gradient(r, p);
                let gi = self.equilibrium_gradient(r, p);
                d * (g0 - gi) + gi
            }
        }
    }

    fn patch_coeffs(&self, r: Region) -> [f64; 5] {
        let mut c = match r {
            Region::Int => PATCH_INT,
            Region::Ext => PATCH_EXT,
        };
        if self.patch_degree < 2 {
            c[3] = 0.0;
            c[4] = 0.0;
        }
        c
    }

    /// Initial state of the relaxation case (no potential jump).
    pub fn initial(&self, r: Region, p: Point) -> f64 {
        let e = self.field;
        match r {
            Region::Int => e * 2.0 * self.sigma_ext / (self.sigma_ext + self.sigma_int) * p.x,
            Region::Ext => e * (1.0 + self.contrast() * self.radius * self.radius / p.dot(p)) * p.x,
        }
    }

    /// Equilibrium state of the relaxation case (interior field screened out).
    pub fn equilibrium(&self, r: Region, p: Point) -> f64 {
        match r {
            Region::Int => 0.0,
            Region::Ext => self.field * (1.0 + self.radius * self.radius / p.dot(p)) * p.x,
        }
    }

    fn initial_gradient(&self, r: Region, p: Point) -> Point {
        let e = self.field;
        match r {
            Region::Int => Point::new(
                e * 2.0 * self.sigma_ext / (self.sigma_ext + self.sigma_int),
                0.0,
            ),
            Region::Ext => {
                e * (Point::new(1.0, 0.0) + self.contrast() * dipole_gradient(self.radius, p))
            }
        }
    }

    fn equilibrium_gradient(&self, r: Region, p: Point) -> Point {
        match r {
            Region::Int => Point::default(),
            Region::Ext => self.field * (Point::new(1.0, 0.0) + dipole_gradient(self.radius, p)),
        }
    }

    /// `f = -div(sigma grad u)`.
    pub fn source(&self, _r: Region, _p: Point) -> f64 {
        0.0
    }

    /// `u_int - u_ext` at `p`.
    pub fn jump(&self, p: Point) -> f64 {
        self.exact(Region::Int, p) - self.exact(Region::Ext, p)
    }

    /// `(sigma_int grad u_int - sigma_ext grad u_ext) . n` at `p`.
    pub fn flux_jump(&self, p: Point, n: Point) -> f64 {
        (self.sigma_int * self.gradient(Region::Int, p)
            - self.sigma_ext * self.gradient(Region::Ext, p))
        .dot(n)
    }

    pub fn dirichlet(&self, p: Point) -> f64 {
        self.exact(Region::Ext, p)
    }
}

/// Gradient of `R^2 x / |x|^2`.
fn dipole_gradient(radius: f64, p: Point) -> Point {
    let r2 = p.dot(p);
    let c = radius * radius / (r2 * r2);
    Point::new(c * (r2 - 2.0 * p.x * p.x), c * (-2.0 * p.x * p.y))
}

impl ProblemData for Scenario {
    fn source(&self, region: Region, x: Point) -> f64 {
        Scenario::source(self, region, x)
    }

    fn jump(&self, _edge: usize, x: Point) -> f64 {
        Scenario::jump(self, x)
    }

    fn flux_jump(&self, _edge: usize, x: Point, n: Point) -> f64 {
        Scenario::flux_jump(self, x, n)
    }

    fn dirichlet(&self, x: Point) -> f64 {
        Scenario::dirichlet(self, x)
    }
}
