//! Closed-form reference solutions for convergence studies.

use crate::grid::{Field, GridSpec};

/// Neumann solution of `u_t = d lap u` on the grid's box for initial
/// data `offset + amplitude cos(pi x / Lx) [cos(pi y / Ly)]`: the cosine
/// mode decays with its eigenvalue, so
/// `u(x, t) = offset + amplitude e^(-d mu t) cos(pi x / Lx) [cos(pi y / Ly)]`
/// with `mu = (pi/Lx)^2 + [(pi/Ly)^2]`.
pub fn heat_cosine_solution(
    grid: &GridSpec,
    offset: f64,
    amplitude: f64,
    diffusivity: f64,
    t: f64,
) -> Field {
    let pi = std::f64::consts::PI;
    let kx = pi / grid.length_x();
    let (mu, two_d) = if grid.dim() == 2 {
        let ky = pi / grid.length_y();
        (kx * kx + ky * ky, Some(ky))
    } else {
        (kx * kx, None)
    };
    let decay = (-diffusivity * mu * t).exp();
    Field::from_fn(grid, |x, y| {
        let mode = match two_d {
            Some(ky) => (kx * x).cos() * (ky * y).cos(),
            None => (kx * x).cos(),
        };
        offset + amplitude * decay * mode
    })
}

/// Self-similar source solution of the one-dimensional porous medium
/// equation `u_t = (u^m)_xx`:
///
/// `u(x, t) = t^(-alpha) (C - kappa x^2 t^(-2 alpha))_+^(1/(m-1))`
///
/// with `alpha = 1/(m+1)` and `kappa = (m-1)/(2m(m+1))`, centered at the
/// origin. Compactly supported with edge `sqrt(C/kappa) t^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barenblatt {
    pub m: f64,
    pub c: f64,
}

impl Barenblatt {
    pub fn alpha(&self) -> f64 {
        1.0 / (self.m + 1.0)
    }

    pub fn kappa(&self) -> f64 {
        (self.m - 1.0) / (2.0 * self.m * (self.m + 1.0))
    }

    /// Profile value at offset `x` from the center at absolute time `t > 0`.
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let alpha = self.alpha();
        let ta = t.powf(-alpha);
        let inner = self.c - self.kappa() * x * x * ta * ta;
        if inner <= 0.0 {
            0.0
        } else {
            ta * inner.powf(1.0 / (self.m - 1.0))
        }
    }

    /// Half-width of the support at time `t`.
    pub fn support_halfwidth(&self, t: f64) -> f64 {
        (self.c / self.kappa()).sqrt() * t.powf(self.alpha())
    }

    /// Sample the profile at the grid's cell centers, centered in the
    /// domain, at absolute time `t`.
    pub fn sample(&self, grid: &GridSpec, t: f64) -> Field {
        let mid = grid.length_x() / 2.0;
        Field::from_fn(grid, |x, _| self.eval(x - mid, t))
    }
}

/// Max-norm difference of interior values.
pub fn error_linf(a: &Field, b: &Field) -> f64 {
    a.interior()
        .zip(b.interior())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// L1 difference of interior values (cell volume weighted).
pub fn error_l1(a: &Field, b: &Field, grid: &GridSpec) -> f64 {
    a.interior()
        .zip(b.interior())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * grid.cell_volume()
}
