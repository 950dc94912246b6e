//! A 1-D basic function `Φ` with vanishing moments up to order `L`.
//!
//! `Φ = g + ψ·P`: `g` is a smooth plateau equal to one on `[-C1, C1]` and
//! vanishing for `|x| ≥ ρ = C1 + (C3-C1)/4`; `ψ` is a smooth bump on the annulus
//! `ρ ≤ |x| ≤ C3`; `P` is an even polynomial chosen so that the moments of
//! order `0..=L` vanish. Multiplying a single bump by a polynomial cannot work
//! here, since a polynomial orthogonal to low powers must change sign inside
//! `[-C1, C1]`; keeping the correction on the annulus leaves `Φ = 1` on the core.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Midpoint step of the high-accuracy quadrature used to solve for `P`.
const SOLVE_STEP: f64 = 1.0 / 65536.0;

/// `e^{-1/t}` for `t > 0`, else `0`.
fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: `0` for `t ≤ 0`, `1` for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    let a = h(t);
    let b = h(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicFunction {
    pub l: u32,
    pub lambda0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Inner edge of the correction annulus.
    pub rho: f64,
    /// `P(x) = Σ_i coeffs[i] T_i(u)`, `u` the affine image of `x²` taking the
    /// annulus onto `[-1, 1]`; an even polynomial of degree `2·(len-1) ≤ L`.
    pub coeffs: Vec<f64>,
}

impl BasicFunction {
    fn plateau(&self, ax: f64) -> f64 {
        1.0 - smooth_step((ax - self.c1) / (self.rho - self.c1))
    }

    fn annulus(&self, ax: f64) -> f64 {
        let u = (ax - self.rho) / (self.c3 - self.rho);
        if u <= 0.0 || u >= 1.0 {
            0.0
        } else {
            // peak value one at u = 1/2
            (4.0 - 1.0 / (u * (1.0 - u))).exp()
        }
    }

    fn u(&self, x: f64) -> f64 {
        let (a, b) = (self.rho * self.rho, self.c3 * self.c3);
        (2.0 * x * x - a - b) / (b - a)
    }

    fn poly(&self, x: f64) -> f64 {
        let u = self.u(x);
        chebyshev(u, self.coeffs.len())
            .iter()
            .zip(&self.coeffs)
            .map(|(t, a)| t * a)
            .sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= self.c3 {
            return 0.0;
        }
        if ax <= self.c1 {
            return 1.0;
        }
        self.plateau(ax) + self.annulus(ax) * self.poly(x)
    }

    /// `∫ x^γ Φ(x) dx` by the composite midpoint rule with the given step on
    /// `[-C3, C3]`.
    pub fn moment(&self, gamma: u32, step: f64) -> f64 {
        midpoint(-self.c3, self.c3, step, |x| x.powi(gamma as i32) * self.eval(x))
    }

    pub fn moments(&self, step: f64) -> Vec<f64> {
        (0..=self.l).map(|g| self.moment(g, step)).collect()
    }

    /// `min Φ` over a uniform grid of `[-C1, C1]`.
    pub fn core_min(&self, points: usize) -> f64 {
        grid(-self.c1, self.c1, points)
            .map(|x| self.eval(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |Φ|` over a grid of `C3 ≤ |x| ≤ 2 C3`.
    pub fn outside_max(&self, points: usize) -> f64 {
        grid(self.c3, 2.0 * self.c3, points)
            .flat_map(|x| [x, -x])
            .map(|x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }
}

/// `T_0(u), .., T_(len-1)(u)`
fn chebyshev(u: f64, len: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(len);
    for i in 0..len {
        t.push(match i {
            0 => 1.0,
            1 => u,
            _ => 2.0 * u * t[i - 1] - t[i - 2],
        });
    }
    t
}

fn grid(a: f64, b: f64, points: usize) -> impl Iterator<Item = f64> {
    let n = points.max(2);
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn midpoint(a: f64, b: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = ((b - a) / step).round().max(1.0) as usize;
    let hh = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * hh)).sum::<f64>() * hh
}

/// Builds `Φ` with moments of order `0..=L` vanishing, for a given `λ0 > 1`.
/// Constants: `C3 = 1`, `C1 = (1 + 1/λ0)/2`, `C2 = 1`, so that
/// `C3/λ0 < C1 < C3 < λ0 C1`.
pub fn build_basic_function(l: u32, lambda0: f64) -> Result<BasicFunction> {
    if !lambda0.is_finite() || lambda0 <= 1.0 {
        return Err(Error::InvalidInput(format!(
            "basic function needs lambda0 > 1, got {lambda0}"
        )));
    }
    let c3 = 1.0;
    let c1 = (1.0 + 1.0 / lambda0) / 2.0 * c3;
    let mut phi = BasicFunction {
        l,
        lambda0,
        c1,
        c2: 1.0,
        c3,
        rho: c1 + (c3 - c1) / 4.0,
        coeffs: Vec::new(),
    };
    // Odd moments vanish by symmetry; the even ones 0, 2, .., 2(m-1) ≤ L give a
    // square system in the coefficients of T_0(u), .., T_(m-1)(u).
    let m = (l / 2) as usize + 1;
    let mut mat = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for i in 0..m {
        let gi = 2 * i as i32;
        rhs[i] = -2.0 * midpoint(0.0, phi.rho, SOLVE_STEP, |x| x.powi(gi) * phi.plateau(x));
        for k in 0..m {
            mat[(i, k)] = 2.0
                * midpoint(phi.rho, phi.c3, SOLVE_STEP, |x| {
                    x.powi(gi) * phi.annulus(x) * chebyshev(phi.u(x), k + 1)[k]
                });
        }
    }
    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("moment system is singular".into()))?;
    phi.coeffs = sol.iter().copied().collect();
    Ok(phi)
}
