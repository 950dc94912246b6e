//! `L1[0, 2π]` norms of lacunary sums `w_K(t) = Σ_{j=1}^K b_j e^{i 2^j t}`.
//!
//! The sum is accumulated on a uniform grid `t_m = 2π m/G`; the phase of
//! `2^j t_m` is looked up exactly as `(2^j m) mod G` in a table of `G` roots
//! of unity, so no angle is ever reduced in floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryRow {
    pub k: usize,
    /// `‖w_K‖_{L1[0,2π]}`
    pub l1: f64,
    /// `Σ_{j≤K} |b_j|²`
    pub l2_partial: f64,
    /// `2π Σ_{j≤K} |b_j|`
    pub triangle_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryReport {
    pub k: usize,
    pub grid_size: usize,
    pub rows: Vec<LacunaryRow>,
}

impl LacunaryReport {
    pub fn l1(&self, k: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.k == k).map(|r| r.l1)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l1 > w[0].l1)
    }

    /// `max/min` of the L1 trace over `K ≥ 1`.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.l1), hi.max(r.l1)));
        hi / lo
    }

    pub fn triangle_ok(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.l1 >= 0.0 && r.l1 <= r.triangle_bound * (1.0 + 1e-12))
    }

    pub fn l2_nondecreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l2_partial >= w[0].l2_partial)
    }
}

/// Rows for `K' = 1..=K`; `b(j)` supplies the real coefficients for `j ≥ 1`.
pub fn lacunary_l1(b: impl Fn(usize) -> f64, k: usize, grid: usize) -> Result<LacunaryReport> {
    if !(1..=40).contains(&k) {
        return Err(Error::InvalidInput(format!("K must be in 1..=40, got {k}")));
    }
    let need = 4usize << k;
    if grid < need {
        return Err(Error::InvalidInput(format!(
            "grid below Nyquist: K = {k} needs grid >= 4*2^K = {need}, got {grid}"
        )));
    }
    let tau = std::f64::consts::TAU;
    let table: Vec<(f64, f64)> = (0..grid)
        .map(|m| {
            let th = tau * m as f64 / grid as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let g = grid as u128;
    let mut re = vec![0.0f64; grid];
    let mut im = vec![0.0f64; grid];
    let mut rows = Vec::with_capacity(k);
    let mut l2 = 0.0;
    let mut l1b = 0.0;
    for j in 1..=k {
        let bj = b(j);
        l2 += bj * bj;
        l1b += bj.abs();
        let freq = (1u128 << j) % g;
        for m in 0..grid {
            let idx = ((freq * m as u128) % g) as usize;
            let (c, s) = table[idx];
            re[m] += bj * c;
            im[m] += bj * s;
        }
        let sum: f64 = re.iter().zip(&im).map(|(x, y)| x.hypot(*y)).sum();
        rows.push(LacunaryRow {
            k: j,
            l1: tau / grid as f64 * sum,
            l2_partial: l2,
            triangle_bound: tau * l1b,
        });
    }
    Ok(LacunaryReport {
        k,
        grid_size: grid,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients() {
        let rep = lacunary_l1(|_| 0.0, 6, 1 << 10).unwrap();
        assert!(rep.rows.iter().all(|r| r.l1 == 0.0 && r.l2_partial == 0.0));
    }

    #[test]
    fn single_term_has_modulus_one() {
        let rep = lacunary_l1(|j| if j == 3 { 1.0 } else { 0.0 }, 4, 1 << 8).unwrap();
        let l1 = rep.l1(4).unwrap();
        assert!((l1 - std::f64::consts::TAU).abs() < 1e-12);
        assert!(rep.triangle_ok());
    }

    #[test]
    fn nyquist_guard() {
        assert!(lacunary_l1(|_| 1.0, 12, 1 << 13).is_err());
        assert!(lacunary_l1(|_| 1.0, 12, 1 << 14).is_ok());
    }
}
