//! Sampled initial and boundary data on uniform grids.
//!
//! The spectral maps consume `q0` on `[0, L]` and the triples
//! `(g0, g1, g2)` at `x = 0`, `(f0, f1, f2)` at `x = L` on `[0, T]`.
//! Everything is stored as equispaced samples; evaluation between samples
//! uses 4-point Lagrange (cubic) interpolation so that a 4th-order
//! integrator keeps its order on sampled data.

use crate::error::{Error, Result};

/// Real-valued function sampled on a uniform grid over `[a, b]`.
#[derive(Debug, Clone)]
pub struct SampledFn {
    pub a: f64,
    pub b: f64,
    pub values: Vec<f64>,
}

impl SampledFn {
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DataValidation("sampled function needs at least 2 samples".into()));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::DataValidation(format!("bad interval [{a}, {b}]")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DataValidation("non-finite sample".into()));
        }
        Ok(SampledFn { a, b, values })
    }

    pub fn from_fn(a: f64, b: f64, n_intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = (b - a) / n_intervals as f64;
        let values = (0..=n_intervals).map(|i| f(a + i as f64 * h)).collect();
        SampledFn::new(a, b, values)
    }

    pub fn n_intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n_intervals() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Cubic Lagrange interpolation on the 4-point stencil around `x`,
    /// clamped near the ends. Exact for polynomials up to degree 3.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n_intervals();
        let h = self.step();
        let s = ((x - self.a) / h).clamp(0.0, n as f64);
        let cell = (s.floor() as usize).min(n - 1);
        // choose stencil [j, j+3] containing the cell, shifted inward at ends
        let j = cell.saturating_sub(1).min(n.saturating_sub(3));
        let tau = s - j as f64; // position in stencil units, in [0, 3]
        let v = &self.values[j..j + 4];
        // Lagrange basis on nodes 0,1,2,3
        let t0 = tau;
        let t1 = tau - 1.0;
        let t2 = tau - 2.0;
        let t3 = tau - 3.0;
        (-v[0] * t1 * t2 * t3 + 3.0 * v[1] * t0 * t2 * t3 - 3.0 * v[2] * t0 * t1 * t3
            + v[3] * t0 * t1 * t2)
            / 6.0
    }

    /// Largest absolute second difference, a smoothness proxy for validation.
    pub fn max_second_difference(&self) -> f64 {
        self.values
            .windows(3)
            .fold(0.0f64, |m, w| m.max((w[0] - 2.0 * w[1] + w[2]).abs()))
    }
}

/// Samples of the initial condition `q0` on `[0, L]`.
#[derive(Debug, Clone)]
pub struct InitialProfile {
    pub q0: SampledFn,
}

impl InitialProfile {
    /// Validates finiteness, the minimum grid size, and the smoothness
    /// proxy (second differences below `smoothness_bound`).
    pub fn new(length: f64, values: Vec<f64>, smoothness_bound: f64) -> Result<Self> {
        if values.len() < 9 {
            return Err(Error::DataValidation(format!(
                "initial profile needs at least 9 samples (N_x >= 8), got {}",
                values.len()
            )));
        }
        let q0 = SampledFn::new(0.0, length, values)?;
        let d2 = q0.max_second_difference();
        if d2 > smoothness_bound {
            return Err(Error::DataValidation(format!(
                "initial profile fails the smoothness proxy: max second difference {d2:.3e} > {smoothness_bound:.3e}"
            )));
        }
        Ok(InitialProfile { q0 })
    }

    pub fn length(&self) -> f64 {
        self.q0.b
    }

    pub fn n_x(&self) -> usize {
        self.q0.n_intervals()
    }
}

/// Boundary trace triple `(h0, h1, h2) = (q, q_x, q_xx)` at a fixed edge.
#[derive(Debug, Clone)]
pub struct TraceTriple {
    pub h0: SampledFn,
    pub h1: SampledFn,
    pub h2: SampledFn,
}

impl TraceTriple {
    pub fn is_zero(&self) -> bool {
        self.h0.is_zero() && self.h1.is_zero() && self.h2.is_zero()
    }
}

/// Sampled boundary data at both edges over `[0, T]`.
#[derive(Debug, Clone)]
pub struct BoundaryTraces {
    pub t_final: f64,
    /// traces at x = 0: g0, g1, g2
    pub left: TraceTriple,
    /// traces at x = L: f0, f1, f2
    pub right: TraceTriple,
}

/// Corner-compatibility defects between boundary traces and the initial
/// profile at the two space-time corners. Reported, never fatal.
#[derive(Debug, Clone)]
pub struct CornerReport {
    /// |g_j(0) - d^j q0/dx^j (0)| for j = 0,1,2
    pub left: [f64; 3],
    /// |f_j(0) - d^j q0/dx^j (L)| for j = 0,1,2
    pub right: [f64; 3],
}

impl CornerReport {
    pub fn max(&self) -> f64 {
        self.left.iter().chain(self.right.iter()).fold(0.0f64, |m, v| m.max(*v))
    }
}

impl BoundaryTraces {
    pub fn new(t_final: f64, left: TraceTriple, right: TraceTriple) -> Result<Self> {
        for tr in [&left, &right] {
            for h in [&tr.h0, &tr.h1, &tr.h2] {
                if (h.a, h.b) != (0.0, t_final) {
                    return Err(Error::DataValidation(format!(
                        "trace sampled on [{}, {}], expected [0, {t_final}]",
                        h.a, h.b
                    )));
                }
            }
        }
        Ok(BoundaryTraces { t_final, left, right })
    }

    pub fn zero(t_final: f64, n_t: usize) -> Self {
        let z = || SampledFn::new(0.0, t_final, vec![0.0; n_t + 1]).unwrap();
        BoundaryTraces {
            t_final,
            left: TraceTriple { h0: z(), h1: z(), h2: z() },
            right: TraceTriple { h0: z(), h1: z(), h2: z() },
        }
    }

    /// Compares trace values at t = 0 against one-sided finite-difference
    /// derivatives of the initial profile at the matching corner.
    pub fn corner_report(&self, profile: &InitialProfile) -> CornerReport {
        let q = &profile.q0;
        let h = q.step();
        let n = q.n_intervals();
        let v = &q.values;
        // 5-point one-sided first and second derivatives, 4th / 3rd order
        let d1_left = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
        let d1_right = (25.0 * v[n] - 48.0 * v[n - 1] + 36.0 * v[n - 2] - 16.0 * v[n - 3] + 3.0 * v[n - 4]) / (12.0 * h);
        let d2_left = (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4]) / (12.0 * h * h);
        let d2_right = (35.0 * v[n] - 104.0 * v[n - 1] + 114.0 * v[n - 2] - 56.0 * v[n - 3] + 11.0 * v[n - 4]) / (12.0 * h * h);
        CornerReport {
            left: [
                (self.left.h0.values[0] - v[0]).abs(),
                (self.left.h1.values[0] - d1_left).abs(),
                (self.left.h2.values[0] - d2_left).abs(),
            ],
            right: [
                (self.right.h0.values[0] - v[n]).abs(),
                (self.right.h1.values[0] - d1_right).abs(),
                (self.right.h2.values[0] - d2_right).abs(),
            ],
        }
    }
}
