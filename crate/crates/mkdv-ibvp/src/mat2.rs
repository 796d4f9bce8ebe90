//! 2x2 complex matrix kernel and the sigma3 conjugation calculus.
//!
//! Everything downstream — eigenfunctions, spectral matrices, jump data,
//! Riemann-Hilbert densities — lives in `Mat2C`. The Lax pair of
//! `q_t - q_xxx + 6 lambda q^2 q_x = 0` has coefficient matrices
//!
//! ```text
//! Q  = [[0, q], [lambda q, 0]],
//! Qt = -4 k^2 Q - 2ik (Q^2 + Q_x) sigma3 - 2 Q^3 + Q_xx,
//! ```
//!
//! and the conjugation `e^{theta sigma3^} A = e^{theta sigma3} A e^{-theta sigma3}`
//! scales the (1,2) entry by `e^{2 theta}` and the (2,1) entry by `e^{-2 theta}`.

use crate::error::{Error, Result, EXP_GUARD};
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

pub const ZERO_C: C64 = C64::new(0.0, 0.0);
pub const ONE_C: C64 = C64::new(1.0, 0.0);
pub const I_C: C64 = C64::new(0.0, 1.0);

/// Sign parameter of the cubic nonlinearity, `lambda = +1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn f(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::Config(format!("lambda must be +1 or -1, got {v}")))
        }
    }
}

/// Model parameters: nonlinearity sign and the space-time box `[0,L] x [0,T]`.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    pub lambda: Sign,
    pub length: f64,
    pub t_final: f64,
}

impl ModelParams {
    pub fn new(lambda: Sign, length: f64, t_final: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!("interval length must be finite and positive, got {length}")));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::Config(format!("final time must be finite and positive, got {t_final}")));
        }
        Ok(ModelParams { lambda, length, t_final })
    }
}

/// Spectral-plane phase point: the exponent of `e^{i(kx - 4k^3 t) sigma3}`
/// is evaluated from these three values.
#[derive(Debug, Clone, Copy)]
pub struct PhaseArgs {
    pub k: C64,
    pub x: f64,
    pub t: f64,
}

impl PhaseArgs {
    pub fn new(k: C64, x: f64, t: f64, params: &ModelParams) -> Result<Self> {
        if !(0.0..=params.length).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, {}]", params.length)));
        }
        if !(0.0..=params.t_final).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", params.t_final)));
        }
        Ok(PhaseArgs { k, x, t })
    }

    /// `i (k x - 4 k^3 t)`.
    pub fn phase(&self) -> C64 {
        I_C * (self.k * self.x - 4.0 * self.k * self.k * self.k * self.t)
    }
}

/// Dense 2x2 complex matrix, row-major entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
}

impl Mat2C {
    pub const fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Mat2C { m11, m12, m21, m22 }
    }

    pub const fn identity() -> Self {
        Mat2C::new(ONE_C, ZERO_C, ZERO_C, ONE_C)
    }

    pub const fn zero() -> Self {
        Mat2C::new(ZERO_C, ZERO_C, ZERO_C, ZERO_C)
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Mat2C::new(d1, ZERO_C, ZERO_C, d2)
    }

    /// `diag(e^{z}, e^{-z})`, the exponential of `z sigma3`. Guarded.
    pub fn exp_sigma3(z: C64) -> Result<Self> {
        if z.re.abs() > EXP_GUARD {
            return Err(Error::ExponentRange { re: z.re, ctx: "exp_sigma3" });
        }
        Ok(Mat2C::diag(z.exp(), (-z).exp()))
    }

    pub fn trace(&self) -> C64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return Err(Error::LinearSolve("singular 2x2 matrix".into()));
        }
        let inv = 1.0 / d;
        Ok(Mat2C::new(self.m22 * inv, -self.m12 * inv, -self.m21 * inv, self.m11 * inv))
    }

    pub fn conj_entrywise(&self) -> Self {
        Mat2C::new(self.m11.conj(), self.m12.conj(), self.m21.conj(), self.m22.conj())
    }

    /// Largest entry magnitude; the norm used by every tolerance check here.
    pub fn norm_max(&self) -> f64 {
        self.m11
            .norm()
            .max(self.m12.norm())
            .max(self.m21.norm())
            .max(self.m22.norm())
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2C::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// Matrix exponential via the trace split and the closed form for
    /// traceless 2x2 matrices: with `B = M - (tr/2) I` and `delta^2 = -det B`,
    /// `exp(M) = e^{tr/2) (cosh(delta) I + sinhc(delta) B)`.
    pub fn exp(&self) -> Self {
        let half_tr = self.trace() * 0.5;
        let b = Mat2C::new(self.m11 - half_tr, self.m12, self.m21, self.m22 - half_tr);
        let delta_sq = b.m11 * b.m11 + b.m12 * b.m21;
        let delta = delta_sq.sqrt();
        let (ch, shc) = if delta.norm() < 1e-6 {
            // series for sinh(d)/d, cosh(d) at small d
            let d2 = delta_sq;
            (
                ONE_C + d2 * 0.5 + d2 * d2 / 24.0,
                ONE_C + d2 / 6.0 + d2 * d2 / 120.0,
            )
        } else {
            (delta.cosh(), delta.sinh() / delta)
        };
        let scale = half_tr.exp();
        Mat2C::new(
            (ch + shc * b.m11) * scale,
            shc * b.m12 * scale,
            shc * b.m21 * scale,
            (ch - shc * b.m11) * scale,
        )
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.m11 - o.m11, self.m12 - o.m12, self.m21 - o.m21, self.m22 - o.m22)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        Mat2C::new(-self.m11, -self.m12, -self.m21, -self.m22)
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

impl Mul<C64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: C64) -> Mat2C {
        self.scale(s)
    }
}

/// `e^{theta sigma3^} A`: diagonal untouched, `m12 -> m12 e^{2 theta}`,
/// `m21 -> m21 e^{-2 theta}`. Errors out instead of overflowing when
/// `|Re(2 theta)|` leaves the double-precision exponent range.
pub fn sigma3_hat_conj(a: Mat2C, theta: C64) -> Result<Mat2C> {
    let two_theta = theta * 2.0;
    if two_theta.re.abs() > EXP_GUARD {
        return Err(Error::ExponentRange { re: two_theta.re, ctx: "sigma3_hat_conj" });
    }
    let e_plus = two_theta.exp();
    let e_minus = (-two_theta).exp();
    Ok(Mat2C::new(a.m11, a.m12 * e_plus, a.m21 * e_minus, a.m22))
}

/// Lax-pair x-coefficient `Q = [[0, q], [lambda q, 0]]`.
pub fn build_q(qval: f64, lambda: Sign) -> Mat2C {
    Mat2C::new(ZERO_C, C64::new(qval, 0.0), C64::new(lambda.f() * qval, 0.0), ZERO_C)
}

/// Lax-pair t-coefficient `Qt = -4k^2 Q - 2ik(Q^2 + Q_x) sigma3 - 2Q^3 + Q_xx`.
///
/// Uses `Q^2 = lambda q^2 I` and `Q^3 = lambda q^2 Q`, so the whole matrix is
/// assembled entrywise without matrix powers:
///
/// ```text
/// diag:  -(+/-) 2ik lambda q^2
/// (1,2): -4k^2 q + 2ik q_x - 2 lambda q^3 + q_xx
/// (2,1): lambda (-4k^2 q - 2ik q_x + q_xx) - 2 q^3
/// ```
pub fn build_qtilde(qval: f64, qx: f64, qxx: f64, k: C64, lambda: Sign) -> Mat2C {
    let l = lambda.f();
    let two_ik = 2.0 * I_C * k;
    let four_k2 = 4.0 * k * k;
    let q3 = qval * qval * qval;
    let d = -two_ik * (l * qval * qval);
    let m12 = -four_k2 * qval + two_ik * qx - 2.0 * l * q3 + qxx;
    let m21 = (-four_k2 * qval - two_ik * qx + qxx) * l - 2.0 * q3;
    Mat2C::new(d, m12, m21, -d)
}
