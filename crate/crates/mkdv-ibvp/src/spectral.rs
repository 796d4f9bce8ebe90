//! Direct spectral maps: eigenfunctions and the spectral matrices.
//!
//! The three spectral matrices are corner values of eigenfunctions of the
//! Lax pair, computed here by transfer-matrix integration in the
//! un-conjugated frame `Phi = mu e^{i(kx - 4k^3 t) sigma3}`:
//!
//! * `s(k)  = mu3(0,0,k)` — from the initial profile `q0` (x-system across `[0,L]` at `t=0`),
//! * `S(k)  = mu1(0,0,k)` — from the `x = 0` traces (t-system across `[0,T]`),
//! * `S1(k) = mu4(L,0,k)` — from the `x = L` traces.
//!
//! Each matrix has the structure `[[conj(a(conj k)), b(k)], [lambda conj(b(conj k)), a(k)]]`
//! with unit determinant, which the tests check as invariants. `SpectralData`
//! memoizes evaluations per `k` (the contour assembly re-queries the same
//! nodes many times) and derives the scalar combinations `d`, `d1` and the
//! jump ratios `gamma`, `Gamma`, `Gamma1`, `Gamma2`.

use crate::error::{Error, Result, EXP_GUARD};
use crate::grid::{BoundaryTraces, InitialProfile, SampledFn, TraceTriple};
use crate::integrate::{transfer_t, transfer_x, IntegratorOpts};
use crate::mat2::{Mat2C, ModelParams, Sign, C64, I_C};
use dashmap::DashMap;

/// `s(k) = mu3(0,0,k)`: x-transfer of `e^{ikL sigma3}` from `x = L` to `x = 0`
/// along the initial profile at `t = 0`. Entire in `k`.
pub fn compute_s(profile: &InitialProfile, k: C64, lambda: Sign, opts: &IntegratorOpts) -> Result<Mat2C> {
    let l = profile.length();
    let init = Mat2C::exp_sigma3(I_C * k * l)?;
    transfer_x(&profile.q0, k, lambda, l, 0.0, init, opts)
}

/// `S(k) = mu1(0,0,k)`: t-transfer of `e^{-4ik^3 T sigma3}` from `t = T` to
/// `t = 0` along the `x = 0` traces.
pub fn compute_s_left(traces: &TraceTriple, k: C64, params: &ModelParams, opts: &IntegratorOpts) -> Result<Mat2C> {
    let t_final = params.t_final;
    let init = Mat2C::exp_sigma3(-4.0 * I_C * k * k * k * t_final)?;
    transfer_t(traces, k, params.lambda, t_final, 0.0, init, opts)
}

/// `S1(k) = mu4(L,0,k)`: same as [`compute_s_left`] with the `x = L` traces.
pub fn compute_s_right(traces: &TraceTriple, k: C64, params: &ModelParams, opts: &IntegratorOpts) -> Result<Mat2C> {
    compute_s_left(traces, k, params, opts)
}

/// Extracts the defining scalar pair from a spectral matrix:
/// `a` is the (2,2) entry, `b` the (1,2) entry.
pub fn scalar_entries(m: &Mat2C) -> (C64, C64) {
    (m.m22, m.m12)
}

/// Eigenfunction index: which corner the integral equation is normalized at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuIndex {
    Mu1,
    Mu2,
    Mu3,
    Mu4,
}

impl MuIndex {
    /// Normalization corner `(x_n, t_n)`.
    pub fn corner(self, params: &ModelParams) -> (f64, f64) {
        match self {
            MuIndex::Mu1 => (0.0, params.t_final),
            MuIndex::Mu2 => (0.0, 0.0),
            MuIndex::Mu3 => (params.length, 0.0),
            MuIndex::Mu4 => (params.length, params.t_final),
        }
    }
}

/// Data needed to evaluate an eigenfunction at a general interior point:
/// the boundary traces for the vertical leg and the field row `q(., t)`
/// for the horizontal leg at the evaluation time.
pub struct MuEnv<'a> {
    pub params: &'a ModelParams,
    pub left: &'a TraceTriple,
    pub right: &'a TraceTriple,
    /// `q(., t)` sampled across `[0, L]` at the evaluation time
    pub q_row: &'a SampledFn,
}

/// `mu_n(x,t,k)` by composing the vertical leg (t-system at the corner edge)
/// with the horizontal leg (x-system at level `t`), with the conjugation
/// factors applied analytically at the corner and at the evaluation point.
///
/// Exponential factors are guard-checked; evaluation is refused for `k`
/// where the corner or endpoint factor leaves the representable range,
/// which corresponds to leaving the eigenfunction's boundedness domain.
pub fn eval_mu(n: MuIndex, x: f64, t: f64, k: C64, env: &MuEnv, opts: &IntegratorOpts) -> Result<Mat2C> {
    let params = env.params;
    if !(0.0..=params.length).contains(&x) || !(0.0..=params.t_final).contains(&t) {
        return Err(Error::Domain(format!("({x}, {t}) outside the space-time box")));
    }
    let (xn, tn) = n.corner(params);
    let phase_corner = I_C * (k * xn - 4.0 * k * k * k * tn);
    if phase_corner.re.abs() > EXP_GUARD {
        return Err(Error::ExponentRange { re: phase_corner.re, ctx: "eval_mu corner factor" });
    }
    let mut phi = Mat2C::exp_sigma3(phase_corner)?;
    // vertical leg at x = xn
    let traces = if xn == 0.0 { env.left } else { env.right };
    phi = transfer_t(traces, k, params.lambda, tn, t, phi, opts)?;
    // horizontal leg at level t
    phi = transfer_x(env.q_row, k, params.lambda, xn, x, phi, opts)?;
    let phase_here = I_C * (k * x - 4.0 * k * k * k * t);
    if phase_here.re.abs() > EXP_GUARD {
        return Err(Error::ExponentRange { re: phase_here.re, ctx: "eval_mu endpoint factor" });
    }
    Ok(phi * Mat2C::exp_sigma3(-phase_here)?)
}

/// The four jump ratios built from the spectral functions.
#[derive(Debug, Clone, Copy)]
pub struct GammaFns {
    /// `gamma = b / conj(a(conj k))`
    pub gamma: C64,
    /// `Gamma`, the left-boundary ratio
    pub big_gamma: C64,
    /// `Gamma1`, the right-boundary ratio
    pub big_gamma1: C64,
    /// `Gamma2`, the circle-arc entry
    pub big_gamma2: C64,
}

fn key(k: C64) -> (u64, u64) {
    (k.re.to_bits(), k.im.to_bits())
}

/// Memoized evaluators for all spectral functions of one data set.
///
/// Evaluations at `k` and `conj(k)` are independent integrations; the
/// structural symmetry between them is an invariant the tests verify, not
/// something the cache assumes.
pub struct SpectralData {
    pub params: ModelParams,
    pub profile: InitialProfile,
    pub traces: BoundaryTraces,
    pub opts: IntegratorOpts,
    cache_s: DashMap<(u64, u64), Mat2C>,
    cache_left: DashMap<(u64, u64), Mat2C>,
    cache_right: DashMap<(u64, u64), Mat2C>,
}

impl SpectralData {
    pub fn new(params: ModelParams, profile: InitialProfile, traces: BoundaryTraces, opts: IntegratorOpts) -> Result<Self> {
        if (profile.length() - params.length).abs() > 1e-12 {
            return Err(Error::DataValidation(format!(
                "profile length {} disagrees with params.length {}",
                profile.length(),
                params.length
            )));
        }
        if (traces.t_final - params.t_final).abs() > 1e-12 {
            return Err(Error::DataValidation(format!(
                "traces final time {} disagrees with params.t_final {}",
                traces.t_final, params.t_final
            )));
        }
        Ok(SpectralData {
            params,
            profile,
            traces,
            opts,
            cache_s: DashMap::new(),
            cache_left: DashMap::new(),
            cache_right: DashMap::new(),
        })
    }

    pub fn s_at(&self, k: C64) -> Result<Mat2C> {
        if let Some(v) = self.cache_s.get(&key(k)) {
            return Ok(*v);
        }
        let v = compute_s(&self.profile, k, self.params.lambda, &self.opts)?;
        self.cache_s.insert(key(k), v);
        Ok(v)
    }

    pub fn left_at(&self, k: C64) -> Result<Mat2C> {
        if let Some(v) = self.cache_left.get(&key(k)) {
            return Ok(*v);
        }
        let v = compute_s_left(&self.traces.left, k, &self.params, &self.opts)?;
        self.cache_left.insert(key(k), v);
        Ok(v)
    }

    pub fn right_at(&self, k: C64) -> Result<Mat2C> {
        if let Some(v) = self.cache_right.get(&key(k)) {
            return Ok(*v);
        }
        let v = compute_s_right(&self.traces.right, k, &self.params, &self.opts)?;
        self.cache_right.insert(key(k), v);
        Ok(v)
    }

    // scalar spectral functions; `*_bar(k)` is the Schwartz dual
    // `conj(f(conj k))`, an entire function agreeing with `conj(f(k))` on
    // the real axis.

    pub fn a(&self, k: C64) -> Result<C64> {
        Ok(self.s_at(k)?.m22)
    }
    pub fn b(&self, k: C64) -> Result<C64> {
        Ok(self.s_at(k)?.m12)
    }
    pub fn a_bar(&self, k: C64) -> Result<C64> {
        Ok(self.a(k.conj())?.conj())
    }
    pub fn b_bar(&self, k: C64) -> Result<C64> {
        Ok(self.b(k.conj())?.conj())
    }
    pub fn a_left(&self, k: C64) -> Result<C64> {
        Ok(self.left_at(k)?.m22)
    }
    pub fn b_left(&self, k: C64) -> Result<C64> {
        Ok(self.left_at(k)?.m12)
    }
    pub fn a_left_bar(&self, k: C64) -> Result<C64> {
        Ok(self.a_left(k.conj())?.conj())
    }
    pub fn b_left_bar(&self, k: C64) -> Result<C64> {
        Ok(self.b_left(k.conj())?.conj())
    }
    pub fn a_right(&self, k: C64) -> Result<C64> {
        Ok(self.right_at(k)?.m22)
    }
    pub fn b_right(&self, k: C64) -> Result<C64> {
        Ok(self.right_at(k)?.m12)
    }
    pub fn a_right_bar(&self, k: C64) -> Result<C64> {
        Ok(self.a_right(k.conj())?.conj())
    }
    pub fn b_right_bar(&self, k: C64) -> Result<C64> {
        Ok(self.b_right(k.conj())?.conj())
    }

    /// `d(k) = a(k) conj(A(conj k)) - lambda b(k) conj(B(conj k))`
    pub fn d(&self, k: C64) -> Result<C64> {
        let l = self.params.lambda.f();
        Ok(self.a(k)? * self.a_left_bar(k)? - l * self.b(k)? * self.b_left_bar(k)?)
    }

    /// `d1(k) = a(k) A1(k) + lambda e^{-2ikL} conj(b(conj k)) B1(k)`
    pub fn d1(&self, k: C64) -> Result<C64> {
        let l = self.params.lambda.f();
        let z = -2.0 * I_C * k * self.params.length;
        if z.re.abs() > EXP_GUARD {
            return Err(Error::ExponentRange { re: z.re, ctx: "d1 edge factor" });
        }
        Ok(self.a(k)? * self.a_right(k)? + l * z.exp() * self.b_bar(k)? * self.b_right(k)?)
    }

    /// The four jump ratios, exactly as displayed. Denominators below the
    /// floor `1e-12 (1 + |k|)` abort with a singular-jump error naming the
    /// function: a zero of `a`, `d` or `d1` on the contour means the circle
    /// radius failed its contract.
    pub fn gamma_fns(&self, k: C64) -> Result<GammaFns> {
        let l = self.params.lambda.f();
        let floor = 1e-12 * (1.0 + k.norm());
        let check = |v: C64, which: &'static str| -> Result<C64> {
            if v.norm() < floor {
                Err(Error::SingularJump { which, k, denom_abs: v.norm() })
            } else {
                Ok(v)
            }
        };
        let a = self.a(k)?;
        let b = self.b(k)?;
        let a_bar = self.a_bar(k)?;
        let gamma = b / check(a_bar, "gamma: conj a(conj k)")?;

        // Gamma = lambda (Bbar/Abar) / (a (a - lambda b Bbar/Abar))
        let ratio_left = self.b_left_bar(k)? / check(self.a_left_bar(k)?, "Gamma: conj A(conj k)")?;
        let den = a * (a - l * b * ratio_left);
        let big_gamma = l * ratio_left / check(den, "Gamma: a d / conj A")?;

        // Gamma1 = e^{-2ikL} a (B1/A1) / (a + lambda e^{-2ikL} bbar (B1/A1))
        let z = -2.0 * I_C * k * self.params.length;
        if z.re.abs() > EXP_GUARD {
            return Err(Error::ExponentRange { re: z.re, ctx: "Gamma1 edge factor" });
        }
        let edge = z.exp();
        let ratio_right = self.b_right(k)? / check(self.a_right(k)?, "Gamma1: A1")?;
        let den1 = a + l * edge * self.b_bar(k)? * ratio_right;
        let big_gamma1 = edge * a * ratio_right / check(den1, "Gamma1: d1 / A1")?;

        // Gamma2 = a (e^{-2ikL} abar (B1/A1) + b) / (a + lambda e^{-2ikL} bbar (B1/A1))
        let big_gamma2 = a * (edge * a_bar * ratio_right + b) / check(den1, "Gamma2: d1 / A1")?;

        Ok(GammaFns { gamma, big_gamma, big_gamma1, big_gamma2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::ONE_C;

    fn params(lambda: Sign) -> ModelParams {
        ModelParams::new(lambda, 1.0, 0.5).unwrap()
    }

    fn zero_data(lambda: Sign) -> SpectralData {
        let p = params(lambda);
        let profile = InitialProfile::new(1.0, vec![0.0; 65], 1.0).unwrap();
        let traces = BoundaryTraces::zero(0.5, 64);
        SpectralData::new(p, profile, traces, IntegratorOpts::default()).unwrap()
    }

    #[test]
    fn zero_data_gives_identity_and_trivial_ratios() {
        let sd = zero_data(Sign::Minus);
        for &k in &[C64::new(0.7, 0.0), C64::new(-2.0, 0.3), C64::new(5.0, -1.0)] {
            assert!((sd.s_at(k).unwrap() - Mat2C::identity()).norm_max() < 1e-13);
            assert!((sd.left_at(k).unwrap() - Mat2C::identity()).norm_max() < 1e-13);
            assert!((sd.right_at(k).unwrap() - Mat2C::identity()).norm_max() < 1e-13);
            assert!((sd.d(k).unwrap() - ONE_C).norm() < 1e-13);
            assert!((sd.d1(k).unwrap() - ONE_C).norm() < 1e-13);
            let g = sd.gamma_fns(k).unwrap();
            assert!(g.gamma.norm() < 1e-13);
            assert!(g.big_gamma.norm() < 1e-13);
            assert!(g.big_gamma1.norm() < 1e-13);
            assert!(g.big_gamma2.norm() < 1e-13);
        }
    }

    #[test]
    fn scalar_entries_roundtrip() {
        let id = Mat2C::identity();
        let (a, b) = scalar_entries(&id);
        assert_eq!((a, b), (ONE_C, crate::mat2::ZERO_C));
        let m = Mat2C::new(C64::new(0.9, -0.1), C64::new(0.2, 0.3), C64::new(-0.2, 0.3), C64::new(0.9, 0.1));
        let (a, b) = scalar_entries(&m);
        assert_eq!(a, m.m22);
        assert_eq!(b, m.m12);
    }

    #[test]
    fn gamma_fns_forced_cases() {
        // B = B1 = 0, A = A1 = 1 (zero traces), nonzero profile:
        // Gamma = 0, Gamma1 = 0, Gamma2 = b(k)
        let p = params(Sign::Minus);
        let profile = InitialProfile::new(
            1.0,
            (0..=64).map(|i| {
                let x = i as f64 / 64.0;
                0.5 * (std::f64::consts::PI * x).sin().powi(2)
            }).collect(),
            1.0,
        ).unwrap();
        let traces = BoundaryTraces::zero(0.5, 64);
        let sd = SpectralData::new(p, profile, traces, IntegratorOpts::default()).unwrap();
        let k = C64::new(1.3, 0.0);
        let g = sd.gamma_fns(k).unwrap();
        assert!(g.big_gamma.norm() < 1e-12);
        assert!(g.big_gamma1.norm() < 1e-12);
        let b = sd.b(k).unwrap();
        assert!((g.big_gamma2 - b).norm() < 1e-10, "Gamma2 = {:?}, b = {:?}", g.big_gamma2, b);
        // zero initial data, any boundary data: gamma = 0 (a = 1, b = 0)
        let sd0 = zero_data(Sign::Minus);
        assert!(sd0.gamma_fns(k).unwrap().gamma.norm() < 1e-13);
    }

    #[test]
    fn mu_normalization_points() {
        let p = params(Sign::Minus);
        let profile_row = SampledFn::from_fn(0.0, 1.0, 64, |x| 0.4 * (2.0 * x).sin()).unwrap();
        let traces = BoundaryTraces::zero(0.5, 64);
        let env = MuEnv { params: &p, left: &traces.left, right: &traces.right, q_row: &profile_row };
        let k = C64::new(0.8, 0.1);
        // mu2 at its own corner is the identity for any data
        let m = eval_mu(MuIndex::Mu2, 0.0, 0.0, k, &env, &IntegratorOpts::default()).unwrap();
        assert!((m - Mat2C::identity()).norm_max() < 1e-13);
    }

    #[test]
    fn mu_zero_data_identity_everywhere() {
        let p = params(Sign::Plus);
        let row = SampledFn::new(0.0, 1.0, vec![0.0; 65]).unwrap();
        let traces = BoundaryTraces::zero(0.5, 64);
        let env = MuEnv { params: &p, left: &traces.left, right: &traces.right, q_row: &row };
        let k = C64::new(1.1, -0.2);
        for n in [MuIndex::Mu1, MuIndex::Mu2, MuIndex::Mu3, MuIndex::Mu4] {
            let m = eval_mu(n, 0.3, 0.2, k, &env, &IntegratorOpts::default()).unwrap();
            assert!((m - Mat2C::identity()).norm_max() < 1e-12, "{n:?}");
        }
    }
}
