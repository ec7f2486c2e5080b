//! Continuous-time analytic engine.
//!
//! For a growth-collapse process driven by a rate-`λ` Poisson process with
//! i.i.d. cutoffs `Z` (moment sequence `m_q = E[Z^q]`), the accumulated loss
//!
//! ```text
//! Y_t = Σ_{k ≤ N_t} f(T_k)(1 − Z_k) Π_{l=k+1}^{N_t} Z_l
//! ```
//!
//! has exact moments given by a composition-indexed partition sum of nested
//! integrals:
//!
//! ```text
//! E[Y_t^n] = n!·e^{λt(m_n − 1)} Σ_{k=1}^n λ^k Σ_{0=q_0<…<q_k=n}
//!            ∫_0^t ∫_0^{s_k} … ∫_0^{s_2} Π_{l=1}^k
//!            [ f(s_l)^{p_l}/p_l! · C_{q_{l−1},p_l} · e^{λ s_l (m_{q_{l−1}} − m_{q_l})} ] ds
//! ```
//!
//! with `p_l = q_l − q_{l−1}` and `C_{p,q} = E[(1−Z)^p Z^q]`. Every factor is
//! an exp-polynomial, so the nested integral evaluates exactly inside
//! [`crate::exppoly`]. The process itself is `X_t = t − Y_t` (unit growth
//! slope), whose moments follow by the binomial recursion, and for uniform
//! cutoffs also in one closed form ([`moment_x_closed`]). Cumulants come from
//! the moment/cumulant inversion run over exp-polynomial scalars.

use num_traits::{Signed, Zero};

use crate::combinatorics::{
    c_pq, compositions, cumulants_from_moments, moments_from_cumulants, MomentSequence,
};
use crate::exppoly::{ExpPoly, Limit, Poly};
use crate::rational::{binomial, factorial, int, rational_pow, Rational, Scalar};
use crate::{Error, Result};

/// Parameters of a continuous-time growth-collapse model: Poisson rate `λ`,
/// growth integrand `f` (default `f(s) = s`, the unit-slope process), and the
/// cutoff moment sequence (default uniform on `[0,1]`).
#[derive(Debug, Clone)]
pub struct GrowthSpec {
    lambda: Rational,
    f: Poly,
    cutoff: MomentSequence,
}

impl GrowthSpec {
    /// Uniform-cutoff, unit-slope model with moments available to `max_order`.
    pub fn uniform(lambda: Rational, max_order: usize) -> Result<Self> {
        Self::new(lambda, MomentSequence::uniform(max_order))
    }

    /// Unit-slope model with an explicit cutoff law.
    pub fn new(lambda: Rational, cutoff: MomentSequence) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::InvalidArgument(
                "the Poisson rate lambda must be positive".into(),
            ));
        }
        Ok(Self {
            lambda,
            f: Poly::t(),
            cutoff,
        })
    }

    /// Replaces the growth integrand `f` (polynomial, `f(T_k)` at jump `k`).
    pub fn with_growth(mut self, f: Poly) -> Self {
        self.f = f;
        self
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn cutoff(&self) -> &MomentSequence {
        &self.cutoff
    }

    pub fn growth(&self) -> &Poly {
        &self.f
    }

    fn require_order(&self, n: usize) -> Result<()> {
        if self.cutoff.max_order() < n {
            return Err(Error::InsufficientMoments {
                needed: n,
                have: self.cutoff.max_order(),
            });
        }
        Ok(())
    }

    fn is_unit_slope(&self) -> bool {
        self.f == Poly::t()
    }
}

/// `E[(Y_t)^n]` as an exact exp-polynomial, by the partition-sum identity.
pub fn moment_y(spec: &GrowthSpec, n: usize) -> Result<ExpPoly> {
    if n == 0 {
        return Ok(ExpPoly::one());
    }
    spec.require_order(n)?;
    let lambda = &spec.lambda;
    let m_n = spec.cutoff.moment(n)?;

    let mut total = ExpPoly::zero();
    for k in 1..=n {
        let lambda_k = rational_pow(lambda, k as i32)?;
        for comp in compositions(n, k)? {
            let cuts = comp.cuts();
            // Scalar weight Π_l C_{q_{l−1}, p_l} / p_l!.
            let mut weight = lambda_k.clone();
            for l in 1..=k {
                let p = cuts[l] - cuts[l - 1];
                weight *= c_pq(&spec.cutoff, p, cuts[l - 1])? / factorial(p);
            }
            if weight.is_zero() {
                continue;
            }
            // Innermost-out iterated integral over 0 ≤ s_1 ≤ … ≤ s_k ≤ t.
            let mut g = ExpPoly::one();
            for l in 1..=k {
                let p = cuts[l] - cuts[l - 1];
                let rate = lambda * (spec.cutoff.moment(cuts[l - 1])? - spec.cutoff.moment(cuts[l])?);
                let factor = ExpPoly::term(rate, spec.f.pow(p));
                g = (&g * &factor).integrate();
            }
            total = total + g.scale(&weight);
        }
    }
    let prefactor = ExpPoly::term(lambda * (m_n - int(1)), Poly::constant(factorial(n)));
    Ok(&prefactor * &total)
}

/// `E[(X_t)^n]` for the unit-slope process `X_t = t − Y_t`, by the binomial
/// recursion on the loss moments.
pub fn moment_x(spec: &GrowthSpec, n: usize) -> Result<ExpPoly> {
    Ok(moments_xy(spec, n)?.1.pop().unwrap())
}

/// All moments `E[Y_t^j]`, `E[X_t^j]` for `j = 1..=n`, computed in one pass
/// (index `j − 1` holds order `j`).
pub fn moments_xy(spec: &GrowthSpec, n: usize) -> Result<(Vec<ExpPoly>, Vec<ExpPoly>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be >= 1".into()));
    }
    if !spec.is_unit_slope() {
        return Err(Error::InvalidArgument(
            "X_t = t - Y_t moments require the unit-slope growth f(s) = s".into(),
        ));
    }
    let ys: Vec<ExpPoly> = (1..=n).map(|j| moment_y(spec, j)).collect::<Result<_>>()?;
    // E[X^j] = (−1)^j (E[Y^j] − Σ_{k<j} C(j,k) t^{j−k} (−1)^k E[X^k]).
    let mut xs: Vec<ExpPoly> = Vec::with_capacity(n);
    for j in 1..=n {
        let mut acc = ys[j - 1].clone();
        for k in 0..j {
            let xk = if k == 0 {
                ExpPoly::one()
            } else {
                xs[k - 1].clone()
            };
            let mut c = binomial(j, k);
            if k % 2 == 1 {
                c = -c;
            }
            let tpow = ExpPoly::term(Rational::zero(), Poly::monomial(c, j - k));
            acc = acc - (&tpow * &xk);
        }
        if j % 2 == 1 {
            acc = acc.scale(&int(-1));
        }
        xs.push(acc);
    }
    Ok((ys, xs))
}

/// Closed form of `E[(X_t)^n]` under uniform cutoffs:
/// `((n+1)!/λ^n) Σ_{k=0}^n (−1)^k (k+1)^{n−1} C(n,k) e^{−kλt/(k+1)}`.
pub fn moment_x_closed(lambda: &Rational, n: usize) -> Result<ExpPoly> {
    if !lambda.is_positive() {
        return Err(Error::InvalidArgument(
            "the Poisson rate lambda must be positive".into(),
        ));
    }
    let scale = factorial(n + 1) * rational_pow(lambda, -(n as i32))?;
    let mut total = ExpPoly::zero();
    for k in 0..=n {
        let mut c = rational_pow(&int(k as i64 + 1), n as i32 - 1)? * binomial(n, k);
        if k % 2 == 1 {
            c = -c;
        }
        let rate = -(lambda * int(k as i64)) / int(k as i64 + 1);
        total = total + ExpPoly::term(rate, Poly::constant(c));
    }
    Ok(total.scale(&scale))
}

/// Cumulants `κ⁽¹⁾(t)..κ⁽ⁿ⁾(t)` of `X_t` as exp-polynomials, by the
/// moment/cumulant inversion run over exp-polynomial scalars.
pub fn cumulants_x(spec: &GrowthSpec, n: usize) -> Result<Vec<ExpPoly>> {
    let (_, xs) = moments_xy(spec, n)?;
    cumulants_from_moments(&xs)
}

/// Residual of the moment ODE
/// `d/dt E[X^n] = n·E[X^{n−1}] − (λn/(n+1))·E[X^n]`
/// evaluated on the closed forms; structurally zero when they solve it.
pub fn ode_residual(lambda: &Rational, n: usize) -> Result<ExpPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("ODE residual needs n >= 1".into()));
    }
    let mn = moment_x_closed(lambda, n)?;
    let mprev = moment_x_closed(lambda, n - 1)?;
    let coeff = lambda * int(n as i64) / int(n as i64 + 1);
    Ok(mn.differentiate() - mprev.scale(&int(n as i64)) + mn.scale(&coeff))
}

/// Moments and cumulants of a Poisson-driven shot noise
/// `S_t = Σ_{k ≤ N_t} J_k g(T_k, t)`.
///
/// Inputs are the jump moments `E[J^1..J^n]` and the kernel integrals
/// `G_k = ∫ g^k dΛ` (any scalar ring: exact rationals or exp-polynomials in
/// `t`). The cumulants are `κ⁽ᵏ⁾ = E[J^k]·G_k` and the moments follow by the
/// Bell-polynomial expansion `E[S_t^n] = B_n(κ⁽¹⁾..κ⁽ⁿ⁾)`.
#[derive(Debug, Clone)]
pub struct ShotNoiseMoments<T> {
    pub moments: Vec<T>,
    pub cumulants: Vec<T>,
}

pub fn shot_noise_moments<T: Scalar>(
    jump_moments: &[Rational],
    g_integrals: &[T],
    n: usize,
) -> Result<ShotNoiseMoments<T>> {
    if jump_moments.len() < n || g_integrals.len() < n {
        return Err(Error::InvalidArgument(format!(
            "shot noise order {n} needs {n} jump moments and kernel integrals \
             (have {} and {})",
            jump_moments.len(),
            g_integrals.len()
        )));
    }
    let cumulants: Vec<T> = (0..n)
        .map(|k| g_integrals[k].scale(&jump_moments[k]))
        .collect();
    let moments = moments_from_cumulants(&cumulants)?;
    Ok(ShotNoiseMoments { moments, cumulants })
}

/// Stationary raw moments of `X`: exact `(j+1)!/λ^j` for `j = 0..=n`
/// (the law of `X_∞` is Gamma with shape 2 and rate `λ`).
pub fn stationary_moments(lambda: &Rational, n: usize) -> Result<Vec<Rational>> {
    if !lambda.is_positive() {
        return Err(Error::InvalidArgument(
            "the Poisson rate lambda must be positive".into(),
        ));
    }
    (0..=n)
        .map(|j| Ok(factorial(j + 1) * rational_pow(lambda, -(j as i32))?))
        .collect()
}

/// Stationary cumulants of `X`: exact `2·(j−1)!/λ^j` for `j = 1..=n`.
pub fn stationary_cumulants(lambda: &Rational, n: usize) -> Result<Vec<Rational>> {
    if !lambda.is_positive() {
        return Err(Error::InvalidArgument(
            "the Poisson rate lambda must be positive".into(),
        ));
    }
    (1..=n)
        .map(|j| Ok(int(2) * factorial(j - 1) * rational_pow(lambda, -(j as i32))?))
        .collect()
}

/// Everything the reporting layer needs for one order `n`: both moment
/// closed forms, all cumulants up to `n`, and the stationary moments.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub n: usize,
    pub moment_y: ExpPoly,
    pub moment_x: ExpPoly,
    pub cumulants: Vec<ExpPoly>,
    pub stationary: Vec<Rational>,
}

pub fn moment_report(spec: &GrowthSpec, n: usize) -> Result<MomentReport> {
    let (mut ys, mut xs) = moments_xy(spec, n)?;
    let cumulants = cumulants_from_moments(&xs)?;
    Ok(MomentReport {
        n,
        moment_y: ys.pop().unwrap(),
        moment_x: xs.pop().unwrap(),
        cumulants,
        stationary: stationary_moments(&spec.lambda, n)?,
    })
}

/// Convenience: finite limit of an exp-polynomial or an error (used by
/// reporting code that expects convergence).
pub fn finite_limit(f: &ExpPoly) -> Result<Rational> {
    match f.limit_at_infinity() {
        Limit::Finite(v) => Ok(v),
        Limit::Divergent => Err(Error::InvalidArgument(
            "expression diverges as t -> infinity".into(),
        )),
    }
}
