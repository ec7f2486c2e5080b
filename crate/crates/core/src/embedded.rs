//! Exact moments of the chain embedded at jump times.
//!
//! Sampling the accumulated loss at the `m`-th jump gives
//! `Y(m) = Σ_{k=1}^m f(T_k)(1 − Z_k) Π_{l=k+1}^m Z_l`; the compensated chain
//! subtracts it from the drift accumulated by the jump time,
//! `X(m) = T_m − Y(m)`. Both have exact rational moments given by a
//! composition-indexed sum of simplex integrals:
//!
//! ```text
//! E[Y(m)^n] = n! Σ_{k=1}^{min(n,m)} Σ_{0=q_0<…<q_k=n} Π_l C_{q_{l−1},p_l}/p_l!
//!             Σ_{i=0}^{m−k} (λ^{k+i}/i!) m_n^{m−i−k} · I(q, i)
//!
//! I(q, i) = ∫_0^∞ e^{−λs_k} ∫_0^{s_k} … ∫_0^{s_2}
//!           (s_1 + Σ_{l=1}^{k−1} m_{q_l}(s_{l+1}−s_l))^i Π_l f(s_l)^{p_l} ds
//! ```
//!
//! with `p_l = q_l − q_{l−1}`, `m_q = E[Z^q]`, `C_{p,q} = E[(1−Z)^p Z^q]`.
//! For the compensated chain the stratum `i = m−k` is reweighted: the last
//! cutoff factor `C_{q_{k−1},p_k}` is replaced by `(−1)^{p_k}·m_n` (keeping
//! the `1/p_k!`), and the whole sum carries the sign `(−1)^n`. The integrals
//! `I(q, i)` are evaluated exactly in [`crate::mvpoly`].

use num_traits::{Signed, Zero};

use crate::combinatorics::{c_pq, compositions, cumulants_from_moments, MomentSequence};
use crate::exppoly::Poly;
use crate::mvpoly::MultiPoly;
use crate::rational::{factorial, rational_pow, to_f64, Rational};
use crate::{Error, Result};

/// Default caps keeping term counts and simplex expansions at desk scale.
pub const DEFAULT_MAX_ORDER: usize = 4;
pub const DEFAULT_MAX_INDEX: usize = 30;

/// Which embedded chain a quantity refers to: the loss chain `Y(m)` or the
/// compensated chain `X(m) = T_m − Y(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chain {
    Y,
    X,
}

/// Parameters of an embedded-chain computation: Poisson rate `λ`, chain
/// index `m ≥ 1`, cutoff moment sequence, growth integrand `f`.
///
/// [`EmbeddedSpec::new`] enforces the default caps (`m ≤ 30`, moment order
/// `n ≤ 4`); [`EmbeddedSpec::uncapped`] lifts them at a cost that grows like
/// the simplex expansion of `(…)^{m−k}`.
#[derive(Debug, Clone)]
pub struct EmbeddedSpec {
    lambda: Rational,
    m: usize,
    cutoff: MomentSequence,
    f: Poly,
    capped: bool,
}

impl EmbeddedSpec {
    pub fn new(lambda: Rational, m: usize, cutoff: MomentSequence) -> Result<Self> {
        let spec = Self::uncapped(lambda, m, cutoff)?;
        if m > DEFAULT_MAX_INDEX {
            return Err(Error::InvalidArgument(format!(
                "chain index {m} exceeds the default cap {DEFAULT_MAX_INDEX}; \
                 use EmbeddedSpec::uncapped to lift it"
            )));
        }
        Ok(Self {
            capped: true,
            ..spec
        })
    }

    /// Builds without the desk-scale caps; expect cost growth in `m` and `n`.
    pub fn uncapped(lambda: Rational, m: usize, cutoff: MomentSequence) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::InvalidArgument(
                "the Poisson rate lambda must be positive".into(),
            ));
        }
        if m == 0 {
            return Err(Error::InvalidArgument(
                "the chain index m must be at least 1".into(),
            ));
        }
        Ok(Self {
            lambda,
            m,
            cutoff,
            f: Poly::t(),
            capped: false,
        })
    }

    /// Uniform-cutoff spec with moments through `max_order`.
    pub fn uniform(lambda: Rational, m: usize, max_order: usize) -> Result<Self> {
        Self::new(lambda, m, MomentSequence::uniform(max_order))
    }

    /// Replaces the growth integrand `f`.
    pub fn with_growth(mut self, f: Poly) -> Self {
        self.f = f;
        self
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cutoff(&self) -> &MomentSequence {
        &self.cutoff
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidArgument("moment order must be >= 1".into()));
        }
        if self.capped && n > DEFAULT_MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "moment order {n} exceeds the default cap {DEFAULT_MAX_ORDER}; \
                 use EmbeddedSpec::uncapped to lift it"
            )));
        }
        if self.cutoff.max_order() < n {
            return Err(Error::InsufficientMoments {
                needed: n,
                have: self.cutoff.max_order(),
            });
        }
        Ok(())
    }
}

/// The simplex integral `I(q, i)` for one composition: expand the linear
/// form to the `i`-th power, multiply by `Π f(s_l)^{p_l}`, integrate the
/// inner variables stepwise, and close with the terminal Laplace integral.
struct CompositionIntegrals {
    /// Linear form `s_1 + Σ_{l=1}^{k−1} m_{q_l}(s_{l+1} − s_l)`.
    linear: MultiPoly,
    /// Running product `Π_l f(s_l)^{p_l} · linear^i`.
    current: MultiPoly,
    lambda: Rational,
}

impl CompositionIntegrals {
    fn new(spec: &EmbeddedSpec, cuts: &[usize]) -> Result<Self> {
        let k = cuts.len() - 1;
        let mut base = MultiPoly::one(k);
        for l in 1..=k {
            let p = cuts[l] - cuts[l - 1];
            base = base.mul(&MultiPoly::from_poly_in_var(k, l - 1, &spec.f.pow(p))?)?;
        }
        // Coefficient of s_j in the linear form: s_1 picks up 1 − m_{q_1},
        // interior s_l pick up m_{q_{l−1}} − m_{q_l}, s_k picks up m_{q_{k−1}}
        // (empty-products degenerate correctly for k = 1).
        let mut linear = MultiPoly::zero(k);
        for j in 1..=k {
            let low = if j == 1 {
                Rational::from_integer(1.into())
            } else {
                spec.cutoff.moment(cuts[j - 1])?.clone()
            };
            let high = if j == k {
                Rational::zero()
            } else {
                spec.cutoff.moment(cuts[j])?.clone()
            };
            let coeff = low - high;
            linear = linear.add(&MultiPoly::var(k, j - 1)?.scale(&coeff))?;
        }
        Ok(Self {
            linear,
            current: base,
            lambda: spec.lambda.clone(),
        })
    }

    /// `I(q, i)`; must be called with `i = 0, 1, 2, …` in order (the power of
    /// the linear form is built incrementally).
    fn next_integral(&mut self, i: usize) -> Result<Rational> {
        if i > 0 {
            self.current = self.current.mul(&self.linear)?;
        }
        debug_assert!(self.current.term_count() < 100_000);
        let k = self.current.vars();
        let mut reduced = self.current.clone();
        for l in 0..k - 1 {
            reduced = reduced.integrate_step(l)?;
        }
        reduced.laplace_terminal(&self.lambda)
    }
}

/// `E[(Y(m))^n]` as an exact rational.
pub fn moment_y_embedded(spec: &EmbeddedSpec, n: usize) -> Result<Rational> {
    spec.check_order(n)?;
    let m = spec.m;
    let m_n = spec.cutoff.moment(n)?.clone();
    let mut total = Rational::zero();
    for k in 1..=n.min(m) {
        for comp in compositions(n, k)? {
            let cuts = comp.cuts();
            let mut weight = factorial(n);
            for l in 1..=k {
                let p = cuts[l] - cuts[l - 1];
                weight *= c_pq(&spec.cutoff, p, cuts[l - 1])? / factorial(p);
            }
            if weight.is_zero() {
                continue;
            }
            let mut integrals = CompositionIntegrals::new(spec, cuts)?;
            for i in 0..=m - k {
                let integral = integrals.next_integral(i)?;
                let stratum = rational_pow(spec.lambda(), (k + i) as i32)? / factorial(i)
                    * rational_pow(&m_n, (m - i - k) as i32)?;
                total += &weight * stratum * integral;
            }
        }
    }
    Ok(total)
}

/// `E[(X(m))^n]` for the compensated chain `X(m) = T_m − Y(m)`, exact.
pub fn moment_x_embedded(spec: &EmbeddedSpec, n: usize) -> Result<Rational> {
    spec.check_order(n)?;
    let m = spec.m;
    let m_n = spec.cutoff.moment(n)?.clone();
    let mut total = Rational::zero();
    for k in 1..=n.min(m) {
        for comp in compositions(n, k)? {
            let cuts = comp.cuts();
            let p_k = cuts[k] - cuts[k - 1];
            // Weight of the interior strata, and of the boundary stratum
            // where the last cutoff factor becomes (−1)^{p_k}·m_n.
            let mut inner_weight = factorial(n);
            for l in 1..k {
                let p = cuts[l] - cuts[l - 1];
                inner_weight *= c_pq(&spec.cutoff, p, cuts[l - 1])? / factorial(p);
            }
            let full_weight =
                &inner_weight * c_pq(&spec.cutoff, p_k, cuts[k - 1])? / factorial(p_k);
            let mut boundary_weight = &inner_weight * &m_n / factorial(p_k);
            if p_k % 2 == 1 {
                boundary_weight = -boundary_weight;
            }
            if full_weight.is_zero() && boundary_weight.is_zero() {
                continue;
            }
            let mut integrals = CompositionIntegrals::new(spec, cuts)?;
            for i in 0..m - k {
                let integral = integrals.next_integral(i)?;
                let stratum = rational_pow(spec.lambda(), (k + i) as i32)? / factorial(i)
                    * rational_pow(&m_n, (m - i - k) as i32)?;
                total += &full_weight * stratum * integral;
            }
            let integral = integrals.next_integral(m - k)?;
            let stratum = rational_pow(spec.lambda(), m as i32)? / factorial(m - k);
            total += boundary_weight * stratum * integral;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}

fn chain_moment(spec: &EmbeddedSpec, chain: Chain, n: usize) -> Result<Rational> {
    match chain {
        Chain::Y => moment_y_embedded(spec, n),
        Chain::X => moment_x_embedded(spec, n),
    }
}

/// Cumulants of one embedded chain plus the derived shape statistics.
#[derive(Debug, Clone)]
pub struct EmbeddedCumulants {
    /// `κ⁽¹⁾..κ⁽ⁿ⁾`, exact.
    pub cumulants: Vec<Rational>,
    /// `κ³/(κ²)^{3/2}`; `None` when `n < 3` or the chain is degenerate.
    pub skewness: Option<f64>,
    /// Excess kurtosis `κ⁴/(κ²)²`; `None` when `n < 4` or degenerate.
    pub kurtosis: Option<f64>,
}

/// Exact cumulants `κ⁽¹⁾..κ⁽ⁿ⁾` of `Y(m)` or `X(m)`, with skewness and
/// excess kurtosis as floats where the order allows.
pub fn cumulants_embedded(spec: &EmbeddedSpec, chain: Chain, n: usize) -> Result<EmbeddedCumulants> {
    let moments: Vec<Rational> = (1..=n)
        .map(|j| chain_moment(spec, chain, j))
        .collect::<Result<_>>()?;
    let cumulants = cumulants_from_moments(&moments)?;
    let variance = cumulants.get(1).map(to_f64).unwrap_or(0.0);
    let degenerate = variance <= 0.0;
    let skewness = (!degenerate && n >= 3)
        .then(|| to_f64(&cumulants[2]) / variance.powf(1.5));
    let kurtosis = (!degenerate && n >= 4)
        .then(|| to_f64(&cumulants[3]) / (variance * variance));
    Ok(EmbeddedCumulants {
        cumulants,
        skewness,
        kurtosis,
    })
}

/// One row of an embedded moment table: everything for a single index `m`.
#[derive(Debug, Clone)]
pub struct EmbeddedRow {
    pub m: usize,
    pub moments_y: Vec<Rational>,
    pub moments_x: Vec<Rational>,
    pub cumulants_y: Vec<Rational>,
    pub cumulants_x: Vec<Rational>,
    pub skewness_y: Option<f64>,
    pub kurtosis_y: Option<f64>,
    pub skewness_x: Option<f64>,
    pub kurtosis_x: Option<f64>,
}

/// Tabulates moments, cumulants, skewness, and kurtosis of both chains for
/// `m` in the inclusive range. An empty range yields an empty table.
pub fn moment_table(
    lambda: &Rational,
    cutoff: &MomentSequence,
    m_range: std::ops::RangeInclusive<usize>,
    n_max: usize,
) -> Result<Vec<EmbeddedRow>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument(
            "moment_table needs n_max >= 1".into(),
        ));
    }
    let mut rows = Vec::new();
    for m in m_range {
        let spec = EmbeddedSpec::new(lambda.clone(), m, cutoff.clone())?;
        let moments_y: Vec<Rational> = (1..=n_max)
            .map(|j| moment_y_embedded(&spec, j))
            .collect::<Result<_>>()?;
        let moments_x: Vec<Rational> = (1..=n_max)
            .map(|j| moment_x_embedded(&spec, j))
            .collect::<Result<_>>()?;
        let cy = cumulants_embedded(&spec, Chain::Y, n_max)?;
        let cx = cumulants_embedded(&spec, Chain::X, n_max)?;
        rows.push(EmbeddedRow {
            m,
            moments_y,
            moments_x,
            cumulants_y: cy.cumulants,
            cumulants_x: cx.cumulants,
            skewness_y: cy.skewness,
            kurtosis_y: cy.kurtosis,
            skewness_x: cx.skewness,
            kurtosis_x: cx.kurtosis,
        });
    }
    Ok(rows)
}
