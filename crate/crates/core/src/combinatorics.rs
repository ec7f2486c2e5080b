//! Compositions, Bell polynomials, the moment/cumulant inversion, Stirling
//! numbers, and cutoff mixed moments.
//!
//! Partition sums are evaluated in composition form throughout: a set
//! partition of `{1..n}` into `k` blocks enters only through its block sizes,
//! so every sum over partitions collapses to a sum over the `C(n−1, k−1)`
//! ordered cut sequences `0 = q_0 < q_1 < … < q_k = n` with the multinomial
//! weight `n!/(k!·Πp_l!)` counting the partitions behind each cut sequence.
//! That is `2^{n−1}` terms in total instead of the Bell number `Bell(n)`.

use num_traits::{One, Signed, Zero};

use crate::rational::{binomial, factorial, int, Rational, Scalar};
use crate::{Error, Result};

/// Ordered cut sequence `0 = q_0 < q_1 < … < q_k = n` encoding a composition
/// of `n` into `k` parts `p_l = q_l − q_{l−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    cuts: Vec<usize>,
}

impl Composition {
    /// Builds from a full cut sequence, validating the invariants.
    pub fn from_cuts(cuts: Vec<usize>) -> Result<Self> {
        let ok = cuts.len() >= 2
            && cuts[0] == 0
            && cuts.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "cut sequence {cuts:?} is not strictly increasing from 0"
            )));
        }
        Ok(Self { cuts })
    }

    /// The cut points `q_0..q_k`.
    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    /// Total order `n = q_k`.
    pub fn n(&self) -> usize {
        *self.cuts.last().unwrap()
    }

    /// Number of parts `k`.
    pub fn k(&self) -> usize {
        self.cuts.len() - 1
    }

    /// Part sizes `p_1..p_k`.
    pub fn parts(&self) -> impl Iterator<Item = usize> + '_ {
        self.cuts.windows(2).map(|w| w[1] - w[0])
    }

    /// Multinomial partition weight `n!/(k!·Π p_l!)`: the number of set
    /// partitions of `{1..n}` into `k` blocks with these sizes, divided by
    /// the `k!` orderings merged into one composition. Rational in general.
    pub fn partition_weight(&self) -> Rational {
        let mut w = factorial(self.n()) / factorial(self.k());
        for p in self.parts() {
            w /= factorial(p);
        }
        w
    }
}

/// All compositions of `n` into exactly `k` parts, in lexicographic order of
/// their cut sets. Yields exactly `C(n−1, k−1)` items.
pub fn compositions(n: usize, k: usize) -> Result<Vec<Composition>> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "compositions of {n} into {k} parts: need 1 <= k <= n"
        )));
    }
    // Choose the k−1 interior cuts from {1..n−1} in lexicographic order.
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (1..k).collect();
    loop {
        let mut cuts = Vec::with_capacity(k + 1);
        cuts.push(0);
        cuts.extend_from_slice(&idx);
        cuts.push(n);
        out.push(Composition { cuts });
        // Advance the combination idx ⊂ {1..n−1}, |idx| = k−1.
        let m = k - 1;
        let mut i = m;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < n - (m - i) {
                idx[i] += 1;
                for j in i + 1..m {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Bell polynomial `B_n(x_1..x_n) = Σ_k Σ_{p_1+…+p_k=n} n!/(k!·Πp_l!) Π x_{p_l}`.
///
/// Converts cumulants to moments: `E[X^n] = B_n(κ₁..κ_n)`.
pub fn bell_polynomial<T: Scalar>(x: &[T]) -> Result<T> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "bell_polynomial needs at least one argument".into(),
        ));
    }
    let mut total = T::zero();
    for k in 1..=n {
        for comp in compositions(n, k)? {
            let mut term = T::from_rational(&comp.partition_weight());
            for p in comp.parts() {
                term = term * x[p - 1].clone();
            }
            total = total + term;
        }
    }
    Ok(total)
}

/// Moments `μ_1..μ_n` from cumulants `κ_1..κ_n`: `μ_j = B_j(κ_1..κ_j)`.
pub fn moments_from_cumulants<T: Scalar>(kappa: &[T]) -> Result<Vec<T>> {
    if kappa.is_empty() {
        return Err(Error::InvalidArgument(
            "moments_from_cumulants needs at least one cumulant".into(),
        ));
    }
    (1..=kappa.len())
        .map(|j| bell_polynomial(&kappa[..j]))
        .collect()
}

/// Cumulants `κ_1..κ_n` from moments `μ_1..μ_n` by the inversion
/// `κ_n = Σ_k (−1)^{k−1}(k−1)! Σ_{partitions into k blocks} Π μ_{|block|}`,
/// with the partition sum evaluated in composition form.
pub fn cumulants_from_moments<T: Scalar>(mu: &[T]) -> Result<Vec<T>> {
    if mu.is_empty() {
        return Err(Error::InvalidArgument(
            "cumulants_from_moments needs at least one moment".into(),
        ));
    }
    let mut out = Vec::with_capacity(mu.len());
    for n in 1..=mu.len() {
        let mut total = T::zero();
        for k in 1..=n {
            // (−1)^{k−1} (k−1)! times the multinomial partition weight.
            let mut sign_weight = factorial(k - 1);
            if k % 2 == 0 {
                sign_weight = -sign_weight;
            }
            for comp in compositions(n, k)? {
                let mut term =
                    T::from_rational(&(comp.partition_weight() * &sign_weight));
                for p in comp.parts() {
                    term = term * mu[p - 1].clone();
                }
                total = total + term;
            }
        }
        out.push(total);
    }
    Ok(out)
}

/// Stirling number of the second kind `S(n, k)`: partitions of an `n`-set
/// into `k` blocks. `S(0,0) = 1`; `S(n, k) = 0` for `k > n`.
pub fn stirling2(n: usize, k: usize) -> Rational {
    // S(n,k) = (1/k!) Σ_j (−1)^j C(k,j) (k−j)^n, exact in rationals.
    if k > n {
        return Rational::zero();
    }
    if n == 0 {
        return Rational::one();
    }
    if k == 0 {
        return Rational::zero();
    }
    let mut acc = Rational::zero();
    for j in 0..=k {
        let term = binomial(k, j) * int((k - j) as i64).pow(n as i32);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc / factorial(k)
}

/// Moment sequence `m_0 = 1, m_1, m_2, …` of a cutoff law supported on
/// `[0, 1]`, so `0 ≤ m_{q+1} ≤ m_q ≤ 1` throughout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentSequence {
    values: Vec<Rational>,
}

impl MomentSequence {
    /// Sequence for the uniform law on `[0,1]`: `m_q = 1/(q+1)`, orders `0..=max_order`.
    pub fn uniform(max_order: usize) -> Self {
        let values = (0..=max_order).map(|q| rat_inv(q + 1)).collect();
        Self { values }
    }

    /// Sequence for the deterministic cutoff `Z ≡ c`: `m_q = c^q`.
    pub fn deterministic(c: &Rational, max_order: usize) -> Result<Self> {
        Self::from_moments(
            (0..=max_order).map(|q| c.pow(q as i32)).collect(),
        )
    }

    /// Builds from explicit moments `m_0..m_N`, validating `m_0 = 1` and the
    /// `[0,1]`-support chain `0 ≤ m_{q+1} ≤ m_q ≤ 1`.
    pub fn from_moments(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() || !values[0].is_one() {
            return Err(Error::InvalidArgument(
                "moment sequence must start with m_0 = 1".into(),
            ));
        }
        for w in values.windows(2) {
            if w[1].is_negative() || w[1] > w[0] {
                return Err(Error::InvalidArgument(
                    "cutoff moments must satisfy 0 <= m_{q+1} <= m_q <= 1".into(),
                ));
            }
        }
        Ok(Self { values })
    }

    /// Highest stored order `N`.
    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// `m_q`, erroring past the stored range.
    pub fn moment(&self, q: usize) -> Result<&Rational> {
        self.values.get(q).ok_or(Error::InsufficientMoments {
            needed: q,
            have: self.max_order(),
        })
    }

    /// All stored moments `m_0..m_N`.
    pub fn moments(&self) -> &[Rational] {
        &self.values
    }
}

fn rat_inv(d: usize) -> Rational {
    Rational::new(1.into(), (d as i64).into())
}

/// Cutoff mixed moment `C_{p,q} = E[(1−Z)^p Z^q] = Σ_k C(p,k)(−1)^k m_{q+k}`.
///
/// For the uniform law this is the beta integral `p!·q!/(p+q+1)!`.
pub fn c_pq(ms: &MomentSequence, p: usize, q: usize) -> Result<Rational> {
    if ms.max_order() < p + q {
        return Err(Error::InsufficientMoments {
            needed: p + q,
            have: ms.max_order(),
        });
    }
    let mut acc = Rational::zero();
    for k in 0..=p {
        let term = binomial(p, k) * ms.moment(q + k)?;
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}
