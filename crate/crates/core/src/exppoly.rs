//! Exact algebra of exp-polynomials `f(t) = Σ_r p_r(t) e^{rt}` with rational
//! rates and rational polynomial coefficients.
//!
//! The class is closed under sum, product, differentiation, and definite
//! integration from 0, which is exactly what the nested-integral moment
//! formulas need. Values are kept canonical at all times: rates deduplicated,
//! zero polynomials dropped, trailing zero coefficients stripped, so
//! structural equality (`==`) is mathematical equality of closed forms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rational::{int, to_f64, Rational, Scalar};

/// Univariate polynomial with exact rational coefficients, dense ascending
/// storage; the empty coefficient list is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·t^degree`.
    pub fn monomial(c: Rational, degree: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self { coeffs }
    }

    /// The identity polynomial `t`.
    pub fn t() -> Self {
        Self::monomial(int(1), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients ascending by degree (empty for zero).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Poly::new(out)
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Power by repeated multiplication; `p^0 = 1`.
    pub fn pow(&self, e: usize) -> Poly {
        let mut acc = Poly::constant(int(1));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Derivative `p'`.
    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * int(j as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term: `∫_0^t p(s) ds`.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Rational::zero(); self.coeffs.len() + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j + 1] = c / int(j as i64 + 1);
        }
        Poly::new(out)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Double-precision Horner evaluation.
    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + to_f64(c);
        }
        acc
    }
}

/// Exp-polynomial `Σ_r p_r(t) e^{rt}`: map from exact rational rate to
/// polynomial coefficient, canonical at all times.
///
/// The rate-0 entry is the pure polynomial part. Structural equality of
/// canonical forms is mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPoly {
    terms: BTreeMap<Rational, Poly>,
}

/// Limit of an exp-polynomial as `t → ∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Limit {
    Finite(Rational),
    Divergent,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(int(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Rational::zero(), Poly::constant(c))
    }

    /// The exp-polynomial `t`.
    pub fn t() -> Self {
        Self::term(Rational::zero(), Poly::t())
    }

    /// Single term `p(t)·e^{rate·t}`.
    pub fn term(rate: Rational, p: Poly) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(rate, p);
        }
        Self { terms }
    }

    /// Pure exponential `e^{rate·t}`.
    pub fn exp(rate: Rational) -> Self {
        Self::term(rate, Poly::constant(int(1)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms ascending by rate: `(rate, polynomial)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Poly)> {
        self.terms.iter()
    }

    fn insert_add(&mut self, rate: &Rational, p: &Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(rate) {
            Some(existing) => {
                let sum = existing.add(p);
                if sum.is_zero() {
                    self.terms.remove(rate);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(rate.clone(), p.clone());
            }
        }
    }

    pub fn add(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (r, p) in rhs.terms() {
            out.insert_add(r, p);
        }
        out
    }

    /// Product: rates add, coefficient polynomials convolve.
    pub fn mul(&self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (ra, pa) in self.terms() {
            for (rb, pb) in rhs.terms() {
                out.insert_add(&(ra + rb), &pa.mul(pb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero();
        }
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|(r, p)| (r.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// Definite integral from 0: returns `F` with `F(t) = ∫_0^t f(s) ds`,
    /// so `F(0) = 0` and `F' = f` exactly.
    ///
    /// For a term `p(s)e^{rs}` with `r ≠ 0` the antiderivative is
    /// `Q(s)e^{rs}` with `Q = Σ_j (−1)^j p^{(j)}/r^{j+1}`; evaluating at the
    /// endpoints contributes `Q(t)e^{rt} − Q(0)`.
    pub fn integrate(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (r, p) in self.terms() {
            if r.is_zero() {
                out.insert_add(&Rational::zero(), &p.antiderivative());
                continue;
            }
            let mut q = Poly::zero();
            let mut deriv = p.clone();
            let mut inv_pow = int(1) / r; // (−1)^j / r^{j+1}, sign folded in
            while !deriv.is_zero() {
                q = q.add(&deriv.scale(&inv_pow));
                deriv = deriv.derivative();
                inv_pow = -(inv_pow / r);
            }
            let q0 = q.eval_rational(&Rational::zero());
            out.insert_add(r, &q);
            out.insert_add(&Rational::zero(), &Poly::constant(-q0));
        }
        out
    }

    /// Exact derivative: `p(t)e^{rt} ↦ (p'(t) + r·p(t))e^{rt}`.
    pub fn differentiate(&self) -> ExpPoly {
        let mut out = ExpPoly::zero();
        for (r, p) in self.terms() {
            out.insert_add(r, &p.derivative().add(&p.scale(r)));
        }
        out
    }

    /// Double-precision evaluation; terms are summed in ascending-rate order
    /// so results are bit-reproducible. At `t = 0` the constant terms often
    /// cancel exactly; summing them as rationals avoids leaking roundoff.
    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return to_f64(&self.eval_exact_at_zero());
        }
        let mut acc = 0.0;
        for (r, p) in self.terms() {
            acc += p.eval_f64(t) * (to_f64(r) * t).exp();
        }
        acc
    }

    /// Exact value at `t = 0`: the sum of all constant coefficients.
    pub fn eval_exact_at_zero(&self) -> Rational {
        let zero = Rational::zero();
        self.terms
            .values()
            .map(|p| p.eval_rational(&zero))
            .sum()
    }

    /// Limit as `t → ∞`: finite iff every nonzero-rate term decays (negative
    /// rate) and the rate-0 part is constant; the limit is that constant.
    pub fn limit_at_infinity(&self) -> Limit {
        let mut value = Rational::zero();
        for (r, p) in self.terms() {
            if r.is_positive() {
                return Limit::Divergent;
            }
            if r.is_zero() {
                if p.degree() > 0 {
                    return Limit::Divergent;
                }
                value = p.eval_rational(&Rational::zero());
            }
        }
        Limit::Finite(value)
    }
}

impl num_traits::Zero for ExpPoly {
    fn zero() -> Self {
        ExpPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl num_traits::One for ExpPoly {
    fn one() -> Self {
        ExpPoly::constant(int(1))
    }
}

impl Scalar for ExpPoly {
    fn from_rational(r: &Rational) -> Self {
        ExpPoly::constant(r.clone())
    }
}

impl Add for ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: ExpPoly) -> ExpPoly {
        ExpPoly::add(&self, &rhs)
    }
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::add(self, rhs)
    }
}

impl Sub for ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: ExpPoly) -> ExpPoly {
        ExpPoly::add(&self, &rhs.neg())
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::add(self, &rhs.scale(&int(-1)))
    }
}

impl Mul for ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: ExpPoly) -> ExpPoly {
        ExpPoly::mul(&self, &rhs)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        ExpPoly::mul(self, rhs)
    }
}

impl Neg for ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale(&int(-1))
    }
}

/// Renders as a sum of `c * t^j * exp(r*t)` pieces with exact rational `c`
/// and `r`, rates ascending, degrees ascending within a rate.
impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, p) in self.terms() {
            for (j, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (sep, lead) = if first {
                    ("", c.clone())
                } else if c.is_negative() {
                    (" - ", -c.clone())
                } else {
                    (" + ", c.clone())
                };
                first = false;
                write!(f, "{sep}{lead}")?;
                if j == 1 {
                    write!(f, " * t")?;
                } else if j > 1 {
                    write!(f, " * t^{j}")?;
                }
                if !r.is_zero() {
                    write!(f, " * exp({r}*t)")?;
                }
            }
        }
        Ok(())
    }
}
