//! Multivariate polynomials over ordered simplex variables
//! `0 ≤ s_1 ≤ … ≤ s_k < ∞`, with the two integration operations the
//! jump-chain moment formulas need: stepwise integration
//! `∫_0^{s_{l+1}} · ds_l` and the terminal Laplace integral
//! `∫_0^∞ e^{−rate·s_k} · ds_k`.
//!
//! Exponent vectors are dense per term, storage is a sparse map, and every
//! coefficient is an exact rational, so summation order never matters.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::exppoly::Poly;
use crate::rational::{factorial, rational_pow, Rational};
use crate::{Error, Result};

/// Sparse multivariate polynomial in `vars` ordered variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: Rational) -> Self {
        let mut out = Self::zero(vars);
        if !c.is_zero() {
            out.terms.insert(vec![0; vars], c);
        }
        out
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The variable `s_{var}` (0-based index).
    pub fn var(vars: usize, var: usize) -> Result<Self> {
        if var >= vars {
            return Err(Error::InvalidArgument(format!(
                "variable index {var} out of range for {vars} variables"
            )));
        }
        let mut expo = vec![0; vars];
        expo[var] = 1;
        let mut out = Self::zero(vars);
        out.terms.insert(expo, Rational::one());
        Ok(out)
    }

    /// Embeds a univariate polynomial as a polynomial in `s_{var}`.
    pub fn from_poly_in_var(vars: usize, var: usize, p: &Poly) -> Result<Self> {
        if var >= vars {
            return Err(Error::InvalidArgument(format!(
                "variable index {var} out of range for {vars} variables"
            )));
        }
        let mut out = Self::zero(vars);
        for (j, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut expo = vec![0; vars];
                expo[var] = j as u32;
                out.terms.insert(expo, c.clone());
            }
        }
        Ok(out)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, expo: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&expo) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&expo);
                }
            }
            None => {
                self.terms.insert(expo, c);
            }
        }
    }

    fn check_vars(&self, rhs: &MultiPoly) -> Result<()> {
        if self.vars != rhs.vars {
            return Err(Error::InvalidArgument(format!(
                "variable-count mismatch: {} vs {}",
                self.vars, rhs.vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(rhs)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_add(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &MultiPoly) -> Result<MultiPoly> {
        self.check_vars(rhs)?;
        let mut out = MultiPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let expo = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_add(expo, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars);
        }
        MultiPoly {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    /// Power by repeated squaring; `a^0 = 1`.
    pub fn pow(&self, e: u32) -> Result<MultiPoly> {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(self.vars);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Stepwise simplex integration `∫_0^{s_{var+1}} · ds_{var}`: each
    /// `s_{var}^e` becomes `s_{var+1}^{e+1}/(e+1)`.
    ///
    /// Requires every variable below `var` to have been integrated out
    /// already (exponent 0), and `var + 1` to exist.
    pub fn integrate_step(&self, var: usize) -> Result<MultiPoly> {
        if var + 1 >= self.vars {
            return Err(Error::InvalidArgument(format!(
                "integrate_step({var}) needs an enclosing variable {}",
                var + 1
            )));
        }
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            if e[..var].iter().any(|&x| x != 0) {
                return Err(Error::InvalidArgument(format!(
                    "malformed variable ordering: variable below {var} still present"
                )));
            }
            let mut expo = e.clone();
            let inner = expo[var];
            expo[var] = 0;
            expo[var + 1] += inner + 1;
            out.insert_add(expo, c / Rational::from_integer((inner as i64 + 1).into()));
        }
        Ok(out)
    }

    /// Terminal Laplace integral `∫_0^∞ e^{−rate·s} a(s) ds = Σ_j c_j·j!/rate^{j+1}`
    /// for a polynomial univariate in the last variable; exact rational.
    pub fn laplace_terminal(&self, rate: &Rational) -> Result<Rational> {
        if !rate.is_positive() {
            return Err(Error::InvalidArgument(
                "terminal Laplace integral needs a positive rate".into(),
            ));
        }
        if self.vars == 0 {
            return Err(Error::InvalidArgument(
                "terminal integral needs at least one variable".into(),
            ));
        }
        let last = self.vars - 1;
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            if e[..last].iter().any(|&x| x != 0) {
                return Err(Error::InvalidArgument(
                    "terminal integral requires a univariate polynomial".into(),
                ));
            }
            let j = e[last] as usize;
            acc += c * factorial(j) * rational_pow(rate, -(j as i32 + 1))?;
        }
        Ok(acc)
    }
}
