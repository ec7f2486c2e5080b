//! Exact moments and cumulants of Markovian growth-collapse processes.
//!
//! A growth-collapse process grows at unit slope between the jump times of a
//! Poisson process and, at each jump, collapses to a random fraction of its
//! pre-jump value. Writing `T_1 < T_2 < …` for the jump times, `N_t` for the
//! number of jumps up to time `t`, and `U_k` for the retained fractions, the
//! accumulated loss and the process itself are
//!
//! ```text
//! Y_t = Σ_{k ≤ N_t} T_k (1 − U_k) Π_{l=k+1}^{N_t} U_l,        X_t = t − Y_t.
//! ```
//!
//! Every moment `E[Y_t^n]`, `E[X_t^n]` and every cumulant of `X_t` is an
//! exp-polynomial `Σ_r p_r(t) e^{rt}` with rational rates and coefficients.
//! This crate computes those closed forms exactly (arbitrary-precision
//! rational arithmetic throughout) by summing composition-indexed partition
//! identities, and independently re-derives the same quantities by Monte
//! Carlo simulation so that the two routes can be checked against each other.
//!
//! Module map:
//!
//! * [`combinatorics`] — compositions, Bell polynomials, moment/cumulant
//!   inversion, Stirling numbers, and the cutoff mixed moments `C_{p,q}`.
//! * [`exppoly`] — the exact exp-polynomial algebra (product, definite
//!   integration, differentiation, evaluation, limits).
//! * [`mvpoly`] — multivariate polynomials on the ordered simplex
//!   `0 ≤ s_1 ≤ … ≤ s_k`, with stepwise integration and a terminal Laplace
//!   integral; the evaluation engine for the jump-chain formulas.
//! * [`continuous`] — the continuous-time engine: `E[Y_t^n]`, `E[X_t^n]`,
//!   cumulants, the closed form for uniform cutoffs, stationary moments, and
//!   Poisson shot-noise moments.
//! * [`embedded`] — exact moments of the chain sampled at jump times,
//!   `Y(m) = Y_{T_m}`, and of the compensated chain `X(m) = T_m − Y(m)`.
//! * [`mc`] — the Monte Carlo oracle: trajectory simulation, moment and
//!   cumulant estimates with batch-means standard errors, and
//!   analytic-vs-estimate comparison reports.

pub mod combinatorics;
pub mod continuous;
pub mod embedded;
mod error;
pub mod exppoly;
pub mod mc;
pub mod mvpoly;
pub mod rational;

pub use error::{Error, Result};
