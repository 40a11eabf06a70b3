//! The square sieve with two prime sets: construction of `𝒫`, `𝒬`, every term
//! of the resulting upper bound for the square count, and an audit comparing
//! the exact square count with the exact right-hand side.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::charsums::{sum_c, CMethod};
use crate::counting::{count_n, OmegaTable};
use crate::error::{invalid, Error, Result};
use crate::ff::{jacobi_table, primes_in};
use crate::forms::{good_prime, Surface};

/// Largest `B` for which the audit enumerates the box at full fidelity.
pub const FULL_FIDELITY_B: u64 = 30;

/// Smallest integer `k` with `k^den ≥ b^num`, i.e. `⌈b^{num/den}⌉`.
fn ceil_root_power(b: u64, num: u32, den: u32) -> u64 {
    let target = BigInt::from(b).pow(num);
    let mut k = (b as f64).powf(num as f64 / den as f64).floor().max(1.0) as u64;
    while k > 1 && BigInt::from(k - 1).pow(den) >= target {
        k -= 1;
    }
    while BigInt::from(k).pow(den) < target {
        k += 1;
    }
    k
}

/// `B`, `P = ⌈B^{3/5}⌉`, `Q = min(⌈B^{9/20}⌉, ⌊√B⌋)` and the two prime sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SievePlan {
    pub b: u64,
    pub n: u32,
    pub big_p: u64,
    pub big_q: u64,
    pub primes_p: Vec<u64>,
    pub primes_q: Vec<u64>,
}

impl SievePlan {
    pub fn a_size(&self) -> usize {
        self.primes_p.len() * self.primes_q.len()
    }

    /// The constraints `Q ≤ √B ≤ P ≤ B` and `PQ ≥ B`, checked in integers.
    pub fn constraints_hold(&self) -> bool {
        let (b, p, q) = (self.b, self.big_p, self.big_q);
        q * q <= b && b <= p * p && p <= b && p * q >= b
    }
}

pub fn build_plan(surface: &Surface, b: u64) -> Result<SievePlan> {
    if b < 16 {
        return invalid(format!("sieve plan needs B >= 16, got {b}"));
    }
    let n = surface.n();
    let big_p = ceil_root_power(b, 3, 5);
    // the ceiling can overshoot √B (B = 22 gives 5 > 4.69); clamp to keep Q ≤ √B
    let big_q = ceil_root_power(b, 9, 20).min(b.isqrt());
    let primes_p: Vec<u64> = primes_in(big_p, 2 * big_p)
        .into_iter()
        .filter(|&p| good_prime(surface, p, true))
        .collect();
    if primes_p.is_empty() {
        return invalid(format!("no good prime p = 2 mod {n} in [{big_p}, {}]", 2 * big_p));
    }
    let primes_q: Vec<u64> = primes_in(big_q, 2 * big_q)
        .into_iter()
        .filter(|&q| q != 2 && !primes_p.contains(&q))
        .collect();
    if primes_q.is_empty() {
        return invalid(format!("no odd prime outside the first set in [{big_q}, {}]", 2 * big_q));
    }
    let plan = SievePlan { b, n, big_p, big_q, primes_p, primes_q };
    if !plan.constraints_hold() {
        return invalid(format!("P = {big_p}, Q = {big_q} violate Q <= sqrt(B) <= P <= B, PQ >= B at B = {b}"));
    }
    Ok(plan)
}

/// `Σ_{m ≡ 0 (d)} ω(m) (m/r)` for coprime `d`, `r`.
fn restricted_c(omega: &OmegaTable, d: u64, r: u64) -> Result<i64> {
    let jac = jacobi_table(r)?;
    let hist = omega.residue_histogram(d * r);
    Ok(hist
        .iter()
        .enumerate()
        .filter(|(rho, _)| *rho as u64 % d == 0)
        .map(|(rho, &w)| w as i64 * jac[rho % r as usize] as i64)
        .sum())
}

fn c_value(omega: &OmegaTable, r: u64) -> Result<i64> {
    restricted_c(omega, 1, r)
}

fn distinct_pairs(v: &[u64]) -> Vec<(u64, u64)> {
    v.iter().flat_map(|&a| v.iter().filter(move |&&b| b != a).map(move |&b| (a, b))).collect()
}

/// `(E(𝒫), E(𝒬))`, evaluated exactly from the ω table.
pub fn error_terms(plan: &SievePlan, omega: &OmegaTable) -> Result<(i64, i64)> {
    let pp = distinct_pairs(&plan.primes_p);
    let qq = distinct_pairs(&plan.primes_q);
    let e_p: Vec<(u64, u64, u64)> =
        plan.primes_q.iter().flat_map(|&q| pp.iter().map(move |&(p1, p2)| (q, p1, p2))).collect();
    let e_q: Vec<(u64, u64, u64)> =
        plan.primes_p.iter().flat_map(|&p| qq.iter().map(move |&(q1, q2)| (p, q1, q2))).collect();
    let eval = |list: &[(u64, u64, u64)]| -> Result<i64> {
        list.par_iter()
            .map(|&(d, a, b)| restricted_c(omega, d, a * b))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().sum())
    };
    Ok((eval(&e_p)?, eval(&e_q)?))
}

/// One term of the bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SieveTerm {
    pub term_name: String,
    pub exact_value: f64,
    pub paper_majorant: f64,
    pub ratio: f64,
}

fn term(name: &str, exact: f64, majorant: f64) -> SieveTerm {
    let ratio = if majorant > 0.0 { exact / majorant } else { 0.0 };
    SieveTerm { term_name: name.to_string(), exact_value: exact, paper_majorant: majorant, ratio }
}

#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub schema_version: u32,
    pub plan: SievePlan,
    pub count_n: u64,
    pub omega_zero: u64,
    /// `Σ_{0 ≤ k ≤ Bⁿ} ω(k²)`.
    pub lhs: u64,
    /// `Σ_{k ≥ 0} ω(k²)` without the height cut.
    pub lhs_all_squares: u64,
    pub lhs_identity_holds: bool,
    /// Sum of the terms of the bound, each with constant 1.
    pub rhs: f64,
    pub ratio: f64,
    pub terms: Vec<SieveTerm>,
    /// `#𝒫 / (P / log B)` and `#𝒬 / (Q / log B)`: the slack in the lower bounds.
    pub p_count_vs_lower_bound: f64,
    pub q_count_vs_lower_bound: f64,
    /// Largest `|direct − weighted|` over the `C(qq')` cross-check.
    pub c_method_discrepancy: f64,
}

/// Runs the audit. Above [`FULL_FIDELITY_B`] the request is refused with a
/// budget error unless `force` is set.
pub fn sieve_audit(surface: &Surface, plan: &SievePlan, force: bool) -> Result<SieveReport> {
    if plan.b > FULL_FIDELITY_B && !force {
        return Err(Error::Budget(format!(
            "sieve audit enumerates (2B^2+1)(2B+1)^2 cells; B = {} exceeds {FULL_FIDELITY_B}",
            plan.b
        )));
    }
    let omega = OmegaTable::build(surface, plan.b);
    let count = count_n(surface, plan.b);
    let omega_zero = omega.get_i64(0);
    let lhs = omega.square_mass_upto(plan.n);

    let b = plan.b as f64;
    let log_b = b.ln();
    let (big_p, big_q) = (plan.big_p as f64, plan.big_q as f64);
    let a2 = (plan.a_size() as f64).powi(2);
    let np = plan.primes_p.len() as f64;
    let nq = plan.primes_q.len() as f64;
    let pp = distinct_pairs(&plan.primes_p);
    let qq = distinct_pairs(&plan.primes_q);

    let leading = b.powi(4) * log_b * log_b / (big_p * big_q);
    let quads: Vec<u64> = pp.iter().flat_map(|&(p1, p2)| qq.iter().map(move |&(q1, q2)| p1 * p2 * q1 * q2)).collect();
    let c_quad: i64 = quads.par_iter().map(|&r| c_value(&omega, r).map(i64::abs)).collect::<Result<Vec<_>>>()?.into_iter().sum();
    let c_pp: i64 = pp.par_iter().map(|&(a, b)| c_value(&omega, a * b).map(i64::abs)).collect::<Result<Vec<_>>>()?.into_iter().sum();
    let c_qq_each: Vec<i64> = qq.par_iter().map(|&(a, b)| c_value(&omega, a * b)).collect::<Result<_>>()?;
    let c_qq: i64 = c_qq_each.iter().map(|c| c.abs()).sum();
    let (e_p, e_q) = error_terms(plan, &omega)?;

    // the weighted C values against the direct triple sum
    let mut discrepancy = 0.0f64;
    for (&(a, bb), &w) in qq.iter().zip(&c_qq_each).take(2) {
        let direct = sum_c(a * bb, plan.b, surface, CMethod::Direct)?;
        discrepancy = discrepancy.max((direct.re - w as f64).abs());
    }

    let div = |x: f64, d: f64| if d > 0.0 { x / d } else { 0.0 };
    let t_quad = div(c_quad as f64, a2);
    let t_pp = div(log_b * c_pp as f64, big_q * np * np);
    let t_ep = div(e_p.unsigned_abs() as f64, a2);
    let t_qq = div(log_b * c_qq as f64, big_p * nq * nq);
    let t_eq = div(e_q.unsigned_abs() as f64, a2);
    let rhs = leading + t_quad + t_pp + t_ep + t_qq + t_eq;

    let m_quad = (b * big_p * big_q.powi(3) + b * big_p.powf(2.5) * big_q + b.powi(4) / (big_p * big_q)) * log_b * log_b;
    let m_ep = log_b / big_q * (b.powi(4) / (big_p * big_q) + b * b * big_p * big_p);
    let m_eq = log_b / big_p * (b.powi(4) / (big_p * big_q) + b * b * big_q * big_q);
    let pierce_main = omega.total_mass() as f64 / plan.a_size() as f64;
    let terms = vec![
        term("pierce_main", pierce_main, leading),
        term("leading", leading, leading),
        term("C_ppqq_average", t_quad, m_quad),
        term("C_pp_average", t_pp, leading),
        term("E_P", t_ep, m_ep),
        term("C_qq_average", t_qq, leading),
        term("E_Q", t_eq, m_eq),
        term("rhs_total", rhs, leading + m_quad + leading + m_ep + leading + m_eq),
        term("lhs_square_count", lhs as f64, rhs),
    ];
    Ok(SieveReport {
        schema_version: 1,
        plan: plan.clone(),
        count_n: count,
        omega_zero,
        lhs,
        lhs_all_squares: omega.square_mass(),
        lhs_identity_holds: 2 * lhs == count + omega_zero,
        rhs,
        ratio: lhs as f64 / rhs,
        terms,
        p_count_vs_lower_bound: np / (big_p / log_b),
        q_count_vs_lower_bound: nq / (big_q / log_b),
        c_method_discrepancy: discrepancy,
    })
}

/// `N(S; B) / (B^{3−1/20} (log B)²)` for each `B`.
pub fn theorem1_trend(surface: &Surface, bs: &[u64]) -> Vec<(u64, u64, f64)> {
    bs.iter()
        .map(|&b| {
            let count = count_n(surface, b);
            let bf = b as f64;
            (b, count, count as f64 / (bf.powf(3.0 - 1.0 / 20.0) * bf.ln().powi(2)))
        })
        .collect()
}
