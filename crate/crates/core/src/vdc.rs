//! The `q`-analogue of van der Corput differencing for `U(r₀r₁, c, B)`.
//!
//! With `r = r₀r₁` the box sum `U` is rewritten through the split
//! `A(u) = A₀(u)·A₁(u)` and Cauchy–Schwarz as `H²|U| ≤ √(Σ₁Σ₂)`, after which
//! `Σ₂ ≤ 2H²(Σ₂,A + Σ₂,B)`. Everything here is evaluated exactly from residue
//! tables of `S(r₀, c r̄₁, ·)` and `S(r₁, c r̄₀, ·)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charsums::{sum_u, SModulus};
use crate::error::{invalid, Result};
use crate::ff::{crt_data, gcd, is_prime, mod_i64};
use crate::forms::{good_prime, Surface};
use crate::sum::{tolerance, SumValue};

/// How the differencing length is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HChoice {
    /// `H = ⌊B/r₁⌋`, which keeps `Hr₁ ≤ B`.
    #[default]
    Floor,
    /// `H = ⌊4B/r₁⌋`.
    FourB,
}

/// Moduli `r₀ = pp'`, `r₁ = qq'`, the frequency `c mod r₀r₁`, the box radius
/// and precomputed residue tables of both factors of `S`.
#[derive(Clone, Debug)]
pub struct VdcContext {
    p: (u64, u64),
    q: (u64, u64),
    r0: u64,
    r1: u64,
    c: u64,
    b: u64,
    h: u64,
    h_choice: HChoice,
    s0: Vec<Complex64>,
    s1: Vec<Complex64>,
    surface: Surface,
}

impl VdcContext {
    pub fn new(
        surface: &Surface,
        p: (u64, u64),
        q: (u64, u64),
        c: i64,
        b: u64,
        h_choice: HChoice,
    ) -> Result<Self> {
        if p.0 == p.1 || q.0 == q.1 {
            return invalid("p, p' and q, q' must be distinct");
        }
        for &pr in &[p.0, p.1] {
            if !good_prime(surface, pr, false) {
                return invalid(format!("{pr} is not a good prime for the surface"));
            }
        }
        for &qr in &[q.0, q.1] {
            if qr < 3 || !is_prime(qr) {
                return invalid(format!("q = {qr} must be an odd prime"));
            }
        }
        let r0 = p.0 * p.1;
        let r1 = q.0 * q.1;
        if gcd(r0, r1) != 1 {
            return invalid(format!("r0 = {r0} and r1 = {r1} must be coprime"));
        }
        let h = match h_choice {
            HChoice::Floor => b / r1,
            HChoice::FourB => 4 * b / r1,
        };
        if h == 0 {
            return invalid(format!("H = 0: need r1 = {r1} <= B = {b} for a nonempty shift range"));
        }
        let r = r0 * r1;
        let c = mod_i64(c, r);
        let (r1_bar, r0_bar) = crt_data(r0, r1)?;
        let c0 = (c % r0) * r1_bar % r0;
        let c1 = (c % r1) * r0_bar % r1;
        let s0 = SModulus::new(r0, surface)?.residue_table(c0);
        let s1 = SModulus::new(r1, surface)?.residue_table(c1);
        Ok(VdcContext { p, q, r0, r1, c, b, h, h_choice, s0, s1, surface: surface.clone() })
    }

    pub fn r0(&self) -> u64 {
        self.r0
    }

    pub fn r1(&self) -> u64 {
        self.r1
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn h_choice(&self) -> HChoice {
        self.h_choice
    }

    pub fn primes(&self) -> ((u64, u64), (u64, u64)) {
        (self.p, self.q)
    }

    fn in_box(&self, u1: i64, u2: i64) -> bool {
        let b = self.b as i64;
        u1.abs() <= b && u2.abs() <= b
    }

    /// `S(r₀, c r̄₁, u)`, periodic in `u` modulo `r₀`.
    pub fn s0(&self, u1: i64, u2: i64) -> Complex64 {
        self.s0[(mod_i64(u1, self.r0) * self.r0 + mod_i64(u2, self.r0)) as usize]
    }

    /// `S(r₁, c r̄₀, u)`.
    pub fn s1(&self, u1: i64, u2: i64) -> Complex64 {
        self.s1[(mod_i64(u1, self.r1) * self.r1 + mod_i64(u2, self.r1)) as usize]
    }

    /// `A₀(u)`: `S(r₀, c r̄₁, u)` on the box, zero outside.
    pub fn a0(&self, u1: i64, u2: i64) -> Complex64 {
        if self.in_box(u1, u2) {
            self.s0(u1, u2)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `A₁(u)`.
    pub fn a1(&self, u1: i64, u2: i64) -> Complex64 {
        if self.in_box(u1, u2) {
            self.s1(u1, u2)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    fn box_terms(&self) -> u64 {
        let side = 2 * self.b + 1;
        side * side
    }

    /// `U(r₀r₁, c, B)` from the undivided modulus.
    pub fn u_direct(&self) -> Result<SumValue> {
        sum_u(self.r0 * self.r1, self.c as i64, self.b, &self.surface)
    }

    /// `U` as `Σ_{|u| ≤ B} A₀(u)A₁(u)`.
    pub fn u_split(&self) -> SumValue {
        let b = self.b as i64;
        let rows: Vec<Complex64> = (-b..=b)
            .into_par_iter()
            .map(|u1| (-b..=b).map(|u2| self.a0(u1, u2) * self.a1(u1, u2)).sum())
            .collect();
        SumValue::new(rows.into_iter().sum(), self.box_terms() * self.r0 * self.r1)
    }

    /// Range of `u` (per coordinate) on which some `A₀(u + hr₁)` is nonzero.
    fn shifted_range(&self) -> (i64, i64) {
        let (b, r1, h) = (self.b as i64, self.r1 as i64, self.h as i64);
        (-b - h * r1, b - r1)
    }

    /// `Σ₁` as written: the largest, over `h ∈ [1,H]²`, of
    /// `Σ_{|u + hr₁| ≤ B} |S(r₁, c r̄₀, u)|²`.
    pub fn sigma1(&self) -> f64 {
        let (b, r1, h) = (self.b as i64, self.r1 as i64, self.h as i64);
        let mut best = 0.0f64;
        for h1 in 1..=h {
            for h2 in 1..=h {
                let mut acc = 0.0;
                for v1 in -b..=b {
                    for v2 in -b..=b {
                        acc += self.s1(v1 - h1 * r1, v2 - h2 * r1).norm_sqr();
                    }
                }
                best = best.max(acc);
            }
        }
        best
    }

    /// `Σ_u |S(r₁, c r̄₀, u)|²` over the union of the shifted boxes, the
    /// quantity Cauchy–Schwarz actually produces.
    pub fn sigma1_union(&self) -> f64 {
        let (lo, hi) = self.shifted_range();
        let (b, r1, h) = (self.b as i64, self.r1 as i64, self.h as i64);
        // u lies in some box − hr₁ iff each coordinate does, independently
        let covered = |u: i64| (1..=h).any(|k| (u + k * r1).abs() <= b);
        let rows: Vec<f64> = (lo..=hi)
            .into_par_iter()
            .filter(|&u1| covered(u1))
            .map(|u1| (lo..=hi).filter(|&u2| covered(u2)).map(|u2| self.s1(u1, u2).norm_sqr()).sum())
            .collect();
        rows.into_iter().sum()
    }

    fn shifted_a0_sum(&self, u1: i64, u2: i64) -> Complex64 {
        let (r1, h) = (self.r1 as i64, self.h as i64);
        let mut acc = Complex64::new(0.0, 0.0);
        for h1 in 1..=h {
            for h2 in 1..=h {
                acc += self.a0(u1 + h1 * r1, u2 + h2 * r1);
            }
        }
        acc
    }

    /// `Σ₂ = Σ_u |Σ_{h ∈ [1,H]²} A₀(u + hr₁)|²`.
    pub fn sigma2_exact(&self) -> f64 {
        let (lo, hi) = self.shifted_range();
        let rows: Vec<f64> = (lo..=hi)
            .into_par_iter()
            .map(|u1| (lo..=hi).map(|u2| self.shifted_a0_sum(u1, u2).norm_sqr()).sum())
            .collect();
        rows.into_iter().sum()
    }

    /// `Σ_u S(r₁, c r̄₀, u) Σ_h A₀(u + hr₁)`, which equals `H²U`.
    pub fn reconstruction(&self) -> SumValue {
        let (lo, hi) = self.shifted_range();
        let rows: Vec<Complex64> = (lo..=hi)
            .into_par_iter()
            .map(|u1| (lo..=hi).map(|u2| self.s1(u1, u2) * self.shifted_a0_sum(u1, u2)).sum())
            .collect();
        let terms = self.h * self.h * self.box_terms() * self.r0 * self.r1;
        SumValue::new(rows.into_iter().sum(), terms)
    }

    /// `Σ₂,A = Σ_u |A₀(u)|²`.
    pub fn sigma2a(&self) -> f64 {
        let b = self.b as i64;
        let rows: Vec<f64> = (-b..=b)
            .into_par_iter()
            .map(|u1| (-b..=b).map(|u2| self.s0(u1, u2).norm_sqr()).sum())
            .collect();
        rows.into_iter().sum()
    }

    /// `T(r₀, h) = Σ_u A₀(u + hr₁) \overline{A₀(u)}`; for `h ≥ 0` the range
    /// is the truncated box `−B ≤ u_i ≤ B − h_i r₁`.
    pub fn sum_t(&self, h: (i64, i64)) -> Result<SumValue> {
        if h == (0, 0) {
            return invalid("T(r0, h) needs h != 0; h = 0 is the diagonal term");
        }
        let (b, r1) = (self.b as i64, self.r1 as i64);
        let range = |hi: i64| (-b).max(-b - hi * r1)..=b.min(b - hi * r1);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut terms = 0u64;
        for u1 in range(h.0) {
            for u2 in range(h.1) {
                acc += self.s0(u1 + h.0 * r1, u2 + h.1 * r1) * self.s0(u1, u2).conj();
                terms += 1;
            }
        }
        Ok(SumValue::new(acc, terms * self.r0 * self.r0))
    }

    /// `Σ₂,B = Σ_{0 < |h| ≤ H} |T(r₀, h)|` with the sup norm.
    pub fn sigma2b(&self) -> f64 {
        let h = self.h as i64;
        let shifts: Vec<(i64, i64)> =
            (-h..=h).flat_map(|a| (-h..=h).map(move |b| (a, b))).filter(|&s| s != (0, 0)).collect();
        let parts: Vec<f64> = shifts.par_iter().map(|&s| self.sum_t(s).expect("nonzero shift").abs()).collect();
        parts.into_iter().sum()
    }

    /// The majorant of `|U(r₀r₁, c, B)|` with the constant left out.
    pub fn split_majorant(&self) -> f64 {
        let (b, r0, r1) = (self.b as f64, self.r0 as f64, self.r1 as f64);
        if gcd(self.c % self.r0, self.r0) == 1 {
            b * r0.sqrt() * r1.powf(1.5) + b * r0.powf(1.25) * r1.sqrt() * r0.ln()
        } else {
            b * b * (r0 * r1).sqrt()
        }
    }

    pub fn report(&self) -> Result<VdcReport> {
        let u = self.u_direct()?;
        let u_split = self.u_split();
        let recon = self.reconstruction();
        let sigma1 = self.sigma1();
        let sigma1_union = self.sigma1_union();
        let sigma2 = self.sigma2_exact();
        let sigma2a = self.sigma2a();
        let sigma2b = self.sigma2b();
        let h2 = (self.h * self.h) as f64;
        let lhs = h2 * u.abs();
        let slack = |rhs: f64, terms: u64| rhs * (1.0 + 1e-6) + tolerance(terms);
        let (b, r0, r1) = (self.b as f64, self.r0 as f64, self.r1 as f64);
        let coprime = gcd(self.c % self.r0, self.r0) == 1;
        let h_u = u.scale(h2);
        Ok(VdcReport {
            r0: self.r0,
            r1: self.r1,
            c: self.c,
            b: self.b,
            h: self.h,
            h_choice: self.h_choice,
            c_coprime_to_r0: coprime,
            u_abs: u.abs(),
            split_residual: (u.value() - u_split.value()).norm(),
            reconstruction_residual: (h_u.value() - recon.value()).norm(),
            reconstruction_holds: h_u.close_to(&recon),
            sigma1,
            sigma1_union,
            sigma2,
            sigma2a,
            sigma2b,
            differencing_lhs: lhs,
            differencing_rhs: (sigma1 * sigma2).sqrt(),
            differencing_holds: lhs <= slack((sigma1 * sigma2).sqrt(), recon.terms),
            differencing_union_holds: lhs <= slack((sigma1_union * sigma2).sqrt(), recon.terms),
            sigma2_bound: 2.0 * h2 * (sigma2a + sigma2b),
            sigma2_holds: sigma2 <= slack(2.0 * h2 * (sigma2a + sigma2b), recon.terms),
            sigma1_ratio: sigma1 / (b * b * r1),
            sigma2a_ratio: sigma2a / (b * b * r0),
            sigma2b_ratio: coprime.then(|| sigma2b / (h2 * r0.powf(2.5) * r0.ln().powi(2))),
            split_majorant_ratio: u.abs() / self.split_majorant(),
        })
    }
}

/// Every quantity of the differencing chain for one context.
#[derive(Clone, Debug, Serialize)]
pub struct VdcReport {
    pub r0: u64,
    pub r1: u64,
    pub c: u64,
    pub b: u64,
    pub h: u64,
    pub h_choice: HChoice,
    pub c_coprime_to_r0: bool,
    pub u_abs: f64,
    /// `|U − Σ A₀A₁|`.
    pub split_residual: f64,
    pub reconstruction_residual: f64,
    pub reconstruction_holds: bool,
    pub sigma1: f64,
    pub sigma1_union: f64,
    pub sigma2: f64,
    pub sigma2a: f64,
    pub sigma2b: f64,
    pub differencing_lhs: f64,
    pub differencing_rhs: f64,
    pub differencing_holds: bool,
    pub differencing_union_holds: bool,
    pub sigma2_bound: f64,
    pub sigma2_holds: bool,
    pub sigma1_ratio: f64,
    pub sigma2a_ratio: f64,
    pub sigma2b_ratio: Option<f64>,
    pub split_majorant_ratio: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsums::sum_s;

    fn ctx(c: i64, b: u64, choice: HChoice) -> VdcContext {
        VdcContext::new(&Surface::sample(), (5, 11), (3, 7), c, b, choice).unwrap()
    }

    #[test]
    fn factor_tables_match_direct_sums() {
        let s = Surface::sample();
        let v = ctx(4, 25, HChoice::Floor);
        let (r1_bar, r0_bar) = crt_data(55, 21).unwrap();
        for (u1, u2) in [(0, 0), (3, -7), (25, 25), (-13, 4)] {
            let d0 = sum_s(55, (4 * r1_bar % 55) as i64, u1, u2, &s).unwrap();
            let d1 = sum_s(21, (4 * r0_bar % 21) as i64, u1, u2, &s).unwrap();
            assert!((v.s0(u1, u2) - d0.value()).norm() < 1e-9);
            assert!((v.s1(u1, u2) - d1.value()).norm() < 1e-9);
            let whole = sum_s(55 * 21, 4, u1, u2, &s).unwrap();
            assert!((v.a0(u1, u2) * v.a1(u1, u2) - whole.value()).norm() < 1e-6);
        }
    }

    #[test]
    fn sigma1_by_direct_enumeration() {
        let v = ctx(1, 25, HChoice::Floor);
        assert_eq!(v.h(), 1);
        let s = Surface::sample();
        let c1 = crt_data(55, 21).unwrap().1 as i64;
        let mut oracle = 0.0;
        for u1 in -25 - 21..=25 - 21 {
            for u2 in -25 - 21..=25 - 21 {
                oracle += sum_s(21, c1, u1, u2, &s).unwrap().value().norm_sqr();
            }
        }
        assert!((v.sigma1() - oracle).abs() < 1e-6 * oracle.max(1.0));
        // a single shift: the union is the same box
        assert!((v.sigma1_union() - oracle).abs() < 1e-6 * oracle.max(1.0));
    }

    #[test]
    fn sigma1_crude_bound() {
        let v = ctx(2, 30, HChoice::Floor);
        let max_s = v.s1.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(v.sigma1() <= 61.0 * 61.0 * max_s * max_s + 1e-6);
    }

    #[test]
    fn single_shift_sigma2() {
        let v = ctx(3, 25, HChoice::Floor);
        let mut oracle = 0.0;
        for u1 in -60..=60 {
            for u2 in -60..=60 {
                oracle += v.a0(u1 + 21, u2 + 21).norm_sqr();
            }
        }
        assert!((v.sigma2_exact() - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn sigma2a_at_zero_box() {
        let v = VdcContext::new(&Surface::sample(), (5, 11), (3, 7), 3, 21, HChoice::Floor).unwrap();
        let mut oracle = 0.0;
        for u1 in -21..=21 {
            for u2 in -21..=21 {
                oracle += v.s0(u1, u2).norm_sqr();
            }
        }
        assert!((v.sigma2a() - oracle).abs() < 1e-6 * oracle);
    }

    #[test]
    fn sigma2b_sums_eight_shifts_when_h_is_one() {
        let v = ctx(5, 25, HChoice::Floor);
        let mut acc = 0.0;
        for h in [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
            acc += v.sum_t(h).unwrap().abs();
        }
        assert!((v.sigma2b() - acc).abs() < 1e-9 * acc.max(1.0));
    }

    #[test]
    fn sum_t_oracle_and_symmetry() {
        let v = ctx(7, 44, HChoice::Floor);
        assert_eq!(v.h(), 2);
        for h in [(1, 0), (1, 2), (-2, 1), (2, 2)] {
            let t = v.sum_t(h).unwrap();
            let mut oracle = Complex64::new(0.0, 0.0);
            for u1 in -44..=44i64 {
                for u2 in -44..=44i64 {
                    oracle += v.a0(u1 + 21 * h.0, u2 + 21 * h.1) * v.a0(u1, u2).conj();
                }
            }
            assert!((t.value() - oracle).norm() < 1e-6, "{h:?}");
            let back = v.sum_t((-h.0, -h.1)).unwrap();
            assert!((t.abs() - back.abs()).abs() < 1e-6);
        }
        assert!(v.sum_t((0, 0)).is_err());
    }

    #[test]
    fn empty_shift_range_gives_zero() {
        let v = ctx(1, 25, HChoice::FourB);
        assert_eq!(v.h(), 4);
        // 3·21 > 2·25: no u with both u and u + 3·21 in the box
        assert_eq!(v.sum_t((3, 0)).unwrap().abs(), 0.0);
    }

    #[test]
    fn chain_on_sample_context() {
        for choice in [HChoice::Floor, HChoice::FourB] {
            let rep = ctx(1, 25, choice).report().unwrap();
            assert!(rep.split_residual < 1e-6);
            assert!(rep.reconstruction_holds);
            assert!(rep.sigma2_holds);
            assert!(rep.differencing_union_holds);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let s = Surface::sample();
        assert!(VdcContext::new(&s, (5, 5), (3, 7), 1, 25, HChoice::Floor).is_err());
        assert!(VdcContext::new(&s, (5, 11), (3, 7), 1, 20, HChoice::Floor).is_err());
        assert!(VdcContext::new(&s, (5, 11), (5, 7), 1, 40, HChoice::Floor).is_err());
        assert!(VdcContext::new(&s, (3, 11), (5, 7), 1, 40, HChoice::Floor).is_err());
    }
}
