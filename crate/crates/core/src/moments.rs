//! Hooley's method of moments applied to the `τ`-family `N(τ)`: the twisted
//! sums `S_r(μ) = Σ_τ N(τ)ψ(μτ)`, the moment `M_r`, Parseval, and the
//! normalised second moment `Σ_τ |N(τ) − q³|² / q⁵`.
//!
//! Only `r ∈ {1, 2}` is ever computed, so every report is a finite
//! verification, not a proof.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{format_fq, Dimensions, TauSpec};
use crate::error::{invalid, Result};
use crate::ff::{ExtCtx, Fq};
use crate::forms::{good_prime, Surface};
use crate::sum::{tolerance, SumValue};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A table `τ ↦ N(τ)` over `𝔽_q`, indexed by [`ExtCtx::index`].
#[derive(Clone, Debug)]
pub struct TauCounts {
    ctx: ExtCtx,
    counts: Vec<u64>,
    dims: Dimensions,
}

impl TauCounts {
    pub fn new(ctx: ExtCtx, counts: Vec<u64>, dims: Dimensions) -> Result<Self> {
        if counts.len() as u64 != ctx.q() {
            return invalid(format!("expected {} tau counts, got {}", ctx.q(), counts.len()));
        }
        Ok(TauCounts { ctx, counts, dims })
    }

    pub fn from_spec(spec: &TauSpec, dims: Dimensions) -> Self {
        let ctx = spec.ctx().clone();
        let counts = match dims {
            Dimensions::Six => spec.ntau_six_table(),
            Dimensions::Five => ctx.elements().map(|t| spec.ntau_five(t)).collect(),
        };
        TauCounts { ctx, counts, dims }
    }

    pub fn ctx(&self) -> &ExtCtx {
        &self.ctx
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn terms(&self) -> u64 {
        self.total().max(1)
    }

    /// `Σ_τ (N(τ) − centre) ψ(μτ)`.
    fn centered_s(&self, twist: Fq, centre: f64) -> Complex64 {
        let c = &self.ctx;
        c.elements()
            .zip(&self.counts)
            .map(|(tau, &n)| c.psi(c.mul(twist, tau)) * (n as f64 - centre))
            .sum()
    }
}

/// `S_r(μ) = Σ_τ N(τ) ψ(μτ)`.
pub fn hooley_s(counts: &TauCounts, twist: Fq) -> SumValue {
    SumValue::new(counts.centered_s(twist, 0.0), counts.terms())
}

/// `|S_r(μ)|²` for every `μ`, indexed like the counts.
fn all_square_norms(counts: &TauCounts, centre: f64) -> Vec<f64> {
    let c = counts.ctx();
    let twists: Vec<Fq> = c.elements().collect();
    twists.par_iter().map(|&mu| counts.centered_s(mu, centre).norm_sqr()).collect()
}

/// `M_r = Σ_{μ ≠ 0} |S_r(μ)|²`.
pub fn moment_m(counts: &TauCounts) -> f64 {
    all_square_norms(counts, 0.0).iter().skip(1).sum()
}

/// Both sides of `Σ_μ |S_r(μ)|² = q Σ_τ (N(τ) − centre)²`.
pub fn parseval(counts: &TauCounts, centre: f64) -> (f64, f64) {
    let lhs: f64 = all_square_norms(counts, centre).iter().sum();
    let q = counts.ctx().q() as f64;
    let rhs = q * counts.counts().iter().map(|&n| (n as f64 - centre).powi(2)).sum::<f64>();
    (lhs, rhs)
}

/// Tolerance used for Parseval on a table: `|lhs − rhs| ≤ 10⁻³` in absolute
/// terms for sums up to `q⁷`, scaled relative to the size beyond that.
pub fn parseval_tolerance(rhs: f64, terms: u64) -> f64 {
    1e-3f64.max(1e-12 * rhs.abs()) + tolerance(terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct TauDeviation {
    pub tau: String,
    pub count: u64,
    pub deviation: f64,
}

/// The second moment about `q³` and the largest twisted sum, normalised by
/// `q⁵` and `q^{5/2}`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub schema_version: u32,
    pub q: u64,
    pub r: u32,
    pub dimensions: Dimensions,
    pub reference: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub ratio_kappa5: f64,
    pub moment_m: f64,
    pub max_s: f64,
    pub ratio_kappa25: f64,
    pub parseval_residual: f64,
    pub parseval_holds: bool,
    pub per_tau: Vec<TauDeviation>,
    pub note: &'static str,
}

/// Builds the moment report. Rejects `(h, μ) = (0, 0)` and primes that are
/// not good for the surface.
pub fn moment_bound_report(surface: &Surface, spec: &TauSpec, dims: Dimensions) -> Result<MomentReport> {
    let c = spec.ctx();
    let p = c.p();
    if !good_prime(surface, p, false) {
        return invalid(format!("p = {p} is not a good prime for the surface"));
    }
    let (h, mu) = (spec.h(), spec.mu());
    if [h.0, h.1, mu.0, mu.1].iter().all(|x| x.is_zero()) {
        return invalid("moment report needs (h, mu) != (0, 0)");
    }
    let counts = TauCounts::from_spec(spec, dims);
    moment_report_from_counts(&counts)
}

pub fn moment_report_from_counts(counts: &TauCounts) -> Result<MomentReport> {
    let c = counts.ctx();
    let q = c.q() as f64;
    let reference = q.powi(3);
    let norms = all_square_norms(counts, 0.0);
    let (lhs, rhs) = parseval(counts, 0.0);
    let second_moment: f64 = counts.counts().iter().map(|&n| (n as f64 - reference).powi(2)).sum();
    let max_s = norms.iter().skip(1).fold(0.0f64, |m, &x| m.max(x.sqrt()));
    let mean = counts.total() as f64 / q;
    Ok(MomentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        q: c.q(),
        r: c.degree(),
        dimensions: counts.dims(),
        reference,
        mean,
        second_moment,
        ratio_kappa5: second_moment / q.powi(5),
        moment_m: norms.iter().skip(1).sum(),
        max_s,
        ratio_kappa25: max_s / q.powf(2.5),
        parseval_residual: (lhs - rhs).abs(),
        parseval_holds: (lhs - rhs).abs() <= parseval_tolerance(rhs, counts.terms()),
        per_tau: c
            .elements()
            .zip(counts.counts())
            .map(|(tau, &n)| TauDeviation { tau: format_fq(c, tau), count: n, deviation: n as f64 - reference })
            .collect(),
        note: "finite verification for r in {1, 2}, not a proof",
    })
}
