use fflab::charsums::{sum_c, sum_u, sum_u_majorant, CMethod, WpAlgorithm, WpEngine, WpParams};
use fflab::counting::{
    count_n, format_fq, omega_table, sing_vtau_points, system_points, tau_profile, rewrite_check, Dimensions, System,
    TauSpec,
};
use fflab::ff::{is_prime, primes_in, ExtCtx};
use fflab::forms::{is_smooth_mod_p, polf_det, projective_roots, separability_mod_p, BinaryForm};
use fflab::moments::moment_bound_report;
use fflab::seeded::stream;
use fflab::sieve::{build_plan, sieve_audit};
use fflab::vdc::{HChoice, VdcContext};
use fflab::{Error, Surface};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{emit, versioned, Rows};
use crate::{load_surface, Cli, Command, Common, TauArgs, LOOP_BUDGET};

fn budget(common: &Common, what: &str, loops: f64) -> Result<(), Error> {
    if loops > LOOP_BUDGET && !common.force {
        return Err(Error::Budget(format!(
            "{what} needs about {loops:.2e} loop iterations (limit {LOOP_BUDGET:.0e}); pass --force to run anyway"
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), Error> {
    let common = &cli.common;
    let surface = load_surface(common)?;
    match &cli.command {
        Command::GoodPrimes { p, congruence } => good_primes(common, &surface, *p, *congruence),
        Command::Count { b } => count(common, &surface, *b),
        Command::Charsum { r, c, b } => charsum(common, &surface, *r, *c, *b),
        Command::WpScan { p, samples } => wp_scan(common, &surface, *p, *samples),
        Command::VdcAudit { p, pp, q, qq, c, b, four_b } => {
            let choice = if *four_b { HChoice::FourB } else { HChoice::Floor };
            let r1 = (q * qq).max(1) as f64;
            let side = 3.0 * *b as f64 + 1.0;
            let h = (4 * b) as f64 / r1;
            let r0 = (p * pp) as f64;
            budget(common, "vdc-audit", side * side * h * h * 9.0 + r0 * r0 * r0)?;
            let report = VdcContext::new(&surface, (*p, *pp), (*q, *qq), *c, *b, choice)?.report()?;
            emit(common, std::slice::from_ref(&report), &versioned("vdc-audit", &report))
        }
        Command::TauProfile { tau, no_sing } => {
            let spec = tau_spec(&surface, tau)?;
            let q = spec.q() as f64;
            budget(common, "tau-profile", q.powi(5) * 3.0)?;
            let rows = tau_profile(&spec, !no_sing)?;
            emit(common, &rows, &versioned("tau-profile", Rows { rows: &rows }))
        }
        Command::Moments { tau, five } => {
            let spec = tau_spec(&surface, tau)?;
            let q = spec.q() as f64;
            budget(common, "moments", q.powi(4) * 2.0)?;
            let dims = if *five { Dimensions::Five } else { Dimensions::Six };
            let report = moment_bound_report(&surface, &spec, dims)?;
            emit(common, &report.per_tau, &report)
        }
        Command::SieveAudit { b } => {
            let side = 2.0 * *b as f64 + 1.0;
            budget(common, "sieve-audit", (2.0 * (*b as f64).powi(2) + 1.0) * side * side * 4.0)?;
            let plan = build_plan(&surface, *b)?;
            let report = sieve_audit(&surface, &plan, common.force)?;
            emit(common, &report.terms, &report)
        }
        Command::SingLocus { tau, t, system } => sing_locus(common, &surface, tau, *t, system),
        Command::PolfCheck { p } => polf_check(common, &surface, *p),
    }
}

fn tau_spec(surface: &Surface, a: &TauArgs) -> Result<TauSpec, Error> {
    TauSpec::from_ints(surface, a.p, a.r, a.lambda, a.h, a.mu, a.sector)
}

#[derive(Serialize)]
struct GoodPrimeRow {
    p: u64,
    smooth: bool,
    g_separable: bool,
    congruent: bool,
    good: bool,
}

fn good_primes(common: &Common, surface: &Surface, p_max: u64, congruence: bool) -> Result<(), Error> {
    budget(common, "good-primes", p_max as f64 * 1e3)?;
    let n = surface.n() as u64;
    let rows: Vec<GoodPrimeRow> = primes_in(3, p_max)
        .into_par_iter()
        .filter(|&p| p % n != 0)
        .map(|p| {
            let smooth = is_smooth_mod_p(surface, p).unwrap_or(false);
            let g_separable = separability_mod_p(surface.g(), p).map(|s| s.is_separable()).unwrap_or(false);
            let congruent = p % n == 2 % n;
            let good = fflab::forms::good_prime(surface, p, congruence);
            GoodPrimeRow { p, smooth, g_separable, congruent, good }
        })
        .collect();
    emit(common, &rows, &versioned("good-primes", Rows { rows: &rows }))
}

#[derive(Serialize)]
struct CountRow {
    #[serde(rename = "B")]
    b: u64,
    count_n: u64,
    omega_zero: u64,
    omega_one: u64,
    total_mass: u64,
    distinct_values: usize,
}

fn count(common: &Common, surface: &Surface, b: u64) -> Result<(), Error> {
    let side = 2.0 * b as f64 + 1.0;
    budget(common, "count", (2.0 * (b as f64).powi(2) + 1.0) * side * side * 2.0)?;
    let omega = omega_table(surface, b);
    let row = CountRow {
        b,
        count_n: count_n(surface, b),
        omega_zero: omega.get_i64(0),
        omega_one: omega.get_i64(1),
        total_mass: omega.total_mass(),
        distinct_values: omega.support_size(),
    };
    emit(common, std::slice::from_ref(&row), &versioned("count", &row))
}

#[derive(Serialize)]
struct CharsumRow {
    r: u64,
    c: i64,
    #[serde(rename = "B")]
    b: u64,
    u_re: f64,
    u_im: f64,
    u_abs: f64,
    u_majorant: f64,
    c_of_r: f64,
}

fn charsum(common: &Common, surface: &Surface, r: u64, c: i64, b: u64) -> Result<(), Error> {
    let side = 2.0 * b as f64 + 1.0;
    let rf = r as f64;
    budget(common, "charsum", side * side * rf.min(side * side) * rf + side * side * b as f64 * b as f64)?;
    let u = sum_u(r, c, b, surface)?;
    let cr = sum_c(r, b, surface, CMethod::Weighted)?;
    let row = CharsumRow {
        r,
        c,
        b,
        u_re: u.re,
        u_im: u.im,
        u_abs: u.abs(),
        u_majorant: sum_u_majorant(r, b),
        c_of_r: cr.re,
    };
    emit(common, std::slice::from_ref(&row), &versioned("charsum", &row))
}

#[derive(Serialize)]
struct WpRow {
    lambda: i64,
    h1: i64,
    h2: i64,
    mu1: i64,
    mu2: i64,
    re: f64,
    im: f64,
    abs: f64,
    /// `|W_p| / (p^{5/2} gcd^{1/2})`.
    ratio: f64,
}

#[derive(Serialize)]
struct WpSummary<'a> {
    p: u64,
    seed: u64,
    samples: usize,
    max_ratio: f64,
    rows: &'a [WpRow],
}

fn wp_scan(common: &Common, surface: &Surface, p: u64, samples: usize) -> Result<(), Error> {
    if !is_prime(p) || p < 3 {
        return Err(Error::InvalidInput(format!("wp-scan needs an odd prime p, got {p}")));
    }
    let pf = p as f64;
    budget(common, "wp-scan", pf.powi(3) + samples as f64 * pf * pf)?;
    let pi = p as i64;
    let mut lam = stream(common.seed, "wp-scan/lambda");
    let mut shift = stream(common.seed, "wp-scan/shift");
    let params: Vec<WpParams> = (0..samples)
        .map(|_| {
            let lambda = lam.gen_range(1..pi);
            loop {
                let h = (shift.gen_range(0..pi), shift.gen_range(0..pi));
                let mu = (shift.gen_range(0..pi), shift.gen_range(0..pi));
                let cand = WpParams { p, lambda, h, mu };
                if cand.in_theorem_range() {
                    return cand;
                }
            }
        })
        .collect();
    let engine = WpEngine::new(surface, p)?;
    let rows: Vec<WpRow> = params
        .par_iter()
        .map(|w| {
            let v = engine.wp(w, WpAlgorithm::Factored);
            WpRow {
                lambda: w.lambda,
                h1: w.h.0,
                h2: w.h.1,
                mu1: w.mu.0,
                mu2: w.mu.1,
                re: v.re,
                im: v.im,
                abs: v.abs(),
                ratio: v.abs() / (pf.powf(2.5) * (w.gcd_factor() as f64).sqrt()),
            }
        })
        .collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let summary = WpSummary { p, seed: common.seed, samples, max_ratio, rows: &rows };
    emit(common, &rows, &versioned("wp-scan", &summary))
}

#[derive(Serialize)]
struct PointRow {
    system: String,
    point: String,
}

#[derive(Serialize)]
struct SingSummary<'a> {
    q: u64,
    tau: String,
    system: &'a str,
    count: usize,
    /// For `V`: points violating `(X²+TZ)U₁ = −U₂`.
    rewrite_failures: Option<usize>,
    points: &'a [PointRow],
}

fn sing_locus(common: &Common, surface: &Surface, a: &TauArgs, t: i64, system: &str) -> Result<(), Error> {
    let spec = tau_spec(surface, a)?;
    let ctx: &ExtCtx = spec.ctx();
    let q = spec.q() as f64;
    budget(common, "sing-locus", q.powi(4) * 4.0)?;
    let tau = ctx.from_i64(t);
    let fmt = |pt: &[fflab::Fq]| pt.iter().map(|&x| format_fq(ctx, x)).collect::<Vec<_>>().join(":");
    let (points, failures): (Vec<String>, Option<usize>) = if system.eq_ignore_ascii_case("sing") {
        (sing_vtau_points(&spec, tau)?.iter().map(|p| fmt(p)).collect(), None)
    } else {
        let sys = System::parse(system)
            .ok_or_else(|| Error::InvalidInput(format!("--system must be sing, K1, K2, L or V, got {system:?}")))?;
        let pts = system_points(&spec, sys, tau)?;
        let failures = if sys == System::V { Some(rewrite_check(&spec)?.1) } else { None };
        (pts.iter().map(|p| fmt(p)).collect(), failures)
    };
    let rows: Vec<PointRow> = points.into_iter().map(|point| PointRow { system: system.to_string(), point }).collect();
    let summary = SingSummary {
        q: spec.q(),
        tau: format_fq(ctx, tau),
        system,
        count: rows.len(),
        rewrite_failures: failures,
        points: &rows,
    };
    emit(common, &rows, &versioned("sing-locus", &summary))
}

#[derive(Serialize)]
struct PolfRow {
    form: &'static str,
    separability: String,
    root_a: String,
    root_b: String,
    det: u64,
}

fn polf_check(common: &Common, surface: &Surface, p: u64) -> Result<(), Error> {
    budget(common, "polf-check", (p as f64) * 100.0)?;
    let ctx = ExtCtx::new(p, 1)?;
    let mut rows = Vec::new();
    let forms: [(&'static str, &BinaryForm); 2] = [("f", surface.f()), ("g", surface.g())];
    for (name, form) in forms {
        let sep = format!("{:?}", separability_mod_p(form, p)?);
        let roots = match projective_roots(form, &ctx) {
            Ok(r) => r,
            Err(_) => {
                rows.push(PolfRow { form: name, separability: sep, root_a: String::new(), root_b: String::new(), det: 0 });
                continue;
            }
        };
        let show = |(a, b): (fflab::Fq, fflab::Fq)| format!("[{}:{}]", a.a, b.a);
        for (i, &ra) in roots.iter().enumerate() {
            for &rb in &roots[i + 1..] {
                let det = polf_det(form, ra, rb, &ctx)?;
                rows.push(PolfRow { form: name, separability: sep.clone(), root_a: show(ra), root_b: show(rb), det: det.a });
            }
        }
        if roots.len() < 2 {
            rows.push(PolfRow {
                form: name,
                separability: sep,
                root_a: roots.first().map(|&r| show(r)).unwrap_or_default(),
                root_b: String::new(),
                det: 0,
            });
        }
    }
    emit(common, &rows, &versioned("polf-check", Rows { rows: &rows }))
}
