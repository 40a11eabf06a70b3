//! Point counts: the integer-box count `N(S;B)` and its ω-weights, the
//! finite-field counts `N(τ)`, `N₁(τ)`, `N₂(τ)`, and enumeration of the
//! singular locus of `V_τ : G = H_τ = 0` together with the auxiliary systems
//! used to bound its dimension.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::ff::{mod_big, power_count_table, power_roots, ExtCtx, Fq};
use crate::forms::{Axis, ReducedForm, ShiftedForm, Surface};
use crate::poly::Poly;

/// Largest field size accepted by the singular-locus enumerations.
pub const MAX_ENUM_Q: u64 = 169;

/// Exact value of `xⁿ + x f(u) + g(u)` on every cell of the box, as `i128`
/// when a crude bound allows it and as `BigInt` otherwise.
struct CellValues {
    n: u32,
    f: Vec<BigInt>,
    g: Vec<BigInt>,
    small: Option<(Vec<i128>, Vec<i128>)>,
}

impl CellValues {
    fn new(surface: &Surface, b: u64) -> Self {
        let n = surface.n();
        let f = surface.f().coeffs().to_vec();
        let g = surface.g().coeffs().to_vec();
        // |value| ≤ B^{2n} (1 + Σ|f_i| + Σ|g_i|)
        let mass: BigInt = f.iter().chain(&g).map(|c| c.abs()).sum::<BigInt>() + 1;
        let bound = BigInt::from(b.max(1)).pow(2 * n) * mass;
        let small = (bound.bits() < 120).then(|| {
            let cv = |v: &[BigInt]| v.iter().map(|c| c.to_i128().expect("fits")).collect::<Vec<_>>();
            (cv(&f), cv(&g))
        });
        CellValues { n, f, g, small }
    }

    fn form_i128(coeffs: &[i128], u1: i128, u2: i128) -> i128 {
        let mut acc = 0i128;
        let mut p2 = 1i128;
        for &c in coeffs {
            acc = acc * u1 + c * p2;
            p2 *= u2;
        }
        acc
    }

    fn form_big(coeffs: &[BigInt], u1: &BigInt, u2: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut p2 = BigInt::from(1);
        for c in coeffs {
            acc = acc * u1 + c * &p2;
            p2 *= u2;
        }
        acc
    }

    /// Calls `visit` with each value on the row `u₁` (all `u₂`, all `x`).
    fn row(&self, b: u64, u1: i64, mut visit: impl FnMut(Value)) {
        let bi = b as i64;
        let xmax = bi * bi;
        match &self.small {
            Some((f, g)) => {
                for u2 in -bi..=bi {
                    let fu = Self::form_i128(f, u1 as i128, u2 as i128);
                    let gu = Self::form_i128(g, u1 as i128, u2 as i128);
                    for x in -xmax..=xmax {
                        let x = x as i128;
                        visit(Value::Small(x.pow(self.n) + x * fu + gu));
                    }
                }
            }
            None => {
                let u1b = BigInt::from(u1);
                for u2 in -bi..=bi {
                    let u2b = BigInt::from(u2);
                    let fu = Self::form_big(&self.f, &u1b, &u2b);
                    let gu = Self::form_big(&self.g, &u1b, &u2b);
                    for x in -xmax..=xmax {
                        let xb = BigInt::from(x);
                        visit(Value::Big(xb.pow(self.n) + &xb * &fu + &gu));
                    }
                }
            }
        }
    }
}

enum Value {
    Small(i128),
    Big(BigInt),
}

/// `Some(k)` with `k ≥ 0` when `m = k²`.
fn square_root_i128(m: i128) -> Option<i128> {
    if m < 0 {
        return None;
    }
    let k = m.sqrt();
    (k * k == m).then_some(k)
}

fn square_root_big(m: &BigInt) -> Option<BigInt> {
    if m.is_negative() {
        return None;
    }
    let k = m.sqrt();
    (&k * &k == *m).then_some(k)
}

/// `N(S; B)`: integer points with `|x| ≤ B²`, `|y| ≤ Bⁿ`, `|u₁|,|u₂| ≤ B` on
/// `y² = xⁿ + x f(u) + g(u)`.
pub fn count_n(surface: &Surface, b: u64) -> u64 {
    let cells = CellValues::new(surface, b);
    let ymax = BigInt::from(b).pow(surface.n());
    let ymax_small = ymax.to_i128();
    let bi = b as i64;
    (-bi..=bi)
        .into_par_iter()
        .map(|u1| {
            let mut acc = 0u64;
            cells.row(b, u1, |v| {
                let k = match v {
                    Value::Small(m) => square_root_i128(m).filter(|&k| Some(k) <= ymax_small).map(|k| k == 0),
                    Value::Big(m) => square_root_big(&m).filter(|k| *k <= ymax).map(|k| k.is_zero()),
                };
                if let Some(zero) = k {
                    acc += if zero { 1 } else { 2 };
                }
            });
            acc
        })
        .sum()
}

/// The weights `ω(m) = #{(x,u): m = xⁿ + x f(u) + g(u), |x| ≤ B², |u_i| ≤ B}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaTable {
    b: u64,
    entries: BTreeMap<BigInt, u64>,
}

impl OmegaTable {
    pub fn build(surface: &Surface, b: u64) -> Self {
        let cells = CellValues::new(surface, b);
        let bi = b as i64;
        let rows: Vec<BTreeMap<BigInt, u64>> = (-bi..=bi)
            .into_par_iter()
            .map(|u1| {
                let mut small: BTreeMap<i128, u64> = BTreeMap::new();
                let mut big: BTreeMap<BigInt, u64> = BTreeMap::new();
                cells.row(b, u1, |v| match v {
                    Value::Small(m) => *small.entry(m).or_default() += 1,
                    Value::Big(m) => *big.entry(m).or_default() += 1,
                });
                for (m, w) in small {
                    *big.entry(BigInt::from(m)).or_default() += w;
                }
                big
            })
            .collect();
        let mut entries = BTreeMap::new();
        for row in rows {
            for (m, w) in row {
                *entries.entry(m).or_default() += w;
            }
        }
        OmegaTable { b, entries }
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn get(&self, m: &BigInt) -> u64 {
        self.entries.get(m).copied().unwrap_or(0)
    }

    pub fn get_i64(&self, m: i64) -> u64 {
        self.get(&BigInt::from(m))
    }

    /// `Σ_m ω(m) = (2B²+1)(2B+1)²`.
    pub fn total_mass(&self) -> u64 {
        self.entries.values().sum()
    }

    /// Number of distinct values `m`.
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigInt, u64)> {
        self.entries.iter().map(|(m, &w)| (m, w))
    }

    /// `hist[ρ] = Σ_{m ≡ ρ (mod r)} ω(m)`.
    pub fn residue_histogram(&self, r: u64) -> Vec<u64> {
        let mut hist = vec![0u64; r as usize];
        for (m, &w) in &self.entries {
            hist[mod_big(m, r) as usize] += w;
        }
        hist
    }

    /// `Σ_{k ≥ 0} ω(k²)`.
    pub fn square_mass(&self) -> u64 {
        self.entries
            .iter()
            .filter(|(m, _)| square_root_big(m).is_some())
            .map(|(_, &w)| w)
            .sum()
    }

    /// `Σ_{0 ≤ k ≤ Bⁿ} ω(k²)`, the squares reachable with `|y| ≤ Bⁿ`.
    pub fn square_mass_upto(&self, n: u32) -> u64 {
        let ymax = BigInt::from(self.b).pow(n);
        self.entries
            .iter()
            .filter(|(m, _)| square_root_big(m).is_some_and(|k| k <= ymax))
            .map(|(_, &w)| w)
            .sum()
    }

    /// `ω(0) + 2 Σ_{1 ≤ k ≤ Bⁿ} ω(k²)`, which is `N(S; B)` regrouped by `y`.
    pub fn count_from_squares(&self, n: u32) -> u64 {
        let ymax = BigInt::from(self.b).pow(n);
        self.entries
            .iter()
            .filter_map(|(m, &w)| square_root_big(m).filter(|k| *k <= ymax).map(|k| if k.is_zero() { w } else { 2 * w }))
            .sum()
    }
}

pub fn omega_table(surface: &Surface, b: u64) -> OmegaTable {
    OmegaTable::build(surface, b)
}

/// Six- or five-variable form of `N(τ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimensions {
    Six,
    Five,
}

/// The data fixing `G = G₁⁽ⁱ⁾`, `G₂⁽ʲ⁾` and `H_τ = H_τ⁽ⁱ⁾` over `𝔽_q`.
#[derive(Clone, Debug)]
pub struct TauSpec {
    ctx: ExtCtx,
    n: u32,
    f: ReducedForm,
    g: ReducedForm,
    f_grad: (ReducedForm, ReducedForm),
    g_grad: (ReducedForm, ReducedForm),
    fh: ShiftedForm,
    gh: ShiftedForm,
    lambda: Fq,
    lambda_bar: Fq,
    h: (Fq, Fq),
    mu: (Fq, Fq),
    sector: (u8, u8),
    gi: Fq,
    gni: Fq,
    gj: Fq,
    gnj: Fq,
    cnt: Vec<u32>,
}

impl TauSpec {
    /// `λ`, `h`, `μ` are given as elements of `𝔽_q`.
    pub fn new(
        surface: &Surface,
        ctx: ExtCtx,
        lambda: Fq,
        h: (Fq, Fq),
        mu: (Fq, Fq),
        sector: (u8, u8),
    ) -> Result<Self> {
        let Some(lambda_bar) = ctx.inv(lambda) else {
            return invalid("lambda must be invertible in F_q");
        };
        if sector.0 > 1 || sector.1 > 1 {
            return invalid(format!("sector indices must be 0 or 1, got {sector:?}"));
        }
        let n = surface.n();
        let f = surface.f().reduce(&ctx);
        let g = surface.g().reduce(&ctx);
        let f_grad = (f.derivative(&ctx, Axis::S1), f.derivative(&ctx, Axis::S2));
        let g_grad = (g.derivative(&ctx, Axis::S1), g.derivative(&ctx, Axis::S2));
        let fh = ShiftedForm::new(&ctx, f.clone(), h);
        let gh = ShiftedForm::new(&ctx, g.clone(), h);
        let gamma = ctx.from_u64(ctx.base().nonsquare());
        let gi = if sector.0 == 1 { gamma } else { Fq::ONE };
        let gj = if sector.1 == 1 { gamma } else { Fq::ONE };
        let gni = ctx.pow(gi, n as u64);
        let gnj = ctx.pow(gj, n as u64);
        let cnt = power_count_table(&ctx, 2 * n as u64);
        Ok(TauSpec {
            ctx,
            n,
            f,
            g,
            f_grad,
            g_grad,
            fh,
            gh,
            lambda,
            lambda_bar,
            h,
            mu,
            sector,
            gi,
            gni,
            gj,
            gnj,
            cnt,
        })
    }

    /// Integer parameters reduced into `𝔽_p ⊂ 𝔽_q`.
    pub fn from_ints(
        surface: &Surface,
        p: u64,
        r: u32,
        lambda: i64,
        h: (i64, i64),
        mu: (i64, i64),
        sector: (u8, u8),
    ) -> Result<Self> {
        let ctx = ExtCtx::new(p, r)?;
        let e = |v: i64| ctx.from_i64(v);
        let (l, hh, mm) = (e(lambda), (e(h.0), e(h.1)), (e(mu.0), e(mu.1)));
        Self::new(surface, ctx, l, hh, mm, sector)
    }

    pub fn ctx(&self) -> &ExtCtx {
        &self.ctx
    }

    pub fn q(&self) -> u64 {
        self.ctx.q()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sector(&self) -> (u8, u8) {
        self.sector
    }

    pub fn lambda(&self) -> Fq {
        self.lambda
    }

    pub fn h(&self) -> (Fq, Fq) {
        self.h
    }

    pub fn mu(&self) -> (Fq, Fq) {
        self.mu
    }

    #[inline]
    fn count(&self, w: Fq) -> u64 {
        self.cnt[self.ctx.index(w)] as u64
    }

    #[inline]
    fn dot_mu(&self, s1: Fq, s2: Fq) -> Fq {
        let c = &self.ctx;
        c.add(c.mul(self.mu.0, s1), c.mul(self.mu.1, s2))
    }

    /// `γ^{ni} x^{2n} + γ^i x² f(s) + g(s)`, so that `G = −u^{2n} + w₁`.
    #[inline]
    pub fn w1(&self, x: Fq, s1: Fq, s2: Fq) -> Fq {
        let c = &self.ctx;
        let x2 = c.sqr(x);
        let x2n = c.pow(x2, self.n as u64);
        c.add(c.add(c.mul(self.gni, x2n), c.mul(c.mul(self.gi, x2), self.f.eval(c, s1, s2))), self.g.eval(c, s1, s2))
    }

    /// `γ^{nj} y^{2n} + γ^j y² f(s+h) + g(s+h)`, the `G₂⁽ʲ⁾` fibre.
    #[inline]
    fn w2(&self, y: Fq, s1: Fq, s2: Fq) -> Fq {
        let c = &self.ctx;
        let y2 = c.sqr(y);
        let y2n = c.pow(y2, self.n as u64);
        let fh = self.fh.eval(c, s1, s2, Fq::ONE);
        let gh = self.gh.eval(c, s1, s2, Fq::ONE);
        c.add(c.add(c.mul(self.gnj, y2n), c.mul(c.mul(self.gj, y2), fh)), gh)
    }

    /// `W = γ^i x² + λ̄ t (μ·s) − λ̄ τ t²`.
    #[inline]
    pub fn w_tau(&self, x: Fq, s1: Fq, s2: Fq, t: Fq, tau: Fq) -> Fq {
        let c = &self.ctx;
        let lin = c.mul(self.lambda_bar, c.mul(t, self.dot_mu(s1, s2)));
        let quad = c.mul(self.lambda_bar, c.mul(tau, c.sqr(t)));
        c.sub(c.add(c.mul(self.gi, c.sqr(x)), lin), quad)
    }

    /// `Wⁿ + W f_h + g_h`, so that `H_τ = −v^{2n} + (this)`.
    #[inline]
    pub fn h_rest(&self, x: Fq, s1: Fq, s2: Fq, t: Fq, tau: Fq) -> Fq {
        let c = &self.ctx;
        let w = self.w_tau(x, s1, s2, t, tau);
        let fh = self.fh.eval(c, s1, s2, t);
        let gh = self.gh.eval(c, s1, s2, t);
        c.add(c.add(c.pow(w, self.n as u64), c.mul(w, fh)), gh)
    }

    /// `G(u, x, s)`.
    pub fn g_value(&self, u: Fq, x: Fq, s1: Fq, s2: Fq) -> Fq {
        let c = &self.ctx;
        c.sub(self.w1(x, s1, s2), c.pow(u, 2 * self.n as u64))
    }

    /// `H_τ(v, x, s, t)`.
    pub fn h_value(&self, v: Fq, x: Fq, s1: Fq, s2: Fq, t: Fq, tau: Fq) -> Fq {
        let c = &self.ctx;
        c.sub(self.h_rest(x, s1, s2, t, tau), c.pow(v, 2 * self.n as u64))
    }

    /// The two rows of the Jacobian of `(G, H_τ)` in the variables
    /// `(U, V, X, S₁, S₂, T)` at `point = (u, v, x, s₁, s₂, t)`.
    pub fn jacobian(&self, point: &[Fq; 6], tau: Fq) -> [[Fq; 6]; 2] {
        let c = &self.ctx;
        let [u, v, x, s1, s2, t] = *point;
        let n = self.n as u64;
        let two_n = c.from_u64(2 * n);
        let x2 = c.sqr(x);
        let fs = self.f.eval(c, s1, s2);
        let gx = c.add(
            c.mul(c.mul(two_n, self.gni), c.pow(x, 2 * n - 1)),
            c.mul(c.mul(c.from_u64(2), self.gi), c.mul(x, fs)),
        );
        let gs1 = c.add(c.mul(c.mul(self.gi, x2), self.f_grad.0.eval(c, s1, s2)), self.g_grad.0.eval(c, s1, s2));
        let gs2 = c.add(c.mul(c.mul(self.gi, x2), self.f_grad.1.eval(c, s1, s2)), self.g_grad.1.eval(c, s1, s2));
        let gu = c.neg(c.mul(two_n, c.pow(u, 2 * n - 1)));
        let row1 = [gu, Fq::ZERO, gx, gs1, gs2, Fq::ZERO];

        let w = self.w_tau(x, s1, s2, t, tau);
        let fh = self.fh.eval(c, s1, s2, t);
        let pw = c.add(c.mul(c.from_u64(n), c.pow(w, n - 1)), fh);
        let (fh1, fh2) = self.fh.grad_s(c, s1, s2, t);
        let (gh1, gh2) = self.gh.grad_s(c, s1, s2, t);
        let lt = c.mul(self.lambda_bar, t);
        let hx = c.mul(pw, c.mul(c.mul(c.from_u64(2), self.gi), x));
        let hs1 = c.add(c.add(c.mul(pw, c.mul(lt, self.mu.0)), c.mul(w, fh1)), gh1);
        let hs2 = c.add(c.add(c.mul(pw, c.mul(lt, self.mu.1)), c.mul(w, fh2)), gh2);
        let dw_dt = c.mul(self.lambda_bar, c.sub(self.dot_mu(s1, s2), c.mul(c.from_u64(2), c.mul(tau, t))));
        let ht = c.add(
            c.add(c.mul(pw, dw_dt), c.mul(w, self.fh.dt(c, s1, s2, t))),
            self.gh.dt(c, s1, s2, t),
        );
        let hv = c.neg(c.mul(two_n, c.pow(v, 2 * n - 1)));
        let row2 = [Fq::ZERO, hv, hx, hs1, hs2, ht];
        [row1, row2]
    }

    /// `τ`-table of the six-variable count
    /// `#{(u,v,x,y,s) : G₁⁽ⁱ⁾ = G₂⁽ʲ⁾ = 0, λ(γⁱx² − γʲy²) + μ·s = τ}`, indexed by
    /// [`ExtCtx::index`]. For each `s` the `x`- and `y`-weights are binned by
    /// `γⁱx²` and `γʲy²` before the convolution.
    pub fn ntau_six_table(&self) -> Vec<u64> {
        let c = &self.ctx;
        let q = c.q() as usize;
        let squares: Vec<Fq> = c.elements().map(|x| c.sqr(x)).collect();
        let s_list: Vec<(Fq, Fq)> = c.elements().flat_map(|a| c.elements().map(move |b| (a, b))).collect();
        let partials: Vec<Vec<u64>> = s_list
            .par_chunks(q)
            .map(|chunk| {
                let mut table = vec![0u64; q];
                let mut a_bins: BTreeMap<usize, u64> = BTreeMap::new();
                let mut b_bins: BTreeMap<usize, u64> = BTreeMap::new();
                for &(s1, s2) in chunk {
                    a_bins.clear();
                    b_bins.clear();
                    for (xi, x) in c.elements().enumerate() {
                        let wa = self.count(self.w1(x, s1, s2));
                        if wa > 0 {
                            *a_bins.entry(c.index(c.mul(self.gi, squares[xi]))).or_default() += wa;
                        }
                        let wb = self.count(self.w2(x, s1, s2));
                        if wb > 0 {
                            *b_bins.entry(c.index(c.mul(self.gj, squares[xi]))).or_default() += wb;
                        }
                    }
                    let ms = self.dot_mu(s1, s2);
                    for (&a, &wa) in &a_bins {
                        for (&b, &wb) in &b_bins {
                            let diff = c.sub(c.element(a), c.element(b));
                            let tau = c.add(c.mul(self.lambda, diff), ms);
                            table[c.index(tau)] += wa * wb;
                        }
                    }
                }
                table
            })
            .collect();
        let mut table = vec![0u64; q];
        for part in partials {
            for (t, v) in table.iter_mut().zip(part) {
                *t += v;
            }
        }
        table
    }

    /// `#{(u,v,x,s) ∈ 𝔽_q⁵ : G = 0, G_τ = 0}` after eliminating `y`.
    pub fn ntau_five(&self, tau: Fq) -> u64 {
        let c = &self.ctx;
        c.elements()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&x| {
                let mut acc = 0u64;
                for s1 in c.elements() {
                    for s2 in c.elements() {
                        let wa = self.count(self.w1(x, s1, s2));
                        if wa > 0 {
                            acc += wa * self.count(self.h_rest(x, s1, s2, Fq::ONE, tau));
                        }
                    }
                }
                acc
            })
            .sum()
    }

    /// `N₁(τ) = #{(y, t) ∈ 𝔽_q⁶ : G(y) = H_τ(y, t) = 0}`.
    pub fn n1(&self, tau: Fq) -> u64 {
        let c = &self.ctx;
        c.elements()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&x| {
                let mut acc = 0u64;
                for s1 in c.elements() {
                    for s2 in c.elements() {
                        let wa = self.count(self.w1(x, s1, s2));
                        if wa == 0 {
                            continue;
                        }
                        for t in c.elements() {
                            acc += wa * self.count(self.h_rest(x, s1, s2, t, tau));
                        }
                    }
                }
                acc
            })
            .sum()
    }

    /// `N₂(τ) = #{y ∈ 𝔽_q⁵ : G(y) = H_τ(y, 0) = 0}`.
    pub fn n2(&self, tau: Fq) -> u64 {
        let c = &self.ctx;
        let mut acc = 0u64;
        for x in c.elements() {
            for s1 in c.elements() {
                for s2 in c.elements() {
                    let wa = self.count(self.w1(x, s1, s2));
                    if wa > 0 {
                        acc += wa * self.count(self.h_rest(x, s1, s2, Fq::ZERO, tau));
                    }
                }
            }
        }
        acc
    }

    /// `Σ_τ N(τ)` computed without binning: `Σ_s #fibre₁(s) · #fibre₂(s)`.
    pub fn six_total(&self) -> u64 {
        let c = &self.ctx;
        let mut acc = 0u64;
        for s1 in c.elements() {
            for s2 in c.elements() {
                let a: u64 = c.elements().map(|x| self.count(self.w1(x, s1, s2))).sum();
                let b: u64 = c.elements().map(|y| self.count(self.w2(y, s1, s2))).sum();
                acc += a * b;
            }
        }
        acc
    }
}

pub fn count_ntau(spec: &TauSpec, dims: Dimensions, tau: Fq) -> u64 {
    match dims {
        Dimensions::Six => spec.ntau_six_table()[spec.ctx.index(tau)],
        Dimensions::Five => spec.ntau_five(tau),
    }
}

pub fn count_n1(spec: &TauSpec, tau: Fq) -> u64 {
    spec.n1(tau)
}

pub fn count_n2(spec: &TauSpec, tau: Fq) -> u64 {
    spec.n2(tau)
}

/// A point `(u, v, x, s₁, s₂, t)` of `ℙ⁵`, scaled so that the last nonzero
/// entry of `(x, s₁, s₂, t)` is 1 (every point of `V_τ` has one).
pub type Point6 = [Fq; 6];

/// Subsets of `V_τ` and the `τ`-free curve `V ⊂ ℙ⁴`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum System {
    /// First Jacobian row vanishes.
    K1,
    /// Second Jacobian row vanishes.
    K2,
    /// `G = H_τ = ∂H_τ/∂T = 0`, the `S`-minor vanishes and `U = V = 0`.
    L,
    /// The four `τ`-free equations in `(X, Z, S₁, S₂, T)`.
    V,
}

impl System {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "K1" => Some(System::K1),
            "K2" => Some(System::K2),
            "L" => Some(System::L),
            "V" => Some(System::V),
            _ => None,
        }
    }
}

fn check_enum_budget(spec: &TauSpec) -> Result<()> {
    if spec.q() > MAX_ENUM_Q {
        return Err(Error::Budget(format!("singular-locus enumeration needs q <= {MAX_ENUM_Q}, got {}", spec.q())));
    }
    Ok(())
}

/// Canonical representatives of `ℙ^{len−1}(𝔽_q)`: last nonzero entry 1.
pub fn projective_points(ctx: &ExtCtx, len: usize) -> Vec<Vec<Fq>> {
    let q = ctx.q() as usize;
    let mut out = Vec::new();
    for k in 0..len {
        // positions < k free, position k is 1, positions > k zero
        let free = k;
        let total = q.pow(free as u32);
        for mut idx in 0..total {
            let mut pt = vec![Fq::ZERO; len];
            for slot in pt.iter_mut().take(free) {
                *slot = ctx.element(idx % q);
                idx /= q;
            }
            pt[k] = Fq::ONE;
            out.push(pt);
        }
    }
    out
}

/// Every point of `V_τ(𝔽_q)` with its Jacobian.
fn vtau_points(spec: &TauSpec, tau: Fq) -> Vec<(Point6, [[Fq; 6]; 2])> {
    let c = &spec.ctx;
    let roots = power_roots(c, 2 * spec.n as u64);
    let mut out = Vec::new();
    for rest in projective_points(c, 4) {
        let (x, s1, s2, t) = (rest[0], rest[1], rest[2], rest[3]);
        let us = &roots[c.index(spec.w1(x, s1, s2))];
        if us.is_empty() {
            continue;
        }
        let vs = &roots[c.index(spec.h_rest(x, s1, s2, t, tau))];
        for &u in us {
            for &v in vs {
                let pt = [u, v, x, s1, s2, t];
                out.push((pt, spec.jacobian(&pt, tau)));
            }
        }
    }
    out
}

fn rank_at_most_one(c: &ExtCtx, jac: &[[Fq; 6]; 2]) -> bool {
    for a in 0..6 {
        for b in a + 1..6 {
            let minor = c.sub(c.mul(jac[0][a], jac[1][b]), c.mul(jac[0][b], jac[1][a]));
            if !minor.is_zero() {
                return false;
            }
        }
    }
    true
}

/// `sing(V_τ)(𝔽_q)`: points of `G = H_τ = 0` where the Jacobian has rank ≤ 1.
pub fn sing_vtau_points(spec: &TauSpec, tau: Fq) -> Result<Vec<Point6>> {
    check_enum_budget(spec)?;
    let c = &spec.ctx;
    Ok(vtau_points(spec, tau).into_iter().filter(|(_, j)| rank_at_most_one(c, j)).map(|(p, _)| p).collect())
}

/// The baseline singular points `u = x = s = 0`, `v^{2n} = (−λ̄ⁿτⁿ − λ̄τ f(h) + g(h)) t^{2n}`.
pub fn baseline_points(spec: &TauSpec, tau: Fq) -> Vec<Point6> {
    let c = &spec.ctx;
    let n = spec.n as u64;
    let lt = c.mul(spec.lambda_bar, tau);
    let fh = spec.f.eval(c, spec.h.0, spec.h.1);
    let gh = spec.g.eval(c, spec.h.0, spec.h.1);
    let rhs = c.add(c.sub(c.neg(c.pow(lt, n)), c.mul(lt, fh)), gh);
    c.elements()
        .filter(|&v| c.pow(v, 2 * n) == rhs)
        .map(|v| [Fq::ZERO, v, Fq::ZERO, Fq::ZERO, Fq::ZERO, Fq::ONE])
        .collect()
}

/// Solutions of one of the auxiliary systems. `K1`, `K2` and `L` are subsets
/// of `V_τ ⊂ ℙ⁵` (six coordinates); `V` lives in `ℙ⁴` with coordinates
/// `(X, Z, S₁, S₂, T)` and ignores `τ`.
pub fn system_points(spec: &TauSpec, system: System, tau: Fq) -> Result<Vec<Vec<Fq>>> {
    check_enum_budget(spec)?;
    let c = &spec.ctx;
    if system == System::V {
        let aux = AuxSystem::new(spec);
        return Ok(projective_points(c, 5).into_iter().filter(|pt| aux.contains(pt)).collect());
    }
    let zero_row = |row: &[Fq; 6]| row.iter().all(|e| e.is_zero());
    Ok(vtau_points(spec, tau)
        .into_iter()
        .filter(|(pt, jac)| match system {
            System::K1 => zero_row(&jac[0]),
            System::K2 => zero_row(&jac[1]),
            System::L => {
                let minor = c.sub(c.mul(jac[0][3], jac[1][4]), c.mul(jac[0][4], jac[1][3]));
                pt[0].is_zero() && pt[1].is_zero() && jac[1][5].is_zero() && minor.is_zero()
            }
            System::V => unreachable!(),
        })
        .map(|(pt, _)| pt.to_vec())
        .collect())
}

/// The curve `V ⊂ ℙ⁴` in the sector `i = 0`, with `Z` standing for
/// `λ̄(μ·S − τT)`. Its fourth equation is the minor of the `S`-partials with
/// the `λ̄Tμ` contributions to `∂H_τ/∂S` left out, exactly as in the
/// dimension argument.
pub struct AuxSystem<'a> {
    spec: &'a TauSpec,
    f_grad_h: (ShiftedForm, ShiftedForm),
    g_grad_h: (ShiftedForm, ShiftedForm),
}

/// Evaluations at one point of `ℙ⁴`.
#[derive(Clone, Copy, Debug)]
pub struct AuxValues {
    pub equations: [Fq; 4],
    /// `X² + TZ`.
    pub w: Fq,
    pub u1: Fq,
    pub u2: Fq,
}

impl<'a> AuxSystem<'a> {
    pub fn new(spec: &'a TauSpec) -> Self {
        let c = &spec.ctx;
        let sh = |f: &ReducedForm| ShiftedForm::new(c, f.clone(), spec.h);
        AuxSystem {
            spec,
            f_grad_h: (sh(&spec.f_grad.0), sh(&spec.f_grad.1)),
            g_grad_h: (sh(&spec.g_grad.0), sh(&spec.g_grad.1)),
        }
    }

    /// `pt = (x, z, s₁, s₂, t)`.
    pub fn eval(&self, pt: &[Fq]) -> AuxValues {
        let sp = self.spec;
        let c = &sp.ctx;
        let n = sp.n as u64;
        let (x, z, s1, s2, t) = (pt[0], pt[1], pt[2], pt[3], pt[4]);
        let x2 = c.sqr(x);
        let fs = sp.f.eval(c, s1, s2);
        let gs = sp.g.eval(c, s1, s2);
        let e1 = c.add(c.add(c.pow(x2, n), c.mul(x2, fs)), gs);
        let w = c.add(x2, c.mul(t, z));
        let fh = sp.fh.eval(c, s1, s2, t);
        let gh = sp.gh.eval(c, s1, s2, t);
        let e2 = c.add(c.add(c.pow(w, n), c.mul(w, fh)), gh);
        let k = c.sub(c.add(z, z), c.mul(sp.lambda_bar, sp.dot_mu(s1, s2)));
        let e3 = c.add(
            c.add(c.mul(c.mul(c.from_u64(n), k), c.pow(w, n - 1)), c.mul(k, fh)),
            c.add(c.mul(w, sp.fh.dt(c, s1, s2, t)), sp.gh.dt(c, s1, s2, t)),
        );
        // first-row S-partials (sector 0) and the shifted partials
        let a1 = c.add(c.mul(x2, sp.f_grad.0.eval(c, s1, s2)), sp.g_grad.0.eval(c, s1, s2));
        let a2 = c.add(c.mul(x2, sp.f_grad.1.eval(c, s1, s2)), sp.g_grad.1.eval(c, s1, s2));
        let fh1 = self.f_grad_h.0.eval(c, s1, s2, t);
        let fh2 = self.f_grad_h.1.eval(c, s1, s2, t);
        let gh1 = self.g_grad_h.0.eval(c, s1, s2, t);
        let gh2 = self.g_grad_h.1.eval(c, s1, s2, t);
        let e4 = c.sub(
            c.mul(a1, c.add(c.mul(w, fh2), gh2)),
            c.mul(a2, c.add(c.mul(w, fh1), gh1)),
        );
        let u1 = c.sub(c.mul(fh2, a1), c.mul(fh1, a2));
        let u2 = c.sub(c.mul(gh2, a1), c.mul(gh1, a2));
        AuxValues { equations: [e1, e2, e3, e4], w, u1, u2 }
    }

    pub fn contains(&self, pt: &[Fq]) -> bool {
        self.eval(pt).equations.iter().all(|e| e.is_zero())
    }
}

/// At every point of `V`, checks the rewrite of the fourth equation: returns
/// `(points, failures of (X²+TZ)U₁ = −U₂, failures of (X²+TZ)U₁ = U₂)`.
/// The fourth equation expands to `(X²+TZ)U₁ + U₂`, so the first count is 0.
pub fn rewrite_check(spec: &TauSpec) -> Result<(usize, usize, usize)> {
    let c = spec.ctx();
    let aux = AuxSystem::new(spec);
    let mut points = 0;
    let mut bad_neg = 0;
    let mut bad_pos = 0;
    for pt in system_points(spec, System::V, Fq::ZERO)? {
        let v = aux.eval(&pt);
        points += 1;
        let lhs = c.mul(v.w, v.u1);
        if lhs != c.neg(v.u2) {
            bad_neg += 1;
        }
        if lhs != v.u2 {
            bad_pos += 1;
        }
    }
    Ok((points, bad_neg, bad_pos))
}

/// `(X²+TZ)U₁ + U₂` equals the fourth equation at any point of `𝔽_q⁵`.
pub fn rewrite_identity_holds(spec: &TauSpec, pt: &[Fq]) -> bool {
    let c = spec.ctx();
    let v = AuxSystem::new(spec).eval(pt);
    c.add(c.mul(v.w, v.u1), v.u2) == v.equations[3]
}

/// With `(s₁, s₂, t)` fixed, `U₁ = a₁X² + b₁` and `U₂ = a₂X² + b₂` are
/// polynomials in `X`. Returns the remainder of
/// `(−U₂)ⁿ + (−U₂)U₁^{n−1}f_h + U₁ⁿg_h` on division by `X^{2n} + X²f + g`
/// (the substitution `X² + TZ = −U₂/U₁`). With `literal_sign` the positive-sign form
/// `U₂ⁿ + U₂U₁^{n−1}f_h + U₁ⁿg_h` is used instead.
pub fn elimination_remainder(spec: &TauSpec, s1: Fq, s2: Fq, t: Fq, literal_sign: bool) -> Poly {
    let c = spec.ctx();
    let n = spec.n;
    let aux = AuxSystem::new(spec);
    let fgrad = (spec.f_grad.0.eval(c, s1, s2), spec.f_grad.1.eval(c, s1, s2));
    let ggrad = (spec.g_grad.0.eval(c, s1, s2), spec.g_grad.1.eval(c, s1, s2));
    let fh = (aux.f_grad_h.0.eval(c, s1, s2, t), aux.f_grad_h.1.eval(c, s1, s2, t));
    let gh = (aux.g_grad_h.0.eval(c, s1, s2, t), aux.g_grad_h.1.eval(c, s1, s2, t));
    // U₁ = X²(fh₂f₁ − fh₁f₂) + (fh₂g₁ − fh₁g₂), U₂ likewise with g_h
    let quad = |a: Fq, b: Fq| Poly(vec![b, Fq::ZERO, a]).trimmed();
    let u1 = quad(
        c.sub(c.mul(fh.1, fgrad.0), c.mul(fh.0, fgrad.1)),
        c.sub(c.mul(fh.1, ggrad.0), c.mul(fh.0, ggrad.1)),
    );
    let u2 = quad(
        c.sub(c.mul(gh.1, fgrad.0), c.mul(gh.0, fgrad.1)),
        c.sub(c.mul(gh.1, ggrad.0), c.mul(gh.0, ggrad.1)),
    );
    let u2 = if literal_sign { u2 } else { u2.scale(c, c.neg(Fq::ONE)) };
    let fhv = spec.fh.eval(c, s1, s2, t);
    let ghv = spec.gh.eval(c, s1, s2, t);
    let poly = u2
        .pow(c, n)
        .add(c, &u2.mul(c, &u1.pow(c, n - 1)).scale(c, fhv))
        .add(c, &u1.pow(c, n).scale(c, ghv));
    let mut divisor = vec![Fq::ZERO; 2 * n as usize + 1];
    divisor[2 * n as usize] = Fq::ONE;
    divisor[2] = spec.f.eval(c, s1, s2);
    divisor[0] = spec.g.eval(c, s1, s2);
    poly.rem(c, &Poly(divisor).trimmed())
}

/// One row of the per-`τ` profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauRow {
    pub tau: String,
    #[serde(rename = "N6")]
    pub n6: u64,
    #[serde(rename = "N5")]
    pub n5: u64,
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N2")]
    pub n2: u64,
    pub sing_count: usize,
    #[serde(rename = "K1")]
    pub k1: usize,
    #[serde(rename = "K2")]
    pub k2: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

/// `a` or `a+bθ`.
pub fn format_fq(ctx: &ExtCtx, x: Fq) -> String {
    if ctx.degree() == 1 {
        x.a.to_string()
    } else {
        format!("{}+{}t", x.a, x.b)
    }
}

/// Every count for every `τ ∈ 𝔽_q`, in index order. The singular-locus
/// columns are filled only when `with_sing` (and `q ≤ 169`).
pub fn tau_profile(spec: &TauSpec, with_sing: bool) -> Result<Vec<TauRow>> {
    if with_sing {
        check_enum_budget(spec)?;
    }
    let c = spec.ctx();
    let six = spec.ntau_six_table();
    let taus: Vec<Fq> = c.elements().collect();
    taus.par_iter()
        .map(|&tau| {
            let (sing, k1, k2, l) = if with_sing {
                (
                    sing_vtau_points(spec, tau)?.len(),
                    system_points(spec, System::K1, tau)?.len(),
                    system_points(spec, System::K2, tau)?.len(),
                    system_points(spec, System::L, tau)?.len(),
                )
            } else {
                (0, 0, 0, 0)
            };
            Ok(TauRow {
                tau: format_fq(c, tau),
                n6: six[c.index(tau)],
                n5: spec.ntau_five(tau),
                n1: spec.n1(tau),
                n2: spec.n2(tau),
                sing_count: sing,
                k1,
                k2,
                l,
            })
        })
        .collect()
}

/// Number of `τ` with more than `2n` singular points on `V_τ(𝔽_q)`.
pub fn bad_tau_count(spec: &TauSpec) -> Result<usize> {
    check_enum_budget(spec)?;
    let c = spec.ctx();
    let taus: Vec<Fq> = c.elements().collect();
    let counts: Vec<usize> = taus.par_iter().map(|&t| sing_vtau_points(spec, t).map(|v| v.len())).collect::<Result<_>>()?;
    Ok(counts.into_iter().filter(|&k| k > 2 * spec.n as usize).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BinaryForm;

    #[test]
    fn count_n_sample() {
        let s = Surface::sample();
        assert_eq!(count_n(&s, 1), 23);
        let om = omega_table(&s, 1);
        assert_eq!(om.get_i64(0), 5);
        assert_eq!(om.get_i64(1), 9);
        assert_eq!(om.total_mass(), 27);
        assert_eq!(om.count_from_squares(3), 23);
    }

    #[test]
    fn count_n_at_zero() {
        let s = Surface::sample();
        assert_eq!(count_n(&s, 0), 1);
        // g(0,0) = 0 for every form of positive degree
        let other = Surface::new(5, BinaryForm::from_i64(&[1, 2, 3, 4, 5, 6, 7, 8, 9]), BinaryForm::from_i64(&[3; 11])).unwrap();
        assert_eq!(count_n(&other, 0), 1);
    }

    #[test]
    fn regrouping_by_y_and_mass() {
        let f = BinaryForm::from_i64(&[1, 0, -2, 0, 1]);
        let g = BinaryForm::from_i64(&[2, -1, 0, 3, 0, 0, -1]);
        let s = Surface::new(3, f, g).unwrap();
        for b in 0..=4 {
            let om = omega_table(&s, b);
            assert_eq!(om.total_mass(), (2 * b * b + 1) * (2 * b + 1) * (2 * b + 1));
            assert_eq!(om.count_from_squares(3), count_n(&s, b));
        }
    }

    #[test]
    fn big_integer_path_agrees_with_small_path() {
        let huge = BigInt::from(10).pow(40);
        let g = BinaryForm::new(vec![huge.clone(), 0.into(), 0.into(), 0.into(), 0.into(), 0.into(), 1.into()]).unwrap();
        let s = Surface::new(3, BinaryForm::zero(4), g).unwrap();
        // brute-force oracle over BigInt
        let b = 2i64;
        let mut oracle = 0u64;
        for x in -b * b..=b * b {
            for u1 in -b..=b {
                for u2 in -b..=b {
                    let m = BigInt::from(x).pow(3) + &huge * BigInt::from(u1).pow(6) + BigInt::from(u2).pow(6);
                    if let Some(k) = square_root_big(&m) {
                        if k <= BigInt::from(8) {
                            oracle += if k.is_zero() { 1 } else { 2 };
                        }
                    }
                }
            }
        }
        assert_eq!(count_n(&s, 2), oracle);
    }

    fn spec(p: u64, r: u32, lambda: i64, h: (i64, i64), mu: (i64, i64), sector: (u8, u8)) -> TauSpec {
        TauSpec::from_ints(&Surface::sample(), p, r, lambda, h, mu, sector).unwrap()
    }

    #[test]
    fn six_variable_partition() {
        let sp = spec(5, 1, 1, (1, 0), (0, 1), (0, 1));
        let table = sp.ntau_six_table();
        assert_eq!(table.iter().sum::<u64>(), sp.six_total());
    }

    /// Literal 𝔽_q⁶ enumeration of the six-variable count.
    fn six_oracle(sp: &TauSpec) -> Vec<u64> {
        let c = sp.ctx();
        let mut table = vec![0u64; c.q() as usize];
        let n2 = 2 * sp.n() as u64;
        for s1 in c.elements() {
            for s2 in c.elements() {
                for x in c.elements() {
                    for u in c.elements() {
                        if !sp.g_value(u, x, s1, s2).is_zero() {
                            continue;
                        }
                        for y in c.elements() {
                            for v in c.elements() {
                                if c.pow(v, n2) != sp.w2(y, s1, s2) {
                                    continue;
                                }
                                let d = c.sub(c.mul(sp.gi, c.sqr(x)), c.mul(sp.gj, c.sqr(y)));
                                let tau = c.add(c.mul(sp.lambda, d), sp.dot_mu(s1, s2));
                                table[c.index(tau)] += 1;
                            }
                        }
                    }
                }
            }
        }
        table
    }

    #[test]
    fn six_variable_table_matches_enumeration() {
        for sector in [(0, 0), (1, 1), (0, 1)] {
            let sp = spec(5, 1, 2, (1, 3), (4, 1), sector);
            assert_eq!(sp.ntau_six_table(), six_oracle(&sp), "{sector:?}");
        }
        for (p, r) in [(7u64, 1u32), (3, 2)] {
            let sp = spec(p, r, 1, (1, 2), (1, 1), (0, 1));
            assert_eq!(sp.ntau_six_table(), six_oracle(&sp), "p={p} r={r}");
        }
    }

    #[test]
    fn five_variable_identity() {
        for (p, r) in [(5u64, 1u32), (7, 1), (3, 2)] {
            let sp = spec(p, r, 1, (1, 2), (2, 0), (1, 0));
            let c = sp.ctx();
            for tau in c.elements() {
                let (n5, n1, n2) = (sp.ntau_five(tau), sp.n1(tau), sp.n2(tau));
                assert_eq!((c.q() - 1) * n5, n1 - n2, "p={p} r={r}");
                assert!(n2 <= n1);
            }
        }
    }

    #[test]
    fn h_tau_is_homogeneous() {
        let sp = spec(11, 1, 3, (2, 5), (1, 7), (1, 1));
        let c = sp.ctx();
        let mut rng_state = 17u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            c.from_u64(rng_state >> 33)
        };
        for _ in 0..100 {
            let (t, v, x, s1, s2, tau) = (next(), next(), next(), next(), next(), next());
            let lhs = sp.h_value(c.mul(t, v), c.mul(t, x), c.mul(t, s1), c.mul(t, s2), t, tau);
            let rhs = c.mul(c.pow(t, 6), sp.h_value(v, x, s1, s2, Fq::ONE, tau));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jacobian_matches_finite_polynomial_derivatives() {
        // ∂/∂X and ∂/∂T through univariate restriction: compare with the
        // formal derivative of the restricted polynomial.
        let sp = spec(13, 1, 4, (3, 1), (2, 5), (1, 0));
        let c = sp.ctx();
        let tau = c.from_u64(6);
        let pts = [(2u64, 7u64, 3u64, 5u64, 9u64, 11u64), (0, 1, 4, 0, 2, 1), (5, 5, 5, 5, 5, 5)];
        for &(u, v, x, s1, s2, t) in &pts {
            let pt = [u, v, x, s1, s2, t].map(|k| c.from_u64(k));
            let jac = sp.jacobian(&pt, tau);
            for coord in 0..6 {
                // H restricted to the line pt + z e_coord, as a polynomial in z by interpolation
                let eval = |z: Fq, which: usize| {
                    let mut q = pt;
                    q[coord] = c.add(q[coord], z);
                    if which == 0 {
                        sp.g_value(q[0], q[2], q[3], q[4])
                    } else {
                        sp.h_value(q[1], q[2], q[3], q[4], q[5], tau)
                    }
                };
                for which in 0..2 {
                    let values: Vec<Fq> = c.elements().map(|z| eval(z, which)).collect();
                    let poly = interpolate(c, &values);
                    assert_eq!(poly.derivative(c).eval(c, Fq::ZERO), jac[which][coord], "row {which} coord {coord}");
                }
            }
        }
    }

    /// Lagrange interpolation through all of 𝔽_p (degree < p).
    fn interpolate(c: &ExtCtx, values: &[Fq]) -> Poly {
        let pts: Vec<Fq> = c.elements().collect();
        let mut acc = Poly::zero();
        for (i, &xi) in pts.iter().enumerate() {
            let mut basis = Poly::constant(Fq::ONE);
            let mut denom = Fq::ONE;
            for (j, &xj) in pts.iter().enumerate() {
                if i != j {
                    basis = basis.mul(c, &Poly(vec![c.neg(xj), Fq::ONE]));
                    denom = c.mul(denom, c.sub(xi, xj));
                }
            }
            acc = acc.add(c, &basis.scale(c, c.mul(values[i], c.inv(denom).unwrap())));
        }
        acc
    }

    #[test]
    fn sing_points_lie_on_v_tau_and_contain_baseline() {
        let sp = spec(5, 1, 1, (1, 0), (0, 1), (0, 0));
        let c = sp.ctx();
        for tau in c.elements() {
            let sing = sing_vtau_points(&sp, tau).unwrap();
            for pt in &sing {
                assert!(sp.g_value(pt[0], pt[2], pt[3], pt[4]).is_zero());
                assert!(sp.h_value(pt[1], pt[2], pt[3], pt[4], pt[5], tau).is_zero());
            }
            for b in baseline_points(&sp, tau) {
                assert!(sing.contains(&b));
            }
        }
    }

    #[test]
    fn decomposition_of_the_singular_locus() {
        for sector in [(0, 0), (1, 0)] {
            let sp = spec(5, 1, 2, (1, 1), (3, 0), sector);
            let c = sp.ctx();
            for tau in c.elements() {
                let mut sing: Vec<Vec<Fq>> = sing_vtau_points(&sp, tau).unwrap().iter().map(|p| p.to_vec()).collect();
                let mut union: Vec<Vec<Fq>> = [System::K1, System::K2, System::L]
                    .iter()
                    .flat_map(|&s| system_points(&sp, s, tau).unwrap())
                    .collect();
                let key = |p: &Vec<Fq>| p.iter().map(|e| (e.a, e.b)).collect::<Vec<_>>();
                sing.sort_by_key(key);
                union.sort_by_key(key);
                union.dedup();
                assert_eq!(sing, union);
            }
        }
    }

    #[test]
    fn k2_misses_the_hyperplane_t_zero() {
        let sp = spec(5, 1, 1, (1, 2), (1, 1), (0, 0));
        let c = sp.ctx();
        for tau in c.elements() {
            for pt in system_points(&sp, System::K2, tau).unwrap() {
                assert!(!pt[5].is_zero());
            }
        }
    }

    #[test]
    fn rewrite_carries_a_minus_sign() {
        let sp = spec(5, 1, 1, (1, 0), (1, 2), (0, 0));
        let c = sp.ctx();
        for pt in projective_points(c, 5).iter().step_by(7) {
            assert!(rewrite_identity_holds(&sp, pt));
        }
        let (points, bad_neg, _) = rewrite_check(&sp).unwrap();
        assert!(points > 0);
        assert_eq!(bad_neg, 0);
    }

    #[test]
    fn elimination_remainder_is_nonzero_somewhere() {
        let f = BinaryForm::from_i64(&[1, 0, 2, 0, 1]);
        let g = BinaryForm::from_i64(&[1, 1, 0, 0, 0, 3, 1]);
        let s = Surface::new(3, f, g).unwrap();
        let sp = TauSpec::from_ints(&s, 11, 1, 2, (1, 3), (2, 1), (0, 0)).unwrap();
        let c = sp.ctx();
        let mut nonzero = 0;
        for k in 0..50u64 {
            let (s1, s2, t) = (c.from_u64(k * 7 + 1), c.from_u64(k * 3 + 2), c.from_u64(k + 1));
            if !elimination_remainder(&sp, s1, s2, t, false).is_zero() {
                nonzero += 1;
            }
        }
        assert!(nonzero > 0);
    }

    #[test]
    fn projective_enumeration_counts() {
        let c = ExtCtx::new(5, 1).unwrap();
        assert_eq!(projective_points(&c, 3).len(), 31);
        assert_eq!(projective_points(&c, 6).len(), (5usize.pow(6) - 1) / 4);
    }

    #[test]
    fn enumeration_budget() {
        let sp = spec(13, 2, 1, (1, 0), (0, 1), (0, 0));
        assert_eq!(sp.q(), 169);
        let big = TauSpec::from_ints(&Surface::sample(), 17, 2, 1, (1, 0), (0, 1), (0, 0)).unwrap();
        assert!(sing_vtau_points(&big, Fq::ZERO).is_err());
        assert!(TauSpec::from_ints(&Surface::sample(), 5, 1, 0, (1, 0), (0, 1), (0, 0)).is_err());
    }
}
