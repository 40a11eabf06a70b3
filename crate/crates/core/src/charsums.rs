//! Complete character sums: the one-variable sum twisted by `e_p(cx)`, the
//! sums `S(r,c,u)`, `U(r,c,B)` and `C(r)`, the two-fibre correlation `W_p`
//! with its sector decomposition, and the CRT split of `W(k)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::OmegaTable;
use crate::error::{invalid, Result};
use crate::ff::{
    crt_data, gcd, inv_mod, is_prime, is_squarefree, jacobi_table, mod_i64, pow_mod, power_count_table,
    prime_factors, CharTable, ExtCtx, PrimeCtx,
};
use crate::forms::{good_prime, ModForm, Surface};
use crate::sum::SumValue;

/// Explicit constant standing in for `C_n` in the one-variable bound:
/// `|Σ_x χ(xⁿ+ax+b) e_p(cx)| ≤ (n+1)√p + n`.
pub fn riem_bound(p: u64, n: u32) -> f64 {
    (n as f64 + 1.0) * (p as f64).sqrt() + n as f64
}

/// `Σ_{x∈𝔽_p} χ(xⁿ + ax + b) e_p(cx)`. Even `n` is accepted; such values
/// lie outside the hypotheses of the bound (see [`riem_bound`]).
pub fn riem_sum(p: u64, n: u32, a: i64, b: i64, c: i64) -> Result<SumValue> {
    let ctx = PrimeCtx::new(p)?;
    Ok(riem_sum_in(&ctx, n, mod_i64(a, p), mod_i64(b, p), mod_i64(c, p)))
}

pub fn riem_sum_in(ctx: &PrimeCtx, n: u32, a: u64, b: u64, c: u64) -> SumValue {
    let p = ctx.p();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..p {
        let v = ctx.add(ctx.add(ctx.pow(x, n as u64), ctx.mul(a, x)), b);
        let chi = ctx.chi(v);
        if chi != 0 {
            acc += ctx.e(ctx.mul(c, x)) * chi as f64;
        }
    }
    SumValue::new(acc, p)
}

/// Largest `|riem_sum|` over all `(a, b, c) ∈ 𝔽_p³`, with a maximiser.
pub fn riem_max_exhaustive(p: u64, n: u32) -> Result<(f64, (u64, u64, u64))> {
    let ctx = PrimeCtx::new(p)?;
    let xn: Vec<u64> = (0..p).map(|x| ctx.pow(x, n as u64)).collect();
    let best = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut best = (-1.0f64, (0, 0, 0));
            let mut chi = vec![0i8; p as usize];
            for b in 0..p {
                for x in 0..p {
                    chi[x as usize] = ctx.chi(ctx.add(ctx.add(xn[x as usize], ctx.mul(a, x)), b));
                }
                for c in 0..p {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..p {
                        let s = chi[x as usize];
                        if s != 0 {
                            acc += ctx.e(c * x % p) * s as f64;
                        }
                    }
                    if acc.norm() > best.0 {
                        best = (acc.norm(), (a, b, c));
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((-1.0f64, (0, 0, 0)), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(best)
}

fn check_modulus(r: u64) -> Result<()> {
    if r == 0 || r % 2 == 0 || !is_squarefree(r) {
        return invalid(format!("modulus r must be odd, positive and squarefree, got {r}"));
    }
    Ok(())
}

/// Data for evaluating `S(r, c, u)` modulo a fixed odd squarefree `r`: the
/// Jacobi table, `e_r` and the powers `αⁿ mod r`.
#[derive(Clone, Debug)]
pub struct SModulus {
    r: u64,
    jac: Vec<i8>,
    chars: CharTable,
    alpha_n: Vec<u64>,
    f: ModForm,
    g: ModForm,
}

impl SModulus {
    pub fn new(r: u64, surface: &Surface) -> Result<Self> {
        check_modulus(r)?;
        let n = surface.n() as u64;
        Ok(SModulus {
            r,
            jac: jacobi_table(r)?,
            chars: CharTable::new(r)?,
            alpha_n: (0..r).map(|a| pow_mod(a, n, r)).collect(),
            f: ModForm::new(surface.f(), r),
            g: ModForm::new(surface.g(), r),
        })
    }

    pub fn modulus(&self) -> u64 {
        self.r
    }

    #[inline]
    pub fn jacobi(&self, a: u64) -> i8 {
        self.jac[(a % self.r) as usize]
    }

    /// `S(r, c, u)` given the residues `f(u) mod r`, `g(u) mod r`.
    pub fn eval_fg(&self, c: u64, fu: u64, gu: u64) -> Complex64 {
        let r = self.r as u128;
        let mut acc = Complex64::new(0.0, 0.0);
        for alpha in 0..self.r {
            let v = (self.alpha_n[alpha as usize] as u128 + alpha as u128 * fu as u128 + gu as u128) % r;
            let j = self.jac[v as usize];
            if j != 0 {
                acc += self.chars.at((c as u128 * alpha as u128 % r) as u64) * j as f64;
            }
        }
        acc
    }

    pub fn eval(&self, c: u64, u1: i64, u2: i64) -> SumValue {
        SumValue::new(self.eval_fg(c % self.r, self.f.eval_i64(u1, u2), self.g.eval_i64(u1, u2)), self.r)
    }

    /// `S(r, c, u)` for every residue pair `u mod r`, indexed `u₁·r + u₂`.
    pub fn residue_table(&self, c: u64) -> Vec<Complex64> {
        let r = self.r;
        (0..r * r)
            .into_par_iter()
            .map(|i| {
                let (u1, u2) = (i / r, i % r);
                self.eval_fg(c % r, self.f.eval(u1, u2), self.g.eval(u1, u2))
            })
            .collect()
    }
}

/// `S(r, c, u₁, u₂) = Σ_{α mod r} ((αⁿ + αf(u) + g(u)) / r) e_r(cα)`, summed directly.
pub fn sum_s(r: u64, c: i64, u1: i64, u2: i64, surface: &Surface) -> Result<SumValue> {
    let m = SModulus::new(r, surface)?;
    Ok(m.eval(mod_i64(c, r), u1, u2))
}

/// The same sum assembled from its prime factors through the CRT splitting
/// `S(r₀r₁, c) = S(r₀, c r̄₁) S(r₁, c r̄₀)`.
pub fn sum_s_crt(r: u64, c: i64, u1: i64, u2: i64, surface: &Surface) -> Result<SumValue> {
    check_modulus(r)?;
    let primes = prime_factors(r);
    if primes.len() <= 1 {
        return sum_s(r, c, u1, u2, surface);
    }
    let r0 = primes[0];
    let r1 = r / r0;
    let (r1_bar, r0_bar) = crt_data(r0, r1)?;
    let c0 = mod_i64(c, r0) * r1_bar % r0;
    let c1 = (mod_i64(c, r1) as u128 * r0_bar as u128 % r1 as u128) as i64;
    let a = sum_s(r0, c0 as i64, u1, u2, surface)?;
    let b = sum_s_crt(r1, c1, u1, u2, surface)?;
    Ok(a * b)
}

/// The explicit two-factor split for a chosen coprime factorisation `r = r₀r₁`.
pub fn sum_s_split(r0: u64, r1: u64, c: i64, u1: i64, u2: i64, surface: &Surface) -> Result<(SumValue, SumValue)> {
    let (r1_bar, r0_bar) = crt_data(r0, r1)?;
    let c0 = (mod_i64(c, r0) as u128 * r1_bar as u128 % r0 as u128) as i64;
    let c1 = (mod_i64(c, r1) as u128 * r0_bar as u128 % r1 as u128) as i64;
    Ok((sum_s(r0, c0, u1, u2, surface)?, sum_s(r1, c1, u1, u2, surface)?))
}

/// `U(r, c, B) = Σ_{|u₁|,|u₂| ≤ B} S(r, c, u)`.
pub fn sum_u(r: u64, c: i64, b: u64, surface: &Surface) -> Result<SumValue> {
    let m = SModulus::new(r, surface)?;
    let c = mod_i64(c, r);
    let side = 2 * b + 1;
    let bi = b as i64;
    let total = if side * side > r * r {
        let table = m.residue_table(c);
        let mut acc = Complex64::new(0.0, 0.0);
        for u1 in -bi..=bi {
            for u2 in -bi..=bi {
                acc += table[(mod_i64(u1, r) * r + mod_i64(u2, r)) as usize];
            }
        }
        acc
    } else {
        let rows: Vec<Complex64> = (-bi..=bi)
            .into_par_iter()
            .map(|u1| (-bi..=bi).map(|u2| m.eval(c, u1, u2).value()).sum())
            .collect();
        rows.into_iter().sum()
    };
    Ok(SumValue::new(total, side * side * r))
}

/// Majorant `B² r^{1/2}` for `U(r,c,B)` with the constant left out.
pub fn sum_u_majorant(r: u64, b: u64) -> f64 {
    (b as f64).powi(2) * (r as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CMethod {
    /// The triple sum over `|u₁|,|u₂| ≤ B`, `|x| ≤ B²`.
    Direct,
    /// `Σ_m ω(m) (m/r)` from the ω table.
    Weighted,
}

/// `C(r) = Σ_m ω(m) (m/r)`.
pub fn sum_c(r: u64, b: u64, surface: &Surface, method: CMethod) -> Result<SumValue> {
    check_modulus(r)?;
    match method {
        CMethod::Direct => sum_c_direct(r, b, surface),
        CMethod::Weighted => {
            let omega = OmegaTable::build(surface, b);
            sum_c_weighted(r, &omega)
        }
    }
}

fn sum_c_direct(r: u64, b: u64, surface: &Surface) -> Result<SumValue> {
    let jac = jacobi_table(r)?;
    let f = ModForm::new(surface.f(), r);
    let g = ModForm::new(surface.g(), r);
    let n = surface.n() as u64;
    let bi = b as i64;
    let xmax = bi * bi;
    let rows: Vec<i64> = (-bi..=bi)
        .into_par_iter()
        .map(|u1| {
            let mut acc = 0i64;
            for u2 in -bi..=bi {
                let (fu, gu) = (f.eval_i64(u1, u2) as u128, g.eval_i64(u1, u2) as u128);
                for x in -xmax..=xmax {
                    let xr = mod_i64(x, r);
                    let v = (pow_mod(xr, n, r) as u128 + xr as u128 * fu + gu) % r as u128;
                    acc += jac[v as usize] as i64;
                }
            }
            acc
        })
        .collect();
    let cells = (2 * b * b + 1) * (2 * b + 1) * (2 * b + 1);
    Ok(SumValue::real(rows.into_iter().sum::<i64>() as f64, cells))
}

/// `C(r)` from a precomputed ω table.
pub fn sum_c_weighted(r: u64, omega: &OmegaTable) -> Result<SumValue> {
    let jac = jacobi_table(r)?;
    let hist = omega.residue_histogram(r);
    let total: i64 = hist.iter().zip(&jac).map(|(&w, &j)| w as i64 * j as i64).sum();
    Ok(SumValue::real(total as f64, omega.total_mass()))
}

/// Parameters of `W_p(λ, h, μ)`; integers are reduced modulo `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WpParams {
    pub p: u64,
    pub lambda: i64,
    pub h: (i64, i64),
    pub mu: (i64, i64),
}

impl WpParams {
    /// `λ ≠ 0` and `(h, μ) ≠ 0`: the hypotheses of the square-root-type bound.
    pub fn in_theorem_range(&self) -> bool {
        let p = self.p;
        let z = |v: i64| mod_i64(v, p) == 0;
        !z(self.lambda) && !(z(self.h.0) && z(self.h.1) && z(self.mu.0) && z(self.mu.1))
    }

    /// `gcd(p, h₁, h₂, μ₁, μ₂)`: `p` when every shift vanishes mod `p`, else 1.
    pub fn gcd_factor(&self) -> u64 {
        let p = self.p;
        [self.h.0, self.h.1, self.mu.0, self.mu.1]
            .iter()
            .fold(p, |acc, &v| gcd(acc, mod_i64(v, p)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WpAlgorithm {
    Naive,
    Factored,
}

/// Per-prime data for `W_p`: the fibre values `f(s)`, `g(s)` for all
/// `s ∈ 𝔽_p²` (indexed `s₁·p + s₂`) and `αⁿ`.
#[derive(Clone, Debug)]
pub struct WpEngine {
    ctx: PrimeCtx,
    n: u32,
    f: Vec<u64>,
    g: Vec<u64>,
    alpha_n: Vec<u64>,
}

impl WpEngine {
    pub fn new(surface: &Surface, p: u64) -> Result<Self> {
        let ctx = PrimeCtx::new(p)?;
        let f = ModForm::new(surface.f(), p);
        let g = ModForm::new(surface.g(), p);
        let mut fv = Vec::with_capacity((p * p) as usize);
        let mut gv = Vec::with_capacity((p * p) as usize);
        for s1 in 0..p {
            for s2 in 0..p {
                fv.push(f.eval(s1, s2));
                gv.push(g.eval(s1, s2));
            }
        }
        let n = surface.n();
        let alpha_n = (0..p).map(|a| ctx.pow(a, n as u64)).collect();
        Ok(WpEngine { ctx, n, f: fv, g: gv, alpha_n })
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    fn idx(&self, s1: u64, s2: u64) -> usize {
        (s1 * self.ctx.p() + s2) as usize
    }

    #[inline]
    fn chi_fibre(&self, alpha: u64, s: usize) -> i8 {
        let c = &self.ctx;
        c.chi(c.add(c.add(self.alpha_n[alpha as usize], c.mul(alpha, self.f[s])), self.g[s]))
    }

    /// `T_s(λ) = Σ_α χ(αⁿ + αf(s) + g(s)) e_p(λα)` for every `s`.
    pub fn t_table(&self, lambda: u64) -> Vec<Complex64> {
        let p = self.ctx.p();
        (0..(p * p) as usize)
            .into_par_iter()
            .map(|s| {
                let mut acc = Complex64::new(0.0, 0.0);
                for alpha in 0..p {
                    let chi = self.chi_fibre(alpha, s);
                    if chi != 0 {
                        acc += self.ctx.e(lambda * alpha % p) * chi as f64;
                    }
                }
                acc
            })
            .collect()
    }

    /// `Σ_s T_{s+h}(λ) conj(T_s(λ)) e_p(μ·s)` from a precomputed `T` table.
    pub fn wp_from_table(&self, t: &[Complex64], h: (u64, u64), mu: (u64, u64)) -> SumValue {
        let p = self.ctx.p();
        let rows: Vec<Complex64> = (0..p)
            .into_par_iter()
            .map(|s1| {
                let mut acc = Complex64::new(0.0, 0.0);
                for s2 in 0..p {
                    let shifted = self.idx((s1 + h.0) % p, (s2 + h.1) % p);
                    let phase = (mu.0 * s1 + mu.1 * s2) % p;
                    acc += t[shifted] * t[self.idx(s1, s2)].conj() * self.ctx.e(phase);
                }
                acc
            })
            .collect();
        SumValue::new(rows.into_iter().sum(), p.pow(4))
    }

    pub fn wp(&self, params: &WpParams, algorithm: WpAlgorithm) -> SumValue {
        let p = self.ctx.p();
        let lambda = mod_i64(params.lambda, p);
        let h = (mod_i64(params.h.0, p), mod_i64(params.h.1, p));
        let mu = (mod_i64(params.mu.0, p), mod_i64(params.mu.1, p));
        match algorithm {
            WpAlgorithm::Factored => self.wp_from_table(&self.t_table(lambda), h, mu),
            WpAlgorithm::Naive => self.wp_naive(lambda, h, mu),
        }
    }

    fn wp_naive(&self, lambda: u64, h: (u64, u64), mu: (u64, u64)) -> SumValue {
        let p = self.ctx.p();
        let rows: Vec<Complex64> = (0..p)
            .into_par_iter()
            .map(|s1| {
                let mut acc = Complex64::new(0.0, 0.0);
                for s2 in 0..p {
                    let s = self.idx(s1, s2);
                    let sh = self.idx((s1 + h.0) % p, (s2 + h.1) % p);
                    for alpha in 0..p {
                        let ca = self.chi_fibre(alpha, sh);
                        if ca == 0 {
                            continue;
                        }
                        for beta in 0..p {
                            let cb = self.chi_fibre(beta, s);
                            if cb == 0 {
                                continue;
                            }
                            let phase = (lambda * ((alpha + p - beta) % p) + mu.0 * s1 + mu.1 * s2) % p;
                            acc += self.ctx.e(phase) * (ca * cb) as f64;
                        }
                    }
                }
                acc
            })
            .collect();
        SumValue::new(rows.into_iter().sum(), p.pow(4))
    }

    /// `W_{p,i,j}(λ, h, μ)`: the sum of `e_p(λ(γⁱx² − γʲy²) + μ·s)` over the
    /// solutions in `𝔽_p⁶` of `G₁⁽ⁱ⁾ = G₂⁽ʲ⁾ = 0`. The `u` and `v`
    /// multiplicities come from the `2n`-th power counts, and the `x` and `y`
    /// sums factor through each `s`.
    pub fn wpij(&self, params: &WpParams, sector: (u8, u8)) -> SumValue {
        let p = self.ctx.p();
        let c = &self.ctx;
        let lambda = mod_i64(params.lambda, p);
        let h = (mod_i64(params.h.0, p), mod_i64(params.h.1, p));
        let mu = (mod_i64(params.mu.0, p), mod_i64(params.mu.1, p));
        let ext = ExtCtx::over(self.ctx.clone(), 1).expect("degree 1");
        let cnt = power_count_table(&ext, 2 * self.n as u64);
        let gamma = c.nonsquare();
        let gi = if sector.0 == 1 { gamma } else { 1 };
        let gj = if sector.1 == 1 { gamma } else { 1 };
        let gni = c.pow(gi, self.n as u64);
        let gnj = c.pow(gj, self.n as u64);
        let neg_lambda = c.neg(lambda);
        // fibre_sum(s, γ^k, γ^{nk}, λ') = Σ_x cnt[γ^{nk}x^{2n} + γ^k x² f(s) + g(s)] e_p(λ'γ^k x²)
        let x2: Vec<u64> = (0..p).map(|x| c.mul(x, x)).collect();
        let x2n: Vec<u64> = (0..p).map(|x| c.pow(x, 2 * self.n as u64)).collect();
        let fibre = |s: usize, gk: u64, gnk: u64, lam: u64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..p as usize {
                let w = c.add(c.add(c.mul(gnk, x2n[x]), c.mul(c.mul(gk, x2[x]), self.f[s])), self.g[s]);
                let k = cnt[w as usize];
                if k != 0 {
                    acc += c.e(c.mul(lam, c.mul(gk, x2[x]))) * k as f64;
                }
            }
            acc
        };
        let rows: Vec<Complex64> = (0..p)
            .into_par_iter()
            .map(|s1| {
                let mut acc = Complex64::new(0.0, 0.0);
                for s2 in 0..p {
                    let s = self.idx(s1, s2);
                    let sh = self.idx((s1 + h.0) % p, (s2 + h.1) % p);
                    let a = fibre(s, gi, gni, lambda);
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let b = fibre(sh, gj, gnj, neg_lambda);
                    acc += a * b * c.e((mu.0 * s1 + mu.1 * s2) % p);
                }
                acc
            })
            .collect();
        let terms = (p.pow(4)).saturating_mul(4 * self.n as u64 * self.n as u64);
        SumValue::new(rows.into_iter().sum(), terms)
    }
}

fn check_wp_prime(p: u64) -> Result<()> {
    if !is_prime(p) || p < 3 {
        return invalid(format!("W_p needs an odd prime, got {p}"));
    }
    Ok(())
}

/// `W_p(λ, h, μ)`. Primes failing the good-prime test are computed all the
/// same; see [`wp_hypotheses_hold`].
pub fn sum_wp(params: &WpParams, surface: &Surface, algorithm: WpAlgorithm) -> Result<SumValue> {
    check_wp_prime(params.p)?;
    Ok(WpEngine::new(surface, params.p)?.wp(params, algorithm))
}

pub fn sum_wpij(params: &WpParams, sector: (u8, u8), surface: &Surface) -> Result<SumValue> {
    check_wp_prime(params.p)?;
    if sector.0 > 1 || sector.1 > 1 {
        return invalid(format!("sector indices must be 0 or 1, got {sector:?}"));
    }
    Ok(WpEngine::new(surface, params.p)?.wpij(params, sector))
}

/// Whether `p` is good with `p ≡ 2 (mod n)` and `(λ, h, μ)` lie in the range of the bound.
pub fn wp_hypotheses_hold(params: &WpParams, surface: &Surface) -> bool {
    good_prime(surface, params.p, true) && params.in_theorem_range()
}

/// Both sides of the sector decomposition: `W_p(λ, h, μ)` and
/// `¼ Σ_{i,j} W_{p,i,j}(−λ, h, μ)`.
///
/// In `W_{p,i,j}` the variable `x` sits on the unshifted fibre with phase
/// `+λ`, whereas in `W_p` the unshifted variable `β` carries `−λ`; the
/// decomposition therefore pairs `W_p(λ)` with the sector sums at `−λ`.
/// It needs `λ ≠ 0` (at `λ = 0` each sector picks up an extra `p·#fibres`)
/// and `p ≡ 2 (mod n)` so that `u ↦ uⁿ` is a bijection of `𝔽_p`.
pub fn sector_identity_sides(params: &WpParams, surface: &Surface) -> Result<(SumValue, SumValue)> {
    let p = params.p;
    if mod_i64(params.lambda, p) == 0 {
        return invalid("sector decomposition needs lambda != 0 mod p");
    }
    if p % surface.n() as u64 != 2 % surface.n() as u64 {
        return invalid(format!("sector decomposition needs p = 2 mod n, got p = {p}"));
    }
    let engine = WpEngine::new(surface, p)?;
    let lhs = engine.wp(params, WpAlgorithm::Factored);
    let flipped = WpParams { lambda: -params.lambda, ..*params };
    let rhs = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|sector| engine.wpij(&flipped, sector))
        .sum::<SumValue>()
        .scale(0.25);
    Ok((lhs, rhs))
}

/// `W(k)` modulo `r₀ = pp'` computed directly, and its two CRT factors
/// `W_p(c r̄₁ p̄', h r₁, k p̄')` and `W_{p'}(c r̄₁ p̄, h r₁, k p̄)`.
pub fn wk_factor(
    p: u64,
    pp: u64,
    k: (i64, i64),
    c: i64,
    r1: u64,
    h: (i64, i64),
    surface: &Surface,
) -> Result<(SumValue, SumValue, SumValue)> {
    if p == pp {
        return invalid("W(k) needs two distinct primes");
    }
    for q in [p, pp] {
        if !is_prime(q) || q < 3 {
            return invalid(format!("W(k) needs odd primes, got {q}"));
        }
    }
    let r0 = p * pp;
    if r1 == 0 || gcd(r1, r0) != 1 {
        return invalid(format!("r1 = {r1} must be positive and coprime to {r0}"));
    }
    let r1_bar = inv_mod(r1 % r0, r0).expect("coprime");
    let lam = (mod_i64(c, r0) as u128 * r1_bar as u128 % r0 as u128) as u64;
    let shift = (
        (mod_i64(h.0, r0) as u128 * r1 as u128 % r0 as u128) as u64,
        (mod_i64(h.1, r0) as u128 * r1 as u128 % r0 as u128) as u64,
    );
    let kk = (mod_i64(k.0, r0), mod_i64(k.1, r0));
    let direct = wk_direct(r0, lam, shift, kk, surface)?;

    let pp_bar = inv_mod(pp % p, p).expect("distinct primes");
    let p_bar = inv_mod(p % pp, pp).expect("distinct primes");
    let factor = |q: u64, bar: u64| -> Result<SumValue> {
        let params = WpParams {
            p: q,
            lambda: (lam % q * bar % q) as i64,
            h: ((shift.0 % q) as i64, (shift.1 % q) as i64),
            mu: ((kk.0 % q * bar % q) as i64, (kk.1 % q * bar % q) as i64),
        };
        sum_wp(&params, surface, WpAlgorithm::Factored)
    };
    Ok((direct, factor(p, pp_bar)?, factor(pp, p_bar)?))
}

/// `Σ_{α,β,s mod r₀} (F_{s+h}(α)/r₀)(F_s(β)/r₀) e_{r₀}(λ(α−β) + k·s)`,
/// grouped as `Σ_s T_{s+h} conj(T_s) e_{r₀}(k·s)` over residues mod `r₀`.
fn wk_direct(r0: u64, lambda: u64, h: (u64, u64), k: (u64, u64), surface: &Surface) -> Result<SumValue> {
    let m = SModulus::new(r0, surface)?;
    let t = m.residue_table(lambda);
    let chars = CharTable::new(r0)?;
    let rows: Vec<Complex64> = (0..r0)
        .into_par_iter()
        .map(|s1| {
            let mut acc = Complex64::new(0.0, 0.0);
            for s2 in 0..r0 {
                let sh = ((s1 + h.0) % r0 * r0 + (s2 + h.1) % r0) as usize;
                let phase = ((k.0 as u128 * s1 as u128 + k.1 as u128 * s2 as u128) % r0 as u128) as u64;
                acc += t[sh] * t[(s1 * r0 + s2) as usize].conj() * chars.at(phase);
            }
            acc
        })
        .collect();
    Ok(SumValue::new(rows.into_iter().sum(), r0.pow(4)))
}
