//! Integer binary forms, the surface datum `(n, f, g)` and the exact mod-`p`
//! predicates (separability, smoothness, good primes) built on them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ff::{is_prime, ExtCtx, Fq};
use crate::poly::Poly;

/// `Σ c_i S₁^{d−i} S₂^i` with arbitrary-precision integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    S1,
    S2,
}

impl BinaryForm {
    /// Form of degree `coeffs.len() − 1`.
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("a binary form needs at least one coefficient");
        }
        Ok(BinaryForm { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        BinaryForm { coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect() }
    }

    pub fn zero(degree: usize) -> Self {
        BinaryForm { coeffs: vec![BigInt::zero(); degree + 1] }
    }

    /// `c·S₁^{d−k} S₂^k`.
    pub fn monomial(degree: usize, k: usize, c: i64) -> Self {
        let mut f = Self::zero(degree);
        f.coeffs[k] = BigInt::from(c);
        f
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        let m = BigInt::from(p);
        self.coeffs.iter().all(|c| (c % &m).is_zero())
    }

    pub fn reduce(&self, ctx: &ExtCtx) -> ReducedForm {
        ReducedForm { coeffs: self.coeffs.iter().map(|c| ctx.from_big(c)).collect() }
    }

    /// Residues of the coefficients modulo `m`.
    pub fn residues(&self, m: u64) -> Vec<u64> {
        self.coeffs.iter().map(|c| crate::ff::mod_big(c, m)).collect()
    }

    pub fn eval_int(&self, s1: &BigInt, s2: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut s2_pow = BigInt::one();
        for c in &self.coeffs {
            acc = acc * s1 + c * &s2_pow;
            s2_pow *= s2;
        }
        acc
    }

    /// Partial derivative; a degree-0 form differentiates to the zero form of degree 0.
    pub fn derivative(&self, axis: Axis) -> BinaryForm {
        let d = self.degree();
        if d == 0 {
            return BinaryForm::zero(0);
        }
        let coeffs = match axis {
            Axis::S1 => (0..d).map(|i| &self.coeffs[i] * BigInt::from(d - i)).collect(),
            Axis::S2 => (1..=d).map(|i| &self.coeffs[i] * BigInt::from(i)).collect(),
        };
        BinaryForm { coeffs }
    }

    pub fn add(&self, other: &BinaryForm) -> Result<BinaryForm> {
        if self.degree() != other.degree() {
            return invalid("adding binary forms of different degrees");
        }
        Ok(BinaryForm { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &BinaryForm) -> Result<BinaryForm> {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> BinaryForm {
        BinaryForm { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let mut coeffs = vec![BigInt::zero(); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        BinaryForm { coeffs }
    }

    pub fn pow(&self, e: u32) -> BinaryForm {
        let mut acc = BinaryForm { coeffs: vec![BigInt::one()] };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `F(T, 1)` reduced into `𝔽_q`.
    pub fn dehomogenize(&self, ctx: &ExtCtx) -> Poly {
        self.reduce(ctx).dehomogenize()
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if d - i > 0 {
                write!(f, "·S1^{}", d - i)?;
            }
            if i > 0 {
                write!(f, "·S2^{i}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A binary form with coefficients in `𝔽_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    coeffs: Vec<Fq>,
}

impl ReducedForm {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Homogeneous Horner evaluation.
    #[inline]
    pub fn eval(&self, ctx: &ExtCtx, s1: Fq, s2: Fq) -> Fq {
        let mut acc = Fq::ZERO;
        let mut s2_pow = Fq::ONE;
        for &c in &self.coeffs {
            acc = ctx.add(ctx.mul(acc, s1), ctx.mul(c, s2_pow));
            s2_pow = ctx.mul(s2_pow, s2);
        }
        acc
    }

    pub fn derivative(&self, ctx: &ExtCtx, axis: Axis) -> ReducedForm {
        let d = self.degree();
        if d == 0 {
            return ReducedForm { coeffs: vec![Fq::ZERO] };
        }
        let coeffs = match axis {
            Axis::S1 => (0..d).map(|i| ctx.mul(self.coeffs[i], ctx.from_u64((d - i) as u64))).collect(),
            Axis::S2 => (1..=d).map(|i| ctx.mul(self.coeffs[i], ctx.from_u64(i as u64))).collect(),
        };
        ReducedForm { coeffs }
    }

    /// `F(T, 1)`.
    pub fn dehomogenize(&self) -> Poly {
        Poly(self.coeffs.iter().rev().copied().collect()).trimmed()
    }

    /// `G(T) = F(s₁ + h₁T, s₂ + h₂T)` as a univariate polynomial.
    pub fn restrict_to_line(&self, ctx: &ExtCtx, s: (Fq, Fq), h: (Fq, Fq)) -> Poly {
        let l1 = Poly(vec![s.0, h.0]).trimmed();
        let l2 = Poly(vec![s.1, h.1]).trimmed();
        let d = self.degree();
        let mut acc = Poly::zero();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = l1.pow(ctx, (d - i) as u32).mul(ctx, &l2.pow(ctx, i as u32)).scale(ctx, c);
            acc = acc.add(ctx, &term);
        }
        acc
    }
}

/// A form with coefficients reduced modulo an arbitrary modulus `m`, for
/// evaluation over `ℤ/mℤ` (composite moduli included).
#[derive(Clone, Debug)]
pub struct ModForm {
    coeffs: Vec<u64>,
    m: u64,
}

impl ModForm {
    pub fn new(form: &BinaryForm, m: u64) -> Self {
        ModForm { coeffs: form.residues(m), m }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// `F(s₁, s₂) mod m` for residues `s₁, s₂ < m`.
    #[inline]
    pub fn eval(&self, s1: u64, s2: u64) -> u64 {
        let m = self.m as u128;
        let (s1, s2) = (s1 as u128 % m, s2 as u128 % m);
        let mut acc = 0u128;
        let mut s2_pow = 1 % m;
        for &c in &self.coeffs {
            acc = (acc * s1 + c as u128 * s2_pow) % m;
            s2_pow = s2_pow * s2 % m;
        }
        acc as u64
    }

    /// `F(u₁, u₂) mod m` for arbitrary integers.
    #[inline]
    pub fn eval_i64(&self, u1: i64, u2: i64) -> u64 {
        self.eval(crate::ff::mod_i64(u1, self.m), crate::ff::mod_i64(u2, self.m))
    }
}

/// `eval_form`: value of `F(s₁, s₂)` in `𝔽_q`.
pub fn eval_form(form: &BinaryForm, s1: Fq, s2: Fq, ctx: &ExtCtx) -> Fq {
    form.reduce(ctx).eval(ctx, s1, s2)
}

pub fn derivative_form(form: &BinaryForm, axis: Axis) -> BinaryForm {
    form.derivative(axis)
}

/// `F(S₁ + h₁T, S₂ + h₂T)` as a trivariate function, with its `T`-derivative
/// `(h·∇F)(S + hT)` computed from the symbolic partials.
#[derive(Clone, Debug)]
pub struct ShiftedForm {
    base: ReducedForm,
    d1: ReducedForm,
    d2: ReducedForm,
    h: (Fq, Fq),
}

impl ShiftedForm {
    pub fn new(ctx: &ExtCtx, base: ReducedForm, h: (Fq, Fq)) -> Self {
        let d1 = base.derivative(ctx, Axis::S1);
        let d2 = base.derivative(ctx, Axis::S2);
        ShiftedForm { base, d1, d2, h }
    }

    pub fn base(&self) -> &ReducedForm {
        &self.base
    }

    pub fn shift(&self) -> (Fq, Fq) {
        self.h
    }

    #[inline]
    fn point(&self, ctx: &ExtCtx, s1: Fq, s2: Fq, t: Fq) -> (Fq, Fq) {
        (ctx.add(s1, ctx.mul(self.h.0, t)), ctx.add(s2, ctx.mul(self.h.1, t)))
    }

    #[inline]
    pub fn eval(&self, ctx: &ExtCtx, s1: Fq, s2: Fq, t: Fq) -> Fq {
        let (a, b) = self.point(ctx, s1, s2, t);
        self.base.eval(ctx, a, b)
    }

    /// `∂/∂S₁` and `∂/∂S₂` of the shifted form (the partials evaluated at the shifted point).
    #[inline]
    pub fn grad_s(&self, ctx: &ExtCtx, s1: Fq, s2: Fq, t: Fq) -> (Fq, Fq) {
        let (a, b) = self.point(ctx, s1, s2, t);
        (self.d1.eval(ctx, a, b), self.d2.eval(ctx, a, b))
    }

    /// `∂/∂T = h₁F_{S₁}(S + hT) + h₂F_{S₂}(S + hT)`.
    #[inline]
    pub fn dt(&self, ctx: &ExtCtx, s1: Fq, s2: Fq, t: Fq) -> Fq {
        let (g1, g2) = self.grad_s(ctx, s1, s2, t);
        ctx.add(ctx.mul(self.h.0, g1), ctx.mul(self.h.1, g2))
    }
}

pub fn shifted_eval(form: &BinaryForm, h: (Fq, Fq), s1: Fq, s2: Fq, t: Fq, ctx: &ExtCtx) -> Fq {
    ShiftedForm::new(ctx, form.reduce(ctx), h).eval(ctx, s1, s2, t)
}

/// A point of `ℙ¹(𝔽_q)` in canonical form: `[t : 1]` or `[1 : 0]`.
pub type ProjPoint = (Fq, Fq);

/// Canonical representative of `[s₁ : s₂]`, `None` for `(0, 0)`.
pub fn normalize_p1(ctx: &ExtCtx, s1: Fq, s2: Fq) -> Option<ProjPoint> {
    if !s2.is_zero() {
        let inv = ctx.inv(s2)?;
        Some((ctx.mul(s1, inv), Fq::ONE))
    } else if !s1.is_zero() {
        Some((Fq::ONE, Fq::ZERO))
    } else {
        None
    }
}

/// Zeros of `F` in `ℙ¹(𝔽_q)`, `[1:0]` first when present, then `[t:1]` by index.
pub fn projective_roots(form: &BinaryForm, ctx: &ExtCtx) -> Result<Vec<ProjPoint>> {
    let reduced = form.reduce(ctx);
    if reduced.is_zero() {
        return invalid(format!("form vanishes identically mod {}", ctx.p()));
    }
    Ok(reduced_roots(ctx, &reduced))
}

pub(crate) fn reduced_roots(ctx: &ExtCtx, reduced: &ReducedForm) -> Vec<ProjPoint> {
    let mut roots = Vec::new();
    if reduced.coeffs[0].is_zero() {
        roots.push((Fq::ONE, Fq::ZERO));
    }
    roots.extend(
        ctx.elements()
            .filter(|&t| reduced.eval(ctx, t, Fq::ONE).is_zero())
            .map(|t| (t, Fq::ONE)),
    );
    roots
}

/// `F_{S₁}(P₁)F_{S₂}(P₂) − F_{S₂}(P₁)F_{S₁}(P₂)` for two roots of `F`.
pub fn polf_det(form: &BinaryForm, p1: ProjPoint, p2: ProjPoint, ctx: &ExtCtx) -> Result<Fq> {
    let f = form.reduce(ctx);
    for (a, b) in [p1, p2] {
        if !f.eval(ctx, a, b).is_zero() {
            return invalid("polf determinant needs two roots of the form");
        }
    }
    let d1 = f.derivative(ctx, Axis::S1);
    let d2 = f.derivative(ctx, Axis::S2);
    let lhs = ctx.mul(d1.eval(ctx, p1.0, p1.1), d2.eval(ctx, p2.0, p2.1));
    let rhs = ctx.mul(d2.eval(ctx, p1.0, p1.1), d1.eval(ctx, p2.0, p2.1));
    Ok(ctx.sub(lhs, rhs))
}

/// Outcome of the separability test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Separability {
    Separable,
    RepeatedRoot,
    /// The form vanishes identically modulo `p`.
    ZeroForm,
}

impl Separability {
    pub fn is_separable(self) -> bool {
        self == Separability::Separable
    }
}

/// Exact separability of a form over `ℙ¹(𝔽̄_p)`: the root `[1:0]` has
/// multiplicity `d − deg A` where `A = F(T,1)`, which must be at most one,
/// and `A` must be squarefree.
pub fn separability_mod_p(form: &BinaryForm, p: u64) -> Result<Separability> {
    let ctx = ExtCtx::new(p, 1)?;
    Ok(separability_in(&ctx, &form.reduce(&ctx)))
}

pub(crate) fn separability_in(ctx: &ExtCtx, form: &ReducedForm) -> Separability {
    let a = form.dehomogenize();
    let Some(deg_a) = a.degree() else {
        return Separability::ZeroForm;
    };
    if form.degree() - deg_a > 1 || !a.is_squarefree(ctx) {
        Separability::RepeatedRoot
    } else {
        Separability::Separable
    }
}

pub fn is_separable_mod_p(form: &BinaryForm, p: u64) -> Result<bool> {
    Ok(separability_mod_p(form, p)?.is_separable())
}

/// The surface `Y² = Xⁿ + X·f(U₁,U₂) + g(U₁,U₂)` in `ℙ(n,2,1,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface {
    n: u32,
    f: BinaryForm,
    g: BinaryForm,
}

impl Surface {
    pub fn new(n: u32, f: BinaryForm, g: BinaryForm) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return invalid(format!("n must be odd and at least 3, got {n}"));
        }
        let n_us = n as usize;
        if f.degree() != 2 * n_us - 2 {
            return invalid(format!(
                "f must have degree 2n-2 = {} ({} coefficients), got {} coefficients",
                2 * n_us - 2,
                2 * n_us - 1,
                f.coeffs.len()
            ));
        }
        if g.degree() != 2 * n_us {
            return invalid(format!(
                "g must have degree 2n = {} ({} coefficients), got {} coefficients",
                2 * n_us,
                2 * n_us + 1,
                g.coeffs.len()
            ));
        }
        if g.is_zero() {
            return invalid("g must not vanish identically");
        }
        Ok(Surface { n, f, g })
    }

    /// `n = 3`, `f = 0`, `g = S₁⁶ + S₂⁶`.
    pub fn sample() -> Self {
        let g = BinaryForm::from_i64(&[1, 0, 0, 0, 0, 0, 1]);
        Surface::new(3, BinaryForm::zero(4), g).expect("valid sample surface")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn f(&self) -> &BinaryForm {
        &self.f
    }

    pub fn g(&self) -> &BinaryForm {
        &self.g
    }

    /// `nⁿ g^{n−1} − (n−1)^{n−1} (−f)ⁿ`, whose roots carry the singular points with `x ≠ 0`.
    pub fn smoothness_form(&self) -> BinaryForm {
        let n = self.n;
        let lhs = self.g.pow(n - 1).scale(&BigInt::from(n).pow(n));
        let neg_f = self.f.scale(&BigInt::from(-1));
        let rhs = neg_f.pow(n).scale(&BigInt::from(n - 1).pow(n - 1));
        lhs.sub(&rhs).expect("equal degrees")
    }

    /// `f_{S₁} g_{S₂} − f_{S₂} g_{S₁}`.
    pub fn gradient_minor(&self) -> BinaryForm {
        let a = self.f.derivative(Axis::S1).mul(&self.g.derivative(Axis::S2));
        let b = self.f.derivative(Axis::S2).mul(&self.g.derivative(Axis::S1));
        a.sub(&b).expect("equal degrees")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SurfaceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_surface()
    }

    pub fn to_json(&self) -> String {
        let file = SurfaceFile {
            n: self.n,
            f: self.f.coeffs.iter().map(|c| Coeff::Text(c.to_string())).collect(),
            g: self.g.coeffs.iter().map(|c| Coeff::Text(c.to_string())).collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }
}

/// On-disk layout of a surface: coefficient arrays `c_0..c_d` as decimal strings.
#[derive(Debug, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub n: u32,
    pub f: Vec<Coeff>,
    pub g: Vec<Coeff>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Text(String),
    Int(i64),
}

impl Coeff {
    fn to_big(&self) -> Result<BigInt> {
        match self {
            Coeff::Int(v) => Ok(BigInt::from(*v)),
            Coeff::Text(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("coefficient {s:?} is not a decimal integer"))),
        }
    }
}

impl SurfaceFile {
    pub fn into_surface(self) -> Result<Surface> {
        let n = self.n;
        if n < 3 || n % 2 == 0 {
            return Err(Error::Parse(format!("n must be odd and at least 3, got {n}")));
        }
        let expect_f = 2 * n as usize - 1;
        let expect_g = 2 * n as usize + 1;
        if self.f.len() != expect_f {
            return Err(Error::Parse(format!(
                "f must list {expect_f} coefficients (degree 2n-2 = {}), got {}",
                expect_f - 1,
                self.f.len()
            )));
        }
        if self.g.len() != expect_g {
            return Err(Error::Parse(format!(
                "g must list {expect_g} coefficients (degree 2n = {}), got {}",
                expect_g - 1,
                self.g.len()
            )));
        }
        let f = self.f.iter().map(Coeff::to_big).collect::<Result<Vec<_>>>()?;
        let g = self.g.iter().map(Coeff::to_big).collect::<Result<Vec<_>>>()?;
        Surface::new(n, BinaryForm::new(f)?, BinaryForm::new(g)?).map_err(|e| match e {
            Error::InvalidInput(m) => Error::Parse(m),
            other => other,
        })
    }
}

/// Exact smoothness of the reduction mod `p` over `𝔽̄_p`.
///
/// A singular point has `y = 0` and `u ≠ 0`. With `x = 0` it needs a common
/// root of `f` and `g` at which `∇g` vanishes. With `x ≠ 0` it needs a root
/// of `nⁿg^{n−1} − (n−1)^{n−1}(−f)ⁿ` and of the gradient minor that is not a
/// root of `f`; Euler's relation then pins `x = −ng/((n−1)f)`. The second
/// characterisation needs `p ∤ n − 1`, which is rejected otherwise.
pub fn is_smooth_mod_p(surface: &Surface, p: u64) -> Result<bool> {
    let n = surface.n as u64;
    if p % 2 == 0 || p % n == 0 || !is_prime(p) {
        return invalid(format!("smoothness test needs an odd prime p not dividing 2n = {}, got {p}", 2 * n));
    }
    if (n - 1) % p == 0 {
        return invalid(format!("smoothness test unsupported for p = {p} dividing n - 1 = {}", n - 1));
    }
    let ctx = ExtCtx::new(p, 1)?;
    let f = surface.f.reduce(&ctx);
    let g = surface.g.reduce(&ctx);
    if g.is_zero() {
        return Ok(false);
    }
    if f.is_zero() {
        return Ok(separability_in(&ctx, &g).is_separable());
    }
    let fa = f.dehomogenize();
    let ga = g.dehomogenize();

    // x = 0: f(u) = g(u) = 0 and ∇g(u) = 0
    let g0 = g.coeffs()[0];
    let g1 = g.coeffs()[1];
    if f.coeffs()[0].is_zero() && g0.is_zero() && g1.is_zero() {
        return Ok(false);
    }
    let common = fa.gcd(&ctx, &ga).gcd(&ctx, &ga.derivative(&ctx));
    if common.degree().is_some_and(|d| d > 0) {
        return Ok(false);
    }

    // x ≠ 0: h(u) = J(u) = 0 with f(u) ≠ 0
    let h = surface.smoothness_form().reduce(&ctx);
    let j = surface.gradient_minor().reduce(&ctx);
    if h.coeffs()[0].is_zero() && j.coeffs()[0].is_zero() && !f.coeffs()[0].is_zero() {
        return Ok(false);
    }
    let shared = h.dehomogenize().gcd(&ctx, &j.dehomogenize());
    if shared.is_zero() {
        // h and J vanish identically; f ≢ 0 has non-roots
        return Ok(false);
    }
    let off_f = shared.strip_common(&ctx, &fa);
    Ok(off_f.degree() == Some(0))
}

/// `p ∤ 2n`, smooth and `g` separable mod `p`, and `p ≡ 2 (mod n)` when required.
pub fn good_prime(surface: &Surface, p: u64, require_congruence: bool) -> bool {
    let n = surface.n as u64;
    if p < 3 || !is_prime(p) || p % n == 0 || p >= crate::ff::MAX_PRIME {
        return false;
    }
    if require_congruence && p % n != 2 % n {
        return false;
    }
    let smooth = is_smooth_mod_p(surface, p).unwrap_or(false);
    smooth && is_separable_mod_p(&surface.g, p).unwrap_or(false)
}
