//! Exact arithmetic in prime fields and their quadratic extensions,
//! together with the multiplicative and additive characters that every
//! counting kernel is built from.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{invalid, Result};

/// Largest prime accepted by [`PrimeCtx`]; keeps products of residues in `u64`
/// and the Legendre table small enough to hold in memory.
pub const MAX_PRIME: u64 = 1 << 20;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in the closed interval `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        if i as u64 >= lo {
            out.push(i as u64);
        }
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return false;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn mod_i64(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

pub fn mod_big(a: &BigInt, m: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

/// Inverse of `a` modulo `m`, if it exists. Modulo 1 the inverse is 0.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Jacobi symbol by binary quadratic reciprocity. `r` must be odd and
/// positive; no squarefree check is made.
pub(crate) fn jacobi_raw(a: u64, r: u64) -> i8 {
    debug_assert!(r % 2 == 1);
    let mut a = a % r;
    let mut m = r;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && m % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        t
    } else {
        0
    }
}

/// Quadratic character `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    if p % 2 == 0 || !is_prime(p) {
        return invalid(format!("legendre symbol needs an odd prime modulus, got {p}"));
    }
    Ok(jacobi_raw(mod_i64(a, p), p))
}

fn check_jacobi_modulus(r: u64) -> Result<()> {
    if r == 0 || r % 2 == 0 {
        return invalid(format!("jacobi symbol needs an odd positive modulus, got {r}"));
    }
    if !is_squarefree(r) {
        return invalid(format!("modulus {r} is not squarefree"));
    }
    Ok(())
}

/// Jacobi symbol `(a/r)` for odd positive squarefree `r`.
pub fn jacobi(a: i64, r: u64) -> Result<i8> {
    check_jacobi_modulus(r)?;
    Ok(jacobi_raw(mod_i64(a, r), r))
}

pub fn jacobi_big(a: &BigInt, r: u64) -> Result<i8> {
    check_jacobi_modulus(r)?;
    Ok(jacobi_raw(mod_big(a, r), r))
}

/// Table of `(a/r)` for `a` in `[0, r)`.
pub fn jacobi_table(r: u64) -> Result<Vec<i8>> {
    check_jacobi_modulus(r)?;
    Ok((0..r).map(|a| jacobi_raw(a, r)).collect())
}

/// `exp(2πi t / r)`.
pub fn add_char(r: u64, t: i64) -> Result<Complex64> {
    if r == 0 {
        return invalid("additive character needs a modulus r >= 1");
    }
    Ok(unit(mod_i64(t, r), r))
}

#[inline]
fn unit(t: u64, r: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (t as f64) / (r as f64))
}

/// Precomputed `e_r(t)` for `t` in `[0, r)`.
#[derive(Clone, Debug)]
pub struct CharTable {
    r: u64,
    values: Vec<Complex64>,
}

impl CharTable {
    pub fn new(r: u64) -> Result<Self> {
        if r == 0 {
            return invalid("additive character needs a modulus r >= 1");
        }
        Ok(CharTable { r, values: (0..r).map(|t| unit(t, r)).collect() })
    }

    pub fn modulus(&self) -> u64 {
        self.r
    }

    /// `e_r(t)` for a residue `t` (reduced modulo `r` first).
    #[inline]
    pub fn at(&self, t: u64) -> Complex64 {
        self.values[(t % self.r) as usize]
    }

    #[inline]
    pub fn at_i64(&self, t: i64) -> Complex64 {
        self.values[mod_i64(t, self.r) as usize]
    }
}

/// `(r̄1 mod r0, r̄0 mod r1)` for coprime `r0`, `r1`.
pub fn crt_data(r0: u64, r1: u64) -> Result<(u64, u64)> {
    if r0 == 0 || r1 == 0 {
        return invalid("crt moduli must be positive");
    }
    if gcd(r0, r1) != 1 {
        return invalid(format!("crt moduli {r0} and {r1} are not coprime"));
    }
    let r1_bar = inv_mod(r1 % r0, r0).expect("coprime");
    let r0_bar = inv_mod(r0 % r1, r1).expect("coprime");
    Ok((r1_bar, r0_bar))
}

/// Least quadratic non-residue modulo an odd prime.
pub fn nonsquare(p: u64) -> Result<u64> {
    if p % 2 == 0 || !is_prime(p) {
        return invalid(format!("non-square needs an odd prime, got {p}"));
    }
    Ok((2..p).find(|&a| jacobi_raw(a, p) == -1).expect("odd prime has non-residues"))
}

/// Prime field data: the Legendre table, the least non-residue and the
/// additive character table.
#[derive(Clone, Debug)]
pub struct PrimeCtx {
    p: u64,
    legendre_table: Vec<i8>,
    gamma: u64,
    chars: CharTable,
}

impl PrimeCtx {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return invalid(format!("field modulus must be an odd prime, got {p}"));
        }
        if p >= MAX_PRIME {
            return invalid(format!("prime {p} exceeds the supported bound {MAX_PRIME}"));
        }
        let mut legendre_table = vec![-1i8; p as usize];
        legendre_table[0] = 0;
        for x in 1..=(p - 1) / 2 {
            legendre_table[(x * x % p) as usize] = 1;
        }
        let gamma = legendre_table.iter().position(|&c| c == -1).expect("non-residue") as u64;
        Ok(PrimeCtx { p, legendre_table, gamma, chars: CharTable::new(p)? })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn chi(&self, a: u64) -> i8 {
        self.legendre_table[(a % self.p) as usize]
    }

    pub fn legendre_table(&self) -> &[i8] {
        &self.legendre_table
    }

    /// Least quadratic non-residue `γ`.
    pub fn nonsquare(&self) -> u64 {
        self.gamma
    }

    /// `e_p(t)`.
    #[inline]
    pub fn e(&self, t: u64) -> Complex64 {
        self.chars.at(t)
    }

    pub fn chars(&self) -> &CharTable {
        &self.chars
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        mod_i64(a, self.p)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            Some(pow_mod(a, self.p - 2, self.p))
        }
    }
}

/// Element `a + bθ` of `𝔽_q`; for the prime field `b` is always zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq {
    pub a: u64,
    pub b: u64,
}

impl Fq {
    pub const ZERO: Fq = Fq { a: 0, b: 0 };
    pub const ONE: Fq = Fq { a: 1, b: 0 };

    #[inline]
    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// `𝔽_q` with `q = p^r`, `r ∈ {1, 2}`, realised as `𝔽_p[θ]/(θ² − γ)` for
/// `r = 2` where `γ` is the least non-residue.
#[derive(Clone, Debug)]
pub struct ExtCtx {
    base: PrimeCtx,
    degree: u32,
    q: u64,
}

impl ExtCtx {
    pub fn new(p: u64, degree: u32) -> Result<Self> {
        let base = PrimeCtx::new(p)?;
        Self::over(base, degree)
    }

    pub fn over(base: PrimeCtx, degree: u32) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return invalid(format!("extension degree {degree} unsupported (only 1 and 2)"));
        }
        let q = base.p.pow(degree);
        Ok(ExtCtx { base, degree, q })
    }

    #[inline]
    pub fn base(&self) -> &PrimeCtx {
        &self.base
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.base.p
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The square root of `γ` adjoined for `r = 2`.
    pub fn theta(&self) -> Option<Fq> {
        (self.degree == 2).then_some(Fq { a: 0, b: 1 })
    }

    #[inline]
    pub fn from_u64(&self, a: u64) -> Fq {
        Fq { a: a % self.base.p, b: 0 }
    }

    #[inline]
    pub fn from_i64(&self, a: i64) -> Fq {
        Fq { a: self.base.reduce(a), b: 0 }
    }

    pub fn from_big(&self, a: &BigInt) -> Fq {
        Fq { a: mod_big(a, self.base.p), b: 0 }
    }

    /// Build `a + bθ`; `b` must be zero over the prime field.
    pub fn elem(&self, a: u64, b: u64) -> Fq {
        debug_assert!(self.degree == 2 || b % self.base.p == 0);
        Fq { a: a % self.base.p, b: b % self.base.p }
    }

    #[inline]
    pub fn add(&self, x: Fq, y: Fq) -> Fq {
        Fq { a: self.base.add(x.a, y.a), b: self.base.add(x.b, y.b) }
    }

    #[inline]
    pub fn sub(&self, x: Fq, y: Fq) -> Fq {
        Fq { a: self.base.sub(x.a, y.a), b: self.base.sub(x.b, y.b) }
    }

    #[inline]
    pub fn neg(&self, x: Fq) -> Fq {
        Fq { a: self.base.neg(x.a), b: self.base.neg(x.b) }
    }

    #[inline]
    pub fn mul(&self, x: Fq, y: Fq) -> Fq {
        let p = self.base.p;
        if self.degree == 1 {
            return Fq { a: x.a * y.a % p, b: 0 };
        }
        let bb = x.b * y.b % p * self.base.gamma % p;
        Fq { a: (x.a * y.a + bb) % p, b: (x.a * y.b + x.b * y.a) % p }
    }

    #[inline]
    pub fn sqr(&self, x: Fq) -> Fq {
        self.mul(x, x)
    }

    pub fn pow(&self, x: Fq, mut e: u64) -> Fq {
        let mut acc = Fq::ONE;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.sqr(b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: Fq) -> Option<Fq> {
        if x.is_zero() {
            return None;
        }
        if self.degree == 1 {
            return self.base.inv(x.a).map(|a| Fq { a, b: 0 });
        }
        // (a + bθ)(a − bθ) = a² − γb² ∈ 𝔽_p
        let p = self.base.p;
        let norm = self.base.sub(x.a * x.a % p, x.b * x.b % p * self.base.gamma % p);
        let ni = self.base.inv(norm)?;
        Some(Fq { a: x.a * ni % p, b: self.base.neg(x.b) * ni % p })
    }

    /// Trace to `𝔽_p`: `a` for `r = 1`, `2a` for `r = 2`.
    #[inline]
    pub fn trace(&self, x: Fq) -> u64 {
        if self.degree == 1 {
            x.a
        } else {
            self.base.add(x.a, x.a)
        }
    }

    /// Additive character `ψ(x) = e_p(Tr x)`.
    #[inline]
    pub fn psi(&self, x: Fq) -> Complex64 {
        self.base.e(self.trace(x))
    }

    /// Position of `x` in [`ExtCtx::elements`] order: `a + b·p`.
    #[inline]
    pub fn index(&self, x: Fq) -> usize {
        (x.a + x.b * self.base.p) as usize
    }

    #[inline]
    pub fn element(&self, i: usize) -> Fq {
        let p = self.base.p as usize;
        Fq { a: (i % p) as u64, b: (i / p) as u64 }
    }

    /// Every element of `𝔽_q`, in index order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q as usize).map(move |i| self.element(i))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (1..self.q as usize).map(move |i| self.element(i))
    }
}

/// `cnt[a] = #{u ∈ 𝔽_q : u^k = a}`, indexed by [`ExtCtx::index`].
pub fn power_count_table(ctx: &ExtCtx, k: u64) -> Vec<u32> {
    let mut cnt = vec![0u32; ctx.q() as usize];
    for u in ctx.elements() {
        cnt[ctx.index(ctx.pow(u, k))] += 1;
    }
    cnt
}

/// `roots[a] = {u ∈ 𝔽_q : u^k = a}`, indexed by [`ExtCtx::index`].
pub fn power_roots(ctx: &ExtCtx, k: u64) -> Vec<Vec<Fq>> {
    let mut roots = vec![Vec::new(); ctx.q() as usize];
    for u in ctx.elements() {
        roots[ctx.index(ctx.pow(u, k))].push(u);
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(0, 7).unwrap(), 0);
        assert_eq!(legendre(2, 7).unwrap(), 1);
        assert_eq!(legendre(3, 7).unwrap(), -1);
        assert_eq!(legendre(-1, 7).unwrap(), -1);
        assert!(legendre(3, 9).is_err());
        assert!(legendre(3, 2).is_err());
    }

    #[test]
    fn legendre_matches_enumerated_squares() {
        for p in primes_in(3, 60) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(legendre(a as i64, p).unwrap(), expect, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 105).unwrap(), 1);
        assert_eq!(jacobi(0, 15).unwrap(), 0);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert_eq!(jacobi(0, 1).unwrap(), 1);
        assert!(jacobi(2, 16).is_err());
        assert!(jacobi(2, 45).is_err());
    }

    #[test]
    fn add_char_examples() {
        let one = add_char(5, 0).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let half = add_char(4, 2).unwrap();
        assert!((half - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        for t in -20..20 {
            let z = add_char(7, t).unwrap() * add_char(7, -t).unwrap();
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(add_char(0, 1).is_err());
    }

    #[test]
    fn add_char_orthogonality() {
        for r in 1..40u64 {
            for m in -50..50i64 {
                let s: Complex64 = (1..=r as i64).map(|c| add_char(r, c * m).unwrap()).sum();
                if m.rem_euclid(r as i64) == 0 {
                    assert!((s.re - r as f64).abs() < 1e-9 && s.im.abs() < 1e-9);
                } else {
                    assert!(s.norm() < 1e-9 * r as f64, "r={r} m={m} |s|={}", s.norm());
                }
            }
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_data(3, 5).unwrap(), (2, 2));
        assert_eq!(crt_data(1, 9).unwrap(), (0, 1));
        let (a, b) = crt_data(7, 11).unwrap();
        assert_eq!(11 * a % 7, 1);
        assert_eq!(7 * b % 11, 1);
        assert_eq!((a, b), (2, 8));
        assert!(crt_data(6, 9).is_err());
    }

    #[test]
    fn nonsquare_examples() {
        assert_eq!(nonsquare(5).unwrap(), 2);
        assert_eq!(nonsquare(7).unwrap(), 3);
        assert_eq!(nonsquare(11).unwrap(), 2);
        assert!(nonsquare(2).is_err());
    }

    #[test]
    fn prime_ctx_invariants() {
        for p in primes_in(3, 200) {
            let ctx = PrimeCtx::new(p).unwrap();
            let t = ctx.legendre_table();
            assert_eq!(t[0], 0);
            assert_eq!(t.iter().filter(|&&c| c == 1).count() as u64, (p - 1) / 2);
            assert_eq!(ctx.nonsquare(), nonsquare(p).unwrap());
        }
        assert!(PrimeCtx::new(2).is_err());
        assert!(PrimeCtx::new(15).is_err());
    }

    #[test]
    fn ext_field_examples() {
        let ctx = ExtCtx::new(5, 2).unwrap();
        let theta = ctx.theta().unwrap();
        assert_eq!(ctx.mul(theta, theta), ctx.from_u64(2));
        assert_eq!(ctx.trace(ctx.elem(3, 4)), 1);
        assert_eq!(ctx.elements().count(), 25);
        assert!(ExtCtx::new(5, 3).is_err());
    }

    #[test]
    fn ext_field_is_a_field() {
        for &(p, r) in &[(3, 2), (5, 1), (5, 2), (7, 2), (11, 1)] {
            let ctx = ExtCtx::new(p, r).unwrap();
            for x in ctx.nonzero_elements() {
                let xi = ctx.inv(x).unwrap();
                assert_eq!(ctx.mul(x, xi), Fq::ONE);
                assert_eq!(ctx.pow(x, ctx.q() - 1), Fq::ONE);
            }
            assert!(ctx.inv(Fq::ZERO).is_none());
        }
    }

    #[test]
    fn power_count_examples() {
        let ctx = ExtCtx::new(7, 1).unwrap();
        let c6 = power_count_table(&ctx, 6);
        assert_eq!(c6[0], 1);
        assert_eq!(c6[1], 6);
        assert!(c6[2..].iter().all(|&c| c == 0));
        let c2 = power_count_table(&ctx, 2);
        for a in 1..7 {
            assert_eq!(c2[a] as i32, 1 + legendre(a as i64, 7).unwrap() as i32);
        }
        let c1 = power_count_table(&ctx, 1);
        assert!(c1.iter().all(|&c| c == 1));
    }

    #[test]
    fn power_count_structure() {
        for &(p, r) in &[(5, 1), (5, 2), (7, 2), (11, 1), (13, 1)] {
            let ctx = ExtCtx::new(p, r).unwrap();
            for k in 1..=12u64 {
                let cnt = power_count_table(&ctx, k);
                assert_eq!(cnt.iter().map(|&c| c as u64).sum::<u64>(), ctx.q());
                assert_eq!(cnt[0], 1);
                let g = gcd(k, ctx.q() - 1) as u32;
                assert!(cnt[1..].iter().all(|&c| c == 0 || c == g));
            }
        }
    }

    proptest! {
        #[test]
        fn legendre_is_multiplicative(a in -1000i64..1000, b in -1000i64..1000, idx in 0usize..10) {
            let p = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31][idx];
            prop_assert_eq!(legendre(a * b, p).unwrap(), legendre(a, p).unwrap() * legendre(b, p).unwrap());
        }

        #[test]
        fn jacobi_is_product_of_legendre(a in -100000i64..100000, r in 1u64..3000) {
            let r = 2 * r + 1;
            prop_assume!(is_squarefree(r));
            let prod: i8 = prime_factors(r).into_iter().map(|p| legendre(a, p).unwrap()).product();
            prop_assert_eq!(jacobi(a, r).unwrap(), prod);
        }

        #[test]
        fn jacobi_multiplicative_in_modulus(a in -100000i64..100000, i in 0usize..8, j in 0usize..8) {
            let odd = [3u64, 5, 7, 11, 13, 15, 21, 35];
            let (r0, r1) = (odd[i], odd[j]);
            prop_assume!(gcd(r0, r1) == 1 && is_squarefree(r0 * r1));
            prop_assert_eq!(jacobi(a, r0 * r1).unwrap(), jacobi(a, r0).unwrap() * jacobi(a, r1).unwrap());
        }
    }
}
