//! Dense univariate polynomials over `𝔽_q`, coefficients stored lowest degree
//! first. Only what the separability and divisibility checks need.

use crate::ff::{ExtCtx, Fq};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<Fq>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Fq) -> Self {
        Poly(vec![c]).trimmed()
    }

    /// The monomial `c·T^k`.
    pub fn monomial(c: Fq, k: usize) -> Self {
        let mut v = vec![Fq::ZERO; k + 1];
        v[k] = c;
        Poly(v).trimmed()
    }

    pub fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn leading(&self) -> Fq {
        self.degree().map_or(Fq::ZERO, |d| self.0[d])
    }

    pub fn coeff(&self, k: usize) -> Fq {
        self.0.get(k).copied().unwrap_or(Fq::ZERO)
    }

    pub fn eval(&self, ctx: &ExtCtx, t: Fq) -> Fq {
        self.0.iter().rev().fold(Fq::ZERO, |acc, &c| ctx.add(ctx.mul(acc, t), c))
    }

    pub fn derivative(&self, ctx: &ExtCtx) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        let v = self.0[1..]
            .iter()
            .enumerate()
            .map(|(i, &c)| ctx.mul(c, ctx.from_u64(i as u64 + 1)))
            .collect();
        Poly(v).trimmed()
    }

    pub fn add(&self, ctx: &ExtCtx, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| ctx.add(self.coeff(i), other.coeff(i))).collect()).trimmed()
    }

    pub fn sub(&self, ctx: &ExtCtx, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| ctx.sub(self.coeff(i), other.coeff(i))).collect()).trimmed()
    }

    pub fn scale(&self, ctx: &ExtCtx, k: Fq) -> Poly {
        Poly(self.0.iter().map(|&c| ctx.mul(c, k)).collect()).trimmed()
    }

    pub fn mul(&self, ctx: &ExtCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Fq::ZERO; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                v[i + j] = ctx.add(v[i + j], ctx.mul(a, b));
            }
        }
        Poly(v).trimmed()
    }

    pub fn pow(&self, ctx: &ExtCtx, e: u32) -> Poly {
        let mut acc = Poly::constant(Fq::ONE);
        for _ in 0..e {
            acc = acc.mul(ctx, self);
        }
        acc
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, ctx: &ExtCtx, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = ctx.inv(divisor.0[dd]).expect("nonzero leading coefficient");
        let mut rem = self.clone().trimmed();
        let mut quot = vec![Fq::ZERO; rem.0.len().saturating_sub(dd).max(1)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = ctx.mul(rem.0[rd], lead_inv);
            let shift = rd - dd;
            quot[shift] = c;
            for (i, &b) in divisor.0.iter().enumerate().take(dd + 1) {
                rem.0[shift + i] = ctx.sub(rem.0[shift + i], ctx.mul(c, b));
            }
            rem = rem.trimmed();
        }
        (Poly(quot).trimmed(), rem)
    }

    pub fn rem(&self, ctx: &ExtCtx, divisor: &Poly) -> Poly {
        self.div_rem(ctx, divisor).1
    }

    pub fn monic(&self, ctx: &ExtCtx) -> Poly {
        match self.degree() {
            None => Poly::zero(),
            Some(d) => self.scale(ctx, ctx.inv(self.0[d]).expect("nonzero")),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, ctx: &ExtCtx, other: &Poly) -> Poly {
        let mut a = self.clone().trimmed();
        let mut b = other.clone().trimmed();
        while !b.is_zero() {
            let r = a.rem(ctx, &b);
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    /// Squarefree over the algebraic closure: `gcd(A, A') = 1`. Constants
    /// count as squarefree; the zero polynomial does not.
    pub fn is_squarefree(&self, ctx: &ExtCtx) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(ctx, &self.derivative(ctx)).degree() == Some(0)
    }

    /// Remove from `self` every irreducible factor it shares with `other`.
    pub fn strip_common(&self, ctx: &ExtCtx, other: &Poly) -> Poly {
        let mut a = self.clone().trimmed();
        if other.is_zero() {
            return Poly::constant(Fq::ONE);
        }
        loop {
            let g = a.gcd(ctx, other);
            if g.degree().unwrap_or(0) == 0 {
                return a;
            }
            a = a.div_rem(ctx, &g).0;
        }
    }

    /// Roots lying in `𝔽_q`, by exhaustive evaluation.
    pub fn roots(&self, ctx: &ExtCtx) -> Vec<Fq> {
        ctx.elements().filter(|&t| self.eval(ctx, t).is_zero()).collect()
    }
}
