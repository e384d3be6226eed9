//! Truncated Puiseux series in π with exact rational exponents over F_{q^M}.
//!
//! A series is a finite sparse sum of terms c·π^r together with a truncation
//! bound T: every term with exponent ≥ T is unknown. T = `Precision::Exact`
//! means the stored sum is the whole element. σ is the absolute q-Frobenius,
//! so σ(c·π^r) = c^q·π^(q·r).

mod solve;

pub use solve::{
    solve_sigma_affine, solve_sigma_monomial, SigmaAffineEquation, SigmaSolution, SolveOptions,
};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FieldElem};

/// Exact rational numbers used for exponents and slopes.
pub type Q = BigRational;

pub fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `q^k` as a rational; negative `k` gives `1/q^|k|`.
pub fn q_pow(q: u64, k: i64) -> Q {
    let base = BigInt::from(q).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Q::from_integer(base)
    } else {
        Q::new(BigInt::one(), base)
    }
}

/// Truncation bound of a value: terms at or beyond a finite bound are unknown.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Finite(Q),
    Exact,
}

impl Precision {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Precision::Finite(t) => Some(t),
            Precision::Exact => None,
        }
    }

    pub fn shift(&self, by: &Q) -> Precision {
        match self {
            Precision::Finite(t) => Precision::Finite(t + by),
            Precision::Exact => Precision::Exact,
        }
    }

    pub fn scale(&self, by: &Q) -> Precision {
        match self {
            Precision::Finite(t) => Precision::Finite(t * by),
            Precision::Exact => Precision::Exact,
        }
    }

    /// Whether an exponent lies strictly below the bound, i.e. is known.
    pub fn covers(&self, exp: &Q) -> bool {
        match self {
            Precision::Finite(t) => exp < t,
            Precision::Exact => true,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Finite(t) => write!(f, "{t}"),
            Precision::Exact => write!(f, "exact"),
        }
    }
}

/// π-adic valuation of a truncated series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Certified(Q),
    /// No known nonzero term; the value is zero up to the given bound.
    AbovePrecision(Precision),
}

impl Valuation {
    pub fn certified(&self) -> Option<&Q> {
        match self {
            Valuation::Certified(v) => Some(v),
            Valuation::AbovePrecision(_) => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    ctx: Arc<FieldCtx>,
    terms: BTreeMap<Q, FieldElem>,
    prec: Precision,
}

impl PuiseuxSeries {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        PuiseuxSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            prec: Precision::Exact,
        }
    }

    /// Zero known only up to π^t.
    pub fn zero_to(ctx: &Arc<FieldCtx>, t: Q) -> Self {
        PuiseuxSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            prec: Precision::Finite(t),
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::constant(FieldElem::one(ctx))
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::monomial(c, Q::zero())
    }

    pub fn monomial(c: FieldElem, exp: Q) -> Self {
        let ctx = c.ctx().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        PuiseuxSeries {
            ctx,
            terms,
            prec: Precision::Exact,
        }
    }

    /// π^exp.
    pub fn pi_pow(ctx: &Arc<FieldCtx>, exp: Q) -> Self {
        Self::monomial(FieldElem::one(ctx), exp)
    }

    pub fn pi(ctx: &Arc<FieldCtx>) -> Self {
        Self::pi_pow(ctx, Q::one())
    }

    pub fn from_terms(
        ctx: &Arc<FieldCtx>,
        terms: impl IntoIterator<Item = (Q, FieldElem)>,
        prec: Precision,
    ) -> Self {
        let mut out = PuiseuxSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            prec,
        };
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn precision(&self) -> &Precision {
        &self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &FieldElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &Q) -> Option<&FieldElem> {
        self.terms.get(exp)
    }

    pub fn leading(&self) -> Option<(&Q, &FieldElem)> {
        self.terms.iter().next()
    }

    pub fn val(&self) -> Valuation {
        match self.leading() {
            Some((e, _)) => Valuation::Certified(e.clone()),
            None => Valuation::AbovePrecision(self.prec.clone()),
        }
    }

    /// The leading exponent, or the truncation bound when nothing is known.
    pub fn val_lower_bound(&self) -> Precision {
        match self.leading() {
            Some((e, _)) => Precision::Finite(e.clone()),
            None => self.prec.clone(),
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec == Precision::Exact
    }

    /// No known nonzero term (exactly zero, or zero at this precision).
    pub fn is_indistinguishable_from_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// The stored finite sum, regarded as an exact element.
    pub fn as_exact(&self) -> Self {
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.clone(),
            prec: Precision::Exact,
        }
    }

    /// Lowers the truncation bound to `t`, dropping terms at or beyond it.
    pub fn truncate(&self, t: &Precision) -> Self {
        let prec = t.clone().min(self.prec.clone());
        let terms = match &prec {
            Precision::Finite(bound) => self
                .terms
                .range(..bound.clone())
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            Precision::Exact => self.terms.clone(),
        };
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms,
            prec,
        }
    }

    fn add_term(&mut self, exp: Q, c: FieldElem) {
        if !self.prec.covers(&exp) || c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.clone().min(other.prec.clone());
        let mut out = self.truncate(&prec);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            prec: self.prec.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
            prec: self.prec.clone(),
        }
    }

    /// Multiplication by π^exp.
    pub fn shift(&self, exp: &Q) -> Self {
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, x)| (e + exp, x.clone())).collect(),
            prec: self.prec.shift(exp),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.ctx);
        }
        let a = other.val_lower_bound();
        let b = self.val_lower_bound();
        let p1 = match a.finite() {
            Some(v) => self.prec.shift(v),
            None => Precision::Exact,
        };
        let p2 = match b.finite() {
            Some(v) => other.prec.shift(v),
            None => Precision::Exact,
        };
        let prec = p1.min(p2);
        let mut out = PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
            prec,
        };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if !out.prec.covers(&e) {
                    // terms of `other` are sorted, later ones are larger
                    break;
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Multiplicative inverse. The relative precision is inherited from the
    /// input; an exact multi-term input must be truncated first.
    pub fn inv(&self) -> Result<Self> {
        let Some((v, lead)) = self.leading() else {
            return Err(Error::NotInvertible(format!(
                "series indistinguishable from 0 (known up to {})",
                self.prec
            )));
        };
        let v = v.clone();
        let lead_inv = lead.inv().expect("stored coefficients are nonzero");
        if self.terms.len() == 1 && self.prec == Precision::Exact {
            return Ok(Self::monomial(lead_inv, -v));
        }
        let rel = match &self.prec {
            Precision::Finite(t) => Precision::Finite(t - &v),
            Precision::Exact => {
                return Err(Error::precision(
                    "inverse of an exact multi-term series",
                    "an explicit truncation bound",
                ))
            }
        };
        // self = lead·π^v·(1 + y), val(y) > 0
        let unit = self.shift(&-v.clone()).scale(&lead_inv);
        let y = unit.sub(&Self::one(&self.ctx)).truncate(&rel);
        let mut acc = Self::one(&self.ctx).truncate(&rel);
        let mut power = Self::one(&self.ctx).truncate(&rel);
        loop {
            power = power.mul(&y).neg().truncate(&rel);
            if power.is_indistinguishable_from_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.scale(&lead_inv).shift(&-v))
    }

    /// σ^k: coefficients to the q^k-th power, exponents and bound scaled by q^k.
    pub fn sigma(&self, k: i64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let factor = q_pow(self.ctx.q(), k);
        PuiseuxSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e * &factor, c.frobenius(k)))
                .collect(),
            prec: self.prec.scale(&factor),
        }
    }

    /// The value at π = 0 of a π-integral series.
    pub fn specialize_zero(&self) -> Result<FieldElem> {
        if let Some((e, _)) = self.leading() {
            if e.is_negative() {
                return Err(Error::invalid(format!(
                    "series has a term of negative π-valuation {e}; not π-integral"
                )));
            }
        }
        if !self.prec.covers(&Q::zero()) {
            return Err(Error::precision(
                "specialization at π = 0",
                "a truncation bound above 0",
            ));
        }
        Ok(self
            .terms
            .get(&Q::zero())
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(&self.ctx)))
    }

    /// Certified to have every term (known or unknown) at positive valuation.
    pub fn is_certified_positive(&self) -> bool {
        match self.val_lower_bound() {
            Precision::Finite(v) => v.is_positive(),
            Precision::Exact => true,
        }
    }

    pub fn to_json(&self) -> Result<PuiseuxJson> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.numer().to_string(), e.denom().to_string(), c.to_hex()))
            .collect();
        let precision = match &self.prec {
            Precision::Finite(t) => Some((t.numer().to_string(), t.denom().to_string())),
            Precision::Exact => None,
        };
        Ok(PuiseuxJson { terms, precision })
    }

    pub fn from_json(ctx: &Arc<FieldCtx>, json: &PuiseuxJson) -> Result<Self> {
        let prec = match &json.precision {
            Some((n, d)) => Precision::Finite(parse_ratio(n, d)?),
            None => Precision::Exact,
        };
        let mut terms = Vec::new();
        for (n, d, hex) in &json.terms {
            terms.push((parse_ratio(n, d)?, FieldElem::from_hex(ctx, hex)?));
        }
        Ok(Self::from_terms(ctx, terms, prec))
    }
}

fn parse_ratio(n: &str, d: &str) -> Result<Q> {
    let bad = || Error::invalid(format!("bad exponent {n}/{d}"));
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if !d.is_positive() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Wire form: terms as (numerator, denominator, coefficient hex) with the
/// integers in decimal strings, and the truncation bound as (numerator,
/// denominator), `null` when exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuiseuxJson {
    pub terms: Vec<(String, String, String)>,
    pub precision: Option<(String, String)>,
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let coef = if c.is_one() && !e.is_zero() {
                    String::new()
                } else if c.coeffs().iter().filter(|&&x| x != 0).count() > 1 {
                    format!("({c})")
                } else {
                    c.to_string()
                };
                match (e.is_zero(), coef.is_empty()) {
                    (true, _) => coef,
                    (false, true) => format!("π^({e})"),
                    (false, false) => format!("{coef}·π^({e})"),
                }
            })
            .collect();
        if let Precision::Finite(t) = &self.prec {
            parts.push(format!("O(π^({t}))"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> Arc<FieldCtx> {
        FieldCtx::new(2, 1, 2).unwrap()
    }

    fn random_series(ctx: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> PuiseuxSeries {
        let n = rng.gen_range(1..4);
        let terms: BTreeMap<_, _> = (0..n)
            .map(|_| {
                let e = rat(rng.gen_range(-3..6), rng.gen_range(1..5));
                let mut c = FieldElem::random(ctx, rng);
                if c.is_zero() {
                    c = FieldElem::one(ctx);
                }
                (e, c)
            })
            .collect();
        PuiseuxSeries::from_terms(ctx, terms, Precision::Finite(int(8)))
    }

    #[test]
    fn valuation_basics() {
        let c = ctx();
        assert_eq!(PuiseuxSeries::pi(&c).val(), Valuation::Certified(int(1)));
        let x = PuiseuxSeries::pi_pow(&c, rat(1, 3)).truncate(&Precision::Finite(int(2)));
        let z = x.add(&x.neg());
        assert_eq!(z.val(), Valuation::AbovePrecision(Precision::Finite(int(2))));
    }

    #[test]
    fn half_powers_multiply_to_pi() {
        let c = ctx();
        let h = PuiseuxSeries::pi_pow(&c, rat(1, 2));
        assert_eq!(h.mul(&h), PuiseuxSeries::pi(&c));
    }

    #[test]
    fn geometric_series_inverse() {
        let c = ctx();
        let t = Precision::Finite(int(5));
        let x = PuiseuxSeries::one(&c).sub(&PuiseuxSeries::pi(&c)).truncate(&t);
        let inv = x.inv().unwrap();
        let expected = PuiseuxSeries::from_terms(
            &c,
            (0..5).map(|k| (int(k), FieldElem::one(&c))),
            Precision::Finite(int(5)),
        );
        assert_eq!(inv, expected);
        let prod = x.mul(&inv);
        assert_eq!(prod, PuiseuxSeries::one(&c).truncate(&t));
    }

    #[test]
    fn sigma_scales_exponents_and_raises_coefficients() {
        let c = ctx();
        assert_eq!(PuiseuxSeries::pi(&c).sigma(1), PuiseuxSeries::pi_pow(&c, int(2)));
        let g = FieldElem::generator(&c);
        assert_eq!(
            PuiseuxSeries::constant(g.clone()).sigma(1),
            PuiseuxSeries::constant(g.frobenius(1))
        );
        let x = PuiseuxSeries::monomial(g, rat(1, 6)).sigma(-1);
        assert_eq!(x.val(), Valuation::Certified(rat(1, 12)));
    }

    #[test]
    fn specialization_rules() {
        let c = ctx();
        let x = PuiseuxSeries::one(&c).add(&PuiseuxSeries::pi_pow(&c, rat(1, 7)));
        assert!(x.specialize_zero().unwrap().is_one());
        assert!(PuiseuxSeries::pi_pow(&c, int(-1)).specialize_zero().is_err());
        assert!(PuiseuxSeries::zero_to(&c, int(0)).specialize_zero().is_err());
    }

    #[test]
    fn random_algebraic_laws() {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x = random_series(&c, &mut rng);
            let y = random_series(&c, &mut rng);
            // val(xy) = val(x) + val(y)
            let vx = x.val().certified().cloned().unwrap();
            let vy = y.val().certified().cloned().unwrap();
            assert_eq!(x.mul(&y).val(), Valuation::Certified(&vx + &vy));
            // σ is additive and multiplicative
            assert_eq!(x.mul(&y).sigma(1), x.sigma(1).mul(&y.sigma(1)));
            assert_eq!(x.add(&y).sigma(1), x.sigma(1).add(&y.sigma(1)));
            assert_eq!(x.sigma(1).sigma(-1), x);
            assert_eq!(x.sigma(1).val(), Valuation::Certified(&vx * int(2)));
            // ultrametric inequality, equality when valuations differ
            let s = x.add(&y);
            if vx != vy {
                assert_eq!(s.val(), Valuation::Certified(vx.clone().min(vy.clone())));
            } else if let Some(v) = s.val().certified() {
                assert!(*v >= vx);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = ctx();
        let x = PuiseuxSeries::from_terms(
            &c,
            [(rat(-1, 3), FieldElem::generator(&c)), (rat(5, 2), FieldElem::one(&c))],
            Precision::Finite(rat(7, 2)),
        );
        let j = x.to_json().unwrap();
        assert_eq!(PuiseuxSeries::from_json(&c, &j).unwrap(), x);
    }
}
