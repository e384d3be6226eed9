//! ε-adic Laurent series with a truncation order, over a generic coefficient
//! ring (constants of F_{q^M} or Puiseux series in π).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FieldElem};
use crate::puiseux::{PuiseuxJson, PuiseuxSeries};

/// Coefficient ring of a loop matrix.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero(ctx: &Arc<FieldCtx>) -> Self;
    fn from_field(c: FieldElem) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn sigma(&self, k: i64) -> Self;
    /// Known to be zero with no unknown part.
    fn is_exact_zero(&self) -> bool;
    /// Has a known nonzero part.
    fn is_certified_nonzero(&self) -> bool;
    fn inv(&self) -> Result<Self>;
    fn to_json(&self) -> Result<Value>;
    fn from_json(ctx: &Arc<FieldCtx>, v: &Value) -> Result<Self>;
    /// Tag naming the coefficient ring in serialized matrices.
    fn base_kind() -> &'static str;

    fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_field(FieldElem::one(ctx))
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl Coeff for FieldElem {
    fn zero(ctx: &Arc<FieldCtx>) -> Self {
        FieldElem::zero(ctx)
    }
    fn from_field(c: FieldElem) -> Self {
        c
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sigma(&self, k: i64) -> Self {
        self.frobenius(k)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn is_certified_nonzero(&self) -> bool {
        !self.is_zero()
    }
    fn inv(&self) -> Result<Self> {
        FieldElem::inv(self).ok_or_else(|| Error::NotInvertible("zero constant".into()))
    }
    fn to_json(&self) -> Result<Value> {
        Ok(Value::String(self.to_hex()))
    }
    fn from_json(ctx: &Arc<FieldCtx>, v: &Value) -> Result<Self> {
        let s = v
            .as_str()
            .ok_or_else(|| Error::invalid("field coefficient must be a hex string"))?;
        FieldElem::from_hex(ctx, s)
    }
    fn base_kind() -> &'static str {
        "field"
    }
}

impl Coeff for PuiseuxSeries {
    fn zero(ctx: &Arc<FieldCtx>) -> Self {
        PuiseuxSeries::zero(ctx)
    }
    fn from_field(c: FieldElem) -> Self {
        PuiseuxSeries::constant(c)
    }
    fn add(&self, other: &Self) -> Self {
        PuiseuxSeries::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        PuiseuxSeries::mul(self, other)
    }
    fn neg(&self) -> Self {
        PuiseuxSeries::neg(self)
    }
    fn sigma(&self, k: i64) -> Self {
        PuiseuxSeries::sigma(self, k)
    }
    fn is_exact_zero(&self) -> bool {
        PuiseuxSeries::is_exact_zero(self)
    }
    fn is_certified_nonzero(&self) -> bool {
        !self.is_indistinguishable_from_zero()
    }
    fn inv(&self) -> Result<Self> {
        PuiseuxSeries::inv(self)
    }
    fn to_json(&self) -> Result<Value> {
        serde_json::to_value(PuiseuxSeries::to_json(self)?)
            .map_err(|e| Error::invalid(e.to_string()))
    }
    fn from_json(ctx: &Arc<FieldCtx>, v: &Value) -> Result<Self> {
        let j: PuiseuxJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::invalid(e.to_string()))?;
        PuiseuxSeries::from_json(ctx, &j)
    }
    fn base_kind() -> &'static str {
        "puiseux"
    }
}

/// Σ c_i ε^i over stored exponents, all below `order` (None: exact).
#[derive(Clone, PartialEq)]
pub struct LaurentSeries<C: Coeff> {
    ctx: Arc<FieldCtx>,
    terms: BTreeMap<i64, C>,
    order: Option<i64>,
}

fn min_order(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn covers(order: Option<i64>, e: i64) -> bool {
    order.map_or(true, |n| e < n)
}

impl<C: Coeff> LaurentSeries<C> {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        LaurentSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            order: None,
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::monomial(ctx, C::one(ctx), 0)
    }

    /// c·ε^e.
    pub fn monomial(ctx: &Arc<FieldCtx>, c: C, e: i64) -> Self {
        let mut out = Self::zero(ctx);
        out.add_term(e, c);
        out
    }

    pub fn from_terms(
        ctx: &Arc<FieldCtx>,
        terms: impl IntoIterator<Item = (i64, C)>,
        order: Option<i64>,
    ) -> Self {
        let mut out = LaurentSeries {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
            order,
        };
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn order(&self) -> Option<i64> {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of ε^e; zero when not stored.
    pub fn coeff(&self, e: i64) -> C {
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| C::zero(&self.ctx))
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.order.is_none()
    }

    /// Lower bound for the ε-valuation: the first stored exponent, else the order.
    pub fn val_lower_bound(&self) -> Option<i64> {
        self.terms.keys().next().copied().or(self.order)
    }

    /// The ε-valuation when the first stored coefficient is certified nonzero.
    pub fn eps_val(&self) -> Option<i64> {
        let (e, c) = self.terms.iter().next()?;
        c.is_certified_nonzero().then_some(*e)
    }

    fn add_term(&mut self, e: i64, c: C) {
        if !covers(self.order, e) || c.is_exact_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(slot) => {
                let sum = slot.add(&c);
                if sum.is_exact_zero() {
                    self.terms.remove(&e);
                } else {
                    *slot = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn truncate(&self, order: Option<i64>) -> Self {
        let order = min_order(order, self.order);
        LaurentSeries {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| covers(order, **e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            order,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.order);
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.ctx);
        }
        let o1 = match (self.order, other.val_lower_bound()) {
            (Some(n), Some(v)) => Some(n + v),
            _ => None,
        };
        let o2 = match (other.order, self.val_lower_bound()) {
            (Some(n), Some(v)) => Some(n + v),
            _ => None,
        };
        let mut out = LaurentSeries {
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
            order: min_order(o1, o2),
        };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                if !covers(out.order, e1 + e2) {
                    break;
                }
                out.add_term(e1 + e2, c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = LaurentSeries {
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
            order: self.order,
        };
        for (e, x) in &self.terms {
            out.add_term(*e, x.mul(c));
        }
        out
    }

    /// Multiplication by ε^k.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            order: self.order.map(|n| n + k),
        }
    }

    pub fn sigma(&self, k: i64) -> Self {
        self.map(|c| c.sigma(k))
    }

    /// Applies `f` coefficientwise, dropping exact zeros.
    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = LaurentSeries {
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
            order: self.order,
        };
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    /// Like [`Self::map`] but into another coefficient ring.
    pub fn try_map<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<LaurentSeries<D>> {
        let mut out = LaurentSeries::<D> {
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
            order: self.order,
        };
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Ok(out)
    }

    /// Inverse in the Laurent series ring. The leading coefficient must be
    /// certified invertible. Relative precision is kept; an exact series
    /// with more than one term needs [`Self::inv_to`].
    pub fn inv(&self) -> Result<Self> {
        match self.order {
            Some(_) => self.inv_inner(),
            None if self.terms.len() == 1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                Ok(Self::monomial(&self.ctx, c.inv()?, -e))
            }
            None => Err(Error::precision(
                "inverse of an exact multi-term ε-series",
                "an explicit ε-order",
            )),
        }
    }

    /// Inverse of the series truncated at ε-order `order` (if exact).
    pub fn inv_to(&self, order: i64) -> Result<Self> {
        if self.order.is_none() && self.terms.len() == 1 {
            return self.inv();
        }
        self.truncate(Some(order)).inv_inner()
    }

    fn inv_inner(&self) -> Result<Self> {
        let n = self.order.expect("finite order");
        let Some((&v, lead)) = self.terms.iter().next() else {
            return Err(Error::NotInvertible(format!(
                "ε-series indistinguishable from 0 below ε^{n}"
            )));
        };
        if !lead.is_certified_nonzero() {
            return Err(Error::NotInvertible(format!(
                "leading ε-coefficient {lead} is not certified nonzero"
            )));
        }
        let inv_lead = lead.inv()?;
        let rel = n - v;
        let mut b: Vec<C> = Vec::with_capacity(rel.max(0) as usize);
        for k in 0..rel {
            if k == 0 {
                b.push(inv_lead.clone());
                continue;
            }
            let mut acc = C::zero(&self.ctx);
            for j in 1..=k {
                if let Some(u) = self.terms.get(&(v + j)) {
                    acc = acc.add(&u.mul(&b[(k - j) as usize]));
                }
            }
            b.push(acc.mul(&inv_lead).neg());
        }
        Ok(Self::from_terms(
            &self.ctx,
            b.into_iter().enumerate().map(|(k, c)| (k as i64 - v, c)),
            Some(n - 2 * v),
        ))
    }
}

impl<C: Coeff> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<C: Coeff> fmt::Display for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format!("{c}"),
                1 => format!("[{c}]ε"),
                _ => format!("[{c}]ε^{e}"),
            })
            .collect();
        if let Some(n) = self.order {
            parts.push(format!("O(ε^{n})"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
