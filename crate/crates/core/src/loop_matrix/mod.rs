//! Square matrices over ε-truncated Laurent series: products, inverses,
//! σ-twists, Cartan invariants and Newton points.

mod invariants;
mod laurent;

pub use invariants::{cartan_invariants, newton_point, Cocharacter};
pub use laurent::{Coeff, LaurentSeries};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FieldCtxDesc, FieldElem};
use crate::puiseux::PuiseuxSeries;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, PartialEq)]
pub struct LoopMatrix<C: Coeff> {
    n: usize,
    ctx: Arc<FieldCtx>,
    entries: Vec<LaurentSeries<C>>,
}

/// Loop matrix with constant coefficients in F_{q^M}.
pub type ConstMatrix = LoopMatrix<FieldElem>;
/// Loop matrix with coefficients Puiseux series in π.
pub type PuiseuxMatrix = LoopMatrix<PuiseuxSeries>;

impl<C: Coeff> LoopMatrix<C> {
    pub fn from_fn(
        ctx: &Arc<FieldCtx>,
        n: usize,
        mut f: impl FnMut(usize, usize) -> LaurentSeries<C>,
    ) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        LoopMatrix {
            n,
            ctx: ctx.clone(),
            entries,
        }
    }

    pub fn zeros(ctx: &Arc<FieldCtx>, n: usize) -> Self {
        Self::from_fn(ctx, n, |_, _| LaurentSeries::zero(ctx))
    }

    pub fn identity(ctx: &Arc<FieldCtx>, n: usize) -> Self {
        Self::from_fn(ctx, n, |i, j| {
            if i == j {
                LaurentSeries::one(ctx)
            } else {
                LaurentSeries::zero(ctx)
            }
        })
    }

    /// Matrix whose nonzero entries are integer multiples of powers of ε,
    /// given as (row, column, integer, ε-exponent).
    pub fn from_pattern(ctx: &Arc<FieldCtx>, n: usize, pattern: &[(usize, usize, i64, i64)]) -> Self {
        let mut m = Self::zeros(ctx, n);
        for &(i, j, c, e) in pattern {
            let term = LaurentSeries::monomial(ctx, C::from_field(FieldElem::from_int(ctx, c)), e);
            let sum = m.get(i, j).add(&term);
            m.set(i, j, sum);
        }
        m
    }

    /// Diagonal matrix ε^μ.
    pub fn eps_power(ctx: &Arc<FieldCtx>, mu: &[i64]) -> Self {
        let pattern: Vec<_> = mu.iter().enumerate().map(|(i, &m)| (i, i, 1, m)).collect();
        Self::from_pattern(ctx, mu.len(), &pattern)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentSeries<C> {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentSeries<C>) {
        self.entries[i * self.n + j] = v;
    }

    /// Common ε-truncation order (the minimum over entries); None if exact.
    pub fn order(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.order()).min()
    }

    pub fn truncate(&self, order: Option<i64>) -> Self {
        self.map(|e| e.truncate(order))
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries<C>) -> LaurentSeries<C>) -> Self {
        LoopMatrix {
            n: self.n,
            ctx: self.ctx.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<D: Coeff>(
        &self,
        f: impl Fn(&LaurentSeries<C>) -> Result<LaurentSeries<D>>,
    ) -> Result<LoopMatrix<D>> {
        Ok(LoopMatrix {
            n: self.n,
            ctx: self.ctx.clone(),
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::invalid(format!(
                "size mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(LoopMatrix {
            n: self.n,
            ctx: self.ctx.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.map(|e| e.neg()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let n = self.n;
        Ok(Self::from_fn(&self.ctx, n, |i, j| {
            (0..n).fold(LaurentSeries::zero(&self.ctx), |acc, k| {
                acc.add(&self.get(i, k).mul(other.get(k, j)))
            })
        }))
    }

    pub fn scale(&self, s: &LaurentSeries<C>) -> Self {
        self.map(|e| e.mul(s))
    }

    /// σ^k applied entrywise to the coefficients; ε is fixed.
    pub fn sigma_twist(&self, k: i64) -> Self {
        self.map(|e| e.sigma(k))
    }

    pub fn row(&self, i: usize) -> Vec<LaurentSeries<C>> {
        (0..self.n).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<LaurentSeries<C>> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    /// Block diagonal matrix diag(self, other).
    pub fn block_diag(&self, other: &Self) -> Self {
        let (a, n) = (self.n, self.n + other.n);
        Self::from_fn(&self.ctx, n, |i, j| match (i < a, j < a) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => other.get(i - a, j - a).clone(),
            _ => LaurentSeries::zero(&self.ctx),
        })
    }

    /// Coefficients [1, c_1, …, c_n] of det(x·1 − A), by Berkowitz's
    /// division-free recursion on trailing principal submatrices.
    pub fn charpoly(&self) -> Vec<LaurentSeries<C>> {
        let n = self.n;
        let zero = LaurentSeries::zero(&self.ctx);
        let mut p = vec![LaurentSeries::one(&self.ctx)];
        for k in (0..n).rev() {
            let m = n - k - 1;
            let mut t = Vec::with_capacity(m + 2);
            t.push(LaurentSeries::one(&self.ctx));
            t.push(self.get(k, k).neg());
            let mut v: Vec<LaurentSeries<C>> = (k + 1..n).map(|i| self.get(i, k).clone()).collect();
            for step in 0..m {
                let rv = (0..m).fold(zero.clone(), |acc, j| acc.add(&self.get(k, k + 1 + j).mul(&v[j])));
                t.push(rv.neg());
                if step + 1 < m {
                    v = (0..m)
                        .map(|i| {
                            (0..m).fold(zero.clone(), |acc, j| {
                                acc.add(&self.get(k + 1 + i, k + 1 + j).mul(&v[j]))
                            })
                        })
                        .collect();
                }
            }
            let next: Vec<_> = (0..m + 2)
                .map(|i| {
                    (0..=i.min(m)).fold(zero.clone(), |acc, j| acc.add(&t[i - j].mul(&p[j])))
                })
                .collect();
            p = next;
        }
        p
    }

    pub fn det(&self) -> LaurentSeries<C> {
        let c = self.charpoly();
        let last = c[self.n].clone();
        if self.n % 2 == 0 {
            last
        } else {
            last.neg()
        }
    }

    /// Adjugate through Cayley–Hamilton, division-free.
    pub fn adjugate(&self) -> Self {
        let c = self.charpoly();
        let id = Self::identity(&self.ctx, self.n);
        let mut q = id.clone();
        for ci in c.iter().take(self.n).skip(1) {
            q = q.mul(self).expect("same size").add(&id.scale(ci)).expect("same size");
        }
        if self.n % 2 == 0 {
            q.map(|e| e.neg())
        } else {
            q
        }
    }

    /// Inverse adj(A)/det(A). An exact determinant with several terms needs
    /// [`Self::inv_to`].
    pub fn inv(&self) -> Result<Self> {
        let d = self.det().inv()?;
        Ok(self.adjugate().scale(&d))
    }

    /// Inverse with the determinant truncated at ε-order `order` when exact.
    pub fn inv_to(&self, order: i64) -> Result<Self> {
        let d = self.det().inv_to(order)?;
        Ok(self.adjugate().scale(&d).truncate(Some(order)))
    }

    /// Determinant of the ε⁰ coefficients, by cofactor expansion.
    pub fn constant_det(&self) -> C {
        let a0: Vec<Vec<C>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).coeff(0)).collect())
            .collect();
        let all: Vec<usize> = (0..self.n).collect();
        laplace_det(&self.ctx, &a0, &all, &all)
    }

    /// Inverse of an element of GL_n(C[[ε]]) to ε-order `order`: cofactors of
    /// the ε-constant part, then one ε-level at a time. Unlike
    /// [`Self::inv_to`], imprecise entries only affect the cofactors they
    /// actually occur in.
    pub fn inv_levelwise(&self, order: i64) -> Result<Self> {
        let n = self.n;
        let order = self.order().map_or(order, |o| o.min(order));
        if self.entries.iter().any(|e| e.val_lower_bound().map_or(false, |v| v < 0)) {
            return Err(Error::invalid("level-wise inverse needs ε-integral entries"));
        }
        let levels: Vec<Vec<Vec<C>>> = (0..order.max(1))
            .map(|k| (0..n).map(|i| (0..n).map(|j| self.get(i, j).coeff(k)).collect()).collect())
            .collect();
        let a0 = &levels[0];
        let det0 = self.constant_det();
        if !det0.is_certified_nonzero() {
            return Err(Error::NotInvertible(format!(
                "ε-constant determinant {det0} is not certified nonzero"
            )));
        }
        let dinv = det0.inv()?;
        let inv0: Vec<Vec<C>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                        let m = laplace_det(&self.ctx, a0, &rows, &cols).mul(&dinv);
                        if (i + j) % 2 == 1 {
                            m.neg()
                        } else {
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        let mat_mul = |x: &[Vec<C>], y: &[Vec<C>]| -> Vec<Vec<C>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            (0..n).fold(C::zero(&self.ctx), |acc, k| {
                                if x[i][k].is_exact_zero() || y[k][j].is_exact_zero() {
                                    acc
                                } else {
                                    acc.add(&x[i][k].mul(&y[k][j]))
                                }
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let mut x: Vec<Vec<Vec<C>>> = vec![inv0.clone()];
        for k in 1..order as usize {
            let mut s = vec![vec![C::zero(&self.ctx); n]; n];
            for j in 1..=k {
                let p = mat_mul(&levels[j], &x[k - j]);
                for (srow, prow) in s.iter_mut().zip(p) {
                    for (a, b) in srow.iter_mut().zip(prow) {
                        *a = a.add(&b);
                    }
                }
            }
            let next = mat_mul(&inv0, &s)
                .into_iter()
                .map(|row| row.into_iter().map(|c| c.neg()).collect())
                .collect();
            x.push(next);
        }
        Ok(Self::from_fn(&self.ctx, n, |i, j| {
            LaurentSeries::from_terms(
                &self.ctx,
                x.iter().enumerate().map(|(k, m)| (k as i64, m[i][j].clone())),
                Some(order),
            )
        }))
    }

    /// g⁻¹·b·σ(g) for g = self.
    pub fn sigma_conjugate(&self, b: &Self) -> Result<Self> {
        self.inv()?.mul(b)?.mul(&self.sigma_twist(1))
    }

    /// Certified membership in K: ε-integral entries and a determinant whose
    /// ε^0 coefficient is certified nonzero.
    pub fn is_in_k(&self) -> bool {
        let integral = self
            .entries
            .iter()
            .all(|e| e.is_exact_zero() || e.val_lower_bound().map_or(false, |v| v >= 0));
        integral && self.det().eps_val() == Some(0)
    }

    /// Whether every known entry vanishes and every unknown tail lies at or
    /// above ε-order `order` (residual check).
    pub fn vanishes_below(&self, order: i64) -> bool {
        self.entries.iter().all(|e| {
            e.terms().all(|(k, _)| k >= order) && e.order().map_or(true, |n| n >= order)
        })
    }

    pub fn to_json(&self) -> Result<LoopMatrixJson> {
        let order = self.order();
        let entries = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        self.get(i, j)
                            .truncate(order)
                            .terms()
                            .map(|(e, c)| Ok((e, c.to_json()?)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LoopMatrixJson {
            schema_version: SCHEMA_VERSION,
            size: self.n,
            base: C::base_kind().to_string(),
            field: self.ctx.desc(),
            order,
            entries,
        })
    }

    pub fn from_json(json: &LoopMatrixJson) -> Result<Self> {
        if json.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema_version {}",
                json.schema_version
            )));
        }
        if json.base != C::base_kind() {
            return Err(Error::invalid(format!(
                "expected base `{}`, found `{}`",
                C::base_kind(),
                json.base
            )));
        }
        let n = json.size;
        if json.entries.len() != n || json.entries.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(format!("entries must form a {n}×{n} array")));
        }
        let ctx = FieldCtx::from_desc(&json.field)?;
        let mut m = Self::zeros(&ctx, n);
        for (i, row) in json.entries.iter().enumerate() {
            for (j, terms) in row.iter().enumerate() {
                let terms = terms
                    .iter()
                    .map(|(e, v)| Ok((*e, C::from_json(&ctx, v)?)))
                    .collect::<Result<Vec<_>>>()?;
                m.set(i, j, LaurentSeries::from_terms(&ctx, terms, json.order));
            }
        }
        Ok(m)
    }
}

/// Determinant of the submatrix on `rows` × `cols`, summing over column
/// subsets (no divisions).
fn laplace_det<C: Coeff>(ctx: &Arc<FieldCtx>, a: &[Vec<C>], rows: &[usize], cols: &[usize]) -> C {
    let mut dp: std::collections::BTreeMap<u64, C> = std::collections::BTreeMap::new();
    dp.insert(0, C::one(ctx));
    for &r in rows {
        let mut next: std::collections::BTreeMap<u64, C> = std::collections::BTreeMap::new();
        for (mask, val) in &dp {
            for (ci, &c) in cols.iter().enumerate() {
                if mask & (1 << ci) != 0 || a[r][c].is_exact_zero() {
                    continue;
                }
                let above = (mask >> (ci + 1)).count_ones();
                let mut term = val.mul(&a[r][c]);
                if above % 2 == 1 {
                    term = term.neg();
                }
                let slot = next.entry(mask | (1 << ci)).or_insert_with(|| C::zero(ctx));
                *slot = slot.add(&term);
            }
        }
        dp = next;
    }
    let full = if cols.is_empty() { 0 } else { (1u64 << cols.len()) - 1 };
    dp.remove(&full).unwrap_or_else(|| C::zero(ctx))
}

impl ConstMatrix {
    /// The same matrix with constant Puiseux coefficients.
    pub fn to_puiseux(&self) -> PuiseuxMatrix {
        self.try_map(|e| e.try_map(|c| Ok(PuiseuxSeries::constant(c.clone()))))
            .expect("infallible")
    }
}

impl PuiseuxMatrix {
    /// Sets π = 0 in every coefficient; fails unless all are π-integral.
    pub fn specialize_pi_zero(&self) -> Result<ConstMatrix> {
        self.try_map(|e| e.try_map(|c| c.specialize_zero()))
    }

    /// Entrywise minimum over known π-valuations, None if no term is known.
    pub fn min_pi_valuation(&self) -> Option<crate::puiseux::Q> {
        self.entries
            .iter()
            .flat_map(|e| e.terms().filter_map(|(_, c)| c.val().certified().cloned()).collect::<Vec<_>>())
            .min()
    }
}

/// Serialized loop matrix: entries as lists of (ε-exponent, coefficient).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopMatrixJson {
    pub schema_version: u32,
    pub size: usize,
    /// "field" or "puiseux".
    pub base: String,
    pub field: FieldCtxDesc,
    /// ε-truncation order, `null` for exact matrices.
    pub order: Option<i64>,
    pub entries: Vec<Vec<Vec<(i64, Value)>>>,
}

impl<C: Coeff> fmt::Debug for LoopMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<C: Coeff> fmt::Display for LoopMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
