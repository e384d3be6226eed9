//! Explicit closure witnesses: the representative families x_t, the GL_3 and
//! GL_5 σ-conjugation solves, their π → 0 degenerations, and the
//! level-by-level conjugation solve for perturbations of fundamental alcoves.

mod gl3;
mod gl5;
mod perturbation;

pub use gl3::{solve_gl3, witness_b3_to_b2, Gl3Solution};
pub use gl5::{solve_gl5, witness_b2_to_b1, Gl5Solution};
pub use perturbation::{perturbation_witness, random_k_perturbation, PerturbationOutcome};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::{FieldCtx, FieldCtxDesc, FieldElem};
use crate::loop_matrix::{Coeff, ConstMatrix, LaurentSeries, LoopMatrix, LoopMatrixJson, PuiseuxMatrix};
use crate::puiseux::{int, Precision, PuiseuxSeries, SolveOptions, Q};

pub const SCHEMA_VERSION: u32 = 1;

pub fn b1(ctx: &Arc<FieldCtx>) -> ConstMatrix {
    ConstMatrix::from_pattern(
        ctx,
        5,
        &[(0, 2, 1, 0), (1, 3, 1, 0), (2, 4, 1, 0), (3, 0, 1, 1), (4, 1, 1, 1)],
    )
}

pub fn b2(ctx: &Arc<FieldCtx>) -> ConstMatrix {
    ConstMatrix::from_pattern(
        ctx,
        5,
        &[(0, 1, 1, 0), (1, 2, 1, 0), (2, 0, 1, 1), (3, 4, 1, 0), (4, 3, 1, 1)],
    )
}

fn with_entry<C: Coeff>(mut m: LoopMatrix<C>, i: usize, j: usize, c: C) -> LoopMatrix<C> {
    let ctx = m.ctx().clone();
    let v = m.get(i, j).add(&LaurentSeries::monomial(&ctx, c, 0));
    m.set(i, j, v);
    m
}

/// Representatives of the central leaves in the Newton stratum of b₃:
/// t sits at position (2, 4).
pub fn family_x_t_b3<C: Coeff>(t: &FieldElem) -> LoopMatrix<C> {
    let ctx = t.ctx();
    let base = LoopMatrix::from_pattern(
        ctx,
        5,
        &[(0, 0, 1, 0), (1, 2, 1, 0), (2, 1, 1, 1), (3, 4, 1, 0), (4, 3, 1, 1)],
    );
    with_entry(base, 1, 3, C::from_field(t.clone()))
}

/// Representatives of the central leaves in the Newton stratum of b₂:
/// t sits at position (4, 1).
pub fn family_x_t_b2<C: Coeff>(t: &FieldElem) -> LoopMatrix<C> {
    let ctx = t.ctx();
    let base = LoopMatrix::from_pattern(
        ctx,
        5,
        &[(0, 1, 1, 0), (1, 2, 1, 0), (2, 0, 1, 1), (3, 4, 1, 0), (4, 3, 1, 1)],
    );
    with_entry(base, 3, 0, C::from_field(t.clone()))
}

/// The element x_π of the central leaf of b₂ over the Puiseux base.
pub fn x_pi(ctx: &Arc<FieldCtx>) -> PuiseuxMatrix {
    let base = PuiseuxMatrix::from_pattern(
        ctx,
        5,
        &[(0, 2, 1, 0), (1, 3, 1, 0), (2, 4, 1, 0), (3, 0, 1, 1), (4, 1, 1, 1)],
    );
    let mut m = base;
    m.set(2, 3, LaurentSeries::monomial(ctx, PuiseuxSeries::pi(ctx), 0));
    m
}

/// Run parameters shared by the witnesses.
#[derive(Clone, Debug)]
pub struct WitnessParams {
    /// ε-truncation order N of the conjugating matrix.
    pub order: i64,
    /// Deepest index i whose valuations are compared with the closed formulas.
    pub depth: usize,
    pub solve: SolveOptions,
}

impl Default for WitnessParams {
    fn default() -> Self {
        WitnessParams {
            order: 3,
            depth: 1,
            solve: SolveOptions::default(),
        }
    }
}

impl WitnessParams {
    fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::invalid("ε-order must be at least 1"));
        }
        if self.depth as i64 > self.order {
            return Err(Error::invalid(format!(
                "depth {} exceeds ε-order {}",
                self.depth, self.order
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub q: u64,
    pub m: u32,
    pub t: String,
    pub order: i64,
    pub pi_precision: String,
    pub depth: usize,
    pub accumulation_depth: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualRow {
    /// 1-based (row, column).
    pub entry: (usize, usize),
    pub level: i64,
    /// Lower bound promised by the solver records.
    pub declared: String,
    /// Certified lower bound for the π-valuation of the recomputed residual.
    pub achieved: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationRow {
    pub name: String,
    pub index: usize,
    pub computed: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema_version: u32,
    pub scenario: String,
    pub params: ParamsJson,
    pub field: FieldCtxDesc,
    pub g: Option<LoopMatrixJson>,
    pub residuals: Vec<ResidualRow>,
    pub valuations: Vec<ValuationRow>,
    pub conjugated: Option<LoopMatrixJson>,
    pub specialization: Option<LoopMatrixJson>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl WitnessReport {
    fn finish(mut self) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "scenario {}  (q = {}, M = {}, t = {}, N = {}, depth = {})\n",
            self.scenario, self.params.q, self.params.m, self.params.t, self.params.order, self.params.depth
        );
        for v in &self.valuations {
            s.push_str(&format!(
                "  v({}^{}) = {:<28} expected {:<28} {}\n",
                v.name,
                v.index,
                v.computed,
                v.expected,
                if v.ok { "ok" } else { "MISMATCH" }
            ));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("  note: {n}\n"));
        }
        s.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        s
    }
}

/// Declared lower bounds for residual coefficients, keyed by 0-based
/// (row, column, ε-level); absent keys mean the residual must vanish exactly.
pub(crate) type Declared = BTreeMap<(usize, usize, i64), Precision>;

pub(crate) fn residual_table(r: &PuiseuxMatrix, declared: &Declared, order: i64) -> Vec<ResidualRow> {
    let n = r.size();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let e = r.get(i, j);
            for level in 0..order {
                let achieved = e.coeff(level).val_lower_bound();
                let want = declared
                    .get(&(i, j, level))
                    .cloned()
                    .unwrap_or(Precision::Exact);
                if want == Precision::Exact && achieved == Precision::Exact {
                    continue;
                }
                rows.push(ResidualRow {
                    entry: (i + 1, j + 1),
                    level,
                    ok: achieved >= want,
                    declared: want.to_string(),
                    achieved: achieved.to_string(),
                });
            }
        }
    }
    rows
}

pub(crate) fn valuation_row(name: &str, index: usize, x: &PuiseuxSeries, expected: &Q) -> ValuationRow {
    let (computed, ok) = match x.val().certified() {
        Some(v) => (v.to_string(), v == expected),
        None => (format!("≥ {}", x.val_lower_bound()), false),
    };
    ValuationRow {
        name: name.to_string(),
        index,
        computed,
        expected: expected.to_string(),
        ok,
    }
}

/// Coefficients regarded as exact finite sums.
pub(crate) fn finite_part(m: &PuiseuxMatrix) -> PuiseuxMatrix {
    m.map(|e| e.map(|c| c.as_exact()))
}

/// Laurent series Σ ε^i x_i for i below `order`.
pub(crate) fn from_levels(ctx: &Arc<FieldCtx>, order: i64, f: impl Fn(i64) -> PuiseuxSeries) -> LaurentSeries<PuiseuxSeries> {
    LaurentSeries::from_terms(ctx, (0..order).map(|i| (i, f(i))), Some(order))
}

/// Smallest π-valuation lower bound over the known coefficients.
pub(crate) fn min_pi_lower_bound(m: &PuiseuxMatrix) -> Precision {
    let mut best = Precision::Exact;
    for i in 0..m.size() {
        for j in 0..m.size() {
            for (_, c) in m.get(i, j).terms() {
                best = best.min(c.val_lower_bound());
            }
        }
    }
    best
}

pub(crate) fn params_json(ctx: &Arc<FieldCtx>, t: &FieldElem, p: &WitnessParams) -> ParamsJson {
    ParamsJson {
        q: ctx.q(),
        m: ctx.m(),
        t: t.to_hex(),
        order: p.order,
        pi_precision: p.solve.target.to_string(),
        depth: p.depth,
        accumulation_depth: p.solve.accumulation_depth,
    }
}

pub(crate) fn check(name: &str, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail: detail.into(),
    }
}

/// q-power as a rational, for the closed valuation formulas.
pub(crate) fn qr(q: u64, k: u32) -> Q {
    int(q.pow(k) as i64)
}

/// Runs `f` in F_{q^M}, enlarging M to the reported degree whenever a root
/// or coefficient solve needs a larger field. `t` is re-read in each field
/// from its base-p digits, so only elements of F_p survive a change of M.
pub fn with_auto_extension<T>(
    q: u64,
    m: u32,
    max_m: u32,
    mut f: impl FnMut(&Arc<FieldCtx>) -> Result<T>,
) -> Result<(Arc<FieldCtx>, T)> {
    let mut m = m.max(1);
    loop {
        let ctx = FieldCtx::for_q(q, m)?;
        match f(&ctx) {
            Err(Error::ExtensionNeeded { degree }) => {
                let next = num_integer::lcm(m, degree);
                if next == m || next > max_m {
                    return Err(Error::ExtensionNeeded { degree: next });
                }
                m = next;
            }
            other => return other.map(|v| (ctx, v)),
        }
    }
}
