//! Combinatorics of B(GL_n): Newton points, dominance order, the Kottwitz
//! set B(G, μ), defects, dimensions and fundamental-alcove representatives.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_field::FieldCtx;
use crate::loop_matrix::{Cocharacter, ConstMatrix};
use crate::puiseux::{int, Q};

/// Dominant rational slope vector whose isoclinic blocks have integral sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NewtonPoint(Vec<Q>);

impl NewtonPoint {
    pub fn new(slopes: Vec<Q>) -> Result<Self> {
        if slopes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("Newton point must be weakly decreasing"));
        }
        let nu = NewtonPoint(slopes);
        for (s, m) in nu.blocks() {
            if !(&s * int(m as i64)).is_integer() {
                return Err(Error::invalid(format!(
                    "block of slope {s} and multiplicity {m} has non-integral sum"
                )));
            }
        }
        Ok(nu)
    }

    /// Parses comma-separated rationals such as `1/2,1/2,0`.
    pub fn parse(s: &str) -> Result<Self> {
        let v = s
            .split(',')
            .map(|t| parse_rational(t.trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v)
    }

    pub fn slopes(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Q {
        self.0.iter().sum()
    }

    /// Isoclinic blocks (slope, multiplicity), slopes decreasing.
    pub fn blocks(&self) -> Vec<(Q, usize)> {
        let mut out: Vec<(Q, usize)> = Vec::new();
        for s in &self.0 {
            match out.last_mut() {
                Some((t, m)) if t == s => *m += 1,
                _ => out.push((s.clone(), 1)),
            }
        }
        out
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|s| s.to_string()).collect()
    }

    fn partial_sums(&self) -> Vec<Q> {
        let mut acc = Q::zero();
        let mut out = vec![acc.clone()];
        for s in &self.0 {
            acc += s;
            out.push(acc.clone());
        }
        out
    }
}

impl fmt::Display for NewtonPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .into_iter()
            .map(|(s, m)| if m == 1 { s.to_string() } else { format!("{s}^({m})") })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn parse_rational(t: &str) -> Result<Q> {
    let bad = || Error::invalid(format!("cannot parse rational `{t}`"));
    match t.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Q::new(a.into(), b.into()))
        }
        None => Ok(int(t.parse().map_err(|_| bad())?)),
    }
}

/// ν ⪯ ν′: every partial sum of ν is at most that of ν′, with equal totals.
pub fn dominance_leq(nu: &NewtonPoint, other: &NewtonPoint) -> Result<bool> {
    if nu.len() != other.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            nu.len(),
            other.len()
        )));
    }
    let (a, b) = (nu.partial_sums(), other.partial_sums());
    if a.last() != b.last() {
        return Ok(false);
    }
    Ok(a.iter().zip(&b).all(|(x, y)| x <= y))
}

/// Number of simple isocrystal summands subtracted from n.
pub fn defect(nu: &NewtonPoint) -> i64 {
    let simple: i64 = nu
        .blocks()
        .iter()
        .map(|(s, m)| *m as i64 / s.denom().to_i64().expect("small denominator"))
        .sum();
    nu.len() as i64 - simple
}

fn rho(n: usize) -> Vec<Q> {
    (0..n)
        .map(|i| Q::new((n as i64 - 1 - 2 * i as i64).into(), 2.into()))
        .collect()
}

fn to_integer(x: Q, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::Unsupported(format!("{what} is not integral: {x}")));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| Error::Unsupported(format!("{what} out of range")))
}

/// dim X_μ(b) = ⟨ρ, μ − ν⟩ − def(ν)/2 for [b] ∈ B(G, μ).
pub fn dim_adlv(mu: &Cocharacter, nu: &NewtonPoint) -> Result<i64> {
    let mu_nu = mu.to_newton_point();
    if !dominance_leq(nu, &mu_nu)? {
        return Err(Error::invalid(format!("{nu} does not lie in B(G, {mu})")));
    }
    let pairing: Q = rho(nu.len())
        .iter()
        .zip(mu_nu.slopes().iter().zip(nu.slopes()))
        .map(|(r, (m, v))| r * (m - v))
        .sum();
    let d = pairing - Q::new(defect(nu).into(), 2.into());
    to_integer(d, "ADLV dimension")
}

/// Leaf dimension ⟨2ρ, ν⟩ = Σ_{i<j} (ν_i − ν_j).
pub fn dim_leaf(nu: &NewtonPoint) -> Result<i64> {
    let d: Q = rho(nu.len())
        .iter()
        .zip(nu.slopes())
        .map(|(r, v)| int(2) * r * v)
        .sum();
    to_integer(d, "leaf dimension")
}

/// The d×d block with 1 at (i, i+a) for i + a < d and ε at (i, i+a−d) otherwise.
fn cyclic_block(a: i64, d: i64) -> Vec<(usize, usize, i64)> {
    (0..d)
        .map(|i| {
            if i + a < d {
                (i as usize, (i + a) as usize, 0)
            } else {
                (i as usize, (i + a - d) as usize, 1)
            }
        })
        .collect()
}

/// Nonzero entries (row, column, ε-exponent) of the fundamental alcove: one
/// cyclic block per simple summand, in increasing slope order. A slope
/// m + a/d is realized as ε^m times the block for a/d.
pub fn fundamental_alcove_pattern(nu: &NewtonPoint) -> Vec<(usize, usize, i64)> {
    let mut out = Vec::new();
    let mut offset = 0usize;
    let mut blocks = nu.blocks();
    blocks.reverse();
    for (s, m) in blocks {
        let d = s.denom().to_i64().expect("small denominator");
        let (whole, frac) = s.numer().div_mod_floor(s.denom());
        let whole = whole.to_i64().expect("small slope");
        let a = frac.to_i64().expect("small slope");
        for _ in 0..(m as i64 / d) {
            for (i, j, e) in cyclic_block(a, d) {
                out.push((offset + i, offset + j, e + whole));
            }
            offset += d as usize;
        }
    }
    out
}

pub fn fundamental_alcove(ctx: &Arc<FieldCtx>, nu: &NewtonPoint) -> ConstMatrix {
    let pattern: Vec<_> = fundamental_alcove_pattern(nu)
        .into_iter()
        .map(|(i, j, e)| (i, j, 1, e))
        .collect();
    ConstMatrix::from_pattern(ctx, nu.len(), &pattern)
}

/// One row of a [`BGmuTable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub nu: Vec<String>,
    pub defect: i64,
    pub dim_adlv: i64,
    pub dim_leaf: i64,
    /// Fundamental alcove as (row, column, ε-exponent) of its unit entries.
    pub alcove: Vec<(usize, usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BGmuTable {
    pub mu: Cocharacter,
    /// Ordered by leaf dimension, then lexicographically.
    pub classes: Vec<NewtonPoint>,
    /// `leq[i][j]` iff classes[i] ⪯ classes[j].
    pub leq: Vec<Vec<bool>>,
    pub rows: Vec<ClassRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BGmuJson {
    pub schema_version: u32,
    pub n: usize,
    pub mu: Vec<i64>,
    pub classes: Vec<ClassRow>,
    /// Covering relations (lower, upper) as class indices.
    pub hasse: Vec<(usize, usize)>,
}

/// All Newton points ν ⪯ μ with integral breakpoints: concave lattice
/// polygons from (0, 0) to (n, Σμ) lying below the μ-polygon.
pub fn enumerate_bg_mu(n: usize, mu: &Cocharacter) -> Result<BGmuTable> {
    if mu.len() != n {
        return Err(Error::invalid(format!("μ has length {} but n = {n}", mu.len())));
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let mu_nu = mu.to_newton_point();
    let bound = mu_nu.partial_sums();
    let (hi, lo) = (mu.as_slice()[0], mu.as_slice()[n - 1]);
    let mut found = Vec::new();
    let mut path = Vec::new();
    extend_polygon(n, &bound, hi, lo, 0, 0, None, &mut path, &mut found);
    let mut classes: Vec<NewtonPoint> = found
        .into_iter()
        .map(NewtonPoint::new)
        .collect::<Result<_>>()?;
    let mut keyed = classes
        .drain(..)
        .map(|nu| Ok((dim_leaf(&nu)?, nu)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let classes: Vec<NewtonPoint> = keyed.into_iter().map(|(_, nu)| nu).collect();
    let leq = classes
        .iter()
        .map(|a| classes.iter().map(|b| dominance_leq(a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let rows = classes
        .iter()
        .map(|nu| {
            Ok(ClassRow {
                nu: nu.to_strings(),
                defect: defect(nu),
                dim_adlv: dim_adlv(mu, nu)?,
                dim_leaf: dim_leaf(nu)?,
                alcove: fundamental_alcove_pattern(nu),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BGmuTable {
        mu: mu.clone(),
        classes,
        leq,
        rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn extend_polygon(
    n: usize,
    bound: &[Q],
    hi: i64,
    lo: i64,
    k: usize,
    y: i64,
    last: Option<&Q>,
    path: &mut Vec<Q>,
    out: &mut Vec<Vec<Q>>,
) {
    if k == n {
        if int(y) == bound[n] {
            out.push(path.clone());
        }
        return;
    }
    for k2 in k + 1..=n {
        let len = (k2 - k) as i64;
        for y2 in (y + lo * len)..=(y + hi * len) {
            let s = Q::new((y2 - y).into(), len.into());
            if last.is_some_and(|l| s >= *l) {
                continue;
            }
            let below = (1..=k2 - k).all(|j| int(y) + &s * int(j as i64) <= bound[k + j]);
            if !below {
                continue;
            }
            let before = path.len();
            path.extend(std::iter::repeat(s.clone()).take(k2 - k));
            extend_polygon(n, bound, hi, lo, k2, y2, Some(&s), path, out);
            path.truncate(before);
        }
    }
}

/// Covering relations (lower, upper) of ⪯ on the table's classes.
pub fn hasse_diagram(table: &BGmuTable) -> Vec<(usize, usize)> {
    let m = table.classes.len();
    let lt = |a: usize, b: usize| a != b && table.leq[a][b];
    let mut edges = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if lt(a, b) && !(0..m).any(|c| lt(a, c) && lt(c, b)) {
                edges.push((a, b));
            }
        }
    }
    edges
}

impl BGmuTable {
    pub fn to_json(&self) -> BGmuJson {
        BGmuJson {
            schema_version: crate::loop_matrix::SCHEMA_VERSION,
            n: self.mu.len(),
            mu: self.mu.as_slice().to_vec(),
            classes: self.rows.clone(),
            hasse: hasse_diagram(self),
        }
    }

    /// Graphviz rendering of the Hasse diagram, upper classes on top.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph bgmu {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, nu) in self.classes.iter().enumerate() {
            s.push_str(&format!("  n{} [label=\"ν{} = {}\"];\n", i, i + 1, nu));
        }
        for (a, b) in hasse_diagram(self) {
            s.push_str(&format!("  n{a} -> n{b};\n"));
        }
        s.push_str("}\n");
        s
    }

    /// Plain-text table, one class per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("B(GL_{}, {}): {} classes\n", self.mu.len(), self.mu, self.classes.len());
        s.push_str("idx  nu                             defect  dim_adlv  dim_leaf\n");
        for (i, (nu, r)) in self.classes.iter().zip(&self.rows).enumerate() {
            s.push_str(&format!(
                "{:<4} {:<30} {:>6}  {:>8}  {:>8}\n",
                format!("ν{}", i + 1),
                nu.to_string(),
                r.defect,
                r.dim_adlv,
                r.dim_leaf
            ));
        }
        s
    }
}
