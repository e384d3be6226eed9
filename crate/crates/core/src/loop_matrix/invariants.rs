//! Newton points and Cartan invariants of loop matrices.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Coeff, ConstMatrix, LaurentSeries, LoopMatrix};
use crate::error::{Error, Result};
use crate::newton_combinatorics::NewtonPoint;
use crate::puiseux::{int, Q};

/// Dominant (weakly decreasing) integral vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cocharacter(Vec<i64>);

impl Cocharacter {
    pub fn new(v: Vec<i64>) -> Result<Self> {
        if v.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid(format!("{v:?} is not weakly decreasing")));
        }
        Ok(Cocharacter(v))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn to_newton_point(&self) -> NewtonPoint {
        NewtonPoint::new(self.0.iter().map(|&x| int(x)).collect()).expect("integral and dominant")
    }
}

impl fmt::Display for Cocharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn slope(a: &(usize, Q), b: &(usize, Q)) -> Q {
    (&b.1 - &a.1) / int((b.0 - a.0) as i64)
}

/// Lower convex hull of points sorted by abscissa.
fn lower_hull(points: &[(usize, Q)]) -> Vec<(usize, Q)> {
    let mut hull: Vec<(usize, Q)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let o = &hull[hull.len() - 2];
            let a = &hull[hull.len() - 1];
            if slope(o, a) >= slope(o, p) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull
}

fn hull_value(hull: &[(usize, Q)], k: usize) -> Q {
    for w in hull.windows(2) {
        if w[0].0 <= k && k <= w[1].0 {
            return &w[0].1 + slope(&w[0], &w[1]) * int((k - w[0].0) as i64);
        }
    }
    hull.last().map(|p| p.1.clone()).unwrap_or_else(Q::zero)
}

/// Newton point of b·σ: the slopes of the characteristic polynomial of the
/// norm b·σ(b)·…·σ^{M−1}(b), divided by M.
pub fn newton_point(b: &ConstMatrix) -> Result<NewtonPoint> {
    let n = b.size();
    let r = b.ctx().m() as i64;
    let mut norm = b.clone();
    let mut twisted = b.clone();
    for _ in 1..r {
        twisted = twisted.sigma_twist(1);
        norm = norm.mul(&twisted)?;
    }
    let cp = norm.charpoly();
    let mut certified = Vec::new();
    let mut uncertain = Vec::new();
    for (k, c) in cp.iter().enumerate() {
        match c.eps_val() {
            Some(v) => certified.push((k, int(v))),
            None if c.is_exact_zero() => {}
            None => uncertain.push((k, c.val_lower_bound().expect("finite order"))),
        }
    }
    if certified.last().map(|p| p.0) != Some(n) {
        return Err(Error::precision(
            "Newton point (determinant not certified nonzero)",
            format!("ε-order above {}", norm.order().unwrap_or(0)),
        ));
    }
    let hull = lower_hull(&certified);
    for (k, lb) in &uncertain {
        if int(*lb) < hull_value(&hull, *k) {
            return Err(Error::precision(
                format!("Newton polygon vertex at index {k}"),
                format!("ε-order above {}", hull_value(&hull, *k)),
            ));
        }
    }
    let mut slopes = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let s = slope(&w[0], &w[1]) / int(r);
        for _ in w[0].0..w[1].0 {
            slopes.push(s.clone());
        }
    }
    slopes.reverse();
    NewtonPoint::new(slopes)
}

/// Elementary divisor exponents of b over k[[ε]] (Smith normal form with
/// minimal-valuation pivots), as a dominant vector.
pub fn cartan_invariants<C: Coeff>(b: &LoopMatrix<C>) -> Result<Cocharacter> {
    let n = b.size();
    let shift = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| b.get(i, j).val_lower_bound())
        .min()
        .unwrap_or(0)
        .min(0);
    let mut a: Vec<Vec<LaurentSeries<C>>> =
        (0..n).map(|i| b.row(i).iter().map(|e| e.shift(-shift)).collect()).collect();
    let order = match b.order() {
        Some(o) => o - shift,
        None => {
            let det = b.det().shift(-shift * n as i64);
            let v = det.eps_val().ok_or_else(|| Error::NotInvertible("determinant is 0".into()))?;
            v + 1
        }
    };
    for row in a.iter_mut() {
        for e in row.iter_mut() {
            *e = e.truncate(Some(order));
        }
    }
    let mut mu = Vec::with_capacity(n);
    for s in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        let mut floor = i64::MAX;
        for i in s..n {
            for j in s..n {
                let e = &a[i][j];
                match e.eps_val() {
                    Some(v) if best.map_or(true, |(bv, _, _)| v < bv) => best = Some((v, i, j)),
                    Some(_) => {}
                    None => {
                        if let Some(lb) = e.val_lower_bound() {
                            floor = floor.min(lb);
                        }
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else {
            return Err(Error::precision(
                "Cartan invariants (no certified pivot)",
                format!("ε-order above {}", order + shift),
            ));
        };
        if floor < v {
            return Err(Error::precision(
                "Cartan invariants (pivot valuation not certified minimal)",
                format!("ε-order above {}", order + shift),
            ));
        }
        a.swap(s, pi);
        for row in a.iter_mut() {
            row.swap(s, pj);
        }
        let pinv = a[s][s].inv()?;
        for i in s + 1..n {
            let f = a[i][s].mul(&pinv);
            for j in s..n {
                let sub = f.mul(&a[s][j]);
                a[i][j] = a[i][j].sub(&sub).truncate(Some(order));
            }
        }
        for j in s + 1..n {
            let f = a[s][j].mul(&pinv);
            for i in s..n {
                let sub = a[i][s].mul(&f);
                a[i][j] = a[i][j].sub(&sub).truncate(Some(order));
            }
        }
        mu.push(v + shift);
    }
    mu.sort_unstable_by(|x, y| y.cmp(x));
    Cocharacter::new(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::{FieldCtx, FieldElem};
    use crate::puiseux::rat;
    use std::sync::Arc;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::new(2, 1, 1).unwrap()
    }

    fn b1(c: &Arc<FieldCtx>) -> ConstMatrix {
        ConstMatrix::from_pattern(
            c,
            5,
            &[(0, 2, 1, 0), (1, 3, 1, 0), (2, 4, 1, 0), (3, 0, 1, 1), (4, 1, 1, 1)],
        )
    }

    fn b2(c: &Arc<FieldCtx>) -> ConstMatrix {
        ConstMatrix::from_pattern(
            c,
            5,
            &[(0, 1, 1, 0), (1, 2, 1, 0), (2, 0, 1, 1), (3, 4, 1, 0), (4, 3, 1, 1)],
        )
    }

    fn nu(v: &[(i64, i64)]) -> NewtonPoint {
        NewtonPoint::new(v.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn newton_points_of_displayed_matrices() {
        let c = f2();
        assert_eq!(newton_point(&b1(&c)).unwrap(), nu(&[(2, 5); 5]));
        assert_eq!(
            newton_point(&b2(&c)).unwrap(),
            nu(&[(1, 2), (1, 2), (1, 3), (1, 3), (1, 3)])
        );
        assert_eq!(
            newton_point(&ConstMatrix::identity(&c, 5)).unwrap(),
            nu(&[(0, 1); 5])
        );
    }

    #[test]
    fn newton_point_over_extension_field() {
        // diag(a·ε, 1) over F_4 has slopes (1, 0) regardless of the unit a
        let c = FieldCtx::new(2, 1, 2).unwrap();
        let mut m = ConstMatrix::identity(&c, 2);
        m.set(0, 0, LaurentSeries::monomial(&c, FieldElem::generator(&c), 1));
        assert_eq!(newton_point(&m).unwrap(), nu(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn cartan_invariants_examples() {
        let c = f2();
        let d = ConstMatrix::eps_power(&c, &[1, 1, 0, 0, 0]);
        assert_eq!(cartan_invariants(&d).unwrap().as_slice(), &[1, 1, 0, 0, 0]);
        assert_eq!(cartan_invariants(&b2(&c)).unwrap().as_slice(), &[1, 1, 0, 0, 0]);
        assert_eq!(cartan_invariants(&b1(&c)).unwrap().as_slice(), &[1, 1, 0, 0, 0]);
        let inv = b2(&c).inv().unwrap();
        assert_eq!(cartan_invariants(&inv).unwrap().as_slice(), &[0, 0, 0, -1, -1]);
        // [[1+ε, ε], [ε, ε²]] has det ε³ and a unit entry, so invariants (3, 0)
        let m = ConstMatrix::from_pattern(&c, 2, &[(0, 0, 1, 0), (0, 0, 1, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 1, 2)]);
        assert_eq!(cartan_invariants(&m).unwrap().as_slice(), &[3, 0]);
    }

    #[test]
    fn cocharacter_requires_dominance() {
        assert!(Cocharacter::new(vec![0, 1]).is_err());
        assert_eq!(Cocharacter::new(vec![1, 1, 0]).unwrap().total(), 2);
    }
}
