//! Solvers for σ-linear equations in one unknown series.

use super::{int, q_pow, Precision, PuiseuxSeries, Valuation, Q};
use crate::error::{Error, Result};
use crate::finite_field::{q_linearized_affine, q_linearized_extension_degree, FieldElem, Root};

/// Σ u_j·σ^{k_j}(x) = rhs.
#[derive(Clone, Debug)]
pub struct SigmaAffineEquation {
    pub terms: Vec<(PuiseuxSeries, u32)>,
    pub rhs: PuiseuxSeries,
}

impl SigmaAffineEquation {
    pub fn new(terms: Vec<(PuiseuxSeries, u32)>, rhs: PuiseuxSeries) -> Self {
        SigmaAffineEquation { terms, rhs }
    }

    /// Left-hand side evaluated at `x`.
    pub fn apply(&self, x: &PuiseuxSeries) -> PuiseuxSeries {
        self.terms
            .iter()
            .fold(PuiseuxSeries::zero(x.ctx()), |acc, (u, k)| {
                acc.add(&u.mul(&x.sigma(*k as i64)))
            })
    }

    /// Left-hand side minus right-hand side at `x`.
    pub fn residual(&self, x: &PuiseuxSeries) -> PuiseuxSeries {
        self.apply(x).sub(&self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Requested lower bound on the residual valuation.
    pub target: Q,
    /// How many contraction steps to follow towards an accumulation point of
    /// the support before stopping.
    pub accumulation_depth: u32,
    pub max_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            target: int(2),
            accumulation_depth: 2,
            max_steps: 200_000,
        }
    }
}

impl SolveOptions {
    pub fn with_target(target: Q) -> Self {
        SolveOptions {
            target,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SigmaSolution {
    /// Truncation of a true solution; its bound is the preimage of
    /// `residual_precision`.
    pub x: PuiseuxSeries,
    /// The residual of `x` (taken as exact) has valuation at least this.
    pub residual_precision: Precision,
    /// Exponent at which the support of every solution accumulates, when the
    /// right-hand side reaches below it. Residual valuations cannot pass it
    /// with finitely many terms.
    pub accumulation: Option<Q>,
    pub steps: usize,
}

/// A nonzero monomial solution of σ^a(x) = u·σ^b(x), a > b.
pub fn solve_sigma_monomial(a: u32, b: u32, u: &PuiseuxSeries) -> Result<PuiseuxSeries> {
    if a <= b {
        return Err(Error::invalid(format!("need a > b, got a = {a}, b = {b}")));
    }
    if !u.is_monomial() {
        return Err(Error::invalid(format!("coefficient {u} is not a single term")));
    }
    let (w, d) = u.leading().expect("monomial has a term");
    let ctx = u.ctx();
    let q = ctx.q();
    let n = q
        .checked_pow(a)
        .and_then(|qa| q.checked_pow(b).map(|qb| qa - qb))
        .ok_or_else(|| Error::Unsupported("root index q^a - q^b exceeds 64 bits".into()))?;
    let r = w / int(n as i64);
    match d.nth_root(n)? {
        Root::Found(c) => Ok(PuiseuxSeries::monomial(c, r)),
        Root::NeedsExtension { degree } => Err(Error::ExtensionNeeded { degree }),
    }
}

struct Branch {
    lead: FieldElem,
    v: Q,
    k: u32,
    qk: Q,
}

impl Branch {
    /// Monomial a·π^r with u·σ^k(a·π^r) leading to d·π^s.
    fn preimage(&self, s: &Q, d: &FieldElem) -> PuiseuxSeries {
        let inv = self.lead.inv().expect("leading coefficients are nonzero");
        let a = (d * &inv).frobenius(-(self.k as i64));
        PuiseuxSeries::monomial(a, (s - &self.v) / &self.qk)
    }

    fn pre(&self, s: &Q) -> Q {
        (s - &self.v) / &self.qk
    }
}

fn branch(u: &PuiseuxSeries, k: u32) -> Result<Branch> {
    let Some((v, lead)) = u.leading() else {
        return Err(Error::invalid(format!(
            "coefficient of σ^{k} is indistinguishable from 0"
        )));
    };
    Ok(Branch {
        lead: lead.clone(),
        v: v.clone(),
        k,
        qk: q_pow(u.ctx().q(), k as i64),
    })
}

/// One solution of u₁σ^{k₁}(x) + u₂σ^{k₂}(x) = c (or a single term) by
/// leading-exponent elimination.
///
/// Below the threshold s* (where both terms of a monomial land on the same
/// exponent) the σ^{k₁} term dominates, above it the σ^{k₂} term. If c has
/// terms below s* the elimination chain contracts towards s* without reaching
/// it, so the achievable residual valuation is capped below s*; the cap
/// follows the chain `accumulation_depth` contraction steps.
pub fn solve_sigma_affine(eq: &SigmaAffineEquation, opts: &SolveOptions) -> Result<SigmaSolution> {
    let mut terms: Vec<(PuiseuxSeries, u32)> = Vec::new();
    for (u, k) in &eq.terms {
        if let Some(slot) = terms.iter_mut().find(|(_, kk)| kk == k) {
            slot.0 = slot.0.add(u);
        } else {
            terms.push((u.clone(), *k));
        }
    }
    terms.retain(|(u, _)| !u.is_exact_zero());
    terms.sort_by(|a, b| b.1.cmp(&a.1));
    let (hi, lo) = match terms.as_slice() {
        [(u1, k1)] => (branch(u1, *k1)?, None),
        [(u1, k1), (u2, k2)] => (branch(u1, *k1)?, Some(branch(u2, *k2)?)),
        [] => return Err(Error::invalid("equation has no nonzero σ-term")),
        _ => return Err(Error::Unsupported("more than two σ-terms".into())),
    };
    let ctx = eq.rhs.ctx().clone();
    let reduced = SigmaAffineEquation::new(terms.clone(), eq.rhs.clone());

    let threshold = lo.as_ref().map(|lo| {
        let r = (&lo.v - &hi.v) / (&hi.qk - &lo.qk);
        &hi.v + &hi.qk * r
    });
    let pre = |s: &Q| -> Q {
        match (&threshold, &lo) {
            (Some(t), Some(lo)) if s > t => lo.pre(s),
            _ => hi.pre(s),
        }
    };

    let mut goal = Precision::Finite(opts.target.clone()).min(eq.rhs.precision().clone());
    let mut accumulation = None;
    if let (Some(t), Some(lo), Valuation::Certified(vc)) = (&threshold, &lo, eq.rhs.val()) {
        if vc < *t {
            if goal >= Precision::Finite(t.clone()) {
                let rho = &lo.qk / &hi.qk;
                let mut gap = t - &vc;
                for _ in 0..opts.accumulation_depth {
                    gap *= &rho;
                }
                goal = Precision::Finite(t - gap);
            }
            accumulation = Some(t.clone());
        }
    }

    let mut x = PuiseuxSeries::zero(&ctx);
    let mut residual = eq.rhs.truncate(&goal);
    let mut steps = 0usize;
    while let Some((s, d)) = residual.leading() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Budget(format!(
                "σ-affine elimination exceeded {} steps at exponent {s}",
                opts.max_steps
            )));
        }
        let (s, d) = (s.clone(), d.clone());
        let term = match (&threshold, &lo) {
            (Some(t), Some(lo)) if s == *t => {
                let r = hi.pre(&s);
                let coeffs = [(hi.lead.clone(), hi.k), (lo.lead.clone(), lo.k)];
                match q_linearized_affine(&coeffs, &d)? {
                    Some(sol) => PuiseuxSeries::monomial(
                        FieldElem::from_coeffs(&ctx, sol.particular),
                        r,
                    ),
                    None => {
                        let degree = q_linearized_extension_degree(&coeffs, &d)?;
                        return Err(Error::ExtensionNeeded { degree });
                    }
                }
            }
            (Some(t), Some(lo)) if s > *t => lo.preimage(&s, &d),
            _ => hi.preimage(&s, &d),
        };
        x = x.add(&term);
        residual = residual.sub(&reduced.apply(&term)).truncate(&goal);
        if let Some((s2, _)) = residual.leading() {
            if *s2 <= s {
                return Err(Error::Unsupported(format!(
                    "elimination did not advance past exponent {s}"
                )));
            }
        }
    }
    let achieved = residual.precision().clone();
    let x_prec = match &achieved {
        Precision::Finite(t) => Precision::Finite(pre(t)),
        Precision::Exact => Precision::Exact,
    };
    let x = x.truncate(&x_prec);

    // universal post-check on the finite sum itself
    let check = reduced.residual(&x.as_exact());
    if check.val_lower_bound() < achieved.clone().min(check.precision().clone()) {
        return Err(Error::Unsupported(format!(
            "solver post-check failed: residual {check} below {achieved}"
        )));
    }
    Ok(SigmaSolution {
        x,
        residual_precision: achieved,
        accumulation,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FieldCtx;
    use crate::puiseux::rat;
    use std::sync::Arc;

    fn ctx() -> Arc<FieldCtx> {
        FieldCtx::new(2, 1, 1).unwrap()
    }

    fn pi_u(c: &Arc<FieldCtx>, e: Q, sign: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(FieldElem::from_int(c, sign), e)
    }

    #[test]
    fn monomial_solutions() {
        let c = ctx();
        let x = solve_sigma_monomial(3, 1, &pi_u(&c, int(1), -1)).unwrap();
        assert_eq!(x.val(), Valuation::Certified(rat(1, 6)));
        let y = solve_sigma_monomial(1, 0, &pi_u(&c, int(-1), 1)).unwrap();
        assert_eq!(y.val(), Valuation::Certified(int(-1)));
        // x = π·σ(x)
        assert_eq!(y, PuiseuxSeries::pi(&c).mul(&y.sigma(1)));
        let one = PuiseuxSeries::one(&c);
        assert_eq!(solve_sigma_monomial(1, 0, &one).unwrap(), one);
    }

    #[test]
    fn monomial_root_extension_reported() {
        // c^3 = a has no root in F_4 for the generator a
        let f4 = FieldCtx::new(2, 1, 2).unwrap();
        let u = PuiseuxSeries::constant(FieldElem::generator(&f4));
        match solve_sigma_monomial(2, 0, &u) {
            Err(Error::ExtensionNeeded { degree }) => assert_eq!(degree % 2, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn accumulating_solution_of_double_star() {
        let c = ctx();
        let rhs = solve_sigma_monomial(3, 1, &pi_u(&c, int(1), -1)).unwrap();
        let eq = SigmaAffineEquation::new(
            vec![(PuiseuxSeries::one(&c), 2), (PuiseuxSeries::pi(&c), 0)],
            rhs,
        );
        let sol = solve_sigma_affine(&eq, &SolveOptions::default()).unwrap();
        assert_eq!(sol.x.val(), Valuation::Certified(rat(1, 24)));
        assert_eq!(sol.accumulation, Some(rat(4, 3)));
        let Precision::Finite(p) = &sol.residual_precision else {
            panic!()
        };
        assert!(*p > int(1) && *p < rat(4, 3));
        let r = eq.residual(&sol.x.as_exact());
        assert!(r.val_lower_bound() >= sol.residual_precision);
    }

    #[test]
    fn quintic_seed_equation() {
        // σ⁵(x) − πσ²(x) = π
        let c = ctx();
        let eq = SigmaAffineEquation::new(
            vec![(PuiseuxSeries::one(&c), 5), (pi_u(&c, int(1), -1), 2)],
            PuiseuxSeries::pi(&c),
        );
        let sol = solve_sigma_affine(&eq, &SolveOptions::default()).unwrap();
        assert_eq!(sol.x.val(), Valuation::Certified(rat(1, 32)));
        assert_eq!(sol.accumulation, Some(rat(8, 7)));
        let r = eq.residual(&sol.x.as_exact());
        assert!(r.val_lower_bound() >= sol.residual_precision);
    }

    #[test]
    fn reaches_target_above_threshold() {
        // x + πσ²(x) = 1: threshold −1/3 lies below the right-hand side
        let c = ctx();
        let eq = SigmaAffineEquation::new(
            vec![(PuiseuxSeries::one(&c), 0), (PuiseuxSeries::pi(&c), 2)],
            PuiseuxSeries::one(&c),
        );
        let sol = solve_sigma_affine(&eq, &SolveOptions::with_target(int(6))).unwrap();
        assert_eq!(sol.accumulation, None);
        assert_eq!(sol.residual_precision, Precision::Finite(int(6)));
        let r = eq.residual(&sol.x.as_exact());
        assert!(r.val_lower_bound() >= Precision::Finite(int(6)));
    }

    #[test]
    fn artin_schreier_constant_slot() {
        // σ(x) + x = c over F_4 with Tr(c) = 0, solved at the exponent-0 slot
        let f4 = FieldCtx::new(2, 1, 2).unwrap();
        let one = PuiseuxSeries::one(&f4);
        let eq = SigmaAffineEquation::new(vec![(one.clone(), 1), (one.clone(), 0)], one.clone());
        let sol = solve_sigma_affine(&eq, &SolveOptions::default()).unwrap();
        assert_eq!(sol.residual_precision, Precision::Finite(int(2)));
        assert!(eq.residual(&sol.x.as_exact()).is_indistinguishable_from_zero());
        // over F_2 the same equation needs F_4
        let f2 = ctx();
        let one2 = PuiseuxSeries::one(&f2);
        let eq2 = SigmaAffineEquation::new(vec![(one2.clone(), 1), (one2.clone(), 0)], one2);
        match solve_sigma_affine(&eq2, &SolveOptions::default()) {
            Err(Error::ExtensionNeeded { degree }) => assert_eq!(degree, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
