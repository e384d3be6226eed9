#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use central_leaves::finite_field::{FieldCtx, FieldElem};
use central_leaves::loop_matrix::{cartan_invariants, newton_point, Cocharacter, ConstMatrix, LaurentSeries};
use central_leaves::newton_combinatorics::dominance_leq;
use central_leaves::puiseux::{
    rat, solve_sigma_affine, Precision, PuiseuxSeries, SigmaAffineEquation, SolveOptions, Valuation,
};
use central_leaves::Error;

pub type CaseResult = Result<(), TestCaseError>;

pub const CASES: u32 = 256;

pub fn config(seed: u64) -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn runner(seed: u64) -> TestRunner {
    TestRunner::new(config(seed))
}

pub fn fields() -> Vec<Arc<FieldCtx>> {
    [(2, 1, 1), (2, 1, 2), (2, 1, 3), (2, 2, 2), (3, 1, 1), (3, 1, 2), (5, 1, 1), (3, 2, 1)]
        .iter()
        .map(|&(p, e, m)| FieldCtx::new(p, e, m).unwrap())
        .collect()
}

pub fn nonzero(ctx: &Arc<FieldCtx>, rng: &mut ChaCha8Rng) -> FieldElem {
    loop {
        let x = FieldElem::random(ctx, rng);
        if !x.is_zero() {
            return x;
        }
    }
}

fn poly(ctx: &Arc<FieldCtx>, rng: &mut ChaCha8Rng, from: i64, deg: i64) -> LaurentSeries<FieldElem> {
    LaurentSeries::from_terms(ctx, (from..=deg).map(|k| (k, FieldElem::random(ctx, rng))), None)
}

/// A random element of K = GL_n(k[[ε]]) with polynomial entries and
/// polynomial inverse: lower unitriangular times upper triangular with
/// constant unit diagonal.
pub fn random_k(ctx: &Arc<FieldCtx>, n: usize, rng: &mut ChaCha8Rng) -> ConstMatrix {
    use std::cmp::Ordering::*;
    let lower = ConstMatrix::from_fn(ctx, n, |i, j| match i.cmp(&j) {
        Greater => poly(ctx, rng, 0, 2),
        Equal => LaurentSeries::one(ctx),
        Less => LaurentSeries::zero(ctx),
    });
    let upper = ConstMatrix::from_fn(ctx, n, |i, j| match i.cmp(&j) {
        Less => poly(ctx, rng, 0, 2),
        Equal => LaurentSeries::monomial(ctx, nonzero(ctx, rng), 0),
        Greater => LaurentSeries::zero(ctx),
    });
    lower.mul(&upper).unwrap()
}

pub fn random_minuscule(n: usize, rng: &mut ChaCha8Rng) -> Cocharacter {
    let r = rng.gen_range(0..=n);
    Cocharacter::new((0..n).map(|i| (i < r) as i64).collect()).unwrap()
}

/// A nonzero exact series with `terms` distinct exponents.
pub fn random_series(ctx: &Arc<FieldCtx>, rng: &mut ChaCha8Rng, terms: usize) -> PuiseuxSeries {
    let den = rng.gen_range(1..5);
    let mut num = rng.gen_range(-6..6);
    let mut t = Vec::with_capacity(terms);
    for _ in 0..terms {
        t.push((rat(num, den), nonzero(ctx, rng)));
        num += rng.gen_range(1..4);
    }
    PuiseuxSeries::from_terms(ctx, t, Precision::Exact)
}

pub fn frobenius_strategy() -> impl Strategy<Value = (usize, u64, i64)> {
    (0usize..8, any::<u64>(), -4i64..6)
}

pub fn frobenius_case((f, seed, k): (usize, u64, i64)) -> CaseResult {
    let ctx = &fields()[f];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = FieldElem::random(ctx, &mut rng);
    let b = FieldElem::random(ctx, &mut rng);
    prop_assert_eq!((&a + &b).frobenius(k), a.frobenius(k) + b.frobenius(k));
    prop_assert_eq!((&a * &b).frobenius(k), a.frobenius(k) * b.frobenius(k));
    prop_assert_eq!(FieldElem::one(ctx).frobenius(k), FieldElem::one(ctx));
    if k >= 0 {
        prop_assert_eq!(a.frobenius(k), a.pow((ctx.q() as u128).pow(k as u32)));
    } else {
        prop_assert_eq!(a.frobenius(k).frobenius(-k), a);
    }
    Ok(())
}

pub fn valuation_strategy() -> impl Strategy<Value = (usize, u64, usize, usize)> {
    (0usize..8, any::<u64>(), 1usize..5, 1usize..5)
}

pub fn valuation_case((f, seed, s, t): (usize, u64, usize, usize)) -> CaseResult {
    let ctx = &fields()[f];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_series(ctx, &mut rng, s);
    let y = random_series(ctx, &mut rng, t);
    let (Valuation::Certified(vx), Valuation::Certified(vy)) = (x.val(), y.val()) else {
        return Err(TestCaseError::fail("nonzero exact series have certified valuations"));
    };
    prop_assert_eq!(x.mul(&y).val(), Valuation::Certified(vx + vy));
    Ok(())
}

pub fn matrix_strategy(max_n: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (0usize..8, 1usize..=max_n, any::<u64>())
}

pub fn mazur_case((f, n, seed): (usize, usize, u64)) -> CaseResult {
    let ctx = &fields()[f];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = random_minuscule(n, &mut rng);
    let b = random_k(ctx, n, &mut rng)
        .mul(&ConstMatrix::eps_power(ctx, mu.as_slice()))
        .unwrap()
        .mul(&random_k(ctx, n, &mut rng))
        .unwrap();
    prop_assert_eq!(&cartan_invariants(&b).unwrap(), &mu);
    let nu = newton_point(&b).unwrap();
    prop_assert!(dominance_leq(&nu, &mu.to_newton_point()).unwrap(), "ν = {} ⋠ μ = {}", nu, mu);
    Ok(())
}

pub fn conjugation_case((f, n, seed): (usize, usize, u64)) -> CaseResult {
    let ctx = &fields()[f];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = random_minuscule(n, &mut rng);
    let b = random_k(ctx, n, &mut rng)
        .mul(&ConstMatrix::eps_power(ctx, mu.as_slice()))
        .unwrap();
    let g = random_k(ctx, n, &mut rng);
    let conj = g.sigma_conjugate(&b).unwrap();
    prop_assert_eq!(newton_point(&conj).unwrap(), newton_point(&b).unwrap());
    Ok(())
}

pub fn solver_strategy() -> impl Strategy<Value = (usize, u64, u32, u32, i64, usize)> {
    (0usize..4, any::<u64>(), 1u32..5, 0u32..4, -3i64..4, 1usize..4)
}

/// Residual of u₁σ^{k₁}(x) + u₂σ^{k₂}(x) = c at the returned x, taken as
/// exact, against the declared bound.
pub fn solver_case((f, seed, k1, k2, e, terms): (usize, u64, u32, u32, i64, usize)) -> CaseResult {
    let ctx = &fields()[f];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k2 = k2.min(k1 - 1);
    let u1 = PuiseuxSeries::constant(nonzero(ctx, &mut rng));
    let u2 = PuiseuxSeries::monomial(nonzero(ctx, &mut rng), rat(e, rng.gen_range(1..4)));
    let rhs = random_series(ctx, &mut rng, terms);
    let eq = SigmaAffineEquation::new(vec![(u1, k1), (u2, k2)], rhs);
    match solve_sigma_affine(&eq, &SolveOptions::default()) {
        Ok(sol) => {
            let r = eq.residual(&sol.x.as_exact());
            prop_assert!(
                r.val_lower_bound() >= sol.residual_precision,
                "residual {} below declared {}",
                r.val_lower_bound(),
                sol.residual_precision
            );
        }
        Err(err) => prop_assert!(
            matches!(err, Error::ExtensionNeeded { .. } | Error::Budget(_) | Error::Precision { .. }),
            "unexpected error {}",
            err
        ),
    }
    Ok(())
}

pub const FROBENIUS_SEED: u64 = 0x5eed_0001;
pub const VALUATION_SEED: u64 = 0x5eed_0002;
pub const MAZUR_SEED: u64 = 0x5eed_0003;
pub const CONJUGATION_SEED: u64 = 0x5eed_0004;
pub const SOLVER_SEED: u64 = 0x5eed_0005;
