use std::sync::Arc;

use rand::Rng;

use super::*;
use crate::finite_field::{embedding, FpMatrix};
use crate::loop_matrix::newton_point;
use crate::newton_combinatorics::fundamental_alcove;

/// Result of solving b·h = l⁻¹·b·σ(l) for l ≡ 1 mod ε^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationOutcome {
    pub schema_version: u32,
    pub field: FieldCtxDesc,
    /// Field over which l was found; None if the solve failed.
    pub solved_over: Option<FieldCtxDesc>,
    pub d: i64,
    pub c: i64,
    pub order: i64,
    pub b: LoopMatrixJson,
    pub h: LoopMatrixJson,
    pub l: Option<LoopMatrixJson>,
    pub unknowns: usize,
    pub equations: usize,
    /// F_p-dimension of the solution space of the level system.
    pub kernel_dim: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl PerturbationOutcome {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "perturbation solve  (d = {}, c = {}, N = {}, {} unknowns, {} equations over F_p)\n",
            self.d, self.c, self.order, self.unknowns, self.equations
        );
        for c in &self.checks {
            s.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.pass { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        s.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        s
    }
}

/// h = 1 + Σ_{k = from}^{order−1} ε^k·H_k with uniformly random H_k.
pub fn random_k_perturbation<R: Rng + ?Sized>(
    ctx: &Arc<FieldCtx>,
    n: usize,
    from: i64,
    order: i64,
    rng: &mut R,
) -> ConstMatrix {
    ConstMatrix::from_fn(ctx, n, |i, j| {
        let mut terms: Vec<(i64, FieldElem)> = (from..order)
            .map(|k| (k, FieldElem::random(ctx, rng)))
            .collect();
        if i == j {
            terms.push((0, FieldElem::one(ctx)));
        }
        LaurentSeries::from_terms(ctx, terms, None)
    })
}

fn unit_matrix(ctx: &Arc<FieldCtx>, n: usize, i: usize, j: usize, level: i64, c: FieldElem) -> ConstMatrix {
    let mut m = ConstMatrix::zeros(ctx, n);
    m.set(i, j, LaurentSeries::monomial(ctx, c, level));
    m
}

/// F_p-coordinates of the ε-coefficients of `m` below `order`.
fn coordinates(m: &ConstMatrix, order: i64) -> Vec<u64> {
    let n = m.size();
    let deg = m.ctx().degree();
    let mut out = Vec::with_capacity(order as usize * n * n * deg);
    for k in 0..order {
        for i in 0..n {
            for j in 0..n {
                let c = m.get(i, j).coeff(k);
                out.extend_from_slice(c.coeffs());
            }
        }
    }
    out
}

/// The same matrix over `big`, where `image` is the image of the generator.
fn embed_matrix(m: &ConstMatrix, big: &Arc<FieldCtx>, image: &FieldElem) -> ConstMatrix {
    ConstMatrix::from_fn(big, m.size(), |i, j| {
        let e = m.get(i, j);
        LaurentSeries::from_terms(big, e.terms().map(|(k, c)| (k, c.embed(image))), e.order())
    })
}

struct LevelSolution {
    l: ConstMatrix,
    unknowns: usize,
    equations: usize,
    kernel_dim: usize,
}

/// Writing l = 1 + X, the condition l·b·h = b·σ(l) is the σ-twisted linear
/// equation σ(X) − b⁻¹·X·b·h = h − 1. It is solved over F_p for the levels
/// d..=order of X at once, with equations at the levels below `order`.
fn solve_levels(b: &ConstMatrix, h: &ConstMatrix, d: i64, order: i64) -> Result<Option<LevelSolution>> {
    let ctx = b.ctx().clone();
    let n = b.size();
    let one = ConstMatrix::identity(&ctx, n);
    let dh = h.sub(&one)?;
    let b_inv = b.inv()?;
    let bh = b.mul(h)?;
    let deg = ctx.degree();
    let unknowns = (order - d + 1) as usize * n * n * deg;
    let equations = order as usize * n * n * deg;
    let mut mat = FpMatrix::zeros(ctx.p(), equations, unknowns);
    let mut basis = Vec::with_capacity(unknowns);
    for k in d..=order {
        for i in 0..n {
            for j in 0..n {
                for t in 0..deg {
                    let mut e = vec![0; deg];
                    e[t] = 1;
                    let x = unit_matrix(&ctx, n, i, j, k, FieldElem::from_coeffs(&ctx, e));
                    let image = x.sigma_twist(1).sub(&b_inv.mul(&x)?.mul(&bh)?)?;
                    mat.set_col(basis.len(), &coordinates(&image, order));
                    basis.push(x);
                }
            }
        }
    }
    let Some(sol) = mat.solve(&coordinates(&dh, order)) else {
        return Ok(None);
    };
    let mut l = one;
    for (x, &a) in basis.iter().zip(&sol.particular) {
        if a != 0 {
            l = l.add(&x.scale(&LaurentSeries::monomial(&ctx, FieldElem::from_int(&ctx, a as i64), 0)))?;
        }
    }
    Ok(Some(LevelSolution {
        l: l.truncate(Some(order + 1)),
        unknowns,
        equations,
        kernel_dim: sol.kernel.len(),
    }))
}

/// Finds l ∈ K_d with b·h = l⁻¹·b·σ(l) below ε^order, for b a fundamental
/// alcove and h ≡ 1 mod ε^{d+c}. The Levi part of the equation is of Lang
/// type, so l may only exist over an extension: the field of b is enlarged by
/// factors of p until the system is solvable or the degree exceeds
/// `max_degree` (over F_p).
pub fn perturbation_witness(
    b: &ConstMatrix,
    h: &ConstMatrix,
    d: i64,
    c: i64,
    order: i64,
    max_degree: usize,
) -> Result<PerturbationOutcome> {
    let ctx = b.ctx().clone();
    let n = b.size();
    if d < 1 || c < 0 {
        return Err(Error::invalid(format!("need d ≥ 1 and c ≥ 0, got d = {d}, c = {c}")));
    }
    if order <= d {
        return Err(Error::invalid(format!("ε-order {order} must exceed d = {d}")));
    }
    let nu = newton_point(b)?;
    if fundamental_alcove(&ctx, &nu) != *b {
        return Err(Error::invalid(format!(
            "b is not the fundamental alcove of its Newton point {nu}"
        )));
    }
    let one = ConstMatrix::identity(&ctx, n);
    let dh = h.sub(&one)?;
    if (0..n).any(|i| (0..n).any(|j| dh.get(i, j).val_lower_bound().map_or(false, |v| v < d + c))) {
        return Err(Error::invalid(format!("h is not congruent to 1 modulo ε^{}", d + c)));
    }

    let mut checks = Vec::new();
    let mut tried = Vec::new();
    let mut found = None;
    let mut m = ctx.m();
    while ctx.e() as usize * m as usize <= max_degree.max(ctx.degree()) {
        let big = if m == ctx.m() { ctx.clone() } else { FieldCtx::new(ctx.p(), ctx.e(), m)? };
        let image = embedding(&ctx, &big)?;
        let (bb, hh) = (embed_matrix(b, &big, &image), embed_matrix(h, &big, &image));
        tried.push(big.size().map_or_else(|| format!("{}^{}", big.p(), big.degree()), |s| s.to_string()));
        if let Some(sol) = solve_levels(&bb, &hh, d, order)? {
            found = Some((big, bb, hh, sol));
            break;
        }
        m *= ctx.p() as u32;
    }
    let fields = tried.iter().map(|s| format!("F_{s}")).collect::<Vec<_>>().join(", ");
    let (solved_over, l_json, unknowns, equations, kernel_dim) = match found {
        None => {
            checks.push(check(
                "level system solvable",
                false,
                format!(
                    "no l ≡ 1 mod ε^{d} solves the system below ε^{order} over {fields}; \
                     a field of degree above {max_degree} over F_p is needed"
                ),
            ));
            (None, None, 0, 0, 0)
        }
        Some((big, bb, hh, sol)) => {
            checks.push(check(
                "level system solvable",
                true,
                format!(
                    "solved over F_{} (tried {fields}); solution space of F_p-dimension {}",
                    tried.last().unwrap(),
                    sol.kernel_dim
                ),
            ));
            let l = &sol.l;
            let residual = l.mul(&bb.mul(&hh)?)?.sub(&bb.mul(&l.sigma_twist(1))?)?.truncate(Some(order));
            checks.push(check(
                "l·b·h = b·σ(l)",
                residual.vanishes_below(order),
                format!("residual compared below ε^{order}"),
            ));
            let one = ConstMatrix::identity(&big, n);
            let in_kd = (0..n).all(|i| {
                (0..n).all(|j| {
                    let e = l.get(i, j).sub(one.get(i, j));
                    e.is_exact_zero() || e.val_lower_bound().map_or(false, |v| v >= d)
                })
            });
            checks.push(check("l ∈ K_d", in_kd, format!("l ≡ 1 mod ε^{d}")));
            (Some(big.desc()), Some(l.to_json()?), sol.unknowns, sol.equations, sol.kernel_dim)
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(PerturbationOutcome {
        schema_version: SCHEMA_VERSION,
        field: ctx.desc(),
        solved_over,
        d,
        c,
        order,
        b: b.to_json()?,
        h: h.to_json()?,
        l: l_json,
        unknowns,
        equations,
        kernel_dim,
        checks,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_matrix::ConstMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_perturbation_gives_identity() {
        let ctx = FieldCtx::new(2, 1, 2).unwrap();
        let b = b2(&ctx);
        let out = perturbation_witness(&b, &ConstMatrix::identity(&ctx, 5), 1, 2, 6, 8).unwrap();
        assert!(out.pass, "{}", out.to_text());
        let l = ConstMatrix::from_json(out.l.as_ref().unwrap()).unwrap();
        assert_eq!(l, ConstMatrix::identity(&ctx, 5).truncate(Some(7)));
    }

    #[test]
    fn random_perturbations_of_b2() {
        let ctx = FieldCtx::new(2, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..3 {
            let h = random_k_perturbation(&ctx, 5, 3, 6, &mut rng);
            let out = perturbation_witness(&b2(&ctx), &h, 1, 2, 6, 8).unwrap();
            assert!(out.pass, "{}", out.to_text());
        }
    }

    #[test]
    fn diagonal_cocharacter_is_rejected() {
        let ctx = FieldCtx::new(2, 1, 1).unwrap();
        let b = ConstMatrix::eps_power(&ctx, &[1, 1, 0, 0, 0]);
        let h = ConstMatrix::identity(&ctx, 5);
        assert!(matches!(perturbation_witness(&b, &h, 1, 2, 5, 1), Err(Error::InvalidInput(_))));
    }
}
