//! Finite fields F_{q^M} with q = p^e, realized as F_p[x]/(f) with deg f = e·M.
//!
//! The q-power Frobenius is precomputed as F_p-linear maps, one per power
//! 0..M, so `frobenius` is a matrix-vector product. Root extraction goes
//! through a primitive element and Pohlig–Hellman discrete logarithms, which
//! restricts it to fields whose multiplicative group order factors by trial
//! division (comfortably all fields used here).

mod linalg;
pub(crate) mod poly;

pub use linalg::{AffineSolution, FpMatrix};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest multiplicative group order for which roots and logs are supported.
const MAX_GROUP_ORDER: u128 = 1 << 62;

/// Known irreducible polynomials over F_2, lowest degree first.
const F2_MODULI: &[&[u64]] = &[
    &[0, 1],
    &[1, 1, 1],
    &[1, 1, 0, 1],
    &[1, 1, 0, 0, 1],
    &[1, 0, 1, 0, 0, 1],
    &[1, 1, 0, 0, 0, 0, 1],
    &[1, 1, 0, 0, 0, 0, 0, 1],
    &[1, 0, 1, 1, 1, 0, 0, 0, 1],
];

/// The ambient field F_{q^M}. Immutable once built; share it through `Arc`.
pub struct FieldCtx {
    p: u64,
    e: u32,
    m: u32,
    modulus: Vec<u64>,
    /// `frob[k][j]` is the coefficient vector of σ^k(x^j).
    frob: Vec<Vec<Vec<u64>>>,
    group: OnceLock<std::result::Result<GroupData, Error>>,
}

struct GroupData {
    order: u128,
    factors: Vec<(u128, u32)>,
    generator: Vec<u64>,
}

/// Serializable description of a [`FieldCtx`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCtxDesc {
    pub p: u64,
    pub e: u32,
    pub m: u32,
    pub modulus: Vec<u64>,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Splits a prime power q into (p, e).
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut e = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

impl FieldCtx {
    /// Builds F_{q^M} for q = p^e, choosing the modulus from the built-in
    /// table or, failing that, the lexicographically first monic irreducible.
    pub fn new(p: u64, e: u32, m: u32) -> Result<Arc<FieldCtx>> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(Error::invalid(format!("p = {p} is not a supported prime")));
        }
        if e == 0 || m == 0 {
            return Err(Error::invalid("extension degrees must be positive"));
        }
        let d = (e * m) as usize;
        let modulus = if p == 2 && d <= F2_MODULI.len() {
            F2_MODULI[d - 1].to_vec()
        } else {
            search_irreducible(p, d)
        };
        Self::with_modulus(p, e, m, modulus)
    }

    /// F_{q^M} for q given as a prime power.
    pub fn for_q(q: u64, m: u32) -> Result<Arc<FieldCtx>> {
        let (p, e) =
            prime_power(q).ok_or_else(|| Error::invalid(format!("q = {q} is not a prime power")))?;
        Self::new(p, e, m)
    }

    pub fn with_modulus(p: u64, e: u32, m: u32, modulus: Vec<u64>) -> Result<Arc<FieldCtx>> {
        let d = (e * m) as usize;
        if modulus.len() != d + 1 || modulus[d] != 1 {
            return Err(Error::invalid("modulus must be monic of degree e*M"));
        }
        if !poly::is_irreducible(&modulus, p) {
            return Err(Error::invalid("modulus is not irreducible over F_p"));
        }
        let q = p.pow(e) as u128;
        let mut frob = Vec::with_capacity(m as usize);
        let mut images: Vec<Vec<u64>> = (0..d)
            .map(|j| {
                let mut v = vec![0; d];
                v[j] = 1;
                v
            })
            .collect();
        for _ in 0..m {
            frob.push(images.clone());
            images = images
                .iter()
                .map(|v| pad(poly::powmod(v, q, &modulus, p), d))
                .collect();
        }
        Ok(Arc::new(FieldCtx {
            p,
            e,
            m,
            modulus,
            frob,
            group: OnceLock::new(),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Ambient degree M over F_q.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// Degree e·M over F_p.
    pub fn degree(&self) -> usize {
        (self.e * self.m) as usize
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn desc(&self) -> FieldCtxDesc {
        FieldCtxDesc {
            p: self.p,
            e: self.e,
            m: self.m,
            modulus: self.modulus.clone(),
        }
    }

    pub fn from_desc(desc: &FieldCtxDesc) -> Result<Arc<FieldCtx>> {
        Self::with_modulus(desc.p, desc.e, desc.m, desc.modulus.clone())
    }

    /// Number of elements q^M, if it fits.
    pub fn size(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.degree() as u32)
    }

    fn group(&self) -> Result<&GroupData> {
        self.group
            .get_or_init(|| self.build_group())
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_group(&self) -> std::result::Result<GroupData, Error> {
        let order = self
            .size()
            .map(|s| s - 1)
            .filter(|&n| n < MAX_GROUP_ORDER)
            .ok_or_else(|| Error::Unsupported("multiplicative group too large".into()))?;
        let factors = factor(order);
        let d = self.degree();
        let mut counter: u128 = 1;
        loop {
            let cand = int_to_coeffs(counter, self.p, d);
            counter += 1;
            let is_gen = factors.iter().all(|&(r, _)| {
                let v = poly::powmod(&cand, order / r, &self.modulus, self.p);
                v != [1]
            });
            if is_gen {
                return Ok(GroupData {
                    order,
                    factors,
                    generator: cand,
                });
            }
        }
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_({}^{})^{}", self.p, self.e, self.m)
    }
}

fn pad(mut v: Vec<u64>, d: usize) -> Vec<u64> {
    v.resize(d, 0);
    v
}

fn int_to_coeffs(mut n: u128, p: u64, d: usize) -> Vec<u64> {
    let mut out = vec![0; d];
    for c in out.iter_mut() {
        *c = (n % p as u128) as u64;
        n /= p as u128;
    }
    out
}

fn search_irreducible(p: u64, d: usize) -> Vec<u64> {
    let mut counter: u128 = 0;
    loop {
        let mut cand = int_to_coeffs(counter, p, d);
        cand.push(1);
        counter += 1;
        if poly::is_irreducible(&cand, p) {
            return cand;
        }
    }
}

fn factor(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mod_inverse(a: u128, m: u128) -> u128 {
    let (a, m) = (a as i128, m as i128);
    let ext = a.extended_gcd(&m);
    debug_assert_eq!(ext.gcd, 1);
    ext.x.rem_euclid(m) as u128
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    // operands stay below 2^62, so the product fits in u128
    (a % m) * (b % m) % m
}

/// Element of F_{q^M}: coefficient vector over F_p in the power basis.
#[derive(Clone)]
pub struct FieldElem {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<u64>,
}

/// Outcome of [`FieldElem::nth_root`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Root {
    Found(FieldElem),
    /// No root in F_{q^M}; the smallest ambient degree that contains one.
    NeedsExtension { degree: u32 },
}

impl FieldElem {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        FieldElem {
            ctx: ctx.clone(),
            coeffs: vec![0; ctx.degree()],
        }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<FieldCtx>, n: i64) -> Self {
        let mut out = Self::zero(ctx);
        out.coeffs[0] = n.rem_euclid(ctx.p as i64) as u64;
        out
    }

    /// The class of x in F_p[x]/(f).
    pub fn generator(ctx: &Arc<FieldCtx>) -> Self {
        let v = poly::rem(&[0, 1], &ctx.modulus, ctx.p);
        Self::from_coeffs(ctx, v)
    }

    pub fn from_coeffs(ctx: &Arc<FieldCtx>, coeffs: Vec<u64>) -> Self {
        let red = poly::rem(&coeffs.iter().map(|c| c % ctx.p).collect::<Vec<_>>(), &ctx.modulus, ctx.p);
        FieldElem {
            ctx: ctx.clone(),
            coeffs: pad(red, ctx.degree()),
        }
    }

    pub fn random<R: Rng + ?Sized>(ctx: &Arc<FieldCtx>, rng: &mut R) -> Self {
        let coeffs = (0..ctx.degree()).map(|_| rng.gen_range(0..ctx.p)).collect();
        FieldElem {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    /// Every element, in increasing lexicographic order of coefficient vectors.
    pub fn all(ctx: &Arc<FieldCtx>) -> Vec<FieldElem> {
        let size = ctx.size().expect("field too large to enumerate");
        let d = ctx.degree();
        let mut out: Vec<FieldElem> = (0..size)
            .map(|n| FieldElem {
                ctx: ctx.clone(),
                coeffs: int_to_coeffs(n, ctx.p, d),
            })
            .collect();
        out.sort();
        out
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn same(&self, coeffs: Vec<u64>) -> Self {
        FieldElem {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn pow(&self, exp: u128) -> Self {
        let v = poly::powmod(&self.coeffs, exp, &self.ctx.modulus, self.ctx.p);
        self.same(pad(v, self.ctx.degree()))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let v = poly::inv_mod(&self.coeffs, &self.ctx.modulus, self.ctx.p)?;
        Some(self.same(pad(v, self.ctx.degree())))
    }

    /// σ^k(x) = x^(q^k). Negative k is the inverse Frobenius; σ^M is the identity.
    pub fn frobenius(&self, k: i64) -> Self {
        let m = self.ctx.m as i64;
        let k = k.rem_euclid(m) as usize;
        if k == 0 {
            return self.clone();
        }
        let p = self.ctx.p;
        let d = self.ctx.degree();
        let mut out = vec![0u64; d];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &img) in out.iter_mut().zip(&self.ctx.frob[k][j]) {
                *o = (*o + c * img) % p;
            }
        }
        self.same(out)
    }

    /// Discrete logarithm with respect to the context's primitive element.
    fn dlog(&self) -> Result<u128> {
        let group = self.ctx.group()?;
        let g = self.same(group.generator.clone());
        let n = group.order;
        let mut residues = Vec::new();
        for &(r, k) in &group.factors {
            let rk = r.pow(k);
            let gamma = g.pow(n / r);
            let mut x: u128 = 0;
            let g_inv = g.inv().expect("generator is nonzero");
            for j in 0..k {
                let shifted = self * &g_inv.pow(x);
                let h = shifted.pow(n / r.pow(j + 1));
                let digit = bsgs(&gamma, &h, r)?;
                x += digit * r.pow(j);
            }
            residues.push((x, rk));
        }
        // CRT
        let mut acc: u128 = 0;
        let mut modulus: u128 = 1;
        for (x, m) in residues {
            let t = mul_mod_u128((x + m - acc % m) % m, mod_inverse(modulus % m, m), m);
            acc += modulus * t;
            modulus *= m;
        }
        Ok(acc % n)
    }

    /// Some y with y^n = self, the lexicographically smallest such y.
    /// When no root lies in F_{q^M}, reports the minimal ambient degree M' (a
    /// multiple of M) over F_q whose field contains one.
    pub fn nth_root(&self, n: u64) -> Result<Root> {
        if n == 0 {
            return Err(Error::invalid("root index must be positive"));
        }
        if self.is_zero() {
            return Ok(Root::Found(self.clone()));
        }
        let group = self.ctx.group()?;
        let order = group.order;
        let a = self.dlog()?;
        let d = (n as u128).gcd(&order);
        if a % d != 0 {
            return self.extension_for_root(n, a).map(|degree| Root::NeedsExtension { degree });
        }
        let sub = order / d;
        let b0 = if sub == 1 {
            0
        } else {
            mul_mod_u128(a / d, mod_inverse((n as u128 / d) % sub, sub), sub)
        };
        if d > 1 << 24 {
            return Err(Error::Unsupported(format!("{d} candidate roots to rank")));
        }
        let g = self.same(group.generator.clone());
        let zeta = g.pow(sub);
        let mut cur = g.pow(b0);
        let mut best = cur.clone();
        for _ in 1..d {
            cur = &cur * &zeta;
            if cur < best {
                best = cur.clone();
            }
        }
        debug_assert!(best.pow(n as u128) == *self);
        Ok(Root::Found(best))
    }

    fn extension_for_root(&self, n: u64, log: u128) -> Result<u32> {
        let group = self.ctx.group()?;
        let elem_order = group.order / log.gcd(&group.order);
        let p = self.ctx.p as u128;
        let d0 = self.ctx.degree() as u32;
        for k in 2..=64u32 {
            let big = p
                .checked_pow(d0 * k)
                .map(|s| s - 1)
                .ok_or_else(|| Error::Unsupported("root needs an extension beyond 2^128".into()))?;
            let g = (n as u128).gcd(&big);
            if (big / g) % elem_order == 0 {
                return Ok(self.ctx.m * k);
            }
        }
        Err(Error::Unsupported("no root in extensions of degree up to 64".into()))
    }

    /// Hex encoding: each F_p coefficient in a fixed-width hex field, lowest
    /// degree first.
    pub fn to_hex(&self) -> String {
        let width = hex_width(self.ctx.p);
        self.coeffs
            .iter()
            .map(|c| format!("{c:0width$x}"))
            .collect()
    }

    pub fn from_hex(ctx: &Arc<FieldCtx>, s: &str) -> Result<Self> {
        let width = hex_width(ctx.p);
        if s.len() != width * ctx.degree() || !s.is_ascii() {
            return Err(Error::invalid(format!("bad field element encoding {s:?}")));
        }
        let coeffs = (0..ctx.degree())
            .map(|i| {
                u64::from_str_radix(&s[i * width..(i + 1) * width], 16)
                    .ok()
                    .filter(|&c| c < ctx.p)
                    .ok_or_else(|| Error::invalid(format!("bad coefficient in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldElem {
            ctx: ctx.clone(),
            coeffs,
        })
    }
}

fn hex_width(p: u64) -> usize {
    format!("{:x}", p - 1).len()
}

/// Baby-step giant-step in the cyclic subgroup of prime order `r` generated by `gamma`.
fn bsgs(gamma: &FieldElem, h: &FieldElem, r: u128) -> Result<u128> {
    let m = (r as f64).sqrt().ceil() as u128 + 1;
    let mut table: HashMap<Vec<u64>, u128> = HashMap::with_capacity(m as usize);
    let mut cur = FieldElem::one(gamma.ctx());
    for j in 0..m {
        table.entry(cur.coeffs.clone()).or_insert(j);
        cur = &cur * gamma;
    }
    let giant = gamma.pow((r - m % r) % r);
    let mut y = h.clone();
    for i in 0..m {
        if let Some(&j) = table.get(&y.coeffs) {
            return Ok((i * m + j) % r);
        }
        y = &y * &giant;
    }
    Err(Error::Unsupported("discrete logarithm not found".into()))
}

/// All x in F_{q^M} with Σ c_j·x^(q^k_j) = rhs, sorted lexicographically.
pub fn solve_q_linearized(coeffs: &[(FieldElem, u32)], rhs: &FieldElem) -> Result<Vec<FieldElem>> {
    let sol = q_linearized_affine(coeffs, rhs)?;
    let Some(sol) = sol else {
        return Ok(Vec::new());
    };
    let ctx = rhs.ctx();
    let p = ctx.p;
    let dim = sol.kernel.len() as u32;
    let count = (p as u128)
        .checked_pow(dim)
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::Unsupported("solution set too large to enumerate".into()))?;
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut v = sol.particular.clone();
        let mut k = idx;
        for basis in &sol.kernel {
            let c = (k % p as u128) as u64;
            k /= p as u128;
            for (x, b) in v.iter_mut().zip(basis) {
                *x = (*x + c * b) % p;
            }
        }
        out.push(FieldElem {
            ctx: ctx.clone(),
            coeffs: v,
        });
    }
    out.sort();
    Ok(out)
}

/// The F_p-affine solution space of Σ c_j·x^(q^k_j) = rhs, or `None` if empty.
pub fn q_linearized_affine(
    coeffs: &[(FieldElem, u32)],
    rhs: &FieldElem,
) -> Result<Option<AffineSolution>> {
    if coeffs.iter().all(|(c, _)| c.is_zero()) {
        return Err(Error::invalid("q-linearized equation with all-zero coefficients"));
    }
    let ctx = rhs.ctx();
    let d = ctx.degree();
    let mut mat = FpMatrix::zeros(ctx.p, d, d);
    for j in 0..d {
        let mut basis = vec![0; d];
        basis[j] = 1;
        let x = FieldElem {
            ctx: ctx.clone(),
            coeffs: basis,
        };
        let image = coeffs
            .iter()
            .fold(FieldElem::zero(ctx), |acc, (c, k)| acc + c * &x.frobenius(*k as i64));
        mat.set_col(j, &image.coeffs);
    }
    Ok(mat.solve(&rhs.coeffs))
}

/// Image of the generator `a` of `small` inside `big`, a field over the same
/// F_p whose degree is a multiple of `small`'s.
pub fn embedding(small: &Arc<FieldCtx>, big: &Arc<FieldCtx>) -> Result<FieldElem> {
    let (d, big_d) = (small.degree(), big.degree());
    if small.p != big.p || d == 0 || big_d % d != 0 {
        return Err(Error::invalid("fields are not nested"));
    }
    let f = |x: &FieldElem| {
        small
            .modulus
            .iter()
            .rev()
            .fold(FieldElem::zero(big), |acc, &c| &acc * x + FieldElem::from_int(big, c as i64))
    };
    if d == 1 {
        let root = -FieldElem::from_int(big, small.modulus[0] as i64);
        return Ok(root);
    }
    let group = big.group()?;
    let sub_order = (small.p as u128).pow(d as u32) - 1;
    let gen = FieldElem {
        ctx: big.clone(),
        coeffs: group.generator.clone(),
    };
    let h = gen.pow(group.order / sub_order);
    let mut x = h.clone();
    for _ in 0..sub_order {
        if f(&x).is_zero() {
            return Ok(x);
        }
        x = &x * &h;
    }
    Err(Error::Unsupported("modulus has no root in the larger field".into()))
}

impl FieldElem {
    /// The image of `self` under the embedding sending `a` to `image`.
    pub fn embed(&self, image: &FieldElem) -> FieldElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElem::zero(image.ctx()), |acc, &c| {
                &acc * image + FieldElem::from_int(image.ctx(), c as i64)
            })
    }
}

/// Smallest degree M' (a multiple of M) over F_q such that the q-linearized
/// equation has a solution in F_{q^M'}.
pub fn q_linearized_extension_degree(coeffs: &[(FieldElem, u32)], rhs: &FieldElem) -> Result<u32> {
    let ctx = rhs.ctx();
    for k in 1..=8u32 {
        let big = FieldCtx::new(ctx.p, ctx.e, ctx.m * k)?;
        let image = embedding(ctx, &big)?;
        let lifted: Vec<_> = coeffs.iter().map(|(c, j)| (c.embed(&image), *j)).collect();
        if q_linearized_affine(&lifted, &rhs.embed(&image))?.is_some() {
            return Ok(ctx.m * k);
        }
    }
    Err(Error::Unsupported(
        "q-linearized equation unsolvable in extensions of degree up to 8".into(),
    ))
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && (Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx)
    }
}

impl Eq for FieldElem {}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.cmp(&other.coeffs)
    }
}

impl std::hash::Hash for FieldElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElem {
    /// Polynomial in the generator `a`, e.g. `a^2+1`; `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "a".to_string(),
                _ => format!("a^{i}"),
            };
            parts.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (_, false) => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        let p = self.ctx.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| (a + b) % p)
            .collect();
        self.same(coeffs)
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        let p = self.ctx.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| (a + p - b) % p)
            .collect();
        self.same(coeffs)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        if self.is_zero() || rhs.is_zero() {
            return FieldElem::zero(&self.ctx);
        }
        let v = poly::mulmod(&self.coeffs, &rhs.coeffs, &self.ctx.modulus, self.ctx.p);
        self.same(pad(v, self.ctx.degree()))
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let p = self.ctx.p;
        self.same(self.coeffs.iter().map(|&a| (p - a) % p).collect())
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $f(self, rhs: FieldElem) -> FieldElem {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $f(self, rhs: &FieldElem) -> FieldElem {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
