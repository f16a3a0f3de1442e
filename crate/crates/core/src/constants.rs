//! The effective constants of the Shafarevich bound and the bound itself.
//!
//! Quantities are evaluated as [`Magnitude`]s: exact while they fit under the
//! context's exactness threshold, tower enclosures beyond it. Every step is
//! recorded in the [`Trace`] of the [`DerivedConstants`] it belongs to.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::magnitude::{Comparison, Context, Interval, Magnitude, MagnitudeError};
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstantsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Magnitude(#[from] MagnitudeError),
}

pub type Result<T> = std::result::Result<T, ConstantsError>;

/// Decimal-string serde for big integers.
pub(crate) mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Fiber genus `g`, base genus `q` and number of degenerate fibers `s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyParams {
    #[serde(with = "biguint_str")]
    pub g: BigUint,
    #[serde(with = "biguint_str")]
    pub q: BigUint,
    #[serde(with = "biguint_str")]
    pub s: BigUint,
}

impl FamilyParams {
    pub fn new(g: u64, q: u64, s: u64) -> FamilyParams {
        FamilyParams { g: g.into(), q: q.into(), s: s.into() }
    }

    /// `gq + s`.
    pub fn gqs(&self) -> BigUint {
        &self.g * &self.q + &self.s
    }

    pub fn check_fiber_genus(&self) -> Result<()> {
        if self.g < BigUint::from(2u32) {
            return Err(ConstantsError::InvalidParams(format!("fiber genus must satisfy g >= 2 (got g = {})", self.g)));
        }
        Ok(())
    }

    pub fn check_main(&self) -> Result<()> {
        self.check_fiber_genus()?;
        if self.q < BigUint::from(2u32) {
            return Err(ConstantsError::InvalidParams(format!(
                "base genus must satisfy q >= 2 (got q = {}); q in {{0, 1}} uses the low-genus branch",
                self.q
            )));
        }
        Ok(())
    }
}

/// Intermediate constants of the bound. `Q`, `D` and `A` are filled in by
/// their own operations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub params: FamilyParams,
    pub m: Magnitude,
    pub d: Magnitude,
    pub l: Magnitude,
    #[serde(rename = "M")]
    pub big_m: Magnitude,
    pub delta0: Magnitude,
    #[serde(rename = "N")]
    pub big_n: Magnitude,
    /// `gq + s`, kept separately so toy runs can inject it.
    pub gqs: Magnitude,
    #[serde(rename = "Q")]
    pub big_q: Option<Magnitude>,
    #[serde(rename = "D")]
    pub big_d: Option<Magnitude>,
    #[serde(rename = "A")]
    pub big_a: Option<Magnitude>,
    /// Values were injected by hand rather than derived from `params`.
    pub injected: bool,
    pub trace: Trace,
}

impl DerivedConstants {
    /// All-ones constants for injecting small values by hand.
    pub fn toy(params: FamilyParams) -> DerivedConstants {
        let one = Magnitude::one();
        let mut trace = Trace::default();
        trace.note("toy mode: constants injected by hand");
        DerivedConstants {
            params,
            m: one.clone(),
            d: one.clone(),
            l: one.clone(),
            big_m: one.clone(),
            delta0: one.clone(),
            big_n: one.clone(),
            gqs: one,
            big_q: None,
            big_d: None,
            big_a: None,
            injected: true,
            trace,
        }
    }

    fn require(field: &Option<Magnitude>, name: &str) -> Result<Magnitude> {
        field.clone().ok_or_else(|| ConstantsError::InvalidParams(format!("{name} has not been computed")))
    }
}

pub mod cite {
    pub const M_SMALL: &str = "m = 1250(gq+s)";
    pub const D_SMALL: &str = "d = 5(2g-2)";
    pub const L: &str = "l = 4m-3";
    pub const M: &str = "M = C(l+m, m) - 1";
    pub const DELTA0: &str = "delta0 = l*d";
    pub const N: &str = "N = (ld)^2 + 1";
    pub const BINOM_LD: &str = "C(ld+2, 2)";
    pub const Q: &str = "Q = ld*M*C(4ld+M, M)";
    pub const Q_EXPANDED: &str = "Q = l*5(2g-2)*(C(5m-3, m)-1)*C(4l*5(2g-2)+C(5m-3, m)-1, C(5m-3, m)-1)";
    pub const D: &str = "D = (C(ld+2, 2)-1)*l^2*d*500*N*(gq+s)";
    pub const A: &str = "A = C(ld+2, 2)^Q";
    pub const GRAPH: &str = "6(q-1) + Q*D";
    pub const AMBIENT: &str = "n = 5(q-1)A - 1";
    pub const CHOW: &str = "C((n+1)max{d1,d2}, n)^((n+1)(d2*C(d2+k-1, k) + C(d2+k-1, k-1)))";
    pub const BOUND: &str = "G*C(5(q-1)A*G, 5(q-1)A-1)^(5(q-1)A(G^2+1)), G = 6(q-1)+Q*D";
    pub const BOUND_ASSEMBLED: &str = "G * chow_components(5(q-1)A-1, Q, G, 1)";
    pub const S: &str = "S(g) = 42(g-1)((1/2)(2sqrt(6)(g-1)+1)^(2+2g^2) g^2(g-1) sqrt(2)^(g(g-1)) + 1)";
    pub const LOW_GENUS: &str = "S(g) * bound(g, 2, 2s)";
    pub const KOLLAR_EXP: &str = "(m+1)l^2d - m";
    pub const KOLLAR_RANK: &str = "C((m+1)l^2d, m)";
    pub const KOLLAR_EQ: &str = "max{Q, C((m+1)l^2d, m)}";
    pub const Q_PRIME: &str = "q' <= 100N^2(gq+s)";
    pub const TAU: &str = "deg tau <= 200N^2(gq+s)";
    pub const CANONICAL: &str = "sigma(s'_i(B')).K_X <= 100N(gq+s)";
    pub const SECTION: &str = "deg phi_|5K_X|(sigma(s'_i(B'))) <= 500N(gq+s)";
}

fn ex(n: u64) -> Magnitude {
    Magnitude::from_u64(n)
}

fn big(n: &BigUint) -> Magnitude {
    Magnitude::Exact(n.clone())
}

/// Product of several magnitudes.
fn product(ctx: &Context, factors: &[&Magnitude]) -> Result<Magnitude> {
    let mut acc = Magnitude::one();
    for f in factors {
        acc = ctx.multiply(&acc, f)?;
    }
    Ok(acc)
}

fn same_value(ctx: &Context, a: &Magnitude, b: &Magnitude) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        ctx.overlaps(a, b)
    }
}

/// `m, d, l, M, delta0, N` for the given parameters.
pub fn derive_base(ctx: &Context, p: &FamilyParams) -> Result<DerivedConstants> {
    p.check_main()?;
    let gqs = p.gqs();
    let m = BigUint::from(1250u32) * &gqs;
    let d = BigUint::from(5u32) * (BigUint::from(2u32) * &p.g - 2u32);
    let l = BigUint::from(4u32) * &m - 3u32;
    let binom = ctx.binomial(&big(&(&l + &m)), &big(&m))?;
    let big_m = ctx.sub_small(&binom, &BigUint::one())?;
    let delta0 = &l * &d;
    let big_n = &delta0 * &delta0 + 1u32;
    let mut trace = Trace::default();
    trace.record("m", cite::M_SMALL, &big(&m));
    trace.record("d", cite::D_SMALL, &big(&d));
    trace.record("l", cite::L, &big(&l));
    trace.record("M", cite::M, &big_m);
    trace.record("delta0", cite::DELTA0, &big(&delta0));
    trace.record("N", cite::N, &big(&big_n));
    Ok(DerivedConstants {
        params: p.clone(),
        m: big(&m),
        d: big(&d),
        l: big(&l),
        big_m,
        delta0: big(&delta0),
        big_n: big(&big_n),
        gqs: big(&gqs),
        big_q: None,
        big_d: None,
        big_a: None,
        injected: false,
        trace,
    })
}

/// `C(n + k, k)` with the lower index taken as the one known to be small.
fn binomial_sum(ctx: &Context, small: &Magnitude, large: &Magnitude) -> Result<Magnitude> {
    let n = ctx.add(small, large)?;
    Ok(ctx.binomial(&n, small)?)
}

/// `Q = ld M C(4ld + M, M)`, cross-checked against the expanded form in
/// which `M` is rebuilt from `m` as `C(5m-3, m) - 1`.
pub fn compute_q(ctx: &Context, c: &mut DerivedConstants) -> Result<Magnitude> {
    let four_ld = ctx.multiply(&ex(4), &c.delta0)?;
    let binom = binomial_sum(ctx, &four_ld, &c.big_m)?;
    let q = product(ctx, &[&c.delta0, &c.big_m, &binom])?;

    // expanded form, evaluated independently at higher precision
    let wide = Context { precision_digits: ctx.precision_digits + 10, ..*ctx };
    let m_alt = if c.injected {
        c.big_m.clone()
    } else {
        let five_m = ctx.sub_small(&ctx.multiply(&ex(5), &c.m)?, &BigUint::from(3u32))?;
        wide.sub_small(&wide.binomial(&five_m, &c.m)?, &BigUint::one())?
    };
    let ld = wide.multiply(&c.l, &c.d)?;
    let top = wide.add(&wide.multiply(&ex(4), &ld)?, &m_alt)?;
    let four_ld_alt = wide.multiply(&ex(4), &ld)?;
    let binom_alt = match wide.binomial(&top, &m_alt) {
        Ok(b) => b,
        Err(MagnitudeError::IndeterminateOrder) => {
            c.trace.note("expanded Q: lower index M not certifiably below 4ld+M; evaluated as C(4ld+M, 4ld)");
            wide.binomial(&top, &four_ld_alt)?
        }
        Err(e) => return Err(e.into()),
    };
    let q_alt = product(&wide, &[&ld, &m_alt, &binom_alt])?;

    c.trace.record("C(4ld+M, M)", "C(4ld+M, M)", &binom);
    c.trace.record("Q", cite::Q, &q);
    c.trace.record("Q (expanded form)", cite::Q_EXPANDED, &q_alt);
    let agree = same_value(ctx, &q, &q_alt);
    c.trace.check("Q forms agree", agree, format!("{q} vs {q_alt}"));
    c.big_q = Some(q.clone());
    Ok(q)
}

/// `D = (C(ld+2, 2) - 1) l^2 d 500 N (gq+s)`, optionally times an extra
/// factor `k` for sensitivity runs.
pub fn compute_d(ctx: &Context, c: &mut DerivedConstants, k: Option<&BigUint>) -> Result<Magnitude> {
    let b = binomial_ld(ctx, c)?;
    let b1 = ctx.sub_small(&b, &BigUint::one())?;
    let l2 = ctx.multiply(&c.l, &c.l)?;
    let mut dd = product(ctx, &[&b1, &l2, &c.d, &ex(500), &c.big_n, &c.gqs])?;
    match k {
        Some(k) => {
            dd = ctx.multiply(&dd, &big(k))?;
            c.trace.note(format!("D includes the extra factor k = {k}"));
        }
        None => c.trace.note("D is evaluated without the trailing factor k (taken as 1)"),
    }
    c.trace.record("D", cite::D, &dd);
    c.big_d = Some(dd.clone());
    Ok(dd)
}

fn binomial_ld(ctx: &Context, c: &mut DerivedConstants) -> Result<Magnitude> {
    let top = ctx.add(&c.delta0, &ex(2))?;
    let b = ctx.binomial(&top, &ex(2))?;
    if c.trace.get("C(ld+2,2)").is_none() {
        c.trace.record("C(ld+2,2)", cite::BINOM_LD, &b);
    }
    Ok(b)
}

/// `A = C(ld+2, 2)^Q`.
pub fn compute_a(ctx: &Context, c: &mut DerivedConstants) -> Result<Magnitude> {
    let q = DerivedConstants::require(&c.big_q, "Q")?;
    let b = binomial_ld(ctx, c)?;
    let a = ctx.power(&b, &q)?;
    c.trace.record("A", cite::A, &a);
    c.big_a = Some(a.clone());
    Ok(a)
}

/// All of `m, d, l, M, delta0, N, Q, D, A`.
pub fn derive_all(ctx: &Context, p: &FamilyParams) -> Result<DerivedConstants> {
    let mut c = derive_base(ctx, p)?;
    compute_q(ctx, &mut c)?;
    compute_d(ctx, &mut c, None)?;
    compute_a(ctx, &mut c)?;
    Ok(c)
}

fn q_minus_one(c: &DerivedConstants) -> Result<BigUint> {
    if c.params.q.is_zero() {
        return Err(ConstantsError::InvalidParams("q >= 1 required".into()));
    }
    Ok(&c.params.q - 1u32)
}

/// Degree bound `6(q-1) + Q D` for the graph of a moduli map.
pub fn graph_degree_bound(ctx: &Context, c: &mut DerivedConstants) -> Result<Magnitude> {
    let q = DerivedConstants::require(&c.big_q, "Q")?;
    let d = DerivedConstants::require(&c.big_d, "D")?;
    let six = big(&(BigUint::from(6u32) * q_minus_one(c)?));
    let g = ctx.add(&six, &ctx.multiply(&q, &d)?)?;
    c.trace.record("graph degree bound", cite::GRAPH, &g);
    Ok(g)
}

/// `(n+1)(d2 C(d2+k-1, k) + C(d2+k-1, k-1))`.
pub fn chow_exponent(ctx: &Context, n: &Magnitude, delta2: &Magnitude, k: u64) -> Result<Magnitude> {
    if k == 0 {
        return Err(ConstantsError::InvalidParams("cycle dimension k must be at least 1".into()));
    }
    let top = ctx.add(delta2, &ex(k - 1))?;
    let c1 = ctx.binomial(&top, &ex(k))?;
    let c0 = ctx.binomial(&top, &ex(k - 1))?;
    let inner = ctx.add(&ctx.multiply(delta2, &c1)?, &c0)?;
    Ok(ctx.multiply(&ctx.add(n, &Magnitude::one())?, &inner)?)
}

/// Bound on the number of components of the Chow variety of `k`-cycles of
/// degree `delta2` on a variety in `P^n` cut out in degree `delta1`.
pub fn chow_components_bound(
    ctx: &Context,
    n: &Magnitude,
    delta1: &Magnitude,
    delta2: &Magnitude,
    k: u64,
) -> Result<Magnitude> {
    let exponent = chow_exponent(ctx, n, delta2, k)?;
    let delta = ctx.max(delta1, delta2)?;
    let top = ctx.multiply(&ctx.add(n, &Magnitude::one())?, &delta)?;
    // (n+1) delta >= delta n
    let base = ctx.binomial_ordered(&top, n, &delta)?;
    Ok(ctx.power(&base, &exponent)?)
}

/// The bound evaluated from already computed `Q`, `D`, `A`, in both the
/// direct form and assembled from the Chow-component bound.
pub fn shafarevich_from_constants(ctx: &Context, c: &mut DerivedConstants) -> Result<Magnitude> {
    let q = DerivedConstants::require(&c.big_q, "Q")?;
    let a = DerivedConstants::require(&c.big_a, "A")?;
    let g = graph_degree_bound(ctx, c)?;
    let k = ctx.multiply(&big(&(BigUint::from(5u32) * q_minus_one(c)?)), &a)?;
    let n = ctx.sub_small(&k, &BigUint::one())?;
    c.trace.record("ambient dimension", cite::AMBIENT, &n);

    let top = ctx.multiply(&k, &g)?;
    // 5(q-1)A G >= G (5(q-1)A - 1)
    let base = ctx.binomial_ordered(&top, &n, &g)?;
    let g2 = ctx.add(&ctx.multiply(&g, &g)?, &Magnitude::one())?;
    let exponent = ctx.multiply(&k, &g2)?;
    let direct = ctx.multiply(&g, &ctx.power(&base, &exponent)?)?;

    let chow = chow_components_bound(ctx, &n, &q, &g, 1)?;
    let assembled = ctx.multiply(&g, &chow)?;

    c.trace.record("Chow components bound", cite::CHOW, &chow);
    c.trace.record("bound", cite::BOUND, &direct);
    c.trace.record("bound (assembled)", cite::BOUND_ASSEMBLED, &assembled);
    let agree = same_value(ctx, &direct, &assembled);
    c.trace.check("direct and assembled bound agree", agree, format!("{direct} vs {assembled}"));
    Ok(direct)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: Magnitude,
    pub constants: DerivedConstants,
}

/// The bound for `q >= 2`.
pub fn shafarevich_bound(ctx: &Context, p: &FamilyParams) -> Result<BoundReport> {
    let mut c = derive_all(ctx, p)?;
    let bound = shafarevich_from_constants(ctx, &mut c)?;
    Ok(BoundReport { bound, constants: c })
}

/// The bound for `q` in `{0, 1}`: the `q >= 2` bound at `(g, 2, 2s)` times `S(g)`.
pub fn shafarevich_bound_low_genus(ctx: &Context, p: &FamilyParams) -> Result<BoundReport> {
    p.check_fiber_genus()?;
    if p.q > BigUint::one() {
        return Err(ConstantsError::InvalidParams(format!("low-genus branch needs q in {{0, 1}} (got q = {})", p.q)));
    }
    let rerouted = FamilyParams { g: p.g.clone(), q: 2u32.into(), s: BigUint::from(2u32) * &p.s };
    let inner = shafarevich_bound(ctx, &rerouted)?;
    let s = defranchis_severi_s(ctx, &p.g)?;
    let bound = ctx.multiply(&s, &inner.bound)?;
    let mut c = inner.constants;
    c.trace.note(format!(
        "q replaced by 2 and s replaced by 2s: evaluated at (g, q, s) = ({}, 2, {})",
        rerouted.g, rerouted.s
    ));
    c.trace.record("S(g)", cite::S, &s);
    c.trace.record("bound (low genus)", cite::LOW_GENUS, &bound);
    c.params = p.clone();
    Ok(BoundReport { bound, constants: c })
}

/// Dispatch on `q`: the main bound for `q >= 2`, the low-genus branch otherwise.
pub fn evaluate(ctx: &Context, p: &FamilyParams) -> Result<BoundReport> {
    if p.q >= BigUint::from(2u32) {
        shafarevich_bound(ctx, p)
    } else {
        shafarevich_bound_low_genus(ctx, p)
    }
}

/// Multiplication in `Z[sqrt 6]`: `(a + b sqrt6)(c + d sqrt6)`.
fn mul_sqrt6(x: &(BigUint, BigUint), y: &(BigUint, BigUint)) -> (BigUint, BigUint) {
    (&x.0 * &y.0 + BigUint::from(6u32) * &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

fn pow_sqrt6(base: (BigUint, BigUint), mut e: u64) -> (BigUint, BigUint) {
    let mut acc = (BigUint::one(), BigUint::zero());
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_sqrt6(&acc, &b);
        }
        e >>= 1;
        if e > 0 {
            b = mul_sqrt6(&b, &b);
        }
    }
    acc
}

/// Integer upper bound on the number of nonconstant maps from a genus-`g`
/// curve to curves of genus at least two; the smallest integer above the
/// closed-form expression, or a tower enclosure when that integer is too long.
pub fn defranchis_severi_s(ctx: &Context, g: &BigUint) -> Result<Magnitude> {
    if g < &BigUint::from(2u32) {
        return Err(ConstantsError::InvalidParams(format!("S(g) needs g >= 2 (got {g})")));
    }
    let g1 = g - 1u32;
    // sqrt(2)^(g(g-1)) = 2^(g(g-1)/2), so the inner factor is
    // (2 sqrt6 (g-1) + 1)^(2+2g^2) * g^2 (g-1) 2^(g(g-1)/2 - 1)
    let half_pow: BigUint = g * &g1 / 2u32 - 1u32;
    let e: BigUint = BigUint::from(2u32) + BigUint::from(2u32) * g * g;
    let lead = BigUint::from(42u32) * &g1;
    let a = BigUint::from(2u32) * &g1;
    let predicted = e.to_u64().unwrap_or(u64::MAX).saturating_mul(a.bits() + 3)
        + half_pow.to_u64().unwrap_or(u64::MAX).min(u64::MAX / 2)
        + 3 * g.bits()
        + 16;
    let half_pow_u = half_pow.to_u64();
    if predicted <= ctx.exact_threshold_bits {
        let c = g * g * &g1 * (BigUint::one() << half_pow_u.unwrap() as usize);
        let (p, r) = pow_sqrt6((BigUint::one(), a), e.to_u64().unwrap());
        // S = 42(g-1)(cP + 1) + 42(g-1) c R sqrt6, and sqrt6 is irrational
        let y = &lead * &c * &r;
        let ceil_irr = (BigUint::from(6u32) * &y * &y).sqrt() + 1u32;
        return Ok(Magnitude::Exact(&lead * (&c * &p + 1u32) + ceil_irr));
    }
    // log10 S = log10(42(g-1) g^2 (g-1)) + (g(g-1)/2 - 1) log10 2 + E log10(x) + eps
    let digits = ctx.precision_digits + e.to_string().len() as u32 + 10;
    let pw = digits + 5;
    let scale = num_traits::pow(BigUint::from(10u32), pw as usize);
    let s6 = (BigUint::from(6u32) * &scale * &scale).sqrt();
    let to_rat = |n: &BigUint| BigRational::new(BigInt::from(n.clone()), BigInt::from(scale.clone()));
    let ai = BigInt::from(a.clone());
    let one = BigRational::one();
    let x_lo = to_rat(&s6) * &ai + &one;
    let x_hi = to_rat(&(&s6 + 1u32)) * &ai + &one;
    let lx = Interval::from_raw(x_lo, x_hi).log10(digits);
    let ei = BigRational::from_integer(BigInt::from(e.clone()));
    let pow_part = Interval::from_raw(lx.lo() * &ei, lx.hi() * &ei);
    let cst = BigRational::from_integer(BigInt::from(&lead * g * g * &g1));
    let lc = Interval::from_raw(cst.clone(), cst).log10(digits);
    let two = Interval::from_int(2).log10(digits);
    let hp = BigRational::from_integer(BigInt::from(half_pow));
    let two_part = Interval::from_raw(two.lo() * &hp, two.hi() * &hp);
    let eps = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 60));
    let total = pow_part.add(&lc, digits).add(&two_part, digits).bump_hi(&eps, ctx.precision_digits);
    let total = Interval::new(total.lo().clone(), total.hi().clone(), ctx.precision_digits);
    Ok(ctx.normalize(&Magnitude::tower(1, total)?)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KollarBounds {
    pub power_exponent: Magnitude,
    pub rank_bound: Magnitude,
    /// `max{Q, rank_bound}` when `Q` is available.
    pub equation_degree_bound: Option<Magnitude>,
}

/// Exponent `(m+1)l^2d - m` of the ideal power and the rank bound
/// `C((m+1)l^2d, m)`, plus the resulting equation-degree bound.
pub fn kollar_degree_bound(ctx: &Context, c: &mut DerivedConstants) -> Result<KollarBounds> {
    let m1 = ctx.add(&c.m, &Magnitude::one())?;
    let t = product(ctx, &[&m1, &c.l, &c.l, &c.d])?;
    let exponent = match (t.as_exact(), c.m.as_exact()) {
        (Some(t), Some(m)) => big(&(t - m)),
        _ => return Err(ConstantsError::InvalidParams("m, l, d must be exact".into())),
    };
    let rank = ctx.binomial(&t, &c.m)?;
    c.trace.record("ideal power exponent", cite::KOLLAR_EXP, &exponent);
    c.trace.record("rank bound", cite::KOLLAR_RANK, &rank);
    let eq = match &c.big_q {
        Some(q) => {
            let cmp = ctx.compare(q, &rank);
            match cmp {
                Comparison::Greater | Comparison::Equal => {
                    c.trace.check("max{Q, rank bound} = Q", true, "Q is at least the rank bound")
                }
                Comparison::Less => c.trace.check("max{Q, rank bound} = Q", false, "rank bound exceeds Q"),
                Comparison::Indeterminate => c.trace.note("Q versus rank bound could not be certified"),
            }
            let m = ctx.max(q, &rank)?;
            c.trace.record("equation degree bound", cite::KOLLAR_EQ, &m);
            Some(m)
        }
        None => None,
    };
    Ok(KollarBounds { power_exponent: exponent, rank_bound: rank, equation_degree_bound: eq })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionBounds {
    pub sections: Magnitude,
    pub q_prime_bound: Magnitude,
    pub tau_degree_bound: Magnitude,
    pub canonical_degree_bound: Magnitude,
    pub section_degree_bound: Magnitude,
}

/// Genus, cover-degree and section-degree bounds for the family of sections.
pub fn parshin_family_constants(ctx: &Context, c: &mut DerivedConstants) -> Result<SectionBounds> {
    let n = c.big_n.clone();
    let n2 = ctx.multiply(&n, &n)?;
    let q_prime = product(ctx, &[&ex(100), &n2, &c.gqs])?;
    let tau = product(ctx, &[&ex(200), &n2, &c.gqs])?;
    let canonical = product(ctx, &[&ex(100), &n, &c.gqs])?;
    let section = product(ctx, &[&ex(500), &n, &c.gqs])?;
    c.trace.record("q' bound", cite::Q_PRIME, &q_prime);
    c.trace.record("deg tau bound", cite::TAU, &tau);
    c.trace.record("canonical degree bound", cite::CANONICAL, &canonical);
    c.trace.record("section degree bound", cite::SECTION, &section);
    Ok(SectionBounds {
        sections: n,
        q_prime_bound: q_prime,
        tau_degree_bound: tau,
        canonical_degree_bound: canonical,
        section_degree_bound: section,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClemensThreshold {
    /// `(2g-2)/delta + (4m-4)`.
    pub threshold: BigRational,
    /// `l = 4m - 3`.
    pub l: BigInt,
    /// `l` meets the threshold.
    pub applicable: bool,
}

/// Degree threshold above which the image of a curve of geometric degree
/// `delta` under the degree-`l` embedding is again a curve.
pub fn clemens_threshold(g: &BigUint, delta: &BigUint, m: &BigUint) -> Result<ClemensThreshold> {
    if g < &BigUint::from(2u32) || delta.is_zero() || m.is_zero() {
        return Err(ConstantsError::InvalidParams("need g >= 2, delta >= 1, m >= 1".into()));
    }
    let two_g2 = BigInt::from(g.clone()) * 2 - 2;
    let m = BigInt::from(m.clone());
    let threshold = BigRational::new(two_g2, BigInt::from(delta.clone())) + BigRational::from_integer(&m * 4 - 4);
    let l: BigInt = &m * 4 - 3;
    let applicable = BigRational::from_integer(l.clone()) >= threshold;
    Ok(ClemensThreshold { threshold, l, applicable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::magnitude::{exact, parse_decimal};

    fn ctx() -> Context {
        Context::default()
    }

    #[test]
    fn base_constants() {
        let c = derive_base(&ctx(), &FamilyParams::new(2, 2, 0)).unwrap();
        assert_eq!(c.m, ex(5000));
        assert_eq!(c.d, ex(10));
        assert_eq!(c.l, ex(19997));
        assert_eq!(c.delta0, ex(199970));
        assert_eq!(c.big_n, ex(39988000901));
        let c = derive_base(&ctx(), &FamilyParams::new(2, 2, 1)).unwrap();
        assert_eq!((c.m, c.l), (ex(6250), ex(24997)));
        let c = derive_base(&ctx(), &FamilyParams::new(3, 2, 0)).unwrap();
        assert_eq!((c.m, c.d, c.l), (ex(7500), ex(20), ex(29997)));
        assert!(matches!(derive_base(&ctx(), &FamilyParams::new(1, 2, 0)), Err(ConstantsError::InvalidParams(_))));
    }

    fn toy(delta0: u64, big_m: u64) -> DerivedConstants {
        let mut c = DerivedConstants::toy(FamilyParams::new(2, 2, 0));
        c.delta0 = ex(delta0);
        c.l = ex(delta0);
        c.big_m = ex(big_m);
        c
    }

    #[test]
    fn toy_q() {
        let mut c = toy(1, 3);
        assert_eq!(compute_q(&ctx(), &mut c).unwrap(), ex(105));
        let mut c = toy(2, 3);
        assert_eq!(compute_q(&ctx(), &mut c).unwrap(), ex(990));
        assert!(c.trace.all_checks_hold());
    }

    #[test]
    fn toy_d_and_a() {
        let mut c = toy(2, 1);
        c.l = ex(1);
        c.d = ex(2);
        c.big_n = ex(5);
        assert_eq!(compute_d(&ctx(), &mut c, None).unwrap(), ex(25000));
        c.big_q = Some(ex(3));
        assert_eq!(compute_a(&ctx(), &mut c).unwrap(), ex(216));
        c.big_q = Some(ex(0));
        assert_eq!(compute_a(&ctx(), &mut c).unwrap(), ex(1));
    }

    #[test]
    fn real_d_matches_product() {
        let mut c = derive_base(&ctx(), &FamilyParams::new(2, 2, 0)).unwrap();
        let d = compute_d(&ctx(), &mut c, None).unwrap();
        let expect = BigUint::from(19994300405u64)
            * BigUint::from(19997u32).pow(2)
            * 10u32
            * 500u32
            * BigUint::from(39988000901u64)
            * 4u32;
        assert_eq!(d, Magnitude::Exact(expect));
        assert_eq!(c.trace.get("C(ld+2,2)"), Some(&ex(19994300406)));
    }

    #[test]
    fn graph_bound_toys() {
        let mut c = toy(1, 1);
        c.big_q = Some(ex(105));
        c.big_d = Some(ex(25000));
        assert_eq!(graph_degree_bound(&ctx(), &mut c).unwrap(), ex(2625006));
        c.big_q = Some(ex(0));
        assert_eq!(graph_degree_bound(&ctx(), &mut c).unwrap(), ex(6));
    }

    #[test]
    fn chow_toys() {
        assert_eq!(chow_components_bound(&ctx(), &ex(2), &ex(1), &ex(1), 1).unwrap(), ex(729));
        assert_eq!(chow_components_bound(&ctx(), &ex(1), &ex(2), &ex(1), 1).unwrap(), ex(256));
        for (n, d2) in [(1u64, 1u64), (3, 4), (5, 2), (7, 9)] {
            let e = chow_exponent(&ctx(), &ex(n), &ex(d2), 1).unwrap();
            assert_eq!(e, ex((n + 1) * (d2 * d2 + 1)));
        }
    }

    #[test]
    fn toy_shafarevich() {
        let mut c = toy(1, 1);
        c.big_q = Some(ex(1));
        c.big_d = Some(ex(1));
        c.big_a = Some(ex(1));
        let b = shafarevich_from_constants(&ctx(), &mut c).unwrap();
        let expect = BigUint::from(7u32) * exact::binomial(&35u32.into(), &4u32.into()).pow(250);
        assert_eq!(b, Magnitude::Exact(expect));
        assert!(c.trace.all_checks_hold());
    }

    #[test]
    fn defranchis_severi_small_genus() {
        let s2 = defranchis_severi_s(&ctx(), &2u32.into()).unwrap();
        let Magnitude::Exact(v) = &s2 else { panic!() };
        // 42 (4 (2 sqrt6 + 1)^10 + 1) = 8571920655.99259578808...
        assert_eq!(v, &BigUint::from(8571920656u64));
        for g in 2..10u32 {
            let s = defranchis_severi_s(&ctx(), &g.into()).unwrap();
            assert_eq!(ctx().compare(&s, &ex(42 * (g as u64 - 1))), Comparison::Greater);
        }
    }

    #[test]
    fn defranchis_severi_tower_contains_exact() {
        let g = BigUint::from(40u32);
        let exact = defranchis_severi_s(&ctx(), &g).unwrap();
        let small = Context { exact_threshold_bits: 1 << 10, ..ctx() };
        let t = defranchis_severi_s(&small, &g).unwrap();
        let Magnitude::Tower { body, .. } = t else { panic!() };
        let l = ctx().log10_enclosure(&exact, 1).unwrap();
        assert!(body.overlaps(&l));
    }

    #[test]
    fn kollar_toys() {
        let mut c = toy(1, 1);
        c.m = ex(1);
        c.l = ex(2);
        c.d = ex(1);
        let k = kollar_degree_bound(&ctx(), &mut c).unwrap();
        assert_eq!((k.power_exponent, k.rank_bound), (ex(7), ex(8)));
        c.m = ex(2);
        c.l = ex(1);
        let k = kollar_degree_bound(&ctx(), &mut c).unwrap();
        assert_eq!((k.power_exponent, k.rank_bound), (ex(1), ex(3)));
    }

    #[test]
    fn section_bounds() {
        let mut c = derive_base(&ctx(), &FamilyParams::new(2, 2, 0)).unwrap();
        let s = parshin_family_constants(&ctx(), &mut c).unwrap();
        assert_eq!(s.section_degree_bound, ex(79976001802000));
        let n = BigUint::from(39988000901u64);
        assert_eq!(s.q_prime_bound, Magnitude::Exact(&n * &n * 400u32));
        let mut t = toy(1, 1);
        t.big_n = ex(5);
        let s = parshin_family_constants(&ctx(), &mut t).unwrap();
        assert_eq!(
            (s.sections, s.q_prime_bound, s.tau_degree_bound, s.canonical_degree_bound, s.section_degree_bound),
            (ex(5), ex(2500), ex(5000), ex(500), ex(2500))
        );
    }

    #[test]
    fn clemens() {
        let t = clemens_threshold(&2u32.into(), &10u32.into(), &5000u32.into()).unwrap();
        assert_eq!(t.threshold, parse_decimal("19996.2").unwrap());
        assert!(t.applicable);
        let t = clemens_threshold(&2u32.into(), &1u32.into(), &1u32.into()).unwrap();
        assert_eq!(t.threshold, parse_decimal("2").unwrap());
        assert!(!t.applicable);
        for m in [1u32, 7, 300] {
            assert!(clemens_threshold(&2u32.into(), &2u32.into(), &m.into()).unwrap().applicable);
        }
    }

    #[test]
    fn real_pipeline_is_consistent() {
        let r = shafarevich_bound(&ctx(), &FamilyParams::new(2, 2, 0)).unwrap();
        let t = &r.constants.trace;
        assert!(t.all_checks_hold(), "{:?}", t.checks);
        assert!(r.bound.height() >= 3, "{}", r.bound);
        assert_eq!(r.constants.big_q.as_ref().unwrap().height(), 1);
        assert!(r.constants.big_a.as_ref().unwrap().height() >= 2);
    }
}
