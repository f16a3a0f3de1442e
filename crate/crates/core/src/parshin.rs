//! Counting constants of the Parshin covering construction and the uniform
//! Mordell bound assembled from them.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::constants::{self, BoundReport, ConstantsError, FamilyParams};
use crate::magnitude::{exact, Context, Magnitude, MagnitudeError};
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParshinError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("base genus of the constructed cover is not positive: C(g,q,s) = {0}")]
    NonpositiveGenus(String),
    #[error("inner Shafarevich parameters invalid: {0}")]
    InnerParamsInvalid(String),
    #[error(transparent)]
    Constants(#[from] ConstantsError),
    #[error(transparent)]
    Magnitude(#[from] MagnitudeError),
}

pub type Result<T> = std::result::Result<T, ParshinError>;

pub mod cite {
    pub const G_PRIME: &str = "g' = 2 + 2^(2g+1)(g-1)";
    pub const THETA: &str = "2^(2g)(2^(2g)-1) * 2^(2(1+2^(2g)(g-1))) * 2";
    pub const C: &str = "C(g,q,s) = 1 + Theta(q-1) + (Theta-1)s";
    pub const COVER_COUNT: &str = "(2q+s) * theta!";
    pub const COVER_SUM: &str = "(2q+s) * (C(g,q,s)+1)!";
    pub const S_G_PRIME: &str = "S(g')";
    pub const INNER: &str = "P(g', C(g,q,s), Theta*s)";
    pub const BOUND: &str = "S(g') * P(g', C(g,q,s), Theta*s) * g' * (2q+s)(C(g,q,s)+1)!";
}

fn ex(n: u64) -> Magnitude {
    Magnitude::from_u64(n)
}

fn check_genus(g: &BigUint) -> Result<()> {
    if g < &BigUint::from(2u32) {
        return Err(ParshinError::InvalidParams(format!("fiber genus must satisfy g >= 2 (got g = {g})")));
    }
    Ok(())
}

fn two_pow(ctx: &Context, e: &BigUint) -> Result<Magnitude> {
    Ok(ctx.power(&ex(2), &Magnitude::Exact(e.clone()))?)
}

/// Genus bound `2 + 2^(2g+1)(g-1)` of the curve in the constructed family.
pub fn g_prime(ctx: &Context, g: &BigUint) -> Result<Magnitude> {
    check_genus(g)?;
    let p = two_pow(ctx, &(BigUint::from(2u32) * g + 1u32))?;
    let t = ctx.multiply(&p, &Magnitude::Exact(g - 1u32))?;
    Ok(ctx.add(&t, &ex(2))?)
}

/// Degree bound of the composite cover `B_3 -> B`, the product of
/// `2^(2g)(2^(2g)-1)`, `2^(2(1+2^(2g)(g-1)))` and `2`.
pub fn rho_degree_bound(ctx: &Context, g: &BigUint) -> Result<Magnitude> {
    check_genus(g)?;
    let four_g = BigUint::one() << (2 * g.to_u64().ok_or_else(|| ParshinError::InvalidParams("g too large".into()))?) as usize;
    let first = &four_g * (&four_g - 1u32);
    let e = BigUint::from(2u32) * (BigUint::one() + &four_g * (g - 1u32)) + 1u32;
    Ok(ctx.multiply(&Magnitude::Exact(first), &two_pow(ctx, &e)?)?)
}

/// Flags attached to a value that is mathematically defined but outside the
/// range the construction presumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagnostic {
    NonpositiveGenus,
}

/// `C(g,q,s) = 1 + Theta(q-1) + (Theta-1)s`, the genus bound of the base of
/// the constructed family. Negative values are an error; zero is returned
/// with a diagnostic.
pub fn parshin_c(ctx: &Context, g: &BigUint, q: &BigUint, s: &BigUint) -> Result<(Magnitude, Option<Diagnostic>)> {
    let theta = rho_degree_bound(ctx, g)?;
    let theta1 = ctx.sub_small(&theta, &BigUint::one())?;
    let one = Magnitude::one();
    let value = if !q.is_zero() {
        let a = ctx.multiply(&theta, &Magnitude::Exact(q - 1u32))?;
        let b = ctx.multiply(&theta1, &Magnitude::Exact(s.clone()))?;
        ctx.add(&ctx.add(&one, &a)?, &b)?
    } else if !s.is_zero() {
        // 1 - Theta + (Theta-1)s = (Theta-1)(s-1)
        ctx.multiply(&theta1, &Magnitude::Exact(s - 1u32))?
    } else {
        let shown = match theta.as_exact() {
            Some(t) => (BigInt::one() - BigInt::from(t.clone())).to_string(),
            None => format!("1 - {theta}"),
        };
        return Err(ParshinError::NonpositiveGenus(shown));
    };
    let diag = value.as_exact().is_some_and(Zero::is_zero).then_some(Diagnostic::NonpositiveGenus);
    Ok((value, diag))
}

/// Number of unramified covers of degree `theta` of a genus-`q` curve with
/// `s` punctures is at most `(2q+s) theta!`.
pub fn cover_count_bound(ctx: &Context, q: &BigUint, s: &BigUint, theta: &Magnitude) -> Result<Magnitude> {
    if theta.as_exact().is_some_and(Zero::is_zero) {
        return Err(ParshinError::InvalidParams("cover degree must be at least 1".into()));
    }
    let lead = Magnitude::Exact(BigUint::from(2u32) * q + s);
    Ok(ctx.multiply(&lead, &ctx.factorial(theta)?)?)
}

/// `(2q+s)(C+1)!` for a given `C`.
pub fn cover_sum_from_c(ctx: &Context, q: &BigUint, s: &BigUint, c: &Magnitude) -> Result<Magnitude> {
    let c1 = ctx.add(c, &Magnitude::one())?;
    cover_count_bound(ctx, q, s, &c1)
}

/// `(2q+s)(C(g,q,s)+1)!`, bounding the total over cover degrees `1..=C`.
pub fn cover_sum_bound(ctx: &Context, g: &BigUint, q: &BigUint, s: &BigUint) -> Result<Magnitude> {
    let (c, _) = parshin_c(ctx, g, q, s)?;
    cover_sum_from_c(ctx, q, s, &c)
}

/// The chain `sum_{t<=C} (2q+s) t! <= C (2q+s) C! <= (2q+s)(C+1)!` for small `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSumChain {
    pub exact_sum: BigUint,
    pub middle: BigUint,
    pub bound: BigUint,
}

impl CoverSumChain {
    pub fn holds(&self) -> bool {
        self.exact_sum <= self.middle && self.middle <= self.bound
    }
}

pub fn cover_sum_chain(q: u64, s: u64, c: u64) -> CoverSumChain {
    let lead = BigUint::from(2 * q + s);
    let exact_sum = (1..=c).map(|t| &lead * exact::factorial_u64(t)).fold(BigUint::zero(), |a, b| a + b);
    let middle = &lead * BigUint::from(c) * exact::factorial_u64(c);
    let bound = &lead * exact::factorial_u64(c + 1);
    CoverSumChain { exact_sum, middle, bound }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParshinConstants {
    pub g_prime: Magnitude,
    pub theta_bound: Magnitude,
    pub c_gqs: Magnitude,
    pub cover_sum: Magnitude,
    pub s_of_gprime: Magnitude,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MordellReport {
    pub constants: ParshinConstants,
    pub inner_params: FamilyParams,
    pub inner: BoundReport,
    pub bound: Magnitude,
    pub diagnostics: Vec<Diagnostic>,
    pub trace: Trace,
}

/// Product of the four factors `S(g') * P * g' * cover_sum`.
pub fn mordell_from_factors(
    ctx: &Context,
    s_of_gprime: &Magnitude,
    inner: &Magnitude,
    g_prime: &Magnitude,
    cover_sum: &Magnitude,
) -> Result<Magnitude> {
    let a = ctx.multiply(s_of_gprime, inner)?;
    let b = ctx.multiply(&a, g_prime)?;
    Ok(ctx.multiply(&b, cover_sum)?)
}

/// Bound on the number of rational points of a nonisotrivial genus-`g` curve
/// over the function field of a genus-`q` curve with `s` bad places.
pub fn mordell_bound(ctx: &Context, g: &BigUint, q: &BigUint, s: &BigUint) -> Result<MordellReport> {
    let mut trace = Trace::default();
    let gp = g_prime(ctx, g)?;
    let theta = rho_degree_bound(ctx, g)?;
    trace.record("g'", cite::G_PRIME, &gp);
    trace.record("Theta", cite::THETA, &theta);
    let (c, diag) = match parshin_c(ctx, g, q, s) {
        Ok(v) => v,
        Err(ParshinError::NonpositiveGenus(v)) => {
            return Err(ParshinError::InnerParamsInvalid(format!("C(g,q,s) = {v} is negative")))
        }
        Err(e) => return Err(e),
    };
    trace.record("C(g,q,s)", cite::C, &c);
    let mut diagnostics = Vec::new();
    if let Some(d) = diag {
        trace.note("C(g,q,s) = 0: the constructed base has nonpositive genus");
        diagnostics.push(d);
    }
    let cover_sum = cover_sum_from_c(ctx, q, s, &c)?;
    trace.record("cover sum bound", cite::COVER_SUM, &cover_sum);

    let (Some(gp_x), Some(c_x)) = (gp.as_exact(), c.as_exact()) else {
        return Err(ParshinError::InnerParamsInvalid("inner parameters are too large to represent exactly".into()));
    };
    let theta_s = ctx.multiply(&theta, &Magnitude::Exact(s.clone()))?;
    let Some(theta_s) = theta_s.as_exact() else {
        return Err(ParshinError::InnerParamsInvalid("Theta*s is too large to represent exactly".into()));
    };
    let inner_params = FamilyParams { g: gp_x.clone(), q: c_x.clone(), s: theta_s.clone() };
    if c_x < &BigUint::from(2u32) {
        trace.note(format!("C(g,q,s) = {c_x} < 2: inner bound uses the low-genus branch"));
    }
    trace.note(format!("inner parameters (g', q', s') = ({}, {}, {})", inner_params.g, inner_params.q, inner_params.s));
    let inner = constants::evaluate(ctx, &inner_params)?;
    trace.nest("P", &inner.constants.trace);
    trace.record("P(g', C, Theta*s)", cite::INNER, &inner.bound);

    let s_gp = constants::defranchis_severi_s(ctx, gp_x)?;
    trace.record("S(g')", cite::S_G_PRIME, &s_gp);

    let bound = mordell_from_factors(ctx, &s_gp, &inner.bound, &gp, &cover_sum)?;
    trace.record("bound", cite::BOUND, &bound);
    Ok(MordellReport {
        constants: ParshinConstants { g_prime: gp, theta_bound: theta, c_gqs: c, cover_sum, s_of_gprime: s_gp },
        inner_params,
        inner,
        bound,
        diagnostics,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::default()
    }

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn genus_and_degree() {
        assert_eq!(g_prime(&ctx(), &b(2)).unwrap(), ex(34));
        assert_eq!(g_prime(&ctx(), &b(3)).unwrap(), ex(258));
        let t2 = rho_degree_bound(&ctx(), &b(2)).unwrap();
        assert_eq!(t2, ex(8246337208320));
        assert_eq!(t2.as_exact().unwrap() % (b(1) << 35), b(0));
        assert_eq!(t2.as_exact().unwrap() >> 35, b(240));
        let t3 = rho_degree_bound(&ctx(), &b(3)).unwrap();
        assert_eq!(t3, Magnitude::Exact(b(4032) << 259));
        assert!(matches!(g_prime(&ctx(), &b(1)), Err(ParshinError::InvalidParams(_))));
    }

    #[test]
    fn c_values() {
        assert_eq!(parshin_c(&ctx(), &b(2), &b(2), &b(0)).unwrap(), (ex(8246337208321), None));
        assert_eq!(parshin_c(&ctx(), &b(2), &b(1), &b(0)).unwrap(), (ex(1), None));
        assert_eq!(parshin_c(&ctx(), &b(2), &b(0), &b(1)).unwrap(), (ex(0), Some(Diagnostic::NonpositiveGenus)));
        assert!(matches!(parshin_c(&ctx(), &b(2), &b(0), &b(0)), Err(ParshinError::NonpositiveGenus(_))));
    }

    #[test]
    fn cover_counts() {
        assert_eq!(cover_count_bound(&ctx(), &b(2), &b(0), &ex(3)).unwrap(), ex(24));
        assert_eq!(cover_count_bound(&ctx(), &b(2), &b(0), &ex(1)).unwrap(), ex(4));
        assert_eq!(cover_count_bound(&ctx(), &b(0), &b(3), &ex(2)).unwrap(), ex(6));
        let chain = cover_sum_chain(2, 0, 3);
        assert_eq!((chain.exact_sum.clone(), chain.middle.clone(), chain.bound.clone()), (b(36), b(72), b(96)));
        assert!(chain.holds());
        let chain = cover_sum_chain(2, 0, 1);
        assert_eq!((chain.exact_sum.clone(), chain.bound.clone()), (b(4), b(8)));
        for c in 1..=8 {
            let chain = cover_sum_chain(2, 1, c);
            assert!(chain.holds());
            assert_eq!(cover_sum_from_c(&ctx(), &b(2), &b(1), &ex(c)).unwrap(), Magnitude::Exact(chain.bound));
        }
    }

    #[test]
    fn toy_product() {
        let r = mordell_from_factors(&ctx(), &ex(1), &ex(1), &ex(34), &ex(36)).unwrap();
        assert_eq!(r, ex(1224));
    }
}
