//! Continued-fraction arithmetic for the parameter alpha: expansions,
//! convergents, the Brjuno series, growth-rule (Liouville-type)
//! constructions, and membership in the exceptional parameter sets.
//!
//! Conventions. The quotient data always describes `|alpha|`, with the
//! sign carried separately. Convergents use `q_0 = 1` (so `p_0/q_0` is the
//! integer part) and the Brjuno partial sums are
//! `S_n = sum_{i=0}^{n} log(q_{i+1}) / q_i` over convergent denominators,
//! the standard Brjuno sum. Divergence/convergence verdicts do not depend
//! on that indexing choice; exact partial-sum values do.
//!
//! Growth rules produce partial quotients like `floor(exp(q_n)) + 1`,
//! whose convergents overflow any fixed-size integer within a few steps.
//! Quotients and convergents therefore use a three-state magnitude: exact
//! big integer, natural-log form, or `Huge` (beyond even log form). Every
//! certificate derived from a rule is based on per-term lower bounds that
//! remain valid across all three states.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bigfloat::BigFloat;
use crate::error::BrjunoError;

/// Exact-to-the-extent-possible size of a huge positive integer.
#[derive(Clone, Debug, PartialEq)]
pub enum Magnitude {
    Exact(BigInt),
    /// Natural logarithm of the value.
    Log(f64),
    /// Even the natural logarithm overflows f64.
    Huge,
}

impl Magnitude {
    pub fn ln(&self) -> Option<f64> {
        match self {
            Magnitude::Exact(n) => Some(ln_bigint(n)),
            Magnitude::Log(l) => Some(*l),
            Magnitude::Huge => None,
        }
    }

    pub fn as_exact(&self) -> Option<&BigInt> {
        match self {
            Magnitude::Exact(n) => Some(n),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(n) => n.to_f64().unwrap_or(f64::INFINITY),
            Magnitude::Log(l) => l.exp(),
            Magnitude::Huge => f64::INFINITY,
        }
    }
}

/// Natural log of a positive big integer, accurate to f64 resolution.
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "ln of nonpositive integer");
    let bits = n.bits();
    if bits <= 53 {
        return (n.to_f64().expect("small integer")).ln();
    }
    let shift = bits - 53;
    let top: BigInt = n >> shift;
    (top.to_f64().expect("53-bit value")).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a * q1 + q0` across magnitude states.
fn convergent_step(a: &Magnitude, q1: &Magnitude, q0: &Magnitude) -> Magnitude {
    if let (Magnitude::Exact(a), Magnitude::Exact(q1), Magnitude::Exact(q0)) = (a, q1, q0) {
        return Magnitude::Exact(a * q1 + q0);
    }
    match (a.ln(), q1.ln()) {
        (Some(la), Some(lq1)) => {
            let l0 = q0.ln().unwrap_or(f64::NEG_INFINITY);
            let correction = (l0 - la - lq1).exp().ln_1p();
            let l = la + lq1 + correction;
            if l.is_finite() {
                Magnitude::Log(l)
            } else {
                Magnitude::Huge
            }
        }
        _ => Magnitude::Huge,
    }
}

/// Keep integers exact only while they stay resonably small.
const EXACT_BIT_CAP: u64 = 4096;

fn cap_magnitude(m: Magnitude) -> Magnitude {
    match m {
        Magnitude::Exact(n) if n.bits() > EXACT_BIT_CAP => Magnitude::Log(ln_bigint(&n)),
        other => other,
    }
}

/// Named growth rules for Liouville-type continued fractions. The
/// `initial` quotients (all >= 1) are used verbatim for `a_1, a_2, ...`;
/// after that the rule generates `a_{n+1}` from `q_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GrowthRule {
    /// `a_{n+1} = floor(exp(q_n)) + 1  (>= exp(q_n))`
    ExpFloor { initial: Vec<u64> },
    /// `a_{n+1} = 10^(q_n)  (>= exp(q_n))`
    Pow10Floor { initial: Vec<u64> },
    /// Constant quotients; violates the growth floor and is rejected by
    /// [`make_liouville`]. Exists so the rejection path is testable.
    Const { value: u64 },
}

impl GrowthRule {
    fn initial(&self) -> &[u64] {
        match self {
            GrowthRule::ExpFloor { initial } | GrowthRule::Pow10Floor { initial } => initial,
            GrowthRule::Const { .. } => &[],
        }
    }

    /// Next quotient from the current denominator.
    fn next_quotient(&self, q: &Magnitude) -> Magnitude {
        match self {
            GrowthRule::Const { value } => Magnitude::Exact(BigInt::from(*value)),
            GrowthRule::ExpFloor { .. } => match q {
                Magnitude::Exact(n) => {
                    if let Some(small) = n.to_u32().filter(|&v| v <= 256) {
                        let bits = (small as f64 * 1.4427).ceil() as u32 + 96;
                        let e = BigFloat::exp_int(small, bits);
                        Magnitude::Exact(e.floor_bigint() + 1)
                    } else {
                        // ln(floor(e^q) + 1) = q up to below f64 resolution
                        Magnitude::Log(ln_as_value(n))
                    }
                }
                Magnitude::Log(l) => {
                    let v = l.exp();
                    if v.is_finite() {
                        Magnitude::Log(v)
                    } else {
                        Magnitude::Huge
                    }
                }
                Magnitude::Huge => Magnitude::Huge,
            },
            GrowthRule::Pow10Floor { .. } => match q {
                Magnitude::Exact(n) => {
                    if let Some(small) = n.to_u32().filter(|&v| v <= 1024) {
                        Magnitude::Exact(BigInt::from(10).pow(small))
                    } else {
                        Magnitude::Log(ln_as_value(n) * std::f64::consts::LN_10)
                    }
                }
                Magnitude::Log(l) => {
                    let v = l.exp() * std::f64::consts::LN_10;
                    if v.is_finite() {
                        Magnitude::Log(v)
                    } else {
                        Magnitude::Huge
                    }
                }
                Magnitude::Huge => Magnitude::Huge,
            },
        }
    }

    /// Lower bound on `ln a_{n+1}` in units of `q_n` (1 means the
    /// comparison-test floor `a_{n+1} >= exp(q_n)` holds).
    fn floor_ratio(&self) -> f64 {
        match self {
            GrowthRule::ExpFloor { .. } => 1.0,
            GrowthRule::Pow10Floor { .. } => std::f64::consts::LN_10,
            GrowthRule::Const { .. } => 0.0,
        }
    }
}

fn ln_as_value(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// Partial-quotient source of a continued fraction for `|alpha|`.
#[derive(Clone, Debug, PartialEq)]
pub enum CfSource {
    /// Finite expansion `[a_0; a_1, ..., a_k]` (a rational value).
    Finite(Vec<BigInt>),
    /// `head` then `cycle` repeated forever (a quadratic irrational).
    Periodic { head: Vec<BigInt>, cycle: Vec<BigInt> },
    /// `a_0 = 0`, then `initial` quotients, then rule-generated ones.
    Rule(GrowthRule),
    /// Truncated expansion of a float; `exhausted` marks that the source
    /// precision ran out before the requested depth.
    Truncated { quotients: Vec<BigInt>, exhausted: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub negative: bool,
    pub source: CfSource,
}

/// Quotients `a_0..a_n` and convergents `p_0/q_0 .. p_n/q_n`.
#[derive(Clone, Debug)]
pub struct CfExpansion {
    pub quotients: Vec<Magnitude>,
    pub p: Vec<Magnitude>,
    pub q: Vec<Magnitude>,
    /// Depth was capped by the source (finite or precision-exhausted).
    pub exhausted: bool,
}

impl ContinuedFraction {
    pub fn finite(quotients: Vec<BigInt>) -> Result<Self, BrjunoError> {
        validate_quotients(&quotients)?;
        Ok(ContinuedFraction {
            negative: false,
            source: CfSource::Finite(quotients),
        })
    }

    pub fn periodic(head: Vec<BigInt>, cycle: Vec<BigInt>) -> Result<Self, BrjunoError> {
        validate_quotients(&head)?;
        if cycle.is_empty() {
            return Err(BrjunoError::BadDepth("empty cycle".to_string()));
        }
        for (i, a) in cycle.iter().enumerate() {
            if a < &BigInt::one() {
                return Err(BrjunoError::BadPartialQuotient {
                    index: head.len() + i,
                    got: a.to_string(),
                });
            }
        }
        Ok(ContinuedFraction {
            negative: false,
            source: CfSource::Periodic { head, cycle },
        })
    }

    /// The golden mean `[1; 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::periodic(vec![BigInt::one()], vec![BigInt::one()]).expect("golden cf")
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    /// Number of quotients available, if the source is finite.
    pub fn finite_len(&self) -> Option<usize> {
        match &self.source {
            CfSource::Finite(qs) | CfSource::Truncated { quotients: qs, .. } => Some(qs.len()),
            _ => None,
        }
    }

    /// Materialize quotients `a_0..a_depth` and their convergents.
    pub fn expand(&self, depth: usize) -> Result<CfExpansion, BrjunoError> {
        let mut quotients: Vec<Magnitude> = Vec::with_capacity(depth + 1);
        let mut exhausted = false;
        match &self.source {
            CfSource::Finite(qs) | CfSource::Truncated { quotients: qs, .. } => {
                let take = qs.len().min(depth + 1);
                quotients.extend(qs[..take].iter().cloned().map(Magnitude::Exact));
                if take <= depth {
                    exhausted = true;
                }
            }
            CfSource::Periodic { head, cycle } => {
                for i in 0..=depth {
                    let a = if i < head.len() {
                        head[i].clone()
                    } else {
                        cycle[(i - head.len()) % cycle.len()].clone()
                    };
                    quotients.push(Magnitude::Exact(a));
                }
            }
            CfSource::Rule(rule) => {
                quotients.push(Magnitude::Exact(BigInt::zero())); // a_0 = 0
                let initial = rule.initial();
                // denominators computed on the fly: the rule consumes q_n
                let mut q_prev = Magnitude::Exact(BigInt::zero()); // q_{-1}
                let mut q_cur = Magnitude::Exact(BigInt::one()); // q_0
                for i in 1..=depth {
                    let a = if i - 1 < initial.len() {
                        let v = initial[i - 1];
                        if v < 1 {
                            return Err(BrjunoError::BadPartialQuotient {
                                index: i,
                                got: v.to_string(),
                            });
                        }
                        Magnitude::Exact(BigInt::from(v))
                    } else {
                        rule.next_quotient(&q_cur)
                    };
                    let q_next = cap_magnitude(convergent_step(&a, &q_cur, &q_prev));
                    quotients.push(a);
                    q_prev = q_cur;
                    q_cur = q_next;
                }
            }
        }

        // convergents from the materialized quotients
        let mut p: Vec<Magnitude> = Vec::with_capacity(quotients.len());
        let mut q: Vec<Magnitude> = Vec::with_capacity(quotients.len());
        let mut p_prev2 = Magnitude::Exact(BigInt::zero());
        let mut p_prev = Magnitude::Exact(BigInt::one());
        let mut q_prev2 = Magnitude::Exact(BigInt::one());
        let mut q_prev = Magnitude::Exact(BigInt::zero());
        for a in &quotients {
            let p_cur = cap_magnitude(convergent_step(a, &p_prev, &p_prev2));
            let q_cur = cap_magnitude(convergent_step(a, &q_prev, &q_prev2));
            p.push(p_cur.clone());
            q.push(q_cur.clone());
            p_prev2 = p_prev;
            p_prev = p_cur;
            q_prev2 = q_prev;
            q_prev = q_cur;
        }
        Ok(CfExpansion {
            quotients,
            p,
            q,
            exhausted,
        })
    }

    /// Evaluate to a signed high-precision float with error below one unit
    /// in the last place of the result.
    pub fn value_bigfloat(&self, bits: u32) -> Result<BigFloat, BrjunoError> {
        let target = bits as f64 * std::f64::consts::LN_2 + 8.0;
        let mut depth = 8usize;
        loop {
            let exp = self.expand(depth)?;
            let n = exp.q.len() - 1;
            let done_by_depth = exp.exhausted && n + 1 >= exp.quotients.len();
            // error of p_n/q_n is below 1/(q_n q_{n+1}); in log form that
            // is -(ln q_n + ln q_{n+1}).
            let mut usable: Option<usize> = None;
            for i in (0..n).rev() {
                let (Some(li), Some(li1)) = (exp.q[i].ln(), exp.q[i + 1].ln()) else {
                    continue;
                };
                if exp.q[i].as_exact().is_some() && (li + li1 >= target || exp.exhausted) {
                    usable = Some(i);
                    break;
                }
            }
            if exp.exhausted {
                usable = usable.or(Some(n));
            }
            if let Some(i) = usable {
                let (Some(pi), Some(qi)) = (exp.p[i].as_exact(), exp.q[i].as_exact()) else {
                    return Err(BrjunoError::NotExact(
                        "convergents left exact range before reaching precision".to_string(),
                    ));
                };
                if !done_by_depth && !exp.exhausted {
                    let li = ln_bigint(qi);
                    let li1 = exp.q[(i + 1).min(n)].ln().unwrap_or(f64::INFINITY);
                    if li + li1 < target {
                        // not precise enough yet; deepen
                        depth *= 2;
                        if depth > 1 << 20 {
                            return Err(BrjunoError::NotExact(
                                "cannot reach requested precision".to_string(),
                            ));
                        }
                        continue;
                    }
                }
                let mut v = BigFloat::from_ratio(pi, qi, bits);
                if self.negative {
                    v = v.neg();
                }
                return Ok(v);
            }
            depth *= 2;
            if depth > 1 << 20 {
                return Err(BrjunoError::NotExact(
                    "cannot reach requested precision".to_string(),
                ));
            }
        }
    }

    /// Exact rational value of a finite expansion.
    pub fn value_rational(&self) -> Option<BigRational> {
        let CfSource::Finite(qs) = &self.source else {
            return None;
        };
        let exp = self.expand(qs.len() - 1).ok()?;
        let p = exp.p.last()?.as_exact()?.clone();
        let q = exp.q.last()?.as_exact()?.clone();
        let v = BigRational::new(p, q);
        Some(if self.negative { -v } else { v })
    }
}

fn validate_quotients(qs: &[BigInt]) -> Result<(), BrjunoError> {
    if qs.is_empty() {
        return Err(BrjunoError::BadDepth("no quotients".to_string()));
    }
    if qs[0].is_negative() {
        return Err(BrjunoError::BadPartialQuotient {
            index: 0,
            got: qs[0].to_string(),
        });
    }
    for (i, a) in qs.iter().enumerate().skip(1) {
        if a < &BigInt::one() {
            return Err(BrjunoError::BadPartialQuotient {
                index: i,
                got: a.to_string(),
            });
        }
    }
    Ok(())
}

/// Euclidean expansion of an exact rational (applied to `|value|`; the
/// sign is carried on the result). Rational inputs terminate.
pub fn cf_expand_rational(value: &BigRational, depth: usize) -> Result<ContinuedFraction, BrjunoError> {
    let negative = value.is_negative();
    let mut num = value.numer().abs();
    let mut den = value.denom().clone();
    let mut quotients = Vec::new();
    for _ in 0..=depth {
        if den.is_zero() {
            break;
        }
        let a = num.clone() / den.clone();
        let r = num - &a * &den;
        quotients.push(a);
        num = den;
        den = r;
        if den.is_zero() {
            break;
        }
    }
    let finished = den.is_zero();
    let cf = if finished {
        ContinuedFraction::finite(quotients)?
    } else {
        ContinuedFraction {
            negative: false,
            source: CfSource::Truncated {
                quotients,
                exhausted: false,
            },
        }
    };
    Ok(ContinuedFraction { negative, ..cf })
}

/// Expansion of a high-precision float. Quotients are kept only while the
/// convergent denominators stay within the input's precision budget; when
/// the budget runs out before `depth`, the result is flagged exhausted
/// (reported, not fatal).
pub fn cf_expand_float(value: &BigFloat, depth: usize) -> Result<ContinuedFraction, BrjunoError> {
    let negative = value.is_negative();
    let exact = value.to_rational().abs();
    let bits = value.bits();
    // quotients are trustworthy while 2 ln q_n + ln a_{n+1} stays below
    // the precision budget
    let budget = (bits as f64 - 8.0) * std::f64::consts::LN_2;
    let full = cf_expand_rational(&exact, depth + 2)?;
    let (all, _finite) = match &full.source {
        CfSource::Finite(qs) => (qs.clone(), true),
        CfSource::Truncated { quotients, .. } => (quotients.clone(), false),
        _ => unreachable!(),
    };
    let mut kept: Vec<BigInt> = Vec::new();
    let mut q_prev = BigInt::zero();
    let mut q_cur = BigInt::one();
    let mut exhausted_at: Option<usize> = None;
    for (i, a) in all.iter().enumerate() {
        if i > 0 {
            let q_next = a * &q_cur + &q_prev;
            q_prev = std::mem::replace(&mut q_cur, q_next);
        }
        let spent = 2.0 * ln_bigint(&q_cur.clone().max(BigInt::one()))
            + ln_bigint(&a.clone().max(BigInt::one()));
        if i > 0 && spent >= budget {
            exhausted_at = Some(i);
            break;
        }
        kept.push(a.clone());
        if kept.len() > depth {
            break;
        }
    }
    let exhausted = exhausted_at.is_some() && kept.len() <= depth;
    Ok(ContinuedFraction {
        negative,
        source: CfSource::Truncated {
            quotients: kept,
            exhausted,
        },
    })
}

/// Brjuno partial sums `S_n = sum_{i=0}^{n} ln(q_{i+1})/q_i` for
/// `n = 0..=depth-1`, plus certified per-term lower bounds for rule CFs.
#[derive(Clone, Debug)]
pub struct BrjunoSums {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Per-term certified lower bounds (equal to `terms` for exact data).
    pub term_lower_bounds: Vec<f64>,
}

pub fn brjuno_sums(cf: &ContinuedFraction, depth: usize) -> Result<BrjunoSums, BrjunoError> {
    if depth == 0 {
        return Err(BrjunoError::BadDepth("depth must be >= 1".to_string()));
    }
    let exp = cf.expand(depth)?;
    let avail = exp.q.len().saturating_sub(1);
    if avail < depth {
        if let CfSource::Truncated { exhausted: true, .. } = &cf.source {
            return Err(BrjunoError::PrecisionExhausted {
                reached: avail,
                requested: depth,
            });
        }
        if avail == 0 {
            return Err(BrjunoError::DepthExceeded {
                requested: depth,
                available: avail,
            });
        }
    }
    let n_terms = avail.min(depth);
    let floor_ratio = match &cf.source {
        CfSource::Rule(rule) => rule.floor_ratio(),
        _ => 0.0,
    };
    let initial_len = match &cf.source {
        CfSource::Rule(rule) => rule.initial().len(),
        _ => 0,
    };
    let mut terms = Vec::with_capacity(n_terms);
    let mut lower = Vec::with_capacity(n_terms);
    let mut sums = Vec::with_capacity(n_terms);
    let mut acc = 0.0f64;
    for i in 0..n_terms {
        let (term, lb) = brjuno_term(&exp, i, floor_ratio, initial_len);
        acc += term.max(lb);
        terms.push(term);
        lower.push(lb);
        sums.push(acc);
    }
    Ok(BrjunoSums {
        terms,
        partial_sums: sums,
        term_lower_bounds: lower,
    })
}

/// Term `ln(q_{i+1})/q_i` with a certified lower bound.
fn brjuno_term(exp: &CfExpansion, i: usize, floor_ratio: f64, initial_len: usize) -> (f64, f64) {
    let qi = &exp.q[i];
    let qi1 = &exp.q[i + 1];
    let term = match (qi, qi1.ln()) {
        (Magnitude::Exact(q), Some(l1)) => {
            let qf = q.to_f64().unwrap_or(f64::INFINITY);
            if qf.is_finite() {
                l1 / qf
            } else {
                // q exact but beyond f64: term = l1 * exp(-ln q)
                l1 * (-ln_bigint(q)).exp()
            }
        }
        (Magnitude::Log(lq), Some(l1)) => l1 * (-lq).exp(),
        // Beyond log form: ln q_{i+1} ~ ln a_{i+1} + ln q_i and for rule
        // sources ln a_{i+1} >= floor_ratio * q_i, so the term is at
        // least floor_ratio with a vanishing correction.
        _ => {
            if floor_ratio > 0.0 {
                floor_ratio
            } else {
                0.0
            }
        }
    };
    // Certified lower bound: for rule-generated quotients (index i+1
    // beyond a_0 and the initial block), ln a_{i+1} >= floor_ratio * q_i
    // gives ln(q_{i+1})/q_i >= floor_ratio.
    let rule_generated = i + 1 >= 1 + initial_len;
    let lb = if floor_ratio > 0.0 && rule_generated {
        floor_ratio
    } else {
        0.0
    };
    (term, lb)
}

/// Rejects rules that violate the comparison-test growth floor
/// `a_{n+1} >= exp(q_n)` (checked on the first rule-generated quotients),
/// then wraps the rule as the continued fraction of a positive value in
/// (0, 1). Negate the result for the Liouville parameters used downstream.
pub fn make_liouville(rule: GrowthRule) -> Result<ContinuedFraction, BrjunoError> {
    if rule.floor_ratio() < 1.0 {
        return Err(BrjunoError::RuleBelowFloor {
            index: rule.initial().len() + 1,
            got: match &rule {
                GrowthRule::Const { value } => value.to_string(),
                _ => "rule".to_string(),
            },
        });
    }
    for (i, v) in rule.initial().iter().enumerate() {
        if *v < 1 {
            return Err(BrjunoError::BadPartialQuotient {
                index: i + 1,
                got: v.to_string(),
            });
        }
    }
    let cf = ContinuedFraction {
        negative: false,
        source: CfSource::Rule(rule),
    };
    // sanity: the first rule-generated terms must sit above the floor
    let check = brjuno_sums(&cf, 4)?;
    for (i, (t, lb)) in check
        .terms
        .iter()
        .zip(&check.term_lower_bounds)
        .enumerate()
    {
        if *lb > 0.0 && *t < 0.9 {
            return Err(BrjunoError::RuleBelowFloor {
                index: i + 1,
                got: format!("term {t}"),
            });
        }
    }
    Ok(cf)
}

/// Tri-state membership answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaFlags {
    pub in_sigma_sm: Tri,
    pub in_sigma_an: Tri,
}

/// What is known about alpha's arithmetic.
#[derive(Clone, Debug)]
pub enum AlphaClass {
    /// Exactly known rational value.
    Rational(BigRational),
    /// Irrational with a continued-fraction description (sign known).
    IrrationalCf(ContinuedFraction),
    /// Float value with no exactness certificate.
    FloatOnly(BigFloat),
}

/// Membership in the exceptional parameter sets.
///
/// The smooth set is `{alpha <= 0}` together with the integers `>= 3` and
/// the reciprocals `1/m, m >= 2`; the analytic set replaces the closed
/// half-line by the negative rationals and zero. The analytic set is
/// contained in the smooth one, and that containment is asserted on every
/// output.
pub fn sigma_membership(alpha: &AlphaClass) -> SigmaFlags {
    let flags = match alpha {
        AlphaClass::Rational(r) => {
            let special_positive = is_integer_ge3(r) || is_reciprocal(r);
            let nonpositive = !r.is_positive();
            let yes = nonpositive || special_positive;
            let t = if yes { Tri::Yes } else { Tri::No };
            SigmaFlags {
                in_sigma_sm: t,
                in_sigma_an: t,
            }
        }
        AlphaClass::IrrationalCf(cf) => {
            if cf.negative {
                SigmaFlags {
                    in_sigma_sm: Tri::Yes,
                    in_sigma_an: Tri::No,
                }
            } else {
                SigmaFlags {
                    in_sigma_sm: Tri::No,
                    in_sigma_an: Tri::No,
                }
            }
        }
        AlphaClass::FloatOnly(v) => {
            if v.is_negative() {
                SigmaFlags {
                    in_sigma_sm: Tri::Yes,
                    in_sigma_an: Tri::Unknown,
                }
            } else {
                SigmaFlags {
                    in_sigma_sm: Tri::Unknown,
                    in_sigma_an: Tri::Unknown,
                }
            }
        }
    };
    assert!(
        !(flags.in_sigma_an == Tri::Yes && flags.in_sigma_sm != Tri::Yes),
        "analytic set must sit inside the smooth set"
    );
    flags
}

fn is_integer_ge3(r: &BigRational) -> bool {
    r.is_integer() && r.numer() >= &BigInt::from(3)
}

fn is_reciprocal(r: &BigRational) -> bool {
    r.numer() == &BigInt::one() && r.denom() >= &BigInt::from(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BrjunoDecision {
    Brjuno,
    NonBrjuno,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CertReason {
    /// Finite expansion: the sum has finitely many terms.
    FiniteExpansion,
    /// Eventually periodic expansion: partial quotients are bounded.
    BoundedPartialQuotients { bound: String },
    /// Growth rule with certified per-term floor: comparison test diverges.
    ComparisonDivergence {
        sum_lower_bound: f64,
        certified_depth: usize,
    },
    /// Finite data cannot certify a limit property.
    DepthExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrjunoCertificate {
    pub decision: BrjunoDecision,
    pub depth_used: usize,
    pub partial_sums: Vec<f64>,
    pub reason: CertReason,
}

#[derive(Clone, Copy, Debug)]
pub struct DecidePolicy {
    pub depth: usize,
    pub divergence_threshold: f64,
}

impl Default for DecidePolicy {
    fn default() -> Self {
        DecidePolicy {
            depth: 64,
            divergence_threshold: 10.0,
        }
    }
}

/// Certified (or explicitly inconclusive) Brjuno decision.
///
/// Certification never comes from numerics alone: a `Brjuno` verdict
/// requires bounded partial quotients (periodic tail or finite data), a
/// `NonBrjuno` verdict requires a growth rule whose comparison-test floor
/// is verified term by term.
pub fn brjuno_decide(
    cf: &ContinuedFraction,
    policy: DecidePolicy,
) -> Result<BrjunoCertificate, BrjunoError> {
    match &cf.source {
        CfSource::Finite(qs) => {
            let depth = qs.len().saturating_sub(1).max(1);
            let sums = brjuno_sums(cf, depth)?;
            Ok(BrjunoCertificate {
                decision: BrjunoDecision::Brjuno,
                depth_used: depth,
                partial_sums: sums.partial_sums,
                reason: CertReason::FiniteExpansion,
            })
        }
        CfSource::Periodic { head, cycle } => {
            let bound = head
                .iter()
                .chain(cycle.iter())
                .max()
                .cloned()
                .unwrap_or_else(BigInt::one);
            let sums = brjuno_sums(cf, policy.depth)?;
            Ok(BrjunoCertificate {
                decision: BrjunoDecision::Brjuno,
                depth_used: policy.depth,
                partial_sums: sums.partial_sums,
                reason: CertReason::BoundedPartialQuotients {
                    bound: bound.to_string(),
                },
            })
        }
        CfSource::Rule(rule) => {
            if rule.floor_ratio() >= 1.0 {
                let sums = brjuno_sums(cf, policy.depth)?;
                let lb: f64 = sums
                    .term_lower_bounds
                    .iter()
                    .zip(&sums.terms)
                    .map(|(lb, t)| t.max(*lb))
                    .sum();
                if lb > policy.divergence_threshold {
                    Ok(BrjunoCertificate {
                        decision: BrjunoDecision::NonBrjuno,
                        depth_used: policy.depth,
                        partial_sums: sums.partial_sums,
                        reason: CertReason::ComparisonDivergence {
                            sum_lower_bound: lb,
                            certified_depth: policy.depth,
                        },
                    })
                } else {
                    Ok(BrjunoCertificate {
                        decision: BrjunoDecision::Inconclusive,
                        depth_used: policy.depth,
                        partial_sums: sums.partial_sums,
                        reason: CertReason::DepthExhausted,
                    })
                }
            } else {
                // bounded-quotient rule: certified Brjuno
                let sums = brjuno_sums(cf, policy.depth)?;
                Ok(BrjunoCertificate {
                    decision: BrjunoDecision::Brjuno,
                    depth_used: policy.depth,
                    partial_sums: sums.partial_sums,
                    reason: CertReason::BoundedPartialQuotients {
                        bound: "constant rule".to_string(),
                    },
                })
            }
        }
        CfSource::Truncated { quotients, .. } => {
            let avail = quotients.len().saturating_sub(1).max(1);
            let depth = policy.depth.min(avail);
            let sums = brjuno_sums(cf, depth)?;
            Ok(BrjunoCertificate {
                decision: BrjunoDecision::Inconclusive,
                depth_used: depth,
                partial_sums: sums.partial_sums,
                reason: CertReason::DepthExhausted,
            })
        }
    }
}

/// A parsed `--alpha` specification.
#[derive(Clone, Debug)]
pub enum AlphaSpec {
    /// Exact rational (also covers decimal literals, which are rational).
    Exact(BigRational),
    /// Continued-fraction description.
    Cf(ContinuedFraction),
}

/// Parse an alpha spec:
/// rational/decimal literals (`-2/3`, `1.5e-2`), finite continued
/// fractions `cf:[a0;a1,a2]`, eventually periodic ones with the repeating
/// block in parentheses `cf:[1;(1)]`, and growth rules
/// `liouville:exp-floor[:n1,n2,...]`, `liouville:pow10-floor[:...]`.
/// A leading `-` negates any of these.
pub fn parse_alpha_spec(s: &str) -> Result<AlphaSpec, BrjunoError> {
    let t = s.trim();
    let (negate, t) = match t.strip_prefix('-') {
        Some(rest) if rest.trim_start().starts_with("cf:") || rest.trim_start().starts_with("liouville:") => {
            (true, rest.trim_start())
        }
        _ => (false, t),
    };
    if let Some(body) = t.strip_prefix("cf:") {
        let cf = parse_cf_notation(body)?;
        return Ok(AlphaSpec::Cf(if negate { cf.negated() } else { cf }));
    }
    if let Some(body) = t.strip_prefix("liouville:") {
        let cf = parse_liouville_spec(body)?;
        return Ok(AlphaSpec::Cf(if negate { cf.negated() } else { cf }));
    }
    match crate::coeff::parse_rational(t) {
        Ok(r) => Ok(AlphaSpec::Exact(r)),
        Err(_) => Err(BrjunoError::BadCfSpec(s.to_string())),
    }
}

/// `[a0; a1, a2, ...]` with an optional trailing `(c1, c2, ...)` cycle.
pub fn parse_cf_notation(s: &str) -> Result<ContinuedFraction, BrjunoError> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| BrjunoError::BadCfSpec(s.to_string()))?;
    let (a0_text, rest) = match inner.split_once(';') {
        Some((a, r)) => (a.trim(), r.trim()),
        None => (inner.trim(), ""),
    };
    let a0: BigInt = a0_text
        .parse()
        .map_err(|_| BrjunoError::BadCfSpec(s.to_string()))?;
    let mut head = vec![a0];
    let mut cycle: Vec<BigInt> = Vec::new();
    if !rest.is_empty() {
        let (plain, cyc) = match rest.split_once('(') {
            Some((p, c)) => {
                let c = c
                    .strip_suffix(')')
                    .ok_or_else(|| BrjunoError::BadCfSpec(s.to_string()))?;
                (p.trim().trim_end_matches(','), c)
            }
            None => (rest, ""),
        };
        for part in plain.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            head.push(
                part.parse()
                    .map_err(|_| BrjunoError::BadCfSpec(s.to_string()))?,
            );
        }
        for part in cyc.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            cycle.push(
                part.parse()
                    .map_err(|_| BrjunoError::BadCfSpec(s.to_string()))?,
            );
        }
    }
    if cycle.is_empty() {
        ContinuedFraction::finite(head)
    } else {
        ContinuedFraction::periodic(head, cycle)
    }
}

fn parse_liouville_spec(s: &str) -> Result<ContinuedFraction, BrjunoError> {
    let (name, params) = match s.split_once(':') {
        Some((n, p)) => (n.trim(), p.trim()),
        None => (s.trim(), ""),
    };
    let initial: Vec<u64> = if params.is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| BrjunoError::BadCfSpec(s.to_string()))
            })
            .collect::<Result<_, _>>()?
    };
    let rule = match name {
        "exp-floor" => GrowthRule::ExpFloor { initial },
        "pow10-floor" => GrowthRule::Pow10Floor { initial },
        "const" => GrowthRule::Const {
            value: *initial.first().unwrap_or(&1),
        },
        _ => return Err(BrjunoError::BadCfSpec(s.to_string())),
    };
    make_liouville(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn expand_seven_thirds() {
        let v = BigRational::new(big(7), big(3));
        let cf = cf_expand_rational(&v, 10).unwrap();
        assert!(!cf.negative);
        assert_eq!(cf.source, CfSource::Finite(vec![big(2), big(3)]));
        assert_eq!(cf.value_rational().unwrap(), v);
        // negative values carry the sign separately
        let neg = cf_expand_rational(&(-v.clone()), 10).unwrap();
        assert!(neg.negative);
        assert_eq!(neg.source, CfSource::Finite(vec![big(2), big(3)]));
        assert_eq!(neg.value_rational().unwrap(), -v);
    }

    #[test]
    fn golden_mean_fibonacci_denominators() {
        let cf = ContinuedFraction::golden();
        let exp = cf.expand(30).unwrap();
        let mut fib = vec![big(1), big(1)];
        for i in 2..=30 {
            let next = &fib[i - 1] + &fib[i - 2];
            fib.push(next);
        }
        for (i, q) in exp.q.iter().enumerate() {
            assert_eq!(q.as_exact().unwrap(), &fib[i], "q_{i}");
        }
        // float expansion of the golden mean reproduces all-ones quotients
        let phi = {
            let five = BigFloat::from_i64(5, 256);
            let s = five.sqrt().unwrap();
            s.add(&BigFloat::from_i64(1, 256))
                .div(&BigFloat::from_i64(2, 256))
                .unwrap()
        };
        let fcf = cf_expand_float(&phi, 40).unwrap();
        if let CfSource::Truncated { quotients, .. } = &fcf.source {
            assert!(quotients.len() >= 41);
            assert!(quotients[..41].iter().all(|a| a == &big(1)));
        } else {
            panic!("expected truncated source");
        }
    }

    #[test]
    fn sqrt_two_periodic_quotients() {
        let two = BigFloat::from_i64(2, 256);
        let r = two.sqrt().unwrap();
        let cf = cf_expand_float(&r, 30).unwrap();
        if let CfSource::Truncated { quotients, .. } = &cf.source {
            assert_eq!(quotients[0], big(1));
            assert!(quotients[1..31].iter().all(|a| a == &big(2)));
        } else {
            panic!("expected truncated source");
        }
    }

    #[test]
    fn convergent_identities_golden_depth_500() {
        let exp = ContinuedFraction::golden().expand(500).unwrap();
        for n in 2..=500usize {
            let (a, q1, q0) = (
                exp.quotients[n].as_exact().unwrap(),
                exp.q[n - 1].as_exact().unwrap(),
                exp.q[n - 2].as_exact().unwrap(),
            );
            assert_eq!(exp.q[n].as_exact().unwrap(), &(a * q1 + q0));
            let (p, p1, p0) = (
                exp.p[n].as_exact().unwrap(),
                exp.p[n - 1].as_exact().unwrap(),
                exp.p[n - 2].as_exact().unwrap(),
            );
            assert_eq!(p, &(a * p1 + p0));
            // determinant identity
            let det = exp.p[n].as_exact().unwrap() * exp.q[n - 1].as_exact().unwrap()
                - exp.p[n - 1].as_exact().unwrap() * exp.q[n].as_exact().unwrap();
            assert!(det == big(1) || det == big(-1));
        }
    }

    #[test]
    fn golden_value_at_256_bits() {
        let v = ContinuedFraction::golden().value_bigfloat(256).unwrap();
        let expect = {
            let five = BigFloat::from_i64(5, 256);
            five.sqrt()
                .unwrap()
                .add(&BigFloat::from_i64(1, 256))
                .div(&BigFloat::from_i64(2, 256))
                .unwrap()
        };
        let diff = v.sub(&expect).abs();
        // agreement to within a few ulps at 256 bits
        let tol = BigFloat::from_ratio(&big(1), &(big(1) << 250u32), 256);
        assert!(diff.partial_cmp(&tol).unwrap().is_lt(), "diff {diff}");
    }

    #[test]
    fn partial_sums_monotone_and_small_increments() {
        let sums = brjuno_sums(&ContinuedFraction::golden(), 60).unwrap();
        for w in sums.partial_sums.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(sums.terms.iter().all(|t| *t >= 0.0));
        // increments decay geometrically for bounded quotients
        assert!(sums.terms[50] < 1e-9);
    }

    #[test]
    fn exp_floor_rule_quotients() {
        let cf = make_liouville(GrowthRule::ExpFloor { initial: vec![] }).unwrap();
        let exp = cf.expand(4).unwrap();
        // a_1 = floor(e)+1 = 3, a_2 = floor(e^3)+1 = 21, q_2 = 64
        assert_eq!(exp.quotients[1].as_exact().unwrap(), &big(3));
        assert_eq!(exp.quotients[2].as_exact().unwrap(), &big(21));
        assert_eq!(exp.q[2].as_exact().unwrap(), &big(64));
        // a_3 = floor(e^64)+1 has 28 digits starting 6235149...
        let a3 = exp.quotients[3].as_exact().unwrap().to_string();
        assert_eq!(a3.len(), 28);
        assert!(a3.starts_with("6235149"));
        // a_4 is way beyond exact range but its log is about q_3
        let lnq3 = exp.q[3].as_exact().unwrap();
        let la4 = exp.quotients[4].ln().unwrap();
        let q3f = lnq3.to_f64().unwrap();
        assert!((la4 - q3f).abs() / q3f < 1e-12);
    }

    #[test]
    fn liouville_sums_diverge_and_certify() {
        let cf = make_liouville(GrowthRule::ExpFloor { initial: vec![] }).unwrap();
        let sums = brjuno_sums(&cf, 14).unwrap();
        assert!(sums.partial_sums.last().unwrap() > &10.0);
        let cert = brjuno_decide(&cf, DecidePolicy::default()).unwrap();
        assert_eq!(cert.decision, BrjunoDecision::NonBrjuno);
        assert!(matches!(
            cert.reason,
            CertReason::ComparisonDivergence { sum_lower_bound, .. } if sum_lower_bound > 10.0
        ));

        let p10 = make_liouville(GrowthRule::Pow10Floor { initial: vec![] }).unwrap();
        let cert = brjuno_decide(&p10, DecidePolicy::default()).unwrap();
        assert_eq!(cert.decision, BrjunoDecision::NonBrjuno);
    }

    #[test]
    fn constant_rule_rejected_by_liouville_builder() {
        let err = make_liouville(GrowthRule::Const { value: 1 }).unwrap_err();
        assert!(matches!(err, BrjunoError::RuleBelowFloor { .. }));
    }

    #[test]
    fn golden_certified_brjuno_and_float_inconclusive() {
        let cert = brjuno_decide(&ContinuedFraction::golden(), DecidePolicy::default()).unwrap();
        assert_eq!(cert.decision, BrjunoDecision::Brjuno);
        assert!(matches!(
            cert.reason,
            CertReason::BoundedPartialQuotients { .. }
        ));

        // a float value at 256 bits gives finite data only
        let phi = ContinuedFraction::golden().value_bigfloat(256).unwrap();
        let fcf = cf_expand_float(&phi, 200).unwrap();
        let cert = brjuno_decide(
            &fcf,
            DecidePolicy {
                depth: 200,
                divergence_threshold: 10.0,
            },
        )
        .unwrap();
        assert_eq!(cert.decision, BrjunoDecision::Inconclusive);
        assert_eq!(cert.reason, CertReason::DepthExhausted);
    }

    #[test]
    fn sigma_membership_examples() {
        use Tri::*;
        let r = |n: i64, d: i64| AlphaClass::Rational(BigRational::new(big(n), big(d)));
        let f = sigma_membership(&r(-2, 3));
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (Yes, Yes));
        let f = sigma_membership(&r(3, 1));
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (Yes, Yes));
        let f = sigma_membership(&r(2, 1));
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (No, No));
        let f = sigma_membership(&r(1, 2));
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (Yes, Yes));
        let f = sigma_membership(&r(0, 1));
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (Yes, Yes));
        let f = sigma_membership(&r(7, 5));
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (No, No));

        let pos = AlphaClass::IrrationalCf(ContinuedFraction::golden());
        let f = sigma_membership(&pos);
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (No, No));
        let neg = AlphaClass::IrrationalCf(ContinuedFraction::golden().negated());
        let f = sigma_membership(&neg);
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (Yes, No));

        let fv = AlphaClass::FloatOnly(BigFloat::from_f64(-0.7, 128));
        let f = sigma_membership(&fv);
        assert_eq!((f.in_sigma_sm, f.in_sigma_an), (Yes, Unknown));
    }

    #[test]
    fn alpha_spec_parsing() {
        match parse_alpha_spec("-2/3").unwrap() {
            AlphaSpec::Exact(r) => assert_eq!(r, BigRational::new(big(-2), big(3))),
            _ => panic!(),
        }
        match parse_alpha_spec("cf:[1;(1)]").unwrap() {
            AlphaSpec::Cf(cf) => {
                assert_eq!(cf, ContinuedFraction::golden());
            }
            _ => panic!(),
        }
        match parse_alpha_spec("-cf:[1;2,(3,4)]").unwrap() {
            AlphaSpec::Cf(cf) => {
                assert!(cf.negative);
                match cf.source {
                    CfSource::Periodic { head, cycle } => {
                        assert_eq!(head, vec![big(1), big(2)]);
                        assert_eq!(cycle, vec![big(3), big(4)]);
                    }
                    _ => panic!(),
                }
            }
            _ => panic!(),
        }
        match parse_alpha_spec("-liouville:exp-floor:70").unwrap() {
            AlphaSpec::Cf(cf) => {
                assert!(cf.negative);
                let exp = cf.expand(2).unwrap();
                assert_eq!(exp.quotients[1].as_exact().unwrap(), &big(70));
            }
            _ => panic!(),
        }
        assert!(parse_alpha_spec("liouville:const:1").is_err());
        assert!(parse_alpha_spec("cf:[1;0]").is_err());
        assert!(parse_alpha_spec("nonsense:[1]").is_err());
    }

    #[test]
    fn rational_reconstruction_at_final_convergent() {
        for (n, d) in [(355i64, 113i64), (-22, 7), (1, 1), (8, 5), (1234567, 89)] {
            let v = BigRational::new(big(n), big(d));
            let cf = cf_expand_rational(&v, 64).unwrap();
            assert_eq!(cf.value_rational().unwrap(), v);
        }
    }
}
