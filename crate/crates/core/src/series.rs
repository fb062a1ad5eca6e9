//! Truncated multivariate formal power series.
//!
//! A [`Series`] is a sparse polynomial in `n` named variables, truncated at
//! a fixed total degree `N` (inclusive): products silently drop terms of
//! degree `> N`, matching the degree-graded induction used everywhere else
//! in this crate. Stored terms never have zero coefficients and never
//! exceed the truncation order; iteration follows a canonical graded
//! lexicographic order, so printing and serialization are deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::coeff::{Coeff, CoeffMode, CoeffParse};
use crate::error::SeriesError;

/// Ordered list of variable names, compared by content.
#[derive(Clone, Debug, Eq)]
pub struct Vars(Arc<Vec<String>>);

impl Vars {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        assert!(!names.is_empty(), "at least one variable required");
        Vars(Arc::new(names))
    }

    pub fn xy() -> Self {
        Vars::new(["x", "y"])
    }

    pub fn uv() -> Self {
        Vars::new(["u", "v"])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Display for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(", "))
    }
}

/// Exponent vector, ordered by total degree then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn constant(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Mono(e)
    }

    fn product(&self, other: &Self) -> Self {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse truncated power series over a coefficient field `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C: Coeff> {
    vars: Vars,
    trunc: u32,
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> Series<C> {
    pub fn zero(vars: Vars, trunc: u32) -> Self {
        Series {
            vars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// Single-term series; terms beyond the truncation order are rejected.
    pub fn monomial(vars: Vars, trunc: u32, exps: &[u32], coef: C) -> Result<Self, SeriesError> {
        let mut s = Self::zero(vars, trunc);
        s.add_term(exps, coef)?;
        Ok(s)
    }

    /// The coordinate series `x_index`.
    pub fn var(vars: Vars, trunc: u32, index: usize, one: C) -> Result<Self, SeriesError> {
        let nv = vars.len();
        assert!(index < nv, "variable index out of range");
        Self::monomial(vars, trunc, &Mono::var(nv, index).0, one)
    }

    pub fn constant(vars: Vars, trunc: u32, value: C) -> Self {
        let nv = vars.len();
        let mut s = Self::zero(vars, trunc);
        if !value.is_zero() {
            s.terms.insert(Mono::constant(nv), value);
        }
        s
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Option<&C> {
        self.terms.get(&Mono(exps.to_vec()))
    }

    pub fn constant_term(&self) -> Option<&C> {
        self.terms.get(&Mono::constant(self.vars.len()))
    }

    pub fn max_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Any stored coefficient, used as a context prototype.
    pub fn proto(&self) -> Option<&C> {
        self.terms.values().next()
    }

    pub fn add_term(&mut self, exps: &[u32], coef: C) -> Result<(), SeriesError> {
        assert_eq!(exps.len(), self.vars.len(), "exponent arity mismatch");
        let mono = Mono(exps.to_vec());
        let degree = mono.total_degree();
        if degree > self.trunc {
            return Err(SeriesError::TermBeyondTruncation {
                degree,
                truncation: self.trunc,
            });
        }
        if coef.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&mono) {
            None => {
                self.terms.insert(mono, coef);
            }
            Some(old) => {
                let sum = old.add(&coef);
                if !sum.is_zero() {
                    self.terms.insert(mono, sum);
                }
            }
        }
        Ok(())
    }

    fn check_compat(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars != other.vars {
            return Err(SeriesError::VarMismatch(
                self.vars.to_string(),
                other.vars.to_string(),
            ));
        }
        if self.trunc != other.trunc {
            return Err(SeriesError::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compat(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            match out.terms.remove(m) {
                None => {
                    out.terms.insert(m.clone(), c.clone());
                }
                Some(old) => {
                    let sum = old.add(c);
                    if !sum.is_zero() {
                        out.terms.insert(m.clone(), sum);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, factor: &C) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.trunc);
        if factor.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            let p = c.mul(factor);
            if !p.is_zero() {
                out.terms.insert(m.clone(), p);
            }
        }
        out
    }

    pub fn scale_int(&self, n: i64) -> Self {
        match self.proto() {
            None => self.clone(),
            Some(p) => self.scale(&p.of_int(n)),
        }
    }

    /// Convolution product; terms of degree `> N` are discarded.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compat(other)?;
        let mut out = Self::zero(self.vars.clone(), self.trunc);
        for (ma, ca) in &self.terms {
            let da = ma.total_degree();
            for (mb, cb) in &other.terms {
                if da + mb.total_degree() > self.trunc {
                    continue;
                }
                let m = ma.product(mb);
                let p = ca.mul(cb);
                if p.is_zero() {
                    continue;
                }
                match out.terms.remove(&m) {
                    None => {
                        out.terms.insert(m, p);
                    }
                    Some(old) => {
                        let sum = old.add(&p);
                        if !sum.is_zero() {
                            out.terms.insert(m, sum);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to the variable at `index`.
    pub fn derivative(&self, index: usize) -> Result<Self, SeriesError> {
        if index >= self.vars.len() {
            return Err(SeriesError::UnknownVariable(format!("#{index}")));
        }
        let mut out = Self::zero(self.vars.clone(), self.trunc);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] = e - 1;
            let coef = c.scale_int(e as i64);
            if !coef.is_zero() {
                out.terms.insert(Mono(exps), coef);
            }
        }
        Ok(out)
    }

    pub fn derivative_by_name(&self, name: &str) -> Result<Self, SeriesError> {
        let idx = self
            .vars
            .index_of(name)
            .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))?;
        self.derivative(idx)
    }

    /// The degree-`k` homogeneous slice.
    pub fn homogeneous_part(&self, k: u32) -> Result<HomogeneousPart<C>, SeriesError> {
        if k > self.trunc {
            return Err(SeriesError::DegreeOutOfRange {
                degree: k,
                max: self.trunc,
            });
        }
        let mut s = Self::zero(self.vars.clone(), self.trunc);
        for (m, c) in &self.terms {
            if m.total_degree() == k {
                s.terms.insert(m.clone(), c.clone());
            }
        }
        Ok(HomogeneousPart { degree: k, series: s })
    }

    /// Keep only terms of total degree `<= k`.
    pub fn truncate_to_degree(&self, k: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|m, _| m.total_degree() <= k);
        out
    }

    /// Substitute `args[i]` for variable `i`. Every argument must share
    /// variables and truncation and have zero constant term.
    pub fn compose(&self, args: &[Series<C>]) -> Result<Self, SeriesError> {
        let mut cache = PowerCache::new(args, self.vars.len(), self.trunc)?;
        self.compose_cached(&mut cache)
    }

    fn compose_cached(&self, cache: &mut PowerCache<C>) -> Result<Self, SeriesError> {
        let out_vars = cache.vars.clone();
        let mut acc = Series::zero(out_vars.clone(), self.trunc);
        for (m, c) in &self.terms {
            let mut prod = Series::constant(out_vars.clone(), self.trunc, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if prod.is_zero() {
                    break;
                }
                prod = prod.mul(cache.power(i, e)?)?;
            }
            acc = acc.add(&prod)?;
        }
        Ok(acc)
    }

    /// Evaluate at a point given by one coefficient per variable.
    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.vars.len(), "point arity mismatch");
        let zero = point[0].of_int(0);
        let mut acc = zero.clone();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&point[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Drop coefficients failing the predicate (float-mode dust removal).
    pub fn retain_coeffs(&self, keep: impl Fn(&C) -> bool) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, c| keep(c));
        out
    }

    /// Largest coefficient magnitude, as f64 (0 for the zero series).
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.abs_f64())
            .fold(0.0, f64::max)
    }
}

/// Composes many series against one argument tuple, sharing power tables.
pub struct PowerCache<'a, C: Coeff> {
    args: &'a [Series<C>],
    vars: Vars,
    powers: Vec<Vec<Series<C>>>,
}

impl<'a, C: Coeff> PowerCache<'a, C> {
    pub fn new(args: &'a [Series<C>], expected: usize, trunc: u32) -> Result<Self, SeriesError> {
        if args.len() != expected {
            return Err(SeriesError::ArgCountMismatch {
                expected,
                got: args.len(),
            });
        }
        for (i, a) in args.iter().enumerate() {
            if a.truncation() != trunc {
                return Err(SeriesError::TruncationMismatch(trunc, a.truncation()));
            }
            if i > 0 {
                args[0].check_compat(a)?;
            }
            if a.constant_term().is_some() {
                return Err(SeriesError::ConstantTermInArg { index: i });
            }
        }
        let vars = args
            .first()
            .map(|a| a.vars().clone())
            .unwrap_or_else(Vars::xy);
        Ok(PowerCache {
            args,
            vars,
            powers: vec![Vec::new(); expected],
        })
    }

    fn power(&mut self, i: usize, e: u32) -> Result<&Series<C>, SeriesError> {
        let col = &mut self.powers[i];
        if col.is_empty() {
            col.push(self.args[i].clone()); // power 1
        }
        while col.len() < e as usize {
            let next = col.last().unwrap().mul(&self.args[i])?;
            col.push(next);
        }
        Ok(&col[e as usize - 1])
    }

    /// Substitute the cached arguments into each of `fs`.
    pub fn compose_all(&mut self, fs: &[Series<C>]) -> Result<Vec<Series<C>>, SeriesError> {
        fs.iter().map(|f| f.compose_cached(self)).collect()
    }
}

/// Substitute `args` into each series of `fs`, sharing the power tables.
pub fn compose_many<C: Coeff>(
    fs: &[Series<C>],
    args: &[Series<C>],
) -> Result<Vec<Series<C>>, SeriesError> {
    let nv = fs
        .first()
        .map(|f| f.vars().len())
        .unwrap_or(args.len());
    let trunc = fs.first().map(|f| f.truncation()).unwrap_or(0);
    let mut cache = PowerCache::new(args, nv, trunc)?;
    cache.compose_all(fs)
}

/// A series whose stored terms all share one total degree.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPart<C: Coeff> {
    degree: u32,
    series: Series<C>,
}

impl<C: Coeff> HomogeneousPart<C> {
    pub fn new(degree: u32, series: Series<C>) -> Result<Self, SeriesError> {
        for (m, _) in series.terms() {
            if m.total_degree() != degree {
                return Err(SeriesError::DegreeOutOfRange {
                    degree: m.total_degree(),
                    max: degree,
                });
            }
        }
        Ok(HomogeneousPart { degree, series })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn series(&self) -> &Series<C> {
        &self.series
    }

    pub fn into_series(self) -> Series<C> {
        self.series
    }
}

/// Parse the text polynomial grammar: terms joined by `+`/`-`, each term
/// `[coef*]var[^exp][*var[^exp]]...`, coefficients `p/q` or decimal
/// literals. A `+`/`-` directly after `e`/`E` in a decimal literal is an
/// exponent sign, not a term separator.
pub fn parse_polynomial<C: CoeffParse>(
    input: &str,
    vars: &Vars,
    trunc: u32,
    mode: CoeffMode,
) -> Result<Series<C>, SeriesError> {
    let mut out = Series::zero(vars.clone(), trunc);
    if input.trim().is_empty() {
        return Err(SeriesError::Parse {
            at: 0,
            reason: "empty polynomial".to_string(),
        });
    }
    let chars: Vec<char> = input.chars().collect();
    let mut term_start = 0usize;
    let mut pieces: Vec<(usize, String, bool)> = Vec::new(); // (offset, text, negate)
    let mut negate = false;
    let mut buf = String::new();
    let mut prev_significant: Option<char> = None;
    for (i, &ch) in chars.iter().enumerate() {
        if ch == '+' || ch == '-' {
            let exponent_sign = matches!(prev_significant, Some('e') | Some('E'))
                && buf.chars().rev().nth(1).map_or(false, |c| c.is_ascii_digit() || c == '.');
            let at_term_start = buf.trim().is_empty();
            if exponent_sign || at_term_start {
                if at_term_start && ch == '-' {
                    negate = !negate;
                    prev_significant = Some(ch);
                    continue;
                }
                if at_term_start {
                    prev_significant = Some(ch);
                    continue;
                }
                buf.push(ch);
            } else {
                pieces.push((term_start, std::mem::take(&mut buf), negate));
                negate = ch == '-';
                term_start = i + 1;
                prev_significant = None;
                continue;
            }
        } else {
            buf.push(ch);
        }
        if !ch.is_whitespace() {
            prev_significant = Some(ch);
        }
    }
    pieces.push((term_start, buf, negate));

    for (offset, text, negate) in pieces {
        if text.trim().is_empty() {
            return Err(SeriesError::Parse {
                at: offset,
                reason: "empty term".to_string(),
            });
        }
        let (mono, coef) = parse_term::<C>(&text, vars, mode, offset)?;
        let coef = if negate { coef.neg() } else { coef };
        let degree: u32 = mono.iter().sum();
        if degree > trunc {
            return Err(SeriesError::TermBeyondTruncation {
                degree,
                truncation: trunc,
            });
        }
        out.add_term(&mono, coef)?;
    }
    Ok(out)
}

fn parse_term<C: CoeffParse>(
    text: &str,
    vars: &Vars,
    mode: CoeffMode,
    offset: usize,
) -> Result<(Vec<u32>, C), SeriesError> {
    let mut exps = vec![0u32; vars.len()];
    let mut coef = C::one_in_mode(mode)?;
    for factor in text.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(SeriesError::Parse {
                at: offset,
                reason: "empty factor".to_string(),
            });
        }
        if factor.chars().next().unwrap().is_alphabetic() {
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => {
                    let exp: u32 = e.trim().parse().map_err(|_| SeriesError::Parse {
                        at: offset,
                        reason: format!("bad exponent `{e}`"),
                    })?;
                    (n.trim(), exp)
                }
                None => (factor, 1),
            };
            let idx = vars
                .index_of(name)
                .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))?;
            exps[idx] += exp;
        } else {
            let c = C::parse_in_mode(factor, mode).map_err(|e| SeriesError::Parse {
                at: offset,
                reason: e.to_string(),
            })?;
            coef = coef.mul(&c);
        }
    }
    Ok((exps, coef))
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.vars.names();
        let mut first = true;
        for (m, c) in &self.terms {
            // Both coefficient reprs ("p/q" and decimal) prefix '-' on
            // negative values, so the sign can be read off the text.
            let repr = c.repr();
            let (sign_neg, mag) = match repr.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, repr),
            };
            if first {
                if sign_neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign_neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_constant = m.total_degree() == 0;
            let mag_is_one = mag == "1";
            if is_constant || !mag_is_one {
                write!(f, "{mag}")?;
                if !is_constant {
                    write!(f, "*")?;
                }
            }
            let mut first_factor = true;
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_factor {
                    write!(f, "*")?;
                }
                first_factor = false;
                write!(f, "{}", names[i])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{parse_rational, Rat};

    fn rs(text: &str, trunc: u32) -> Series<Rat> {
        parse_polynomial(text, &Vars::xy(), trunc, CoeffMode::Rational).unwrap()
    }

    #[test]
    fn add_cancellation_and_identity() {
        let n = 4;
        assert_eq!(rs("x + y", n).add(&rs("x - y", n)).unwrap(), rs("2*x", n));
        let f = rs("3/2*x^2*y - y^3", n);
        let zero = Series::zero(Vars::xy(), n);
        assert_eq!(f.add(&zero).unwrap(), f);
    }

    #[test]
    fn add_exact_rationals() {
        let n = 2;
        let lhs = rs("1/2*x^2", n).add(&rs("1/3*x^2", n)).unwrap();
        assert_eq!(lhs, rs("5/6*x^2", n));
        assert_eq!(
            lhs.coefficient(&[2, 0]).unwrap(),
            &parse_rational("5/6").unwrap()
        );
    }

    #[test]
    fn mul_basics_and_truncation() {
        assert_eq!(rs("x", 3).mul(&rs("y", 3)).unwrap(), rs("x*y", 3));
        // with N = 2, x^2 * y truncates to zero
        assert!(rs("x^2", 2).mul(&rs("y", 2)).unwrap().is_zero());
    }

    #[test]
    fn geometric_series_inverse() {
        // (1 + x) * (1 - x + x^2 - x^3 + ...) = 1 up to degree N
        let n = 9;
        let one_plus = rs("1 + x", n);
        let mut geo = Series::zero(Vars::xy(), n);
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            geo.add_term(&[k, 0], parse_rational(&sign.to_string()).unwrap())
                .unwrap();
        }
        assert_eq!(one_plus.mul(&geo).unwrap(), rs("1", n));
    }

    #[test]
    fn compose_examples() {
        let n = 3;
        // f = x, args = (x + y^2, y)
        let f = rs("x", n);
        let got = f.compose(&[rs("x + y^2", n), rs("y", n)]).unwrap();
        assert_eq!(got, rs("x + y^2", n));
        // f = x*y, args = (x, x)
        let f = rs("x*y", n);
        assert_eq!(f.compose(&[rs("x", n), rs("x", n)]).unwrap(), rs("x^2", n));
        // f = x^2, args = (x + y, y), N = 3
        let f = rs("x^2", n);
        assert_eq!(
            f.compose(&[rs("x + y", n), rs("y", n)]).unwrap(),
            rs("x^2 + 2*x*y + y^2", n)
        );
    }

    #[test]
    fn compose_rejects_constant_terms() {
        let n = 3;
        let f = rs("x", n);
        let err = f.compose(&[rs("1 + x", n), rs("y", n)]).unwrap_err();
        assert_eq!(err, SeriesError::ConstantTermInArg { index: 0 });
    }

    #[test]
    fn derivative_examples() {
        let n = 5;
        assert_eq!(rs("x^2*y", n).derivative(0).unwrap(), rs("2*x*y", n));
        assert!(rs("7/3", n).derivative(0).unwrap().is_zero());
        // term-wise rule on a full homogeneous slice
        let f = rs("2*x^4 + 3*x^3*y - x^2*y^2 + 5*x*y^3 - 7*y^4", n);
        let expect = rs("8*x^3 + 9*x^2*y - 2*x*y^2 + 5*y^3", n);
        assert_eq!(f.derivative(0).unwrap(), expect);
        assert!(f.derivative_by_name("z").is_err());
    }

    #[test]
    fn homogeneous_slices() {
        let n = 4;
        let f = rs("1 + x + x^2", n);
        assert_eq!(f.homogeneous_part(1).unwrap().series(), &rs("x", n));
        assert!(rs("x + y^3", n)
            .homogeneous_part(2)
            .unwrap()
            .series()
            .is_zero());
        // reassembly: sum of all slices reproduces f
        let f = rs("3 - x*y + 2*y^2 + x^3 - 5/7*x^2*y^2", n);
        let mut sum = Series::zero(Vars::xy(), n);
        for k in 0..=n {
            sum = sum.add(f.homogeneous_part(k).unwrap().series()).unwrap();
        }
        assert_eq!(sum, f);
        assert!(f.homogeneous_part(n + 1).is_err());
    }

    #[test]
    fn mismatches_are_rejected() {
        let a = rs("x", 3);
        let b = parse_polynomial::<Rat>("u", &Vars::uv(), 3, CoeffMode::Rational).unwrap();
        assert!(matches!(a.add(&b), Err(SeriesError::VarMismatch(_, _))));
        let c = rs("x", 4);
        assert!(matches!(
            a.mul(&c),
            Err(SeriesError::TruncationMismatch(3, 4))
        ));
    }

    #[test]
    fn print_parse_roundtrip_rational() {
        let n = 6;
        let f = rs("-x + 3/2*x^2*y - y^3 + 11/7*y^6 - 2", n);
        let printed = f.to_string();
        let reparsed = rs(&printed, n);
        assert_eq!(reparsed, f);
    }

    #[test]
    fn parse_float_mode_scientific() {
        use crate::bigfloat::BigFloat;
        let mode = CoeffMode::Float { bits: 128 };
        let f: Series<BigFloat> =
            parse_polynomial("2.5e-1*x - 1/4*y", &Vars::xy(), 3, mode).unwrap();
        let cx = f.coefficient(&[1, 0]).unwrap();
        let cy = f.coefficient(&[0, 1]).unwrap();
        assert_eq!(cx.to_f64(), 0.25);
        assert_eq!(cy.to_f64(), -0.25);
        // round-trip through Display stays parseable
        let printed = f.to_string();
        let reparsed: Series<BigFloat> =
            parse_polynomial(&printed, &Vars::xy(), 3, mode).unwrap();
        assert_eq!(reparsed, f);
    }

    #[test]
    fn term_beyond_truncation_rejected() {
        let err = parse_polynomial::<Rat>("x^5", &Vars::xy(), 3, CoeffMode::Rational).unwrap_err();
        assert_eq!(
            err,
            SeriesError::TermBeyondTruncation {
                degree: 5,
                truncation: 3
            }
        );
    }

    #[test]
    fn evaluate_at_point() {
        let f = rs("x^2 + 3*x*y - 2", 4);
        let p = [
            parse_rational("2").unwrap(),
            parse_rational("1/3").unwrap(),
        ];
        // 4 + 2 - 2 = 4
        assert_eq!(f.evaluate(&p), parse_rational("4").unwrap());
    }
}
