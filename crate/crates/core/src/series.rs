//! Truncated multivariate formal power series with weighted-degree truncation.
//!
//! Every variable carries a positive integer weight and a series keeps exactly
//! the monomials of weighted total degree `<= trunc`. The coefficient ring is
//! abstracted by [`Coeff`] so the same engine serves `Q[[t]]` and `(Q[n])[[t]]`.
//!
//! `exp`, `log` and the multiplicative inverse are evaluated degree by degree
//! through the Euler operator `E = sum_i w_i x_i d/dx_i`, which multiplies a
//! homogeneous component of degree `d` by `d`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::npoly::NPoly;
use crate::rational::{fmt_rational, int, parse_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series use different variable specs")]
    MismatchedVars,
    #[error("exp needs a zero constant term")]
    NonZeroConstant,
    #[error("log needs constant term 1")]
    ConstantNotOne,
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("odd power w^{0} survived the sqrt(z) substitution")]
    OddPower(u32),
    #[error("truncation {have} too low, need at least {need}")]
    TruncationTooLow { have: u32, need: u32 },
    #[error("invalid variable spec: {0}")]
    InvalidSpec(String),
    #[error("malformed series json: {0}")]
    Json(String),
}

/// Coefficient ring of a [`WeightedSeries`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
    fn from_rational(r: Rational) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn inverse(&self) -> Option<Self>;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn to_json(&self) -> Value {
        Value::String(fmt_rational(self))
    }
    fn from_json(v: &Value) -> Option<Self> {
        parse_rational(v.as_str()?)
    }
}

impl Coeff for NPoly {
    fn zero() -> Self {
        NPoly::zero()
    }
    fn one() -> Self {
        NPoly::one()
    }
    fn is_zero(&self) -> bool {
        NPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        NPoly::scale(self, r)
    }
    fn from_rational(r: Rational) -> Self {
        NPoly::constant(r)
    }
    fn inverse(&self) -> Option<Self> {
        match self.degree() {
            Some(0) => Some(NPoly::constant(self.coeff(0).recip())),
            _ => None,
        }
    }
    fn to_json(&self) -> Value {
        NPoly::to_json(self)
    }
    fn from_json(v: &Value) -> Option<Self> {
        NPoly::from_json(v)
    }
}

/// Ordered variable names with their weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VariableSpec {
    names: Vec<String>,
    weights: Vec<u32>,
}

impl VariableSpec {
    pub fn new(names: Vec<String>, weights: Vec<u32>) -> Result<Self, SeriesError> {
        if names.len() != weights.len() {
            return Err(SeriesError::InvalidSpec(
                "names/weights length mismatch".into(),
            ));
        }
        if weights.contains(&0) {
            return Err(SeriesError::InvalidSpec("weights must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        if !names.iter().all(|n| seen.insert(n)) {
            return Err(SeriesError::InvalidSpec("duplicate variable name".into()));
        }
        Ok(Self { names, weights })
    }

    /// `t_lo, ..., t_hi` with `deg t_j = j`.
    pub fn t_range(lo: u32, hi: u32) -> Self {
        let js: Vec<u32> = (lo.max(1)..=hi).collect();
        Self {
            names: js.iter().map(|j| format!("t{j}")).collect(),
            weights: js,
        }
    }

    /// KP times `T_1, ..., T_count` with `deg T_a = a`.
    pub fn kp_times(count: u32) -> Self {
        let js: Vec<u32> = (1..=count).collect();
        Self {
            names: js.iter().map(|j| format!("T{j}")).collect(),
            weights: js,
        }
    }

    /// A single variable of weight 1.
    pub fn single(name: &str) -> Self {
        Self {
            names: vec![name.to_string()],
            weights: vec![1],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn degree_of(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }
}

/// Exponent vector keyed by weighted degree first, giving graded-lex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: Box<[u32]>,
}

impl Monomial {
    fn new(spec: &VariableSpec, exps: Vec<u32>) -> Self {
        Self {
            degree: spec.degree_of(&exps),
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self
                .exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSeries<C> {
    vars: VariableSpec,
    trunc: u32,
    terms: BTreeMap<Monomial, C>,
}

pub type RationalSeries = WeightedSeries<Rational>;
pub type NPolySeries = WeightedSeries<NPoly>;

fn accumulate<C: Coeff>(acc: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&m) {
        Some(slot) => {
            *slot = slot.add(&c);
            if slot.is_zero() {
                acc.remove(&m);
            }
        }
        None => {
            acc.insert(m, c);
        }
    }
}

/// Homogeneous components indexed by degree `0..=trunc`.
type Graded<C> = Vec<Vec<(Monomial, C)>>;

fn mul_homogeneous<C: Coeff>(
    acc: &mut BTreeMap<Monomial, C>,
    a: &[(Monomial, C)],
    b: &[(Monomial, C)],
    factor: &Rational,
) {
    for (ma, ca) in a {
        let ca = ca.scale(factor);
        for (mb, cb) in b {
            accumulate(acc, ma.times(mb), ca.mul(cb));
        }
    }
}

impl<C: Coeff> WeightedSeries<C> {
    pub fn zero(vars: VariableSpec, trunc: u32) -> Self {
        Self {
            vars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: VariableSpec, trunc: u32, c: C) -> Self {
        let mut s = Self::zero(vars, trunc);
        let m = Monomial::new(&s.vars, vec![0; s.vars.len()]);
        accumulate(&mut s.terms, m, c);
        s
    }

    pub fn one(vars: VariableSpec, trunc: u32) -> Self {
        Self::constant(vars, trunc, C::one())
    }

    pub fn variable(vars: VariableSpec, trunc: u32, name: &str) -> Result<Self, SeriesError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))?;
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        Ok(Self::from_terms(vars, trunc, [(exps, C::one())]))
    }

    /// Builds a series from `(exponents, coefficient)` pairs, summing repeats
    /// and dropping monomials above `trunc`.
    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, C)>>(
        vars: VariableSpec,
        trunc: u32,
        terms: I,
    ) -> Self {
        let mut s = Self::zero(vars, trunc);
        for (exps, c) in terms {
            assert_eq!(exps.len(), s.vars.len(), "exponent vector length");
            let m = Monomial::new(&s.vars, exps);
            if m.degree <= trunc {
                accumulate(&mut s.terms, m, c);
            }
        }
        s
    }

    pub fn vars(&self) -> &VariableSpec {
        &self.vars
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &C)> {
        self.terms.iter().map(|(m, c)| (m.exps(), c))
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        let m = Monomial::new(&self.vars, exps.to_vec());
        self.terms.get(&m).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient by variable name, e.g. `coeff_named(&[("t3", 2)])`.
    pub fn coeff_named(&self, powers: &[(&str, u32)]) -> Result<C, SeriesError> {
        let mut exps = vec![0; self.vars.len()];
        for (name, p) in powers {
            let i = self
                .vars
                .index_of(name)
                .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))?;
            exps[i] += p;
        }
        Ok(self.coeff(&exps))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.vars.len()])
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree)
    }

    fn check_vars(&self, other: &Self) -> Result<(), SeriesError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(SeriesError::MismatchedVars)
        }
    }

    /// Keeps only monomials of degree `<= trunc` (never raises the truncation).
    pub fn truncate(&self, trunc: u32) -> Self {
        let trunc = trunc.min(self.trunc);
        Self {
            vars: self.vars.clone(),
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree <= trunc)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self {
            vars: self.vars.clone(),
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_vars(other)?;
        let mut out = self.truncate(other.trunc);
        for (m, c) in &other.terms {
            if m.degree <= out.trunc {
                accumulate(&mut out.terms, m.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn scale_coeff(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.mul(k))
    }

    fn map_coeffs<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.trunc);
        for (m, c) in &self.terms {
            accumulate(&mut out.terms, m.clone(), f(c));
        }
        out
    }

    /// Cauchy product, dropping monomials above `min(trunc a, trunc b)`.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_vars(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(self.vars.clone(), trunc);
        for (ma, ca) in &self.terms {
            if ma.degree > trunc {
                break;
            }
            for (mb, cb) in &other.terms {
                if ma.degree + mb.degree > trunc {
                    break;
                }
                accumulate(&mut out.terms, ma.times(mb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, SeriesError> {
        let mut acc = Self::one(self.vars.clone(), self.trunc);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn graded(&self) -> Graded<C> {
        let mut parts: Graded<C> = vec![Vec::new(); self.trunc as usize + 1];
        for (m, c) in &self.terms {
            parts[m.degree as usize].push((m.clone(), c.clone()));
        }
        parts
    }

    fn from_graded(vars: VariableSpec, trunc: u32, parts: Graded<C>) -> Self {
        let mut s = Self::zero(vars, trunc);
        for (m, c) in parts.into_iter().flatten() {
            accumulate(&mut s.terms, m, c);
        }
        s
    }

    /// `sum_k a^k / k!`; requires a zero constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.constant_term().is_zero() {
            return Err(SeriesError::NonZeroConstant);
        }
        let f = self.graded();
        let mut h: Graded<C> = Vec::with_capacity(f.len());
        h.push(vec![(
            Monomial::new(&self.vars, vec![0; self.vars.len()]),
            C::one(),
        )]);
        // d h_d = sum_{e=1}^{d} e f_e h_{d-e}
        for d in 1..f.len() {
            let mut acc = BTreeMap::new();
            for e in 1..=d {
                let factor = Rational::new((e as i64).into(), (d as i64).into());
                mul_homogeneous(&mut acc, &f[e], &h[d - e], &factor);
            }
            h.push(acc.into_iter().collect());
        }
        Ok(Self::from_graded(self.vars.clone(), self.trunc, h))
    }

    /// Inverse of `exp`; requires constant term 1.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.constant_term() != C::one() {
            return Err(SeriesError::ConstantNotOne);
        }
        let f = self.graded();
        let mut l: Graded<C> = vec![Vec::new()];
        // d L_d = d f_d - sum_{e=1}^{d-1} (d-e) f_e L_{d-e}
        for d in 1..f.len() {
            let mut acc = BTreeMap::new();
            for (m, c) in &f[d] {
                accumulate(&mut acc, m.clone(), c.clone());
            }
            for e in 1..d {
                let factor = -Rational::new(((d - e) as i64).into(), (d as i64).into());
                mul_homogeneous(&mut acc, &f[e], &l[d - e], &factor);
            }
            l.push(acc.into_iter().collect());
        }
        Ok(Self::from_graded(self.vars.clone(), self.trunc, l))
    }

    /// Multiplicative inverse; the constant term must be a unit of the ring.
    pub fn inverse(&self) -> Result<Self, SeriesError> {
        let c0inv = self
            .constant_term()
            .inverse()
            .ok_or(SeriesError::NotInvertible)?;
        let f = self.graded();
        let zero_m = Monomial::new(&self.vars, vec![0; self.vars.len()]);
        let mut h: Graded<C> = vec![vec![(zero_m, c0inv.clone())]];
        let minus_one = -<Rational as One>::one();
        for d in 1..f.len() {
            let mut acc = BTreeMap::new();
            for e in 1..=d {
                mul_homogeneous(&mut acc, &f[e], &h[d - e], &minus_one);
            }
            let part = acc.into_iter().map(|(m, c)| (m, c.mul(&c0inv))).collect();
            h.push(part);
        }
        Ok(Self::from_graded(self.vars.clone(), self.trunc, h))
    }

    /// Formal partial derivative; the truncation drops by the variable's weight.
    pub fn derive(&self, var: &str) -> Result<Self, SeriesError> {
        let i = self
            .vars
            .index_of(var)
            .ok_or_else(|| SeriesError::UnknownVariable(var.to_string()))?;
        let w = self.vars.weights[i];
        if self.trunc < w {
            return Err(SeriesError::TruncationTooLow {
                have: self.trunc,
                need: w,
            });
        }
        let mut out = Self::zero(self.vars.clone(), self.trunc - w);
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.to_vec();
            exps[i] -= 1;
            let m2 = Monomial::new(&self.vars, exps);
            if m2.degree <= out.trunc {
                accumulate(&mut out.terms, m2, c.scale(&int(e as i64)));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(m, c)| json!({ "exp": m.exps.to_vec(), "coeff": c.to_json() }))
            .collect();
        json!({
            "vars": self.vars.names,
            "weights": self.vars.weights,
            "trunc": self.trunc,
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, SeriesError> {
        let bad = |what: &str| SeriesError::Json(what.to_string());
        let names: Vec<String> = v["vars"]
            .as_array()
            .ok_or_else(|| bad("vars"))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("vars")))
            .collect::<Result<_, _>>()?;
        let weights: Vec<u32> = v["weights"]
            .as_array()
            .ok_or_else(|| bad("weights"))?
            .iter()
            .map(|x| x.as_u64().map(|w| w as u32).ok_or_else(|| bad("weights")))
            .collect::<Result<_, _>>()?;
        let trunc = v["trunc"].as_u64().ok_or_else(|| bad("trunc"))? as u32;
        let vars = VariableSpec::new(names, weights)?;
        let mut terms = Vec::new();
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let exps: Vec<u32> = t["exp"]
                .as_array()
                .ok_or_else(|| bad("exp"))?
                .iter()
                .map(|x| x.as_u64().map(|e| e as u32).ok_or_else(|| bad("exp")))
                .collect::<Result<_, _>>()?;
            if exps.len() != vars.len() {
                return Err(bad("exp length"));
            }
            terms.push((exps, C::from_json(&t["coeff"]).ok_or_else(|| bad("coeff"))?));
        }
        Ok(Self::from_terms(vars, trunc, terms))
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for WeightedSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 + O({})", self.trunc + 1);
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (e, name) in m.exps.iter().zip(&self.vars.names) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        write!(f, " + O({})", self.trunc + 1)
    }
}

/// Penner specialisation `t_j -> -(sqrt z)^{j-2}`.
///
/// Each variable's weight is read as its index `j >= 3`. The substitution goes
/// through an internal variable `w = sqrt z`; any surviving odd power of `w` is
/// reported as an error. A monomial of weight `2e` maps to `z^{e-v}` with
/// `e - v <= 2e/6`, so the input truncation must be at least `6 * trunc_z` for
/// the output to be complete.
pub fn penner_substitute<C: Coeff>(
    a: &WeightedSeries<C>,
    trunc_z: u32,
) -> Result<WeightedSeries<C>, SeriesError> {
    if a.vars.weights.iter().any(|&w| w < 3) {
        return Err(SeriesError::InvalidSpec(
            "penner substitution needs variables t_j with j >= 3".into(),
        ));
    }
    if a.trunc < 6 * trunc_z {
        return Err(SeriesError::TruncationTooLow {
            have: a.trunc,
            need: 6 * trunc_z,
        });
    }
    // Series in w, truncated at w-degree 2*trunc_z + 1 so odd residues are visible.
    let w_trunc = 2 * trunc_z + 1;
    let wspec = VariableSpec::single("w");
    let mut in_w = WeightedSeries::<C>::zero(wspec, w_trunc);
    for (m, c) in &a.terms {
        let mut wdeg = 0u32;
        let mut vcount = 0u32;
        for (e, j) in m.exps.iter().zip(&a.vars.weights) {
            wdeg += e * (j - 2);
            vcount += e;
        }
        if wdeg > w_trunc {
            continue;
        }
        let c = if vcount % 2 == 1 { c.neg() } else { c.clone() };
        let mono = Monomial::new(&in_w.vars, vec![wdeg]);
        accumulate(&mut in_w.terms, mono, c);
    }
    let zspec = VariableSpec::single("z");
    let mut out = WeightedSeries::<C>::zero(zspec, trunc_z);
    for (m, c) in &in_w.terms {
        let wdeg = m.exps[0];
        if wdeg % 2 == 1 {
            return Err(SeriesError::OddPower(wdeg));
        }
        if wdeg / 2 <= trunc_z {
            let mono = Monomial::new(&out.vars, vec![wdeg / 2]);
            accumulate(&mut out.terms, mono, c.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    fn t34(trunc: u32) -> VariableSpec {
        let _ = trunc;
        VariableSpec::t_range(3, 4)
    }

    fn s(trunc: u32, terms: &[(&[u32], Rational)]) -> RationalSeries {
        WeightedSeries::from_terms(
            t34(trunc),
            trunc,
            terms.iter().map(|(e, c)| (e.to_vec(), c.clone())),
        )
    }

    #[test]
    fn add_identity_cancellation_disjoint() {
        let a = s(8, &[(&[1, 0], int(1)), (&[0, 1], frac(2, 3))]);
        let zero = RationalSeries::zero(t34(8), 8);
        assert_eq!(zero.add(&a).unwrap(), a);

        let p = s(8, &[(&[0, 0], int(1)), (&[1, 0], int(1))]);
        let m = s(8, &[(&[0, 0], int(1)), (&[1, 0], int(-1))]);
        assert_eq!(p.add(&m).unwrap(), s(8, &[(&[0, 0], int(2))]));

        let t3 = s(8, &[(&[1, 0], int(1))]);
        let t4 = s(8, &[(&[0, 1], int(1))]);
        assert_eq!(
            t3.add(&t4).unwrap(),
            s(8, &[(&[1, 0], int(1)), (&[0, 1], int(1))])
        );
    }

    #[test]
    fn add_takes_min_truncation_and_checks_vars() {
        let a = s(8, &[(&[2, 0], int(1))]);
        let b = s(4, &[(&[1, 0], int(1))]);
        let c = a.add(&b).unwrap();
        assert_eq!(c.trunc(), 4);
        assert_eq!(c, s(4, &[(&[1, 0], int(1))]));
        let other = RationalSeries::zero(VariableSpec::single("z"), 4);
        assert_eq!(a.add(&other), Err(SeriesError::MismatchedVars));
        assert_eq!(a.mul(&other), Err(SeriesError::MismatchedVars));
    }

    #[test]
    fn mul_examples() {
        let a = s(8, &[(&[1, 0], int(1)), (&[0, 1], frac(2, 3))]);
        let one = RationalSeries::one(t34(8), 8);
        assert_eq!(one.mul(&a).unwrap(), a);

        let p = s(6, &[(&[0, 0], int(1)), (&[1, 0], int(1))]);
        let m = s(6, &[(&[0, 0], int(1)), (&[1, 0], int(-1))]);
        assert_eq!(
            p.mul(&m).unwrap(),
            s(6, &[(&[0, 0], int(1)), (&[2, 0], int(-1))])
        );

        let t4 = s(6, &[(&[0, 1], int(1))]);
        assert!(t4.mul(&t4).unwrap().is_zero());
    }

    #[test]
    fn exp_examples() {
        let zero = RationalSeries::zero(t34(6), 6);
        assert_eq!(zero.exp().unwrap(), RationalSeries::one(t34(6), 6));
        let t3 = s(6, &[(&[1, 0], int(1))]);
        assert_eq!(
            t3.exp().unwrap(),
            s(
                6,
                &[(&[0, 0], int(1)), (&[1, 0], int(1)), (&[2, 0], frac(1, 2))]
            )
        );
        let f = s(
            12,
            &[(&[0, 0], int(1)), (&[1, 0], int(1)), (&[0, 1], int(1))],
        );
        assert_eq!(f.log().unwrap().exp().unwrap(), f);
        assert_eq!(
            RationalSeries::one(t34(4), 4).exp(),
            Err(SeriesError::NonZeroConstant)
        );
    }

    #[test]
    fn log_examples() {
        let one = RationalSeries::one(t34(6), 6);
        assert!(one.log().unwrap().is_zero());
        let g = s(12, &[(&[1, 0], int(1)), (&[0, 1], int(1))]);
        assert_eq!(g.exp().unwrap().log().unwrap(), g);
        let f = s(6, &[(&[0, 0], int(1)), (&[1, 0], int(-1))]);
        assert_eq!(
            f.log().unwrap(),
            s(6, &[(&[1, 0], int(-1)), (&[2, 0], frac(-1, 2))])
        );
        assert_eq!(g.log(), Err(SeriesError::ConstantNotOne));
    }

    #[test]
    fn derive_examples() {
        let spec = VariableSpec::kp_times(2);
        let mk = |terms: &[(&[u32], Rational)]| {
            RationalSeries::from_terms(
                spec.clone(),
                6,
                terms.iter().map(|(e, c)| (e.to_vec(), c.clone())),
            )
        };
        let d = mk(&[(&[2, 0], frac(1, 2))]).derive("T1").unwrap();
        assert_eq!(d.trunc(), 5);
        assert_eq!(d.coeff(&[1, 0]), int(1));
        assert_eq!(d.len(), 1);
        assert!(mk(&[(&[0, 0], int(7))]).derive("T2").unwrap().is_zero());
        let d = mk(&[(&[1, 1], int(1))]).derive("T1").unwrap();
        assert_eq!(d.coeff(&[0, 1]), int(1));
        assert_eq!(d.len(), 1);
        assert!(matches!(
            mk(&[]).derive("T9"),
            Err(SeriesError::UnknownVariable(_))
        ));
    }

    #[test]
    fn inverse_times_self_is_one() {
        let f = s(
            12,
            &[(&[0, 0], int(2)), (&[1, 0], int(1)), (&[0, 1], frac(-1, 3))],
        );
        let inv = f.inverse().unwrap();
        assert_eq!(f.mul(&inv).unwrap(), RationalSeries::one(t34(12), 12));
        assert_eq!(
            s(6, &[(&[1, 0], int(1))]).inverse(),
            Err(SeriesError::NotInvertible)
        );
    }

    #[test]
    fn penner_substitution_examples() {
        let spec = VariableSpec::t_range(3, 6);
        let mk = |exps: Vec<u32>| {
            WeightedSeries::<Rational>::from_terms(spec.clone(), 12, [(exps, int(1))])
        };
        let z = penner_substitute(&mk(vec![2, 0, 0, 0]), 2).unwrap();
        assert_eq!(z.coeff(&[1]), int(1));
        assert_eq!(z.len(), 1);
        let z = penner_substitute(&mk(vec![0, 1, 0, 0]), 2).unwrap();
        assert_eq!(z.coeff(&[1]), int(-1));
        let z = penner_substitute(&mk(vec![0, 0, 0, 0]), 2).unwrap();
        assert_eq!(z.coeff(&[0]), int(1));
        assert_eq!(
            penner_substitute(&mk(vec![1, 0, 0, 0]), 2),
            Err(SeriesError::OddPower(1))
        );
        assert!(matches!(
            penner_substitute(&mk(vec![0, 0, 0, 0]), 3),
            Err(SeriesError::TruncationTooLow { .. })
        ));
    }

    #[test]
    fn json_roundtrip_npoly_coefficients() {
        let spec = VariableSpec::t_range(3, 4);
        let p = NPoly::from_terms([(3, frac(1, 2)), (1, frac(1, 4))]);
        let a = NPolySeries::from_terms(spec, 8, [(vec![0, 1], p)]);
        let v = a.to_json();
        assert_eq!(v["terms"][0]["coeff"]["n_poly"]["3"], "1/2");
        assert_eq!(NPolySeries::from_json(&v).unwrap(), a);
    }
}
