//! Determinant tau-functions built from moment tables and the KP equation
//! `(3/4) u_22 = (u_3 - (1/4) u_111 - 3 u u_1)_1` for `u = d^2/dT_1^2 log tau`.
//!
//! The moment table `xi[r][j]` stands in for `int k^r phi_j(k) dk`. Overall
//! scalar factors are dropped throughout since tau is only defined up to scale.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::rational::{factorial, fmt_rational, int, parse_rational, Rational};
use crate::series::{RationalSeries, SeriesError, VariableSpec};
use crate::wick::gaussian_moment;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KpError {
    #[error("top {0}x{0} minor of the moment table is singular")]
    SingularTopMinor(usize),
    #[error("moment table has {have} rows, truncation needs {need}")]
    TooFewRows { have: usize, need: usize },
    #[error("tau has zero constant term")]
    ZeroConstantTerm,
    #[error("series lacks variable {0}")]
    MissingVariable(String),
    #[error("spectral parameters must be pairwise distinct")]
    RepeatedLambda,
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("malformed json: {0}")]
    Json(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `p_r(T)`, the weight-`r` part of `exp(sum_a T_a k^a)` in `T_1..T_{num_vars}`.
/// Zero for negative `r`.
pub fn schur_p(r: i64, num_vars: u32, trunc: u32) -> RationalSeries {
    let vars = VariableSpec::kp_times(num_vars);
    if r < 0 {
        return RationalSeries::zero(vars, trunc);
    }
    let mut terms = Vec::new();
    let mut exps = vec![0u32; num_vars as usize];
    fn go(a: u32, left: u32, exps: &mut Vec<u32>, terms: &mut Vec<(Vec<u32>, Rational)>) {
        if left == 0 {
            let den = exps.iter().fold(num_bigint::BigInt::one(), |acc, &e| {
                acc * factorial(e as u64)
            });
            terms.push((exps.clone(), Rational::new(One::one(), den)));
            return;
        }
        if a as usize > exps.len() {
            return;
        }
        let mut m = 0;
        while m * a <= left {
            exps[a as usize - 1] = m;
            go(a + 1, left - m * a, exps, terms);
            m += 1;
        }
        exps[a as usize - 1] = 0;
    }
    go(1, r as u32, &mut exps, &mut terms);
    RationalSeries::from_terms(vars, trunc, terms)
}

#[allow(clippy::needless_range_loop)]
fn det_rational(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Rows `xi[0..=R]` of `n` moments each.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    n: usize,
    xi: Vec<Vec<Rational>>,
}

impl MomentMatrix {
    pub fn new(n: usize, xi: Vec<Vec<Rational>>) -> Result<Self, KpError> {
        if n == 0 {
            return Err(KpError::Shape("n must be >= 1".into()));
        }
        if xi.len() < n {
            return Err(KpError::TooFewRows {
                have: xi.len(),
                need: n,
            });
        }
        if xi.iter().any(|row| row.len() != n) {
            return Err(KpError::Shape(format!("every row needs {n} entries")));
        }
        let m = Self { n, xi };
        if m.top_minor().is_zero() {
            return Err(KpError::SingularTopMinor(n));
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.xi.len()
    }

    pub fn get(&self, r: usize, j: usize) -> &Rational {
        &self.xi[r][j]
    }

    /// `det(xi[i][j])_{i, j < n}`, the constant term of tau.
    pub fn top_minor(&self) -> Rational {
        det_rational(&self.xi[..self.n])
    }

    pub fn swap_columns(&self, a: usize, b: usize) -> Self {
        let mut xi = self.xi.clone();
        for row in &mut xi {
            row.swap(a, b);
        }
        Self { n: self.n, xi }
    }

    /// Column `dst += factor * column src`.
    pub fn add_column_multiple(&self, dst: usize, src: usize, factor: &Rational) -> Self {
        let mut xi = self.xi.clone();
        for row in &mut xi {
            let add = &row[src] * factor;
            row[dst] += add;
        }
        Self { n: self.n, xi }
    }

    pub fn to_json(&self) -> Value {
        let xi: Vec<Vec<String>> = self
            .xi
            .iter()
            .map(|row| row.iter().map(fmt_rational).collect())
            .collect();
        json!({ "n": self.n, "rows": self.xi.len(), "xi": xi })
    }

    pub fn from_json(v: &Value) -> Result<Self, KpError> {
        let bad = |w: &str| KpError::Json(w.to_string());
        let n = v["n"].as_u64().ok_or_else(|| bad("n"))? as usize;
        let xi: Vec<Vec<Rational>> = v["xi"]
            .as_array()
            .ok_or_else(|| bad("xi"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("xi row"))?
                    .iter()
                    .map(|x| rational_from_json(x).ok_or_else(|| bad("xi entry")))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        if let Some(rows) = v.get("rows").and_then(Value::as_u64) {
            if rows as usize != xi.len() {
                return Err(bad("rows does not match xi"));
            }
        }
        Self::new(n, xi)
    }
}

fn rational_from_json(v: &Value) -> Option<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n.as_i64().map(int),
        _ => None,
    }
}

/// `xi[r][j] = (r + j - 1)!!`, the Gaussian moments, with rows `0..rows`.
pub fn gaussian_moment_matrix(n: usize, rows: usize) -> Result<MomentMatrix, KpError> {
    let xi = (0..rows)
        .map(|r| (0..n).map(|j| gaussian_moment((r + j) as u32)).collect())
        .collect();
    MomentMatrix::new(n, xi)
}

fn random_small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let p: i64 = rng.random_range(-5..=5);
    let q: i64 = rng.random_range(1..=4);
    Rational::new(p.into(), q.into())
}

/// Seeded random table with small rational entries, redrawn until the top
/// minor is nonsingular.
pub fn random_moment_matrix(n: usize, rows: usize, seed: u64) -> MomentMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let xi: Vec<Vec<Rational>> = (0..rows.max(n))
            .map(|_| (0..n).map(|_| random_small_rational(&mut rng)).collect())
            .collect();
        if let Ok(m) = MomentMatrix::new(n, xi) {
            return m;
        }
    }
}

fn det_leibniz(a: &[Vec<RationalSeries>]) -> Result<RationalSeries, KpError> {
    let n = a.len();
    if n == 1 {
        return Ok(a[0][0].clone());
    }
    // Laplace expansion along the first row.
    let mut acc = RationalSeries::zero(a[0][0].vars().clone(), a[0][0].trunc());
    for col in 0..n {
        if a[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RationalSeries>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = a[0][col].mul(&det_leibniz(&minor)?)?;
        acc = if col % 2 == 0 {
            acc.add(&term)?
        } else {
            acc.sub(&term)?
        };
    }
    Ok(acc)
}

/// Gaussian elimination over the series ring, pivoting on entries with an
/// invertible constant term.
#[allow(clippy::needless_range_loop)]
fn det_elimination(a: &[Vec<RationalSeries>]) -> Result<RationalSeries, KpError> {
    let n = a.len();
    let mut a: Vec<Vec<RationalSeries>> = a.to_vec();
    let mut det = RationalSeries::one(a[0][0].vars().clone(), a[0][0].trunc());
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].constant_term().is_zero())
            .ok_or(KpError::SingularTopMinor(n))?;
        if piv != col {
            a.swap(piv, col);
            det = det.neg();
        }
        det = det.mul(&a[col][col])?;
        let inv = a[col][col].inverse()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].mul(&inv)?;
            for c in col..n {
                let sub = f.mul(&a[col][c])?;
                a[r][c] = a[r][c].sub(&sub)?;
            }
        }
    }
    Ok(det)
}

pub fn determinant(a: &[Vec<RationalSeries>]) -> Result<RationalSeries, KpError> {
    if a.len() <= 4 {
        det_leibniz(a)
    } else {
        det_elimination(a)
    }
}

/// Entry `(i, j)` of the tau matrix: `sum_r p_{r-i}(T) xi[r][j]`.
fn tau_matrix(xi: &MomentMatrix, trunc: u32) -> Result<Vec<Vec<RationalSeries>>, KpError> {
    let n = xi.n();
    let need = n + trunc as usize;
    if xi.rows() < need {
        return Err(KpError::TooFewRows {
            have: xi.rows(),
            need,
        });
    }
    let nv = trunc.max(1);
    let schur: Vec<RationalSeries> = (0..=trunc as i64).map(|r| schur_p(r, nv, trunc)).collect();
    let vars = VariableSpec::kp_times(nv);
    let mut m = vec![vec![RationalSeries::zero(vars, trunc); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            for (w, p) in schur.iter().enumerate() {
                let x = xi.get(i + w, j);
                if !x.is_zero() {
                    *entry = entry.add(&p.scale(x))?;
                }
            }
        }
    }
    Ok(m)
}

/// `tau = det(sum_r p_{r-i}(T) xi[r][j])_{i, j < n}` in `T_1..T_trunc`.
pub fn tau_det(xi: &MomentMatrix, trunc: u32) -> Result<RationalSeries, KpError> {
    determinant(&tau_matrix(xi, trunc)?)
}

/// Same as [`tau_det`] but always through series-ring elimination.
pub fn tau_det_by_elimination(xi: &MomentMatrix, trunc: u32) -> Result<RationalSeries, KpError> {
    det_elimination(&tau_matrix(xi, trunc)?)
}

/// `u = d^2/dT_1^2 log(tau / tau(0))`.
pub fn u_from_tau(tau: &RationalSeries) -> Result<RationalSeries, KpError> {
    let c0 = tau.constant_term();
    if c0.is_zero() {
        return Err(KpError::ZeroConstantTerm);
    }
    require(tau, &["T1"])?;
    let normalised = tau.scale(&c0.recip());
    Ok(normalised.log()?.derive("T1")?.derive("T1")?)
}

fn require(s: &RationalSeries, names: &[&str]) -> Result<(), KpError> {
    for name in names {
        if s.vars().index_of(name).is_none() {
            return Err(KpError::MissingVariable(name.to_string()));
        }
    }
    Ok(())
}

/// `(3/4) u_22 - d/dT_1 (u_3 - (1/4) u_111 - 3 u u_1)`; its truncation is four
/// below that of `u`.
pub fn kp_residual(u: &RationalSeries) -> Result<RationalSeries, KpError> {
    require(u, &["T1", "T2", "T3"])?;
    let u1 = u.derive("T1")?;
    let u111 = u1.derive("T1")?.derive("T1")?;
    let u3 = u.derive("T3")?;
    let u22 = u.derive("T2")?.derive("T2")?;
    let inner = u3
        .sub(&u111.scale(&Rational::new(1.into(), 4.into())))?
        .sub(&u.mul(&u1)?.scale(&int(3)))?;
    Ok(u22
        .scale(&Rational::new(3.into(), 4.into()))
        .sub(&inner.derive("T1")?)?)
}

/// Outcome of the KP check on one tau-function.
#[derive(Clone, Debug, PartialEq)]
pub struct KpReport {
    pub label: String,
    pub n: usize,
    pub tau_trunc: u32,
    pub checked_weight: u32,
    pub nonzero_terms: usize,
}

impl KpReport {
    pub fn passed(&self) -> bool {
        self.nonzero_terms == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "moments": self.label,
            "n": self.n,
            "tau_trunc": self.tau_trunc,
            "max_weight_checked": self.checked_weight,
            "residual_nonzero_terms": self.nonzero_terms,
            "residual_zero": self.passed(),
        })
    }
}

/// Truncation of tau needed to check the residual through weight `w`.
pub fn tau_trunc_for_weight(w: u32) -> u32 {
    w + 6
}

pub fn verify_kp(label: &str, xi: &MomentMatrix, weight: u32) -> Result<KpReport, KpError> {
    let trunc = tau_trunc_for_weight(weight);
    let tau = tau_det(xi, trunc)?;
    let res = kp_residual(&u_from_tau(&tau)?)?;
    Ok(KpReport {
        label: label.to_string(),
        n: xi.n(),
        tau_trunc: trunc,
        checked_weight: res.trunc(),
        nonzero_terms: res.len(),
    })
}

/// Spectral data `lambda_0..lambda_{M-1}` and an `M x n` coefficient matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonData {
    lambda: Vec<Rational>,
    c: Vec<Vec<Rational>>,
}

impl SolitonData {
    pub fn new(lambda: Vec<Rational>, c: Vec<Vec<Rational>>) -> Result<Self, KpError> {
        let m = lambda.len();
        if c.len() != m {
            return Err(KpError::Shape("c needs one row per lambda".into()));
        }
        let n = c.first().map(Vec::len).unwrap_or(0);
        if n == 0 || c.iter().any(|row| row.len() != n) {
            return Err(KpError::Shape("c rows must share a positive length".into()));
        }
        if m < n {
            return Err(KpError::Shape(format!(
                "need at least n = {n} spectral points"
            )));
        }
        for a in 0..m {
            for b in 0..a {
                if lambda[a] == lambda[b] {
                    return Err(KpError::RepeatedLambda);
                }
            }
        }
        Ok(Self { lambda, c })
    }

    pub fn n(&self) -> usize {
        self.c[0].len()
    }

    pub fn points(&self) -> usize {
        self.lambda.len()
    }

    /// Seeded data with distinct small integer spectral parameters and a
    /// moment table whose top minor is nonsingular.
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut lambda: Vec<Rational> = Vec::with_capacity(m);
            while lambda.len() < m {
                let l = int(rng.random_range(-4..=4));
                if !lambda.contains(&l) {
                    lambda.push(l);
                }
            }
            let c = (0..m)
                .map(|_| (0..n).map(|_| random_small_rational(&mut rng)).collect())
                .collect();
            let data = Self::new(lambda, c).expect("well-formed by construction");
            if data.moments(n).is_ok() {
                return data;
            }
        }
    }

    /// `xi[r][j] = sum_i c[i][j] lambda_i^r` for `r < rows`.
    pub fn moments(&self, rows: usize) -> Result<MomentMatrix, KpError> {
        let n = self.n();
        let xi = (0..rows.max(n))
            .map(|r| {
                (0..n)
                    .map(|j| {
                        self.lambda
                            .iter()
                            .zip(&self.c)
                            .map(|(l, row)| &row[j] * pow(l, r as u32))
                            .fold(Rational::zero(), |a, b| a + b)
                    })
                    .collect()
            })
            .collect();
        MomentMatrix::new(n, xi)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n(),
            "lambda": self.lambda.iter().map(fmt_rational).collect::<Vec<_>>(),
            "c": self.c.iter().map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, KpError> {
        let bad = |w: &str| KpError::Json(w.to_string());
        let lambda = v["lambda"]
            .as_array()
            .ok_or_else(|| bad("lambda"))?
            .iter()
            .map(|x| rational_from_json(x).ok_or_else(|| bad("lambda entry")))
            .collect::<Result<Vec<_>, _>>()?;
        let c = v["c"]
            .as_array()
            .ok_or_else(|| bad("c"))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| bad("c row"))?
                    .iter()
                    .map(|x| rational_from_json(x).ok_or_else(|| bad("c entry")))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        let data = Self::new(lambda, c)?;
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != data.n() {
                return Err(bad("n does not match c"));
            }
        }
        Ok(data)
    }
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// `exp(sum_a T_a * sum_{l in ls} l^a)`, truncated.
fn exp_eta(ls: &[&Rational], nv: u32, trunc: u32) -> Result<RationalSeries, KpError> {
    let vars = VariableSpec::kp_times(nv);
    let terms = (1..=nv).map(|a| {
        let mut exps = vec![0; nv as usize];
        exps[a as usize - 1] = 1;
        let c = ls
            .iter()
            .map(|l| pow(l, a))
            .fold(Rational::zero(), |x, y| x + y);
        (exps, c)
    });
    Ok(RationalSeries::from_terms(vars, trunc, terms).exp()?)
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    go(0, m, k, &mut cur, &mut out);
    out
}

/// Sum over `n`-subsets `I` of the spectral points of
/// `exp(sum_{i in I} eta(T, lambda_i)) * Vandermonde(lambda_I) * det(c_I)`.
pub fn soliton_tau(data: &SolitonData, trunc: u32) -> Result<RationalSeries, KpError> {
    let n = data.n();
    let nv = trunc.max(1);
    let mut acc = RationalSeries::zero(VariableSpec::kp_times(nv), trunc);
    for idx in subsets(data.points(), n) {
        let ls: Vec<&Rational> = idx.iter().map(|&i| &data.lambda[i]).collect();
        let mut vdm = Rational::one();
        for a in 0..n {
            for b in 0..a {
                vdm *= ls[a] - ls[b];
            }
        }
        let minor: Vec<Vec<Rational>> = idx.iter().map(|&i| data.c[i].clone()).collect();
        let weight = vdm * det_rational(&minor);
        if weight.is_zero() {
            continue;
        }
        acc = acc.add(&exp_eta(&ls, nv, trunc)?.scale(&weight))?;
    }
    Ok(acc)
}

/// The scalar `k` with `b = k * a` coefficientwise, if one exists and `a != 0`.
pub fn proportionality(a: &RationalSeries, b: &RationalSeries) -> Option<Rational> {
    if a.vars() != b.vars() || a.trunc() != b.trunc() || a.len() != b.len() {
        return None;
    }
    let (exps, first) = a.terms().next()?;
    let k = b.coeff(exps) / first;
    a.terms().all(|(e, c)| b.coeff(e) == c * &k).then_some(k)
}
