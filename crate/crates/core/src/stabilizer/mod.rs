//! The space `W(a) = <w_0, .., w_{n-1}, z^{-n}, z^{-n-1}, ..>` spanned by moment
//! series, the operators
//!
//! `L_i(a) = z^{1-i} d/dz + ((3n-1) + i(n-1))/2 z^{-i} + sum_mu mu a_mu z^{-i-mu}`
//!
//! and exact checks that `L_{-1}, L_0, L_1` preserve `W(a)` and that the
//! family satisfies `[L_i, L_j] = (i - j) L_{i+j}`.

mod moments;
mod mpoly;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use moments::{MomentAlgebra, MomentExpr};
pub use mpoly::MPoly;

use crate::rational::{fmt_rational, frac, int, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilizerError {
    #[error("the potential needs an even number of coefficients a_1..a_2k with k >= 1")]
    BadK,
    #[error("the top coefficient a_2k must be nonzero")]
    ZeroTopCoefficient,
    #[error("basis index j = {j} is outside 0..{n}")]
    IndexOutOfRange { j: u32, n: u32 },
    #[error("n must be at least 1")]
    ZeroSize,
    #[error("stability is only asserted for i in {{-1, 0, 1}}, got {0}")]
    UnsupportedOperator(i64),
    #[error("truncation window too small: have {have}, need {need}")]
    InsufficientWindow { have: i64, need: i64 },
}

/// A truncated Laurent series in `z` with vector coefficients.
/// `hi = None` marks an exact (finite) element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentVec {
    dim: usize,
    nvars: usize,
    hi: Option<i64>,
    coeffs: BTreeMap<i64, MomentExpr>,
}

impl LaurentVec {
    pub fn zero(dim: usize, nvars: usize, hi: Option<i64>) -> Self {
        Self {
            dim,
            nvars,
            hi,
            coeffs: BTreeMap::new(),
        }
    }

    /// The exact scalar monomial `z^m`.
    pub fn monomial(nvars: usize, m: i64) -> Self {
        let mut v = Self::zero(1, nvars, None);
        v.add_at(m, &MomentExpr(vec![MPoly::one(nvars)]));
        v
    }

    pub fn hi(&self) -> Option<i64> {
        self.hi
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, e: i64) -> MomentExpr {
        self.coeffs
            .get(&e)
            .cloned()
            .unwrap_or_else(|| MomentExpr::zero(self.dim, self.nvars))
    }

    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_at(&mut self, e: i64, x: &MomentExpr) {
        if self.hi.is_some_and(|h| e > h) || x.is_zero() {
            return;
        }
        let slot = self
            .coeffs
            .entry(e)
            .or_insert_with(|| MomentExpr::zero(self.dim, self.nvars));
        *slot = slot.add(x);
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = Self::zero(self.dim, self.nvars, hi);
        for (e, x) in &self.coeffs {
            out.add_at(*e, x);
        }
        for (e, x) in &other.coeffs {
            out.add_at(*e, &x.scale(&-Rational::one()));
        }
        out
    }
}

/// `((3n-1) + i(n-1)) / 2`.
pub fn l_constant(i: i64, n: u32) -> Rational {
    let n = n as i64;
    frac(3 * n - 1 + i * (n - 1), 2)
}

/// `w_j = sum_{r >= 0} M_{r+j} z^{r+1-n}`, kept for `r <= trunc + n - 1`.
pub fn build_w(
    alg: &mut MomentAlgebra,
    j: u32,
    n: u32,
    trunc: i64,
) -> Result<LaurentVec, StabilizerError> {
    if n == 0 {
        return Err(StabilizerError::ZeroSize);
    }
    if j >= n {
        return Err(StabilizerError::IndexOutOfRange { j, n });
    }
    let n_i = n as i64;
    let mut v = LaurentVec::zero(alg.dim(), alg.nvars(), Some(trunc));
    for r in 0..(trunc + n_i).max(0) {
        let m = alg.reduce((r + j as i64) as usize);
        v.add_at(r + 1 - n_i, &m);
    }
    Ok(v)
}

/// Applies `L_i(a)` exactly; a truncated input loses `i + 2k` exponents.
pub fn apply_l(
    alg: &MomentAlgebra,
    i: i64,
    n: u32,
    v: &LaurentVec,
) -> Result<LaurentVec, StabilizerError> {
    let two_k = 2 * alg.k() as i64;
    let hi = v.hi.map(|h| h - i - two_k);
    if let (Some(h), Some(lo)) = (hi, v.lo()) {
        if h < lo - i - two_k {
            return Err(StabilizerError::InsufficientWindow {
                have: v.hi.unwrap_or_default(),
                need: lo,
            });
        }
    }
    let c = l_constant(i, n);
    let mu_a: Vec<MPoly> = (1..=alg.k() * 2).map(|mu| alg.mu_a(mu)).collect();
    let mut out = LaurentVec::zero(v.dim, v.nvars, hi);
    for (&m, x) in &v.coeffs {
        let diag = int(m) + &c;
        out.add_at(m - i, &x.scale(&diag));
        for (idx, s) in mu_a.iter().enumerate() {
            if !s.is_zero() {
                out.add_at(m - i - idx as i64 - 1, &x.mul_scalar(s));
            }
        }
    }
    Ok(out)
}

fn det(m: &[Vec<MPoly>], nvars: usize) -> MPoly {
    match m.len() {
        0 => MPoly::one(nvars),
        1 => m[0][0].clone(),
        size => {
            let mut acc = MPoly::zero(nvars);
            for col in 0..size {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MPoly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != col)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let t = m[0][col].mul(&det(&minor, nvars));
                acc = if col % 2 == 0 {
                    acc.add(&t)
                } else {
                    acc.sub(&t)
                };
            }
            acc
        }
    }
}

/// Greedily picks `want` rows of `rows` that are independent at `point`.
fn pivot_rows(rows: &[Vec<MPoly>], point: &[Rational], want: usize) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut picked = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r: Vec<Rational> = row.iter().map(|p| p.eval(point)).collect();
        for (lead, b) in &basis {
            if !r[*lead].is_zero() {
                let f = &r[*lead] / &b[*lead];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(lead) = r.iter().position(|x| !x.is_zero()) {
            basis.push((lead, r));
            picked.push(idx);
            if picked.len() == want {
                break;
            }
        }
    }
    picked
}

fn random_point(nvars: usize, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..nvars)
        .map(|_| loop {
            let q = frac(rng.random_range(-9..=9), rng.random_range(1..=4));
            if !q.is_zero() {
                break q;
            }
        })
        .collect()
}

/// The combination the hand computation predicts, as coefficients on `w_0..w_{n-1}`.
pub fn predicted_combination(i: i64, j: u32, n: u32) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); n as usize];
    let j_us = j as usize;
    match i {
        -1 if j > 0 => c[j_us - 1] = -int(j as i64),
        0 => c[j_us] = frac(n as i64 + 1, 2) - int(j as i64 + 1),
        1 if j + 1 < n => c[j_us + 1] = int(n as i64 - j as i64 - 1),
        _ => {}
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessEntry {
    pub i: i64,
    pub j: u32,
    /// `L_i w_j` minus the witness combination has no exponent above `-n`.
    pub in_span: bool,
    /// Witness coefficient on each `w_l`, when it is a constant.
    pub witness: Vec<Option<Rational>>,
    /// The same coefficients printed as `N/D` when they are not constant.
    pub witness_text: Vec<String>,
    pub predicted: Vec<Rational>,
    pub matches_prediction: bool,
    /// For `L_1`: the `z^{-n}` coefficient of the remainder equals `(n-j-1) M_j`.
    pub z_minus_n_ok: Option<bool>,
}

impl WitnessEntry {
    pub fn ok(&self) -> bool {
        self.in_span && self.matches_prediction && self.z_minus_n_ok.unwrap_or(true)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let witness: serde_json::Map<String, serde_json::Value> = self
            .witness_text
            .iter()
            .enumerate()
            .map(|(l, s)| (format!("w{l}"), serde_json::Value::String(s.clone())))
            .collect();
        serde_json::json!({
            "i": self.i,
            "j": self.j,
            "ok": self.ok(),
            "in_span": self.in_span,
            "witness": witness,
            "matches_prediction": self.matches_prediction,
            "z_minus_n_ok": self.z_minus_n_ok,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub i: i64,
    pub n: u32,
    pub k: usize,
    pub trunc: i64,
    pub entries: Vec<WitnessEntry>,
    pub tail_ok: bool,
}

impl StabilityReport {
    pub fn ok(&self) -> bool {
        self.tail_ok && self.entries.iter().all(WitnessEntry::ok)
    }
}

fn solve_witness(
    alg: &MomentAlgebra,
    ws: &[LaurentVec],
    i: i64,
    j: u32,
    n: u32,
    reduced_mj: &MomentExpr,
) -> Result<WitnessEntry, StabilizerError> {
    let nvars = alg.nvars();
    let lw = apply_l(alg, i, n, &ws[j as usize])?;
    let hi = lw.hi().expect("truncated input");
    let n_i = n as i64;
    let mut rows: Vec<Vec<MPoly>> = Vec::new();
    let mut rhs: Vec<MPoly> = Vec::new();
    for e in (1 - n_i)..=hi {
        let lc = lw.coeff(e);
        let wc: Vec<MomentExpr> = ws.iter().map(|w| w.coeff(e)).collect();
        for b in 0..alg.dim() {
            rows.push(wc.iter().map(|x| x.0[b].clone()).collect());
            rhs.push(lc.0[b].clone());
        }
    }
    let mut picked = Vec::new();
    for attempt in 0..8u64 {
        let point = match alg.values() {
            Some(_) => Vec::new(),
            None => random_point(nvars, 0x5eed + attempt),
        };
        picked = pivot_rows(&rows, &point, n as usize);
        if picked.len() == n as usize || alg.values().is_some() {
            break;
        }
    }
    let predicted = predicted_combination(i, j, n);
    if picked.len() < n as usize {
        return Ok(WitnessEntry {
            i,
            j,
            in_span: false,
            witness: vec![None; n as usize],
            witness_text: vec!["?".into(); n as usize],
            predicted,
            matches_prediction: false,
            z_minus_n_ok: None,
        });
    }
    let sub: Vec<Vec<MPoly>> = picked.iter().map(|&r| rows[r].clone()).collect();
    let d = det(&sub, nvars);
    let nums: Vec<MPoly> = (0..n as usize)
        .map(|l| {
            let mut m = sub.clone();
            for (row, &r) in m.iter_mut().zip(&picked) {
                row[l] = rhs[r].clone();
            }
            det(&m, nvars)
        })
        .collect();
    let in_span = rows.iter().zip(&rhs).all(|(row, b)| {
        let mut acc = d.mul(b);
        for (x, nl) in row.iter().zip(&nums) {
            acc = acc.sub(&x.mul(nl));
        }
        acc.is_zero()
    });
    let witness: Vec<Option<Rational>> = nums.iter().map(|nl| nl.ratio_to(&d)).collect();
    let witness_text = witness
        .iter()
        .zip(&nums)
        .map(|(q, nl)| match q {
            Some(q) => fmt_rational(q),
            None => format!("({nl})/({d})"),
        })
        .collect();
    let matches_prediction = witness
        .iter()
        .zip(&predicted)
        .all(|(w, p)| w.as_ref() == Some(p));
    let z_minus_n_ok = (i == 1).then(|| {
        let expect = reduced_mj.scale(&int(n_i - j as i64 - 1));
        lw.coeff(-n_i) == expect
    });
    Ok(WitnessEntry {
        i,
        j,
        in_span,
        witness,
        witness_text,
        predicted,
        matches_prediction,
        z_minus_n_ok,
    })
}

/// `L_i z^{-n-m}` stays in exponents `<= -n` for `0 <= m <= count`.
pub fn tail_stays_in_tail(alg: &MomentAlgebra, i: i64, n: u32, count: i64) -> bool {
    let n_i = n as i64;
    (0..=count).all(|m| {
        let v = LaurentVec::monomial(alg.nvars(), -n_i - m);
        apply_l(alg, i, n, &v)
            .map(|out| out.exponents().all(|e| e <= -n_i))
            .unwrap_or(false)
    })
}

/// Solves `L_i w_j = sum_l c_l w_l + (tail)` for every `j` and compares the
/// witness with the predicted combination.
pub fn check_stability(
    alg: &mut MomentAlgebra,
    i: i64,
    n: u32,
    trunc: i64,
) -> Result<StabilityReport, StabilizerError> {
    if !(-1..=1).contains(&i) {
        return Err(StabilizerError::UnsupportedOperator(i));
    }
    if n == 0 {
        return Err(StabilizerError::ZeroSize);
    }
    let need = 1 + 2 * alg.k() as i64;
    if trunc < need {
        return Err(StabilizerError::InsufficientWindow { have: trunc, need });
    }
    let ws: Vec<LaurentVec> = (0..n)
        .map(|j| build_w(alg, j, n, trunc))
        .collect::<Result<_, _>>()?;
    let mj: Vec<MomentExpr> = (0..n).map(|j| alg.reduce(j as usize)).collect();
    let alg_ref: &MomentAlgebra = alg;
    let entries = (0..n)
        .into_par_iter()
        .map(|j| solve_witness(alg_ref, &ws, i, j, n, &mj[j as usize]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StabilityReport {
        i,
        n,
        k: alg.k(),
        trunc,
        entries,
        tail_ok: tail_stays_in_tail(alg, i, n, trunc),
    })
}

/// `[L_i, L_j] z^m = (i - j) L_{i+j} z^m` for every `m` in `-n-trunc..=trunc`.
pub fn check_witt(
    alg: &MomentAlgebra,
    i: i64,
    j: i64,
    n: u32,
    trunc: i64,
) -> Result<bool, StabilizerError> {
    let need = alg.k() as i64 + 3;
    if trunc < need {
        return Err(StabilizerError::InsufficientWindow { have: trunc, need });
    }
    let n_i = n as i64;
    for m in (-n_i - trunc)..=trunc {
        let v = LaurentVec::monomial(alg.nvars(), m);
        let lij = apply_l(alg, i, n, &apply_l(alg, j, n, &v)?)?;
        let lji = apply_l(alg, j, n, &apply_l(alg, i, n, &v)?)?;
        let rhs = apply_l(alg, i + j, n, &v)?;
        let mut diff = lij.sub(&lji);
        let scaled = LaurentVec {
            coeffs: rhs
                .coeffs
                .iter()
                .map(|(e, x)| (*e, x.scale(&int(i - j))))
                .collect(),
            ..rhs
        };
        diff = diff.sub(&scaled);
        if !diff.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittEntry {
    pub i: i64,
    pub j: i64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Report {
    pub n: u32,
    pub k: usize,
    pub trunc: i64,
    pub symbolic: bool,
    pub stability: Vec<StabilityReport>,
    pub witt: Vec<WittEntry>,
}

impl Sl2Report {
    pub fn ok(&self) -> bool {
        self.stability.iter().all(StabilityReport::ok) && self.witt.iter().all(|w| w.ok)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let stability: Vec<serde_json::Value> = self
            .stability
            .iter()
            .flat_map(|r| r.entries.iter().map(WitnessEntry::to_json))
            .collect();
        let tails: serde_json::Map<String, serde_json::Value> = self
            .stability
            .iter()
            .map(|r| (r.i.to_string(), serde_json::Value::Bool(r.tail_ok)))
            .collect();
        let witt: Vec<serde_json::Value> = self
            .witt
            .iter()
            .map(|w| serde_json::json!({"i": w.i, "j": w.j, "ok": w.ok}))
            .collect();
        serde_json::json!({
            "n": self.n,
            "k": self.k,
            "trunc": self.trunc,
            "symbolic": self.symbolic,
            "stability": stability,
            "tail_ok": tails,
            "witt": witt,
            "ok": self.ok(),
        })
    }
}

/// Stability for `i in {-1, 0, 1}` and the Witt relation for `i, j in -2..=2`.
pub fn verify_sl2(
    alg: &mut MomentAlgebra,
    n: u32,
    trunc: i64,
) -> Result<Sl2Report, StabilizerError> {
    let mut stability = Vec::new();
    for i in -1..=1 {
        stability.push(check_stability(alg, i, n, trunc)?);
    }
    let mut witt = Vec::new();
    for i in -2..=2 {
        for j in -2..=2 {
            witt.push(WittEntry {
                i,
                j,
                ok: check_witt(alg, i, j, n, trunc)?,
            });
        }
    }
    Ok(Sl2Report {
        n,
        k: alg.k(),
        trunc,
        symbolic: alg.is_symbolic(),
        stability,
        witt,
    })
}
