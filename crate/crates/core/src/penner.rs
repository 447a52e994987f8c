//! The Penner specialisation `t_j = -(sqrt z)^{j-2}` of the connected matrix
//! expansion, where the coefficient of `n^s` on genus `g` surfaces becomes a
//! rational multiple of `zeta(1 - 2g)`.
//!
//! Two routes to the free energy are provided. `penner_free_energy` assembles
//! the regrouped closed form; `analytic_free_energy` follows the product
//! formula through Stirling's series and Bernoulli polynomials.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::npoly::NPoly;
use crate::rational::{big, binomial, factorial, fmt_rational, frac, int, sign, Rational};
use crate::ribbon::{connected_sum_gs, RibbonError};
use crate::series::{NPolySeries, VariableSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PennerError {
    #[error("zeta has a pole at 1 (g = 0)")]
    ZetaPole,
    #[error("(g, s) = ({g}, {s}) is not hyperbolic: need 2 - 2g - s < 0")]
    NonHyperbolic { g: u32, s: u32 },
    #[error("singular terms of the product formula do not cancel: {0}")]
    SingularTermsSurvive(String),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}

/// Bernoulli numbers `b_0..=b_max` with `x / (e^x - 1) = sum b_r x^r / r!`,
/// so `b_1 = -1/2`.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn new(max: usize) -> Self {
        let mut values: Vec<Rational> = Vec::with_capacity(max + 1);
        values.push(Rational::one());
        // sum_{k=0}^{r} C(r+1, k) b_k = 0 for r >= 1
        for r in 1..=max {
            let mut acc = Rational::zero();
            for (k, b) in values.iter().enumerate() {
                acc += big(binomial(r as u64 + 1, k as u64)) * b;
            }
            values.push(-acc / int(r as i64 + 1));
        }
        Self { values }
    }

    pub fn get(&self, r: usize) -> &Rational {
        &self.values[r]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn bernoulli(r: usize) -> Rational {
    BernoulliTable::new(r).get(r).clone()
}

/// `zeta(1 - 2g) = -b_{2g} / (2g)` for `g >= 1`.
pub fn zeta_neg(g: u32) -> Result<Rational, PennerError> {
    if g == 0 {
        return Err(PennerError::ZetaPole);
    }
    Ok(zeta_with(&BernoulliTable::new(2 * g as usize), g))
}

fn zeta_with(b: &BernoulliTable, g: u32) -> Rational {
    -b.get(2 * g as usize).clone() / int(2 * g as i64)
}

fn check_hyperbolic(g: u32, s: u32) -> Result<(), PennerError> {
    if s == 0 || 2 * g + s <= 2 {
        return Err(PennerError::NonHyperbolic { g, s });
    }
    Ok(())
}

/// `C(g, s)` with `sum over connected (g, s) ribbon graphs of (-1)^e / |Aut| = C(g, s)`.
///
/// For `g >= 1`: `-(2g+s-3)! (2g)(2g-1) / ((2g)! s!) * zeta(1-2g)`.
/// For `g = 0`: `-1 / (s (s-1) (s-2))`, read off the genus-zero sum directly.
pub fn penner_coefficient(g: u32, s: u32) -> Result<Rational, PennerError> {
    check_hyperbolic(g, s)?;
    if g == 0 {
        let s = s as i64;
        return Ok(frac(-1, s * (s - 1) * (s - 2)));
    }
    let num = factorial((2 * g + s - 3) as u64) * BigInt::from(2 * g) * BigInt::from(2 * g - 1);
    let den = factorial(2 * g as u64) * factorial(s as u64);
    Ok(-Rational::new(num, den) * zeta_neg(g)?)
}

fn z_series(trunc_z: u32, terms: Vec<(u32, NPoly)>) -> NPolySeries {
    NPolySeries::from_terms(
        VariableSpec::single("z"),
        trunc_z,
        terms.into_iter().map(|(d, c)| (vec![d], c)),
    )
}

/// Free energy in `z` over `Q[n]`, assembled from its three regrouped sums:
/// one boundary at any genus, genus zero with `s >= 3`, and the rest.
pub fn penner_free_energy(trunc_z: u32) -> NPolySeries {
    let b = BernoulliTable::new(trunc_z as usize + 2);
    let mut terms = Vec::new();
    let mut g = 1;
    while 2 * g - 1 <= trunc_z {
        terms.push((2 * g - 1, NPoly::monomial(1, zeta_with(&b, g))));
        g += 1;
    }
    for s in 3..=trunc_z + 2 {
        let si = s as i64;
        let c = sign(s as u64 - 1) * frac(1, si * (si - 1) * (si - 2));
        terms.push((s - 2, NPoly::monomial(s, c)));
    }
    let mut g = 1;
    while 2 * g <= trunc_z {
        let mut s = 2;
        while 2 * g + s - 2 <= trunc_z {
            let c = sign(s as u64 - 1)
                * Rational::new(
                    factorial((2 * g + s - 3) as u64),
                    factorial((2 * g - 2) as u64) * factorial(s as u64),
                )
                * zeta_with(&b, g);
            terms.push((2 * g + s - 2, NPoly::monomial(s, c)));
            s += 1;
        }
        g += 1;
    }
    z_series(trunc_z, terms)
}

/// `phi_r(x) = sum_{q=0}^{r-1} C(r, q) b_q x^{r-q}`, the Bernoulli polynomial
/// without its constant term, so that `sum_{i=1}^{n-1} i^r = phi_{r+1}(n) / (r+1)`.
pub fn bernoulli_polynomial(b: &BernoulliTable, r: u32) -> NPoly {
    NPoly::from_terms(
        (0..r).map(|q| (r - q, big(binomial(r as u64, q as u64)) * b.get(q as usize))),
    )
}

/// `sum_{i=0}^{n-1} (n - i) i^r = n phi_{r+1}(n)/(r+1) - phi_{r+2}(n)/(r+2)` as a polynomial in `n`.
pub fn weighted_power_sum(b: &BernoulliTable, r: u32) -> NPoly {
    let first = (&NPoly::n() * &bernoulli_polynomial(b, r + 1)).scale(&frac(1, r as i64 + 1));
    let second = bernoulli_polynomial(b, r + 2).scale(&frac(1, r as i64 + 2));
    &first - &second
}

/// Coefficients of the non-power-series terms of the log of the product formula,
/// keyed by `"1/z"`, `"log(z)/z"`, `"log(z)"`. All must vanish.
pub fn singular_terms() -> Vec<(&'static str, NPoly)> {
    let n = NPoly::n();
    let n2 = &n * &n;
    let half = frac(1, 2);
    let contributions = [
        // (e z)^{n/z} = exp((n/z)(1 + log z))
        ("1/z", n.clone()),
        ("log(z)/z", n.clone()),
        // z^{n^2/2}
        ("log(z)", n2.scale(&half)),
        // n log Gamma(1/z) = n (-(1/z) log z - 1/z + (1/2) log z + ...)
        ("log(z)/z", -&n),
        ("1/z", -&n),
        ("log(z)", n.scale(&half)),
        // prod_{i<n} ((1 + i z)/z)^{n-i} contributes -(sum_{i<n} (n - i)) log z
        ("log(z)", (&n2 + &n).scale(&-half.clone())),
    ];
    let mut out: Vec<(&'static str, NPoly)> = Vec::new();
    for (key, c) in contributions {
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, acc)) => *acc = &*acc + &c,
            None => out.push((key, c)),
        }
    }
    out
}

/// Free energy through Stirling's series for `log Gamma(1/z)` and the power sums
/// `sum_i (n-i) log(1 + i z)`, with the singular terms checked to cancel.
pub fn analytic_free_energy(trunc_z: u32) -> Result<NPolySeries, PennerError> {
    for (name, c) in singular_terms() {
        if !c.is_zero() {
            return Err(PennerError::SingularTermsSurvive(format!("{name}: {c}")));
        }
    }
    let b = BernoulliTable::new(trunc_z as usize + 2);
    let mut terms = Vec::new();
    let mut r = 1;
    while 2 * r - 1 <= trunc_z {
        let c = b.get(2 * r as usize).clone() / int((2 * r * (2 * r - 1)) as i64);
        terms.push((2 * r - 1, NPoly::monomial(1, c)));
        r += 1;
    }
    for r in 1..=trunc_z {
        let c = sign(r as u64 - 1) * frac(1, r as i64);
        terms.push((r, weighted_power_sum(&b, r).scale(&c)));
    }
    Ok(z_series(trunc_z, terms))
}

/// Graph sum against closed form for one `(g, s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PennerReport {
    pub g: u32,
    pub s: u32,
    pub graph_sum: Rational,
    pub closed_form: Rational,
}

impl PennerReport {
    pub fn matches(&self) -> bool {
        self.graph_sum == self.closed_form
    }

    pub fn to_json(&self) -> Value {
        json!({
            "g": self.g,
            "s": self.s,
            "graph_sum": fmt_rational(&self.graph_sum),
            "closed_form": fmt_rational(&self.closed_form),
            "match": self.matches(),
        })
    }

    pub const CSV_HEADER: &'static str = "g,s,graph_sum,closed_form,match";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.g,
            self.s,
            fmt_rational(&self.graph_sum),
            fmt_rational(&self.closed_form),
            self.matches()
        )
    }
}

/// Half-edges needed to enumerate every `(g, s)` graph: `6 (2g + s - 2)`.
pub fn half_edges_needed(g: u32, s: u32) -> u32 {
    6 * (2 * g + s).saturating_sub(2)
}

pub fn verify_penner_identity(
    g: u32,
    s: u32,
    cap: Option<u32>,
) -> Result<PennerReport, PennerError> {
    let closed_form = penner_coefficient(g, s)?;
    let graph_sum = connected_sum_gs(g, s, cap)?;
    Ok(PennerReport {
        g,
        s,
        graph_sum,
        closed_form,
    })
}

/// All hyperbolic `(g, s)` with `2g + s - 2 <= max_d`, ordered by `(d, g)`.
pub fn topologies_up_to(max_d: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        for g in 0..=d.div_ceil(2) {
            let s = d + 2 - 2 * g;
            if s >= 1 {
                out.push((g, s));
            }
        }
    }
    out
}
