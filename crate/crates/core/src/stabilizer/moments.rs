//! Moments `M_alpha = int lambda^alpha exp(sum_{mu <= 2k} a_mu lambda^mu) d lambda`
//! as symbols modulo integration by parts:
//!
//! `alpha M_{alpha-1} + sum_mu mu a_mu M_{alpha+mu-1} = 0`.
//!
//! Every moment reduces to the basis `M_0..M_{2k-2}` with coefficients in
//! `Q[a][1/a_{2k}]`.

use num_traits::Zero;

use super::mpoly::MPoly;
use super::StabilizerError;
use crate::rational::{int, Rational};

/// A moment combination `sum_b coeff[b] M_b` over the reduced basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MomentExpr(pub Vec<MPoly>);

impl MomentExpr {
    pub fn zero(dim: usize, nvars: usize) -> Self {
        Self(vec![MPoly::zero(nvars); dim])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(MPoly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn mul_scalar(&self, s: &MPoly) -> Self {
        Self(self.0.iter().map(|a| a.mul(s)).collect())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self(self.0.iter().map(|a| a.scale(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// The potential `sum a_mu lambda^mu`, either with symbolic coefficients or
/// with fixed rational values.
#[derive(Clone, Debug)]
pub struct MomentAlgebra {
    k: usize,
    /// `a[mu - 1]` for `mu = 1..=2k`.
    a: Vec<MPoly>,
    /// `-1 / (2k a_{2k})`.
    step: MPoly,
    values: Option<Vec<Rational>>,
    table: Vec<MomentExpr>,
}

impl MomentAlgebra {
    /// Fully symbolic `a_1..a_{2k}`.
    pub fn symbolic(k: usize) -> Result<Self, StabilizerError> {
        if k == 0 {
            return Err(StabilizerError::BadK);
        }
        let nv = 2 * k;
        let a = (0..nv).map(|i| MPoly::var_pow(nv, i, 1)).collect();
        let step =
            MPoly::var_pow(nv, nv - 1, -1).scale(&Rational::new((-1).into(), (nv as i64).into()));
        Ok(Self::build(k, a, step, None))
    }

    /// Fixed values `a_1..a_{2k}` with `a_{2k} != 0`.
    pub fn numeric(values: Vec<Rational>) -> Result<Self, StabilizerError> {
        if values.is_empty() || values.len() % 2 == 1 {
            return Err(StabilizerError::BadK);
        }
        let k = values.len() / 2;
        let top = values.last().expect("non-empty");
        if top.is_zero() {
            return Err(StabilizerError::ZeroTopCoefficient);
        }
        let a = values
            .iter()
            .map(|v| MPoly::constant(0, v.clone()))
            .collect();
        let step = MPoly::constant(0, -(top * int(2 * k as i64)).recip());
        Ok(Self::build(k, a, step, Some(values)))
    }

    fn build(k: usize, a: Vec<MPoly>, step: MPoly, values: Option<Vec<Rational>>) -> Self {
        let nvars = a[0].nvars();
        let dim = 2 * k - 1;
        let table = (0..dim)
            .map(|b| {
                let mut e = MomentExpr::zero(dim, nvars);
                e.0[b] = MPoly::one(nvars);
                e
            })
            .collect();
        Self {
            k,
            a,
            step,
            values,
            table,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        2 * self.k - 1
    }

    pub fn nvars(&self) -> usize {
        self.a[0].nvars()
    }

    pub fn is_symbolic(&self) -> bool {
        self.values.is_none()
    }

    pub fn values(&self) -> Option<&[Rational]> {
        self.values.as_deref()
    }

    /// `a_mu` for `mu = 1..=2k`.
    pub fn a(&self, mu: usize) -> &MPoly {
        &self.a[mu - 1]
    }

    /// `mu * a_mu`.
    pub fn mu_a(&self, mu: usize) -> MPoly {
        self.a(mu).scale(&int(mu as i64))
    }

    pub fn scalar(&self, r: Rational) -> MPoly {
        MPoly::constant(self.nvars(), r)
    }

    /// Extends the reduction table through `M_alpha`.
    fn ensure(&mut self, alpha: usize) {
        let two_k = 2 * self.k;
        while self.table.len() <= alpha {
            let target = self.table.len();
            // target = beta + 2k - 1
            let beta = target + 1 - two_k;
            let mut acc = MomentExpr::zero(self.dim(), self.nvars());
            if beta >= 1 {
                acc = acc.add(&self.table[beta - 1].scale(&int(beta as i64)));
            }
            for mu in 1..two_k {
                acc = acc.add(&self.table[beta + mu - 1].mul_scalar(&self.mu_a(mu)));
            }
            let reduced = acc.mul_scalar(&self.step);
            self.table.push(reduced);
        }
    }

    /// `M_alpha` in the basis `M_0..M_{2k-2}`.
    pub fn reduce(&mut self, alpha: usize) -> MomentExpr {
        self.ensure(alpha);
        self.table[alpha].clone()
    }

    /// Applies the integration-by-parts relation at `alpha` to the reduced
    /// table; the result must vanish.
    pub fn relation_residual(&mut self, alpha: usize) -> MomentExpr {
        let two_k = 2 * self.k;
        self.ensure(alpha + two_k);
        let mut acc = MomentExpr::zero(self.dim(), self.nvars());
        if alpha >= 1 {
            acc = acc.add(&self.table[alpha - 1].scale(&int(alpha as i64)));
        }
        for mu in 1..=two_k {
            acc = acc.add(&self.table[alpha + mu - 1].mul_scalar(&self.mu_a(mu)));
        }
        acc
    }

    /// Re-expresses an arbitrary combination `sum_alpha c_alpha M_alpha`.
    pub fn reduce_combination(&mut self, combo: &[(usize, MPoly)]) -> MomentExpr {
        let mut acc = MomentExpr::zero(self.dim(), self.nvars());
        for (alpha, c) in combo {
            acc = acc.add(&self.reduce(*alpha).mul_scalar(c));
        }
        acc
    }
}
