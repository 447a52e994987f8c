//! Perfect matchings of labelled dots and the Gaussian pairing sums built on them.
//!
//! Dots `0..2E` are split into consecutive vertex blocks in ascending degree
//! order. Matchings are produced in lexicographic order: the smallest
//! unmatched dot is always paired first, with partners tried in increasing order.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::npoly::NPoly;
use crate::profile::DegreeProfile;
use crate::rational::{big, double_factorial_odd, Rational};
use crate::series::{NPolySeries, RationalSeries, SeriesError, VariableSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WickError {
    #[error("odd number of dots ({0}); no perfect matching exists")]
    OddDots(u32),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

const UNSET: u32 = u32::MAX;

/// A fixed-point-free involution on `0..2E`, stored as the partner of each dot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairingScheme {
    partner: Vec<u32>,
}

impl PairingScheme {
    pub fn from_partner(partner: Vec<u32>) -> Option<Self> {
        let n = partner.len() as u32;
        let ok = partner
            .iter()
            .enumerate()
            .all(|(i, &p)| p < n && p != i as u32 && partner[p as usize] == i as u32);
        ok.then_some(Self { partner })
    }

    pub fn partner(&self) -> &[u32] {
        &self.partner
    }

    pub fn dots(&self) -> usize {
        self.partner.len()
    }

    /// Pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.partner
            .iter()
            .enumerate()
            .filter(|(i, &p)| (*i as u32) < p)
            .map(|(i, &p)| (i as u32, p))
            .collect()
    }
}

/// `(r-1)!!` for even `r`, zero for odd `r`: the moments of `e^{-x^2/2} dx/sqrt(2 pi)`.
pub fn gaussian_moment(r: u32) -> Rational {
    big(double_factorial_odd(r as u64))
}

/// Streaming iterator over all matchings of `2E` dots.
pub struct Matchings {
    partner: Vec<u32>,
    stack: Vec<(u32, u32)>,
    started: bool,
    done: bool,
}

impl Matchings {
    fn new(dots: u32) -> Self {
        Self {
            partner: vec![UNSET; dots as usize],
            stack: Vec::with_capacity(dots as usize / 2),
            started: false,
            done: false,
        }
    }

    fn first_unset_after(&self, from: u32) -> Option<u32> {
        (from..self.partner.len() as u32).find(|&i| self.partner[i as usize] == UNSET)
    }

    /// Greedily pairs remaining dots with their nearest unmatched successor.
    fn complete(&mut self) {
        while let Some(a) = self.first_unset_after(0) {
            let b = self.first_unset_after(a + 1).expect("even dot count");
            self.link(a, b);
        }
    }

    fn link(&mut self, a: u32, b: u32) {
        self.partner[a as usize] = b;
        self.partner[b as usize] = a;
        self.stack.push((a, b));
    }

    fn advance(&mut self) -> bool {
        while let Some((a, b)) = self.stack.pop() {
            self.partner[a as usize] = UNSET;
            self.partner[b as usize] = UNSET;
            if let Some(b2) = self.first_unset_after(b + 1) {
                self.link(a, b2);
                self.complete();
                return true;
            }
        }
        false
    }
}

impl Iterator for Matchings {
    type Item = PairingScheme;

    fn next(&mut self) -> Option<PairingScheme> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.complete();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(PairingScheme {
            partner: self.partner.clone(),
        })
    }
}

pub fn enumerate_matchings(profile: &DegreeProfile) -> Result<Matchings, WickError> {
    let dots = profile.half_edges();
    if dots % 2 == 1 {
        return Err(WickError::OddDots(dots));
    }
    Ok(Matchings::new(dots))
}

fn dfs(partner: &mut [u32], from: usize, f: &mut dyn FnMut(&[u32])) {
    let Some(a) = (from..partner.len()).find(|&i| partner[i] == UNSET) else {
        f(partner);
        return;
    };
    for b in a + 1..partner.len() {
        if partner[b] != UNSET {
            continue;
        }
        partner[a] = b as u32;
        partner[b] = a as u32;
        dfs(partner, a + 1, f);
        partner[a] = UNSET;
        partner[b] = UNSET;
    }
}

/// Calls `f` on every matching of `dots` dots (as a partner array), in
/// lexicographic order, without allocating per matching.
pub fn for_each_matching<F: FnMut(&[u32])>(dots: u32, mut f: F) {
    if dots % 2 == 1 {
        return;
    }
    let mut partner = vec![UNSET; dots as usize];
    dfs(&mut partner, 0, &mut f);
}

/// Partial matchings fixing the first `depth` pairs, used to split work.
fn prefixes(dots: u32, depth: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut partner = vec![UNSET; dots as usize];
    fn go(partner: &mut [u32], depth: usize, out: &mut Vec<Vec<u32>>) {
        let Some(a) = partner.iter().position(|&p| p == UNSET) else {
            out.push(partner.to_vec());
            return;
        };
        if depth == 0 {
            out.push(partner.to_vec());
            return;
        }
        for b in a + 1..partner.len() {
            if partner[b] == UNSET {
                partner[a] = b as u32;
                partner[b] = a as u32;
                go(partner, depth - 1, out);
                partner[a] = UNSET;
                partner[b] = UNSET;
            }
        }
    }
    go(&mut partner, depth, &mut out);
    out
}

/// Parallel fold over all matchings of `dots` dots.
///
/// Work is split on the first two pair choices; `reduce` must be associative
/// and order-insensitive for the result to be independent of scheduling.
pub fn par_fold_matchings<T, Id, F, R>(dots: u32, identity: Id, fold: F, reduce: R) -> T
where
    T: Send,
    Id: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &[u32]) + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    if dots % 2 == 1 {
        return identity();
    }
    let depth = if dots >= 10 { 2 } else { 0 };
    prefixes(dots, depth)
        .into_par_iter()
        .fold(&identity, |mut acc, mut prefix| {
            dfs(&mut prefix, 0, &mut |m| fold(&mut acc, m));
            acc
        })
        .reduce(&identity, &reduce)
}

/// Scalar-model weight of a profile: `(2E-1)!! / prod_j (j!)^{v_j} v_j!`,
/// i.e. the sum of `1/|Aut|` over all graphs with that profile.
pub fn scalar_coefficient(profile: &DegreeProfile) -> Rational {
    Rational::new(
        double_factorial_odd(profile.half_edges() as u64),
        profile.scalar_group_order(),
    )
}

/// Scalar-model expansion in `t_1..t_{max_degree}` with vertex weight `t_j / j!`.
pub fn scalar_expansion(max_degree: u32, trunc: u32) -> RationalSeries {
    let vars = VariableSpec::t_range(1, max_degree);
    let terms = DegreeProfile::all_up_to(1, max_degree, trunc)
        .into_iter()
        .map(|p| {
            (
                p.exponents(1, max_degree).expect("in range"),
                scalar_coefficient(&p),
            )
        });
    RationalSeries::from_terms(vars, trunc, terms)
}

pub fn connected_scalar_expansion(max_degree: u32, trunc: u32) -> RationalSeries {
    scalar_expansion(max_degree, trunc)
        .log()
        .expect("scalar expansion has constant term 1")
}

/// Vertex blocks as `(start, degree)`, ascending degree.
pub fn block_layout(profile: &DegreeProfile) -> Vec<(u32, u32)> {
    let mut start = 0;
    profile
        .block_degrees()
        .into_iter()
        .map(|d| {
            let b = (start, d);
            start += d;
            b
        })
        .collect()
}

/// The successor of each dot within its vertex cycle.
pub fn cyclic_successor(profile: &DegreeProfile) -> Vec<u32> {
    let mut next = vec![0; profile.half_edges() as usize];
    for (b, d) in block_layout(profile) {
        for i in 0..d {
            next[(b + i) as usize] = b + (i + 1) % d;
        }
    }
    next
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Number of free index sums left by one matching of the matrix-model dots.
///
/// The dot `h` is the matrix entry `X[s_h, s_{next(h)}]` with index slots shared
/// between cyclically adjacent factors of `trace X^j`. A Wick contraction
/// `<X[a,b] X[c,d]> = delta(a,d) delta(b,c)` glues slots; each resulting class
/// is one free index and contributes a factor of `n`.
pub fn free_index_count(next: &[u32], partner: &[u32]) -> u32 {
    let mut parent: Vec<u32> = (0..next.len() as u32).collect();
    let mut classes = next.len() as u32;
    let mut union = |parent: &mut Vec<u32>, a: u32, b: u32| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra as usize] = rb;
            classes -= 1;
        }
    };
    for (a, &b) in partner.iter().enumerate() {
        let a = a as u32;
        if a < b {
            union(&mut parent, a, next[b as usize]);
            union(&mut parent, next[a as usize], b);
        }
    }
    classes
}

/// Counts matchings by their free index count, exhaustively.
pub fn free_index_histogram(profile: &DegreeProfile) -> Result<Vec<u64>, WickError> {
    let dots = profile.half_edges();
    if dots % 2 == 1 {
        return Err(WickError::OddDots(dots));
    }
    let next = cyclic_successor(profile);
    let len = dots as usize + 1;
    Ok(par_fold_matchings(
        dots,
        || vec![0u64; len],
        |acc, m| acc[free_index_count(&next, m) as usize] += 1,
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    ))
}

/// Matrix-model pairing sum for one profile with vertex weight `t_j / j`:
/// `sum over matchings of n^{free indices}`, divided by `prod_j j^{v_j} v_j!`.
pub fn matrix_bruteforce_sum(profile: &DegreeProfile) -> Result<NPoly, WickError> {
    let hist = free_index_histogram(profile)?;
    let group = big(profile.ribbon_group_order());
    Ok(NPoly::from_terms(
        hist.into_iter()
            .enumerate()
            .filter(|(_, c)| *c > 0)
            .map(|(e, c)| (e as u32, big(BigInt::from(c)) / &group)),
    ))
}

/// `sum_profiles matrix_bruteforce_sum(profile) prod t_j^{v_j}` over degrees
/// `3..=max_degree` and weighted degree `<= trunc`.
pub fn matrix_expansion(max_degree: u32, trunc: u32) -> Result<NPolySeries, WickError> {
    let vars = VariableSpec::t_range(3, max_degree);
    let mut terms = Vec::new();
    for p in DegreeProfile::all_up_to(3, max_degree, trunc) {
        if p.half_edges() % 2 == 1 {
            continue;
        }
        terms.push((
            p.exponents(3, max_degree).expect("in range"),
            matrix_bruteforce_sum(&p)?,
        ));
    }
    Ok(NPolySeries::from_terms(vars, trunc, terms))
}

/// Number of matchings, `(2E-1)!!`, as a machine integer when it fits.
pub fn matching_count(dots: u32) -> Option<u64> {
    let c = double_factorial_odd(dots as u64);
    if c.is_zero() && dots % 2 == 1 {
        return Some(0);
    }
    c.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use std::collections::BTreeSet;

    fn prof(s: &str) -> DegreeProfile {
        s.parse().unwrap()
    }

    #[test]
    fn gaussian_moments() {
        assert_eq!(gaussian_moment(4), int(3));
        assert_eq!(gaussian_moment(3), int(0));
        assert_eq!(gaussian_moment(8), int(105));
        assert_eq!(gaussian_moment(0), int(1));
    }

    #[test]
    fn matching_enumeration_examples() {
        assert_eq!(enumerate_matchings(&prof("4:1")).unwrap().count(), 3);
        assert_eq!(enumerate_matchings(&prof("3:2")).unwrap().count(), 15);
        assert!(matches!(
            enumerate_matchings(&prof("3:1")),
            Err(WickError::OddDots(3))
        ));
        assert_eq!(enumerate_matchings(&prof("")).unwrap().count(), 1);
    }

    #[test]
    fn iterator_and_visitor_agree_in_order() {
        let from_iter: Vec<Vec<u32>> = enumerate_matchings(&prof("3:2,4:1"))
            .unwrap()
            .map(|m| m.partner().to_vec())
            .collect();
        let mut from_visit = Vec::new();
        for_each_matching(10, |m| from_visit.push(m.to_vec()));
        assert_eq!(from_iter, from_visit);
        let mut sorted = from_iter.clone();
        sorted.sort();
        assert_eq!(sorted, from_iter);
        assert_eq!(from_iter.iter().collect::<BTreeSet<_>>().len(), 945);
    }

    #[test]
    fn scalar_coefficients() {
        assert_eq!(scalar_coefficient(&prof("4:1")), frac(1, 8));
        assert_eq!(scalar_coefficient(&prof("")), int(1));
        assert_eq!(scalar_coefficient(&prof("4:2")), frac(35, 384));
        assert_eq!(scalar_coefficient(&prof("3:2")), frac(5, 24));
    }

    #[test]
    fn scalar_series_examples() {
        let s = scalar_expansion(4, 0);
        assert_eq!(s, RationalSeries::one(VariableSpec::t_range(1, 4), 0));
        let s = scalar_expansion(4, 8);
        assert_eq!(s.coeff_named(&[("t4", 1)]).unwrap(), frac(1, 8));
        assert_eq!(s.coeff_named(&[("t3", 2)]).unwrap(), frac(5, 24));
        let c = connected_scalar_expansion(4, 8);
        assert_eq!(c.coeff_named(&[("t4", 1)]).unwrap(), frac(1, 8));
        assert_eq!(c.coeff_named(&[("t3", 2)]).unwrap(), frac(5, 24));
        assert!(connected_scalar_expansion(4, 0).is_zero());
    }

    #[test]
    fn matrix_one_vertex_quartic() {
        let p = matrix_bruteforce_sum(&prof("4:1")).unwrap();
        assert_eq!(p, NPoly::from_terms([(3, frac(1, 2)), (1, frac(1, 4))]));
        assert_eq!(p.eval(&int(1)), frac(3, 4));
        assert_eq!(matrix_bruteforce_sum(&prof("")).unwrap(), NPoly::one());
    }

    #[test]
    fn matrix_series_examples() {
        let m = matrix_expansion(4, 0).unwrap();
        assert_eq!(m, NPolySeries::one(VariableSpec::t_range(3, 4), 0));
        let m = matrix_expansion(6, 6).unwrap();
        assert_eq!(
            m.coeff_named(&[("t4", 1)]).unwrap(),
            NPoly::from_terms([(3, frac(1, 2)), (1, frac(1, 4))])
        );
        assert_eq!(
            m.coeff_named(&[("t3", 2)]).unwrap(),
            matrix_bruteforce_sum(&prof("3:2")).unwrap()
        );
    }
}
