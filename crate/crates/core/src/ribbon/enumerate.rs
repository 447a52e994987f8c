//! Isomorphism classes of ribbon graphs by exhaustive matching enumeration.
//!
//! The rotation is fixed to the standard block layout of a profile and every
//! matching is canonicalised. The group acts on matchings, so a class with
//! automorphism order `aut` is hit exactly `|G| / aut` times; the enumerator
//! recomputes `aut` from that count and checks it against the canonical search.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{canonical, RibbonError, RibbonGraph};
use crate::npoly::NPoly;
use crate::profile::DegreeProfile;
use crate::rational::Rational;
use crate::series::{NPolySeries, VariableSpec};
use crate::wick::{block_layout, cyclic_successor, par_fold_matchings};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonClass {
    pub profile: DegreeProfile,
    pub canonical: RibbonGraph,
    pub aut: u64,
    pub boundary: u32,
    pub vertices: u32,
    pub edges: u32,
    /// `None` for disconnected classes.
    pub genus: Option<u32>,
    pub components: u32,
}

impl RibbonClass {
    /// `(-1)^e`.
    pub fn sign(&self) -> i64 {
        if self.edges.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `n^b / aut`.
    pub fn weight(&self) -> NPoly {
        NPoly::monomial(
            self.boundary,
            Rational::new(One::one(), BigInt::from(self.aut)),
        )
    }

    pub const CSV_HEADER: &'static str = "profile,v,e,b,g,s,aut,sign";

    pub fn csv_row(&self) -> String {
        let g = self.genus.map(|g| g.to_string()).unwrap_or_default();
        let s = if self.genus.is_some() {
            self.boundary.to_string()
        } else {
            String::new()
        };
        format!(
            "\"{}\",{},{},{},{},{},{},{}",
            self.profile,
            self.vertices,
            self.edges,
            self.boundary,
            g,
            s,
            self.aut,
            self.sign()
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "profile": self.profile.to_string(),
            "graph": self.canonical.to_json(),
            "v": self.vertices,
            "e": self.edges,
            "b": self.boundary,
            "g": self.genus,
            "s": self.genus.map(|_| self.boundary),
            "aut": self.aut,
            "sign": self.sign(),
        })
    }
}

fn boundary_count(nu: &[u32], eps: &[u32], seen: &mut [bool]) -> u32 {
    seen.iter_mut().for_each(|x| *x = false);
    let mut cycles = 0;
    for start in 0..nu.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            h = eps[nu[h] as usize] as usize;
        }
    }
    cycles
}

fn connected(nu: &[u32], eps: &[u32], stack: &mut Vec<u32>, seen: &mut [bool]) -> bool {
    seen.iter_mut().for_each(|x| *x = false);
    stack.clear();
    if nu.is_empty() {
        return true;
    }
    stack.push(0);
    seen[0] = true;
    let mut reached = 1;
    while let Some(h) = stack.pop() {
        for nb in [nu[h as usize], eps[h as usize]] {
            if !seen[nb as usize] {
                seen[nb as usize] = true;
                reached += 1;
                stack.push(nb);
            }
        }
    }
    reached == nu.len()
}

/// Which matchings to keep. Every filter here is invariant under the group.
#[derive(Clone, Copy, Debug)]
enum Filter {
    All,
    Connected,
    ConnectedWithBoundary(u32),
}

fn classes_where(profile: &DegreeProfile, filter: Filter) -> Result<Vec<RibbonClass>, RibbonError> {
    let dots = profile.half_edges();
    if dots % 2 == 1 {
        return Ok(Vec::new());
    }
    let nu = cyclic_successor(profile);
    let blocks = block_layout(profile);
    type Acc = (HashMap<Vec<u32>, (u64, u64)>, Vec<bool>, Vec<u32>);
    let (found, _, _) = par_fold_matchings(
        dots,
        || -> Acc { (HashMap::new(), vec![false; dots as usize], Vec::new()) },
        |(map, seen, stack), eps| {
            let keep = match filter {
                Filter::All => true,
                Filter::Connected => connected(&nu, eps, stack, seen),
                Filter::ConnectedWithBoundary(s) => {
                    boundary_count(&nu, eps, seen) == s && connected(&nu, eps, stack, seen)
                }
            };
            if !keep {
                return;
            }
            let (canon, aut) = canonical::search(&blocks, eps);
            map.entry(canon).or_insert((0, aut)).0 += 1;
        },
        |(mut a, s, st), (b, _, _)| {
            for (k, (c, aut)) in b {
                a.entry(k).or_insert((0, aut)).0 += c;
            }
            (a, s, st)
        },
    );
    let group = profile.ribbon_group_order();
    let mut classes = Vec::with_capacity(found.len());
    for (eps, (count, aut)) in found {
        if BigInt::from(count) * BigInt::from(aut) != group {
            return Err(RibbonError::OrbitMismatch(profile.to_string()));
        }
        let graph = RibbonGraph {
            nu: nu.clone(),
            eps,
        };
        let components = graph.component_count();
        let genus = if components == 1 {
            Some(graph.genus()?.0)
        } else {
            None
        };
        classes.push(RibbonClass {
            profile: profile.clone(),
            boundary: graph.boundary_components(),
            vertices: graph.vertices(),
            edges: graph.edges(),
            canonical: graph,
            aut,
            genus,
            components,
        });
    }
    classes.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    Ok(classes)
}

/// One entry per isomorphism class with the given profile.
pub fn enumerate_classes(
    profile: &DegreeProfile,
    connected_only: bool,
) -> Result<Vec<RibbonClass>, RibbonError> {
    let filter = if connected_only {
        Filter::Connected
    } else {
        Filter::All
    };
    classes_where(profile, filter)
}

/// `sum over all classes (connected or not) of n^b / aut`.
pub fn class_weighted_sum(profile: &DegreeProfile) -> Result<NPoly, RibbonError> {
    let mut acc = NPoly::zero();
    for c in enumerate_classes(profile, false)? {
        acc = &acc + &c.weight();
    }
    Ok(acc)
}

fn check_hyperbolic(g: u32, s: u32) -> Result<(), RibbonError> {
    if 2 * g + s <= 2 || s == 0 {
        return Err(RibbonError::NonHyperbolic { g, s });
    }
    Ok(())
}

/// Connected classes of genus `g` with `s` boundary circuits, over every
/// admissible profile. Fails if any profile exceeds `cap` half-edges.
pub fn classes_for_topology(
    g: u32,
    s: u32,
    cap: Option<u32>,
) -> Result<Vec<RibbonClass>, RibbonError> {
    check_hyperbolic(g, s)?;
    let profiles = DegreeProfile::for_topology(g, s);
    if let Some(cap) = cap {
        let need = profiles
            .iter()
            .map(DegreeProfile::half_edges)
            .max()
            .unwrap_or(0);
        if need > cap {
            return Err(RibbonError::BudgetExceeded { need, cap });
        }
    }
    let mut out = Vec::new();
    for p in profiles {
        out.extend(
            classes_where(&p, Filter::ConnectedWithBoundary(s))?
                .into_iter()
                .filter(|c| c.genus == Some(g)),
        );
    }
    Ok(out)
}

/// `sum (-1)^e / aut` over connected ribbon graphs of type `(g, s)`.
pub fn connected_sum_gs(g: u32, s: u32, cap: Option<u32>) -> Result<Rational, RibbonError> {
    let mut acc = Rational::zero();
    for c in classes_for_topology(g, s, cap)? {
        acc += Rational::new(BigInt::from(c.sign()), BigInt::from(c.aut));
    }
    Ok(acc)
}

/// `sum over connected classes of n^b / aut * prod t_j^{v_j}` with degrees `>= 3`.
pub fn connected_matrix_expansion(trunc: u32) -> Result<NPolySeries, RibbonError> {
    let hi = trunc.max(3);
    let vars = VariableSpec::t_range(3, hi);
    let mut terms = Vec::new();
    for p in DegreeProfile::all_up_to(3, hi, trunc) {
        if p.is_empty() || p.half_edges() % 2 == 1 {
            continue;
        }
        let mut coeff = NPoly::zero();
        for c in enumerate_classes(&p, true)? {
            coeff = &coeff + &c.weight();
        }
        terms.push((p.exponents(3, hi).expect("in range"), coeff));
    }
    Ok(NPolySeries::from_terms(vars, trunc, terms))
}
