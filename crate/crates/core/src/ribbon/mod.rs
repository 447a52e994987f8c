//! Ribbon graphs as a pair of permutations on half-edges: the vertex rotation
//! `nu`, whose cycles are the vertices with their cyclic order, and the edge
//! involution `eps`. Boundary circuits are the cycles of `eps . nu`.
//!
//! Automorphisms are those of the pairing-scheme group: rotations inside a
//! vertex and permutations of vertices of equal degree, i.e. the centraliser
//! of `nu`. Orientation-reversing maps are never counted.

mod canonical;
mod enumerate;

pub use enumerate::{
    class_weighted_sum, classes_for_topology, connected_matrix_expansion, connected_sum_gs,
    enumerate_classes, RibbonClass,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::profile::DegreeProfile;
use crate::series::SeriesError;
use crate::wick::{block_layout, cyclic_successor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RibbonError {
    #[error("rotation cycles must cover half-edges 0..{0} exactly once")]
    InvalidRotation(u32),
    #[error("pairing must be a fixed-point-free involution on the half-edges")]
    InvalidPairing,
    #[error("graph is disconnected; genus is defined per component")]
    Disconnected,
    #[error("inconsistent graph: 2 - v + e - b = {0} is not a non-negative even number")]
    CorruptGenus(i64),
    #[error("(g, s) = ({g}, {s}) is not hyperbolic: need 2 - 2g - s < 0")]
    NonHyperbolic { g: u32, s: u32 },
    #[error("enumeration needs {need} half-edges, above the cap of {cap}")]
    BudgetExceeded { need: u32, cap: u32 },
    #[error("orbit count check failed for class in profile {0}")]
    OrbitMismatch(String),
    #[error("malformed ribbon graph json: {0}")]
    Json(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RibbonGraph {
    nu: Vec<u32>,
    eps: Vec<u32>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn count_cycles(perm: &[u32]) -> u32 {
    let mut seen = vec![false; perm.len()];
    let mut cycles = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            h = perm[h] as usize;
        }
    }
    cycles
}

impl RibbonGraph {
    /// Builds a graph from vertex cycles and edge pairs.
    pub fn new(rotation: &[Vec<u32>], pairing: &[(u32, u32)]) -> Result<Self, RibbonError> {
        let total: usize = rotation.iter().map(Vec::len).sum();
        let mut nu = vec![u32::MAX; total];
        for cycle in rotation {
            if cycle.is_empty() {
                return Err(RibbonError::InvalidRotation(total as u32));
            }
            for (i, &h) in cycle.iter().enumerate() {
                let slot = nu
                    .get_mut(h as usize)
                    .ok_or(RibbonError::InvalidRotation(total as u32))?;
                if *slot != u32::MAX {
                    return Err(RibbonError::InvalidRotation(total as u32));
                }
                *slot = cycle[(i + 1) % cycle.len()];
            }
        }
        let mut eps = vec![u32::MAX; total];
        for &(a, b) in pairing {
            if a == b || a as usize >= total || b as usize >= total {
                return Err(RibbonError::InvalidPairing);
            }
            if eps[a as usize] != u32::MAX || eps[b as usize] != u32::MAX {
                return Err(RibbonError::InvalidPairing);
            }
            eps[a as usize] = b;
            eps[b as usize] = a;
        }
        if eps.contains(&u32::MAX) {
            return Err(RibbonError::InvalidPairing);
        }
        Ok(Self { nu, eps })
    }

    /// The graph on the standard block layout of `profile` with the given
    /// matching as edge involution.
    pub fn from_matching(profile: &DegreeProfile, partner: &[u32]) -> Self {
        Self {
            nu: cyclic_successor(profile),
            eps: partner.to_vec(),
        }
    }

    pub fn rotation(&self) -> &[u32] {
        &self.nu
    }

    pub fn pairing(&self) -> &[u32] {
        &self.eps
    }

    pub fn half_edges(&self) -> u32 {
        self.nu.len() as u32
    }

    pub fn vertices(&self) -> u32 {
        count_cycles(&self.nu)
    }

    pub fn edges(&self) -> u32 {
        self.half_edges() / 2
    }

    /// Vertex cycles, each starting at its smallest half-edge, sorted by start.
    pub fn rotation_cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.nu.len()];
        let mut out = Vec::new();
        for start in 0..self.nu.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                cycle.push(h as u32);
                h = self.nu[h] as usize;
            }
            out.push(cycle);
        }
        out
    }

    pub fn edge_pairs(&self) -> Vec<(u32, u32)> {
        (0..self.eps.len() as u32)
            .filter(|&a| a < self.eps[a as usize])
            .map(|a| (a, self.eps[a as usize]))
            .collect()
    }

    pub fn profile(&self) -> DegreeProfile {
        let mut counts = BTreeMap::new();
        for c in self.rotation_cycles() {
            *counts.entry(c.len() as u32).or_insert(0) += 1;
        }
        DegreeProfile::from_counts(counts).expect("cycles are non-empty")
    }

    /// Boundary permutation `phi = eps . nu`.
    pub fn boundary_permutation(&self) -> Vec<u32> {
        self.nu.iter().map(|&h| self.eps[h as usize]).collect()
    }

    pub fn boundary_components(&self) -> u32 {
        count_cycles(&self.boundary_permutation())
    }

    pub fn component_count(&self) -> u32 {
        let mut parent: Vec<u32> = (0..self.nu.len() as u32).collect();
        let mut comps = self.nu.len() as u32;
        for h in 0..self.nu.len() as u32 {
            for other in [self.nu[h as usize], self.eps[h as usize]] {
                let (a, b) = (find(&mut parent, h), find(&mut parent, other));
                if a != b {
                    parent[a as usize] = b;
                    comps -= 1;
                }
            }
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Euler characteristic `v - e` of the graph, equal to `2 - 2g - b` when connected.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices() as i64 - self.edges() as i64
    }

    /// `(g, s)` of the thickened surface: `g = (2 - v + e - b) / 2`, `s = b`.
    pub fn genus(&self) -> Result<(u32, u32), RibbonError> {
        if !self.is_connected() {
            return Err(RibbonError::Disconnected);
        }
        let b = self.boundary_components();
        let twice = 2 - self.euler_characteristic() - b as i64;
        if twice < 0 || twice % 2 != 0 {
            return Err(RibbonError::CorruptGenus(twice));
        }
        Ok(((twice / 2) as u32, b))
    }

    /// Conjugates both permutations by `perm` (old half-edge `h` becomes `perm[h]`).
    pub fn relabel(&self, perm: &[u32]) -> Self {
        let mut nu = vec![0; self.nu.len()];
        let mut eps = vec![0; self.eps.len()];
        for h in 0..self.nu.len() {
            nu[perm[h] as usize] = perm[self.nu[h] as usize];
            eps[perm[h] as usize] = perm[self.eps[h] as usize];
        }
        Self { nu, eps }
    }

    /// Isomorphic copy whose vertices are consecutive blocks in ascending
    /// degree, each block read in its cyclic order.
    pub fn to_standard(&self) -> Self {
        let mut cycles = self.rotation_cycles();
        cycles.sort_by_key(Vec::len);
        let mut perm = vec![0; self.nu.len()];
        let mut next = 0;
        for c in &cycles {
            for &h in c {
                perm[h as usize] = next;
                next += 1;
            }
        }
        self.relabel(&perm)
    }

    pub fn is_standard(&self) -> bool {
        self.nu == cyclic_successor(&self.profile())
    }

    fn search_input(&self) -> (Self, DegreeProfile) {
        let std = if self.is_standard() {
            self.clone()
        } else {
            self.to_standard()
        };
        let profile = std.profile();
        (std, profile)
    }

    /// Representative of the isomorphism class: standard rotation and the
    /// lexicographically smallest edge involution in the orbit.
    pub fn canonical_form(&self) -> Self {
        let (std, profile) = self.search_input();
        let (eps, _) = canonical::search(&block_layout(&profile), &std.eps);
        Self { nu: std.nu, eps }
    }

    /// `|Aut|` within the rotation/block-swap group.
    ///
    /// Small groups are scanned element by element; larger ones use the
    /// canonical-form search, whose number of optimal leaves is `|Aut|`.
    pub fn aut_order(&self) -> u64 {
        let (std, profile) = self.search_input();
        if profile.ribbon_group_order() <= BigInt::from(DIRECT_AUT_LIMIT) {
            canonical::aut_by_group_scan(&block_layout(&profile), &std.eps)
        } else {
            canonical::search(&block_layout(&profile), &std.eps).1
        }
    }

    pub fn aut_order_by_scan(&self) -> u64 {
        let (std, profile) = self.search_input();
        canonical::aut_by_group_scan(&block_layout(&profile), &std.eps)
    }

    pub fn aut_order_by_search(&self) -> u64 {
        let (std, profile) = self.search_input();
        canonical::search(&block_layout(&profile), &std.eps).1
    }

    /// Connected components, each as a standard graph, in canonical order.
    pub fn components(&self) -> Vec<Self> {
        let n = self.nu.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        for h in 0..n as u32 {
            for other in [self.nu[h as usize], self.eps[h as usize]] {
                let (a, b) = (find(&mut parent, h), find(&mut parent, other));
                if a != b {
                    parent[a as usize] = b;
                }
            }
        }
        let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for h in 0..n as u32 {
            let r = find(&mut parent, h);
            groups.entry(r).or_default().push(h);
        }
        let mut out: Vec<Self> = groups
            .values()
            .map(|hs| {
                let mut local = vec![u32::MAX; n];
                for (i, &h) in hs.iter().enumerate() {
                    local[h as usize] = i as u32;
                }
                let nu = hs
                    .iter()
                    .map(|&h| local[self.nu[h as usize] as usize])
                    .collect();
                let eps = hs
                    .iter()
                    .map(|&h| local[self.eps[h as usize] as usize])
                    .collect();
                Self { nu, eps }.canonical_form()
            })
            .collect();
        out.sort();
        out
    }

    pub fn to_json(&self) -> Value {
        let pairing: Vec<[u32; 2]> = self.edge_pairs().into_iter().map(|(a, b)| [a, b]).collect();
        json!({ "rotation": self.rotation_cycles(), "pairing": pairing })
    }

    pub fn from_json(v: &Value) -> Result<Self, RibbonError> {
        let bad = |w: &str| RibbonError::Json(w.to_string());
        let nums = |x: &Value, w: &str| -> Result<Vec<u32>, RibbonError> {
            x.as_array()
                .ok_or_else(|| bad(w))?
                .iter()
                .map(|e| e.as_u64().map(|e| e as u32).ok_or_else(|| bad(w)))
                .collect()
        };
        let rotation: Vec<Vec<u32>> = v["rotation"]
            .as_array()
            .ok_or_else(|| bad("rotation"))?
            .iter()
            .map(|c| nums(c, "rotation"))
            .collect::<Result<_, _>>()?;
        let pairing: Vec<(u32, u32)> = v["pairing"]
            .as_array()
            .ok_or_else(|| bad("pairing"))?
            .iter()
            .map(|p| {
                let p = nums(p, "pairing")?;
                match p[..] {
                    [a, b] => Ok((a, b)),
                    _ => Err(bad("pairing")),
                }
            })
            .collect::<Result<_, _>>()?;
        Self::new(&rotation, &pairing)
    }
}

/// Largest group order for which `aut_order` scans the whole group.
pub const DIRECT_AUT_LIMIT: u64 = 100_000;

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rotation: &[&[u32]], pairing: &[(u32, u32)]) -> RibbonGraph {
        let rot: Vec<Vec<u32>> = rotation.iter().map(|c| c.to_vec()).collect();
        RibbonGraph::new(&rot, pairing).unwrap()
    }

    fn quartic_planar() -> RibbonGraph {
        g(&[&[0, 1, 2, 3]], &[(0, 1), (2, 3)])
    }

    fn quartic_torus() -> RibbonGraph {
        g(&[&[0, 1, 2, 3]], &[(0, 2), (1, 3)])
    }

    fn theta_planar() -> RibbonGraph {
        g(&[&[0, 1, 2], &[3, 4, 5]], &[(0, 3), (1, 5), (2, 4)])
    }

    fn theta_torus() -> RibbonGraph {
        g(&[&[0, 1, 2], &[3, 4, 5]], &[(0, 3), (1, 4), (2, 5)])
    }

    #[test]
    fn boundary_counts() {
        assert_eq!(quartic_planar().boundary_components(), 3);
        assert_eq!(quartic_torus().boundary_components(), 1);
        assert_eq!(theta_planar().boundary_components(), 3);
    }

    #[test]
    fn genus_examples() {
        assert_eq!(quartic_planar().genus().unwrap(), (0, 3));
        assert_eq!(quartic_torus().genus().unwrap(), (1, 1));
        assert_eq!(theta_torus().genus().unwrap(), (1, 1));
        let two = g(
            &[&[0, 1, 2, 3], &[4, 5, 6, 7]],
            &[(0, 1), (2, 3), (4, 6), (5, 7)],
        );
        assert_eq!(two.genus(), Err(RibbonError::Disconnected));
    }

    #[test]
    fn connectivity() {
        assert!(quartic_torus().is_connected());
        assert!(theta_torus().is_connected());
        let two = g(
            &[&[0, 1, 2, 3], &[4, 5, 6, 7]],
            &[(0, 1), (2, 3), (4, 6), (5, 7)],
        );
        assert!(!two.is_connected());
        assert_eq!(two.components(), vec![quartic_planar(), quartic_torus()]);
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(quartic_planar().aut_order(), 2);
        assert_eq!(quartic_torus().aut_order(), 4);
        assert_eq!(theta_torus().aut_order(), 6);
        assert_eq!(theta_planar().aut_order(), 6);
        for gr in [
            quartic_planar(),
            quartic_torus(),
            theta_torus(),
            theta_planar(),
        ] {
            assert_eq!(gr.aut_order_by_scan(), gr.aut_order_by_search());
        }
    }

    #[test]
    fn canonical_forms() {
        let a = quartic_planar().canonical_form();
        assert_eq!(a.canonical_form(), a);
        assert_ne!(a, quartic_torus().canonical_form());
        let relabeled = theta_torus().relabel(&[4, 5, 3, 1, 2, 0]);
        assert_eq!(relabeled.canonical_form(), theta_torus().canonical_form());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let t = theta_torus();
        assert_eq!(RibbonGraph::from_json(&t.to_json()).unwrap(), t);
        assert_eq!(
            RibbonGraph::new(&[vec![0, 1, 2]], &[(0, 1)]),
            Err(RibbonError::InvalidPairing)
        );
        assert!(matches!(
            RibbonGraph::new(&[vec![0, 1], vec![1, 2]], &[(0, 1)]),
            Err(RibbonError::InvalidRotation(_))
        ));
    }
}
