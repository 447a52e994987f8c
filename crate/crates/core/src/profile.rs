//! Vertex-degree profiles `{j: v_j}` and their enumeration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::rational::factorial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("cannot parse profile `{0}`; expected e.g. \"3:2,4:1\"")]
    Parse(String),
    #[error("degree 0 is not allowed")]
    ZeroDegree,
}

/// Number of vertices of each degree. Zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeProfile {
    counts: BTreeMap<u32, u32>,
}

impl DegreeProfile {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_counts<I: IntoIterator<Item = (u32, u32)>>(
        counts: I,
    ) -> Result<Self, ProfileError> {
        let mut p = Self::default();
        for (j, v) in counts {
            if j == 0 {
                return Err(ProfileError::ZeroDegree);
            }
            if v > 0 {
                *p.counts.entry(j).or_insert(0) += v;
            }
        }
        Ok(p)
    }

    pub fn counts(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts.iter().map(|(j, v)| (*j, *v))
    }

    pub fn count(&self, j: u32) -> u32 {
        self.counts.get(&j).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `2E = sum_j j v_j`, which is also the weighted degree of `prod t_j^{v_j}`.
    pub fn half_edges(&self) -> u32 {
        self.counts.iter().map(|(j, v)| j * v).sum()
    }

    pub fn vertices(&self) -> u32 {
        self.counts.values().sum()
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.counts.keys().next().copied()
    }

    /// Vertex degrees in block order: ascending degree, each repeated `v_j` times.
    pub fn block_degrees(&self) -> Vec<u32> {
        self.counts
            .iter()
            .flat_map(|(j, v)| std::iter::repeat_n(*j, *v as usize))
            .collect()
    }

    /// `prod_j j^{v_j} v_j!`, the order of the rotation/block-swap group.
    pub fn ribbon_group_order(&self) -> BigInt {
        self.counts.iter().fold(BigInt::one(), |acc, (j, v)| {
            acc * BigInt::from(*j).pow(*v) * factorial(*v as u64)
        })
    }

    /// `prod_j (j!)^{v_j} v_j!`, the scalar-model vertex symmetry.
    pub fn scalar_group_order(&self) -> BigInt {
        self.counts.iter().fold(BigInt::one(), |acc, (j, v)| {
            acc * factorial(*j as u64).pow(*v) * factorial(*v as u64)
        })
    }

    /// Exponent vector against variables `t_lo..` where index `i` is `t_{lo+i}`.
    pub fn exponents(&self, lo: u32, hi: u32) -> Option<Vec<u32>> {
        let mut exps = vec![0; (hi + 1 - lo) as usize];
        for (j, v) in &self.counts {
            if *j < lo || *j > hi {
                return None;
            }
            exps[(j - lo) as usize] = *v;
        }
        Some(exps)
    }

    /// Every profile with degrees in `lo..=hi` and `half_edges <= max_half_edges`,
    /// including the empty one, in a deterministic order.
    pub fn all_up_to(lo: u32, hi: u32, max_half_edges: u32) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = BTreeMap::new();
        Self::extend(lo.max(1), hi, max_half_edges, &mut cur, &mut out);
        out.sort();
        out
    }

    fn extend(j: u32, hi: u32, budget: u32, cur: &mut BTreeMap<u32, u32>, out: &mut Vec<Self>) {
        if j > hi || j > budget {
            out.push(Self {
                counts: cur.clone(),
            });
            return;
        }
        let mut v = 0;
        while v * j <= budget {
            if v > 0 {
                cur.insert(j, v);
            }
            Self::extend(j + 1, hi, budget - v * j, cur, out);
            v += 1;
        }
        cur.remove(&j);
    }

    /// Profiles of degree `>= 3` realising Euler characteristic `2 - 2g - s`
    /// on a connected graph: `sum_j (j - 2) v_j = 2 (2g + s - 2)`.
    pub fn for_topology(g: u32, s: u32) -> Vec<Self> {
        let excess = 2 * (2 * g + s) as i64 - 4;
        if excess <= 0 {
            return Vec::new();
        }
        let excess = excess as u32;
        let max_half = 3 * excess;
        Self::all_up_to(3, excess + 2, max_half)
            .into_iter()
            .filter(|p| p.counts().map(|(j, v)| (j - 2) * v).sum::<u32>() == excess)
            .collect()
    }
}

impl FromStr for DegreeProfile {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let err = || ProfileError::Parse(s.to_string());
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let (j, v) = part.split_once(':').ok_or_else(err)?;
            let j: u32 = j.trim().parse().map_err(|_| err())?;
            let v: u32 = v.trim().parse().map_err(|_| err())?;
            pairs.push((j, v));
        }
        Self::from_counts(pairs)
    }
}

impl fmt::Display for DegreeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(j, v)| format!("{j}:{v}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: DegreeProfile = "4:1, 3:2".parse().unwrap();
        assert_eq!(p.to_string(), "3:2,4:1");
        assert_eq!(p.half_edges(), 10);
        assert_eq!(p.block_degrees(), vec![3, 3, 4]);
        assert!("3-2".parse::<DegreeProfile>().is_err());
        assert_eq!("".parse::<DegreeProfile>().unwrap(), DegreeProfile::empty());
    }

    #[test]
    fn group_orders() {
        let p: DegreeProfile = "3:2".parse().unwrap();
        assert_eq!(p.ribbon_group_order(), BigInt::from(18));
        assert_eq!(p.scalar_group_order(), BigInt::from(72));
    }

    #[test]
    fn enumeration_counts() {
        let all = DegreeProfile::all_up_to(3, 8, 8);
        let names: Vec<String> = all.iter().map(|p| p.to_string()).collect();
        for want in ["", "3:1", "3:2", "4:1", "4:2", "3:1,5:1", "8:1"] {
            assert!(names.contains(&want.to_string()), "{want}");
        }
        assert!(all.iter().all(|p| p.half_edges() <= 8));
        assert_eq!(all.len(), 11);
    }

    #[test]
    fn topology_profiles() {
        let names: Vec<String> = DegreeProfile::for_topology(1, 1)
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(names, vec!["3:2", "4:1"]);
        assert!(DegreeProfile::for_topology(0, 2).is_empty());
        assert!(DegreeProfile::for_topology(2, 1)
            .iter()
            .any(|p| p.to_string() == "3:6"));
    }
}
