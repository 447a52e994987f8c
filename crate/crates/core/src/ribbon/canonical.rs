//! Canonical labelling under the centraliser of the standard rotation.
//!
//! A group element `sigma` sends each old vertex block to a new block of the
//! same degree with some rotation; the relabelled involution is
//! `sigma . eps . sigma^-1`. The search fills new positions in order. When a
//! position opens a block that has no old vertex yet, every candidate vertex
//! and rotation is tried. Otherwise the partner's block, if still unplaced, is
//! forced into the lowest free block of its degree with the partner at the
//! block start, because that is the unique choice minimising this entry.

const UNSET: u32 = u32::MAX;

struct Search<'a> {
    blocks: &'a [(u32, u32)],
    eps: &'a [u32],
    /// Block index of every position (same layout old and new).
    block_of: Vec<u32>,
    /// Block indices of each degree, ascending; indexed via `degree_slot`.
    by_degree: Vec<Vec<u32>>,
    degree_slot: Vec<usize>,
    /// Next unplaced new block per degree slot.
    next_new: Vec<usize>,
    old_used: Vec<bool>,
    new_to_old: Vec<u32>,
    old_to_new: Vec<u32>,
    new_assigned: Vec<bool>,
    cur: Vec<u32>,
    best: Option<Vec<u32>>,
    hits: u64,
}

impl<'a> Search<'a> {
    fn new(blocks: &'a [(u32, u32)], eps: &'a [u32]) -> Self {
        let n = eps.len();
        let mut block_of = vec![0; n];
        let mut degrees: Vec<u32> = Vec::new();
        let mut degree_slot = Vec::with_capacity(blocks.len());
        let mut by_degree: Vec<Vec<u32>> = Vec::new();
        for (k, &(start, d)) in blocks.iter().enumerate() {
            for i in 0..d {
                block_of[(start + i) as usize] = k as u32;
            }
            let slot = match degrees.iter().position(|&x| x == d) {
                Some(s) => s,
                None => {
                    degrees.push(d);
                    by_degree.push(Vec::new());
                    degrees.len() - 1
                }
            };
            by_degree[slot].push(k as u32);
            degree_slot.push(slot);
        }
        Self {
            blocks,
            eps,
            block_of,
            next_new: vec![0; by_degree.len()],
            by_degree,
            degree_slot,
            old_used: vec![false; blocks.len()],
            new_to_old: vec![UNSET; n],
            old_to_new: vec![UNSET; n],
            new_assigned: vec![false; blocks.len()],
            cur: vec![0; n],
            best: None,
            hits: 0,
        }
    }

    /// Places old block `old` on new block `new` so that old position
    /// `old_start + (i + rot) mod d` lands on `new_start + i`.
    fn place(&mut self, new: u32, old: u32, rot: u32) {
        let (ns, d) = self.blocks[new as usize];
        let (os, _) = self.blocks[old as usize];
        for i in 0..d {
            let o = os + (i + rot) % d;
            self.new_to_old[(ns + i) as usize] = o;
            self.old_to_new[o as usize] = ns + i;
        }
        self.new_assigned[new as usize] = true;
        self.old_used[old as usize] = true;
        self.next_new[self.degree_slot[new as usize]] += 1;
    }

    fn unplace(&mut self, new: u32, old: u32) {
        let (ns, d) = self.blocks[new as usize];
        let (os, _) = self.blocks[old as usize];
        for i in 0..d {
            self.new_to_old[(ns + i) as usize] = UNSET;
            self.old_to_new[(os + i) as usize] = UNSET;
        }
        self.new_assigned[new as usize] = false;
        self.old_used[old as usize] = false;
        self.next_new[self.degree_slot[new as usize]] -= 1;
    }

    fn prefix_is_better(&self, p: usize) -> bool {
        match &self.best {
            None => true,
            Some(b) => self.cur[..p] < b[..p],
        }
    }

    fn step(&mut self, p: usize, better: bool) {
        if p == self.cur.len() {
            if better || self.best.is_none() {
                self.best = Some(self.cur.clone());
                self.hits = 1;
            } else {
                self.hits += 1;
            }
            return;
        }
        let k = self.block_of[p];
        if self.new_assigned[k as usize] {
            self.emit(p, better);
            return;
        }
        let slot = self.degree_slot[k as usize];
        let d = self.blocks[k as usize].1;
        for idx in 0..self.by_degree[slot].len() {
            let old = self.by_degree[slot][idx];
            if self.old_used[old as usize] {
                continue;
            }
            for rot in 0..d {
                self.place(k, old, rot);
                let better = self.prefix_is_better(p);
                self.emit(p, better);
                self.unplace(k, old);
            }
        }
    }

    fn emit(&mut self, p: usize, better: bool) {
        let q = self.eps[self.new_to_old[p] as usize];
        let mut forced = None;
        if self.old_to_new[q as usize] == UNSET {
            let old = self.block_of[q as usize];
            let slot = self.degree_slot[old as usize];
            let new = self.by_degree[slot][self.next_new[slot]];
            let rot = q - self.blocks[old as usize].0;
            self.place(new, old, rot);
            forced = Some((new, old));
        }
        let value = self.old_to_new[q as usize];
        let mut better = better;
        let mut prune = false;
        if !better {
            if let Some(b) = &self.best {
                if value > b[p] {
                    prune = true;
                } else if value < b[p] {
                    better = true;
                }
            }
        }
        if !prune {
            self.cur[p] = value;
            self.step(p + 1, better);
        }
        if let Some((new, old)) = forced {
            self.unplace(new, old);
        }
    }
}

/// Lexicographically smallest relabelled involution and the number of group
/// elements attaining it, which is the automorphism order.
pub(crate) fn search(blocks: &[(u32, u32)], eps: &[u32]) -> (Vec<u32>, u64) {
    if eps.is_empty() {
        return (Vec::new(), 1);
    }
    let mut s = Search::new(blocks, eps);
    s.step(0, false);
    (s.best.expect("group is non-empty"), s.hits)
}

/// Counts group elements commuting with `eps` by visiting every element.
pub(crate) fn aut_by_group_scan(blocks: &[(u32, u32)], eps: &[u32]) -> u64 {
    let n = eps.len();
    let mut s = Search::new(blocks, eps);
    let mut count = 0u64;

    fn go(s: &mut Search<'_>, k: usize, n: usize, count: &mut u64) {
        if k == s.blocks.len() {
            let fixed =
                (0..n).all(|h| s.old_to_new[s.eps[h] as usize] == s.eps[s.old_to_new[h] as usize]);
            if fixed {
                *count += 1;
            }
            return;
        }
        let slot = s.degree_slot[k];
        let d = s.blocks[k].1;
        for idx in 0..s.by_degree[slot].len() {
            let old = s.by_degree[slot][idx];
            if s.old_used[old as usize] {
                continue;
            }
            for rot in 0..d {
                s.place(k as u32, old, rot);
                go(s, k + 1, n, count);
                s.unplace(k as u32, old);
            }
        }
    }

    go(&mut s, 0, n, &mut count);
    count
}
