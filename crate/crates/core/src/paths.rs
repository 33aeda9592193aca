//! k-paths: free-group words of oriented k-simplices, boundary realizations,
//! cycle search and the empty realization of ∂∂.
//!
//! Cancellation follows the iterated cancel-and-substitute procedure: the
//! boundary of each letter forms a portion, adjacent portions are merged after
//! cyclic rotation and the merged word is cyclically reduced. A path is a
//! cycle when some realization lets every portion vanish. Rotation is
//! conjugation, so the abelianized boundary is preserved at every step.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::OrientedSimplex;
use crate::error::{input, Error, Result};
use crate::Verdict;

/// Reduced word of oriented k-simplices.
#[derive(Clone, Debug)]
pub struct KPath {
    dim: usize,
    word: Vec<OrientedSimplex>,
}

fn free_reduce(word: Vec<OrientedSimplex>) -> Vec<OrientedSimplex> {
    let mut out: Vec<OrientedSimplex> = Vec::with_capacity(word.len());
    for s in word {
        if out.last().is_some_and(|t| t.is_reverse_of(&s)) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

impl KPath {
    pub fn empty(dim: usize) -> Self {
        KPath { dim, word: Vec::new() }
    }

    pub fn single(s: OrientedSimplex) -> Self {
        KPath { dim: s.dim(), word: vec![s] }
    }

    /// Freely reduced path from a word of equal-dimensional simplices.
    pub fn new(word: Vec<OrientedSimplex>) -> Result<Self> {
        let dim = match word.first() {
            Some(s) => s.dim(),
            None => return input("use KPath::empty for the empty word"),
        };
        if word.iter().any(|s| s.dim() != dim) {
            return input("k-path letters must share a dimension");
        }
        Ok(KPath { dim, word: free_reduce(word) })
    }

    pub fn from_vertex_lists(lists: &[Vec<usize>]) -> Result<Self> {
        let word: Result<Vec<_>> = lists.iter().map(|l| OrientedSimplex::checked(l.clone())).collect();
        Self::new(word?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn word(&self) -> &[OrientedSimplex] {
        &self.word
    }
    pub fn len(&self) -> usize {
        self.word.len()
    }
    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn compose(&self, other: &KPath) -> Result<KPath> {
        if !self.is_empty() && !other.is_empty() && self.dim != other.dim {
            return input(format!("cannot compose {}-path with {}-path", self.dim, other.dim));
        }
        let dim = if self.is_empty() { other.dim } else { self.dim };
        let mut w = self.word.clone();
        w.extend(other.word.iter().cloned());
        Ok(KPath { dim, word: free_reduce(w) })
    }

    pub fn inverse(&self) -> KPath {
        KPath { dim: self.dim, word: self.word.iter().rev().map(|s| s.reversed()).collect() }
    }

    /// Signed multiplicity of each reference simplex.
    pub fn abelianize(&self) -> BTreeMap<Vec<usize>, i64> {
        let mut m = BTreeMap::new();
        for s in &self.word {
            let (k, sg) = s.key();
            *m.entry(k).or_insert(0) += sg as i64;
        }
        m.retain(|_, v| *v != 0);
        m
    }

    /// Abelianized boundary (the chain-complex boundary of the abelianization).
    pub fn abelian_boundary(&self) -> BTreeMap<Vec<usize>, i64> {
        let mut m = BTreeMap::new();
        if self.dim == 0 {
            return m;
        }
        for s in &self.word {
            for f in s.boundary_word() {
                let (k, sg) = f.key();
                *m.entry(k).or_insert(0) += sg as i64;
            }
        }
        m.retain(|_, v| *v != 0);
        m
    }
}

impl PartialEq for KPath {
    fn eq(&self, other: &Self) -> bool {
        self.word.len() == other.word.len()
            && (self.word.is_empty() || self.dim == other.dim)
            && self.word.iter().zip(&other.word).all(|(a, b)| a.orientation_equal(b))
    }
}

impl fmt::Display for KPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "∅");
        }
        for s in &self.word {
            write!(f, "{}", s)?;
        }
        Ok(())
    }
}

/// Even permutations of `0..n` in lexicographic order, identity first.
pub fn even_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if crate::complex::permutation_sign(&p) == 1 {
            out.push(p.clone());
        }
        // next lexicographic permutation
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// Number of boundary realizations of a k-simplex: (k+1)!/2, or 1 for edges.
pub fn realization_count(k: usize) -> usize {
    let f: usize = (1..=k + 1).product();
    (f / 2).max(1)
}

/// The r-th realization of ∂s: the boundary word of the r-th even
/// rearrangement of the vertex list (r = 0 is the canonical one).
pub fn boundary_realization(s: &OrientedSimplex, r: usize) -> Vec<OrientedSimplex> {
    if s.dim() == 1 {
        return s.boundary_word();
    }
    let perms = even_permutations(s.vertices.len());
    let p = &perms[r];
    let t = OrientedSimplex { vertices: p.iter().map(|&i| s.vertices[i]).collect(), flipped: s.flipped };
    t.boundary_word()
}

/// All realizations of ∂s, canonical first.
pub fn boundary_realizations(s: &OrientedSimplex) -> Result<Vec<KPath>> {
    if s.dim() == 0 {
        return input("0-simplices have no boundary");
    }
    (0..realization_count(s.dim()))
        .map(|r| KPath::new(boundary_realization(s, r)))
        .collect()
}

/// Letter encoding of oriented cells as signed integers.
#[derive(Default, Debug, Clone)]
struct CellTable {
    ids: HashMap<Vec<usize>, i32>,
}

impl CellTable {
    fn letter(&mut self, s: &OrientedSimplex) -> i32 {
        let (k, sg) = s.key();
        let n = self.ids.len() as i32 + 1;
        let id = *self.ids.entry(k).or_insert(n);
        id * sg as i32
    }
}

/// One merge of adjacent portions `index` and `index + 1` after rotating
/// them left by `r1` and `r2` letters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeStep {
    pub index: usize,
    pub r1: usize,
    pub r2: usize,
}

fn inv_word(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|x| -x).collect()
}

fn reduce_word(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Free then cyclic reduction. Each stripped pair conjugates the tracked word.
fn cyclic_reduce(w: &[i32], mut track: Option<&mut Vec<i32>>) -> Vec<i32> {
    let mut r = reduce_word(w);
    let mut lo = 0;
    let mut hi = r.len();
    while hi - lo >= 2 && r[lo] == -r[hi - 1] {
        if let Some(u) = track.as_deref_mut() {
            let x = r[lo];
            u.insert(0, -x);
            u.push(x);
        }
        lo += 1;
        hi -= 1;
    }
    r.drain(hi..);
    r.drain(..lo);
    r
}

fn rotate(w: &[i32], r: usize, track: Option<&mut Vec<i32>>) -> Vec<i32> {
    if w.is_empty() {
        return Vec::new();
    }
    let r = r % w.len();
    if let Some(u) = track {
        let x = &w[..r];
        let mut nu = inv_word(x);
        nu.extend_from_slice(u);
        nu.extend_from_slice(x);
        *u = nu;
    }
    let mut out = w[r..].to_vec();
    out.extend_from_slice(&w[..r]);
    out
}

fn min_rotation(w: &[i32]) -> Vec<i32> {
    (0..w.len().max(1))
        .map(|r| rotate(w, r, None))
        .min()
        .unwrap_or_default()
}

fn merge(a: &[i32], b: &[i32], step: &MergeStep, ua: Option<&mut Vec<i32>>, ub: Option<Vec<i32>>) -> Vec<i32> {
    match (ua, ub) {
        (Some(ua), Some(mut ub)) => {
            let mut c = rotate(a, step.r1, Some(ua));
            c.extend(rotate(b, step.r2, Some(&mut ub)));
            ua.extend(ub);
            cyclic_reduce(&c, Some(ua))
        }
        _ => {
            let mut c = rotate(a, step.r1, None);
            c.extend(rotate(b, step.r2, None));
            cyclic_reduce(&c, None)
        }
    }
}

enum Outcome {
    Found,
    Exhausted,
    Budget,
}

struct MergeSearch {
    budget: usize,
    nodes: usize,
    dead: HashSet<Vec<Vec<i32>>>,
}

impl MergeSearch {
    fn new(budget: usize) -> Self {
        MergeSearch { budget, nodes: 0, dead: HashSet::new() }
    }

    fn run(&mut self, state: Vec<Vec<i32>>, steps: &mut Vec<MergeStep>) -> Outcome {
        if state.is_empty() {
            return Outcome::Found;
        }
        if state.len() == 1 {
            return Outcome::Exhausted;
        }
        let key: Vec<Vec<i32>> = state.iter().map(|w| min_rotation(w)).collect();
        if self.dead.contains(&key) {
            return Outcome::Exhausted;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Outcome::Budget;
        }
        let mut moves: Vec<(usize, MergeStep, Vec<i32>)> = Vec::new();
        for i in 0..state.len() - 1 {
            let (a, b) = (&state[i], &state[i + 1]);
            let mut seen = HashSet::new();
            for r1 in 0..a.len() {
                for r2 in 0..b.len() {
                    let step = MergeStep { index: i, r1, r2 };
                    let c = merge(a, b, &step, None, None);
                    // rotations giving the same merged cyclic word are equivalent
                    if seen.insert(min_rotation(&c)) {
                        moves.push((c.len(), step, c));
                    }
                }
            }
        }
        moves.sort_by_key(|(len, step, _)| {
            let before = state[step.index].len() + state[step.index + 1].len();
            (*len as isize - before as isize, step.index, step.r1, step.r2)
        });
        for (_, step, c) in moves {
            let mut next = Vec::with_capacity(state.len() - 1);
            next.extend_from_slice(&state[..step.index]);
            if !c.is_empty() {
                next.push(c);
            }
            next.extend_from_slice(&state[step.index + 2..]);
            steps.push(step);
            match self.run(next, steps) {
                Outcome::Found => return Outcome::Found,
                Outcome::Budget => return Outcome::Budget,
                Outcome::Exhausted => {
                    steps.pop();
                }
            }
        }
        self.dead.insert(key);
        Outcome::Exhausted
    }
}

/// Portions of a word of letters under the chosen realizations, cyclically reduced.
fn initial_portions(raw: &[Vec<i32>], track: Option<&mut Vec<Vec<i32>>>) -> Vec<Vec<i32>> {
    match track {
        Some(us) => raw
            .iter()
            .zip(us.iter_mut())
            .map(|(w, u)| cyclic_reduce(w, Some(u)))
            .collect(),
        None => raw.iter().map(|w| cyclic_reduce(w, None)).collect(),
    }
}

fn drop_empty(p: Vec<Vec<i32>>) -> Vec<Vec<i32>> {
    p.into_iter().filter(|w| !w.is_empty()).collect()
}

/// Realization indices for each letter of `letters`, in lexicographic
/// order with the all-canonical choice first.
struct Odometer {
    radices: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let n = radices.len();
        Odometer { radices, cur: vec![0; n], done: false }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.cur.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.radices[i] {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}

/// Search result of a cycle test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub realization: Vec<usize>,
    pub steps: Vec<MergeStep>,
}

/// Whether `p` admits an empty boundary realization. "No" when the
/// abelianized boundary is non-zero or the whole search space fails;
/// "unknown" when the node budget runs out.
pub fn is_cycle(p: &KPath, budget: usize) -> Verdict {
    cycle_search(p, budget).0
}

pub fn cycle_search(p: &KPath, budget: usize) -> (Verdict, Option<CycleWitness>) {
    if p.is_empty() {
        return (Verdict::Yes, Some(CycleWitness { realization: vec![], steps: vec![] }));
    }
    if p.dim() == 0 {
        return (Verdict::No, None);
    }
    if !p.abelian_boundary().is_empty() {
        return (Verdict::No, None);
    }
    let mut table = CellTable::default();
    let radices: Vec<usize> = p.word().iter().map(|s| realization_count(s.dim())).collect();
    let mut search = MergeSearch::new(budget);
    for choice in Odometer::new(radices) {
        let raw: Vec<Vec<i32>> = p
            .word()
            .iter()
            .zip(&choice)
            .map(|(s, &r)| boundary_realization(s, r).iter().map(|f| table.letter(f)).collect())
            .collect();
        let portions = drop_empty(initial_portions(&raw, None));
        let mut steps = Vec::new();
        match search.run(portions, &mut steps) {
            Outcome::Found => return (Verdict::Yes, Some(CycleWitness { realization: choice, steps })),
            Outcome::Budget => return (Verdict::Unknown, None),
            Outcome::Exhausted => {}
        }
    }
    (Verdict::No, None)
}

/// Empty realization of ∂∂p: realization indices at both levels plus the merges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdWitness {
    /// Realization index per letter of `p`.
    pub level_k: Vec<usize>,
    /// The reduced (k−1)-path ∂p obtained from `level_k`.
    pub boundary: Vec<OrientedSimplex>,
    /// Realization index per letter of `boundary`.
    pub level_k1: Vec<usize>,
    pub steps: Vec<MergeStep>,
}

/// Finds realizations of ∂ at both levels whose portions all cancel.
pub fn dd_empty_witness(p: &KPath, budget: usize) -> Result<DdWitness> {
    if p.dim() < 2 && !p.is_empty() {
        return input("∂∂ needs paths of dimension at least 2");
    }
    let radices: Vec<usize> = p.word().iter().map(|s| realization_count(s.dim())).collect();
    let mut search = MergeSearch::new(budget);
    let mut table = CellTable::default();
    for choice in Odometer::new(radices) {
        let mut bw = Vec::new();
        for (s, &r) in p.word().iter().zip(&choice) {
            bw.extend(boundary_realization(s, r));
        }
        let boundary = free_reduce(bw);
        let inner: Vec<usize> = boundary.iter().map(|s| realization_count(s.dim())).collect();
        for choice2 in Odometer::new(inner) {
            let raw: Vec<Vec<i32>> = boundary
                .iter()
                .zip(&choice2)
                .map(|(s, &r)| boundary_realization(s, r).iter().map(|f| table.letter(f)).collect())
                .collect();
            let portions = drop_empty(initial_portions(&raw, None));
            let mut steps = Vec::new();
            match search.run(portions, &mut steps) {
                Outcome::Found => {
                    return Ok(DdWitness { level_k: choice, boundary, level_k1: choice2, steps });
                }
                Outcome::Budget => return Err(Error::Budget(budget)),
                Outcome::Exhausted => {}
            }
        }
    }
    Err(Error::Input("no empty realization of ∂∂ exists".into()))
}

/// Replays a witness, tracking for every portion an unreduced word that
/// freely reduces to it. Returns the concatenated tracked word: a
/// rearrangement of ∂∂p with inserted conjugations, as oriented simplices.
pub fn replay_dd_witness(w: &DdWitness) -> Vec<OrientedSimplex> {
    let mut table = CellTable::default();
    let mut back: HashMap<i32, OrientedSimplex> = HashMap::new();
    let raw: Vec<Vec<i32>> = w
        .boundary
        .iter()
        .zip(&w.level_k1)
        .map(|(s, &r)| {
            boundary_realization(s, r)
                .iter()
                .map(|f| {
                    let l = table.letter(f);
                    back.entry(l).or_insert_with(|| f.clone());
                    back.entry(-l).or_insert_with(|| f.reversed());
                    l
                })
                .collect()
        })
        .collect();
    let mut tracks: Vec<Vec<i32>> = raw.clone();
    let portions = initial_portions(&raw, Some(&mut tracks));
    let mut state: Vec<(Vec<i32>, Vec<i32>)> = portions.into_iter().zip(tracks).collect();
    let mut finished: Vec<Vec<i32>> = Vec::new();
    state.retain(|(p, u)| {
        if p.is_empty() {
            finished.push(u.clone());
            false
        } else {
            true
        }
    });
    for step in &w.steps {
        let (b, ub) = state.remove(step.index + 1);
        let (a, mut ua) = state.remove(step.index);
        let c = merge(&a, &b, step, Some(&mut ua), Some(ub));
        if c.is_empty() {
            finished.push(ua);
        } else {
            state.insert(step.index, (c, ua));
        }
    }
    finished
        .into_iter()
        .chain(state.into_iter().map(|(_, u)| u))
        .flatten()
        .map(|l| back[&l].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[usize]) -> OrientedSimplex {
        OrientedSimplex::new(v.to_vec())
    }

    #[test]
    fn cancellation() {
        let p = KPath::from_vertex_lists(&[vec![0, 1]]).unwrap();
        let q = KPath::from_vertex_lists(&[vec![1, 0]]).unwrap();
        assert!(p.compose(&q).unwrap().is_empty());
        let abc = KPath::single(os(&[0, 1, 2]));
        assert_eq!(abc.inverse(), KPath::single(os(&[0, 2, 1])));
    }

    #[test]
    fn realizations_of_triangle() {
        let r = boundary_realizations(&os(&[0, 1, 2])).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], KPath::from_vertex_lists(&[vec![1, 2], vec![2, 0], vec![0, 1]]).unwrap());
        assert_eq!(boundary_realizations(&os(&[0, 1, 2, 3])).unwrap().len(), 12);
    }

    #[test]
    fn cycles() {
        let tri = KPath::from_vertex_lists(&[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(is_cycle(&tri, 10_000), Verdict::Yes);
        let e = KPath::from_vertex_lists(&[vec![0, 1]]).unwrap();
        assert_eq!(is_cycle(&e, 10_000), Verdict::No);
        let odd = KPath::from_vertex_lists(&[vec![0, 1], vec![2, 0], vec![1, 2]]).unwrap();
        assert_eq!(is_cycle(&odd, 10_000), Verdict::Yes);
    }

    #[test]
    fn dd_tetrahedron() {
        let p = KPath::single(os(&[0, 1, 2, 3]));
        let w = dd_empty_witness(&p, 100_000).unwrap();
        let word = replay_dd_witness(&w);
        let kp = KPath::new(word).unwrap();
        assert!(kp.is_empty());
    }
}
