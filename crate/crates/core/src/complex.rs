//! Simplicial complexes, oriented simplices and Vietoris–Rips construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

/// Sign of the permutation sorting `v` (+1 even, −1 odd). Entries must be distinct.
pub fn permutation_sign(v: &[usize]) -> i8 {
    let mut s = 1i8;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}

/// Ordered list of distinct vertices. Orientation is the parity class of the
/// ordering; 0-simplices carry an explicit orientation flag so that the
/// boundary of an edge, (B)(Ā), can be written.
#[derive(Clone, Debug, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedSimplex {
    pub vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flipped: bool,
}

impl OrientedSimplex {
    pub fn new(vertices: Vec<usize>) -> Self {
        OrientedSimplex { vertices, flipped: false }
    }

    pub fn checked(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return input("a simplex needs at least one vertex");
        }
        let set: BTreeSet<_> = vertices.iter().collect();
        if set.len() != vertices.len() {
            return input(format!("repeated vertex in {:?}", vertices));
        }
        Ok(Self::new(vertices))
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Vertices in ascending order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }

    /// +1 when this orientation agrees with the ascending reference orientation.
    pub fn sign(&self) -> i8 {
        let s = permutation_sign(&self.vertices);
        if self.flipped {
            -s
        } else {
            s
        }
    }

    /// Reference simplex and orientation sign.
    pub fn key(&self) -> (Vec<usize>, i8) {
        (self.sorted(), self.sign())
    }

    pub fn orientation_equal(&self, other: &Self) -> bool {
        self.key() == other.key()
    }

    pub fn is_reverse_of(&self, other: &Self) -> bool {
        let (a, s) = self.key();
        let (b, t) = other.key();
        a == b && s == -t
    }

    /// Orientation reversal: swap the first two vertices, or flip a 0-simplex.
    pub fn reversed(&self) -> Self {
        if self.vertices.len() < 2 {
            OrientedSimplex { vertices: self.vertices.clone(), flipped: !self.flipped }
        } else {
            let mut v = self.vertices.clone();
            v.swap(0, 1);
            OrientedSimplex { vertices: v, flipped: self.flipped }
        }
    }

    /// Reference-oriented copy.
    pub fn reference(&self) -> Self {
        Self::new(self.sorted())
    }

    /// Face omitting the i-th vertex, inherited order, oriented with sign (−1)^i.
    pub fn boundary_face(&self, i: usize) -> Self {
        let mut v = self.vertices.clone();
        v.remove(i);
        let f = OrientedSimplex { vertices: v, flipped: self.flipped };
        if i % 2 == 1 {
            f.reversed()
        } else {
            f
        }
    }

    /// Faces in boundary order: ∂(A₀…A_k) = Π_i (−1)^i (A₀…Âᵢ…A_k).
    pub fn boundary_word(&self) -> Vec<OrientedSimplex> {
        (0..self.vertices.len()).map(|i| self.boundary_face(i)).collect()
    }

    /// Same oriented simplex with its vertex list cyclically or otherwise
    /// rearranged so that `a` comes first (swapping the last two vertices if
    /// needed to keep the orientation).
    pub fn starting_at(&self, a: usize) -> Option<Self> {
        let pos = self.vertices.iter().position(|&x| x == a)?;
        let mut v = self.vertices.clone();
        let x = v.remove(pos);
        v.insert(0, x);
        if pos % 2 == 1 && v.len() >= 3 {
            let n = v.len();
            v.swap(n - 2, n - 1);
        } else if pos % 2 == 1 {
            // edge: moving the second vertex to the front reverses it
            return Some(OrientedSimplex { vertices: self.vertices.clone(), flipped: self.flipped });
        }
        Some(OrientedSimplex { vertices: v, flipped: self.flipped })
    }
}

impl PartialEq for OrientedSimplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.flipped == other.flipped
    }
}

impl fmt::Display for OrientedSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.flipped {
            write!(f, "-")?;
        }
        write!(f, "(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, ")")
    }
}

/// Point cloud with explicit vertex ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub ids: Vec<usize>,
    pub coords: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(ids: Vec<usize>, coords: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != coords.len() {
            return input("ids and coordinates differ in length");
        }
        let set: BTreeSet<_> = ids.iter().collect();
        if set.len() != ids.len() {
            return input("duplicate point id");
        }
        if let Some(d) = coords.first().map(|c| c.len()) {
            for c in &coords {
                if c.len() != d {
                    return Err(Error::Dimension { expected: d, got: c.len() });
                }
                if c.iter().any(|x| !x.is_finite()) {
                    return input("non-finite coordinate");
                }
            }
        }
        Ok(PointCloud { ids, coords })
    }

    /// Reads `id,x0,x1,...` CSV with a header row.
    pub fn from_csv_reader<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut ids = Vec::new();
        let mut coords = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let mut it = rec.iter();
            let id: usize = it
                .next()
                .ok_or_else(|| Error::Input("empty row".into()))?
                .trim()
                .parse()
                .map_err(|e| Error::Input(format!("bad id: {}", e)))?;
            let c: std::result::Result<Vec<f64>, _> = it.map(|x| x.trim().parse::<f64>()).collect();
            ids.push(id);
            coords.push(c.map_err(|e| Error::Input(format!("bad coordinate: {}", e)))?);
        }
        Self::new(ids, coords)
    }

    pub fn from_csv_path(p: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(p)?)
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.coords[a]
            .iter()
            .zip(&self.coords[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// JSON form `{"vertex_count": n, "maximal_simplices": [[ids], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub vertex_count: usize,
    pub maximal_simplices: Vec<Vec<usize>>,
}

/// A finite abstract simplicial complex. Simplices are stored in reference
/// (ascending) orientation, grouped by dimension and sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    vertices: Vec<usize>,
    by_dim: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    faced: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    fn from_set(vertices: BTreeSet<usize>, all: BTreeSet<Vec<usize>>) -> Self {
        let maxd = all.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<Vec<usize>>> = vec![Vec::new(); maxd];
        for s in &all {
            by_dim[s.len() - 1].push(s.clone());
        }
        for v in by_dim.iter_mut() {
            v.sort();
        }
        let index = by_dim
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        // a simplex is faced iff no simplex one dimension up contains it
        let mut covered: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in &all {
            if s.len() >= 2 {
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    covered.insert(f);
                }
            }
        }
        let mut faced: Vec<Vec<usize>> = all.iter().filter(|s| !covered.contains(*s)).cloned().collect();
        faced.sort();
        SimplicialComplex { vertices: vertices.into_iter().collect(), by_dim, index, faced }
    }

    /// Face closure of the given simplices on vertices `0..vertex_count`.
    pub fn from_maximal_simplices(vertex_count: usize, maximal: &[Vec<usize>]) -> Result<Self> {
        let mut all = BTreeSet::new();
        for s in maximal {
            if s.is_empty() {
                return input("empty simplex in maximal list");
            }
            let mut t = s.clone();
            t.sort_unstable();
            t.dedup();
            if t.len() != s.len() {
                return input(format!("repeated vertex in {:?}", s));
            }
            if let Some(&v) = t.iter().find(|&&v| v >= vertex_count) {
                return input(format!("vertex {} out of range (vertex_count {})", v, vertex_count));
            }
            if t.len() > 16 {
                return input("simplices above dimension 15 are not supported");
            }
            add_closure(&t, &mut all);
        }
        for v in 0..vertex_count {
            all.insert(vec![v]);
        }
        Ok(Self::from_set((0..vertex_count).collect(), all))
    }

    pub fn from_spec(spec: &ComplexSpec) -> Result<Self> {
        Self::from_maximal_simplices(spec.vertex_count, &spec.maximal_simplices)
    }

    pub fn to_spec(&self) -> ComplexSpec {
        ComplexSpec {
            vertex_count: self.vertices.last().map(|v| v + 1).unwrap_or(0),
            maximal_simplices: self.faced.clone(),
        }
    }

    /// Vietoris–Rips complex: cliques of the `radius`-neighbourhood graph up to `max_dim`.
    pub fn build_vietoris_rips(cloud: &PointCloud, radius: f64, max_dim: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return input("radius must be a positive finite number");
        }
        let n = cloud.ids.len();
        let dist = |a: usize, b: usize| cloud.distance(a, b);
        Self::rips_core(&cloud.ids, n, dist, radius, max_dim)
    }

    /// Vietoris–Rips complex from a symmetric distance matrix on vertices `0..n`.
    pub fn vietoris_rips_from_distances(d: &[Vec<f64>], radius: f64, max_dim: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return input("radius must be positive");
        }
        let n = d.len();
        if d.iter().any(|r| r.len() != n) {
            return input("distance matrix must be square");
        }
        let ids: Vec<usize> = (0..n).collect();
        Self::rips_core(&ids, n, |a, b| d[a][b], radius, max_dim)
    }

    fn rips_core<F: Fn(usize, usize) -> f64>(
        ids: &[usize],
        n: usize,
        dist: F,
        radius: f64,
        max_dim: usize,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in (a + 1)..n {
                let d = dist(a, b);
                if !d.is_finite() {
                    return input("non-finite distance");
                }
                if d <= radius {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        let mut all = BTreeSet::new();
        // extend cliques by higher-indexed common neighbours
        fn grow(
            clique: &mut Vec<usize>,
            cand: &[usize],
            adj: &[Vec<usize>],
            ids: &[usize],
            max_len: usize,
            out: &mut BTreeSet<Vec<usize>>,
        ) {
            let mut s: Vec<usize> = clique.iter().map(|&i| ids[i]).collect();
            s.sort_unstable();
            out.insert(s);
            if clique.len() == max_len {
                return;
            }
            for (k, &c) in cand.iter().enumerate() {
                let next: Vec<usize> = cand[k + 1..].iter().copied().filter(|x| adj[c].contains(x)).collect();
                clique.push(c);
                grow(clique, &next, adj, ids, max_len, out);
                clique.pop();
            }
        }
        for v in 0..n {
            let cand: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
            grow(&mut vec![v], &cand, &adj, ids, max_dim + 1, &mut all);
        }
        Ok(Self::from_set(ids.iter().copied().collect(), all))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Highest simplex dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    /// Reference-oriented k-simplices in sorted order.
    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.by_dim.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        if s.is_empty() {
            return None;
        }
        let mut t = s.to_vec();
        t.sort_unstable();
        self.index.get(t.len() - 1)?.get(&t).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    /// Maximal simplices (reference orientation, sorted).
    pub fn faced(&self) -> &[Vec<usize>] {
        &self.faced
    }

    pub fn faced_simplices(&self) -> Vec<OrientedSimplex> {
        self.faced.iter().map(|s| OrientedSimplex::new(s.clone())).collect()
    }

    /// Indices of faced simplices containing `s`.
    pub fn charts_containing(&self, s: &[usize]) -> Vec<usize> {
        self.faced
            .iter()
            .enumerate()
            .filter(|(_, f)| s.iter().all(|v| f.contains(v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Shared faces of two simplices of the complex, grouped by dimension.
    pub fn common_faces(&self, s1: &[usize], s2: &[usize]) -> Result<Vec<(OrientedSimplex, usize)>> {
        if !self.contains(s1) || !self.contains(s2) {
            return input("simplex not in complex");
        }
        let shared: Vec<usize> = {
            let a: BTreeSet<usize> = s1.iter().copied().collect();
            let b: BTreeSet<usize> = s2.iter().copied().collect();
            a.intersection(&b).copied().collect()
        };
        let mut out = Vec::new();
        for f in subsets(&shared) {
            let d = f.len() - 1;
            out.push((OrientedSimplex::new(f), d));
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.vertices.cmp(&b.0.vertices)));
        Ok(out)
    }

    /// Neighbours of a vertex in the 1-skeleton, ascending.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .simplices(1)
            .iter()
            .filter_map(|e| {
                if e[0] == v {
                    Some(e[1])
                } else if e[1] == v {
                    Some(e[0])
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Adjacency lists of the 1-skeleton keyed by vertex.
    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for e in self.simplices(1) {
            adj.get_mut(&e[0]).expect("vertex").push(e[1]);
            adj.get_mut(&e[1]).expect("vertex").push(e[0]);
        }
        for l in adj.values_mut() {
            l.sort_unstable();
        }
        adj
    }

    /// Reference-oriented (k+1)-simplices having `s` as a face.
    pub fn cofaces(&self, s: &[usize]) -> Vec<Vec<usize>> {
        self.simplices(s.len())
            .iter()
            .filter(|t| s.iter().all(|v| t.contains(v)))
            .cloned()
            .collect()
    }

    pub fn is_face_closed(&self) -> bool {
        for (k, level) in self.by_dim.iter().enumerate() {
            if k == 0 {
                continue;
            }
            for s in level {
                for i in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(i);
                    if !self.contains(&f) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Every simplex of `self` is in `other`.
    pub fn is_subcomplex_of(&self, other: &Self) -> bool {
        self.by_dim.iter().flatten().all(|s| other.contains(s))
    }

    /// Integer boundary matrix ∂_k: rows (k−1)-simplices, columns k-simplices.
    pub fn boundary_matrix(&self, k: usize) -> Vec<Vec<i64>> {
        if k == 0 {
            return Vec::new();
        }
        let rows = self.count(k - 1);
        let cols = self.simplices(k);
        let mut m = vec![vec![0i64; cols.len()]; rows];
        for (j, s) in cols.iter().enumerate() {
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                let r = self.index_of(&f).expect("face-closed");
                m[r][j] += if i % 2 == 0 { 1 } else { -1 };
            }
        }
        m
    }
}

fn add_closure(s: &[usize], out: &mut BTreeSet<Vec<usize>>) {
    if out.contains(s) {
        return;
    }
    for f in subsets(s) {
        out.insert(f);
    }
}

/// All non-empty subsets of a sorted list, each sorted.
pub fn subsets(s: &[usize]) -> Vec<Vec<usize>> {
    let n = s.len();
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(1));
    for mask in 1u32..(1u32 << n) {
        out.push((0..n).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect());
    }
    out
}

/// Hollow or filled standard fixtures used in examples and tests.
pub mod fixtures {
    use super::SimplicialComplex;

    pub fn triangle() -> SimplicialComplex {
        SimplicialComplex::from_maximal_simplices(3, &[vec![0, 1, 2]]).expect("fixture")
    }

    pub fn hollow_triangle() -> SimplicialComplex {
        SimplicialComplex::from_maximal_simplices(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).expect("fixture")
    }

    pub fn tetrahedron_boundary() -> SimplicialComplex {
        SimplicialComplex::from_maximal_simplices(4, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
            .expect("fixture")
    }

    /// Cycle graph on n ≥ 3 vertices.
    pub fn circle(n: usize) -> SimplicialComplex {
        let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        SimplicialComplex::from_maximal_simplices(n, &edges).expect("fixture")
    }

    /// The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
    pub fn torus7() -> SimplicialComplex {
        let mut tris = Vec::new();
        for i in 0..7 {
            tris.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
            tris.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
        }
        SimplicialComplex::from_maximal_simplices(7, &tris).expect("fixture")
    }

    /// n×n grid torus (n ≥ 3); vertex (i, j) has id i·n + j.
    pub fn grid_torus(n: usize) -> SimplicialComplex {
        let id = |i: usize, j: usize| (i % n) * n + (j % n);
        let mut tris = Vec::new();
        for i in 0..n {
            for j in 0..n {
                tris.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                tris.push(vec![id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            }
        }
        SimplicialComplex::from_maximal_simplices(n * n, &tris).expect("fixture")
    }

    /// Fan of `n` triangles around centre vertex 0 with rim 1..=n closed into a disc.
    pub fn disc_fan(n: usize) -> SimplicialComplex {
        let tris: Vec<Vec<usize>> = (0..n).map(|k| vec![0, 1 + k, 1 + (k + 1) % n]).collect();
        SimplicialComplex::from_maximal_simplices(n + 1, &tris).expect("fixture")
    }

    /// Two triangles glued along the edge {1, 2}.
    pub fn two_triangles() -> SimplicialComplex {
        SimplicialComplex::from_maximal_simplices(4, &[vec![0, 1, 2], vec![1, 2, 3]]).expect("fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_subsumption() {
        let a = SimplicialComplex::from_maximal_simplices(3, &[vec![0, 1, 2], vec![0, 1]]).unwrap();
        let b = fixtures::triangle();
        assert_eq!(a, b);
        assert_eq!(b.count(1), 3);
        assert_eq!(b.faced(), &[vec![0, 1, 2]]);
        assert_eq!(fixtures::hollow_triangle().faced().len(), 3);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(SimplicialComplex::from_maximal_simplices(2, &[vec![0, 2]]).is_err());
    }

    #[test]
    fn boundary_of_triangle() {
        let s = OrientedSimplex::new(vec![0, 1, 2]);
        let w: Vec<Vec<usize>> = s.boundary_word().iter().map(|f| f.vertices.clone()).collect();
        assert_eq!(w, vec![vec![1, 2], vec![2, 0], vec![0, 1]]);
        let e = OrientedSimplex::new(vec![0, 1]).boundary_word();
        assert_eq!(e[0], OrientedSimplex::new(vec![1]));
        assert!(e[1].flipped);
    }

    #[test]
    fn starting_at_keeps_orientation() {
        let s = OrientedSimplex::new(vec![0, 1, 2, 3]);
        for a in 0..4 {
            let t = s.starting_at(a).unwrap();
            assert_eq!(t.vertices[0], a);
            assert_eq!(t.sign(), s.sign());
        }
    }

    #[test]
    fn torus7_is_closed_surface() {
        let t = fixtures::torus7();
        assert_eq!((t.count(0), t.count(1), t.count(2)), (7, 21, 14));
        for e in t.simplices(1) {
            assert_eq!(t.cofaces(e).len(), 2);
        }
        let g = fixtures::grid_torus(3);
        assert_eq!((g.count(0), g.count(1), g.count(2)), (9, 27, 18));
    }
}
