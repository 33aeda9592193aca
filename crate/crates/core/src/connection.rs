//! Connections on semidiscrete principal bundles: local expressions,
//! horizontality, covariant derivatives, curvature, parallel transport,
//! holonomy, Bianchi and torsion checks, flat connections.
//!
//! Total-space points are (vertex, fiber coordinate) pairs in one chart's
//! trivialization. The connection form between them is
//! φ((X,g),(Y,h)) = h·φ*(XY)·g⁻¹, so the horizontal lift of XY from
//! (X, g) ends at (Y, g·φ*(XY)⁻¹).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundle::{FieldValue, PrincipalBundle, Section};
use crate::complex::{OrientedSimplex, SimplicialComplex};
use crate::error::{input, Error, Result};
use crate::forms::{GForm, VForm};
use crate::group::{GaugeGroup, GroupElement};
use crate::paths::even_permutations;

fn edge_key(x: usize, y: usize) -> (usize, usize) {
    (x.min(y), x.max(y))
}

/// Local expressions φ*_i per chart. Reversed edges take the inverse.
#[derive(Clone, Debug)]
pub struct Connection {
    pub bundle: PrincipalBundle,
    local: Vec<BTreeMap<(usize, usize), GroupElement>>,
}

impl Connection {
    /// Values given in each edge's home chart (lowest-index chart holding
    /// it), carried to the other charts by the bundle transitions.
    pub fn from_home_values(bundle: &PrincipalBundle, values: &BTreeMap<(usize, usize), GroupElement>) -> Result<Self> {
        for (x, y) in values.keys() {
            if !bundle.complex.contains(&[*x, *y]) {
                return input(format!("edge ({}, {}) is not in the complex", x, y));
            }
        }
        let g = &bundle.group;
        let mut local = vec![BTreeMap::new(); bundle.chart_count()];
        for e in bundle.complex.simplices(1) {
            let key = (e[0], e[1]);
            let v = match (values.get(&key), values.get(&(e[1], e[0]))) {
                (Some(v), _) => v.clone(),
                (None, Some(v)) => g.inverse(v),
                (None, None) => g.identity(),
            };
            let charts = bundle.complex.charts_containing(e);
            let home = charts[0];
            for &c in &charts {
                let val = if c == home {
                    v.clone()
                } else {
                    match bundle.transition_apply(home, c, e, 1, &FieldValue::Group(v.clone()))? {
                        FieldValue::Group(x) => x,
                        FieldValue::Vector(_) => unreachable!("edge transitions are group-valued"),
                    }
                };
                local[c].insert(key, val);
            }
        }
        Ok(Connection { bundle: bundle.clone(), local })
    }

    /// Independent local values per chart, without imposing transitions.
    pub fn from_chart_values(bundle: &PrincipalBundle, charts: Vec<BTreeMap<(usize, usize), GroupElement>>) -> Result<Self> {
        if charts.len() != bundle.chart_count() {
            return Err(Error::Dimension { expected: bundle.chart_count(), got: charts.len() });
        }
        let g = &bundle.group;
        let mut local = vec![BTreeMap::new(); charts.len()];
        for (c, vals) in charts.into_iter().enumerate() {
            let verts = &bundle.charts()[c];
            for &(x, y) in vals.keys() {
                if !verts.contains(&x) || !verts.contains(&y) || x == y {
                    return input(format!("edge ({}, {}) is not in chart {}", x, y, c));
                }
            }
            for (a, &x) in verts.iter().enumerate() {
                for &y in &verts[a + 1..] {
                    let v = match (vals.get(&(x, y)), vals.get(&(y, x))) {
                        (Some(v), _) => v.clone(),
                        (None, Some(v)) => g.inverse(v),
                        (None, None) => g.identity(),
                    };
                    local[c].insert((x, y), v);
                }
            }
        }
        Ok(Connection { bundle: bundle.clone(), local })
    }

    pub fn identity(bundle: &PrincipalBundle) -> Self {
        Self::from_home_values(bundle, &BTreeMap::new()).expect("identity values are valid")
    }

    pub fn random<R: Rng + ?Sized>(bundle: &PrincipalBundle, rng: &mut R) -> Self {
        let vals = bundle
            .complex
            .simplices(1)
            .iter()
            .map(|e| ((e[0], e[1]), bundle.group.random_element(rng)))
            .collect();
        Self::from_home_values(bundle, &vals).expect("random values are valid")
    }

    pub fn group(&self) -> &GaugeGroup {
        &self.bundle.group
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.bundle.complex
    }

    /// φ*_chart(XY).
    pub fn local(&self, chart: usize, x: usize, y: usize) -> Result<GroupElement> {
        let m = self.local.get(chart).ok_or_else(|| Error::Input(format!("no chart {}", chart)))?;
        let v = m
            .get(&edge_key(x, y))
            .ok_or_else(|| Error::Input(format!("edge ({}, {}) not in chart {}", x, y, chart)))?;
        Ok(if x < y { v.clone() } else { self.group().inverse(v) })
    }

    /// φ*(XY) in the edge's home chart.
    pub fn phi(&self, x: usize, y: usize) -> Result<GroupElement> {
        let c = self.bundle.home_chart(&[x, y])?;
        self.local(c, x, y)
    }

    /// Home-chart values on sorted edges.
    pub fn home_values(&self) -> BTreeMap<(usize, usize), GroupElement> {
        self.complex()
            .simplices(1)
            .iter()
            .map(|e| ((e[0], e[1]), self.phi(e[0], e[1]).expect("edge in complex")))
            .collect()
    }

    pub fn chart_values(&self, chart: usize) -> Option<&BTreeMap<(usize, usize), GroupElement>> {
        self.local.get(chart)
    }

    /// Same home values with one edge replaced.
    pub fn with_edge(&self, x: usize, y: usize, g: GroupElement) -> Result<Self> {
        let mut vals = self.home_values();
        let (k, v) = if x < y { ((x, y), g) } else { ((y, x), self.group().inverse(&g)) };
        if !vals.contains_key(&k) {
            return input(format!("edge ({}, {}) is not in the complex", x, y));
        }
        vals.insert(k, v);
        Self::from_home_values(&self.bundle, &vals)
    }

    pub fn to_json(&self) -> ConnectionJson {
        ConnectionJson {
            charts: self
                .local
                .iter()
                .enumerate()
                .map(|(i, m)| ChartJson {
                    chart: self.bundle.charts()[i].clone(),
                    edges: m
                        .iter()
                        .map(|((x, y), g)| EdgeJson { edge: [*x, *y], value: self.group().element_to_json(g) })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(bundle: &PrincipalBundle, j: &ConnectionJson) -> Result<Self> {
        let mut charts = vec![BTreeMap::new(); bundle.chart_count()];
        for c in &j.charts {
            let mut key = c.chart.clone();
            key.sort_unstable();
            let idx = bundle
                .charts()
                .iter()
                .position(|s| *s == key)
                .ok_or_else(|| Error::Input(format!("{:?} is not a faced simplex", c.chart)))?;
            for e in &c.edges {
                charts[idx].insert((e.edge[0], e.edge[1]), bundle.group.element_from_json(&e.value)?);
            }
        }
        Self::from_chart_values(bundle, charts)
    }

    fn chart_for(&self, s: &[usize]) -> Result<usize> {
        self.bundle.home_chart(s)
    }
}

/// `{"charts":[{"chart":[..],"edges":[{"edge":[X,Y],"value":..}]}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectionJson {
    pub charts: Vec<ChartJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartJson {
    pub chart: Vec<usize>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub edge: [usize; 2],
    pub value: Value,
}

/// A total-space point in the trivialization of some chart.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    pub vertex: usize,
    pub coord: GroupElement,
}

impl FiberPoint {
    pub fn new(vertex: usize, coord: GroupElement) -> Self {
        FiberPoint { vertex, coord }
    }
}

/// φ(p, q) = h·φ*(XY)·g⁻¹, or h·g⁻¹ on a vertical edge.
pub fn total_phi(conn: &Connection, chart: usize, p: &FiberPoint, q: &FiberPoint) -> Result<GroupElement> {
    let g = conn.group();
    let ginv = g.inverse(&p.coord);
    if p.vertex == q.vertex {
        return Ok(g.mul(&q.coord, &ginv));
    }
    let verts = &conn.bundle.charts()[chart];
    if !verts.contains(&p.vertex) || !verts.contains(&q.vertex) {
        return input(format!("vertices {} and {} are not co-faced in chart {}", p.vertex, q.vertex, chart));
    }
    Ok(g.mul3(&q.coord, &conn.local(chart, p.vertex, q.vertex)?, &ginv))
}

pub fn is_horizontal(conn: &Connection, chart: usize, p: &FiberPoint, q: &FiberPoint) -> Result<bool> {
    Ok(conn.group().is_identity(&total_phi(conn, chart, p, q)?))
}

/// Keep the fiber point at `base`; move every other vertex so its edge from the base is horizontal.
pub fn horizontal_projection(conn: &Connection, chart: usize, simplex: &[FiberPoint], base: usize) -> Result<Vec<FiberPoint>> {
    let g = conn.group();
    let b = simplex
        .iter()
        .find(|p| p.vertex == base)
        .ok_or_else(|| Error::Input(format!("vertex {} not in simplex", base)))?
        .clone();
    simplex
        .iter()
        .map(|p| {
            if p.vertex == base {
                Ok(p.clone())
            } else {
                let h = g.mul(&b.coord, &g.inverse(&conn.local(chart, base, p.vertex)?));
                Ok(FiberPoint::new(p.vertex, h))
            }
        })
        .collect()
}

fn coords_product(g: &GaugeGroup, pts: &[&FiberPoint]) -> GroupElement {
    pts.iter().fold(g.identity(), |acc, p| g.mul(&acc, &p.coord))
}

/// Equivariant vector form on a total-space simplex: (g₀⋯g_k)·v*(X₀…X_k).
pub fn equivariant_value_v(v: &VForm, group: &GaugeGroup, pts: &[&FiberPoint]) -> Vec<f64> {
    let s = OrientedSimplex::new(pts.iter().map(|p| p.vertex).collect());
    group.act(&coords_product(group, pts), &v.eval(&s))
}

/// Equivariant G-valued form on a total-space simplex: conjugation by g₀⋯g_k.
pub fn equivariant_value_g(w: &GForm, pts: &[&FiberPoint]) -> GroupElement {
    let s = OrientedSimplex::new(pts.iter().map(|p| p.vertex).collect());
    w.group.conjugate(&coords_product(&w.group, pts), &w.eval(&s))
}

fn ordered_from_base(simplex: &[usize], base: usize) -> Result<Vec<usize>> {
    Ok(OrientedSimplex::new(simplex.to_vec())
        .starting_at(base)
        .ok_or_else(|| Error::Input(format!("vertex {} not in {:?}", base, simplex)))?
        .vertices)
}

fn check_degree(len: usize, degree: usize) -> Result<()> {
    if len != degree + 2 {
        return Err(Error::Dimension { expected: degree + 1, got: len.saturating_sub(1) });
    }
    Ok(())
}

fn projected(conn: &Connection, chart: usize, ordered: &[usize]) -> Result<Vec<FiberPoint>> {
    let pts: Vec<FiberPoint> = ordered.iter().map(|v| FiberPoint::new(*v, conn.group().identity())).collect();
    horizontal_projection(conn, chart, &pts, ordered[0])
}

/// ∇v|_X on a (k+1)-simplex: dv on the horizontal projection at X,
/// oriented as given (`base` rotated to the front by an even permutation).
pub fn covariant_derivative_v(conn: &Connection, v: &VForm, simplex: &[usize], base: usize) -> Result<Vec<f64>> {
    check_degree(simplex.len(), v.degree)?;
    point_based_v(conn, v, &ordered_from_base(simplex, base)?, 0)
}

/// Local formula: each face value transported by ∏ φ*(X Xᵢ)⁻¹ over its
/// vertices other than the base, then summed with alternating signs.
pub fn local_covariant_derivative_v(conn: &Connection, v: &VForm, simplex: &[usize], base: usize) -> Result<Vec<f64>> {
    check_degree(simplex.len(), v.degree)?;
    let g = conn.group();
    let chart = conn.chart_for(simplex)?;
    let ordered = ordered_from_base(simplex, base)?;
    let mut out = vec![0.0; v.dim];
    for i in 0..ordered.len() {
        let mut face = ordered.clone();
        face.remove(i);
        let mut t = g.identity();
        for &u in &face {
            if u != base {
                t = g.mul(&t, &g.inverse(&conn.local(chart, base, u)?));
            }
        }
        let val = g.act(&t, &v.eval(&OrientedSimplex::new(face)));
        let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (o, x) in out.iter_mut().zip(val) {
            *o += sgn * x;
        }
    }
    Ok(out)
}

/// ∇ω|_X: point-based differential at X on the horizontal projection.
pub fn covariant_derivative_g(conn: &Connection, w: &GForm, simplex: &[usize], base: usize) -> Result<GroupElement> {
    check_degree(simplex.len(), w.degree)?;
    let g = conn.group();
    let chart = conn.chart_for(simplex)?;
    let ordered = ordered_from_base(simplex, base)?;
    let pts = projected(conn, chart, &ordered)?;
    let mut acc = g.identity();
    for i in 0..pts.len() {
        let face: Vec<&FiberPoint> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        let val = equivariant_value_g(w, &face);
        let val = if i % 2 == 0 { val } else { g.inverse(&val) };
        acc = g.mul(&val, &acc);
    }
    Ok(acc)
}

/// Local formula for ∇ω|_X, conjugating each face value by its transport.
pub fn local_covariant_derivative_g(conn: &Connection, w: &GForm, simplex: &[usize], base: usize) -> Result<GroupElement> {
    check_degree(simplex.len(), w.degree)?;
    let g = conn.group();
    let chart = conn.chart_for(simplex)?;
    let ordered = ordered_from_base(simplex, base)?;
    let mut acc = g.identity();
    for i in 0..ordered.len() {
        let mut face = ordered.clone();
        face.remove(i);
        let mut t = g.identity();
        for &u in &face {
            if u != base {
                t = g.mul(&t, &g.inverse(&conn.local(chart, base, u)?));
            }
        }
        let val = g.conjugate(&t, &w.eval(&OrientedSimplex::new(face)));
        let val = if i % 2 == 0 { val } else { g.inverse(&val) };
        acc = g.mul(&val, &acc);
    }
    Ok(acc)
}

fn triangle_from_base(tri: &[usize], base: usize) -> Result<[usize; 3]> {
    if tri.len() != 3 {
        return Err(Error::Dimension { expected: 2, got: tri.len().saturating_sub(1) });
    }
    let o = ordered_from_base(tri, base)?;
    Ok([o[0], o[1], o[2]])
}

/// R|_X(XYZ) = φ*(ZX)φ*(YZ)φ*(XY) in the triangle's home chart, with the
/// triangle rotated (orientation kept) to start at the base.
pub fn curvature(conn: &Connection, tri: &[usize], base: usize) -> Result<GroupElement> {
    let [x, y, z] = triangle_from_base(tri, base)?;
    let chart = conn.chart_for(tri)?;
    let g = conn.group();
    Ok(g.mul3(&conn.local(chart, z, x)?, &conn.local(chart, y, z)?, &conn.local(chart, x, y)?))
}

/// Curvature as the covariant derivative of the connection form:
/// point-based differential at X on the horizontal projection, with the
/// base fiber coordinate `g` (the result is g·R|_X·g⁻¹).
pub fn curvature_via_projection(conn: &Connection, tri: &[usize], base: usize, fiber: &GroupElement) -> Result<GroupElement> {
    let [x, y, z] = triangle_from_base(tri, base)?;
    let chart = conn.chart_for(tri)?;
    let g = conn.group();
    let pts: Vec<FiberPoint> = [x, y, z].iter().map(|v| FiberPoint::new(*v, g.identity())).collect();
    let mut pts = pts;
    pts[0].coord = fiber.clone();
    let p = horizontal_projection(conn, chart, &pts, x)?;
    // boundary word (YZ)(ZX)(XY), first letter acting first
    let yz = total_phi(conn, chart, &p[1], &p[2])?;
    let zx = total_phi(conn, chart, &p[2], &p[0])?;
    let xy = total_phi(conn, chart, &p[0], &p[1])?;
    Ok(g.mul3(&xy, &zx, &yz))
}

/// ℛ = trace of the representation of R|_X.
pub fn scalar_curvature(conn: &Connection, tri: &[usize], base: usize) -> Result<f64> {
    Ok(conn.group().trace(&curvature(conn, tri, base)?))
}

/// Curvature of the total-space connection on three fiber points, based at the first.
fn total_curvature(conn: &Connection, chart: usize, p: &FiberPoint, q: &FiberPoint, r: &FiberPoint) -> Result<GroupElement> {
    let g = conn.group();
    Ok(g.mul3(&total_phi(conn, chart, r, p)?, &total_phi(conn, chart, q, r)?, &total_phi(conn, chart, p, q)?))
}

/// Distance from Id of ∇R at the base of a tetrahedron. The curvature is
/// evaluated on the faces of the horizontal projection at the base; the
/// residual is the minimum over the realizations of the boundary word
/// (even face orders, face base points), odd faces inverted.
pub fn bianchi_residual(conn: &Connection, tet: &[usize], base: usize) -> Result<f64> {
    if tet.len() != 4 {
        return Err(Error::Dimension { expected: 3, got: tet.len().saturating_sub(1) });
    }
    let chart = conn.chart_for(tet)?;
    let g = conn.group();
    let ordered = ordered_from_base(tet, base)?;
    let pts = projected(conn, chart, &ordered)?;
    // face i omits vertex i; cached per face and base rotation
    let mut vals = vec![vec![g.identity(); 3]; 4];
    for (i, fv) in vals.iter_mut().enumerate() {
        let face: Vec<&FiberPoint> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        for (b, slot) in fv.iter_mut().enumerate() {
            let r = total_curvature(conn, chart, face[b], face[(b + 1) % 3], face[(b + 2) % 3])?;
            *slot = if i % 2 == 1 { g.inverse(&r) } else { r };
        }
    }
    let mut best = f64::INFINITY;
    for perm in even_permutations(4) {
        for code in 0..81usize {
            let bases = [code % 3, (code / 3) % 3, (code / 9) % 3, code / 27];
            let mut m = g.identity();
            for &f in &perm {
                m = g.mul(&m, &vals[f][bases[f]]);
            }
            let d = g.distance_to_identity(&m);
            if d < best {
                best = d;
                if best < 1e-14 {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

/// Ordered product of local expressions along a vertex path, with chart
/// changes ζ_ab(V) applied where the itinerary switches charts.
pub fn parallel_transport(conn: &Connection, path: &[usize], itinerary: &[usize]) -> Result<GroupElement> {
    let g = conn.group();
    if path.len() < 2 {
        return Ok(g.identity());
    }
    if itinerary.len() != path.len() - 1 {
        return Err(Error::Dimension { expected: path.len() - 1, got: itinerary.len() });
    }
    let mut p = g.identity();
    for k in 0..path.len() - 1 {
        let (x, y) = (path[k], path[k + 1]);
        if !conn.complex().contains(&[x, y]) || x == y {
            return input(format!("path is broken at ({}, {})", x, y));
        }
        if k > 0 && itinerary[k] != itinerary[k - 1] {
            p = g.mul(&conn.bundle.zeta(itinerary[k - 1], itinerary[k], x)?, &p);
        }
        p = g.mul(&conn.local(itinerary[k], x, y)?, &p);
    }
    Ok(p)
}

/// Transport from chart `start` at the first vertex to chart `end` at the last.
pub fn parallel_transport_between(conn: &Connection, path: &[usize], itinerary: &[usize], start: usize, end: usize) -> Result<GroupElement> {
    let g = conn.group();
    if path.len() < 2 {
        let v = *path.first().ok_or_else(|| Error::Input("empty path".into()))?;
        return conn.bundle.zeta(start, end, v);
    }
    let p = parallel_transport(conn, path, itinerary)?;
    let first = conn.bundle.zeta(start, itinerary[0], path[0])?;
    let last = conn.bundle.zeta(*itinerary.last().expect("non-empty"), end, *path.last().expect("non-empty"))?;
    Ok(g.mul3(&last, &p, &first))
}

/// Transport using home-chart values on every edge.
pub fn transport_home(conn: &Connection, path: &[usize]) -> Result<GroupElement> {
    let g = conn.group();
    let mut p = g.identity();
    for w in path.windows(2) {
        if !conn.complex().contains(&[w[0], w[1]]) || w[0] == w[1] {
            return input(format!("path is broken at ({}, {})", w[0], w[1]));
        }
        p = g.mul(&conn.phi(w[0], w[1])?, &p);
    }
    Ok(p)
}

/// Simple cycles through `base` of at most `max_len` edges, as closed
/// vertex lists, one orientation per cycle.
pub fn simple_cycles(c: &SimplicialComplex, base: usize, max_len: usize) -> Vec<Vec<usize>> {
    let adj = c.adjacency();
    let mut out = Vec::new();
    let mut path = vec![base];
    fn dfs(adj: &BTreeMap<usize, Vec<usize>>, base: usize, max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().expect("non-empty");
        for &n in adj.get(&last).map(|v| v.as_slice()).unwrap_or(&[]) {
            if n == base && path.len() >= 3 && path[1] < path[path.len() - 1] {
                let mut cyc = path.clone();
                cyc.push(base);
                out.push(cyc);
            } else if !path.contains(&n) && path.len() < max_len {
                path.push(n);
                dfs(adj, base, max_len, path, out);
                path.pop();
            }
        }
    }
    dfs(&adj, base, max_len, &mut path, &mut out);
    out
}

/// Holonomy set at `base`: transports around simple cycles of length
/// ≤ `max_len` (both orientations), closed under products up to
/// `product_depth` factors. Always contains Id.
pub fn holonomy_set(conn: &Connection, base: usize, max_len: usize, product_depth: usize) -> Result<Vec<GroupElement>> {
    let g = conn.group();
    let mut gens = Vec::new();
    for cyc in simple_cycles(conn.complex(), base, max_len) {
        let h = transport_home(conn, &cyc)?;
        gens.push(g.inverse(&h));
        gens.push(h);
    }
    let mut set = vec![g.identity()];
    let push = |set: &mut Vec<GroupElement>, x: GroupElement| {
        if !set.iter().any(|y| g.approx_eq(y, &x)) {
            set.push(x);
        }
    };
    for h in &gens {
        push(&mut set, h.clone());
    }
    let mut frontier = gens.clone();
    for _ in 1..product_depth.max(1) {
        let mut next = Vec::new();
        for a in &frontier {
            for b in &gens {
                let p = g.mul(a, b);
                if !set.iter().any(|y| g.approx_eq(y, &p)) {
                    set.push(p.clone());
                    next.push(p);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(set)
}

/// φ'(XY) = Φ(Y)·φ(XY)·Φ(X)⁻¹ on home values.
pub fn gauge_transform_connection(conn: &Connection, phi: &GForm) -> Result<Connection> {
    if phi.degree != 0 {
        return input("gauge transforms are G-valued 0-forms");
    }
    let g = conn.group();
    let vals = conn
        .home_values()
        .into_iter()
        .map(|((x, y), a)| ((x, y), g.mul3(&phi.get_reference(&[y]), &a, &g.inverse(&phi.get_reference(&[x])))))
        .collect();
    Connection::from_home_values(&conn.bundle, &vals)
}

/// Identity on the section's edges in every chart: φ*_i(XY) = s_i(Y)⁻¹s_i(X).
pub fn flat_connection(bundle: &PrincipalBundle, section: &Section) -> Result<Connection> {
    let g = &bundle.group;
    let mut charts = Vec::new();
    for (c, verts) in bundle.charts().iter().enumerate() {
        let mut m = BTreeMap::new();
        for (a, &x) in verts.iter().enumerate() {
            for &y in &verts[a + 1..] {
                m.insert((x, y), g.mul(&g.inverse(section.get(c, y)?), section.get(c, x)?));
            }
        }
        charts.push(m);
    }
    Connection::from_chart_values(bundle, charts)
}

/// BFS spanning forest of the 1-skeleton, rooted at the least vertex of
/// each component: (parent map, tree edges, co-tree edges), edges sorted.
pub fn spanning_tree(c: &SimplicialComplex) -> (BTreeMap<usize, usize>, Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let adj = c.adjacency();
    let mut parent = BTreeMap::new();
    let mut seen = BTreeSet::new();
    let mut tree = BTreeSet::new();
    for &root in c.vertices() {
        if !seen.insert(root) {
            continue;
        }
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &y in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
                if seen.insert(y) {
                    parent.insert(y, x);
                    tree.insert(edge_key(x, y));
                    q.push_back(y);
                }
            }
        }
    }
    let cotree = c.simplices(1).iter().map(|e| (e[0], e[1])).filter(|e| !tree.contains(e)).collect();
    (parent, tree.into_iter().collect(), cotree)
}

/// Co-tree edges: one per generator of the fundamental group of the 1-skeleton.
pub fn cotree_edges(c: &SimplicialComplex) -> Vec<(usize, usize)> {
    spanning_tree(c).2
}

/// Id on spanning-tree edges, prescribed values on co-tree edges (sorted,
/// oriented low → high; missing ones are Id). Fails unless every triangle
/// is flat.
pub fn flat_from_holonomy(bundle: &PrincipalBundle, generators: &BTreeMap<(usize, usize), GroupElement>) -> Result<Connection> {
    let cot: BTreeSet<(usize, usize)> = cotree_edges(&bundle.complex).into_iter().collect();
    for e in generators.keys() {
        if !cot.contains(e) {
            return input(format!("({}, {}) is not a co-tree edge", e.0, e.1));
        }
    }
    let conn = Connection::from_home_values(bundle, generators)?;
    for t in bundle.complex.simplices(2) {
        let r = curvature(&conn, t, t[0])?;
        if !bundle.group.is_identity(&r) {
            return input(format!("prescription is inconsistent with closure of triangle {:?}", t));
        }
    }
    Ok(conn)
}

/// Φ with Φ(Y)·φ₁(XY)·Φ(X)⁻¹ = φ₂(XY) on every edge, built along the
/// spanning tree from Φ(root) = `root_value` in each component.
pub fn gauge_relating(c1: &Connection, c2: &Connection, root_value: &GroupElement) -> Result<GForm> {
    let g = c1.group();
    let cx = c1.complex();
    let (parent, _, _) = spanning_tree(cx);
    let mut phi: BTreeMap<usize, GroupElement> = BTreeMap::new();
    let adj = cx.adjacency();
    for &v in cx.vertices() {
        if parent.contains_key(&v) || phi.contains_key(&v) {
            continue;
        }
        phi.insert(v, root_value.clone());
        let mut q = VecDeque::from([v]);
        while let Some(x) = q.pop_front() {
            for &y in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
                if parent.get(&y) == Some(&x) {
                    let val = g.mul3(&c2.phi(x, y)?, &phi[&x], &g.inverse(&c1.phi(x, y)?));
                    phi.insert(y, val);
                    q.push_back(y);
                }
            }
        }
    }
    let mut form = GForm::identity(g.clone(), 0);
    for (v, val) in &phi {
        form.set(&[*v], val.clone())?;
    }
    for e in cx.simplices(1) {
        let lhs = g.mul3(&phi[&e[1]], &c1.phi(e[0], e[1])?, &g.inverse(&phi[&e[0]]));
        if !g.approx_eq(&lhs, &c2.phi(e[0], e[1])?) {
            return input(format!("no gauge transform relates the connections on edge {:?}", e));
        }
    }
    Ok(form)
}

/// β_n(χ_n) as a G-valued n-form.
pub fn beta_chi_form(bundle: &PrincipalBundle, n: usize) -> Result<GForm> {
    let chi = bundle.obstruction_form(n)?;
    let mut f = GForm::identity(bundle.group.clone(), n);
    for (s, c) in &chi.values {
        f.set(s, bundle.group.beta(n, c)?)?;
    }
    Ok(f)
}

/// τ_n(σ) = (β_{n+1}(χ_{n+1}(σ))·∇θ_n(σ))⁻¹·∇(β_n(χ_n)θ_n)(σ) on an
/// (n+1)-simplex, with θ_n the canonical identity form (so ∇θ_n = Id) and
/// ∇ based at σ's first vertex.
pub fn torsion(conn: &Connection, n: usize, sigma: &[usize]) -> Result<GroupElement> {
    if sigma.len() != n + 2 {
        return Err(Error::Dimension { expected: n + 1, got: sigma.len().saturating_sub(1) });
    }
    let g = conn.group();
    let b = &conn.bundle;
    let upper = b.obstruction_form(n + 1)?.get(sigma);
    let beta_up = g.beta(n + 1, &upper)?;
    let theta = GForm::identity(g.clone(), n);
    let d_theta = local_covariant_derivative_g(conn, &theta, sigma, sigma[0])?;
    let d_beta = local_covariant_derivative_g(conn, &beta_chi_form(b, n)?, sigma, sigma[0])?;
    Ok(g.mul(&g.inverse(&g.mul(&beta_up, &d_theta)), &d_beta))
}

/// Torsion on every (n+1)-simplex containing an n-face; [Id] when the
/// face is top-dimensional.
pub fn torsion_at_face(conn: &Connection, n: usize, face: &[usize]) -> Result<Vec<(Vec<usize>, GroupElement)>> {
    if face.len() != n + 1 {
        return Err(Error::Dimension { expected: n, got: face.len().saturating_sub(1) });
    }
    let up: Vec<Vec<usize>> = conn.complex().cofaces(face).into_iter().filter(|s| s.len() == n + 2).collect();
    if up.is_empty() {
        let mut f = face.to_vec();
        f.sort_unstable();
        return Ok(vec![(f, conn.group().identity())]);
    }
    up.into_iter().map(|s| Ok((s.clone(), torsion(conn, n, &s)?))).collect()
}

/// The factor A = φ(X₁X₂)∏ᵢ φ(X₁Xᵢ)R|_{Xᵢ}(XᵢX₁X₂) relating ∇ based at X₂ to ∇ based at X₁.
pub fn vertex_change_factor(conn: &Connection, simplex: &[usize]) -> Result<GroupElement> {
    if simplex.len() < 2 {
        return input("vertex change needs at least two vertices");
    }
    let g = conn.group();
    let chart = conn.chart_for(simplex)?;
    let (x1, x2) = (simplex[0], simplex[1]);
    let mut a = conn.local(chart, x1, x2)?;
    for &xi in &simplex[2..] {
        let r = curvature(conn, &[xi, x1, x2], xi)?;
        a = g.mul3(&a, &conn.local(chart, x1, xi)?, &r);
    }
    Ok(a)
}

/// ‖∇v|_{X₂} − A·∇v|_{X₁}‖ for a vector form on an ordered simplex X₁X₂….
pub fn vertex_change_residual_v(conn: &Connection, v: &VForm, simplex: &[usize]) -> Result<f64> {
    let a = vertex_change_factor(conn, simplex)?;
    // base X₂ with the simplex kept in the order X₁X₂…: use the point-based
    // sum directly, since reordering would flip the orientation
    let at2 = point_based_v(conn, v, simplex, 1)?;
    let at1 = point_based_v(conn, v, simplex, 0)?;
    let lhs = conn.group().act(&a, &at1);
    Ok(lhs.iter().zip(&at2).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
}

fn point_based_v(conn: &Connection, v: &VForm, ordered: &[usize], base_idx: usize) -> Result<Vec<f64>> {
    check_degree(ordered.len(), v.degree)?;
    let chart = conn.chart_for(ordered)?;
    let g = conn.group();
    let base = ordered[base_idx];
    let pts: Vec<FiberPoint> = ordered.iter().map(|x| FiberPoint::new(*x, g.identity())).collect();
    let pts = horizontal_projection(conn, chart, &pts, base)?;
    let mut out = vec![0.0; v.dim];
    for i in 0..pts.len() {
        let face: Vec<&FiberPoint> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        let val = equivariant_value_v(v, g, &face);
        let sgn = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (o, x) in out.iter_mut().zip(val) {
            *o += sgn * x;
        }
    }
    Ok(out)
}

/// Curvature CSV rows `triangle,base_vertex,scalar_curvature` for every
/// triangle and base vertex.
pub fn curvature_rows(conn: &Connection) -> Result<Vec<(Vec<usize>, usize, f64)>> {
    let mut out = Vec::new();
    for t in conn.complex().simplices(2) {
        for &b in t {
            out.push((t.clone(), b, scalar_curvature(conn, t, b)?));
        }
    }
    Ok(out)
}

pub fn write_curvature_csv<W: std::io::Write>(conn: &Connection, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["triangle", "base_vertex", "scalar_curvature"])?;
    for (t, b, r) in curvature_rows(conn)? {
        let tri = t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        wr.write_record([tri, b.to_string(), format!("{}", r)])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::trivial_bundle;
    use crate::complex::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projection_route_matches_curvature() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for grp in [GaugeGroup::so(3), GaugeGroup::circle()] {
            let b = trivial_bundle(&fixtures::triangle(), &grp);
            for _ in 0..50 {
                let c = Connection::random(&b, &mut rng);
                let r = curvature(&c, &[0, 1, 2], 0).unwrap();
                let t = curvature_via_projection(&c, &[0, 1, 2], 0, &grp.identity()).unwrap();
                assert!(grp.distance(&r, &t) < 1e-12);
            }
        }
    }

    #[test]
    fn bianchi_so3() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cx = SimplicialComplex::from_maximal_simplices(4, &[vec![0, 1, 2, 3]]).unwrap();
        let grp = GaugeGroup::so(3);
        let b = trivial_bundle(&cx, &grp);
        for _ in 0..50 {
            let c = Connection::random(&b, &mut rng);
            assert!(bianchi_residual(&c, &[0, 1, 2, 3], 0).unwrap() < 1e-11);
        }
    }
}
