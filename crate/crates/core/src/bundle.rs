//! Semidiscrete principal bundles over a simplicial complex.
//!
//! Charts are the faced simplices of the base, indexed in the order of
//! [`SimplicialComplex::faced`]. Each chart carries a frame λ_i(X) per
//! vertex and the vertex transition maps are ζ_ij(X) = λ_i(X)λ_j(X)⁻¹, so
//! the cocycle rule holds identically. Topological obstruction classes
//! live on (pair, shared face) slots, stored for i < j; the class of the
//! swapped pair is the inverse.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{subsets, OrientedSimplex, SimplicialComplex};
use crate::error::{input, Error, Result};
use crate::forms::{GForm, VForm};
use crate::group::{so3_loop_class, winding_number, AbelianGroup, GaugeGroup, GroupElement, GroupKind, HomotopyClass};
use crate::smith::{is_coboundary, is_cocycle, Coefficients};

type SlotKey = (usize, usize, Vec<usize>);

#[derive(Clone, Debug)]
struct SlotData {
    class: HomotopyClass,
    correction: Option<GroupElement>,
}

/// One structural-data entry in canonical direction (pair.0 < pair.1).
#[derive(Clone, Debug)]
pub struct Slot {
    pub pair: (usize, usize),
    pub face: Vec<usize>,
    pub dim: usize,
    pub class: HomotopyClass,
    pub correction: Option<GroupElement>,
}

/// How [`PrincipalBundle::assign_random`] fills slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignMode {
    /// Every slot independently.
    Free,
    /// Random per-chart potentials on each face; class(i,j) = c_j − c_i,
    /// so classes compose consistently across triples of charts.
    CocycleCompletion,
}

/// Verdict on the cohomology class of χ_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassVerdict {
    TrivialClass,
    NontrivialClass,
    NotClosed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicClass {
    pub n: usize,
    pub verdict: ClassVerdict,
}

/// χ_n: per n-simplex, the sum of slot classes over chart pairs i < j sharing it.
#[derive(Clone, Debug)]
pub struct ObstructionForm {
    pub n: usize,
    pub table: AbelianGroup,
    pub values: BTreeMap<Vec<usize>, HomotopyClass>,
}

impl ObstructionForm {
    pub fn get(&self, s: &[usize]) -> HomotopyClass {
        let mut k = s.to_vec();
        k.sort_unstable();
        self.values.get(&k).cloned().unwrap_or_else(|| HomotopyClass::identity(&self.table, self.n))
    }

    pub fn is_identity(&self) -> bool {
        self.values.values().all(|c| c.is_identity())
    }

    /// First-generator coefficients on the n-simplices of the base, in order.
    pub fn cochain(&self, c: &SimplicialComplex) -> Vec<i64> {
        c.simplices(self.n)
            .iter()
            .map(|s| self.values.get(s).and_then(|h| h.coeffs.first().copied()).unwrap_or(0))
            .collect()
    }
}

/// A field value carried across a chart change.
#[derive(Clone, Debug)]
pub enum FieldValue {
    Vector(Vec<f64>),
    Group(GroupElement),
}

/// Fiber coordinates of a section, per chart and vertex.
#[derive(Clone, Debug)]
pub struct Section {
    pub values: Vec<BTreeMap<usize, GroupElement>>,
}

impl Section {
    pub fn identity(b: &PrincipalBundle) -> Self {
        Section {
            values: b
                .charts()
                .iter()
                .map(|s| s.iter().map(|v| (*v, b.group.identity())).collect())
                .collect(),
        }
    }

    pub fn get(&self, chart: usize, v: usize) -> Result<&GroupElement> {
        self.values
            .get(chart)
            .and_then(|m| m.get(&v))
            .ok_or_else(|| Error::Input(format!("section undefined at vertex {} in chart {}", v, chart)))
    }

    pub fn set(&mut self, chart: usize, v: usize, g: GroupElement) {
        if let Some(m) = self.values.get_mut(chart) {
            m.insert(v, g);
        }
    }
}

/// Per-slot outcome of a natural assignment.
#[derive(Clone, Debug)]
pub struct NaturalReport {
    pub pair: (usize, usize),
    pub face: Vec<usize>,
    pub outcome: std::result::Result<(i64, GroupElement), String>,
}

#[derive(Clone, Debug)]
pub struct PrincipalBundle {
    pub complex: SimplicialComplex,
    pub group: GaugeGroup,
    frames: Vec<BTreeMap<usize, GroupElement>>,
    slots: BTreeMap<SlotKey, SlotData>,
}

/// Bundle with identity transitions and no obstructions.
pub fn trivial_bundle(complex: &SimplicialComplex, group: &GaugeGroup) -> PrincipalBundle {
    PrincipalBundle::trivial(complex, group)
}

impl PrincipalBundle {
    pub fn trivial(complex: &SimplicialComplex, group: &GaugeGroup) -> Self {
        let frames = complex
            .faced()
            .iter()
            .map(|s| s.iter().map(|v| (*v, group.identity())).collect())
            .collect();
        PrincipalBundle { complex: complex.clone(), group: group.clone(), frames, slots: BTreeMap::new() }
    }

    pub fn charts(&self) -> &[Vec<usize>] {
        self.complex.faced()
    }

    pub fn chart_count(&self) -> usize {
        self.frames.len()
    }

    fn check_chart(&self, i: usize) -> Result<&Vec<usize>> {
        self.charts().get(i).ok_or_else(|| Error::Input(format!("no chart {}", i)))
    }

    /// Lowest-index chart containing `s`.
    pub fn home_chart(&self, s: &[usize]) -> Result<usize> {
        self.complex
            .charts_containing(s)
            .first()
            .copied()
            .ok_or_else(|| Error::Input(format!("{:?} lies in no faced simplex", s)))
    }

    pub fn frame(&self, chart: usize, v: usize) -> Result<&GroupElement> {
        self.frames
            .get(chart)
            .and_then(|m| m.get(&v))
            .ok_or_else(|| Error::Input(format!("vertex {} not in chart {}", v, chart)))
    }

    /// Replace one chart frame.
    pub fn with_frame(mut self, chart: usize, v: usize, g: GroupElement) -> Result<Self> {
        self.frame(chart, v)?;
        self.frames[chart].insert(v, g);
        Ok(self)
    }

    /// Random frames on every chart (chart 0 keeps identity frames).
    pub fn with_random_frames<R: Rng + ?Sized>(mut self, rng: &mut R) -> Self {
        for f in self.frames.iter_mut().skip(1) {
            for g in f.values_mut() {
                *g = self.group.random_element(rng);
            }
        }
        self
    }

    /// ζ_ij(X) = λ_i(X)λ_j(X)⁻¹.
    pub fn zeta(&self, i: usize, j: usize, v: usize) -> Result<GroupElement> {
        let a = self.frame(i, v)?;
        let b = self.frame(j, v)?;
        Ok(self.group.mul(a, &self.group.inverse(b)))
    }

    fn shared(&self, i: usize, j: usize, face: &[usize]) -> Result<Vec<usize>> {
        let ci = self.check_chart(i)?;
        let cj = self.check_chart(j)?;
        if face.is_empty() || !face.iter().all(|v| ci.contains(v) && cj.contains(v)) {
            return input(format!("{:?} is not shared by charts {} and {}", face, i, j));
        }
        let mut f = face.to_vec();
        f.sort_unstable();
        Ok(f)
    }

    /// Class of the slot (i, j, face); identity if unassigned.
    pub fn class(&self, i: usize, j: usize, face: &[usize]) -> Result<HomotopyClass> {
        let f = self.shared(i, j, face)?;
        let n = f.len() - 1;
        let table = self.group.homotopy_group(n)?;
        let (a, b) = (i.min(j), i.max(j));
        let c = self
            .slots
            .get(&(a, b, f))
            .map(|d| d.class.clone())
            .unwrap_or_else(|| HomotopyClass::identity(&table, n));
        Ok(if i > j { c.neg(&table) } else { c })
    }

    /// Set the class of slot (i, j, face); the swapped pair gets the inverse.
    pub fn with_class(mut self, i: usize, j: usize, face: &[usize], class: HomotopyClass) -> Result<Self> {
        self.set_class(i, j, face, class, None)?;
        Ok(self)
    }

    fn set_class(&mut self, i: usize, j: usize, face: &[usize], class: HomotopyClass, corr: Option<GroupElement>) -> Result<()> {
        if i == j {
            return input("a slot needs two distinct charts");
        }
        let f = self.shared(i, j, face)?;
        let n = f.len() - 1;
        if class.n != n {
            return Err(Error::Dimension { expected: n, got: class.n });
        }
        let table = self.group.homotopy_group(n)?;
        let class = HomotopyClass::new(&table, n, &class.coeffs);
        let class = if i > j { class.neg(&table) } else { class };
        let (a, b) = (i.min(j), i.max(j));
        if class.is_identity() && corr.is_none() {
            self.slots.remove(&(a, b, f));
        } else {
            self.slots.insert((a, b, f), SlotData { class, correction: corr });
        }
        Ok(())
    }

    /// Assigned slots in canonical direction.
    pub fn slots(&self) -> Vec<Slot> {
        self.slots
            .iter()
            .map(|((i, j, f), d)| Slot {
                pair: (*i, *j),
                face: f.clone(),
                dim: f.len() - 1,
                class: d.class.clone(),
                correction: d.correction.clone(),
            })
            .collect()
    }

    /// Every (pair, shared face, dim) whose π_dim(G) is nontrivial.
    pub fn list_assignable_slots(&self) -> Vec<((usize, usize), Vec<usize>, usize)> {
        let charts = self.charts();
        let mut out = Vec::new();
        for i in 0..charts.len() {
            for j in (i + 1)..charts.len() {
                let shared: Vec<usize> = charts[i].iter().filter(|v| charts[j].contains(v)).copied().collect();
                for f in subsets(&shared) {
                    let n = f.len() - 1;
                    if n == 0 {
                        continue;
                    }
                    if matches!(self.group.homotopy_group(n), Ok(t) if !t.is_trivial()) {
                        out.push(((i, j), f, n));
                    }
                }
            }
        }
        out
    }

    /// Random obstruction classes on slots of the given dimensions.
    pub fn assign_random(&self, dims: &[usize], density: f64, range: &[i64], mode: AssignMode, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return input(format!("density {} outside [0, 1]", density));
        }
        for &n in dims {
            let t = self.group.homotopy_group(n)?;
            if n == 0 || t.is_trivial() {
                return Err(Error::Unsupported(format!("no obstruction classes in dimension {} for {:?}", n, self.group.kind)));
            }
        }
        if range.is_empty() {
            return input("empty class range");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        let slots: Vec<_> = self.list_assignable_slots().into_iter().filter(|s| dims.contains(&s.2)).collect();
        match mode {
            AssignMode::Free => {
                for ((i, j), f, n) in slots {
                    if rng.random::<f64>() < density {
                        let c = range[rng.random_range(0..range.len())];
                        out.set_class(i, j, &f, self.group.class(n, &[c])?, None)?;
                    }
                }
            }
            AssignMode::CocycleCompletion => {
                let mut potential: BTreeMap<(usize, Vec<usize>), i64> = BTreeMap::new();
                let mut faces: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
                for ((i, j), f, _) in &slots {
                    faces.insert((*i, f.clone()));
                    faces.insert((*j, f.clone()));
                }
                for key in faces {
                    let c = if rng.random::<f64>() < density { range[rng.random_range(0..range.len())] } else { 0 };
                    potential.insert(key, c);
                }
                for ((i, j), f, n) in slots {
                    let c = potential[&(j, f.clone())] - potential[&(i, f.clone())];
                    out.set_class(i, j, &f, self.group.class(n, &[c])?, None)?;
                }
            }
        }
        Ok(out)
    }

    /// χ_n on every n-simplex carrying a slot.
    pub fn obstruction_form(&self, n: usize) -> Result<ObstructionForm> {
        let table = self.group.homotopy_group(n)?;
        let mut values: BTreeMap<Vec<usize>, HomotopyClass> = BTreeMap::new();
        for ((_, _, f), d) in &self.slots {
            if f.len() - 1 != n {
                continue;
            }
            let e = values.entry(f.clone()).or_insert_with(|| HomotopyClass::identity(&table, n));
            *e = e.add(&d.class, &table);
        }
        Ok(ObstructionForm { n, table, values })
    }

    pub fn is_strictly_trivial(&self) -> bool {
        self.slots.values().all(|d| d.class.is_identity())
    }

    /// Closed / exact verdict of χ_n for every n in 1..=3 with a π_n table.
    pub fn characteristic_classes(&self) -> Result<Vec<CharacteristicClass>> {
        let mut out = Vec::new();
        for n in 1..=3 {
            let Ok(table) = self.group.homotopy_group(n) else { continue };
            if table.is_trivial() {
                out.push(CharacteristicClass { n, verdict: ClassVerdict::TrivialClass });
                continue;
            }
            let coeff = match table.as_single() {
                Some(None) => Coefficients::Integers,
                Some(Some(m)) => Coefficients::Modulo(m),
                None => return Err(Error::Unsupported(format!("π_{} with several generators", n))),
            };
            let chi = self.obstruction_form(n)?.cochain(&self.complex);
            let verdict = if !is_cocycle(&self.complex, coeff, n, &chi)? {
                ClassVerdict::NotClosed
            } else if is_coboundary(&self.complex, coeff, n, &chi)? {
                ClassVerdict::TrivialClass
            } else {
                ClassVerdict::NontrivialClass
            };
            out.push(CharacteristicClass { n, verdict });
        }
        Ok(out)
    }

    fn beta_on(&self, i: usize, j: usize, face: &[usize]) -> Result<GroupElement> {
        let c = self.class(i, j, face)?;
        self.group.beta(c.n, &c)
    }

    fn forward(&self, i: usize, j: usize, face: &[usize], degree: usize, value: &FieldValue) -> Result<FieldValue> {
        let g = &self.group;
        let x = face[0];
        match (degree, value) {
            (0, FieldValue::Vector(v)) => Ok(FieldValue::Vector(g.act(&self.zeta(i, j, x)?, v))),
            (0, FieldValue::Group(w)) => Ok(FieldValue::Group(g.conjugate(&self.zeta(i, j, x)?, w))),
            (1, FieldValue::Group(phi)) => {
                let y = face[1];
                let b = self.beta_on(i, j, face)?;
                let inner = g.mul3(&self.zeta(i, j, y)?, phi, &g.inverse(&self.zeta(i, j, x)?));
                Ok(FieldValue::Group(g.conjugate(&b, &inner)))
            }
            (2, FieldValue::Group(r)) => {
                let b = self.beta_on(i, j, face)?;
                let inner = g.conjugate(&self.zeta(i, j, x)?, r);
                Ok(FieldValue::Group(g.conjugate(&b, &inner)))
            }
            _ => Err(Error::Unsupported(format!("transition of a degree-{} value of this kind", degree))),
        }
    }

    fn backward(&self, i: usize, j: usize, face: &[usize], degree: usize, value: &FieldValue) -> Result<FieldValue> {
        // inverse of forward(i, j, ..)
        let g = &self.group;
        let x = face[0];
        match (degree, value) {
            (0, FieldValue::Vector(v)) => Ok(FieldValue::Vector(g.act(&g.inverse(&self.zeta(i, j, x)?), v))),
            (0, FieldValue::Group(w)) => Ok(FieldValue::Group(g.conjugate(&g.inverse(&self.zeta(i, j, x)?), w))),
            (1, FieldValue::Group(phi)) => {
                let y = face[1];
                let b = self.beta_on(i, j, face)?;
                let inner = g.conjugate(&g.inverse(&b), phi);
                Ok(FieldValue::Group(g.mul3(&g.inverse(&self.zeta(i, j, y)?), &inner, &self.zeta(i, j, x)?)))
            }
            (2, FieldValue::Group(r)) => {
                let b = self.beta_on(i, j, face)?;
                let inner = g.conjugate(&g.inverse(&b), r);
                Ok(FieldValue::Group(g.conjugate(&g.inverse(&self.zeta(i, j, x)?), &inner)))
            }
            _ => Err(Error::Unsupported(format!("transition of a degree-{} value of this kind", degree))),
        }
    }

    /// Re-express a local value on `face` (ordered; degree-2 values are
    /// based at face[0]) from chart i to chart j. For i < j this is
    /// v ↦ ζ(X)v, φ ↦ β₁ζ(Y)φζ(X)⁻¹β₁⁻¹, R ↦ β₂ζ(X)Rζ(X)⁻¹β₂⁻¹; for
    /// i > j it is the inverse of the map from j to i.
    pub fn transition_apply(&self, i: usize, j: usize, face: &[usize], degree: usize, value: &FieldValue) -> Result<FieldValue> {
        if face.len() != degree + 1 {
            return Err(Error::Dimension { expected: degree + 1, got: face.len() });
        }
        self.shared(i, j, face)?;
        if i == j {
            return Ok(value.clone());
        }
        if i < j {
            self.forward(i, j, face, degree, value)
        } else {
            self.backward(j, i, face, degree, value)
        }
    }

    /// Natural U(1) assignment on shared edges.
    pub fn assign_natural_u1(&self, section: &Section) -> Result<(Self, Vec<NaturalReport>)> {
        if self.group.kind != GroupKind::Circle {
            return input("assign_natural_u1 needs the circle group");
        }
        self.assign_natural(section, |b, loop_| {
            let angles: Vec<f64> = loop_
                .iter()
                .map(|g| match g {
                    GroupElement::Angle(a) => *a,
                    _ => 0.0,
                })
                .collect();
            winding_number(&angles, true).map(|w| b.group.class(1, &[w]).expect("π₁(U(1))"))
        })
    }

    /// Natural SO(3) assignment on shared edges (Z₂ classes).
    pub fn assign_natural_so3(&self, section: &Section) -> Result<(Self, Vec<NaturalReport>)> {
        if self.group.kind != GroupKind::SpecialOrthogonal(3) {
            return input("assign_natural_so3 needs SO(3)");
        }
        self.assign_natural(section, |b, loop_| {
            let mats: Vec<_> = loop_.iter().map(|g| b.group.rep_matrix(g)).collect();
            so3_loop_class(&mats, true).map(|odd| b.group.class(1, &[odd as i64]).expect("π₁(SO(3))"))
        })
    }

    fn assign_natural<F>(&self, section: &Section, detect: F) -> Result<(Self, Vec<NaturalReport>)>
    where
        F: Fn(&Self, &[GroupElement]) -> Result<HomotopyClass>,
    {
        let g = &self.group;
        let mut out = self.clone();
        let mut reports = Vec::new();
        for ((i, j), face, n) in self.list_assignable_slots() {
            if n != 1 {
                continue;
            }
            let (x, y) = (face[0], face[1]);
            let outcome = (|| -> Result<(HomotopyClass, GroupElement)> {
                let sx = section.get(i, x)?;
                let sy = section.get(i, y)?;
                let tx = g.mul(&self.zeta(i, j, x)?, section.get(j, x)?);
                let ty = g.mul(&self.zeta(i, j, y)?, section.get(j, y)?);
                let class = detect(self, &[sx.clone(), sy.clone(), ty.clone(), tx.clone()])?;
                let dx = g.mul(&g.inverse(sx), &tx);
                let dy = g.mul(&g.inverse(sy), &ty);
                Ok((class, g.mul(&dy, &g.inverse(&dx))))
            })();
            let report = match outcome {
                Ok((class, corr)) => {
                    let coeff = class.coeffs.first().copied().unwrap_or(0);
                    out.set_class(i, j, &face, class, Some(corr.clone()))?;
                    Ok((coeff, corr))
                }
                Err(e) => Err(e.to_string()),
            };
            reports.push(NaturalReport { pair: (i, j), face, outcome: report });
        }
        Ok((out, reports))
    }

    pub fn slots_json(&self) -> SlotsJson {
        SlotsJson {
            slots: self
                .slots()
                .into_iter()
                .map(|s| SlotEntry {
                    pair: [s.pair.0, s.pair.1],
                    face: s.face,
                    dim: s.dim,
                    class: s.class.coeffs,
                    correction: s.correction.map(|g| self.group.element_to_json(&g)),
                })
                .collect(),
        }
    }

    /// Load slots on top of this bundle's charts and frames.
    pub fn with_slots_json(mut self, j: &SlotsJson) -> Result<Self> {
        for e in &j.slots {
            if e.face.len() != e.dim + 1 {
                return Err(Error::Dimension { expected: e.dim + 1, got: e.face.len() });
            }
            let class = self.group.class(e.dim, &e.class)?;
            let corr = match &e.correction {
                Some(v) => Some(self.group.element_from_json(v)?),
                None => None,
            };
            self.set_class(e.pair[0], e.pair[1], &e.face, class, corr)?;
        }
        Ok(self)
    }
}

/// `{"slots":[{"pair":[i,j],"face":[..],"dim":n,"class":[..],"correction":..}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotsJson {
    pub slots: Vec<SlotEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlotEntry {
    pub pair: [usize; 2],
    pub face: Vec<usize>,
    pub dim: usize,
    pub class: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<Value>,
}

fn vertex_product(phi: &GForm, s: &[usize]) -> GroupElement {
    let g = &phi.group;
    s.iter().fold(g.identity(), |acc, v| g.mul(&acc, &phi.get_reference(&[*v])))
}

/// Gauge transform of a vector k-form: v ↦ Φ(X₀)⋯Φ(X_k)·v on reference simplices.
pub fn gauge_transform_vform(v: &VForm, phi: &GForm) -> Result<VForm> {
    if phi.degree != 0 {
        return input("gauge transforms are G-valued 0-forms");
    }
    let mut out = VForm::zero(v.degree, v.dim);
    for (s, val) in v.entries() {
        let p = vertex_product(phi, s);
        out.set(s, phi.group.act(&p, val))?;
    }
    Ok(out)
}

/// Gauge transform of a G-valued k-form by conjugation with Φ(X₀)⋯Φ(X_k).
pub fn gauge_transform_gform(w: &GForm, phi: &GForm) -> Result<GForm> {
    if phi.degree != 0 {
        return input("gauge transforms are G-valued 0-forms");
    }
    let mut out = GForm::identity(w.group.clone(), w.degree);
    for (s, val) in w.entries() {
        let p = vertex_product(phi, s);
        out.set(s, w.group.conjugate(&p, val))?;
    }
    Ok(out)
}

fn check_face_dim(len: usize, degree: usize) -> Result<()> {
    if len != degree + 2 {
        return Err(Error::Dimension { expected: degree + 1, got: len.saturating_sub(1) });
    }
    Ok(())
}

/// d*v on the simplex (gX)YZ… whose first vertex is translated by g,
/// evaluating v through its equivariance: faces through gX pick up g.
pub fn equivariant_differential_v(v: &VForm, group: &GaugeGroup, simplex: &[usize], g: &GroupElement) -> Result<Vec<f64>> {
    check_face_dim(simplex.len(), v.degree)?;
    let face = |i: usize| {
        let mut f = simplex.to_vec();
        f.remove(i);
        v.eval(&OrientedSimplex::new(f))
    };
    let mut out = vec![0.0; v.dim];
    for i in 0..simplex.len() {
        let val = if i == 0 { face(0) } else { group.act(g, &face(i)) };
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (o, x) in out.iter_mut().zip(val) {
            *o += sign * x;
        }
    }
    let opposite = face(0);
    for ((o, a), b) in out.iter_mut().zip(&opposite).zip(group.act(g, &opposite)) {
        *o += b - a;
    }
    Ok(out)
}

/// d*ω on (gX)YZ…, the point-based differential at X corrected on the face YZ….
pub fn equivariant_differential_g(w: &GForm, simplex: &[usize], g: &GroupElement) -> Result<GroupElement> {
    check_face_dim(simplex.len(), w.degree)?;
    let grp = &w.group;
    let s = OrientedSimplex::new(simplex.to_vec());
    let mut acc = grp.identity();
    for (i, f) in s.boundary_word().into_iter().enumerate() {
        let val = w.eval(&f);
        let val = if i == 0 { val } else { grp.conjugate(g, &val) };
        acc = grp.mul(&val, &acc);
    }
    let opposite = w.eval(&s.boundary_face(0));
    Ok(grp.mul3(&acc, &grp.inverse(&opposite), &grp.conjugate(g, &opposite)))
}
