//! Discrete differential forms: vector-valued and group-valued k-forms,
//! point-based differentials and their realizations, cup products and
//! cochain cohomology with abelian coefficients.
//!
//! Group-valued forms act on words of simplices with the first letter
//! applied first: ω(s₁…sₙ) = ω(sₙ)⋯ω(s₁). With this order
//! dω(XY) = ω(X)⁻¹ω(Y).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{permutation_sign, OrientedSimplex, SimplicialComplex};
use crate::error::{input, Error, Result};
use crate::group::{GaugeGroup, GroupElement, GroupKind};
use crate::paths::{boundary_realization, dd_empty_witness, realization_count, replay_dd_witness, DdWitness, KPath};
use crate::smith::{self, Coefficients, HomologyDescriptor};
use crate::Verdict;

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

/// Real-vector-valued k-form, stored on reference-oriented simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct VForm {
    pub degree: usize,
    pub dim: usize,
    values: BTreeMap<Vec<usize>, Vec<f64>>,
}

impl VForm {
    pub fn zero(degree: usize, dim: usize) -> Self {
        VForm { degree, dim, values: BTreeMap::new() }
    }

    /// Set the value on the given ordering; the stored reference value is
    /// negated when the ordering is odd.
    pub fn set(&mut self, simplex: &[usize], v: Vec<f64>) -> Result<()> {
        if simplex.len() != self.degree + 1 {
            return Err(Error::Dimension { expected: self.degree + 1, got: simplex.len() });
        }
        if v.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: v.len() });
        }
        let s = permutation_sign(simplex) as f64;
        self.values.insert(sorted(simplex), v.into_iter().map(|x| s * x).collect());
        Ok(())
    }

    pub fn get_reference(&self, s: &[usize]) -> Vec<f64> {
        self.values.get(s).cloned().unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn eval(&self, s: &OrientedSimplex) -> Vec<f64> {
        let sg = s.sign() as f64;
        self.get_reference(&s.sorted()).into_iter().map(|x| sg * x).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<f64>)> {
        self.values.iter()
    }

    /// Alternating sum of face values on one (k+1)-simplex.
    pub fn d_eval(&self, s: &OrientedSimplex) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for f in s.boundary_word() {
            for (o, x) in out.iter_mut().zip(self.eval(&f)) {
                *o += x;
            }
        }
        out
    }

    /// dv on every (k+1)-simplex of the complex; zero above the top dimension.
    pub fn differential(&self, c: &SimplicialComplex) -> VForm {
        let mut out = VForm::zero(self.degree + 1, self.dim);
        for s in c.simplices(self.degree + 1) {
            let v = self.d_eval(&OrientedSimplex::new(s.clone()));
            out.values.insert(s.clone(), v);
        }
        out
    }
}

/// Group-valued k-form; absent entries are the identity.
#[derive(Clone, Debug)]
pub struct GForm {
    pub degree: usize,
    pub group: GaugeGroup,
    values: BTreeMap<Vec<usize>, GroupElement>,
}

impl GForm {
    pub fn identity(group: GaugeGroup, degree: usize) -> Self {
        GForm { degree, group, values: BTreeMap::new() }
    }

    pub fn set(&mut self, simplex: &[usize], g: GroupElement) -> Result<()> {
        if simplex.len() != self.degree + 1 {
            return Err(Error::Dimension { expected: self.degree + 1, got: simplex.len() });
        }
        if !self.group.contains(&g) {
            return input("value does not belong to the form's group");
        }
        let g = if permutation_sign(simplex) < 0 { self.group.inverse(&g) } else { g };
        self.values.insert(sorted(simplex), g);
        Ok(())
    }

    pub fn get_reference(&self, s: &[usize]) -> GroupElement {
        self.values.get(s).cloned().unwrap_or_else(|| self.group.identity())
    }

    pub fn eval(&self, s: &OrientedSimplex) -> GroupElement {
        let g = self.get_reference(&s.sorted());
        if s.sign() < 0 {
            self.group.inverse(&g)
        } else {
            g
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &GroupElement)> {
        self.values.iter()
    }

    /// Random values on every k-simplex of the complex.
    pub fn random<R: rand::Rng + ?Sized>(group: &GaugeGroup, degree: usize, c: &SimplicialComplex, rng: &mut R) -> Self {
        let mut f = GForm::identity(group.clone(), degree);
        for s in c.simplices(degree) {
            f.values.insert(s.clone(), group.random_element(rng));
        }
        f
    }

    /// Value of a word: the first letter acts first.
    pub fn eval_word(&self, word: &[OrientedSimplex]) -> GroupElement {
        let mut acc = self.group.identity();
        for s in word {
            acc = self.group.mul(&self.eval(s), &acc);
        }
        acc
    }

    fn check_simplex(&self, s: &OrientedSimplex) -> Result<()> {
        if s.dim() != self.degree + 1 {
            return Err(Error::Dimension { expected: self.degree + 1, got: s.dim() });
        }
        Ok(())
    }

    /// Differential computed by omitting the base vertex first.
    pub fn point_based_differential(&self, s: &OrientedSimplex, base: usize) -> Result<GroupElement> {
        self.check_simplex(s)?;
        let t = s
            .starting_at(base)
            .ok_or_else(|| Error::Input(format!("vertex {} not in {}", base, s)))?;
        Ok(self.eval_word(&t.boundary_word()))
    }

    /// Point-based value at the least vertex.
    pub fn canonical_differential(&self, s: &OrientedSimplex) -> Result<GroupElement> {
        let a = *s.vertices.iter().min().ok_or_else(|| Error::Input("empty simplex".into()))?;
        self.point_based_differential(s, a)
    }

    /// Values of dω over the boundary realizations of `s`, canonical ordering first.
    pub fn differential_realizations(&self, s: &OrientedSimplex) -> Result<Vec<GroupElement>> {
        self.check_simplex(s)?;
        Ok((0..realization_count(s.dim()))
            .map(|r| self.eval_word(&boundary_realization(s, r)))
            .collect())
    }

    /// Canonical dω on every (k+1)-simplex.
    pub fn differential(&self, c: &SimplicialComplex) -> GForm {
        let mut out = GForm::identity(self.group.clone(), self.degree + 1);
        for s in c.simplices(self.degree + 1) {
            let g = self.canonical_differential(&OrientedSimplex::new(s.clone())).expect("degree checked");
            out.values.insert(s.clone(), g);
        }
        out
    }

    /// Whether dω has an identity realization on every (k+1)-simplex.
    /// Abelian groups give a definite answer; for non-abelian groups a
    /// failure to find one among the enumerated realizations is "unknown".
    pub fn is_closed(&self, c: &SimplicialComplex, budget: usize) -> Verdict {
        let mut spent = 0usize;
        let abelian = self.group.is_abelian();
        let mut all_found = true;
        for s in c.simplices(self.degree + 1) {
            let s = OrientedSimplex::new(s.clone());
            let mut found = false;
            for r in 0..realization_count(s.dim()) {
                spent += 1;
                if spent > budget {
                    return Verdict::Unknown;
                }
                if self.group.is_identity(&self.eval_word(&boundary_realization(&s, r))) {
                    found = true;
                    break;
                }
                if abelian {
                    break;
                }
            }
            if !found {
                if abelian {
                    return Verdict::No;
                }
                all_found = false;
            }
        }
        if all_found {
            Verdict::Yes
        } else {
            Verdict::Unknown
        }
    }

    /// An identity realization of ddθ on `s` (dim s = deg θ + 2): the
    /// witness and the value of θ on the tracked word it produces.
    pub fn dd_identity_realization(&self, s: &OrientedSimplex, budget: usize) -> Result<(GroupElement, DdWitness)> {
        if s.dim() != self.degree + 2 {
            return Err(Error::Dimension { expected: self.degree + 2, got: s.dim() });
        }
        let w = dd_empty_witness(&KPath::single(s.clone()), budget)?;
        let word = replay_dd_witness(&w);
        Ok((self.eval_word(&word), w))
    }

    /// Local pullback along a vertex map: (s*ω)(σ) = ω(sσ).
    pub fn pullback(&self, map: &VertexMap, source: &SimplicialComplex) -> Result<GForm> {
        let mut out = GForm::identity(self.group.clone(), self.degree);
        for s in source.simplices(self.degree) {
            let img = map.image(s)?;
            out.values.insert(s.clone(), self.eval(&OrientedSimplex::new(img)));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            degree: self.degree,
            values: self
                .values
                .iter()
                .map(|(s, g)| FormEntry { simplex: s.clone(), value: self.group.element_to_json(g) })
                .collect(),
        }
    }

    pub fn from_json(group: &GaugeGroup, j: &FormJson) -> Result<Self> {
        let mut f = GForm::identity(group.clone(), j.degree);
        for e in &j.values {
            let g = group.element_from_json(&e.value)?;
            f.set(&e.simplex, g)?;
        }
        Ok(f)
    }
}

/// `{"degree": k, "values": [{"simplex": [...], "value": ...}]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub degree: usize,
    pub values: Vec<FormEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormEntry {
    pub simplex: Vec<usize>,
    pub value: Value,
}

impl VForm {
    pub fn to_json(&self) -> FormJson {
        FormJson {
            degree: self.degree,
            values: self
                .values
                .iter()
                .map(|(s, v)| FormEntry { simplex: s.clone(), value: Value::from(v.clone()) })
                .collect(),
        }
    }

    pub fn from_json(dim: usize, j: &FormJson) -> Result<Self> {
        let mut f = VForm::zero(j.degree, dim);
        for e in &j.values {
            let v: Vec<f64> = serde_json::from_value(e.value.clone())?;
            f.set(&e.simplex, v)?;
        }
        Ok(f)
    }

    pub fn pullback(&self, map: &VertexMap, source: &SimplicialComplex) -> Result<VForm> {
        let mut out = VForm::zero(self.degree, self.dim);
        for s in source.simplices(self.degree) {
            let img = map.image(s)?;
            out.values.insert(s.clone(), self.eval(&OrientedSimplex::new(img)));
        }
        Ok(out)
    }
}

/// ρ(ω)v simplex by simplex; its differential is the alternating sum
/// over reference faces.
pub fn g_action_on_vform(omega: &GForm, v: &VForm, c: &SimplicialComplex) -> Result<VForm> {
    if omega.degree != v.degree {
        return input("form degrees differ");
    }
    if omega.group.rep_dim != v.dim {
        return Err(Error::Dimension { expected: omega.group.rep_dim, got: v.dim });
    }
    let mut out = VForm::zero(v.degree, v.dim);
    for s in c.simplices(v.degree) {
        let val = omega.group.act(&omega.get_reference(s), &v.get_reference(s));
        out.values.insert(s.clone(), val);
    }
    Ok(out)
}

/// d(fv)(XY) and the symmetric split ½(df)(v(X)+v(Y)) + ½(f(X)+f(Y))dv.
pub fn module_action_split(f: &BTreeMap<usize, f64>, v: &VForm, x: usize, y: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if v.degree != 0 {
        return input("module action is defined on 0-forms");
    }
    let fx = *f.get(&x).ok_or_else(|| Error::Input(format!("f undefined at {}", x)))?;
    let fy = *f.get(&y).ok_or_else(|| Error::Input(format!("f undefined at {}", y)))?;
    let vx = v.get_reference(&[x]);
    let vy = v.get_reference(&[y]);
    let lhs = vx.iter().zip(&vy).map(|(a, b)| fy * b - fx * a).collect();
    let rhs = vx
        .iter()
        .zip(&vy)
        .map(|(a, b)| 0.5 * (fy - fx) * (a + b) + 0.5 * (fy + fx) * (b - a))
        .collect();
    Ok((lhs, rhs))
}

/// Vertex map defining a local simplicial isomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexMap {
    pub map: BTreeMap<usize, usize>,
}

impl VertexMap {
    pub fn identity(c: &SimplicialComplex) -> Self {
        VertexMap { map: c.vertices().iter().map(|&v| (v, v)).collect() }
    }

    pub fn image(&self, s: &[usize]) -> Result<Vec<usize>> {
        s.iter()
            .map(|v| self.map.get(v).copied().ok_or_else(|| Error::Input(format!("vertex {} unmapped", v))))
            .collect()
    }

    /// Every faced simplex of `source` must map injectively onto a simplex of `target`.
    pub fn check_local_isomorphism(&self, source: &SimplicialComplex, target: &SimplicialComplex) -> Result<()> {
        for f in source.faced() {
            let img = self.image(f)?;
            let set: std::collections::BTreeSet<_> = img.iter().collect();
            if set.len() != img.len() {
                return input(format!("faced simplex {:?} collapses under the map", f));
            }
            if !target.contains(&img) {
                return input(format!("image of {:?} is not a simplex of the target", f));
            }
        }
        Ok(())
    }
}

/// Coefficients admitting a cup product.
pub trait CupCoeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn cup(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn scale_sign(&self, s: i8) -> Self {
        if s < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl CupCoeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn cup(&self, o: &Self) -> Self {
        self * o
    }
}

impl CupCoeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn cup(&self, o: &Self) -> Self {
        self * o
    }
}

/// Element of the exterior algebra of R^n with integer coefficients,
/// keyed by basis-blade bitmask.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExteriorVector {
    terms: BTreeMap<u32, i64>,
}

impl ExteriorVector {
    pub fn basis(i: u32) -> Self {
        Self::blade(1 << i, 1)
    }

    pub fn blade(mask: u32, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(mask, c);
        }
        ExteriorVector { terms }
    }

    pub fn coefficient(&self, mask: u32) -> i64 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> &BTreeMap<u32, i64> {
        &self.terms
    }

    pub fn grade_parts(&self) -> BTreeMap<u32, ExteriorVector> {
        let mut out: BTreeMap<u32, ExteriorVector> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.count_ones()).or_default().terms.insert(*m, *c);
        }
        out
    }

    fn normalize(mut self) -> Self {
        self.terms.retain(|_, c| *c != 0);
        self
    }
}

fn wedge_sign(a: u32, b: u32) -> i64 {
    // number of pairs (i in a, j in b) with i > j
    let mut swaps = 0;
    for j in 0..32 {
        if b & (1 << j) != 0 {
            swaps += (a >> (j + 1)).count_ones();
        }
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

impl CupCoeff for ExteriorVector {
    fn zero() -> Self {
        ExteriorVector::default()
    }
    fn add(&self, o: &Self) -> Self {
        let mut t = self.terms.clone();
        for (m, c) in &o.terms {
            *t.entry(*m).or_insert(0) += c;
        }
        ExteriorVector { terms: t }.normalize()
    }
    fn neg(&self) -> Self {
        ExteriorVector { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
    fn cup(&self, o: &Self) -> Self {
        let mut t = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                if a & b != 0 {
                    continue;
                }
                *t.entry(a | b).or_insert(0) += wedge_sign(*a, *b) * x * y;
            }
        }
        ExteriorVector { terms: t }.normalize()
    }
}

/// Alternating cochain with coefficients in `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<T: CupCoeff> {
    pub degree: usize,
    values: BTreeMap<Vec<usize>, T>,
}

impl<T: CupCoeff> Cochain<T> {
    pub fn zero(degree: usize) -> Self {
        Cochain { degree, values: BTreeMap::new() }
    }

    pub fn set(&mut self, simplex: &[usize], v: T) -> Result<()> {
        if simplex.len() != self.degree + 1 {
            return Err(Error::Dimension { expected: self.degree + 1, got: simplex.len() });
        }
        self.values.insert(sorted(simplex), v.scale_sign(permutation_sign(simplex)));
        Ok(())
    }

    /// Value on an ordered simplex.
    pub fn eval(&self, ordered: &[usize]) -> T {
        match self.values.get(&sorted(ordered)) {
            Some(v) => v.scale_sign(permutation_sign(ordered)),
            None => T::zero(),
        }
    }

    /// dξ on an ordered (k+1)-simplex, faces in inherited order.
    pub fn d_eval(&self, ordered: &[usize]) -> T {
        alternating(ordered, |f| self.eval(f))
    }
}

fn alternating<T: CupCoeff, F: Fn(&[usize]) -> T>(ordered: &[usize], f: F) -> T {
    let mut acc = T::zero();
    for i in 0..ordered.len() {
        let mut face = ordered.to_vec();
        face.remove(i);
        let v = f(&face);
        acc = if i % 2 == 0 { acc.add(&v) } else { acc.sub(&v) };
    }
    acc
}

fn cup_parts<T: CupCoeff>(a: &Cochain<T>, b: &Cochain<T>, ordered: &[usize]) -> Result<T> {
    if ordered.len() != a.degree + b.degree + 1 {
        return Err(Error::Dimension { expected: a.degree + b.degree, got: ordered.len().saturating_sub(1) });
    }
    let k = a.degree;
    Ok(a.eval(&ordered[..=k]).cup(&b.eval(&ordered[k..])))
}

/// (ω⌣θ)(A₀…A_{k+m}) = ω(A₀…A_k)·θ(A_k…A_{k+m}) on a caller-ordered simplex.
pub fn cup<T: CupCoeff>(omega: &Cochain<T>, theta: &Cochain<T>, ordered: &[usize]) -> Result<T> {
    cup_parts(omega, theta, ordered)
}

/// d(ω⌣θ) − (dω⌣θ + (−1)^k ω⌣dθ) on an ordered (k+m+1)-simplex.
pub fn leibniz_residual<T: CupCoeff>(omega: &Cochain<T>, theta: &Cochain<T>, ordered: &[usize]) -> Result<T> {
    let k = omega.degree;
    if ordered.len() != k + theta.degree + 2 {
        return Err(Error::Dimension { expected: k + theta.degree + 1, got: ordered.len().saturating_sub(1) });
    }
    let lhs = alternating(ordered, |f| cup_parts(omega, theta, f).expect("face degree"));
    let t1 = omega.d_eval(&ordered[..=k + 1]).cup(&theta.eval(&ordered[k + 1..]));
    let t2 = omega.eval(&ordered[..=k]).cup(&theta.d_eval(&ordered[k..]));
    let rhs = if k % 2 == 0 { t1.add(&t2) } else { t1.sub(&t2) };
    Ok(lhs.sub(&rhs))
}

/// Random small-integer rational cochain on every k-simplex.
pub fn random_rational_cochain<R: rand::Rng + ?Sized>(c: &SimplicialComplex, k: usize, rng: &mut R) -> Cochain<BigRational> {
    let mut out = Cochain::zero(k);
    for s in c.simplices(k) {
        let n = rng.random_range(-9i64..=9);
        let d = rng.random_range(1i64..=7);
        out.values.insert(s.clone(), BigRational::new(n.into(), d.into()));
    }
    out
}

/// Lifts used for cup products of abelian-group forms: integers for Z_m,
/// principal angles for the circle.
fn abelian_lift(group: &GaugeGroup, g: &GroupElement) -> Result<f64> {
    match (group.kind, g) {
        (GroupKind::Cyclic(_), GroupElement::Cyclic(k)) => Ok(*k as f64),
        (GroupKind::Circle, GroupElement::Angle(a)) => Ok(*a),
        _ => Err(Error::Unsupported(format!(
            "cup products of group-valued forms need Z_m or U(1) coefficients, got {:?}",
            group.kind
        ))),
    }
}

fn abelian_drop(group: &GaugeGroup, x: f64) -> GroupElement {
    match group.kind {
        GroupKind::Cyclic(m) => GroupElement::Cyclic((x.round() as i64).rem_euclid(m as i64) as u32),
        _ => GroupElement::Angle(crate::group::wrap_angle(x)),
    }
}

fn lifted_eval(f: &GForm, ordered: &[usize]) -> Result<f64> {
    let g = f.eval(&OrientedSimplex::new(ordered.to_vec()));
    abelian_lift(&f.group, &g)
}

/// (ω⌣θ)(σ) for abelian-group forms, using the ring structure of the lifts.
pub fn cup_abelian_g(omega: &GForm, theta: &GForm, ordered: &[usize]) -> Result<GroupElement> {
    if ordered.len() != omega.degree + theta.degree + 1 {
        return Err(Error::Dimension { expected: omega.degree + theta.degree, got: ordered.len().saturating_sub(1) });
    }
    let k = omega.degree;
    let x = lifted_eval(omega, &ordered[..=k])? * lifted_eval(theta, &ordered[k..])?;
    Ok(abelian_drop(&omega.group, x))
}

/// Distance between d(ω⌣θ) and dω⌣θ·(ω⌣dθ)^{(−1)^k} on an ordered
/// simplex, with the differentials realized by their lifted alternating sums.
pub fn abelian_leibniz_residual(omega: &GForm, theta: &GForm, ordered: &[usize]) -> Result<f64> {
    let g = &omega.group;
    let k = omega.degree;
    if ordered.len() != k + theta.degree + 2 {
        return Err(Error::Dimension { expected: k + theta.degree + 1, got: ordered.len().saturating_sub(1) });
    }
    let mut lhs = g.identity();
    for i in 0..ordered.len() {
        let mut f = ordered.to_vec();
        f.remove(i);
        let c = cup_abelian_g(omega, theta, &f)?;
        lhs = g.mul(&lhs, &if i % 2 == 0 { c } else { g.inverse(&c) });
    }
    let d_lift = |form: &GForm, s: &[usize]| -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..s.len() {
            let mut f = s.to_vec();
            f.remove(i);
            let v = lifted_eval(form, &f)?;
            acc += if i % 2 == 0 { v } else { -v };
        }
        Ok(acc)
    };
    let t1 = abelian_drop(g, d_lift(omega, &ordered[..=k + 1])? * lifted_eval(theta, &ordered[k + 1..])?);
    let t2 = abelian_drop(g, lifted_eval(omega, &ordered[..=k])? * d_lift(theta, &ordered[k..])?);
    let rhs = g.mul(&t1, &if k % 2 == 0 { t2 } else { g.inverse(&t2) });
    Ok(g.distance(&lhs, &rhs))
}

/// Integer cochain vector in the order of `c.simplices(k)`.
pub fn cochain_vector(c: &SimplicialComplex, k: usize, values: &BTreeMap<Vec<usize>, i64>) -> Vec<i64> {
    c.simplices(k).iter().map(|s| values.get(s).copied().unwrap_or(0)).collect()
}

/// H^k(K; A) for A = Z or Z_m.
pub fn cochain_cohomology(c: &SimplicialComplex, coeff: Coefficients, k: usize) -> HomologyDescriptor {
    smith::cohomology(c, coeff, k)
}

/// Closed and exact verdicts for an integer cochain over the coefficients.
pub fn closed_exact(c: &SimplicialComplex, coeff: Coefficients, k: usize, x: &[i64]) -> Result<(bool, bool)> {
    let closed = smith::is_cocycle(c, coeff, k, x)?;
    let exact = smith::is_coboundary(c, coeff, k, x)?;
    Ok((closed, exact))
}

/// Unit rational helper for building cochains.
pub fn rational(n: i64, d: i64) -> BigRational {
    if d == 1 {
        BigRational::from_integer(n.into())
    } else {
        BigRational::new(n.into(), d.into())
    }
}
