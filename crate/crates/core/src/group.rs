//! Gauge groups: finite cyclic groups, the circle, orthogonal groups and SU(2).
//!
//! Elements are plain values tagged by representation; a [`GaugeGroup`]
//! carries the kind, the dimension of the internal space it acts on and the
//! equality tolerance. Matrix elements drifting off the manifold are pulled
//! back by polar decomposition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, UnitQuaternion};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{input, Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Default equality tolerance for group elements.
pub const DEFAULT_EPS: f64 = 1e-9;
/// Minimum distance from the cut locus accepted by logarithms.
pub const BRANCH_EPS: f64 = 1e-6;
/// Generator scale used by the π₃ correction map.
pub const PI3_STEP: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Cyclic(u32),
    Circle,
    Orthogonal(usize),
    SpecialOrthogonal(usize),
    SpecialUnitary2,
}

/// JSON form of a group, e.g. `{"kind":"so","n":3,"rep_dim":3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Cyclic {
        m: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rep_dim: Option<usize>,
    },
    #[serde(alias = "u1")]
    Circle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rep_dim: Option<usize>,
    },
    O {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rep_dim: Option<usize>,
    },
    So {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rep_dim: Option<usize>,
    },
    Su2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rep_dim: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    /// Residue modulo m.
    Cyclic(u32),
    /// Angle in (−π, π].
    Angle(f64),
    /// Real orthogonal matrix.
    Matrix(DMatrix<f64>),
    /// Special unitary 2×2 matrix.
    Unitary(Matrix2<C64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraElement {
    Angle(f64),
    /// Skew-symmetric matrix.
    Skew(DMatrix<f64>),
    /// Anti-Hermitian traceless 2×2 matrix.
    AntiHermitian(Matrix2<C64>),
}

/// Finitely generated abelian group Z^rank ⊕ Z_{t₁} ⊕ … .
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { rank: 0, torsion: vec![] }
    }
    pub fn integers() -> Self {
        AbelianGroup { rank: 1, torsion: vec![] }
    }
    pub fn cyclic(m: u64) -> Self {
        if m <= 1 {
            Self::trivial()
        } else {
            AbelianGroup { rank: 0, torsion: vec![m] }
        }
    }
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
    pub fn ngens(&self) -> usize {
        self.rank + self.torsion.len()
    }
    /// Reduce a coefficient vector modulo the torsion orders.
    pub fn reduce(&self, coeffs: &[i64]) -> Vec<i64> {
        let mut out = coeffs.to_vec();
        out.resize(self.ngens(), 0);
        for (i, t) in self.torsion.iter().enumerate() {
            let k = self.rank + i;
            out[k] = out[k].rem_euclid(*t as i64);
        }
        out
    }
    /// Single-generator groups as a coefficient ring: `None` for Z, `Some(m)` for Z_m.
    pub fn as_single(&self) -> Option<Option<u64>> {
        match (self.rank, self.torsion.as_slice()) {
            (1, []) => Some(None),
            (0, [m]) => Some(Some(*m)),
            _ => None,
        }
    }
}

/// An element of π_n(G) written in the generators of the table entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomotopyClass {
    pub n: usize,
    pub coeffs: Vec<i64>,
}

impl HomotopyClass {
    pub fn identity(table: &AbelianGroup, n: usize) -> Self {
        HomotopyClass { n, coeffs: vec![0; table.ngens()] }
    }
    pub fn new(table: &AbelianGroup, n: usize, coeffs: &[i64]) -> Self {
        HomotopyClass { n, coeffs: table.reduce(coeffs) }
    }
    pub fn is_identity(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }
    pub fn add(&self, other: &Self, table: &AbelianGroup) -> Self {
        let c: Vec<i64> = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        HomotopyClass::new(table, self.n, &c)
    }
    pub fn neg(&self, table: &AbelianGroup) -> Self {
        let c: Vec<i64> = self.coeffs.iter().map(|a| -a).collect();
        HomotopyClass::new(table, self.n, &c)
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeGroup {
    pub kind: GroupKind,
    pub rep_dim: usize,
    pub eps: f64,
}

impl GaugeGroup {
    pub fn new(kind: GroupKind, rep_dim: Option<usize>) -> Result<Self> {
        let rep_dim = match kind {
            GroupKind::Cyclic(m) => {
                if m == 0 {
                    return input("cyclic group order must be positive");
                }
                let d = rep_dim.unwrap_or(if m <= 2 { 1 } else { 2 });
                if m > 2 && d < 2 {
                    return input("cyclic(m>2) acts on a plane; rep_dim must be at least 2");
                }
                d
            }
            GroupKind::Circle => {
                let d = rep_dim.unwrap_or(2);
                if d < 2 {
                    return input("circle acts on a plane; rep_dim must be at least 2");
                }
                d
            }
            GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n) => {
                if n == 0 {
                    return input("orthogonal groups need n ≥ 1");
                }
                let d = rep_dim.unwrap_or(n);
                if d != n {
                    return Err(Error::Dimension { expected: n, got: d });
                }
                d
            }
            GroupKind::SpecialUnitary2 => {
                let d = rep_dim.unwrap_or(4);
                if d != 3 && d != 4 {
                    return input("su2 rep_dim must be 3 (adjoint) or 4 (fundamental, realified)");
                }
                d
            }
        };
        if rep_dim == 0 {
            return input("rep_dim must be positive");
        }
        Ok(GaugeGroup { kind, rep_dim, eps: DEFAULT_EPS })
    }

    pub fn cyclic(m: u32) -> Self {
        Self::new(GroupKind::Cyclic(m), None).expect("valid cyclic group")
    }
    pub fn circle() -> Self {
        Self::new(GroupKind::Circle, None).expect("valid circle group")
    }
    pub fn so(n: usize) -> Self {
        Self::new(GroupKind::SpecialOrthogonal(n), None).expect("valid SO(n)")
    }
    pub fn o(n: usize) -> Self {
        Self::new(GroupKind::Orthogonal(n), None).expect("valid O(n)")
    }
    pub fn su2() -> Self {
        Self::new(GroupKind::SpecialUnitary2, None).expect("valid SU(2)")
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        match *spec {
            GroupSpec::Cyclic { m, rep_dim } => Self::new(GroupKind::Cyclic(m), rep_dim),
            GroupSpec::Circle { rep_dim } => Self::new(GroupKind::Circle, rep_dim),
            GroupSpec::O { n, rep_dim } => Self::new(GroupKind::Orthogonal(n), rep_dim),
            GroupSpec::So { n, rep_dim } => Self::new(GroupKind::SpecialOrthogonal(n), rep_dim),
            GroupSpec::Su2 { rep_dim } => Self::new(GroupKind::SpecialUnitary2, rep_dim),
        }
    }

    pub fn to_spec(&self) -> GroupSpec {
        let rep_dim = Some(self.rep_dim);
        match self.kind {
            GroupKind::Cyclic(m) => GroupSpec::Cyclic { m, rep_dim },
            GroupKind::Circle => GroupSpec::Circle { rep_dim },
            GroupKind::Orthogonal(n) => GroupSpec::O { n, rep_dim },
            GroupKind::SpecialOrthogonal(n) => GroupSpec::So { n, rep_dim },
            GroupKind::SpecialUnitary2 => GroupSpec::Su2 { rep_dim },
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(
            self.kind,
            GroupKind::Cyclic(_)
                | GroupKind::Circle
                | GroupKind::SpecialOrthogonal(1)
                | GroupKind::SpecialOrthogonal(2)
                | GroupKind::Orthogonal(1)
        )
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self.kind,
            GroupKind::Cyclic(_) | GroupKind::SpecialOrthogonal(1) | GroupKind::Orthogonal(1)
        )
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Cyclic(_) => GroupElement::Cyclic(0),
            GroupKind::Circle => GroupElement::Angle(0.0),
            GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n) => {
                GroupElement::Matrix(DMatrix::identity(n, n))
            }
            GroupKind::SpecialUnitary2 => GroupElement::Unitary(Matrix2::identity()),
        }
    }

    /// Whether `g` is a well-formed element of this group.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self.kind, g) {
            (GroupKind::Cyclic(m), GroupElement::Cyclic(a)) => *a < m,
            (GroupKind::Circle, GroupElement::Angle(a)) => a.is_finite(),
            (GroupKind::Orthogonal(n), GroupElement::Matrix(a)) => {
                a.nrows() == n && a.ncols() == n && orth_residual(a) < 1e3 * self.eps
            }
            (GroupKind::SpecialOrthogonal(n), GroupElement::Matrix(a)) => {
                a.nrows() == n
                    && a.ncols() == n
                    && orth_residual(a) < 1e3 * self.eps
                    && a.determinant() > 0.0
            }
            (GroupKind::SpecialUnitary2, GroupElement::Unitary(u)) => {
                unitary_residual(u) < 1e3 * self.eps
            }
            _ => false,
        }
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            input(format!("element does not belong to {:?}", self.kind))
        }
    }

    /// Checked product.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Product `a·b`. Both operands must come from this group.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (a, b) {
            (GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
                let m = match self.kind {
                    GroupKind::Cyclic(m) => m,
                    _ => panic!("cyclic element used with {:?}", self.kind),
                };
                GroupElement::Cyclic((x + y) % m)
            }
            (GroupElement::Angle(x), GroupElement::Angle(y)) => GroupElement::Angle(wrap_angle(x + y)),
            (GroupElement::Matrix(x), GroupElement::Matrix(y)) => {
                let p = x * y;
                if orth_residual(&p) > 10.0 * self.eps {
                    GroupElement::Matrix(polar_orthogonal(&p))
                } else {
                    GroupElement::Matrix(p)
                }
            }
            (GroupElement::Unitary(x), GroupElement::Unitary(y)) => {
                let p = x * y;
                if unitary_residual(&p) > 10.0 * self.eps {
                    GroupElement::Unitary(project_su2(&p))
                } else {
                    GroupElement::Unitary(p)
                }
            }
            _ => panic!("mixed group elements in product"),
        }
    }

    pub fn mul3(&self, a: &GroupElement, b: &GroupElement, c: &GroupElement) -> GroupElement {
        self.mul(&self.mul(a, b), c)
    }

    /// Left-to-right product of a sequence.
    pub fn product<'a, I: IntoIterator<Item = &'a GroupElement>>(&self, items: I) -> GroupElement {
        items.into_iter().fold(self.identity(), |acc, g| self.mul(&acc, g))
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match a {
            GroupElement::Cyclic(x) => {
                let m = match self.kind {
                    GroupKind::Cyclic(m) => m,
                    _ => panic!("cyclic element used with {:?}", self.kind),
                };
                GroupElement::Cyclic((m - x % m) % m)
            }
            GroupElement::Angle(x) => GroupElement::Angle(wrap_angle(-x)),
            GroupElement::Matrix(x) => GroupElement::Matrix(x.transpose()),
            GroupElement::Unitary(x) => GroupElement::Unitary(x.adjoint()),
        }
    }

    pub fn conjugate(&self, by: &GroupElement, a: &GroupElement) -> GroupElement {
        self.mul3(by, a, &self.inverse(by))
    }

    pub fn pow(&self, a: &GroupElement, k: i64) -> GroupElement {
        let base = if k < 0 { self.inverse(a) } else { a.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    /// Distance used for residuals: Frobenius norm for matrices, wrapped
    /// angle difference for the circle, 0/1 for cyclic groups.
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> f64 {
        match (a, b) {
            (GroupElement::Cyclic(x), GroupElement::Cyclic(y)) => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            (GroupElement::Angle(x), GroupElement::Angle(y)) => wrap_angle(x - y).abs(),
            (GroupElement::Matrix(x), GroupElement::Matrix(y)) => (x - y).norm(),
            (GroupElement::Unitary(x), GroupElement::Unitary(y)) => (x - y).norm(),
            _ => f64::INFINITY,
        }
    }

    pub fn distance_to_identity(&self, a: &GroupElement) -> f64 {
        self.distance(a, &self.identity())
    }

    pub fn approx_eq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        self.distance(a, b) <= self.eps
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        self.distance_to_identity(a) <= self.eps
    }

    /// Matrix of the representation on the internal space R^rep_dim.
    pub fn rep_matrix(&self, g: &GroupElement) -> DMatrix<f64> {
        let d = self.rep_dim;
        match (self.kind, g) {
            (GroupKind::Cyclic(m), GroupElement::Cyclic(k)) => {
                if m <= 2 {
                    let s = if *k == 0 { 1.0 } else { -1.0 };
                    DMatrix::identity(d, d) * s
                } else {
                    plane_rotation(d, 2.0 * PI * (*k as f64) / (m as f64))
                }
            }
            (GroupKind::Circle, GroupElement::Angle(t)) => plane_rotation(d, *t),
            (_, GroupElement::Matrix(a)) => a.clone(),
            (GroupKind::SpecialUnitary2, GroupElement::Unitary(u)) => {
                if d == 4 {
                    let mut r = DMatrix::zeros(4, 4);
                    for i in 0..2 {
                        for j in 0..2 {
                            let z = u[(i, j)];
                            r[(2 * i, 2 * j)] = z.re;
                            r[(2 * i, 2 * j + 1)] = -z.im;
                            r[(2 * i + 1, 2 * j)] = z.im;
                            r[(2 * i + 1, 2 * j + 1)] = z.re;
                        }
                    }
                    r
                } else {
                    su2_adjoint(u)
                }
            }
            _ => panic!("element does not match group {:?}", self.kind),
        }
    }

    pub fn trace(&self, g: &GroupElement) -> f64 {
        self.rep_matrix(g).trace()
    }

    pub fn act_on_vector(&self, g: &GroupElement, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rep_dim {
            return Err(Error::Dimension { expected: self.rep_dim, got: v.len() });
        }
        Ok(self.act(g, v))
    }

    /// Unchecked action; `v` must have length `rep_dim`.
    pub fn act(&self, g: &GroupElement, v: &[f64]) -> Vec<f64> {
        match g {
            GroupElement::Cyclic(k) if matches!(self.kind, GroupKind::Cyclic(m) if m <= 2) => {
                let s = if *k == 0 { 1.0 } else { -1.0 };
                v.iter().map(|x| s * x).collect()
            }
            _ => {
                let m = self.rep_matrix(g);
                let x = nalgebra::DVector::from_column_slice(v);
                (m * x).iter().copied().collect()
            }
        }
    }

    pub fn algebra_dim(&self) -> usize {
        match self.kind {
            GroupKind::Cyclic(_) => 0,
            GroupKind::Circle => 1,
            GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n) => n * (n - 1) / 2,
            GroupKind::SpecialUnitary2 => 3,
        }
    }

    /// Algebra element from coordinates: the angle, upper-triangular entries
    /// of a skew matrix in row order, or coefficients of (i/2)σ_k.
    pub fn algebra_from_coords(&self, c: &[f64]) -> Result<AlgebraElement> {
        if c.len() != self.algebra_dim() {
            return Err(Error::Dimension { expected: self.algebra_dim(), got: c.len() });
        }
        match self.kind {
            GroupKind::Cyclic(_) => Err(Error::Unsupported("cyclic groups have no Lie algebra".into())),
            GroupKind::Circle => Ok(AlgebraElement::Angle(c[0])),
            GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n) => {
                let mut a = DMatrix::zeros(n, n);
                let mut k = 0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        a[(i, j)] = c[k];
                        a[(j, i)] = -c[k];
                        k += 1;
                    }
                }
                Ok(AlgebraElement::Skew(a))
            }
            GroupKind::SpecialUnitary2 => {
                let i = C64::new(0.0, 0.5);
                let s = pauli();
                let r = |x: f64| C64::new(x, 0.0);
                Ok(AlgebraElement::AntiHermitian((s[0] * r(c[0]) + s[1] * r(c[1]) + s[2] * r(c[2])) * i))
            }
        }
    }

    pub fn algebra_to_coords(&self, a: &AlgebraElement) -> Vec<f64> {
        match a {
            AlgebraElement::Angle(t) => vec![*t],
            AlgebraElement::Skew(m) => {
                let n = m.nrows();
                let mut out = Vec::with_capacity(n * (n - 1) / 2);
                for i in 0..n {
                    for j in (i + 1)..n {
                        out.push(m[(i, j)]);
                    }
                }
                out
            }
            AlgebraElement::AntiHermitian(m) => {
                // m = (i/2)(c1 σ1 + c2 σ2 + c3 σ3)
                let c3 = 2.0 * m[(0, 0)].im;
                let c1 = 2.0 * m[(0, 1)].im;
                let c2 = 2.0 * m[(0, 1)].re;
                vec![c1, c2, c3]
            }
        }
    }

    pub fn exp_map(&self, a: &AlgebraElement) -> Result<GroupElement> {
        match (self.kind, a) {
            (GroupKind::Circle, AlgebraElement::Angle(t)) => Ok(GroupElement::Angle(wrap_angle(*t))),
            (GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n), AlgebraElement::Skew(m)) => {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::Dimension { expected: n, got: m.nrows() });
                }
                Ok(GroupElement::Matrix(exp_skew(m)))
            }
            (GroupKind::SpecialUnitary2, AlgebraElement::AntiHermitian(m)) => {
                Ok(GroupElement::Unitary(exp_su2(m)))
            }
            (GroupKind::Cyclic(_), _) => Err(Error::Unsupported("cyclic groups have no exponential map".into())),
            _ => input("algebra element does not match the group"),
        }
    }

    pub fn exp_coords(&self, c: &[f64]) -> Result<GroupElement> {
        self.exp_map(&self.algebra_from_coords(c)?)
    }

    pub fn log_map(&self, g: &GroupElement) -> Result<AlgebraElement> {
        match (self.kind, g) {
            (GroupKind::Circle, GroupElement::Angle(t)) => Ok(AlgebraElement::Angle(*t)),
            (GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n), GroupElement::Matrix(m)) => {
                if m.determinant() < 0.0 {
                    return Err(Error::Singular("element outside the identity component".into()));
                }
                log_rotation(m, n).map(AlgebraElement::Skew)
            }
            (GroupKind::SpecialUnitary2, GroupElement::Unitary(u)) => log_su2(u).map(AlgebraElement::AntiHermitian),
            (GroupKind::Cyclic(_), _) => Err(Error::Unsupported("cyclic groups have no logarithm".into())),
            _ => input("element does not match the group"),
        }
    }

    pub fn algebra_norm(&self, a: &AlgebraElement) -> f64 {
        match a {
            AlgebraElement::Angle(t) => t.abs(),
            AlgebraElement::Skew(m) => m.norm(),
            AlgebraElement::AntiHermitian(m) => m.norm(),
        }
    }

    /// Bi-invariant distance ‖log(g⁻¹h)‖_F; the discrete metric for cyclic groups.
    pub fn geodesic_distance(&self, g: &GroupElement, h: &GroupElement) -> Result<f64> {
        if let GroupKind::Cyclic(_) = self.kind {
            return Ok(self.distance(g, h));
        }
        let rel = self.mul(&self.inverse(g), h);
        Ok(self.algebra_norm(&self.log_map(&rel)?))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match self.kind {
            GroupKind::Cyclic(m) => GroupElement::Cyclic(rng.random_range(0..m)),
            GroupKind::Circle => GroupElement::Angle(wrap_angle(rng.random_range(-PI..PI))),
            GroupKind::SpecialOrthogonal(n) => GroupElement::Matrix(random_rotation(n, rng)),
            GroupKind::Orthogonal(n) => {
                let mut m = random_rotation(n, rng);
                if rng.random_bool(0.5) {
                    for j in 0..n {
                        m[(0, j)] = -m[(0, j)];
                    }
                }
                GroupElement::Matrix(m)
            }
            GroupKind::SpecialUnitary2 => {
                let q = random_unit4(rng);
                GroupElement::Unitary(quat_to_su2(q))
            }
        }
    }

    /// exp of a Gaussian algebra element with the given scale; random element for discrete groups.
    pub fn random_near_identity<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> GroupElement {
        if self.algebra_dim() == 0 {
            return self.random_element(rng);
        }
        let c: Vec<f64> = (0..self.algebra_dim())
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.exp_coords(&c).expect("algebra coordinates have the right length")
    }

    /// Table of π_n(G). Degree 0 exposes the component group.
    pub fn homotopy_group(&self, n: usize) -> Result<AbelianGroup> {
        use GroupKind::*;
        let unsupported = || Err(Error::Unsupported(format!("π_{} of {:?}", n, self.kind)));
        match (self.kind, n) {
            (Cyclic(m), 0) => Ok(AbelianGroup::cyclic(m as u64)),
            (Cyclic(_), 1..=3) => Ok(AbelianGroup::trivial()),
            (Orthogonal(1), 0) => Ok(AbelianGroup::cyclic(2)),
            (SpecialOrthogonal(1), 0..=3) | (Orthogonal(1), 1..=3) => Ok(AbelianGroup::trivial()),
            (Orthogonal(_), 0) => Ok(AbelianGroup::cyclic(2)),
            (Circle | SpecialOrthogonal(_) | SpecialUnitary2, 0) => Ok(AbelianGroup::trivial()),
            (Circle | SpecialOrthogonal(2) | Orthogonal(2), 1) => Ok(AbelianGroup::integers()),
            (Circle | SpecialOrthogonal(2) | Orthogonal(2), 2 | 3) => Ok(AbelianGroup::trivial()),
            (SpecialOrthogonal(_) | Orthogonal(_), 1) => Ok(AbelianGroup::cyclic(2)),
            (SpecialOrthogonal(_) | Orthogonal(_), 2) => Ok(AbelianGroup::trivial()),
            (SpecialOrthogonal(3) | Orthogonal(3), 3) => Ok(AbelianGroup::integers()),
            (SpecialUnitary2, 1 | 2) => Ok(AbelianGroup::trivial()),
            (SpecialUnitary2, 3) => Ok(AbelianGroup::integers()),
            _ => unsupported(),
        }
    }

    pub fn class(&self, n: usize, coeffs: &[i64]) -> Result<HomotopyClass> {
        let t = self.homotopy_group(n)?;
        Ok(HomotopyClass::new(&t, n, coeffs))
    }

    /// The correction map β_n: π_n(G) → G.
    pub fn beta(&self, n: usize, c: &HomotopyClass) -> Result<GroupElement> {
        let table = self.homotopy_group(n)?;
        let coeffs = table.reduce(&c.coeffs);
        if coeffs.iter().all(|x| *x == 0) {
            return Ok(self.identity());
        }
        use GroupKind::*;
        match (self.kind, n) {
            (Circle, 1) => Ok(GroupElement::Angle(wrap_angle(coeffs[0] as f64))),
            (SpecialOrthogonal(2) | Orthogonal(2), 1) => {
                Ok(GroupElement::Matrix(plane_rotation(2, coeffs[0] as f64)))
            }
            (SpecialOrthogonal(m) | Orthogonal(m), 1) => Ok(GroupElement::Matrix(plane_rotation(m, PI))),
            (SpecialOrthogonal(3) | Orthogonal(3), 3) => {
                Ok(GroupElement::Matrix(plane_rotation(3, PI3_STEP * coeffs[0] as f64)))
            }
            (SpecialUnitary2, 3) => {
                let t = PI3_STEP * coeffs[0] as f64;
                let mut u = Matrix2::identity();
                u[(0, 0)] = C64::new(t.cos(), t.sin());
                u[(1, 1)] = C64::new(t.cos(), -t.sin());
                Ok(GroupElement::Unitary(u))
            }
            _ => Err(Error::Unsupported(format!("β_{} for {:?}", n, self.kind))),
        }
    }

    /// Re-project a drifted matrix element onto the group.
    pub fn reproject(&self, g: &GroupElement) -> GroupElement {
        match g {
            GroupElement::Matrix(m) => GroupElement::Matrix(polar_orthogonal(m)),
            GroupElement::Unitary(u) => GroupElement::Unitary(project_su2(u)),
            GroupElement::Angle(a) => GroupElement::Angle(wrap_angle(*a)),
            other => other.clone(),
        }
    }

    pub fn element_to_json(&self, g: &GroupElement) -> Value {
        match g {
            GroupElement::Cyclic(k) => Value::from(*k),
            GroupElement::Angle(t) => Value::from(*t),
            GroupElement::Matrix(m) => {
                let mut v = Vec::with_capacity(m.len());
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        v.push(Value::from(m[(i, j)]));
                    }
                }
                Value::Array(v)
            }
            GroupElement::Unitary(u) => {
                let mut v = Vec::with_capacity(4);
                for i in 0..2 {
                    for j in 0..2 {
                        v.push(Value::Array(vec![Value::from(u[(i, j)].re), Value::from(u[(i, j)].im)]));
                    }
                }
                Value::Array(v)
            }
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<GroupElement> {
        let bad = || Error::Input(format!("cannot read {:?} element from {}", self.kind, v));
        let g = match self.kind {
            GroupKind::Cyclic(m) => {
                let k = v.as_i64().ok_or_else(bad)?;
                GroupElement::Cyclic(k.rem_euclid(m as i64) as u32)
            }
            GroupKind::Circle => GroupElement::Angle(wrap_angle(v.as_f64().ok_or_else(bad)?)),
            GroupKind::Orthogonal(n) | GroupKind::SpecialOrthogonal(n) => {
                let arr = v.as_array().ok_or_else(bad)?;
                if arr.len() != n * n {
                    return Err(bad());
                }
                let vals: Option<Vec<f64>> = arr.iter().map(|x| x.as_f64()).collect();
                GroupElement::Matrix(DMatrix::from_row_slice(n, n, &vals.ok_or_else(bad)?))
            }
            GroupKind::SpecialUnitary2 => {
                let arr = v.as_array().ok_or_else(bad)?;
                if arr.len() != 4 {
                    return Err(bad());
                }
                let mut u = Matrix2::zeros();
                for (k, z) in arr.iter().enumerate() {
                    let p = z.as_array().ok_or_else(bad)?;
                    let re = p.first().and_then(|x| x.as_f64()).ok_or_else(bad)?;
                    let im = p.get(1).and_then(|x| x.as_f64()).ok_or_else(bad)?;
                    u[(k / 2, k % 2)] = C64::new(re, im);
                }
                GroupElement::Unitary(u)
            }
        };
        self.check(&g)?;
        Ok(g)
    }
}

/// Rotation by `t` in the (e₁, e₂) plane of R^d.
pub fn plane_rotation(d: usize, t: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(d, d);
    if d >= 2 {
        m[(0, 0)] = t.cos();
        m[(0, 1)] = -t.sin();
        m[(1, 0)] = t.sin();
        m[(1, 1)] = t.cos();
    }
    m
}

fn orth_residual(m: &DMatrix<f64>) -> f64 {
    (m.transpose() * m - DMatrix::identity(m.nrows(), m.ncols())).norm()
}

fn unitary_residual(u: &Matrix2<C64>) -> f64 {
    (u.adjoint() * u - Matrix2::identity()).norm() + (u.determinant() - C64::new(1.0, 0.0)).norm()
}

fn polar_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

fn project_su2(u: &Matrix2<C64>) -> Matrix2<C64> {
    // SU(2) matrices are [[a, b], [-b̄, ā]]; average the redundant entries and normalise.
    let a = (u[(0, 0)] + u[(1, 1)].conj()) * 0.5;
    let b = (u[(0, 1)] - u[(1, 0)].conj()) * 0.5;
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / n, b / n);
    Matrix2::new(a, b, -b.conj(), a.conj())
}

fn pauli() -> [Matrix2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(o, one, one, o),
        Matrix2::new(o, -i, i, o),
        Matrix2::new(one, o, o, -one),
    ]
}

fn su2_adjoint(u: &Matrix2<C64>) -> DMatrix<f64> {
    let s = pauli();
    let mut r = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            r[(i, j)] = 0.5 * (s[i] * u * s[j] * u.adjoint()).trace().re;
        }
    }
    r
}

fn exp_skew(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    match n {
        1 => DMatrix::identity(1, 1),
        2 => plane_rotation(2, a[(1, 0)]),
        3 => {
            let w = [a[(2, 1)], a[(0, 2)], a[(1, 0)]];
            let t = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
            let (s1, s2) = if t < 1e-8 {
                (1.0 - t * t / 6.0, 0.5 - t * t / 24.0)
            } else {
                (t.sin() / t, (1.0 - t.cos()) / (t * t))
            };
            DMatrix::identity(3, 3) + a * s1 + a * a * s2
        }
        _ => a.clone().exp(),
    }
}

fn log_rotation(r: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    match n {
        1 => Ok(DMatrix::zeros(1, 1)),
        2 => {
            let t = r[(1, 0)].atan2(r[(0, 0)]);
            if t.abs() > PI - BRANCH_EPS {
                return Err(Error::Singular("rotation angle at the branch cut".into()));
            }
            let mut a = DMatrix::zeros(2, 2);
            a[(1, 0)] = t;
            a[(0, 1)] = -t;
            Ok(a)
        }
        3 => {
            let c = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
            let t = c.acos();
            if t > PI - BRANCH_EPS {
                return Err(Error::Singular("rotation angle at the branch cut".into()));
            }
            let f = if t < 1e-6 { 0.5 + t * t / 12.0 } else { t / (2.0 * t.sin()) };
            let a = (r - r.transpose()) * f;
            Ok(a)
        }
        _ => log_rotation_general(r),
    }
}

fn log_rotation_general(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = r.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = r.clone();
    let mut k = 0;
    while (&x - &id).norm() > 0.25 {
        x = sqrt_db(&x).ok_or_else(|| Error::Singular("matrix square root failed".into()))?;
        k += 1;
        if k > 60 {
            return Err(Error::Singular("logarithm did not converge".into()));
        }
    }
    let e = &x - &id;
    let mut term = e.clone();
    let mut l = DMatrix::zeros(n, n);
    for j in 1..200 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        l += &term * (sign / j as f64);
        term = &term * &e;
        if term.norm() < 1e-18 {
            break;
        }
    }
    let l = l * 2f64.powi(k);
    let l = (&l - l.transpose()) * 0.5;
    let top = l.clone().singular_values().max();
    if !top.is_finite() || top > PI - BRANCH_EPS {
        return Err(Error::Singular("rotation angle at the branch cut".into()));
    }
    Ok(l)
}

fn sqrt_db(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse()?;
        let zi = z.clone().try_inverse()?;
        let y2 = (&y + zi) * 0.5;
        let z2 = (&z + yi) * 0.5;
        let delta = (&y2 - &y).norm();
        y = y2;
        z = z2;
        if !delta.is_finite() {
            return None;
        }
        if delta < 1e-15 * (1.0 + y.norm()) {
            break;
        }
    }
    Some(y)
}

fn exp_su2(a: &Matrix2<C64>) -> Matrix2<C64> {
    let t = a.determinant().re.max(0.0).sqrt();
    let s = if t < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
    let u = Matrix2::identity() * C64::new(t.cos(), 0.0) + a * C64::new(s, 0.0);
    project_su2(&u)
}

fn log_su2(u: &Matrix2<C64>) -> Result<Matrix2<C64>> {
    let c = (u.trace().re / 2.0).clamp(-1.0, 1.0);
    let t = c.acos();
    if t > PI - BRANCH_EPS {
        return Err(Error::Singular("SU(2) element at the branch cut".into()));
    }
    let f = if t < 1e-6 { 1.0 + t * t / 6.0 } else { t / t.sin() };
    let a = (u - Matrix2::identity() * C64::new(c, 0.0)) * C64::new(f, 0.0);
    let a = (a - a.adjoint()) * C64::new(0.5, 0.0);
    let tr = a.trace() * C64::new(0.5, 0.0);
    Ok(a - Matrix2::identity() * tr)
}

fn random_unit4<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return q.map(|x| x / n);
        }
    }
}

fn quat_to_su2(q: [f64; 4]) -> Matrix2<C64> {
    let a = C64::new(q[0], q[3]);
    let b = C64::new(q[2], q[1]);
    Matrix2::new(a, b, -b.conj(), a.conj())
}

fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    if n == 3 {
        let q = random_unit4(rng);
        let uq = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]));
        let m = uq.to_rotation_matrix();
        return DMatrix::from_iterator(3, 3, m.matrix().iter().copied());
    }
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Winding number of a loop of U(1) angles, stepping along shortest geodesics.
pub fn winding_number(angles: &[f64], closed: bool) -> Result<i64> {
    if angles.len() < 2 {
        return Ok(0);
    }
    let mut total = 0.0;
    let steps = if closed { angles.len() } else { angles.len() - 1 };
    for i in 0..steps {
        let a = angles[i];
        let b = angles[(i + 1) % angles.len()];
        let d = wrap_angle(b - a);
        if d.abs() >= PI - BRANCH_EPS {
            return Err(Error::Ambiguous(format!("step {} has magnitude {:.6}", i, d.abs())));
        }
        total += d;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Z₂ class of a loop in SO(3): `true` when the continuous unit-quaternion
/// lift ends at the antipode of its start.
pub fn so3_loop_class(rotations: &[DMatrix<f64>], closed: bool) -> Result<bool> {
    if rotations.is_empty() {
        return Ok(false);
    }
    let quat = |m: &DMatrix<f64>| -> Result<UnitQuaternion<f64>> {
        if m.nrows() != 3 || m.ncols() != 3 {
            return Err(Error::Dimension { expected: 3, got: m.nrows() });
        }
        let m3 = nalgebra::Matrix3::from_iterator(m.iter().copied());
        Ok(UnitQuaternion::from_matrix(&m3))
    };
    let start = quat(&rotations[0])?;
    let mut prev = start;
    let mut seq: Vec<&DMatrix<f64>> = rotations.iter().skip(1).collect();
    if closed {
        seq.push(&rotations[0]);
    }
    let min_dot = (0.5 * (PI - BRANCH_EPS)).cos();
    for (i, m) in seq.into_iter().enumerate() {
        let mut q = quat(m)?;
        let d = prev.coords.dot(&q.coords);
        if d.abs() <= min_dot {
            return Err(Error::Ambiguous(format!("step {} turns by at least π", i)));
        }
        if d < 0.0 {
            q = UnitQuaternion::new_unchecked(-q.into_inner());
        }
        prev = q;
    }
    Ok(prev.coords.dot(&start.coords) < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cyclic_and_circle_products() {
        let z2 = GaugeGroup::cyclic(2);
        assert_eq!(z2.mul(&GroupElement::Cyclic(1), &GroupElement::Cyclic(1)), GroupElement::Cyclic(0));
        let u1 = GaugeGroup::circle();
        let g = u1.mul(&GroupElement::Angle(3.0), &GroupElement::Angle(1.0));
        assert!((u1.distance(&g, &GroupElement::Angle(4.0 - 2.0 * PI))) < 1e-15);
    }

    #[test]
    fn so3_inverse_and_rodrigues() {
        let g = GaugeGroup::so(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = g.random_element(&mut rng);
        assert!(g.distance_to_identity(&g.mul(&r, &g.inverse(&r))) < 1e-13);
        let rz = g.exp_coords(&[-PI / 2.0, 0.0, 0.0]).unwrap();
        // upper-triangular (0,1) entry −π/2 is the generator π/2·L_z
        let expected = plane_rotation(3, PI / 2.0);
        assert!(g.distance(&rz, &GroupElement::Matrix(expected)) < 1e-14);
    }

    #[test]
    fn log_exp_round_trip_so4_and_su2() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in [GaugeGroup::so(4), GaugeGroup::su2(), GaugeGroup::so(2), GaugeGroup::circle()] {
            for _ in 0..50 {
                let x = g.random_near_identity(&mut rng, 0.4);
                let a = g.log_map(&x).unwrap();
                let y = g.exp_map(&a).unwrap();
                assert!(g.distance(&x, &y) < 1e-11, "{:?}", g.kind);
            }
        }
    }

    #[test]
    fn branch_cut_is_reported() {
        let g = GaugeGroup::so(3);
        let r = GroupElement::Matrix(plane_rotation(3, PI));
        assert!(matches!(g.log_map(&r), Err(Error::Singular(_))));
    }

    #[test]
    fn su2_adjoint_is_rotation() {
        let g = GaugeGroup::new(GroupKind::SpecialUnitary2, Some(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = g.random_element(&mut rng);
        let r = g.rep_matrix(&u);
        assert!((r.transpose() * &r - DMatrix::identity(3, 3)).norm() < 1e-12);
        assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_number(&[0.3; 5], true).unwrap(), 0);
        let one: Vec<f64> = (0..8).map(|k| k as f64 * PI / 4.0).collect();
        assert_eq!(winding_number(&one, true).unwrap(), 1);
        let two: Vec<f64> = (0..16).map(|k| k as f64 * PI / 4.0).collect();
        assert_eq!(winding_number(&two, true).unwrap(), 2);
        assert!(winding_number(&[0.0, PI], true).is_err());
    }

    #[test]
    fn so3_lift_examples() {
        let lp: Vec<DMatrix<f64>> = (0..8).map(|k| plane_rotation(3, k as f64 * PI / 4.0)).collect();
        assert!(so3_loop_class(&lp, true).unwrap());
        let twice: Vec<DMatrix<f64>> = lp.iter().chain(lp.iter()).cloned().collect();
        assert!(!so3_loop_class(&twice, true).unwrap());
        assert!(!so3_loop_class(&vec![DMatrix::identity(3, 3); 4], true).unwrap());
    }

    #[test]
    fn homotopy_table_and_beta() {
        let so3 = GaugeGroup::so(3);
        assert_eq!(so3.homotopy_group(1).unwrap(), AbelianGroup::cyclic(2));
        assert_eq!(so3.homotopy_group(3).unwrap(), AbelianGroup::integers());
        assert!(GaugeGroup::so(5).homotopy_group(3).is_err());
        let c = so3.class(1, &[1]).unwrap();
        let b = so3.beta(1, &c).unwrap();
        assert!(so3.distance(&b, &GroupElement::Matrix(plane_rotation(3, PI))) < 1e-15);
        let u1 = GaugeGroup::circle();
        let zero = u1.class(1, &[0]).unwrap();
        assert!(u1.is_identity(&u1.beta(1, &zero).unwrap()));
        assert_eq!(GaugeGroup::cyclic(4).homotopy_group(0).unwrap(), AbelianGroup::cyclic(4));
    }

    #[test]
    fn spec_json_round_trip() {
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"so","n":3,"rep_dim":3}"#).unwrap();
        let g = GaugeGroup::from_spec(&s).unwrap();
        assert_eq!(g.kind, GroupKind::SpecialOrthogonal(3));
        assert_eq!(serde_json::to_value(g.to_spec()).unwrap(), serde_json::json!({"kind":"so","n":3,"rep_dim":3}));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [GaugeGroup::so(3), GaugeGroup::su2(), GaugeGroup::circle(), GaugeGroup::cyclic(5)] {
            let x = g.random_element(&mut rng);
            let back = g.element_from_json(&g.element_to_json(&x)).unwrap();
            assert!(g.distance(&x, &back) < 1e-15);
        }
    }
}
