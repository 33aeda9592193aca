//! Gauge dynamics: material fields, action functionals, connection
//! optimizers, time evolution, Wilson-line superpositions, the
//! gauge-fitness network model, the Z₂ spin example and
//! curvature-triggered obstruction changes.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::PrincipalBundle;
use crate::complex::SimplicialComplex;
use crate::connection::{curvature, scalar_curvature, transport_home, Connection};
use crate::error::{input, Error, Result};
use crate::forms::GForm;
use crate::group::{GaugeGroup, GroupElement, GroupKind};

/// Gaussian distribution given by mean and covariance (the inverse metric g⁻¹).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(default)]
    pub mean: Option<Vec<f64>>,
    pub covariance: Vec<Vec<f64>>,
}

impl DistributionSpec {
    pub fn standard(n: usize) -> Self {
        DistributionSpec {
            mean: None,
            covariance: (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
        }
    }
}

/// Validated Gaussian with cached Cholesky factor and precision matrix.
#[derive(Clone, Debug)]
pub struct Gaussian {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub precision: DMatrix<f64>,
    chol_l: DMatrix<f64>,
    norm: f64,
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return input("covariance must be a non-empty square matrix");
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn pd_parts(cov: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = cov.nrows();
    let scale = cov.amax().max(1.0);
    for i in 0..n {
        for j in 0..n {
            if !cov[(i, j)].is_finite() || (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * scale {
                return input("covariance must be symmetric and finite");
            }
        }
    }
    let ch = nalgebra::Cholesky::new(cov.clone()).ok_or_else(|| Error::Input("covariance is not positive definite".into()))?;
    let l = ch.l();
    if (0..n).any(|i| l[(i, i)] <= 0.0) {
        return input("covariance is not positive definite");
    }
    Ok((l, ch.inverse()))
}

impl Gaussian {
    pub fn from_spec(spec: &DistributionSpec) -> Result<Self> {
        let cov = matrix_from_rows(&spec.covariance)?;
        let n = cov.nrows();
        let mean = match &spec.mean {
            Some(m) if m.len() != n => return Err(Error::Dimension { expected: n, got: m.len() }),
            Some(m) => DVector::from_column_slice(m),
            None => DVector::zeros(n),
        };
        let (l, precision) = pd_parts(&cov)?;
        let det: f64 = (0..n).map(|i| l[(i, i)] * l[(i, i)]).product();
        let norm = ((2.0 * std::f64::consts::PI).powi(n as i32) * det).sqrt().recip();
        Ok(Gaussian { mean, covariance: cov, precision, chol_l: l, norm })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let d = DVector::from_column_slice(x) - &self.mean;
        let q = (d.transpose() * &self.precision * &d)[(0, 0)];
        self.norm * (-0.5 * q).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        (&self.mean + &self.chol_l * z).iter().copied().collect()
    }

    pub fn mahalanobis(&self, v: &[f64], w: &[f64]) -> f64 {
        let d = DVector::from_column_slice(v) - DVector::from_column_slice(w);
        (d.transpose() * &self.precision * &d)[(0, 0)].max(0.0).sqrt()
    }
}

/// sqrt((v−w)ᵀ Σ⁻¹ (v−w)).
pub fn mahalanobis(v: &[f64], w: &[f64], covariance: &[Vec<f64>]) -> Result<f64> {
    let cov = matrix_from_rows(covariance)?;
    if v.len() != cov.nrows() || w.len() != cov.nrows() {
        return Err(Error::Dimension { expected: cov.nrows(), got: v.len().max(w.len()) });
    }
    let (_, prec) = pd_parts(&cov)?;
    let d = DVector::from_column_slice(v) - DVector::from_column_slice(w);
    Ok((d.transpose() * prec * &d)[(0, 0)].max(0.0).sqrt())
}

/// Internal-state vector per vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialField {
    pub values: BTreeMap<usize, Vec<f64>>,
}

impl MaterialField {
    pub fn get(&self, v: usize) -> Result<&Vec<f64>> {
        self.values.get(&v).ok_or_else(|| Error::Input(format!("field undefined at vertex {}", v)))
    }

    pub fn constant(c: &SimplicialComplex, v: Vec<f64>) -> Self {
        MaterialField { values: c.vertices().iter().map(|x| (*x, v.clone())).collect() }
    }

    fn check(&self, c: &SimplicialComplex, dim: usize) -> Result<()> {
        for v in c.vertices() {
            let x = self.get(*v)?;
            if x.len() != dim {
                return Err(Error::Dimension { expected: dim, got: x.len() });
            }
        }
        Ok(())
    }

    /// Φ(X)·v(X).
    pub fn gauge_transform(&self, group: &GaugeGroup, phi: &GForm) -> Self {
        MaterialField {
            values: self.values.iter().map(|(x, v)| (*x, group.act(&phi.get_reference(&[*x]), v))).collect(),
        }
    }
}

/// Independent Gaussian draw per vertex.
pub fn sample_field(dist: &DistributionSpec, c: &SimplicialComplex, seed: u64) -> Result<MaterialField> {
    let g = Gaussian::from_spec(dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(MaterialField { values: c.vertices().iter().map(|v| (*v, g.sample(&mut rng))).collect() })
}

/// (vertex, triangle) incidences in deterministic order.
fn incidences(c: &SimplicialComplex) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for t in c.simplices(2) {
        for &x in t {
            out.push((x, t.clone()));
        }
    }
    out
}

fn sum_over_incidences<F>(conn: &Connection, f: F) -> Result<f64>
where
    F: Fn(usize, &GroupElement) -> Result<f64> + Sync,
{
    let inc = incidences(conn.complex());
    let eval = |(x, t): &(usize, Vec<usize>)| -> Result<f64> { f(*x, &curvature(conn, t, *x)?) };
    let terms: Vec<Result<f64>> = if inc.len() >= 256 {
        inc.par_iter().map(eval).collect()
    } else {
        inc.iter().map(eval).collect()
    };
    let mut s = 0.0;
    for t in terms {
        s += t?;
    }
    Ok(s)
}

/// Σ over (X, incident triangle) of d_Maha(v(X), R|_X v(X)).
pub fn static_action(conn: &Connection, field: &MaterialField, dist: &Gaussian) -> Result<f64> {
    let g = conn.group();
    field.check(conn.complex(), g.rep_dim)?;
    if dist.dim() != g.rep_dim {
        return Err(Error::Dimension { expected: g.rep_dim, got: dist.dim() });
    }
    sum_over_incidences(conn, |x, r| {
        let v = field.get(x)?;
        Ok(dist.mahalanobis(v, &g.act(r, v)))
    })
}

/// Σ over (X, incident triangle) of f(R|_X v(X)).
pub fn probability_action(conn: &Connection, field: &MaterialField, dist: &Gaussian) -> Result<f64> {
    let g = conn.group();
    field.check(conn.complex(), g.rep_dim)?;
    if dist.dim() != g.rep_dim {
        return Err(Error::Dimension { expected: g.rep_dim, got: dist.dim() });
    }
    sum_over_incidences(conn, |x, r| Ok(dist.density(&g.act(r, field.get(x)?))))
}

/// Objective minimized by the optimizers.
#[derive(Clone, Debug)]
pub enum Functional {
    /// static_action
    Static(Gaussian),
    /// −probability_action
    Probability(Gaussian),
}

impl Functional {
    pub fn objective(&self, conn: &Connection, field: &MaterialField) -> Result<f64> {
        match self {
            Functional::Static(d) => static_action(conn, field, d),
            Functional::Probability(d) => Ok(-probability_action(conn, field, d)?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMethod {
    CoordinateDescent,
    SimulatedAnnealing,
    FiniteDifferenceGradient,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub method: OptimizerMethod,
    pub max_iters: usize,
    /// Initial step (coordinate descent, gradient) or proposal scale (annealing).
    pub step: f64,
    /// Stop when the step falls below this, or the objective below it.
    pub tolerance: f64,
    pub t0: f64,
    pub cooling: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: OptimizerMethod::CoordinateDescent,
            max_iters: 500,
            step: 0.5,
            tolerance: 1e-9,
            t0: 1.0,
            cooling: 0.98,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub connection: Connection,
    pub objective: f64,
    /// Objective after each iteration, starting with the initial value.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct Problem<'a> {
    functional: &'a Functional,
    field: &'a MaterialField,
    bundle: &'a PrincipalBundle,
    edges: Vec<(usize, usize)>,
}

impl Problem<'_> {
    fn build(&self, vals: &[GroupElement]) -> Result<Connection> {
        let m = self.edges.iter().cloned().zip(vals.iter().cloned()).collect();
        Connection::from_home_values(self.bundle, &m)
    }
    fn eval(&self, vals: &[GroupElement]) -> Result<f64> {
        self.functional.objective(&self.build(vals)?, self.field)
    }
}

fn discrete_elements(g: &GaugeGroup) -> Option<Vec<GroupElement>> {
    match g.kind {
        GroupKind::Cyclic(m) => Some((0..m).map(GroupElement::Cyclic).collect()),
        GroupKind::Orthogonal(1) => Some(vec![g.identity(), GroupElement::Matrix(DMatrix::from_element(1, 1, -1.0))]),
        GroupKind::SpecialOrthogonal(1) => Some(vec![g.identity()]),
        _ => None,
    }
}

/// Minimize the functional over connections, starting from `init`'s home values.
pub fn optimize_connection(functional: &Functional, field: &MaterialField, init: &Connection, cfg: &OptimizerConfig) -> Result<OptimizeResult> {
    if cfg.max_iters == 0 || cfg.tolerance <= 0.0 || cfg.step <= 0.0 {
        return input("optimizer needs positive iteration cap, step and tolerance");
    }
    let home = init.home_values();
    let p = Problem { functional, field, bundle: &init.bundle, edges: home.keys().cloned().collect() };
    let vals: Vec<GroupElement> = home.into_values().collect();
    let g = init.group();
    let discrete = discrete_elements(g);
    let (vals, trace, converged) = match (cfg.method, &discrete) {
        (OptimizerMethod::CoordinateDescent, Some(els)) => discrete_descent(&p, vals, els, cfg)?,
        (OptimizerMethod::CoordinateDescent, None) => coordinate_descent(&p, g, vals, cfg)?,
        (OptimizerMethod::SimulatedAnnealing, _) => annealing(&p, g, vals, discrete.as_deref(), cfg)?,
        (OptimizerMethod::FiniteDifferenceGradient, None) => gradient_descent(&p, g, vals, cfg)?,
        (OptimizerMethod::FiniteDifferenceGradient, Some(_)) => {
            return Err(Error::Unsupported("gradients on a discrete group".into()));
        }
    };
    let connection = p.build(&vals)?;
    let objective = *trace.last().expect("trace has the initial value");
    Ok(OptimizeResult { connection, objective, iterations: trace.len() - 1, trace, converged })
}

fn discrete_descent(p: &Problem, mut vals: Vec<GroupElement>, els: &[GroupElement], cfg: &OptimizerConfig) -> Result<(Vec<GroupElement>, Vec<f64>, bool)> {
    let mut best = p.eval(&vals)?;
    let mut trace = vec![best];
    for _ in 0..cfg.max_iters {
        let mut improved = false;
        for e in 0..vals.len() {
            let keep = vals[e].clone();
            for cand in els {
                vals[e] = cand.clone();
                let f = p.eval(&vals)?;
                if f < best - 1e-15 {
                    best = f;
                    improved = true;
                } else {
                    vals[e] = keep.clone();
                }
                if vals[e] != keep {
                    break;
                }
            }
        }
        trace.push(best);
        if !improved {
            return Ok((vals, trace, true));
        }
    }
    Ok((vals, trace, false))
}

fn coordinate_descent(p: &Problem, g: &GaugeGroup, mut vals: Vec<GroupElement>, cfg: &OptimizerConfig) -> Result<(Vec<GroupElement>, Vec<f64>, bool)> {
    let dim = g.algebra_dim();
    let mut best = p.eval(&vals)?;
    let mut trace = vec![best];
    let mut h = cfg.step;
    for _ in 0..cfg.max_iters {
        if best < cfg.tolerance || h < cfg.tolerance {
            return Ok((vals, trace, true));
        }
        let mut improved = false;
        for e in 0..vals.len() {
            for a in 0..dim {
                for sign in [1.0, -1.0] {
                    let mut c = vec![0.0; dim];
                    c[a] = sign * h;
                    let cand = g.reproject(&g.mul(&g.exp_coords(&c)?, &vals[e]));
                    let keep = std::mem::replace(&mut vals[e], cand);
                    let f = p.eval(&vals)?;
                    if f < best {
                        best = f;
                        improved = true;
                        break;
                    }
                    vals[e] = keep;
                }
            }
        }
        trace.push(best);
        if !improved {
            h *= 0.5;
        }
    }
    Ok((vals, trace, best < cfg.tolerance || h < cfg.tolerance))
}

fn gradient_descent(p: &Problem, g: &GaugeGroup, mut vals: Vec<GroupElement>, cfg: &OptimizerConfig) -> Result<(Vec<GroupElement>, Vec<f64>, bool)> {
    let dim = g.algebra_dim();
    let eps = 1e-6;
    let mut best = p.eval(&vals)?;
    let mut trace = vec![best];
    let mut step = cfg.step;
    let moved = |vals: &[GroupElement], dir: &[Vec<f64>], t: f64| -> Result<Vec<GroupElement>> {
        vals.iter()
            .zip(dir)
            .map(|(v, d)| {
                let c: Vec<f64> = d.iter().map(|x| -t * x).collect();
                Ok(g.reproject(&g.mul(&g.exp_coords(&c)?, v)))
            })
            .collect()
    };
    for _ in 0..cfg.max_iters {
        let mut grad = vec![vec![0.0; dim]; vals.len()];
        for e in 0..vals.len() {
            for a in 0..dim {
                let mut c = vec![0.0; dim];
                c[a] = eps;
                let keep = vals[e].clone();
                vals[e] = g.mul(&g.exp_coords(&c)?, &keep);
                let fp = p.eval(&vals)?;
                c[a] = -eps;
                vals[e] = g.mul(&g.exp_coords(&c)?, &keep);
                let fm = p.eval(&vals)?;
                vals[e] = keep;
                grad[e][a] = (fp - fm) / (2.0 * eps);
            }
        }
        let norm: f64 = grad.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        if norm < cfg.tolerance || best < cfg.tolerance {
            return Ok((vals, trace, true));
        }
        let mut accepted = false;
        while step > cfg.tolerance {
            let cand = moved(&vals, &grad, step / norm.max(1.0))?;
            let f = p.eval(&cand)?;
            if f < best {
                vals = cand;
                best = f;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        trace.push(best);
        if !accepted {
            return Ok((vals, trace, true));
        }
    }
    Ok((vals, trace, false))
}

fn annealing(p: &Problem, g: &GaugeGroup, vals: Vec<GroupElement>, els: Option<&[GroupElement]>, cfg: &OptimizerConfig) -> Result<(Vec<GroupElement>, Vec<f64>, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cur = vals;
    let mut f_cur = p.eval(&cur)?;
    let mut best = (cur.clone(), f_cur);
    let mut trace = vec![f_cur];
    let mut t = cfg.t0;
    if cur.is_empty() {
        return Ok((cur, trace, true));
    }
    for _ in 0..cfg.max_iters {
        for _ in 0..cur.len() {
            let e = rng.random_range(0..cur.len());
            let cand = match els {
                Some(list) => list[rng.random_range(0..list.len())].clone(),
                None => g.reproject(&g.mul(&g.random_near_identity(&mut rng, cfg.step), &cur[e])),
            };
            let keep = std::mem::replace(&mut cur[e], cand);
            let f = p.eval(&cur)?;
            let accept = f <= f_cur || rng.random::<f64>() < ((f_cur - f) / t.max(1e-300)).exp();
            if accept {
                f_cur = f;
                if f < best.1 {
                    best = (cur.clone(), f);
                }
            } else {
                cur[e] = keep;
            }
        }
        trace.push(best.1);
        t *= cfg.cooling;
        if best.1 < cfg.tolerance {
            return Ok((best.0, trace, true));
        }
    }
    Ok((best.0, trace, t < cfg.tolerance))
}

/// Exhaustive minimum over all connections of a finite group (≤ 2²⁰ configurations).
pub fn brute_force_connection(functional: &Functional, field: &MaterialField, bundle: &PrincipalBundle) -> Result<(Connection, f64)> {
    let els = discrete_elements(&bundle.group).ok_or_else(|| Error::Unsupported("exhaustive search needs a finite group".into()))?;
    let edges: Vec<(usize, usize)> = bundle.complex.simplices(1).iter().map(|e| (e[0], e[1])).collect();
    let total = (els.len() as f64).powi(edges.len() as i32);
    if total > (1u64 << 20) as f64 {
        return input(format!("{} configurations exceed the exhaustive limit", total));
    }
    let p = Problem { functional, field, bundle, edges };
    let mut idx = vec![0usize; p.edges.len()];
    let mut best: Option<(Vec<GroupElement>, f64)> = None;
    loop {
        let vals: Vec<GroupElement> = idx.iter().map(|i| els[*i].clone()).collect();
        let f = p.eval(&vals)?;
        if best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((vals, f));
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                let (v, f) = best.expect("at least one configuration");
                return Ok((p.build(&v)?, f));
            }
            idx[k] += 1;
            if idx[k] < els.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveConfig {
    /// Standard deviation of the Gaussian proposal per coordinate.
    pub scale: f64,
    /// Draw each v(X) afresh from the distribution instead of a Metropolis step.
    pub resample: bool,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { scale: 0.1, resample: false, optimizer: OptimizerConfig::default(), seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveStep {
    pub step: usize,
    pub probability_action: f64,
    pub accepted: usize,
    pub field: MaterialField,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub steps: Vec<EvolveStep>,
    pub connection: Connection,
}

/// Vertex weight for the Metropolis step: f(v) plus the probability
/// action restricted to triangles at X.
fn vertex_weight(conn: &Connection, dist: &Gaussian, x: usize, v: &[f64], tris: &[Vec<usize>]) -> Result<f64> {
    let g = conn.group();
    let mut w = dist.density(v);
    for t in tris {
        w += dist.density(&g.act(&curvature(conn, t, x)?, v));
    }
    Ok(w)
}

/// Alternate connection re-optimization (probability action) with one
/// stochastic update of every vertex state.
pub fn evolve(field: &MaterialField, conn: &Connection, dist: &Gaussian, steps: usize, cfg: &EvolveConfig) -> Result<Trajectory> {
    if steps == 0 {
        return input("evolve needs at least one step");
    }
    if cfg.scale < 0.0 {
        return input("perturbation scale must be non-negative");
    }
    let functional = Functional::Probability(dist.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut field = field.clone();
    let mut conn = conn.clone();
    let mut out = Vec::with_capacity(steps);
    let cx = conn.complex().clone();
    for step in 0..steps {
        let mut ocfg = cfg.optimizer.clone();
        ocfg.seed = cfg.optimizer.seed.wrapping_add(step as u64);
        conn = optimize_connection(&functional, &field, &conn, &ocfg)?.connection;
        let mut accepted = 0;
        for &x in cx.vertices() {
            let cur = field.get(x)?.clone();
            if cfg.resample {
                field.values.insert(x, dist.sample(&mut rng));
                accepted += 1;
                continue;
            }
            let prop: Vec<f64> = cur.iter().map(|c| c + cfg.scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let tris: Vec<Vec<usize>> = cx.cofaces(&[x]).into_iter().filter(|s| s.len() == 3).collect();
            let w0 = vertex_weight(&conn, dist, x, &cur, &tris)?;
            let w1 = vertex_weight(&conn, dist, x, &prop, &tris)?;
            let u: f64 = rng.random();
            if w0 <= 0.0 || u < w1 / w0 {
                field.values.insert(x, prop);
                accepted += 1;
            }
        }
        let pa = probability_action(&conn, &field, dist)?;
        out.push(EvolveStep { step, probability_action: pa, accepted, field: field.clone() });
    }
    Ok(Trajectory { steps: out, connection: conn })
}

/// Simple paths from x to y with at most `max_len` edges, in DFS order
/// with ascending neighbours. x == y gives the empty path only.
pub fn enumerate_paths(c: &SimplicialComplex, x: usize, y: usize, max_len: usize) -> Result<Vec<Vec<usize>>> {
    if !c.contains(&[x]) || !c.contains(&[y]) {
        return input("path endpoints must be vertices of the complex");
    }
    if x == y {
        return Ok(vec![vec![x]]);
    }
    let adj = c.adjacency();
    let mut out = Vec::new();
    let mut path = vec![x];
    fn dfs(adj: &BTreeMap<usize, Vec<usize>>, y: usize, max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if path.len() > max_len {
            return;
        }
        let last = *path.last().expect("non-empty");
        for &n in adj.get(&last).map(|v| v.as_slice()).unwrap_or(&[]) {
            if path.contains(&n) {
                continue;
            }
            path.push(n);
            if n == y {
                out.push(path.clone());
            } else {
                dfs(adj, y, max_len, path, out);
            }
            path.pop();
        }
    }
    dfs(&adj, y, max_len, &mut path, &mut out);
    Ok(out)
}

/// Path family: simple paths of at most `max_len` edges, weight base^(−|γ|),
/// and an optional density floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathFamily {
    pub max_len: usize,
    pub base: f64,
    pub p_min: Option<f64>,
}

impl Default for PathFamily {
    fn default() -> Self {
        PathFamily { max_len: 3, base: 2.0, p_min: None }
    }
}

/// w = Σ a(γ) f(𝒫_γ v₂) 𝒫_γ v₂ / Σ a(γ) f(𝒫_γ v₂) over paths from X₂ to X₁.
pub fn wilson_superposition(conn: &Connection, field: &MaterialField, x1: usize, x2: usize, family: &PathFamily, dist: &Gaussian) -> Result<Vec<f64>> {
    if family.base <= 1.0 {
        return input("path weight base must exceed 1");
    }
    let g = conn.group();
    let v2 = field.get(x2)?;
    let mut num = vec![0.0; v2.len()];
    let mut den = 0.0;
    for path in enumerate_paths(conn.complex(), x2, x1, family.max_len)? {
        let pv = g.act(&transport_home(conn, &path)?, v2);
        let f = dist.density(&pv);
        if family.p_min.is_some_and(|m| f < m) {
            continue;
        }
        let w = family.base.powi(-((path.len() - 1) as i32)) * f;
        den += w;
        for (n, x) in num.iter_mut().zip(&pv) {
            *n += w * x;
        }
    }
    if den <= 0.0 {
        return Err(Error::NoPath);
    }
    Ok(num.into_iter().map(|x| x / den).collect())
}

/// Shape function K(v, w) = (1 + cos∠(v, w))/2.
pub fn shape_function(v: &[f64], w: &[f64]) -> Result<f64> {
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nv == 0.0 || nw == 0.0 {
        return Err(Error::Singular("angle with a zero vector is undefined".into()));
    }
    let c = v.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / (nv * nw);
    Ok((1.0 + c.clamp(-1.0, 1.0)) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub family: PathFamily,
    pub distribution: DistributionSpec,
}

/// P(X₁, X₂) = K(v₁, w) with w the Wilson superposition from X₂.
pub fn link_probability(conn: &Connection, field: &MaterialField, dist: &Gaussian, family: &PathFamily, x1: usize, x2: usize) -> Result<f64> {
    let w = wilson_superposition(conn, field, x1, x2, family, dist)?;
    shape_function(field.get(x1)?, &w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkLink {
    pub src: usize,
    pub dst: usize,
    pub probability: f64,
    pub sampled: bool,
}

/// Every ordered pair of distinct vertices; pairs without an admissible
/// path get probability 0.
pub fn generate_network(conn: &Connection, field: &MaterialField, model: &NetworkModel, seed: u64) -> Result<Vec<NetworkLink>> {
    let dist = Gaussian::from_spec(&model.distribution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verts = conn.complex().vertices().to_vec();
    let mut out = Vec::new();
    for &s in &verts {
        for &d in &verts {
            if s == d {
                continue;
            }
            let p = match link_probability(conn, field, &dist, &model.family, s, d) {
                Ok(p) => p,
                Err(Error::NoPath) => 0.0,
                Err(e) => return Err(e),
            };
            let u: f64 = rng.random();
            out.push(NetworkLink { src: s, dst: d, probability: p, sampled: u < p });
        }
    }
    Ok(out)
}

pub fn write_network_csv<W: std::io::Write>(links: &[NetworkLink], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for l in links {
        wr.serialize(l)?;
    }
    wr.flush()?;
    Ok(())
}

/// ±1 couplings per sorted edge.
pub type Couplings = BTreeMap<(usize, usize), i8>;

fn z2_value(s: i8) -> Result<GroupElement> {
    match s {
        1 => Ok(GroupElement::Cyclic(0)),
        -1 => Ok(GroupElement::Cyclic(1)),
        _ => input(format!("spin or coupling {} is not ±1", s)),
    }
}

fn check_z2(bundle: &PrincipalBundle) -> Result<()> {
    if bundle.group.kind != GroupKind::Cyclic(2) {
        return input("the spin model needs the group Z₂");
    }
    Ok(())
}

fn coupling(c: &Couplings, x: usize, y: usize) -> Result<i8> {
    c.get(&(x.min(y), x.max(y))).copied().ok_or_else(|| Error::Input(format!("no coupling on ({}, {})", x, y)))
}

/// Z₂ connection with φ(XY) = J_XY.
pub fn ising_couplings_connection(bundle: &PrincipalBundle, couplings: &Couplings) -> Result<Connection> {
    check_z2(bundle)?;
    let mut vals = BTreeMap::new();
    for e in bundle.complex.simplices(1) {
        vals.insert((e[0], e[1]), z2_value(coupling(couplings, e[0], e[1])?)?);
    }
    Connection::from_home_values(bundle, &vals)
}

/// Z₂ connection with φ(XY) = s_X s_Y.
pub fn spin_connection(bundle: &PrincipalBundle, spins: &BTreeMap<usize, i8>) -> Result<Connection> {
    check_z2(bundle)?;
    let mut vals = BTreeMap::new();
    for e in bundle.complex.simplices(1) {
        let s = |v: usize| spins.get(&v).copied().ok_or_else(|| Error::Input(format!("no spin at {}", v)));
        vals.insert((e[0], e[1]), z2_value(s(e[0])? * s(e[1])?)?);
    }
    Connection::from_home_values(bundle, &vals)
}

/// Triangles whose holonomy is −1.
pub fn frustrated_plaquettes(conn: &Connection) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for t in conn.complex().simplices(2) {
        if !conn.group().is_identity(&curvature(conn, t, t[0])?) {
            out.push(t.clone());
        }
    }
    Ok(out)
}

/// E = −Σ J_XY s_X s_Y.
pub fn ising_energy(c: &SimplicialComplex, couplings: &Couplings, spins: &[i8]) -> Result<i64> {
    let idx: BTreeMap<usize, usize> = c.vertices().iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut e = 0i64;
    for edge in c.simplices(1) {
        let j = coupling(couplings, edge[0], edge[1])? as i64;
        e -= j * spins[idx[&edge[0]]] as i64 * spins[idx[&edge[1]]] as i64;
    }
    Ok(e)
}

/// Exhaustive ground-state energy and degeneracy (at most 20 spins).
pub fn ground_states(c: &SimplicialComplex, couplings: &Couplings) -> Result<(i64, usize)> {
    let n = c.vertex_count();
    if n > 20 {
        return input(format!("{} spins exceed the exhaustive limit of 20", n));
    }
    let mut best = i64::MAX;
    let mut count = 0;
    let mut spins = vec![1i8; n];
    for mask in 0u32..(1u32 << n) {
        for (i, s) in spins.iter_mut().enumerate() {
            *s = if mask >> i & 1 == 1 { -1 } else { 1 };
        }
        let e = ising_energy(c, couplings, &spins)?;
        match e.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = e;
                count = 1;
            }
            std::cmp::Ordering::Equal => count += 1,
            std::cmp::Ordering::Greater => {}
        }
    }
    Ok((best, count))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpinAnnealConfig {
    pub sweeps: usize,
    pub t0: f64,
    pub t1: f64,
}

impl Default for SpinAnnealConfig {
    fn default() -> Self {
        SpinAnnealConfig { sweeps: 400, t0: 3.0, t1: 0.05 }
    }
}

/// Single-spin-flip Metropolis annealing with a geometric temperature
/// schedule; returns the best energy seen and its spins (in vertex order).
pub fn anneal_spins(c: &SimplicialComplex, couplings: &Couplings, cfg: &SpinAnnealConfig, seed: u64) -> Result<(i64, Vec<i8>)> {
    let verts = c.vertices().to_vec();
    let n = verts.len();
    let idx: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut nbrs: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    for e in c.simplices(1) {
        let j = coupling(couplings, e[0], e[1])? as i64;
        let (a, b) = (idx[&e[0]], idx[&e[1]]);
        nbrs[a].push((b, j));
        nbrs[b].push((a, j));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    let mut e = ising_energy(c, couplings, &s)?;
    let mut best = (e, s.clone());
    let sweeps = cfg.sweeps.max(1);
    let ratio = if sweeps > 1 { (cfg.t1 / cfg.t0).powf(1.0 / (sweeps - 1) as f64) } else { 1.0 };
    let mut t = cfg.t0;
    for _ in 0..sweeps {
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let local: i64 = nbrs[i].iter().map(|(k, j)| j * s[*k] as i64).sum();
            let de = 2 * s[i] as i64 * local;
            if de <= 0 || rng.random::<f64>() < (-(de as f64) / t).exp() {
                s[i] = -s[i];
                e += de;
                if e < best.0 {
                    best = (e, s.clone());
                }
            }
        }
        t *= ratio;
    }
    Ok(best)
}

/// Curvature-triggered change of structural data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionTrigger {
    /// Fires when |ℛ − tr Id| > threshold.
    pub threshold: f64,
    pub dim: usize,
    pub probability: f64,
    /// Candidate class coefficients; ranked with the identity by Tr β_n(c), highest first.
    pub classes: Vec<i64>,
}

/// For each triangle whose scalar curvature deviates from the flat value by
/// more than the threshold, with the given probability, raise the class of
/// every matching slot on its faces to the next one in the trace ranking.
pub fn apply_obstruction_trigger(bundle: &PrincipalBundle, conn: &Connection, trigger: &ObstructionTrigger, seed: u64) -> Result<PrincipalBundle> {
    if !(0.0..=1.0).contains(&trigger.probability) {
        return input("trigger probability must lie in [0, 1]");
    }
    let g = &bundle.group;
    let table = g.homotopy_group(trigger.dim)?;
    if trigger.dim == 0 || table.is_trivial() {
        return Err(Error::Unsupported(format!("no obstruction classes in dimension {}", trigger.dim)));
    }
    let mut ranking: Vec<(f64, i64)> = Vec::new();
    for c in std::iter::once(0).chain(trigger.classes.iter().copied()) {
        let cls = g.class(trigger.dim, &[c])?;
        let key = cls.coeffs[0];
        if ranking.iter().any(|(_, k)| *k == key) {
            continue;
        }
        ranking.push((g.trace(&g.beta(trigger.dim, &cls)?), key));
    }
    ranking.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let flat = g.rep_dim as f64;
    let slots = bundle.list_assignable_slots();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = bundle.clone();
    for t in bundle.complex.simplices(2) {
        let r = scalar_curvature(conn, t, t[0])?;
        if (r - flat).abs() <= trigger.threshold {
            continue;
        }
        if rng.random::<f64>() >= trigger.probability {
            continue;
        }
        for ((i, j), face, n) in &slots {
            if *n != trigger.dim || !face.iter().all(|v| t.contains(v)) {
                continue;
            }
            let cur = out.class(*i, *j, face)?.coeffs[0];
            let pos = ranking.iter().position(|(_, k)| *k == cur);
            let next = match pos {
                Some(p) if p + 1 < ranking.len() => ranking[p + 1].1,
                Some(_) => cur,
                None => ranking.first().map(|r| r.1).unwrap_or(cur),
            };
            out = out.with_class(*i, *j, face, g.class(trigger.dim, &[next])?)?;
        }
    }
    Ok(out)
}
