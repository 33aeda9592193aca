//! Moments, reduced moments (cumulants), Gaussian identities, invariant
//! degrees of compact simple groups, covariance stabilizers and
//! symmetrized trace tensors.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::Num;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::group::C64;

/// Highest supported order for moments and cumulants.
pub const MAX_ORDER: usize = 4;

/// Moments (or reduced moments) keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable<T> {
    pub dim: usize,
    pub max_order: usize,
    pub entries: BTreeMap<Vec<u32>, T>,
}

impl<T: Clone> MomentTable<T> {
    pub fn get(&self, idx: &[u32]) -> Option<&T> {
        self.entries.get(idx)
    }

    /// Entry for the product x_{a₀}⋯x_{a_{k−1}} given as variable indices.
    pub fn get_vars(&self, vars: &[usize]) -> Option<&T> {
        self.entries.get(&exponents(self.dim, vars))
    }
}

impl MomentTable<f64> {
    /// JSON object keyed by comma-separated exponent vectors.
    pub fn to_json(&self) -> serde_json::Value {
        let m: BTreeMap<String, f64> = self
            .entries
            .iter()
            .map(|(k, v)| (k.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","), *v))
            .collect();
        serde_json::json!({"dim": self.dim, "max_order": self.max_order, "entries": m})
    }
}

pub fn exponents(dim: usize, vars: &[usize]) -> Vec<u32> {
    let mut e = vec![0u32; dim];
    for v in vars {
        e[*v] += 1;
    }
    e
}

fn variables(exps: &[u32]) -> Vec<usize> {
    exps.iter().enumerate().flat_map(|(i, e)| std::iter::repeat_n(i, *e as usize)).collect()
}

/// All exponent vectors of total degree ≤ max_order, in lexicographic order.
pub fn multi_indices(dim: usize, max_order: usize) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e as u32);
            rec(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, max_order, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Empirical moments ⟨x^I⟩ for all |I| ≤ max_order.
pub fn raw_moments(samples: &[Vec<f64>], max_order: usize) -> Result<MomentTable<f64>> {
    if samples.is_empty() {
        return input("no samples");
    }
    if max_order > MAX_ORDER {
        return input(format!("moment order {} exceeds {}", max_order, MAX_ORDER));
    }
    let dim = samples[0].len();
    if dim == 0 || samples.iter().any(|s| s.len() != dim) {
        return input("samples must be non-empty vectors of equal length");
    }
    let n = samples.len() as f64;
    let entries = multi_indices(dim, max_order)
        .into_par_iter()
        .map(|idx| {
            let vals: Vec<f64> = samples
                .iter()
                .map(|s| s.iter().zip(&idx).map(|(x, e)| x.powi(*e as i32)).product())
                .collect();
            let m = pairwise_sum(&vals) / n;
            (idx, m)
        })
        .collect();
    Ok(MomentTable { dim, max_order, entries })
}

/// Set partitions of {0, …, n−1}.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for i in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for b in 0..p.len() {
                let mut q = p.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = p.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

fn small_int<T: Num + Clone>(k: i64) -> T {
    let mut x = T::zero();
    for _ in 0..k.abs() {
        x = x + T::one();
    }
    if k < 0 {
        T::zero() - x
    } else {
        x
    }
}

/// Reduced moments from a moment table:
/// κ(x_{a₁}…x_{a_k}) = Σ_π (−1)^{|π|−1}(|π|−1)! Π_{B∈π} ⟨Π_{i∈B} x_{a_i}⟩.
/// Up to fourth order this is the explicit non-centered expansion.
pub fn cumulants<T: Num + Clone>(moments: &MomentTable<T>) -> Result<MomentTable<T>> {
    if moments.max_order > MAX_ORDER {
        return input(format!("cumulant order {} exceeds {}", moments.max_order, MAX_ORDER));
    }
    let parts: Vec<Vec<Vec<Vec<usize>>>> = (0..=moments.max_order).map(set_partitions).collect();
    let mut entries = BTreeMap::new();
    for idx in multi_indices(moments.dim, moments.max_order) {
        let vars = variables(&idx);
        if vars.is_empty() {
            continue;
        }
        if !moments.entries.contains_key(&idx) {
            continue;
        }
        let mut k = T::zero();
        for p in &parts[vars.len()] {
            let nb = p.len() as i64;
            let fact: i64 = (1..nb).product();
            let mut term = small_int::<T>(if nb % 2 == 1 { fact } else { -fact });
            for block in p {
                let sub: Vec<usize> = block.iter().map(|i| vars[*i]).collect();
                let m = moments
                    .get_vars(&sub)
                    .ok_or_else(|| Error::Input(format!("missing moment for variables {:?}", sub)))?;
                term = term * m.clone();
            }
            k = k + term;
        }
        entries.insert(idx, k);
    }
    Ok(MomentTable { dim: moments.dim, max_order: moments.max_order, entries })
}

fn check_square<T>(m: &[Vec<T>]) -> Result<usize> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return input("matrix must be non-empty and square");
    }
    Ok(n)
}

/// ⟨x_i x_j x_k x_l⟩ = g^{ij}g^{kl} + g^{ik}g^{jl} + g^{il}g^{jk} (zero-based indices).
pub fn gaussian_moment_4<T: Num + Clone>(g_inv: &[Vec<T>], i: usize, j: usize, k: usize, l: usize) -> T {
    let g = |a: usize, b: usize| g_inv[a][b].clone();
    g(i, j) * g(k, l) + g(i, k) * g(j, l) + g(i, l) * g(j, k)
}

/// Exact moments of a centred Gaussian with covariance g⁻¹ up to fourth order.
pub fn gaussian_moment_table<T: Num + Clone>(g_inv: &[Vec<T>]) -> Result<MomentTable<T>> {
    let dim = check_square(g_inv)?;
    for a in 0..dim {
        for b in 0..dim {
            if g_inv[a][b] != g_inv[b][a] {
                return input("covariance must be symmetric");
            }
        }
    }
    let mut entries = BTreeMap::new();
    for idx in multi_indices(dim, MAX_ORDER) {
        let v = variables(&idx);
        let m = match v.len() {
            0 => T::one(),
            2 => g_inv[v[0]][v[1]].clone(),
            4 => gaussian_moment_4(g_inv, v[0], v[1], v[2], v[3]),
            _ => T::zero(),
        };
        entries.insert(idx, m);
    }
    Ok(MomentTable { dim, max_order: MAX_ORDER, entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LieFamily {
    Su,
    So,
    Sp,
    G2,
    F4,
    E6,
    E7,
    E8,
}

/// Fundamental invariant degrees. `n` is the matrix size for SU(n),
/// SO(n) and Sp(n) (n even); ignored for the exceptional groups.
pub fn invariant_degrees(family: LieFamily, n: usize) -> Result<Vec<u32>> {
    let n32 = n as u32;
    Ok(match family {
        LieFamily::Su if n >= 2 => (2..=n32).collect(),
        LieFamily::So if n >= 3 && n % 2 == 1 => (1..=(n32 - 1) / 2).map(|i| 2 * i).collect(),
        LieFamily::So if n >= 4 && n % 2 == 0 => {
            let h = n32 / 2;
            let mut d: Vec<u32> = (1..h).map(|i| 2 * i).collect();
            d.push(h);
            d
        }
        LieFamily::Sp if n >= 2 && n % 2 == 0 => (1..=n32 / 2).map(|i| 2 * i).collect(),
        LieFamily::G2 => vec![2, 6],
        LieFamily::F4 => vec![2, 6, 8, 12],
        LieFamily::E6 => vec![2, 5, 6, 8, 9, 12],
        LieFamily::E7 => vec![2, 6, 8, 10, 12, 14, 18],
        LieFamily::E8 => vec![2, 8, 12, 14, 18, 20, 24, 30],
        _ => return input(format!("no compact simple group {:?}({})", family, n)),
    })
}

/// Whether some invariant polynomial has odd degree (i.e. a fundamental degree is odd).
pub fn admits_odd_invariant(family: LieFamily, n: usize) -> Result<bool> {
    Ok(invariant_degrees(family, n)?.iter().any(|d| d % 2 == 1))
}

fn pd_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !g.is_square() || g.nrows() == 0 {
        return input("metric must be non-empty and square");
    }
    let ch = nalgebra::Cholesky::new(g.clone()).ok_or_else(|| Error::Input("metric is not positive definite".into()))?;
    Ok(ch.inverse())
}

/// ‖Tᵀg⁻¹T − g⁻¹‖ (Frobenius).
pub fn moment_preservation_residual(t: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<f64> {
    if t.shape() != g.shape() {
        return Err(Error::Dimension { expected: g.nrows(), got: t.nrows() });
    }
    let gi = pd_inverse(g)?;
    Ok((t.transpose() * &gi * t - gi).norm())
}

/// Whether T preserves the covariance g⁻¹ within `tol`.
pub fn moment_preservation_check(t: &DMatrix<f64>, g: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(moment_preservation_residual(t, g)? < tol)
}

/// T = N⁻¹QN with NᵀN = g⁻¹; preserves the covariance for every orthogonal Q.
pub fn stabilizer_element(g: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let gi = pd_inverse(g)?;
    if q.shape() != g.shape() {
        return Err(Error::Dimension { expected: g.nrows(), got: q.nrows() });
    }
    let l = nalgebra::Cholesky::new(gi).ok_or_else(|| Error::Singular("covariance factorization".into()))?.l();
    let n = l.transpose();
    let ninv = n.clone().try_inverse().ok_or_else(|| Error::Singular("covariance factor".into()))?;
    Ok(ninv * q * n)
}

/// Dense symmetric tensor with `dim^k` complex entries, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    pub k: usize,
    pub dim: usize,
    pub values: Vec<C64>,
}

impl SymTensor {
    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, i| acc * self.dim + i)
    }
    pub fn get(&self, idx: &[usize]) -> C64 {
        self.values[self.offset(idx)]
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn all_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..dim).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn realify(m: &DMatrix<C64>) -> DVector<f64> {
    DVector::from_iterator(2 * m.len(), m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)))
}

/// Real structure constants c[a][b][c] with [T_a, T_b] = Σ_c c_{ab}^c T_c,
/// by least squares; errors if the basis is not closed under commutators.
pub fn structure_constants(basis: &[DMatrix<C64>]) -> Result<Vec<Vec<Vec<f64>>>> {
    let d = basis.len();
    if d == 0 {
        return input("empty algebra basis");
    }
    let shape = basis[0].shape();
    if shape.0 != shape.1 || basis.iter().any(|b| b.shape() != shape) {
        return input("basis matrices must be square and of equal size");
    }
    let cols: Vec<DVector<f64>> = basis.iter().map(realify).collect();
    let a = DMatrix::from_columns(&cols);
    let svd = a.clone().svd(true, true);
    let scale = basis.iter().map(|b| b.norm()).fold(0.0, f64::max).max(1.0);
    let mut out = vec![vec![vec![0.0; d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
            let rhs = realify(&comm);
            let x = svd.solve(&rhs, 1e-12).map_err(|e| Error::Singular(e.to_string()))?;
            let res = (&a * &x - &rhs).norm();
            if res > 1e-9 * scale * scale {
                return input(format!("basis not closed under the commutator (residual {:.3e})", res));
            }
            out[i][j] = x.iter().copied().collect();
        }
    }
    Ok(out)
}

/// τ^{b₁…b_k} = 2^{−2k+2}/k! Σ_σ Tr(T_{b_σ(1)}⋯T_{b_σ(k)}).
pub fn symmetrized_trace_tensor(basis: &[DMatrix<C64>], k: usize) -> Result<SymTensor> {
    if k == 0 || k > 3 {
        return input("tensor order must be 1, 2 or 3");
    }
    structure_constants(basis)?;
    let dim = basis.len();
    let perms = permutations(k);
    let fact: f64 = (1..=k).map(|x| x as f64).product();
    let pref = 2f64.powi(2 - 2 * k as i32) / fact;
    let values = all_indices(dim, k)
        .into_iter()
        .map(|idx| {
            let mut s = C64::new(0.0, 0.0);
            for p in &perms {
                let mut m = basis[idx[p[0]]].clone();
                for q in &p[1..] {
                    m = m * &basis[idx[*q]];
                }
                s += m.trace();
            }
            s * pref
        })
        .collect();
    Ok(SymTensor { k, dim, values })
}

/// max over a, b₁…b_k of |Σ_i Σ_c c_{a b_i}^c τ^{b₁…c…b_k}|: the
/// infinitesimal adjoint variation of the induced polynomial.
pub fn ad_invariance_residual(tensor: &SymTensor, basis: &[DMatrix<C64>]) -> Result<f64> {
    if basis.len() != tensor.dim {
        return Err(Error::Dimension { expected: tensor.dim, got: basis.len() });
    }
    let c = structure_constants(basis)?;
    let d = tensor.dim;
    let mut worst = 0.0f64;
    for a in 0..d {
        for idx in all_indices(d, tensor.k) {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..tensor.k {
                let mut j = idx.clone();
                for cc in 0..d {
                    let coef = c[a][idx[i]][cc];
                    if coef != 0.0 {
                        j[i] = cc;
                        s += tensor.get(&j) * coef;
                    }
                }
            }
            worst = worst.max(s.norm());
        }
    }
    Ok(worst)
}

/// (i/2)·Pauli basis of su(2).
pub fn su2_basis() -> Vec<DMatrix<C64>> {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(0.0, 0.5);
    let r = C64::new(0.5, 0.0);
    vec![
        DMatrix::from_row_slice(2, 2, &[z, h, h, z]),
        DMatrix::from_row_slice(2, 2, &[z, r, -r, z]),
        DMatrix::from_row_slice(2, 2, &[h, z, z, -h]),
    ]
}

/// Read samples from a headerless or headed numeric CSV.
pub fn read_samples_csv<R: std::io::Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => out.push(v),
            Err(_) if out.is_empty() => continue,
            Err(e) => return input(format!("bad sample value: {}", e)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_count() {
        assert_eq!(set_partitions(4).len(), 15);
    }

    #[test]
    fn su2_k2_is_kronecker() {
        let t = symmetrized_trace_tensor(&su2_basis(), 2).unwrap();
        let c = t.get(&[0, 0]);
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { c } else { C64::new(0.0, 0.0) };
                assert!((t.get(&[a, b]) - want).norm() < 1e-14);
            }
        }
        assert!(c.norm() > 0.1);
    }
}
