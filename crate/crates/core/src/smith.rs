//! Smith normal form over the integers and the homology/cohomology built on it.

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::{input, Result};

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal with
/// non-negative entries, each dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub rows: usize,
    pub cols: usize,
    pub diag: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| **d != 0).count()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<u64> {
        self.diag.iter().filter(|d| **d > 1).map(|d| *d as u64).collect()
    }

    /// Whether `A x = c` has a solution over Z (`modulus = None`) or Z_m.
    pub fn solvable(&self, c: &[i64], modulus: Option<u64>) -> bool {
        let uc: Vec<i128> = self
            .u
            .iter()
            .map(|row| row.iter().zip(c).map(|(a, b)| a * (*b as i128)).sum())
            .collect();
        for (i, val) in uc.iter().enumerate() {
            let d = self.diag.get(i).copied().unwrap_or(0);
            match modulus {
                None => {
                    if d == 0 {
                        if *val != 0 {
                            return false;
                        }
                    } else if val % d != 0 {
                        return false;
                    }
                }
                Some(m) => {
                    let m = m as i128;
                    let g = gcd(d, m);
                    if val.rem_euclid(m) % g != 0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Smith normal form of an integer matrix given as rows.
pub fn smith_normal_form(a: &[Vec<i64>], cols: usize) -> Smith {
    let rows = a.len();
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest non-zero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        for r in m.iter_mut() {
            r.swap(t, pj);
        }
        for r in v.iter_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            let p = m[t][t];
            for i in (t + 1)..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                if m[i][t] != 0 {
                    dirty = true;
                }
            }
            for j in (t + 1)..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for i in t..rows {
                        m[i][j] -= q * m[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= q * v[i][t];
                    }
                }
                if m[t][j] != 0 {
                    dirty = true;
                }
            }
            if !dirty {
                // enforce divisibility into the rest of the block
                let mut fix = None;
                'outer: for i in (t + 1)..rows {
                    for j in (t + 1)..cols {
                        if m[i][j] % p != 0 {
                            fix = Some(i);
                            break 'outer;
                        }
                    }
                }
                match fix {
                    None => break,
                    Some(i) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                        for j in 0..rows {
                            u[t][j] += u[i][j];
                        }
                    }
                }
            }
            // move the smallest entry of row/column t to the pivot
            let mut bi = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && m[i][t].abs() < m[bi.0][bi.1].abs() {
                    bi = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && m[t][j].abs() < m[bi.0][bi.1].abs() {
                    bi = (t, j);
                }
            }
            if bi.0 != t {
                m.swap(t, bi.0);
                u.swap(t, bi.0);
            } else if bi.1 != t {
                for r in m.iter_mut() {
                    r.swap(t, bi.1);
                }
                for r in v.iter_mut() {
                    r.swap(t, bi.1);
                }
            }
        }
        if m[t][t] < 0 {
            for j in t..cols {
                m[t][j] = -m[t][j];
            }
            for j in 0..rows {
                u[t][j] = -u[t][j];
            }
        }
        t += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| m[i][i]).collect();
    Smith { rows, cols, diag, u, v }
}

/// Rank and invariant-factor torsion of a (co)homology group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyDescriptor {
    pub k: usize,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

fn transpose(m: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    (0..cols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// H_k(K; Z) from the integer chain complex.
pub fn simplicial_homology(c: &SimplicialComplex, k: usize) -> HomologyDescriptor {
    let nk = c.count(k);
    let rank_k = if k == 0 { 0 } else { smith_normal_form(&c.boundary_matrix(k), nk).rank() };
    let up = smith_normal_form(&c.boundary_matrix(k + 1), c.count(k + 1));
    HomologyDescriptor { k, rank: nk - rank_k - up.rank(), torsion: up.torsion() }
}

/// Coboundary δ_k : C^k → C^{k+1} as rows indexed by (k+1)-simplices.
pub fn coboundary_matrix(c: &SimplicialComplex, k: usize) -> Vec<Vec<i64>> {
    transpose(&c.boundary_matrix(k + 1), c.count(k + 1))
}

/// Coefficients of a cohomology computation: Z or Z_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Modulo(u64),
}

/// H^k(K; Z) via Smith normal forms of the coboundaries; Z_m via the
/// universal coefficient theorem from integer homology.
pub fn cohomology(c: &SimplicialComplex, coeff: Coefficients, k: usize) -> HomologyDescriptor {
    match coeff {
        Coefficients::Integers => {
            let nk = c.count(k);
            let r_out = smith_normal_form(&coboundary_matrix(c, k), nk).rank();
            let (r_in, tors) = if k == 0 {
                (0, vec![])
            } else {
                let s = smith_normal_form(&coboundary_matrix(c, k - 1), c.count(k - 1));
                (s.rank(), s.torsion())
            };
            HomologyDescriptor { k, rank: nk - r_out - r_in, torsion: tors }
        }
        Coefficients::Modulo(m) => {
            let hk = simplicial_homology(c, k);
            let mut orders: Vec<u64> = vec![m; hk.rank];
            for t in &hk.torsion {
                orders.push(gcd(*t as i128, m as i128) as u64);
            }
            if k > 0 {
                for t in simplicial_homology(c, k - 1).torsion {
                    orders.push(gcd(t as i128, m as i128) as u64);
                }
            }
            HomologyDescriptor { k, rank: 0, torsion: invariant_factors(&orders) }
        }
    }
}

/// Whether the integer cochain `x` on k-simplices is closed modulo the coefficients.
pub fn is_cocycle(c: &SimplicialComplex, coeff: Coefficients, k: usize, x: &[i64]) -> Result<bool> {
    if x.len() != c.count(k) {
        return input(format!("cochain has {} entries, expected {}", x.len(), c.count(k)));
    }
    let d = coboundary_matrix(c, k);
    Ok(d.iter().all(|row| {
        let s: i128 = row.iter().zip(x).map(|(a, b)| (*a as i128) * (*b as i128)).sum();
        match coeff {
            Coefficients::Integers => s == 0,
            Coefficients::Modulo(m) => s.rem_euclid(m as i128) == 0,
        }
    }))
}

/// Whether `x` lies in the image of δ_{k−1} over the coefficients.
pub fn is_coboundary(c: &SimplicialComplex, coeff: Coefficients, k: usize, x: &[i64]) -> Result<bool> {
    if x.len() != c.count(k) {
        return input(format!("cochain has {} entries, expected {}", x.len(), c.count(k)));
    }
    if k == 0 {
        return Ok(match coeff {
            Coefficients::Integers => x.iter().all(|v| *v == 0),
            Coefficients::Modulo(m) => x.iter().all(|v| v.rem_euclid(m as i64) == 0),
        });
    }
    let s = smith_normal_form(&coboundary_matrix(c, k - 1), c.count(k - 1));
    Ok(s.solvable(
        x,
        match coeff {
            Coefficients::Integers => None,
            Coefficients::Modulo(m) => Some(m),
        },
    ))
}

/// Invariant factors of a direct sum of cyclic groups of the given orders.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut prime_powers: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &o in orders {
        let mut n = o;
        let mut p = 2;
        while n > 1 {
            if p * p > n {
                prime_powers.entry(n).or_default().push(n);
                break;
            }
            if n % p == 0 {
                let mut q = 1;
                while n % p == 0 {
                    n /= p;
                    q *= p;
                }
                prime_powers.entry(p).or_default().push(q);
            }
            p += 1;
        }
    }
    let len = prime_powers.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for v in prime_powers.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in v.iter().enumerate() {
            out[len - 1 - i] *= q;
        }
    }
    out.retain(|x| *x > 1);
    out
}
