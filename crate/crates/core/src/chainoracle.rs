//! Exact XX0 evolution in a fixed-magnon sector, correlation functions, Schur polynomials and
//! direct torus quadrature of the Schur-weighted Gross-Witten integral.

use crate::error::{Error, Result};
use crate::linalg::{lu_pivots, Matrix};
use crate::partition::ModelParams;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

/// Default cap on the sector dimension C(N, N_f).
pub const DEFAULT_DIMENSION_CAP: u64 = 2_000_000;

/// Sectors up to this size are exponentiated densely; larger ones use the sparse Taylor action.
pub const DENSE_EXPM_MAX_DIM: usize = 500;

/// Magnon position sets, lexicographically ordered, stored as bitmasks over the sites.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n: u32,
    pub n_f: u32,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

fn binomial_u64(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    r as u64
}

fn mask_of(positions: &[u32]) -> u64 {
    positions.iter().fold(0u64, |m, &p| m | (1u64 << p))
}

impl SectorBasis {
    pub fn new(n: u32, n_f: u32, cap: u64) -> Result<Self> {
        if !(1..=64).contains(&n) {
            return Err(Error::Domain(format!("sector basis supports 1 <= N <= 64, got {n}")));
        }
        if n_f > n {
            return Err(Error::Domain(format!("N_f = {n_f} exceeds N = {n}")));
        }
        let dim = binomial_u64(n as u64, n_f as u64);
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut pos: Vec<u32> = (0..n_f).collect();
        loop {
            states.push(mask_of(&pos));
            // next combination in lexicographic order
            let k = n_f as usize;
            let mut i = k;
            while i > 0 && pos[i - 1] == n - (k - i + 1) as u32 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pos[i - 1] += 1;
            for j in i..k {
                pos[j] = pos[j - 1] + 1;
            }
        }
        let index = states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Self { n, n_f, states, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn positions(&self, i: usize) -> Vec<u32> {
        (0..self.n).filter(|&p| self.states[i] >> p & 1 == 1).collect()
    }

    pub fn index_of(&self, positions: &[u32]) -> Option<usize> {
        if positions.len() != self.n_f as usize || positions.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        if positions.iter().any(|&p| p >= self.n) {
            return None;
        }
        self.index.get(&mask_of(positions)).copied()
    }
}

/// Symmetric sparse matrix in compressed-row form.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            // merge duplicates (N = 2 periodic hits the same pair twice)
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(r.len());
            for (c, v) in r {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { dim: row_ptr.len() - 1, row_ptr, cols, vals }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match r.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            *yi = (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum();
        }
    }

    pub fn to_dense(&self) -> Matrix<f64> {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    pub basis: SectorBasis,
    pub matrix: SparseMatrix,
}

/// Coupling between sites a and b: (delta/2)(d_{|a-b|,1} + d_{|a-b|,N-1}) when periodic.
fn coupling(a: u32, b: u32, n: u32, delta: f64, periodic: bool) -> f64 {
    let d = a.abs_diff(b);
    let mut c = 0.0;
    if d == 1 {
        c += 0.5 * delta;
    }
    if periodic && d == n - 1 {
        c += 0.5 * delta;
    }
    c
}

/// -sum_{a != b} Delta_ab s+_a s-_b restricted to the N_f-magnon sector.
pub fn build_sector_hamiltonian(n: u32, n_f: u32, delta: f64, periodic: bool) -> Result<SectorHamiltonian> {
    build_sector_hamiltonian_capped(n, n_f, delta, periodic, DEFAULT_DIMENSION_CAP)
}

pub fn build_sector_hamiltonian_capped(
    n: u32,
    n_f: u32,
    delta: f64,
    periodic: bool,
    cap: u64,
) -> Result<SectorHamiltonian> {
    if n < 2 {
        return Err(Error::Domain("the chain needs N >= 2".into()));
    }
    let basis = SectorBasis::new(n, n_f, cap)?;
    let mut rows = vec![Vec::new(); basis.len()];
    for (i, row) in rows.iter_mut().enumerate() {
        let m = basis.states[i];
        for b in (0..n).filter(|&b| m >> b & 1 == 1) {
            // neighbours b +- 1 with wrap; N = 2 periodic lists site 1-b twice, once per delta
            let mut targets = vec![(b + 1) % n, (b + n - 1) % n];
            if !periodic {
                targets.retain(|&a| a.abs_diff(b) == 1);
            }
            targets.sort_unstable();
            targets.dedup();
            for a in targets {
                if m >> a & 1 == 1 {
                    continue;
                }
                let c = coupling(a, b, n, delta, periodic);
                if c != 0.0 {
                    let j = basis.index[&(m & !(1u64 << b) | (1u64 << a))];
                    row.push((j, -c));
                }
            }
        }
    }
    Ok(SectorHamiltonian { basis, matrix: SparseMatrix::from_rows(rows) })
}

// ---------------------------------------------------------------- exponentials

/// e^A by scaling and squaring with a Taylor core.
pub fn expm_dense(a: &Matrix<f64>) -> Matrix<f64> {
    let n = a.rows();
    let norm = a.norm_inf();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let b = a.scale(1.0 / 2f64.powi(s));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..40 {
        term = term.matmul(&b).scale(1.0 / k as f64);
        sum = sum.add(&term);
        if term.norm_inf() <= 1e-18 * sum.norm_inf() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// e^{cH} v by Taylor series on substeps of norm <= 1.
pub fn expm_action(h: &SparseMatrix, c: f64, v: &[f64]) -> Result<Vec<f64>> {
    let norm = h.norm_inf() * c.abs();
    let steps = norm.ceil().max(1.0) as usize;
    let dt = c / steps as f64;
    let mut x = v.to_vec();
    let mut term = vec![0.0; v.len()];
    let mut next = vec![0.0; v.len()];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let mut converged = false;
        for k in 1..200 {
            h.matvec(&term, &mut next);
            let f = dt / k as f64;
            let mut tn = 0.0f64;
            let mut xn = 0.0f64;
            for i in 0..x.len() {
                term[i] = next[i] * f;
                x[i] += term[i];
                tn = tn.max(term[i].abs());
                xn = xn.max(x[i].abs());
            }
            if tn <= 1e-18 * xn {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence("Taylor series of the propagator did not converge".into()));
        }
    }
    Ok(x)
}

/// Column `col` of e^{-tH}, dense for small sectors and by sparse action otherwise.
fn propagate(h: &SectorHamiltonian, t: f64, col: usize) -> Result<Vec<f64>> {
    let dim = h.basis.len();
    if dim <= DENSE_EXPM_MAX_DIM {
        let e = expm_dense(&h.matrix.to_dense().scale(-t));
        return Ok((0..dim).map(|i| *e.get(i, col)).collect());
    }
    let mut v = vec![0.0; dim];
    v[col] = 1.0;
    expm_action(&h.matrix, -t, &v)
}

/// <block| e^{-tH} |block> with the magnons on sites 0..N_f.
pub fn evolve_partition_exact(p: &ModelParams, periodic: bool) -> Result<f64> {
    if p.n_f == 0 || p.t == 0.0 {
        return Ok(1.0);
    }
    let block: Vec<u32> = (0..p.n_f).collect();
    correlation_exact_with(&block, &block, p.n, p.t, p.delta, periodic)
}

/// <j| e^{-tH} |l> between two magnon position sets (Delta = 1).
pub fn correlation_exact(j: &[u32], l: &[u32], n: u32, t: f64, periodic: bool) -> Result<f64> {
    correlation_exact_with(j, l, n, t, 1.0, periodic)
}

pub fn correlation_exact_with(j: &[u32], l: &[u32], n: u32, t: f64, delta: f64, periodic: bool) -> Result<f64> {
    if j.len() != l.len() {
        return Err(Error::InvalidArgument("position lists must have equal length".into()));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    let h = build_sector_hamiltonian(n, j.len() as u32, delta, periodic)?;
    let bad = || Error::InvalidArgument("positions must be increasing sites below N".into());
    let jj = h.basis.index_of(j).ok_or_else(bad)?;
    let ll = h.basis.index_of(l).ok_or_else(bad)?;
    if t == 0.0 {
        return Ok(if jj == ll { 1.0 } else { 0.0 });
    }
    Ok(propagate(&h, t, ll)?[jj])
}

// ---------------------------------------------------------------- Schur polynomials

/// Integer partition, weakly decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("partition {parts:?} is not weakly decreasing")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// part i (0-based), zero beyond the length
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sites lambda_i + N_f - i (i = 1..N_f) shifted by `offset`, in increasing order.
    pub fn positions(&self, n_f: usize, offset: u32) -> Vec<u32> {
        let mut v: Vec<u32> = (0..n_f).map(|i| offset + self.part(i) + (n_f - 1 - i) as u32).collect();
        v.reverse();
        v
    }
}

fn complex_det(m: &Matrix<Complex64>) -> Complex64 {
    let lu = lu_pivots(m);
    if lu.singular {
        return Complex64::new(0.0, 0.0);
    }
    let p: Complex64 = lu.pivots.iter().product();
    if lu.odd_permutation {
        -p
    } else {
        p
    }
}

/// det(x_i^{lambda_j + N_f - j}).
fn alternant(lam: &Partition, vars: &[Complex64]) -> Complex64 {
    let n = vars.len();
    complex_det(&Matrix::from_fn(n, n, |i, j| vars[i].powu(lam.part(j) + (n - 1 - j) as u32)))
}

/// Relative separation below which the bialternant is abandoned.
pub const SCHUR_MIN_SEPARATION: f64 = 1e-3;

/// Complete homogeneous symmetric polynomials h_0..=h_kmax.
fn complete_homogeneous(vars: &[Complex64], kmax: usize) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); kmax + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for &x in vars {
        for k in 1..=kmax {
            let prev = h[k - 1];
            h[k] += x * prev;
        }
    }
    h
}

/// s_lambda by the Jacobi-Trudi determinant det(h_{lambda_i - i + j}).
pub fn schur_jacobi_trudi(lam: &Partition, vars: &[Complex64]) -> Complex64 {
    let l = lam.len();
    if l == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let kmax = lam.part(0) as usize + l;
    let h = complete_homogeneous(vars, kmax);
    let m = Matrix::from_fn(l, l, |i, j| {
        let k = lam.part(i) as i64 - i as i64 + j as i64;
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            h[k as usize]
        }
    });
    complex_det(&m)
}

/// s_lambda(vars) as the bialternant, or by Jacobi-Trudi when two variables nearly coincide.
pub fn schur_poly(lam: &Partition, vars: &[Complex64]) -> Result<Complex64> {
    if lam.len() > vars.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if vars.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("Schur variables must be finite".into()));
    }
    let scale = vars.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut min_gap = f64::INFINITY;
    for a in 0..vars.len() {
        for b in a + 1..vars.len() {
            min_gap = min_gap.min((vars[a] - vars[b]).norm());
        }
    }
    if min_gap < SCHUR_MIN_SEPARATION * scale {
        return Ok(schur_jacobi_trudi(lam, vars));
    }
    let den = alternant(&Partition::empty(), vars);
    Ok(alternant(lam, vars) / den)
}

/// Largest torus resolution tried by the quadrature.
const QUADRATURE_MAX_NODES: usize = 256;

/// (1/(N_f!(2 pi)^{N_f})) int s_lam(z) conj(s_lam'(z)) |Delta(z)|^2 prod e^{t cos th} d th by
/// the trapezoid rule on [-pi, pi]^{N_f}, doubling the nodes until two levels agree to 1e-7.
pub fn correlation_quadrature(lam: &Partition, lam_prime: &Partition, n_f: usize, t: f64) -> Result<f64> {
    if !(1..=3).contains(&n_f) {
        return Err(Error::Domain(format!("torus quadrature supports 1 <= N_f <= 3, got {n_f}")));
    }
    if lam.len() > n_f || lam_prime.len() > n_f {
        return Ok(0.0);
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite and >= 0, got {t}")));
    }
    let fact: f64 = (1..=n_f).map(|i| i as f64).product();
    let eval = |m: usize| -> f64 {
        let zs: Vec<Complex64> = (0..m).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64)).collect();
        let ws: Vec<f64> = (0..m).map(|k| (t * (2.0 * PI * k as f64 / m as f64).cos()).exp()).collect();
        let mut idx = vec![0usize; n_f];
        let mut total = 0.0;
        loop {
            let z: Vec<Complex64> = idx.iter().map(|&i| zs[i]).collect();
            let w: f64 = idx.iter().map(|&i| ws[i]).product();
            // s_lam Delta = a_{lam + delta}
            total += w * (alternant(lam, &z) * alternant(lam_prime, &z).conj()).re;
            let mut d = 0;
            loop {
                if d == n_f {
                    return total / (m as f64).powi(n_f as i32) / fact;
                }
                idx[d] += 1;
                if idx[d] < m {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    };
    let mut m = 16;
    let mut prev = eval(m);
    while m < QUADRATURE_MAX_NODES {
        m *= 2;
        let cur = eval(m);
        if (cur - prev).abs() <= 1e-7 * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!("torus quadrature unconverged at {m} nodes per angle")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition_gw_infinite;
    use crate::specfun::bessel_i;

    /// -sum_{a != b} Delta_ab s+_a s-_b on all 2^N spin states.
    fn full_space_hamiltonian(n: u32, delta: f64, periodic: bool) -> Matrix<f64> {
        let dim = 1usize << n;
        let mut h = Matrix::from_fn(dim, dim, |_, _| 0.0);
        for state in 0..dim {
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    // s-_b lowers an up spin (magnon) at b, s+_a raises at a
                    if state >> b & 1 == 0 || state >> a & 1 == 1 {
                        continue;
                    }
                    let c = coupling(a, b, n, delta, periodic);
                    if c == 0.0 {
                        continue;
                    }
                    let out = state & !(1 << b) | (1 << a);
                    let v = *h.get(out, state) - c;
                    h.set(out, state, v);
                }
            }
        }
        h
    }

    #[test]
    fn basis_lexicographic() {
        let b = SectorBasis::new(4, 2, 100).unwrap();
        let all: Vec<Vec<u32>> = (0..b.len()).map(|i| b.positions(i)).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(matches!(SectorBasis::new(30, 15, 1000), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn small_hamiltonians() {
        let h = build_sector_hamiltonian(2, 1, 1.0, true).unwrap().matrix.to_dense();
        assert_eq!(h, Matrix::from_fn(2, 2, |i, j| if i == j { 0.0 } else { -1.0 }));
        let h = build_sector_hamiltonian(4, 1, 1.0, true).unwrap().matrix.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                let d = (i as i32 - j as i32).rem_euclid(4);
                let want = if d == 1 || d == 3 { -0.5 } else { 0.0 };
                assert_eq!(*h.get(i, j), want);
            }
        }
        let h = build_sector_hamiltonian(5, 0, 1.0, true).unwrap();
        assert_eq!(h.matrix.to_dense(), Matrix::from_fn(1, 1, |_, _| 0.0));
    }

    #[test]
    fn sector_blocks_match_full_space() {
        for (n, periodic) in [(2u32, true), (5, true), (6, false), (7, true)] {
            let full = full_space_hamiltonian(n, 0.8, periodic);
            for n_f in 0..=n {
                let h = build_sector_hamiltonian(n, n_f, 0.8, periodic).unwrap();
                for i in 0..h.basis.len() {
                    for j in 0..h.basis.len() {
                        let (si, sj) = (h.basis.states[i] as usize, h.basis.states[j] as usize);
                        assert_eq!(h.matrix.get(i, j), *full.get(si, sj), "N={n} N_f={n_f}");
                    }
                }
            }
        }
    }

    #[test]
    fn full_space_evolution_stays_in_sector() {
        // e^{-tH} on 2^N: column sums restricted to each magnon sector carry all the weight
        let n = 8u32;
        let full = full_space_hamiltonian(n, 1.0, true);
        let e = expm_dense(&full.scale(-0.7));
        for state in [0b1011usize, 0b1, 0b1110_0001] {
            let k = state.count_ones();
            let leak: f64 = (0..1usize << n).filter(|s| s.count_ones() != k).map(|s| e.get(s, state).abs()).sum();
            assert!(leak < 1e-14);
            let h = build_sector_hamiltonian(n, k, 1.0, true).unwrap();
            let col = propagate(&h, 0.7, h.basis.index[&(state as u64)]).unwrap();
            for (i, v) in col.iter().enumerate() {
                assert!((v - e.get(h.basis.states[i] as usize, state)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hamiltonian_symmetric() {
        let h = build_sector_hamiltonian(9, 3, 1.3, true).unwrap().matrix.to_dense();
        assert!(h.is_symmetric(0.0));
    }

    #[test]
    fn dense_and_sparse_exponentials_agree() {
        let h = build_sector_hamiltonian(12, 3, 1.0, true).unwrap();
        let dense = expm_dense(&h.matrix.to_dense().scale(-1.5));
        let mut v = vec![0.0; h.basis.len()];
        v[7] = 1.0;
        let sparse = expm_action(&h.matrix, -1.5, &v).unwrap();
        for (i, s) in sparse.iter().enumerate() {
            assert!((s - dense.get(i, 7)).abs() < 1e-13);
        }
    }

    #[test]
    fn evolve_trivial_cases() {
        let p = ModelParams::new(10, 0, 3.0).unwrap();
        assert_eq!(evolve_partition_exact(&p, true).unwrap(), 1.0);
        let p = ModelParams::new(10, 3, 0.0).unwrap();
        assert_eq!(evolve_partition_exact(&p, true).unwrap(), 1.0);
    }

    #[test]
    fn evolve_matches_toeplitz_determinant() {
        for (n_f, t) in [(1u32, 0.5), (2, 1.0), (3, 2.0)] {
            let p = ModelParams::new(24, n_f, t).unwrap();
            let a = evolve_partition_exact(&p, true).unwrap();
            let b = partition_gw_infinite(&p).unwrap().value();
            assert!((a - b).abs() < 1e-6, "N_f={n_f} t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn correlation_orthonormal_at_zero_time() {
        assert_eq!(correlation_exact(&[1, 4], &[1, 4], 8, 0.0, true).unwrap(), 1.0);
        assert_eq!(correlation_exact(&[1, 4], &[2, 4], 8, 0.0, true).unwrap(), 0.0);
        assert!(correlation_exact(&[4, 1], &[1, 4], 8, 0.0, true).is_err());
    }

    #[test]
    fn single_magnon_fourier_closed_form() {
        let (n, t) = (20u32, 1.0);
        let got = correlation_exact(&[10], &[11], n, t, true).unwrap();
        let want: f64 = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                (t * th.cos()).exp() * th.cos()
            })
            .sum::<f64>()
            / n as f64;
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!((got - bessel_i(1, t).unwrap()).abs() < 1e-10);
    }

    /// Number of semistandard tableaux of shape lam with entries in 1..=m.
    fn count_ssyt(lam: &[u32], m: u32) -> u64 {
        let cells: Vec<(usize, usize)> =
            lam.iter().enumerate().flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c))).collect();
        let mut fill = vec![vec![0u32; lam.first().copied().unwrap_or(0) as usize]; lam.len()];
        fn go(k: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<u32>>, m: u32) -> u64 {
            if k == cells.len() {
                return 1;
            }
            let (r, c) = cells[k];
            let lo_row = if c > 0 { fill[r][c - 1] } else { 1 };
            let lo_col = if r > 0 { fill[r - 1][c] + 1 } else { 1 };
            let mut total = 0;
            for v in lo_row.max(lo_col)..=m {
                fill[r][c] = v;
                total += go(k + 1, cells, fill, m);
            }
            total
        }
        go(0, &cells, &mut fill, m)
    }

    #[test]
    fn schur_examples() {
        let one = Complex64::new(1.0, 0.0);
        let x = [Complex64::new(0.3, 0.1), Complex64::new(-1.2, 0.4)];
        assert_eq!(schur_poly(&Partition::empty(), &x).unwrap(), one);
        let s = schur_poly(&Partition::new(vec![1]).unwrap(), &x).unwrap();
        assert!((s - (x[0] + x[1])).norm() < 1e-14);
        let lam = Partition::new(vec![2, 1]).unwrap();
        let s = schur_poly(&lam, &[one; 3]).unwrap();
        assert_eq!(count_ssyt(&[2, 1], 3), 8);
        assert!((s - 8.0).norm() < 1e-12, "{s}");
    }

    #[test]
    fn schur_at_ones_counts_tableaux() {
        for (parts, m) in [(vec![3u32, 1], 3usize), (vec![2, 2, 1], 4), (vec![4], 2), (vec![3, 2, 1], 3)] {
            let lam = Partition::new(parts.clone()).unwrap();
            let s = schur_poly(&lam, &vec![Complex64::new(1.0, 0.0); m]).unwrap();
            assert!((s.re - count_ssyt(&parts, m as u32) as f64).abs() < 1e-9 && s.im.abs() < 1e-9, "{parts:?}");
        }
    }

    #[test]
    fn schur_routes_agree_on_separated_variables() {
        let lam = Partition::new(vec![3, 1, 1]).unwrap();
        let x = [Complex64::new(0.7, 0.2), Complex64::new(-0.4, 0.9), Complex64::new(0.1, -1.1)];
        let a = schur_poly(&lam, &x).unwrap();
        let b = schur_jacobi_trudi(&lam, &x);
        assert!((a - b).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn quadrature_reduces_to_partition_function() {
        let z = correlation_quadrature(&Partition::empty(), &Partition::empty(), 1, 1.3).unwrap();
        assert!((z - bessel_i(0, 1.3).unwrap()).abs() < 1e-12);
        let z = correlation_quadrature(&Partition::empty(), &Partition::empty(), 2, 1.0).unwrap();
        let d = partition_gw_infinite(&ModelParams::new(1, 2, 1.0).unwrap()).unwrap().value();
        assert!((z - d).abs() < 1e-7);
    }

    #[test]
    fn quadrature_matches_open_chain_correlation() {
        let lam = Partition::new(vec![1]).unwrap();
        let q = correlation_quadrature(&lam, &lam, 1, 1.0).unwrap();
        let pos = lam.positions(1, 19);
        let c = correlation_exact(&pos, &pos, 40, 1.0, false).unwrap();
        assert!((q - c).abs() < 1e-4, "{q} vs {c}");
    }

    #[test]
    fn quadrature_two_magnon_mixed_partitions() {
        // <lam| e^{-tH} |lam'> on a long open chain for lam = (1), lam' = (2, 1)
        let (a, b) = (Partition::new(vec![1]).unwrap(), Partition::new(vec![2, 1]).unwrap());
        let q = correlation_quadrature(&a, &b, 2, 0.8).unwrap();
        let c = correlation_exact(&a.positions(2, 18), &b.positions(2, 18), 40, 0.8, false).unwrap();
        assert!((q - c).abs() < 1e-8, "{q} vs {c}");
    }
}
