//! Truncated lattice Hilbert spaces and sparse operators on them.
//!
//! The computational space is spanned by basis vectors labelled `(k, a)` with
//! `k ∈ {0..q-1}` a wandering index and `a ∈ Z^N`, `|a|_∞ ≤ M`. Every norm,
//! Gram matrix and commutator is evaluated on a *safe interior*: input vectors
//! supported on `|a|_∞ ≤ M − R·depth`, where `R` is the hop range and `depth`
//! the number of operator applications. Inside that region a truncated
//! finite-hop operator agrees exactly with its infinite-lattice counterpart.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Only needed when nothing in the build links std.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::linalg::{self, CMat, CVec};
use crate::{Error, Result, EXACT_TOL};

pub type MultiIndex = Vec<i64>;

/// Finite-support coefficient table `(k, a) ↦ α_{k,a}` in the `{U^a ψ_k}` basis.
pub type CoeffMap = BTreeMap<(usize, MultiIndex), Complex64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedBasis {
    q: usize,
    lattice_dim: usize,
    radius: usize,
    side: usize,
    cells: usize,
    dim: usize,
}

impl TruncatedBasis {
    pub const DEFAULT_DIM_CAP: usize = 1_000_000;

    pub fn new(q: usize, lattice_dim: usize, radius: usize) -> Result<Self> {
        Self::with_cap(q, lattice_dim, radius, Self::DEFAULT_DIM_CAP)
    }

    pub fn with_cap(q: usize, lattice_dim: usize, radius: usize, cap: usize) -> Result<Self> {
        if q == 0 || lattice_dim == 0 || radius == 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "basis needs q, N, M >= 1 (got q={q}, N={lattice_dim}, M={radius})"
            )));
        }
        let side = 2 * radius + 1;
        let mut requested: u128 = q as u128;
        for _ in 0..lattice_dim {
            requested = requested.saturating_mul(side as u128);
            if requested > cap as u128 {
                return Err(Error::DimensionOverflow { requested, cap });
            }
        }
        let dim = requested as usize;
        Ok(Self {
            q,
            lattice_dim,
            radius,
            side,
            cells: dim / q,
            dim,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn lattice_dim(&self) -> usize {
        self.lattice_dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Position of `(k, a)`, or `None` when it falls outside the truncation.
    pub fn index(&self, k: usize, a: &[i64]) -> Option<usize> {
        if k >= self.q || a.len() != self.lattice_dim {
            return None;
        }
        let m = self.radius as i64;
        let mut cell = 0usize;
        for &aj in a {
            if aj < -m || aj > m {
                return None;
            }
            cell = cell * self.side + (aj + m) as usize;
        }
        Some(k * self.cells + cell)
    }

    pub fn site(&self, index: usize) -> (usize, MultiIndex) {
        assert!(index < self.dim, "index {index} out of range");
        let k = index / self.cells;
        let mut cell = index % self.cells;
        let mut a = vec![0i64; self.lattice_dim];
        for slot in a.iter_mut().rev() {
            *slot = (cell % self.side) as i64 - self.radius as i64;
            cell /= self.side;
        }
        (k, a)
    }

    /// `|a|_∞` of the lattice part of a basis index.
    pub fn sup_norm(&self, index: usize) -> usize {
        let mut cell = index % self.cells;
        let mut best = 0usize;
        for _ in 0..self.lattice_dim {
            let aj = (cell % self.side) as i64 - self.radius as i64;
            best = best.max(aj.unsigned_abs() as usize);
            cell /= self.side;
        }
        best
    }

    /// Basis indices with `|a|_∞ ≤ radius`, in index order.
    pub fn interior(&self, radius: usize) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.sup_norm(i) <= radius).collect()
    }

    pub fn unit_vector(&self, k: usize, a: &[i64]) -> Option<CVec> {
        let i = self.index(k, a)?;
        let mut v = CVec::zeros(self.dim);
        v[i] = Complex64::new(1.0, 0.0);
        Some(v)
    }

    /// Largest `|a|_∞` over the nonzero entries of `v`.
    pub fn support_radius(&self, v: &CVec) -> usize {
        v.iter()
            .enumerate()
            .filter(|(_, z)| !z.is_zero())
            .map(|(i, _)| self.sup_norm(i))
            .max()
            .unwrap_or(0)
    }

    pub fn vector_from_coeffs(&self, coeffs: &CoeffMap) -> Result<CVec> {
        let mut v = CVec::zeros(self.dim);
        for ((k, a), &z) in coeffs {
            let i = self.index(*k, a).ok_or_else(|| {
                Error::InvalidArgument(alloc::format!("coefficient ({k}, {a:?}) outside the truncation"))
            })?;
            v[i] += z;
        }
        Ok(v)
    }
}

pub fn make_basis(q: usize, lattice_dim: usize, radius: usize) -> Result<TruncatedBasis> {
    TruncatedBasis::new(q, lattice_dim, radius)
}

/// Iterates the cube `[-r, r]^n` in lexicographic order.
pub fn cube(n: usize, r: usize) -> impl Iterator<Item = MultiIndex> {
    let side = 2 * r + 1;
    let total = side.pow(n as u32);
    (0..total).map(move |mut c| {
        let mut a = vec![0i64; n];
        for slot in a.iter_mut().rev() {
            *slot = (c % side) as i64 - r as i64;
            c /= side;
        }
        a
    })
}

/// Sparse complex matrix on a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOperator {
    basis: TruncatedBasis,
    entries: BTreeMap<(usize, usize), Complex64>,
    hop_range: usize,
}

impl LatticeOperator {
    /// Duplicate positions are summed; exact zeros are dropped.
    pub fn from_entries<I>(basis: TruncatedBasis, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), Complex64)>,
    {
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for ((row, col), z) in entries {
            if row >= basis.dim() || col >= basis.dim() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "entry ({row}, {col}) outside dimension {}",
                    basis.dim()
                )));
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            *map.entry((row, col)).or_insert(Complex64::zero()) += z;
        }
        map.retain(|_, z| !z.is_zero());
        Ok(Self::from_map(basis, map))
    }

    fn from_map(basis: TruncatedBasis, entries: BTreeMap<(usize, usize), Complex64>) -> Self {
        let hop_range = entries
            .keys()
            .map(|&(r, c)| offset_sup(&basis, r, c))
            .max()
            .unwrap_or(0);
        Self {
            basis,
            entries,
            hop_range,
        }
    }

    /// Builds an operator from its action on basis vectors. `action(k, a)`
    /// returns the image of `(k, a)` as `(k', a', amplitude)` triples; images
    /// that leave the truncation are discarded.
    pub fn from_action<F>(basis: TruncatedBasis, mut action: F) -> Result<Self>
    where
        F: FnMut(usize, &[i64]) -> Vec<(usize, MultiIndex, Complex64)>,
    {
        let mut entries = Vec::new();
        for col in 0..basis.dim() {
            let (k, a) = basis.site(col);
            for (k2, a2, z) in action(k, &a) {
                if let Some(row) = basis.index(k2, &a2) {
                    entries.push(((row, col), z));
                }
            }
        }
        Self::from_entries(basis, entries)
    }

    pub fn identity(basis: TruncatedBasis) -> Self {
        let map = (0..basis.dim())
            .map(|i| ((i, i), Complex64::new(1.0, 0.0)))
            .collect();
        Self::from_map(basis, map)
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.entries
    }

    pub fn hop_range(&self) -> usize {
        self.hop_range
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn adjoint(&self) -> Self {
        let map = self
            .entries
            .iter()
            .map(|(&(r, c), z)| ((c, r), z.conj()))
            .collect();
        Self::from_map(self.basis.clone(), map)
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        assert_eq!(v.len(), self.basis.dim(), "vector length mismatch");
        let mut out = CVec::zeros(v.len());
        for (&(r, c), z) in &self.entries {
            out[r] += z * v[c];
        }
        out
    }

    /// `self† v`.
    pub fn apply_adjoint(&self, v: &CVec) -> CVec {
        assert_eq!(v.len(), self.basis.dim(), "vector length mismatch");
        let mut out = CVec::zeros(v.len());
        for (&(r, c), z) in &self.entries {
            out[c] += z.conj() * v[r];
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        let mut by_row: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (&(r, c), &z) in &other.entries {
            by_row.entry(r).or_default().push((c, z));
        }
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (&(r, mid), &x) in &self.entries {
            if let Some(row) = by_row.get(&mid) {
                for &(c, y) in row {
                    *map.entry((r, c)).or_insert(Complex64::zero()) += x * y;
                }
            }
        }
        map.retain(|_, z| !z.is_zero());
        Ok(Self::from_map(self.basis.clone(), map))
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_basis(other)?;
        let mut map: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (&key, &z) in &self.entries {
            *map.entry(key).or_insert(Complex64::zero()) += alpha * z;
        }
        for (&key, &z) in &other.entries {
            *map.entry(key).or_insert(Complex64::zero()) += beta * z;
        }
        map.retain(|_, z| !z.is_zero());
        Ok(Self::from_map(self.basis.clone(), map))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn pow(&self, n: usize) -> Result<Self> {
        let mut acc = Self::identity(self.basis.clone());
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Dense `dim × cols.len()` block with all rows and the given columns.
    pub fn dense_columns(&self, cols: &[usize]) -> CMat {
        let mut pos = BTreeMap::new();
        for (j, &c) in cols.iter().enumerate() {
            pos.insert(c, j);
        }
        let mut m = CMat::zeros(self.basis.dim(), cols.len());
        for (&(r, c), &z) in &self.entries {
            if let Some(&j) = pos.get(&c) {
                m[(r, j)] = z;
            }
        }
        m
    }

    pub fn to_dense(&self) -> CMat {
        let cols: Vec<usize> = (0..self.basis.dim()).collect();
        self.dense_columns(&cols)
    }

    /// Operator norm restricted to inputs supported in the safe interior for
    /// an expression of the given depth and hop range.
    pub fn masked_norm(&self, hop_range: usize, depth: usize) -> Result<f64> {
        let radius = safe_radius(&self.basis, hop_range, depth)?;
        // Zero rows and columns do not change the largest singular value.
        let mut rows = BTreeMap::new();
        let mut cols = BTreeMap::new();
        for &(r, c) in self.entries.keys() {
            if self.basis.sup_norm(c) <= radius {
                let next = rows.len();
                rows.entry(r).or_insert(next);
                let next = cols.len();
                cols.entry(c).or_insert(next);
            }
        }
        let mut block = CMat::zeros(rows.len(), cols.len());
        for (&(r, c), &z) in &self.entries {
            if let (Some(&i), Some(&j)) = (rows.get(&r), cols.get(&c)) {
                block[(i, j)] = z;
            }
        }
        Ok(linalg::operator_norm(&block))
    }

    fn check_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }
}

fn offset_sup(basis: &TruncatedBasis, row: usize, col: usize) -> usize {
    let (_, a) = basis.site(row);
    let (_, b) = basis.site(col);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
}

/// `M − R·depth`, the radius of the safe interior.
pub fn safe_radius(basis: &TruncatedBasis, hop_range: usize, depth: usize) -> Result<usize> {
    basis
        .radius()
        .checked_sub(hop_range * depth)
        .ok_or(Error::EmptyInterior {
            radius: basis.radius(),
            hop_range,
            depth,
        })
}

/// Masked operator norm of `AB − phase·BA`.
pub fn commutator_norm(a: &LatticeOperator, b: &LatticeOperator, phase: Complex64) -> Result<f64> {
    a.check_basis(b)?;
    if ((phase.norm() - 1.0).abs()) > EXACT_TOL {
        return Err(Error::InvalidArgument(alloc::format!("phase {phase} is not unimodular")));
    }
    let ab = a.compose(b)?;
    let ba = b.compose(a)?;
    let c = ab.combine(Complex64::new(1.0, 0.0), &ba, -phase)?;
    c.masked_norm(a.hop_range().max(b.hop_range()), 2)
}

/// `‖U†U − 1‖` on the safe interior.
pub fn unitarity_defect(u: &LatticeOperator) -> Result<f64> {
    let utu = u.adjoint().compose(u)?;
    let id = LatticeOperator::identity(u.basis.clone());
    let d = utu.combine(Complex64::new(1.0, 0.0), &id, Complex64::new(-1.0, 0.0))?;
    d.masked_norm(u.hop_range(), 2)
}

/// `U^a ψ = U_1^{a_1} ⋯ U_N^{a_N} ψ`; negative powers use the adjoint.
pub fn orbit_vector(generators: &[LatticeOperator], psi: &CVec, a: &[i64]) -> CVec {
    assert_eq!(generators.len(), a.len(), "multi-index length must match the generator count");
    let mut v = psi.clone();
    for (j, &aj) in a.iter().enumerate().rev() {
        for _ in 0..aj.unsigned_abs() {
            v = if aj < 0 {
                generators[j].apply_adjoint(&v)
            } else {
                generators[j].apply(&v)
            };
        }
    }
    v
}

/// One entry of the wandering test that missed its target value.
#[derive(Debug, Clone, PartialEq)]
pub struct WanderingWitness {
    pub k: usize,
    pub h: usize,
    pub a: MultiIndex,
    pub b: MultiIndex,
    /// Measured `(ψ_k; U^{†b} U^a ψ_h)`.
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WanderingReport {
    pub passed: bool,
    pub max_violation: f64,
    pub cyclic_defect: f64,
    pub tolerance: f64,
    pub window: usize,
    pub failures: Vec<WanderingWitness>,
}

/// Witness lists are truncated to this many entries.
pub const MAX_WITNESSES: usize = 32;

/// The orbit family `{U^a ψ_k : |a|_∞ ≤ window}` as matrix columns, ordered
/// by `(k, a)` lexicographically, together with the column labels.
pub fn orbit_family(
    generators: &[LatticeOperator],
    candidates: &[CVec],
    window: usize,
) -> (Vec<(usize, MultiIndex)>, CMat) {
    let n = generators.len();
    let dim = candidates.first().map_or(0, |c| c.len());
    let labels: Vec<(usize, MultiIndex)> = (0..candidates.len())
        .flat_map(|k| cube(n, window).map(move |a| (k, a)))
        .collect();
    let mut family = CMat::zeros(dim, labels.len());
    for (col, (k, a)) in labels.iter().enumerate() {
        let v = orbit_vector(generators, &candidates[*k], a);
        family.set_column(col, &v);
    }
    (labels, family)
}

pub fn verify_wandering(
    generators: &[LatticeOperator],
    candidates: &[CVec],
    window: usize,
) -> Result<WanderingReport> {
    verify_wandering_with_tol(generators, candidates, window, EXACT_TOL)
}

/// Checks `(ψ_k; U^{†b} U^a ψ_h) = δ_{kh} δ_{ab}` for `|a|, |b| ≤ window` and
/// that the orbit family spans every basis vector with `|a|_∞ ≤ window − s`,
/// `s` being the support radius of the candidates.
pub fn verify_wandering_with_tol(
    generators: &[LatticeOperator],
    candidates: &[CVec],
    window: usize,
    tolerance: f64,
) -> Result<WanderingReport> {
    let basis = match generators.first() {
        Some(g) => g.basis().clone(),
        None => return Err(Error::InvalidArgument("no generators".into())),
    };
    if generators.len() != basis.lattice_dim() {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} generators for a {}-dimensional lattice",
            generators.len(),
            basis.lattice_dim()
        )));
    }
    if generators.iter().any(|g| g.basis() != &basis) {
        return Err(Error::BasisMismatch);
    }
    if candidates.is_empty() || candidates.iter().any(|c| c.len() != basis.dim()) {
        return Err(Error::InvalidArgument("candidates must be nonempty vectors on the basis".into()));
    }
    let hop = generators.iter().map(|g| g.hop_range()).max().unwrap_or(0);
    let candidate_radius = candidates
        .iter()
        .map(|c| basis.support_radius(c))
        .max()
        .unwrap_or(0);
    let limit = basis.radius().saturating_sub(hop);
    if window == 0 || window + candidate_radius > limit || candidate_radius > window {
        return Err(Error::WindowTooLarge {
            window,
            candidate_radius,
            limit,
        });
    }

    let (labels, family) = orbit_family(generators, candidates, window);
    let by_row = row_lists(&family);
    let mut gram = CMat::zeros(labels.len(), labels.len());
    for row in &by_row {
        for &(c1, x) in row {
            for &(c2, y) in row {
                gram[(c1, c2)] += x.conj() * y;
            }
        }
    }

    let mut max_violation = 0.0f64;
    let mut failures = Vec::new();
    for row in 0..labels.len() {
        for col in 0..labels.len() {
            let target = if row == col { 1.0 } else { 0.0 };
            let value = gram[(row, col)];
            let dev = (value - Complex64::new(target, 0.0)).norm();
            max_violation = max_violation.max(dev);
            if dev > tolerance && failures.len() < MAX_WITNESSES {
                let (k, b) = &labels[row];
                let (h, a) = &labels[col];
                failures.push(WanderingWitness {
                    k: *k,
                    h: *h,
                    a: a.clone(),
                    b: b.clone(),
                    value,
                });
            }
        }
    }

    let cyclic_defect = if max_violation <= tolerance {
        completeness_defect(&basis, &family, &by_row, window - candidate_radius)
    } else {
        let frame = orthonormal_frame(&family, &gram);
        completeness_defect(&basis, &frame, &row_lists(&frame), window - candidate_radius)
    };
    Ok(WanderingReport {
        passed: max_violation <= tolerance && cyclic_defect <= tolerance,
        max_violation,
        cyclic_defect,
        tolerance,
        window,
        failures,
    })
}

/// Nonzero entries of each matrix row as `(column, value)` pairs.
fn row_lists(m: &CMat) -> Vec<Vec<(usize, Complex64)>> {
    let mut rows = vec![Vec::new(); m.nrows()];
    for c in 0..m.ncols() {
        for (r, z) in m.column(c).iter().enumerate() {
            if !z.is_zero() {
                rows[r].push((c, *z));
            }
        }
    }
    rows
}

/// Largest `‖(1 − P) e_i‖` over interior basis vectors, where `P = Q Q†`
/// for the orthonormal columns of `frame`.
fn completeness_defect(
    basis: &TruncatedBasis,
    frame: &CMat,
    by_row: &[Vec<(usize, Complex64)>],
    radius: usize,
) -> f64 {
    let mut worst = 0.0f64;
    for i in basis.interior(radius) {
        let mut residual = CVec::zeros(frame.nrows());
        residual[i] = Complex64::new(1.0, 0.0);
        for &(c, z) in &by_row[i] {
            residual -= frame.column(c) * z.conj();
        }
        worst = worst.max(linalg::vec_norm(&residual));
    }
    worst
}

/// Orthonormal basis of the family's span through `G = V Λ V†`.
fn orthonormal_frame(family: &CMat, gram: &CMat) -> CMat {
    let (values, vectors) = linalg::eigh(gram);
    let top = values.iter().fold(0.0f64, |a, &x| a.max(x));
    let keep: Vec<usize> = (0..values.len())
        .filter(|&i| top > 0.0 && values[i].max(0.0).sqrt() > linalg::RANK_RTOL * top.sqrt())
        .collect();
    let mut coeff = CMat::zeros(values.len(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        let s = 1.0 / values[i].sqrt();
        for r in 0..values.len() {
            coeff[(r, j)] = vectors[(r, i)] * s;
        }
    }
    family * coeff
}

/// Number of `a ∈ Z^n` with `|a|_1 ≤ m`.
pub fn l1_ball_count(n: usize, m: usize) -> u128 {
    // Σ_i 2^i C(n, i) C(m, i)
    let mut total = 0u128;
    for i in 0..=n.min(m) {
        total += (1u128 << i) * binomial(n, i) * binomial(m, i);
    }
    total
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Filtration seminorm `p_m(φ)² = D_m Σ |α_{k,a}|²` over `0 ≤ k ≤ m`,
/// `|a|_1 ≤ m`, with `D_m` the number of such pairs (`k` capped at `q − 1`).
pub fn seminorm_pm(q: usize, lattice_dim: usize, coeffs: &CoeffMap, m: usize) -> f64 {
    let k_count = (m.min(q.saturating_sub(1)) + 1) as f64;
    let d_m = k_count * l1_ball_count(lattice_dim, m) as f64;
    let sum: f64 = coeffs
        .iter()
        .filter(|((k, a), _)| *k <= m && a.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>() <= m)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    (d_m * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_1d(q: usize, radius: usize) -> LatticeOperator {
        let basis = make_basis(q, 1, radius).unwrap();
        LatticeOperator::from_action(basis, |k, a| {
            vec![(k, vec![a[0] + 1], Complex64::new(1.0, 0.0))]
        })
        .unwrap()
    }

    #[test]
    fn basis_dimensions() {
        assert_eq!(make_basis(1, 1, 1).unwrap().dim(), 3);
        assert_eq!(make_basis(3, 1, 10).unwrap().dim(), 63);
        assert_eq!(make_basis(3, 2, 5).unwrap().dim(), 363);
    }

    #[test]
    fn basis_rejects_zero_and_overflow() {
        assert!(matches!(make_basis(0, 1, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_basis(1, 1, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            make_basis(2, 3, 100),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(TruncatedBasis::with_cap(1, 1, 5, 10).is_err());
    }

    #[test]
    fn index_order_is_lexicographic() {
        let b = make_basis(2, 2, 1).unwrap();
        assert_eq!(b.index(0, &[-1, -1]), Some(0));
        assert_eq!(b.index(0, &[-1, 0]), Some(1));
        assert_eq!(b.index(0, &[0, -1]), Some(3));
        assert_eq!(b.index(1, &[-1, -1]), Some(9));
        assert_eq!(b.index(0, &[2, 0]), None);
        for i in 0..b.dim() {
            let (k, a) = b.site(i);
            assert_eq!(b.index(k, &a), Some(i));
        }
    }

    #[test]
    fn operators_drop_zeros_and_reject_nan() {
        let b = make_basis(1, 1, 2).unwrap();
        let op = LatticeOperator::from_entries(
            b.clone(),
            [((0, 0), Complex64::new(1.0, 0.0)), ((0, 0), Complex64::new(-1.0, 0.0)), ((1, 0), Complex64::new(2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(op.entries().len(), 1);
        assert_eq!(op.hop_range(), 1);
        let bad = LatticeOperator::from_entries(b, [((0, 1), Complex64::new(f64::NAN, 0.0))]);
        assert_eq!(bad, Err(Error::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn shift_is_unitary_on_interior() {
        let s = shift_1d(2, 6);
        assert!(unitarity_defect(&s).unwrap() < 1e-12);
        assert_eq!(s.adjoint().adjoint(), s);
    }

    #[test]
    fn commutator_with_self_vanishes() {
        let s = shift_1d(2, 6);
        assert!(commutator_norm(&s, &s, Complex64::new(1.0, 0.0)).unwrap() < 1e-15);
    }

    #[test]
    fn commutator_needs_an_interior() {
        let s = shift_1d(1, 1);
        let far = s.pow(2).unwrap();
        assert!(matches!(
            commutator_norm(&far, &s, Complex64::new(1.0, 0.0)),
            Err(Error::EmptyInterior { .. })
        ));
        let other = shift_1d(2, 1);
        assert_eq!(
            commutator_norm(&s, &other, Complex64::new(1.0, 0.0)),
            Err(Error::BasisMismatch)
        );
    }

    #[test]
    fn shift_has_wandering_system() {
        let s = shift_1d(1, 8);
        let psi = s.basis().unit_vector(0, &[0]).unwrap();
        let report = verify_wandering(&[s], &[psi], 7).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.failures.is_empty());
    }

    #[test]
    fn identity_generator_fails() {
        let b = make_basis(1, 1, 6).unwrap();
        let id = LatticeOperator::identity(b.clone());
        let psi = b.unit_vector(0, &[0]).unwrap();
        let report = verify_wandering(&[id], &[psi], 3).unwrap();
        assert!(!report.passed);
        assert!((report.max_violation - 1.0).abs() < 1e-12);
        assert!(!report.failures.is_empty() && report.failures.len() <= MAX_WITNESSES);
    }

    #[test]
    fn window_precondition() {
        let s = shift_1d(1, 4);
        let psi = s.basis().unit_vector(0, &[0]).unwrap();
        assert!(matches!(
            verify_wandering(&[s.clone()], &[psi.clone()], 4),
            Err(Error::WindowTooLarge { .. })
        ));
        assert!(verify_wandering(&[s], &[psi], 3).is_ok());
    }

    #[test]
    fn incomplete_family_has_cyclic_defect() {
        let s = shift_1d(2, 6);
        let psi = s.basis().unit_vector(0, &[0]).unwrap();
        let report = verify_wandering(&[s], &[psi], 4).unwrap();
        assert!(report.max_violation < 1e-12);
        assert!((report.cyclic_defect - 1.0).abs() < 1e-12);
        assert!(!report.passed);
    }

    fn brute_force_pairs(q: usize, n: usize, m: usize) -> usize {
        let mut count = 0;
        for k in 0..q {
            for a in cube(n, m) {
                if k <= m && a.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>() <= m {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn l1_ball_matches_enumeration() {
        for n in 1..4 {
            for m in 0..5 {
                assert_eq!(l1_ball_count(n, m) as usize, brute_force_pairs(1, n, m));
            }
        }
    }

    #[test]
    fn seminorm_examples() {
        let one = Complex64::new(1.0, 0.0);
        let mut phi = CoeffMap::new();
        phi.insert((0, vec![0]), one);
        assert!((seminorm_pm(1, 1, &phi, 0) - 1.0).abs() < 1e-15);
        assert!((seminorm_pm(3, 1, &phi, 0) - 1.0).abs() < 1e-15);

        phi.insert((0, vec![1]), one);
        // D_1 by enumeration: q = 1 gives 3 pairs, q = 3 gives 6.
        let d1_single = brute_force_pairs(1, 1, 1) as f64;
        let d1_triple = brute_force_pairs(3, 1, 1) as f64;
        assert_eq!(d1_single, 3.0);
        assert_eq!(d1_triple, 6.0);
        assert!((seminorm_pm(1, 1, &phi, 1) - (d1_single * 2.0).sqrt()).abs() < 1e-14);
        assert!((seminorm_pm(3, 1, &phi, 1) - (d1_triple * 2.0).sqrt()).abs() < 1e-14);
    }
}
