//! Generalized Bloch-Floquet transform for `Z^N` symmetry algebras with a
//! finite wandering system.
//!
//! With generators `U_1, …, U_N` and wandering vectors `ψ_0, …, ψ_{q-1}`, the
//! family `{U^b ψ_k}` is an orthonormal basis. A vector `φ = Σ α_{k,b} U^b ψ_k`
//! is sent to the field of `C^q` vectors with components
//! `f_k(t) = Σ_b α_{k,b} e^{i b·t}`, and an operator `O` commuting with every
//! `U_j` is sent to the field of `q × q` matrices
//! `π_t(O)_{hk} = Σ_b α^{(k)}_{h,b} e^{i b·t}`, where
//! `α^{(k)}_{h,b} = (U^b ψ_h ; O ψ_k)`.
//!
//! With this sign convention `π_t(U_j) = e^{i t_j}·1` and the Mathieu shift
//! `u` fibers to the matrix with ones on the subdiagonal and `e^{it}` in the
//! top-right corner.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::hilbert::{
    self, cube, orbit_vector, CoeffMap, LatticeOperator, MultiIndex, TruncatedBasis, WanderingReport,
};
use crate::linalg::{self, CMat, CVec};
use crate::{Error, Result, EXACT_TOL, NUMERIC_TOL};

/// Hopping amplitudes at or below this magnitude are treated as roundoff.
pub const ZERO_CUTOFF: f64 = 1e-14;

/// Symmetry generators plus a verified wandering system.
#[derive(Debug, Clone, PartialEq)]
pub struct WanderingDecomposition {
    basis: TruncatedBasis,
    generators: Vec<LatticeOperator>,
    wandering: Vec<CVec>,
    report: WanderingReport,
}

impl WanderingDecomposition {
    /// Runs the wandering check over `window` and the pairwise commutation
    /// check; fails unless both pass.
    pub fn new(generators: Vec<LatticeOperator>, wandering: Vec<CVec>, window: usize) -> Result<Self> {
        let report = hilbert::verify_wandering(&generators, &wandering, window)?;
        if !report.passed {
            return Err(Error::NotWandering {
                max_violation: report.max_violation,
                cyclic_defect: report.cyclic_defect,
            });
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                let norm = hilbert::commutator_norm(&generators[i], &generators[j], Complex64::new(1.0, 0.0))?;
                if norm > EXACT_TOL {
                    return Err(Error::GeneratorsDoNotCommute(norm));
                }
            }
        }
        let basis = generators[0].basis().clone();
        Ok(Self {
            basis,
            generators,
            wandering,
            report,
        })
    }

    /// Largest usable verification window for these generators and vectors.
    pub fn max_window(generators: &[LatticeOperator], wandering: &[CVec]) -> usize {
        let Some(first) = generators.first() else {
            return 0;
        };
        let basis = first.basis();
        let hop = generators.iter().map(|g| g.hop_range()).max().unwrap_or(0);
        let s = wandering.iter().map(|w| basis.support_radius(w)).max().unwrap_or(0);
        basis.radius().saturating_sub(hop + s)
    }

    pub fn basis(&self) -> &TruncatedBasis {
        &self.basis
    }

    pub fn generators(&self) -> &[LatticeOperator] {
        &self.generators
    }

    pub fn wandering_vectors(&self) -> &[CVec] {
        &self.wandering
    }

    pub fn report(&self) -> &WanderingReport {
        &self.report
    }

    pub fn q(&self) -> usize {
        self.wandering.len()
    }

    pub fn lattice_dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_hop(&self) -> usize {
        self.generators.iter().map(|g| g.hop_range()).max().unwrap_or(0)
    }

    pub fn wandering_radius(&self) -> usize {
        self.wandering
            .iter()
            .map(|w| self.basis.support_radius(w))
            .max()
            .unwrap_or(0)
    }

    /// `U^b ψ_h`.
    pub fn orbit(&self, h: usize, b: &[i64]) -> CVec {
        orbit_vector(&self.generators, &self.wandering[h], b)
    }

    /// Lattice vector `Σ α_{k,b} U^b ψ_k`.
    pub fn synthesize(&self, coeffs: &CoeffMap) -> CVec {
        let mut v = CVec::zeros(self.basis.dim());
        for ((k, b), &z) in coeffs {
            v += self.orbit(*k, b) * z;
        }
        v
    }
}

/// Hopping table `(h, k, b) ↦ α^{(k)}_{h,b}` of an operator commuting with
/// the symmetry algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantOperator {
    q: usize,
    lattice_dim: usize,
    truncation: usize,
    table: BTreeMap<(usize, usize, MultiIndex), Complex64>,
}

impl CovariantOperator {
    /// `truncation` bounds the hop range of this table and of every product
    /// formed from it.
    pub fn from_table<I>(q: usize, lattice_dim: usize, truncation: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize, MultiIndex), Complex64)>,
    {
        let mut table: BTreeMap<(usize, usize, MultiIndex), Complex64> = BTreeMap::new();
        for ((h, k, b), z) in entries {
            if h >= q || k >= q || b.len() != lattice_dim {
                return Err(Error::InvalidArgument(alloc::format!(
                    "table entry ({h}, {k}, {b:?}) does not fit q = {q}, N = {lattice_dim}"
                )));
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidArgument("non-finite hopping amplitude".into()));
            }
            *table.entry((h, k, b)).or_insert(Complex64::zero()) += z;
        }
        table.retain(|_, z| !z.is_zero());
        let op = Self {
            q,
            lattice_dim,
            truncation,
            table,
        };
        if op.hop_range() > truncation {
            return Err(Error::HopRangeExceedsTruncation {
                hop_range: op.hop_range(),
                radius: truncation,
            });
        }
        Ok(op)
    }

    pub fn identity(q: usize, lattice_dim: usize, truncation: usize) -> Self {
        let table = (0..q)
            .map(|k| ((k, k, vec![0; lattice_dim]), Complex64::new(1.0, 0.0)))
            .collect();
        Self {
            q,
            lattice_dim,
            truncation,
            table,
        }
    }

    /// The symmetry generator `U_j`: `α^{(k)}_{h,b} = δ_{hk} δ_{b,e_j}`.
    pub fn generator(q: usize, lattice_dim: usize, truncation: usize, j: usize) -> Self {
        let mut e = vec![0; lattice_dim];
        e[j] = 1;
        let table = (0..q).map(|k| ((k, k, e.clone()), Complex64::new(1.0, 0.0))).collect();
        Self {
            q,
            lattice_dim,
            truncation,
            table,
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn lattice_dim(&self) -> usize {
        self.lattice_dim
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn table(&self) -> &BTreeMap<(usize, usize, MultiIndex), Complex64> {
        &self.table
    }

    /// `α^{(k)}_{h,b}`.
    pub fn amplitude(&self, h: usize, k: usize, b: &[i64]) -> Complex64 {
        self.table
            .get(&(h, k, b.to_vec()))
            .copied()
            .unwrap_or_else(Complex64::zero)
    }

    pub fn hop_range(&self) -> usize {
        self.table
            .keys()
            .flat_map(|(_, _, b)| b.iter().map(|x| x.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    pub fn adjoint(&self) -> Self {
        let table = self
            .table
            .iter()
            .map(|((h, k, b), z)| ((*k, *h, b.iter().map(|x| -x).collect()), z.conj()))
            .collect();
        Self {
            table,
            ..self.clone()
        }
    }

    /// `max |α^{(k)}_{h,b} − conj(α^{(h)}_{k,−b})|`.
    pub fn hermitian_defect(&self) -> f64 {
        let adj = self.adjoint();
        self.table
            .keys()
            .chain(adj.table.keys())
            .map(|(h, k, b)| (self.amplitude(*h, *k, b) - adj.amplitude(*h, *k, b)).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.q != other.q || self.lattice_dim != other.lattice_dim {
            return Err(Error::InvalidArgument(alloc::format!(
                "covariant operators with shapes (q={}, N={}) and (q={}, N={})",
                self.q,
                self.lattice_dim,
                other.q,
                other.lattice_dim
            )));
        }
        Ok(())
    }

    /// Table of the product `self · other`:
    /// `α^{(k)}_{h,b} = Σ_{m,c} α_A^{(m)}_{h,c} α_B^{(k)}_{m,b−c}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let truncation = self.truncation.min(other.truncation);
        let combined = self.hop_range() + other.hop_range();
        if combined > truncation {
            return Err(Error::HopRangeExceedsTruncation {
                hop_range: combined,
                radius: truncation,
            });
        }
        let mut by_source: BTreeMap<usize, Vec<(usize, &MultiIndex, Complex64)>> = BTreeMap::new();
        for ((m, k, d), &z) in &other.table {
            by_source.entry(*m).or_default().push((*k, d, z));
        }
        let mut entries = Vec::new();
        for ((h, m, c), &x) in &self.table {
            if let Some(list) = by_source.get(m) {
                for &(k, d, y) in list {
                    let b: MultiIndex = c.iter().zip(d).map(|(ci, di)| ci + di).collect();
                    entries.push(((*h, k, b), x * y));
                }
            }
        }
        Self::from_table(self.q, self.lattice_dim, truncation, entries)
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        self.check_shape(other)?;
        let entries = self
            .table
            .iter()
            .map(|(key, z)| (key.clone(), alpha * z))
            .chain(other.table.iter().map(|(key, z)| (key.clone(), beta * z)));
        Self::from_table(
            self.q,
            self.lattice_dim,
            self.truncation.min(other.truncation),
            entries,
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    /// `π_t(O)` at an arbitrary torus point.
    pub fn fiber(&self, t: &[f64]) -> CMat {
        assert_eq!(t.len(), self.lattice_dim, "torus point has wrong dimension");
        let mut m = CMat::zeros(self.q, self.q);
        for ((h, k, b), z) in &self.table {
            let phase: f64 = b.iter().zip(t).map(|(&bi, &ti)| bi as f64 * ti).sum();
            m[(*h, *k)] += z * linalg::cis(phase);
        }
        m
    }

    /// `π_t(O)` at a grid node, with phases taken as exact roots of unity.
    pub fn fiber_at_node(&self, grid: &TorusGrid, node: usize) -> CMat {
        assert_eq!(grid.lattice_dim(), self.lattice_dim, "grid has wrong dimension");
        let l = grid.node_indices(node);
        let mut m = CMat::zeros(self.q, self.q);
        for ((h, k, b), z) in &self.table {
            m[(*h, *k)] += z * grid.phase(b, &l);
        }
        m
    }
}

pub fn fiber_operator(cov: &CovariantOperator, t: &[f64]) -> CMat {
    cov.fiber(t)
}

pub fn compose_covariant(a: &CovariantOperator, b: &CovariantOperator) -> Result<CovariantOperator> {
    a.compose(b)
}

pub fn fiber_samples(cov: &CovariantOperator, grid: &TorusGrid) -> FiberedSamples<CMat> {
    let values = (0..grid.len()).map(|i| cov.fiber_at_node(grid, i)).collect();
    FiberedSamples {
        grid: grid.clone(),
        values,
    }
}

/// Reads off `α^{(k)}_{h,b} = (U^b ψ_h ; O ψ_k)` after checking that `O`
/// commutes with every generator on the safe interior.
pub fn covariant_from_lattice(op: &LatticeOperator, dec: &WanderingDecomposition) -> Result<CovariantOperator> {
    if op.basis() != dec.basis() {
        return Err(Error::BasisMismatch);
    }
    let radius = dec.basis().radius();
    let s = dec.wandering_radius();
    let hop_u = dec.generator_hop().max(1);
    let span = op.hop_range() + 2 * s;
    if 2 * op.hop_range().max(dec.generator_hop()) > radius || s + op.hop_range() > radius || span * hop_u + s > radius {
        return Err(Error::HopRangeExceedsTruncation {
            hop_range: op.hop_range(),
            radius,
        });
    }
    for (j, g) in dec.generators().iter().enumerate() {
        let norm = hilbert::commutator_norm(op, g, Complex64::new(1.0, 0.0))?;
        if norm > NUMERIC_TOL {
            return Err(Error::NotCovariant { generator: j, norm });
        }
    }

    let n = dec.lattice_dim();
    let q = dec.q();
    let orbits: Vec<(usize, MultiIndex, CVec)> = (0..q)
        .flat_map(|h| cube(n, span).map(move |b| (h, b)))
        .map(|(h, b)| {
            let v = dec.orbit(h, &b);
            (h, b, v)
        })
        .collect();

    let mut entries = Vec::new();
    for k in 0..q {
        let image = op.apply(&dec.wandering_vectors()[k]);
        let mut rebuilt = CVec::zeros(image.len());
        for (h, b, v) in &orbits {
            let z = v.dotc(&image);
            if z.norm() > ZERO_CUTOFF {
                rebuilt += v * z;
                entries.push(((*h, k, b.clone()), z));
            }
        }
        let residual = linalg::vec_norm(&(image - rebuilt));
        if residual > NUMERIC_TOL {
            return Err(Error::InvariantViolation {
                check: alloc::format!("hopping table reproduces O ψ_{k}"),
                residual,
            });
        }
    }
    CovariantOperator::from_table(q, n, radius, entries)
}

/// Uniform grid `t_j = 2π l_j / L`, `l_j = 0..L-1`, on `T^N` with normalized
/// Haar weights `L^{-N}`. Nodes are ordered lexicographically in `(l_1, …, l_N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusGrid {
    lattice_dim: usize,
    points: usize,
}

impl TorusGrid {
    pub const DEFAULT_POINTS: usize = 64;

    pub fn new(lattice_dim: usize, points: usize) -> Result<Self> {
        if lattice_dim == 0 || points == 0 {
            return Err(Error::InvalidArgument("torus grid needs N >= 1 and L >= 1".into()));
        }
        Ok(Self { lattice_dim, points })
    }

    pub fn lattice_dim(&self) -> usize {
        self.lattice_dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.lattice_dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn node_indices(&self, node: usize) -> Vec<usize> {
        let mut c = node;
        let mut l = vec![0usize; self.lattice_dim];
        for slot in l.iter_mut().rev() {
            *slot = c % self.points;
            c /= self.points;
        }
        l
    }

    pub fn node_of(&self, l: &[usize]) -> usize {
        l.iter().fold(0, |acc, &x| acc * self.points + x % self.points)
    }

    pub fn node(&self, node: usize) -> Vec<f64> {
        self.node_indices(node)
            .into_iter()
            .map(|l| core::f64::consts::TAU * l as f64 / self.points as f64)
            .collect()
    }

    /// Next node along `axis`, wrapping around the torus.
    pub fn neighbor(&self, node: usize, axis: usize) -> usize {
        let mut l = self.node_indices(node);
        l[axis] = (l[axis] + 1) % self.points;
        self.node_of(&l)
    }

    /// `e^{i b·t}` at the node with indices `l`.
    pub fn phase(&self, b: &[i64], l: &[usize]) -> Complex64 {
        let p = self.points as i64;
        let dot: i64 = b
            .iter()
            .zip(l)
            .map(|(&bi, &li)| (bi.rem_euclid(p) * li as i64) % p)
            .sum();
        linalg::root_of_unity(-dot, self.points as u64)
    }
}

pub trait FiberValue {
    /// Frobenius distance.
    fn distance(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64;
}

impl FiberValue for CMat {
    fn distance(&self, other: &Self) -> f64 {
        linalg::frobenius(&(self - other))
    }

    fn magnitude(&self) -> f64 {
        linalg::frobenius(self)
    }
}

impl FiberValue for CVec {
    fn distance(&self, other: &Self) -> f64 {
        linalg::vec_norm(&(self - other))
    }

    fn magnitude(&self) -> f64 {
        linalg::vec_norm(self)
    }
}

/// One value per grid node, in node order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberedSamples<T> {
    grid: TorusGrid,
    values: Vec<T>,
}

impl<T> FiberedSamples<T> {
    pub fn new(grid: TorusGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

fn check_coeffs(q: usize, coeffs: &CoeffMap, lattice_dim: usize) -> Result<()> {
    for (k, b) in coeffs.keys() {
        if *k >= q || b.len() != lattice_dim {
            return Err(Error::InvalidArgument(alloc::format!(
                "coefficient ({k}, {b:?}) does not fit q = {q}, N = {lattice_dim}"
            )));
        }
    }
    Ok(())
}

/// `(𝒰φ)(t)` in the frame coordinates: component `k` is
/// `f_{φ;k}(t) = Σ_b α_{k,b} e^{i b·t}`.
pub fn transform_vector(q: usize, coeffs: &CoeffMap, grid: &TorusGrid) -> Result<FiberedSamples<CVec>> {
    check_coeffs(q, coeffs, grid.lattice_dim())?;
    let values = (0..grid.len())
        .map(|node| {
            let l = grid.node_indices(node);
            let mut v = CVec::zeros(q);
            for ((k, b), z) in coeffs {
                v[*k] += z * grid.phase(b, &l);
            }
            v
        })
        .collect();
    FiberedSamples::new(grid.clone(), values)
}

/// Result of a discrete Fourier inversion of sampled frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseTransform {
    pub coeffs: CoeffMap,
    /// Largest sample mismatch after transforming the recovered coefficients
    /// back onto the grid.
    pub residual: f64,
    /// Set when `residual` exceeds the numeric tolerance, i.e. the samples
    /// were not band-limited below the grid's Nyquist radius.
    pub aliased: bool,
}

/// Recovers `α_{k,b}` for `|b_j| < L/2` by discrete Fourier inversion.
pub fn inverse_transform(samples: &FiberedSamples<CVec>) -> Result<InverseTransform> {
    let grid = samples.grid();
    let q = samples.values().first().map_or(0, |v| v.len());
    let l = grid.points();
    // |b| < L/2
    let bound = (l - 1) / 2;
    let w = grid.weight();
    let mut coeffs = CoeffMap::new();
    for b in cube(grid.lattice_dim(), bound) {
        let minus_b: Vec<i64> = b.iter().map(|x| -x).collect();
        let mut acc = CVec::zeros(q);
        for (node, v) in samples.values().iter().enumerate() {
            let li = grid.node_indices(node);
            acc += v * grid.phase(&minus_b, &li);
        }
        for k in 0..q {
            let z = acc[k] * w;
            if z.norm() > ZERO_CUTOFF {
                coeffs.insert((k, b.clone()), z);
            }
        }
    }
    let back = transform_vector(q, &coeffs, grid)?;
    let residual = back
        .values()
        .iter()
        .zip(samples.values())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    Ok(InverseTransform {
        coeffs,
        residual,
        aliased: residual > NUMERIC_TOL,
    })
}

/// `Σ_nodes w ‖φ(t)‖²`, which equals `‖φ‖² = Σ |α|²` when the grid resolves
/// the support.
pub fn quadrature_norm_sqr(samples: &FiberedSamples<CVec>) -> f64 {
    let w = samples.grid().weight();
    samples.values().iter().map(|v| w * v.norm_squared()).sum()
}

pub fn coeff_norm_sqr(coeffs: &CoeffMap) -> f64 {
    coeffs.values().map(|z| z.norm_sqr()).sum()
}

/// `|||φ||| = max_t ‖φ(t)‖` over the grid nodes.
pub fn module_norm(q: usize, coeffs: &CoeffMap, grid: &TorusGrid) -> Result<f64> {
    let samples = transform_vector(q, coeffs, grid)?;
    Ok(samples.values().iter().map(|v| v.magnitude()).fold(0.0, f64::max))
}

/// `|(ψ_k ; U^a ψ_k) − ∫ e^{i a·t} dz(t)|`, the Haar quadrature taken on the
/// grid. The integral is `δ_{a,0}` whenever the grid resolves `a`.
pub fn haar_moment_check(dec: &WanderingDecomposition, k: usize, a: &[i64], grid: &TorusGrid) -> Result<f64> {
    if k >= dec.q() || a.len() != dec.lattice_dim() || grid.lattice_dim() != dec.lattice_dim() {
        return Err(Error::InvalidArgument("moment index does not fit the decomposition".into()));
    }
    let reach = a.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
    let radius = dec.basis().radius();
    if reach * dec.generator_hop() + dec.wandering_radius() > radius {
        return Err(Error::HopRangeExceedsTruncation {
            hop_range: reach * dec.generator_hop(),
            radius,
        });
    }
    let psi = &dec.wandering_vectors()[k];
    let moment = psi.dotc(&dec.orbit(k, a));
    let w = grid.weight();
    let haar: Complex64 = (0..grid.len())
        .map(|node| grid.phase(a, &grid.node_indices(node)) * w)
        .sum();
    Ok((moment - haar).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn grid_weights_sum_to_one() {
        for (n, l) in [(1, 64), (2, 16), (2, 7)] {
            let g = TorusGrid::new(n, l).unwrap();
            let total: f64 = (0..g.len()).map(|_| g.weight()).sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
        let g = TorusGrid::new(2, 4).unwrap();
        assert_eq!(g.node_indices(6), vec![1, 2]);
        assert_eq!(g.node_of(&[1, 2]), 6);
        assert_eq!(g.neighbor(g.node_of(&[3, 1]), 0), g.node_of(&[0, 1]));
    }

    #[test]
    fn generator_fibers_to_phase() {
        let g = CovariantOperator::generator(3, 2, 4, 1);
        let t = [0.3, -1.1];
        let m = g.fiber(&t);
        let expected = linalg::identity(3) * linalg::cis(t[1]);
        assert!(linalg::frobenius(&(m - expected)) < 1e-15);
    }

    #[test]
    fn compose_respects_truncation() {
        let g = CovariantOperator::generator(1, 1, 1, 0);
        assert!(matches!(g.compose(&g), Err(Error::HopRangeExceedsTruncation { .. })));
        let g = CovariantOperator::generator(1, 1, 2, 0);
        assert_eq!(g.compose(&g).unwrap().hop_range(), 2);
    }

    #[test]
    fn compose_with_adjoint_gives_identity() {
        let g = CovariantOperator::generator(2, 1, 3, 0);
        let prod = g.compose(&g.adjoint()).unwrap();
        assert_eq!(prod, CovariantOperator::identity(2, 1, 3));
    }

    #[test]
    fn single_term_transform() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let mut c = CoeffMap::new();
        c.insert((1, vec![2]), one());
        let s = transform_vector(2, &c, &grid).unwrap();
        for (node, v) in s.values().iter().enumerate() {
            let t = grid.node(node)[0];
            assert!(v[0].norm() < 1e-15);
            assert!((v[1] - linalg::cis(2.0 * t)).norm() < 1e-14);
        }
    }

    #[test]
    fn transform_rejects_bad_keys() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let mut c = CoeffMap::new();
        c.insert((3, vec![0]), one());
        assert!(transform_vector(2, &c, &grid).is_err());
    }

    #[test]
    fn module_norm_of_two_terms() {
        let mut c = CoeffMap::new();
        c.insert((0, vec![0]), one());
        c.insert((0, vec![1]), one());
        let grid = TorusGrid::new(1, 16).unwrap();
        assert!((module_norm(1, &c, &grid).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn samples_must_cover_the_grid() {
        let grid = TorusGrid::new(1, 4).unwrap();
        assert!(FiberedSamples::new(grid, vec![CVec::zeros(1); 3]).is_err());
    }
}
