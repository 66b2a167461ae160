//! Band spectra, spectral gaps, Fermi projectors and Chern numbers of the
//! Bloch bundles carried by a fibered Hamiltonian.
//!
//! Chern numbers use overlap-determinant link variables: for an orthonormal
//! frame `F(t)` of the selected bands, the link along an edge is
//! `det(F(t)† F(t'))` normalized to unit modulus, the plaquette flux is the
//! principal value of `i·log` of the counter-clockwise product of the four
//! links, and the Chern number is the flux sum over `2π`. The sign follows
//! the first Chern class `c₁ = (i/2π)∫ tr F` of the curvature of the frame
//! connection `F† dF`. Bands are labelled by ascending
//! energy at every node; no eigenvector continuation is attempted.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Only needed when nothing in the build links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{self, CMat};
use crate::models::{self, ModelInstance};
use crate::transform::{FiberValue, FiberedSamples, TorusGrid};
use crate::{Error, Result, EXACT_TOL};

/// Default lower bound on the separation between a selected band set and
/// the rest of the spectrum.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-6;

/// Plaquette fluxes must stay this far inside `(-π, π)`.
pub const ADMISSIBILITY_MARGIN: f64 = 1e-9;

/// Allowed distance of the flux sum (in units of `2π`) from an integer.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BandData {
    grid: TorusGrid,
    energies: Vec<Vec<f64>>,
    band_count: usize,
}

impl BandData {
    /// `energies[node]` must hold the same number of ascending values at
    /// every node.
    pub fn from_energies(grid: TorusGrid, energies: Vec<Vec<f64>>) -> Result<Self> {
        if energies.len() != grid.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} energy lists for {} nodes",
                energies.len(),
                grid.len()
            )));
        }
        let band_count = energies.first().map_or(0, |e| e.len());
        for e in &energies {
            if e.len() != band_count || e.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidArgument("energies must be ascending with a fixed count".into()));
            }
        }
        Ok(Self {
            grid,
            energies,
            band_count,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn energies(&self) -> &[Vec<f64>] {
        &self.energies
    }

    pub fn band_count(&self) -> usize {
        self.band_count
    }

    /// `[min, max]` of band `r` (0-based) over the grid.
    pub fn band_interval(&self, r: usize) -> (f64, f64) {
        self.energies.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e[r]), hi.max(e[r]))
        })
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        (0..self.band_count).map(|r| self.band_interval(r)).collect()
    }
}

fn check_hermitian(model: &ModelInstance) -> Result<()> {
    let defect = model.hamiltonian().hermitian_defect();
    if defect > EXACT_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Ascending eigenvalues of a Hermitian fiber matrix.
pub fn fiber_energies(h: &CMat) -> Vec<f64> {
    linalg::eigvalsh(h)
}

pub fn band_spectrum(model: &ModelInstance, grid: &TorusGrid) -> Result<BandData> {
    check_hermitian(model)?;
    if grid.lattice_dim() != model.lattice_dim() {
        return Err(Error::GridDimension {
            expected: model.lattice_dim(),
            found: grid.lattice_dim(),
        });
    }
    let h = model.hamiltonian();
    let energies = (0..grid.len())
        .map(|node| fiber_energies(&h.fiber_at_node(grid, node)))
        .collect();
    BandData::from_energies(grid.clone(), energies)
}

/// Node and value of the smallest `E_{r+1}(t) − E_r(t)`, `r` counted from 1.
pub fn min_gap(bands: &BandData, r: usize) -> Result<(f64, usize)> {
    if r == 0 || r >= bands.band_count {
        return Err(Error::BandIndexOutOfRange {
            index: r,
            bands: bands.band_count,
        });
    }
    let mut best = (f64::INFINITY, 0);
    for (node, e) in bands.energies.iter().enumerate() {
        let gap = e[r] - e[r - 1];
        if gap < best.0 {
            best = (gap, node);
        }
    }
    Ok(best)
}

/// `min_t (E_{r+1}(t) − E_r(t))` with bands counted from 1.
pub fn gap_check(bands: &BandData, r: usize) -> Result<f64> {
    Ok(min_gap(bands, r)?.0)
}

/// Distance between the selected energies and the rest; infinite when either
/// side is empty.
pub fn set_separation(energies: &[f64], band_set: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, &ei) in energies.iter().enumerate() {
        if !band_set.contains(&i) {
            continue;
        }
        for (j, &ej) in energies.iter().enumerate() {
            if !band_set.contains(&j) {
                best = best.min((ei - ej).abs());
            }
        }
    }
    best
}

fn check_band_set(band_set: &[usize], bands: usize) -> Result<()> {
    if let Some(&index) = band_set.iter().find(|&&r| r >= bands) {
        return Err(Error::BandIndexOutOfRange { index, bands });
    }
    Ok(())
}

/// Orthonormal eigenvectors of the selected bands, as columns in band order.
pub fn band_frame(h: &CMat, band_set: &[usize], gap_floor: f64) -> Result<CMat> {
    check_band_set(band_set, h.nrows())?;
    let (values, vectors) = linalg::eigh(h);
    let gap = set_separation(&values, band_set);
    if gap < gap_floor {
        return Err(Error::GapTooSmall {
            node: Vec::new(),
            gap,
            floor: gap_floor,
        });
    }
    let mut cols: Vec<usize> = band_set.to_vec();
    cols.sort_unstable();
    cols.dedup();
    Ok(CMat::from_fn(h.nrows(), cols.len(), |r, c| vectors[(r, cols[c])]))
}

/// `P = Σ_{r ∈ band_set} |v_r⟩⟨v_r|`.
pub fn spectral_projector(h: &CMat, band_set: &[usize], gap_floor: f64) -> Result<CMat> {
    let frame = band_frame(h, band_set, gap_floor)?;
    Ok(&frame * frame.adjoint())
}

/// Hamiltonian fiber at a node; a 1-D model is pulled back to a 2-D grid
/// through the first torus coordinate.
pub fn hamiltonian_fiber(model: &ModelInstance, grid: &TorusGrid, node: usize) -> Result<CMat> {
    let n = model.lattice_dim();
    let h = model.hamiltonian();
    if grid.lattice_dim() == n {
        Ok(h.fiber_at_node(grid, node))
    } else if grid.lattice_dim() > n {
        let t = grid.node(node);
        Ok(h.fiber(&t[..n]))
    } else {
        Err(Error::GridDimension {
            expected: n,
            found: grid.lattice_dim(),
        })
    }
}

fn with_node(err: Error, grid: &TorusGrid, node: usize) -> Error {
    match err {
        Error::GapTooSmall { gap, floor, .. } => Error::GapTooSmall {
            node: grid.node(node),
            gap,
            floor,
        },
        other => other,
    }
}

/// Fermi projector samples `t ↦ P(t)` for the selected bands.
pub fn projector_samples(
    model: &ModelInstance,
    band_set: &[usize],
    grid: &TorusGrid,
    gap_floor: f64,
) -> Result<FiberedSamples<CMat>> {
    check_hermitian(model)?;
    let values = (0..grid.len())
        .map(|node| {
            let h = hamiltonian_fiber(model, grid, node)?;
            spectral_projector(&h, band_set, gap_floor).map_err(|e| with_node(e, grid, node))
        })
        .collect::<Result<Vec<_>>>()?;
    FiberedSamples::new(grid.clone(), values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerryData {
    pub grid: TorusGrid,
    pub band_set: Vec<usize>,
    /// Flux through the plaquette with lower-left corner at each node, in
    /// node order, each in `(-π, π]`.
    pub plaquette_fluxes: Vec<f64>,
    pub chern: i64,
}

impl BerryData {
    pub fn total_flux(&self) -> f64 {
        self.plaquette_fluxes.iter().sum()
    }
}

fn link(a: &CMat, b: &CMat) -> Option<Complex64> {
    if a.ncols() == 0 {
        return Some(Complex64::new(1.0, 0.0));
    }
    let d = (a.adjoint() * b).determinant();
    let norm = d.norm();
    if norm <= EXACT_TOL {
        None
    } else {
        Some(d / norm)
    }
}

/// Chern number from orthonormal band frames sampled on a 2-D grid.
pub fn chern_from_frames(grid: &TorusGrid, band_set: &[usize], frames: &[CMat]) -> Result<BerryData> {
    if grid.lattice_dim() != 2 {
        return Err(Error::GridDimension {
            expected: 2,
            found: grid.lattice_dim(),
        });
    }
    if frames.len() != grid.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "{} frames for {} nodes",
            frames.len(),
            grid.len()
        )));
    }
    let points = grid.points();
    let inadmissible = |node: usize, flux: f64| {
        let l = grid.node_indices(node);
        Error::InadmissiblePlaquette {
            plaquette: (l[0], l[1]),
            flux,
            points,
        }
    };
    let mut links = vec![[Complex64::new(0.0, 0.0); 2]; grid.len()];
    for (node, slot) in links.iter_mut().enumerate() {
        for axis in 0..2 {
            let next = grid.neighbor(node, axis);
            slot[axis] = link(&frames[node], &frames[next]).ok_or_else(|| inadmissible(node, core::f64::consts::PI))?;
        }
    }
    let mut fluxes = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let right = grid.neighbor(node, 0);
        let up = grid.neighbor(node, 1);
        let loop_product = links[node][0] * links[right][1] * links[up][0].conj() * links[node][1].conj();
        // i·log of the loop, so the flux sum is 2π·c₁ with c₁ = (i/2π)∫tr F.
        let flux = loop_product.conj().arg();
        if flux.abs() >= core::f64::consts::PI - ADMISSIBILITY_MARGIN {
            return Err(inadmissible(node, flux));
        }
        fluxes.push(flux);
    }
    // Fixed summation order keeps the result reproducible.
    let total: f64 = fluxes.iter().sum();
    let winding = total / core::f64::consts::TAU;
    let chern = winding.round();
    if (winding - chern).abs() > INTEGRALITY_TOL {
        return Err(Error::InvariantViolation {
            check: "flux sum is an integer multiple of 2π".into(),
            residual: (winding - chern).abs(),
        });
    }
    Ok(BerryData {
        grid: grid.clone(),
        band_set: band_set.to_vec(),
        plaquette_fluxes: fluxes,
        chern: chern as i64,
    })
}

/// Chern number of the Bloch sub-bundle spanned by `band_set` (0-based,
/// ascending energy order). One-dimensional models are pulled back to `T²`.
pub fn chern_number(model: &ModelInstance, band_set: &[usize], grid: &TorusGrid, gap_floor: f64) -> Result<BerryData> {
    check_hermitian(model)?;
    check_band_set(band_set, model.q())?;
    if grid.lattice_dim() != 2 {
        return Err(Error::GridDimension {
            expected: 2,
            found: grid.lattice_dim(),
        });
    }
    let frames = (0..grid.len())
        .map(|node| {
            let h = hamiltonian_fiber(model, grid, node)?;
            band_frame(&h, band_set, gap_floor).map_err(|e| with_node(e, grid, node))
        })
        .collect::<Result<Vec<_>>>()?;
    chern_from_frames(grid, band_set, &frames)
}

/// Largest Frobenius increment between neighbouring nodes (wrapping around
/// the torus).
pub fn frame_continuity_check<T: FiberValue>(samples: &FiberedSamples<T>) -> f64 {
    let grid = samples.grid();
    let values = samples.values();
    let mut worst = 0.0f64;
    for node in 0..grid.len() {
        for axis in 0..grid.lattice_dim() {
            let next = grid.neighbor(node, axis);
            worst = worst.max(values[node].distance(&values[next]));
        }
    }
    worst
}

/// Reduced fractions `p/q` with `0 ≤ p < q ≤ q_max`, `gcd(p, q) = 1`, plus
/// the integer point `0/1`, ordered by `q` then `p`.
pub fn reduced_fractions(q_max: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(0, 1)];
    for q in 2..=q_max {
        for p in 1..q {
            if models::gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyRow {
    pub p: u64,
    pub q: u64,
    /// `[min, max]` of each band in ascending order.
    pub bands: Vec<(f64, f64)>,
}

/// Band intervals of the Mathieu Hamiltonian for every reduced flux with
/// denominator up to `q_max`.
pub fn butterfly(q_max: u64, points: usize, radius: usize) -> Result<Vec<ButterflyRow>> {
    if q_max < 2 {
        return Err(Error::InvalidArgument(alloc::format!("q_max = {q_max} < 2")));
    }
    let grid = TorusGrid::new(1, points)?;
    reduced_fractions(q_max)
        .into_iter()
        .map(|(p, q)| {
            let model = models::mathieu_model(p, q, radius)?;
            let bands = band_spectrum(&model, &grid)?;
            Ok(ButterflyRow {
                p,
                q,
                bands: bands.intervals(),
            })
        })
        .collect()
}
