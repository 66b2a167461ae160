//! Concrete physical frames: generators, wandering system and observables.
//!
//! Lattice models are laid out so that the truncated basis coordinates
//! `(k, a)` are the wandering coordinates: a chain site `n` is stored as
//! `(n mod q, ⌊n/q⌋)`, a plane site `(m, n)` as `(m mod q, ⌊m/q⌋, n)`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::finite_bf::FiniteGroupRep;
use crate::hilbert::{make_basis, LatticeOperator, MultiIndex, TruncatedBasis};
use crate::linalg::{self, CMat, CVec};
use crate::transform::{covariant_from_lattice, CovariantOperator, WanderingDecomposition};
use crate::{Error, Result};

pub const DEFAULT_RADIUS_1D: usize = 12;
pub const DEFAULT_RADIUS_2D: usize = 6;

/// Observable name under which every model stores its Hamiltonian.
pub const HAMILTONIAN: &str = "hamiltonian";

#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub name: String,
    pub decomposition: WanderingDecomposition,
    /// Covariant observables by name; always contains [`HAMILTONIAN`].
    pub observables: BTreeMap<String, CovariantOperator>,
    /// The lattice operators the model was built from.
    pub operators: BTreeMap<String, LatticeOperator>,
    /// Reduced flux `(p, q)`, when the model carries one.
    pub flux: Option<(u64, u64)>,
    pub metadata: String,
}

impl ModelInstance {
    pub fn hamiltonian(&self) -> &CovariantOperator {
        &self.observables[HAMILTONIAN]
    }

    pub fn q(&self) -> usize {
        self.decomposition.q()
    }

    pub fn lattice_dim(&self) -> usize {
        self.decomposition.lattice_dim()
    }

    pub fn operator(&self, name: &str) -> Option<&LatticeOperator> {
        self.operators.get(name)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

fn check_flux(p: u64, q: u64) -> Result<()> {
    if q == 0 || gcd(p, q) != 1 {
        return Err(Error::InvalidFlux { p, q });
    }
    Ok(())
}

fn check_radius(m: usize) -> Result<()> {
    if m < 3 {
        return Err(Error::InvalidArgument(alloc::format!("truncation radius {m} < 3")));
    }
    Ok(())
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Shift `e_n ↦ e_{n+1}` along the first lattice coordinate folded by `q`.
fn folded_shift(basis: &TruncatedBasis) -> Result<LatticeOperator> {
    let q = basis.q();
    LatticeOperator::from_action(basis.clone(), |k, a| {
        let mut a2 = a.to_vec();
        let k2 = if k + 1 < q {
            k + 1
        } else {
            a2[0] += 1;
            0
        };
        vec![(k2, a2, one())]
    })
}

/// Plain shift by one cell along `axis`.
fn cell_shift(basis: &TruncatedBasis, axis: usize) -> Result<LatticeOperator> {
    LatticeOperator::from_action(basis.clone(), |k, a| {
        let mut a2 = a.to_vec();
        a2[axis] += 1;
        vec![(k, a2, one())]
    })
}

fn hermitian_part(op: &LatticeOperator) -> Result<LatticeOperator> {
    op.add(&op.adjoint())
}

fn wandering_vectors(basis: &TruncatedBasis) -> Vec<CVec> {
    let origin: MultiIndex = vec![0; basis.lattice_dim()];
    (0..basis.q())
        .map(|k| basis.unit_vector(k, &origin).expect("origin is inside the truncation"))
        .collect()
}

fn decomposition(generators: Vec<LatticeOperator>, basis: &TruncatedBasis) -> Result<WanderingDecomposition> {
    let wandering = wandering_vectors(basis);
    let window = WanderingDecomposition::max_window(&generators, &wandering);
    WanderingDecomposition::new(generators, wandering, window)
}

fn assemble(
    name: &str,
    decomposition: WanderingDecomposition,
    operators: BTreeMap<String, LatticeOperator>,
    covariant: &[&str],
    flux: Option<(u64, u64)>,
    metadata: &str,
) -> Result<ModelInstance> {
    let mut observables = BTreeMap::new();
    for &key in covariant {
        let cov = covariant_from_lattice(&operators[key], &decomposition)?;
        observables.insert(key.to_string(), cov);
    }
    Ok(ModelInstance {
        name: name.to_string(),
        decomposition,
        observables,
        operators,
        flux,
        metadata: metadata.to_string(),
    })
}

/// Mathieu frame on `ℓ²(Z)` (the Fourier side of `L²(T)`): `u e_n = e_{n+1}`,
/// `v e_n = e^{-i2πnβ} e_n` with `β = p/q`, symmetry `w = u^q`, wandering
/// vectors `e_0, …, e_{q-1}` and `h = u + u† + v + v†`.
pub fn mathieu_model(p: u64, q: u64, m: usize) -> Result<ModelInstance> {
    check_flux(p, q)?;
    check_radius(m)?;
    let qs = q as usize;
    let basis = make_basis(qs, 1, m)?;
    let u = folded_shift(&basis)?;
    // n = q·a + k, so e^{-i2πpn/q} only depends on k.
    let v = LatticeOperator::from_action(basis.clone(), |k, a| {
        vec![(k, a.to_vec(), linalg::root_of_unity((p as i64) * k as i64, q))]
    })?;
    let w = cell_shift(&basis, 0)?;
    let h = hermitian_part(&u)?.add(&hermitian_part(&v)?)?;
    let dec = decomposition(vec![w.clone()], &basis)?;
    let mut ops = BTreeMap::new();
    ops.insert("u".to_string(), u);
    ops.insert("v".to_string(), v);
    ops.insert("w".to_string(), w);
    ops.insert(HAMILTONIAN.to_string(), h);
    assemble(
        "mathieu",
        dec,
        ops,
        &[HAMILTONIAN, "u", "v"],
        Some((p, q)),
        "Fourier basis of L2(T); symmetry w = u^q; sites n = q*a + k",
    )
}

/// The `q × q` matrices `u(t)` (subdiagonal ones, `e^{it}` in the top-right
/// corner) and `v(t) = diag(e^{-i2πpj/q})`, written down directly.
pub fn mathieu_fiber_closed_form(p: u64, q: u64, t: f64) -> Result<(CMat, CMat)> {
    check_flux(p, q)?;
    let qs = q as usize;
    let mut u = CMat::zeros(qs, qs);
    for j in 0..qs - 1 {
        u[(j + 1, j)] = one();
    }
    u[(0, qs - 1)] += linalg::cis(t);
    let v = CMat::from_diagonal(&CVec::from_fn(qs, |j, _| {
        linalg::root_of_unity((p as i64) * j as i64, q)
    }));
    Ok((u, v))
}

/// Hofstadter representation on `ℓ²(Z²)` in Landau gauge:
/// `U δ_{(m,n)} = δ_{(m+1,n)}`, `V δ_{(m,n)} = e^{-i2πβm} δ_{(m,n+1)}`,
/// symmetry shifts `S₁ = (q, 0)`, `S₂ = (0, 1)`, wandering vectors
/// `δ_{(j,0)}` and `H = U + U† + V + V†`.
pub fn hofstadter_model(p: u64, q: u64, m: usize) -> Result<ModelInstance> {
    check_flux(p, q)?;
    check_radius(m)?;
    let basis = make_basis(q as usize, 2, m)?;
    let u = folded_shift(&basis)?;
    let v = LatticeOperator::from_action(basis.clone(), |k, a| {
        vec![(k, vec![a[0], a[1] + 1], linalg::root_of_unity((p as i64) * k as i64, q))]
    })?;
    let s1 = cell_shift(&basis, 0)?;
    let s2 = cell_shift(&basis, 1)?;
    let h = hermitian_part(&u)?.add(&hermitian_part(&v)?)?;
    let dec = decomposition(vec![s1.clone(), s2.clone()], &basis)?;
    let mut ops = BTreeMap::new();
    ops.insert("U".to_string(), u);
    ops.insert("V".to_string(), v);
    ops.insert("S1".to_string(), s1);
    ops.insert("S2".to_string(), s2);
    ops.insert(HAMILTONIAN.to_string(), h);
    assemble(
        "hofstadter",
        dec,
        ops,
        &[HAMILTONIAN, "U", "V"],
        Some((p, q)),
        "Landau gauge, phase on the y-hop; symmetry shifts (q,0) and (0,1); sites m = q*a1 + k, n = a2",
    )
}

/// Period-`q` tight-binding chain `H = T + T† + diag(potential[n mod q])`
/// with symmetry `T^q`.
pub fn periodic_chain_model(q: usize, potential: &[f64], m: usize) -> Result<ModelInstance> {
    if q == 0 || potential.len() != q {
        return Err(Error::InvalidArgument(alloc::format!(
            "chain with q = {q} needs {q} potential values, got {}",
            potential.len()
        )));
    }
    if potential.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite potential".into()));
    }
    check_radius(m)?;
    let basis = make_basis(q, 1, m)?;
    let shift = folded_shift(&basis)?;
    let pot = LatticeOperator::from_action(basis.clone(), |k, a| {
        vec![(k, a.to_vec(), Complex64::new(potential[k], 0.0))]
    })?;
    let h = hermitian_part(&shift)?.add(&pot)?;
    let sym = cell_shift(&basis, 0)?;
    let dec = decomposition(vec![sym.clone()], &basis)?;
    let mut ops = BTreeMap::new();
    ops.insert("shift".to_string(), shift);
    ops.insert("potential".to_string(), pot);
    ops.insert("symmetry".to_string(), sym);
    ops.insert(HAMILTONIAN.to_string(), h);
    assemble(
        "chain",
        dec,
        ops,
        &[HAMILTONIAN, "shift"],
        None,
        "symmetry = translation by q sites; sites n = q*a + k",
    )
}

/// Regular representation of `Z_{p_1} × … × Z_{p_N}` on `C^{|F|}`, group
/// elements indexed lexicographically.
pub fn finite_group_model(orders: &[usize]) -> Result<FiniteGroupRep> {
    if orders.is_empty() || orders.iter().any(|&p| p < 2) {
        return Err(Error::InvalidArgument("every group order must be >= 2".into()));
    }
    let size: usize = orders.iter().product();
    let index = |g: &[usize]| g.iter().zip(orders).fold(0, |acc, (&x, &p)| acc * p + x);
    let element = |mut c: usize| {
        let mut g = vec![0usize; orders.len()];
        for (slot, &p) in g.iter_mut().zip(orders).rev() {
            *slot = c % p;
            c /= p;
        }
        g
    };
    let generators = (0..orders.len())
        .map(|j| {
            let mut u = CMat::zeros(size, size);
            for col in 0..size {
                let mut g = element(col);
                g[j] = (g[j] + 1) % orders[j];
                u[(index(&g), col)] = one();
            }
            u
        })
        .collect();
    FiniteGroupRep::new(orders.to_vec(), generators)
}
