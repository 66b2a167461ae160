use bloch_fiber::hilbert::{
    commutator_norm, make_basis, orbit_family, seminorm_pm, unitarity_defect, verify_wandering, CoeffMap,
    LatticeOperator, TruncatedBasis,
};
use bloch_fiber::linalg::{cis, CMat, CVec};
use bloch_fiber::models::mathieu_model;
use bloch_fiber::{Complex64, Error, EXACT_TOL};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Plain chain index n = q·a + k on a q-folded basis.
fn chain_index(q: usize, k: usize, a: i64) -> i64 {
    q as i64 * a + k as i64
}

/// Largest singular value by power iteration on `B†B`.
fn power_norm(b: &CMat) -> f64 {
    let g = b.adjoint() * b;
    let mut x = CVec::from_fn(g.ncols(), |i, _| Complex64::new(1.0 + i as f64 * 1e-3, 0.5));
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let y = &g * &x;
        lambda = y.norm() / x.norm();
        x = y.unscale(y.norm());
    }
    lambda.sqrt()
}

#[test]
fn basis_dimensions() {
    assert_eq!(make_basis(1, 1, 1).unwrap().dim(), 3);
    assert_eq!(make_basis(3, 1, 10).unwrap().dim(), 63);
    assert_eq!(make_basis(3, 2, 5).unwrap().dim(), 363);
    assert!(matches!(
        make_basis(4, 3, 100),
        Err(Error::DimensionOverflow { .. })
    ));
}

#[test]
fn self_commutator_vanishes() {
    let model = mathieu_model(1, 3, 8).unwrap();
    let h = model.operator("hamiltonian").unwrap();
    assert_eq!(commutator_norm(h, h, one()).unwrap(), 0.0);
}

#[test]
fn mathieu_relations() {
    let model = mathieu_model(1, 3, 12).unwrap();
    let u = model.operator("u").unwrap();
    let v = model.operator("v").unwrap();
    let w = model.operator("w").unwrap();
    // uv = e^{i2πβ} vu
    assert!(commutator_norm(u, v, cis(std::f64::consts::TAU / 3.0)).unwrap() <= EXACT_TOL);
    assert!(commutator_norm(w, u, one()).unwrap() <= EXACT_TOL);
    assert!(commutator_norm(w, v, one()).unwrap() <= EXACT_TOL);
    for g in [u, v, w] {
        assert!(unitarity_defect(g).unwrap() <= EXACT_TOL);
    }
}

#[test]
fn plain_commutator_matches_dense_svd() {
    let model = mathieu_model(1, 3, 12).unwrap();
    let u = model.operator("u").unwrap();
    let v = model.operator("v").unwrap();
    let got = commutator_norm(u, v, one()).unwrap();

    // Oracle: dense matrices on the plain chain, column block well inside.
    let basis = u.basis();
    let dim = basis.dim();
    let (mut ud, mut vd) = (CMat::zeros(dim, dim), CMat::zeros(dim, dim));
    let index_of = |n: i64| {
        let (a, k) = (n.div_euclid(3), n.rem_euclid(3) as usize);
        basis.index(k, &[a])
    };
    for col in 0..dim {
        let (k, a) = basis.site(col);
        let n = chain_index(3, k, a[0]);
        if let Some(row) = index_of(n + 1) {
            ud[(row, col)] = one();
        }
        vd[(col, col)] = cis(-std::f64::consts::TAU * n as f64 / 3.0);
    }
    let c = &ud * &vd - &vd * &ud;
    let inner: Vec<usize> = (0..dim).filter(|&i| basis.site(i).1[0].abs() <= 6).collect();
    let block = CMat::from_fn(dim, inner.len(), |r, j| c[(r, inner[j])]);
    let oracle = power_norm(&block);
    assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
    assert!((got - 3f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn commutator_requires_same_basis_and_unit_phase() {
    let a = LatticeOperator::identity(make_basis(1, 1, 5).unwrap());
    let b = LatticeOperator::identity(make_basis(1, 1, 6).unwrap());
    assert_eq!(commutator_norm(&a, &b, one()).unwrap_err(), Error::BasisMismatch);
    assert!(commutator_norm(&a, &a, Complex64::new(2.0, 0.0)).is_err());
}

fn unit_vectors(basis: &TruncatedBasis, sites: &[(usize, i64)]) -> Vec<CVec> {
    sites.iter().map(|&(k, a)| basis.unit_vector(k, &[a]).unwrap()).collect()
}

#[test]
fn mathieu_wandering_and_shifted_family() {
    let model = mathieu_model(1, 3, 12).unwrap();
    let w = model.operator("w").unwrap().clone();
    let basis = w.basis().clone();
    let gens = vec![w];
    let report = verify_wandering(&gens, &unit_vectors(&basis, &[(0, 0), (1, 0), (2, 0)]), 8).unwrap();
    assert!(report.passed, "{report:?}");
    assert_eq!(report.max_violation, 0.0);
    // e_1, e_2, e_3 = e_{(0, a=1)}: same cardinality.
    let shifted = unit_vectors(&basis, &[(1, 0), (2, 0), (0, 1)]);
    let report = verify_wandering(&gens, &shifted, 8).unwrap();
    assert!(report.passed, "{report:?}");

    let (_, family) = orbit_family(&gens, &shifted, 8);
    let gram = family.adjoint() * &family;
    let defect = (gram - CMat::identity(family.ncols(), family.ncols())).norm();
    assert!(defect <= EXACT_TOL);
}

#[test]
fn wandering_is_deterministic() {
    let model = mathieu_model(2, 3, 10).unwrap();
    let w = model.operator("w").unwrap().clone();
    let cands = unit_vectors(w.basis(), &[(0, 0), (1, 0), (2, 0)]);
    let gens = vec![w];
    assert_eq!(verify_wandering(&gens, &cands, 6).unwrap(), verify_wandering(&gens, &cands, 6).unwrap());
}

#[test]
fn negative_controls() {
    let model = mathieu_model(1, 3, 12).unwrap();
    let basis = model.operator("u").unwrap().basis().clone();
    let e0 = unit_vectors(&basis, &[(0, 0)]);

    // Diagonal unitary: e_0 is an eigenvector.
    let v = model.operator("v").unwrap().clone();
    let r = verify_wandering(&[v], &e0, 6).unwrap();
    assert!(!r.passed && r.max_violation > 0.5);
    assert!(!r.failures.is_empty());

    let id = LatticeOperator::identity(basis.clone());
    let r = verify_wandering(&[id], &e0, 6).unwrap();
    assert!(!r.passed);

    // Swapping the two sites of each cell is unitary and self-adjoint.
    let b2 = make_basis(2, 1, 12).unwrap();
    let swap = LatticeOperator::from_action(b2.clone(), |k, a| vec![(1 - k, a.to_vec(), one())]).unwrap();
    assert_eq!(swap.adjoint(), swap);
    let r = verify_wandering(&[swap], &unit_vectors(&b2, &[(0, 0)]), 4).unwrap();
    assert!(!r.passed && r.max_violation > 0.5);
}

#[test]
fn window_precondition() {
    let model = mathieu_model(1, 3, 12).unwrap();
    let w = model.operator("w").unwrap().clone();
    let cands = unit_vectors(w.basis(), &[(0, 0), (1, 0), (2, 0)]);
    assert!(matches!(
        verify_wandering(&[w], &cands, 12),
        Err(Error::WindowTooLarge { .. })
    ));
}

#[test]
fn seminorm_examples() {
    let mut psi0 = CoeffMap::new();
    psi0.insert((0, vec![0]), one());
    assert!((seminorm_pm(1, 1, &psi0, 0) - 1.0).abs() <= 1e-15);

    // D_1 by brute force: pairs (k, a) with k ≤ min(1, q−1) and |a| ≤ 1.
    let mut phi = psi0.clone();
    phi.insert((0, vec![1]), one());
    for q in [1usize, 2, 3] {
        let d1 = (0..q.min(2)).flat_map(|_| -1i64..=1).count() as f64;
        assert!((seminorm_pm(q, 1, &phi, 1) - (d1 * 2.0).sqrt()).abs() <= 1e-12);
    }
}
