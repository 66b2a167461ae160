//! Discrete Bloch-Floquet decomposition for finite abelian groups
//! `F = Z_{p_1} × … × Z_{p_N}`.
//!
//! The projection onto the joint eigenspace labelled `t ∈ ∏ {0..p_j-1}` is
//!
//! ```text
//! P_t = |F|⁻¹ Σ_n  ∏_j e^{-i 2π t_j n_j / p_j}  U_1^{n_1} ⋯ U_N^{n_N}
//! ```
//!
//! and `U_j P_t = e^{i 2π t_j / p_j} P_t`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, CMat};
use crate::{Error, Result, EXACT_TOL};

/// Seed for the Parseval probe vectors drawn by [`decompose_finite`].
pub const PROBE_SEED: u64 = 0x5eed_b10c;
pub const PROBE_COUNT: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroupRep {
    orders: Vec<usize>,
    dim: usize,
    generators: Vec<CMat>,
}

impl FiniteGroupRep {
    /// Validated constructor.
    pub fn new(orders: Vec<usize>, generators: Vec<CMat>) -> Result<Self> {
        let rep = Self::new_unchecked(orders, generators)?;
        rep.validate()?;
        Ok(rep)
    }

    /// Only checks shapes. Used to feed deliberately broken representations
    /// through [`decompose_finite`].
    pub fn new_unchecked(orders: Vec<usize>, generators: Vec<CMat>) -> Result<Self> {
        if orders.is_empty() || orders.len() != generators.len() {
            return Err(Error::InvalidArgument(format!(
                "{} orders for {} generators",
                orders.len(),
                generators.len()
            )));
        }
        if let Some(&p) = orders.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidArgument(format!("group order {p} < 2")));
        }
        let dim = generators[0].nrows();
        if generators.iter().any(|g| g.nrows() != dim || g.ncols() != dim) || dim == 0 {
            return Err(Error::InvalidArgument("generators must be square of equal size".into()));
        }
        Ok(Self {
            orders,
            dim,
            generators,
        })
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn group_order(&self) -> usize {
        self.orders.iter().product()
    }

    /// Dual-group labels in lexicographic order.
    pub fn labels(&self) -> Vec<Vec<usize>> {
        let total = self.group_order();
        (0..total)
            .map(|mut c| {
                let mut t = vec![0usize; self.orders.len()];
                for (slot, &p) in t.iter_mut().zip(&self.orders).rev() {
                    *slot = c % p;
                    c /= p;
                }
                t
            })
            .collect()
    }

    /// `U^n = U_1^{n_1} ⋯ U_N^{n_N}`.
    pub fn element(&self, n: &[usize]) -> CMat {
        let mut acc = linalg::identity(self.dim);
        for (g, &nj) in self.generators.iter().zip(n) {
            for _ in 0..nj {
                acc = g * acc;
            }
        }
        acc
    }

    /// Checks unitarity, `U_j^{p_j} = 1`, commutativity and algebraic
    /// compatibility, reporting the first failure.
    pub fn validate(&self) -> Result<()> {
        let id = linalg::identity(self.dim);
        for (j, g) in self.generators.iter().enumerate() {
            let r = linalg::frobenius(&(g.adjoint() * g - &id));
            if r > EXACT_TOL {
                return Err(violation(format!("generator {j} is not unitary"), r));
            }
        }
        for (j, (g, &p)) in self.generators.iter().zip(&self.orders).enumerate() {
            let mut power = id.clone();
            for _ in 0..p {
                power = g * power;
            }
            let r = linalg::frobenius(&(power - &id));
            if r > EXACT_TOL {
                return Err(violation(format!("generator {j} does not satisfy U^{p} = 1"), r));
            }
        }
        for i in 0..self.generators.len() {
            for j in i + 1..self.generators.len() {
                let (a, b) = (&self.generators[i], &self.generators[j]);
                let r = linalg::frobenius(&(a * b - b * a));
                if r > EXACT_TOL {
                    return Err(violation(format!("generators {i} and {j} do not commute"), r));
                }
            }
        }
        // Frobenius Gram matrix of all group elements must be nonsingular.
        let elements: Vec<CMat> = self.labels().iter().map(|n| self.element(n)).collect();
        let m = elements.len();
        let gram = CMat::from_fn(m, m, |r, c| elements[r].dotc(&elements[c]));
        let values = linalg::eigvalsh(&gram);
        let (lo, hi) = (values[0], values[m - 1]);
        if lo <= linalg::RANK_RTOL * hi {
            return Err(violation(
                "group elements are linearly dependent (not algebraically compatible)".into(),
                lo,
            ));
        }
        Ok(())
    }

    fn check_label(&self, t: &[usize]) -> Result<()> {
        if t.len() != self.orders.len() || t.iter().zip(&self.orders).any(|(&x, &p)| x >= p) {
            return Err(Error::LabelOutOfRange {
                t: t.to_vec(),
                orders: self.orders.clone(),
            });
        }
        Ok(())
    }

    /// `e^{i 2π t_j / p_j}`, the eigenvalue of `U_j` on `Ran P_t`.
    pub fn character(&self, j: usize, t: &[usize]) -> Complex64 {
        linalg::root_of_unity(-(t[j] as i64), self.orders[j] as u64)
    }
}

fn violation(check: alloc::string::String, residual: f64) -> Error {
    Error::InvariantViolation { check, residual }
}

/// The `t`-th Bloch-Floquet projection.
pub fn bf_projector(rep: &FiniteGroupRep, t: &[usize]) -> Result<CMat> {
    rep.check_label(t)?;
    let mut acc = CMat::zeros(rep.dim, rep.dim);
    for n in rep.labels() {
        let mut phase = Complex64::new(1.0, 0.0);
        for j in 0..n.len() {
            phase *= linalg::root_of_unity((t[j] * n[j]) as i64, rep.orders[j] as u64);
        }
        acc += rep.element(&n) * phase;
    }
    Ok(acc.unscale(rep.group_order() as f64))
}

/// Residuals of the projector identities, each a Frobenius norm maximized
/// over labels (or label pairs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorResiduals {
    /// `‖P_t† − P_t‖`.
    pub self_adjoint: f64,
    /// `‖P_t P_t' − δ_{tt'} P_t‖`.
    pub orthogonality: f64,
    /// Smallest `‖P_t‖`; must be nonzero.
    pub min_norm: f64,
    /// `‖Σ_t P_t − 1‖`.
    pub completeness: f64,
    /// `‖U_j P_t − e^{i2πt_j/p_j} P_t‖`.
    pub eigen_relation: f64,
}

impl ProjectorResiduals {
    pub fn passes(&self, tol: f64) -> bool {
        self.self_adjoint <= tol
            && self.orthogonality <= tol
            && self.min_norm > tol
            && self.completeness <= tol
            && self.eigen_relation <= tol
    }
}

pub fn projector_residuals(rep: &FiniteGroupRep, projectors: &[CMat]) -> ProjectorResiduals {
    let labels = rep.labels();
    let mut out = ProjectorResiduals {
        self_adjoint: 0.0,
        orthogonality: 0.0,
        min_norm: f64::INFINITY,
        completeness: 0.0,
        eigen_relation: 0.0,
    };
    let mut sum = CMat::zeros(rep.dim, rep.dim);
    for (i, (t, p)) in labels.iter().zip(projectors).enumerate() {
        out.self_adjoint = out.self_adjoint.max(linalg::hermitian_defect(p));
        out.min_norm = out.min_norm.min(linalg::frobenius(p));
        for (i2, p2) in projectors.iter().enumerate() {
            let prod = p * p2;
            let r = if i == i2 {
                linalg::frobenius(&(prod - p))
            } else {
                linalg::frobenius(&prod)
            };
            out.orthogonality = out.orthogonality.max(r);
        }
        for (j, g) in rep.generators.iter().enumerate() {
            let r = linalg::frobenius(&(g * p - p * rep.character(j, t)));
            out.eigen_relation = out.eigen_relation.max(r);
        }
        sum += p;
    }
    out.completeness = linalg::frobenius(&(sum - linalg::identity(rep.dim)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDecomposition {
    pub labels: Vec<Vec<usize>>,
    pub projectors: Vec<CMat>,
    /// Orthonormal columns spanning `Ran P_t`, one matrix per label.
    pub subspace_bases: Vec<CMat>,
}

impl FiniteDecomposition {
    pub fn ranks(&self) -> Vec<usize> {
        self.subspace_bases.iter().map(|b| b.ncols()).collect()
    }
}

/// Worst `|Σ_t ‖P_t φ‖² − ‖φ‖²|` over `count` seeded random probe vectors.
pub fn parseval_defect(projectors: &[CMat], dim: usize, seed: u64, count: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let phi = linalg::random_cvec(&mut rng, dim);
        let total: f64 = projectors.iter().map(|p| (p * &phi).norm_squared()).sum();
        worst = worst.max((total - phi.norm_squared()).abs());
    }
    worst
}

pub fn decompose_finite(rep: &FiniteGroupRep) -> Result<FiniteDecomposition> {
    rep.validate()?;
    let labels = rep.labels();
    let projectors = labels
        .iter()
        .map(|t| bf_projector(rep, t))
        .collect::<Result<Vec<_>>>()?;

    let res = projector_residuals(rep, &projectors);
    let checks = [
        ("P_t is self-adjoint", res.self_adjoint),
        ("P_t P_t' = δ P_t", res.orthogonality),
        ("Σ_t P_t = 1", res.completeness),
        ("U_j P_t = z_j^t P_t", res.eigen_relation),
    ];
    for (name, r) in checks {
        if r > EXACT_TOL {
            return Err(violation(name.into(), r));
        }
    }
    if res.min_norm <= EXACT_TOL {
        return Err(violation("P_t ≠ 0".into(), res.min_norm));
    }

    let subspace_bases: Vec<CMat> = projectors.iter().map(linalg::range_basis).collect();
    let total_rank: usize = subspace_bases.iter().map(|b| b.ncols()).sum();
    if total_rank != rep.dim {
        return Err(violation(
            format!("ranks sum to {total_rank}, expected {}", rep.dim),
            (total_rank as f64 - rep.dim as f64).abs(),
        ));
    }
    let parseval = parseval_defect(&projectors, rep.dim, PROBE_SEED, PROBE_COUNT);
    if parseval > EXACT_TOL {
        return Err(violation("Σ_t ‖P_t φ‖² = ‖φ‖²".into(), parseval));
    }
    Ok(FiniteDecomposition {
        labels,
        projectors,
        subspace_bases,
    })
}
