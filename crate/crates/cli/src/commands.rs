use std::f64::consts::TAU;
use std::path::PathBuf;

use bloch_fiber::finite_bf::{self, decompose_finite, parseval_defect, projector_residuals, FiniteGroupRep};
use bloch_fiber::hilbert::{self, cube, CoeffMap};
use bloch_fiber::linalg::{self, cis, CMat, CVec};
use bloch_fiber::models::{self, ModelInstance};
use bloch_fiber::topology::{self, fiber_energies};
use bloch_fiber::transform::{
    self, compose_covariant, CovariantOperator, TorusGrid, WanderingDecomposition,
};
use bloch_fiber::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ModelKind, RunConfig};
use crate::output::{fmt_real, write_atomic, write_json, Csv};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Verify,
    Bands,
    Chern,
    Butterfly,
    Decompose,
}

/// Runs one command and returns the files it wrote.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Verify => cmd_verify(cfg),
        Command::Bands => cmd_bands(cfg).map(|p| vec![p]),
        Command::Chern => cmd_chern(cfg).map(|p| vec![p]),
        Command::Butterfly => cmd_butterfly(cfg).map(|p| vec![p]),
        Command::Decompose => cmd_decompose(cfg).map(|p| vec![p]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        }
    }
}

#[derive(Debug, Serialize)]
struct Report {
    model: String,
    passed: bool,
    checks: Vec<CheckResult>,
}

fn check_error(err: Error) -> CliError {
    CliError::Check(err.to_string())
}

// ----- verify ---------------------------------------------------------------

pub fn cmd_verify(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let checks = if cfg.model == ModelKind::FiniteGroup {
        finite_group_checks(cfg)?
    } else {
        let model = cfg.build_model()?;
        lattice_checks(cfg, &model)?
    };
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let report = Report {
        model: format!("{:?}", cfg.model).to_lowercase(),
        passed: failed.is_empty(),
        checks: checks.clone(),
    };
    let path = write_json(&cfg.output_dir(), "report.json", &report)?;
    if failed.is_empty() {
        Ok(vec![path])
    } else {
        Err(CliError::Check(format!("failed checks: {}", failed.join(", "))))
    }
}

fn finite_group_checks(cfg: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let tol = cfg.tolerances.exact;
    let rep = models::finite_group_model(&cfg.orders()).map_err(|e| CliError::Config(e.to_string()))?;
    let projectors = rep
        .labels()
        .iter()
        .map(|t| finite_bf::bf_projector(&rep, t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(check_error)?;
    let r = projector_residuals(&rep, &projectors);
    Ok(vec![
        CheckResult::new("projector.self_adjoint", r.self_adjoint, tol),
        CheckResult::new("projector.orthogonality", r.orthogonality, tol),
        CheckResult {
            passed: r.min_norm > tol,
            ..CheckResult::new("projector.nonzero", r.min_norm, tol)
        },
        CheckResult::new("projector.completeness", r.completeness, tol),
        CheckResult::new("projector.eigen_relation", r.eigen_relation, tol),
        CheckResult::new(
            "parseval",
            parseval_defect(&projectors, rep.dim(), cfg.seed(), finite_bf::PROBE_COUNT),
            tol,
        ),
    ])
}

fn candidate_vectors(cfg: &RunConfig, model: &ModelInstance) -> Result<Vec<CVec>, CliError> {
    let Some(cands) = &cfg.candidates else {
        return Ok(model.decomposition.wandering_vectors().to_vec());
    };
    let basis = model.decomposition.basis();
    cands
        .iter()
        .map(|c| {
            basis
                .unit_vector(c[0] as usize, &c[1..])
                .ok_or_else(|| CliError::Config(format!("candidate {c:?} lies outside the truncation")))
        })
        .collect()
}

fn random_table<R: Rng>(rng: &mut R, q: usize, n: usize, hop: i64, truncation: usize) -> CovariantOperator {
    let entries: Vec<_> = (0..6)
        .map(|_| {
            let b = (0..n).map(|_| rng.gen_range(-hop..=hop)).collect();
            ((rng.gen_range(0..q), rng.gen_range(0..q), b), linalg::random_complex(rng))
        })
        .collect();
    CovariantOperator::from_table(q, n, truncation, entries).expect("hop range fits the truncation")
}

fn lattice_checks(cfg: &RunConfig, model: &ModelInstance) -> Result<Vec<CheckResult>, CliError> {
    let tol = cfg.tolerances.exact;
    let mut out = Vec::new();
    let dec = &model.decomposition;
    let gens = dec.generators();
    let q = model.q();
    let n = model.lattice_dim();
    let m = dec.basis().radius();

    let cands = candidate_vectors(cfg, model)?;
    let window = WanderingDecomposition::max_window(gens, &cands);
    match hilbert::verify_wandering_with_tol(gens, &cands, window, tol) {
        Ok(r) => {
            out.push(CheckResult::new("wandering.orthonormality", r.max_violation, tol));
            out.push(CheckResult::new("wandering.cyclic_defect", r.cyclic_defect, tol));
            if cands.len() != q {
                out.push(CheckResult::new("wandering.cardinality", (cands.len() as f64 - q as f64).abs(), 0.0));
            }
        }
        Err(e) => {
            eprintln!("wandering check could not run: {e}");
            out.push(CheckResult::new("wandering.orthonormality", f64::INFINITY, tol));
        }
    }

    let unitarity = gens
        .iter()
        .map(hilbert::unitarity_defect)
        .collect::<Result<Vec<_>, _>>()
        .map_err(check_error)?;
    out.push(CheckResult::new("generators.unitarity", unitarity.into_iter().fold(0.0, f64::max), tol));
    let one = Complex64::new(1.0, 0.0);
    if gens.len() > 1 {
        let mut worst = 0.0f64;
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                worst = worst.max(hilbert::commutator_norm(&gens[i], &gens[j], one).map_err(check_error)?);
            }
        }
        out.push(CheckResult::new("generators.commute", worst, tol));
    }
    if let Some((p, fq)) = model.flux {
        let (a, b) = match cfg.model {
            ModelKind::Hofstadter => ("U", "V"),
            _ => ("u", "v"),
        };
        let phase = cis(TAU * p as f64 / fq as f64);
        let norm = hilbert::commutator_norm(&model.operators[a], &model.operators[b], phase).map_err(check_error)?;
        out.push(CheckResult::new("relation.flux_phase", norm, tol));
    }
    let h_lattice = &model.operators[models::HAMILTONIAN];
    let mut cov = 0.0f64;
    for g in gens {
        cov = cov.max(hilbert::commutator_norm(h_lattice, g, one).map_err(check_error)?);
    }
    out.push(CheckResult::new("hamiltonian.covariance", cov, tol));
    out.push(CheckResult::new("hamiltonian.hermitian", model.hamiltonian().hermitian_defect(), tol));

    let grid = TorusGrid::new(n, cfg.points()).map_err(check_error)?;
    let fiber_defect = (0..grid.len())
        .into_par_iter()
        .map(|node| linalg::hermitian_defect(&model.hamiltonian().fiber_at_node(&grid, node)))
        .reduce(|| 0.0, f64::max);
    out.push(CheckResult::new("fiber.hermitian", fiber_defect, tol));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    // Parseval and inversion on vectors resolved by the grid; a 16-point grid
    // already resolves radius 3, so larger grids only cost time.
    let tgrid = TorusGrid::new(n, cfg.points().min(16)).map_err(check_error)?;
    let radius = 3.min((tgrid.points() - 1) / 2);
    let (mut parseval, mut round_trip) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let coeffs: CoeffMap = (0..q)
            .flat_map(|k| cube(n, radius).map(move |b| (k, b)))
            .map(|key| (key, linalg::random_complex(&mut rng)))
            .collect();
        let samples = transform::transform_vector(q, &coeffs, &tgrid).map_err(check_error)?;
        parseval = parseval.max((transform::quadrature_norm_sqr(&samples) - transform::coeff_norm_sqr(&coeffs)).abs());
        let back = transform::inverse_transform(&samples).map_err(check_error)?;
        for (key, z) in &coeffs {
            round_trip = round_trip.max((back.coeffs.get(key).copied().unwrap_or_default() - z).norm());
        }
    }
    out.push(CheckResult::new("transform.parseval", parseval, tol));
    out.push(CheckResult::new("transform.round_trip", round_trip, tol));

    let reach = (m.saturating_sub(dec.wandering_radius()) / dec.generator_hop().max(1))
        .min(6)
        .min(cfg.points() - 1);
    let mut haar = 0.0f64;
    for k in 0..q {
        for a in cube(n, reach) {
            haar = haar.max(transform::haar_moment_check(dec, k, &a, &grid).map_err(check_error)?);
        }
    }
    out.push(CheckResult::new("haar.moments", haar, tol));

    let hop = if m >= 4 { 2 } else { 1 };
    let (mut hom, mut inv) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let a = random_table(&mut rng, q, n, hop, m);
        let b = random_table(&mut rng, q, n, hop, m);
        let ab = compose_covariant(&a, &b).map_err(check_error)?;
        for _ in 0..8 {
            let t: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
            let (fa, fb) = (a.fiber(&t), b.fiber(&t));
            hom = hom.max(linalg::frobenius(&(ab.fiber(&t) - &fa * &fb)));
            inv = inv.max(linalg::frobenius(&(a.adjoint().fiber(&t) - fa.adjoint())));
        }
    }
    out.push(CheckResult::new("fiber.homomorphism", hom, tol));
    out.push(CheckResult::new("fiber.adjoint", inv, tol));

    if let (ModelKind::Mathieu, Some((p, fq))) = (cfg.model, model.flux) {
        let mut worst = 0.0f64;
        for _ in 0..16 {
            let t = rng.gen_range(0.0..TAU);
            let (u, v) = models::mathieu_fiber_closed_form(p, fq, t).map_err(check_error)?;
            worst = worst.max(linalg::frobenius(&(model.observables["u"].fiber(&[t]) - u)));
            worst = worst.max(linalg::frobenius(&(model.observables["v"].fiber(&[t]) - v)));
        }
        out.push(CheckResult::new("fiber.closed_form", worst, tol));
    }
    Ok(out)
}

// ----- bands ----------------------------------------------------------------

fn require_hermitian(model: &ModelInstance, tol: f64) -> Result<(), CliError> {
    let defect = model.hamiltonian().hermitian_defect();
    if defect > tol {
        return Err(check_error(Error::NotHermitian(defect)));
    }
    Ok(())
}

pub fn cmd_bands(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let model = cfg.build_model()?;
    require_hermitian(&model, cfg.tolerances.exact)?;
    let grid = TorusGrid::new(model.lattice_dim(), cfg.points()).map_err(check_error)?;
    let h = model.hamiltonian();
    let energies: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|node| fiber_energies(&h.fiber_at_node(&grid, node)))
        .collect();
    let header: &[&str] = if grid.lattice_dim() == 2 {
        &["t1", "t2", "band_index", "energy"]
    } else {
        &["t1", "band_index", "energy"]
    };
    let mut csv = Csv::new(header);
    for (node, e) in energies.iter().enumerate() {
        let t: Vec<String> = grid.node(node).into_iter().map(fmt_real).collect();
        for (r, &x) in e.iter().enumerate() {
            csv.row(t.iter().cloned().chain([r.to_string(), fmt_real(x)]));
        }
    }
    write_atomic(&cfg.output_dir(), "bands.csv", csv.into_string().as_bytes())
}

// ----- chern ----------------------------------------------------------------

#[derive(Debug, Serialize)]
struct ChernBand {
    band_set: Vec<usize>,
    chern: i64,
    /// Smallest distance between the selected energies and the rest; `null`
    /// when either side is empty.
    min_gap: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ChernReport {
    p: Option<u64>,
    q: u64,
    grid: usize,
    bands: Vec<ChernBand>,
}

fn fmt_node(t: &[f64]) -> String {
    let parts: Vec<String> = t.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

pub fn cmd_chern(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let model = cfg.build_model()?;
    require_hermitian(&model, cfg.tolerances.exact)?;
    let grid = TorusGrid::new(2, cfg.points()).map_err(check_error)?;
    let fibers: Vec<CMat> = (0..grid.len())
        .into_par_iter()
        .map(|node| topology::hamiltonian_fiber(&model, &grid, node))
        .collect::<Result<_, _>>()
        .map_err(check_error)?;
    let energies: Vec<Vec<f64>> = fibers.par_iter().map(fiber_energies).collect();
    let floor = cfg.tolerances.gap_floor;

    let mut bands = Vec::new();
    for band_set in cfg.band_sets(model.q()) {
        let frames: Vec<CMat> = fibers
            .par_iter()
            .enumerate()
            .map(|(node, h)| {
                topology::band_frame(h, &band_set, floor).map_err(|e| match e {
                    Error::GapTooSmall { gap, floor, .. } => CliError::Check(format!(
                        "gap failure for bands {band_set:?} at t = {}: gap {gap:e} below floor {floor:e}",
                        fmt_node(&grid.node(node))
                    )),
                    other => check_error(other),
                })
            })
            .collect::<Result<_, _>>()?;
        let berry = topology::chern_from_frames(&grid, &band_set, &frames).map_err(check_error)?;
        let gap = energies
            .iter()
            .map(|e| topology::set_separation(e, &band_set))
            .fold(f64::INFINITY, f64::min);
        bands.push(ChernBand {
            band_set,
            chern: berry.chern,
            min_gap: gap.is_finite().then_some(gap),
        });
    }
    let report = ChernReport {
        p: cfg.flux().map(|f| f.0),
        q: cfg.q(),
        grid: cfg.points(),
        bands,
    };
    write_json(&cfg.output_dir(), "chern.json", &report)
}

// ----- butterfly ------------------------------------------------------------

pub fn cmd_butterfly(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let q_max = cfg.q_max();
    if q_max < 2 {
        return Err(CliError::Config(format!("q_max = {q_max} must be at least 2")));
    }
    let rows = topology::butterfly(q_max, cfg.points(), cfg.truncation()).map_err(check_error)?;
    let mut csv = Csv::new(&["p", "q", "band_index", "emin", "emax"]);
    for row in &rows {
        for (r, (lo, hi)) in row.bands.iter().enumerate() {
            csv.row([row.p.to_string(), row.q.to_string(), r.to_string(), fmt_real(*lo), fmt_real(*hi)]);
        }
    }
    write_atomic(&cfg.output_dir(), "butterfly.csv", csv.into_string().as_bytes())
}

// ----- decompose ------------------------------------------------------------

#[derive(Debug, Serialize)]
struct SubspaceBasis {
    label: Vec<usize>,
    /// Row-major `d × rank` real and imaginary parts.
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct DecompositionReport {
    orders: Vec<usize>,
    dim: usize,
    labels: Vec<Vec<usize>>,
    ranks: Vec<usize>,
    bases: Vec<SubspaceBasis>,
}

fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    if cfg.model != ModelKind::FiniteGroup {
        return Err(CliError::Config("decompose needs model = finite_group".into()));
    }
    let orders = cfg.orders();
    let regular = models::finite_group_model(&orders).map_err(|e| CliError::Config(e.to_string()))?;
    let mut generators = regular.generators().to_vec();
    if cfg.corrupt_generator {
        let g = &mut generators[0];
        g[(1, 0)] *= Complex64::new(0.0, 1.0);
    }
    let rep = FiniteGroupRep::new_unchecked(orders.clone(), generators).map_err(check_error)?;
    let dec = decompose_finite(&rep).map_err(check_error)?;
    let bases = dec
        .labels
        .iter()
        .zip(&dec.subspace_bases)
        .map(|(t, b)| SubspaceBasis {
            label: t.clone(),
            re: b.row_iter().map(|r| r.iter().map(|z| clean(z.re)).collect()).collect(),
            im: b.row_iter().map(|r| r.iter().map(|z| clean(z.im)).collect()).collect(),
        })
        .collect();
    let report = DecompositionReport {
        orders,
        dim: rep.dim(),
        ranks: dec.ranks(),
        labels: dec.labels.clone(),
        bases,
    };
    write_json(&cfg.output_dir(), "decomposition.json", &report)
}
