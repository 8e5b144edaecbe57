//! POVMs, classical Fisher information and attaining measurements.
//!
//! An outcome `m` of a measurement on the mixed model attains the quantum
//! information only if `m ∝ |γ><γ|` with `<γ|ψ1> = r <γ|ψ2>` for a real `r`
//! fixed by the two roots of
//!
//! ```text
//! k + k^{1/2} w'(2w − 1)/(w(1 − w)) − I = 0,     r = (2w − 1) I1^{1/2} / (k^{1/2} − w'/w)
//! ```
//!
//! [`attain_check`] evaluates each of those conditions separately and always
//! grounds its verdict in the numeric gap `I − i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{c, eig_hermitian, fix_phase_real, inner, sqrt_psd, ComplexMatrix, C64};
use crate::model::{bloch_of, validate_density, BlochVector, DerivativeMethod, Ket, QubitModel};
use crate::sld::{model_qfi, model_sld_closed};

/// Outcomes with probability at or below this are outside the support.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Second eigenvalue bound (relative to `‖m‖_F`) for a rank-one element.
pub const RANK_ONE_TOL: f64 = 1e-8;

/// Imaginary part bound (relative to `1 + |ratio|`) for a real ratio.
pub const REALITY_TOL: f64 = 1e-8;

/// Distance (relative to `max(1, |r|)`) for a ratio to match an expected `r`.
pub const R_MATCH_TOL: f64 = 1e-6;

/// Relative gap `I − i` (against `max(1, I)`) that still counts as attained.
pub const GAP_TOL: f64 = 1e-9;

const MAX_NORMALIZER_ATTEMPTS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct PovmElement {
    pub label: String,
    pub m: ComplexMatrix,
}

/// Finite qubit POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    /// Validates: 2x2 Hermitian PSD elements summing to the identity.
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let mut sum = ComplexMatrix::zeros(2);
        for e in &elements {
            let m = &e.m;
            if m.dim() != 2 {
                return Err(Error::InvalidPovm(format!("element `{}` has dimension {}", e.label, m.dim())));
            }
            if !m.is_finite() {
                return Err(Error::InvalidPovm(format!("element `{}` has non-finite entries", e.label)));
            }
            if !m.is_hermitian(1e-12) {
                return Err(Error::InvalidPovm(format!("element `{}` is not Hermitian", e.label)));
            }
            let min = eig_hermitian(m)?.eigenvalues[0];
            if min < -1e-10 {
                return Err(Error::InvalidPovm(format!(
                    "element `{}` has negative eigenvalue {min:e}",
                    e.label
                )));
            }
            sum = &sum + m;
        }
        let defect = (&sum - &ComplexMatrix::identity(2)).frob_norm();
        if defect > 1e-10 {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {defect:e}")));
        }
        Ok(Self { elements })
    }

    pub fn from_matrices(ms: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(
            ms.into_iter()
                .enumerate()
                .map(|(i, m)| PovmElement { label: i.to_string(), m })
                .collect(),
        )
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|e| e.label.as_str()).collect()
    }
}

/// Trace-rule outcome probabilities, clamped to `[0, 1]`.
pub fn probs(rho: &ComplexMatrix, povm: &Povm) -> Result<Vec<f64>> {
    validate_density(rho)?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    let mut out = Vec::with_capacity(povm.len());
    for e in povm.elements() {
        let p = (rho * &e.m).trace().re;
        if !(-1e-12..=1.0 + 1e-12).contains(&p) {
            return Err(Error::InvalidPovm(format!("outcome `{}` has probability {p}", e.label)));
        }
        out.push(p.clamp(0.0, 1.0));
    }
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidPovm(format!("probabilities sum to {total}")));
    }
    Ok(out)
}

/// Two-outcome projective measurement `½(1 ± a·σ)` along a unit axis.
pub fn projective_from_axis(a: &BlochVector) -> Result<Povm> {
    let n = a.norm();
    if !n.is_finite() || (n - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnitAxis(n));
    }
    let id = ComplexMatrix::identity(2);
    let s = a.dot_sigma();
    Povm::new(vec![
        PovmElement {
            label: "+".into(),
            m: (&id + &s).scale(0.5),
        },
        PovmElement {
            label: "-".into(),
            m: (&id - &s).scale(0.5),
        },
    ])
}

/// Bloch axis `tr(m σ)` of the first element of a two-outcome POVM whose
/// first element is a rank-one projector.
pub fn projector_axis(povm: &Povm) -> Option<BlochVector> {
    let first = &povm.elements().first()?.m;
    let eig = eig_hermitian(first).ok()?;
    if povm.len() != 2 || eig.eigenvalues[0].abs() > 1e-8 || (eig.eigenvalues[1] - 1.0).abs() > 1e-8 {
        return None;
    }
    Some(BlochVector([0, 1, 2].map(|k| (first * &ComplexMatrix::pauli(k)).trace().re)))
}

/// Seeded random POVM with `k` outcomes: `m_x = S^{-1/2} A_x A_x† S^{-1/2}`,
/// `S = Σ A_x A_x†`, with Gaussian `A_x` drawn from ChaCha8 seeded by `seed`.
pub fn random_povm(k: usize, seed: u64) -> Result<Povm> {
    if k < 2 {
        return Err(Error::InvalidPovm(format!("need at least 2 outcomes, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_NORMALIZER_ATTEMPTS {
        let parts: Vec<ComplexMatrix> = (0..k)
            .map(|_| {
                let entries: Vec<C64> = (0..4)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        c(re, im)
                    })
                    .collect();
                let a = ComplexMatrix::from_row_major(2, &entries).expect("finite gaussian draws");
                &a * &a.adjoint()
            })
            .collect();
        let mut s = ComplexMatrix::zeros(2);
        for p in &parts {
            s = &s + p;
        }
        let eig = eig_hermitian(&s.hermitian_part())?;
        if eig.eigenvalues[0] <= 1e-12 {
            continue;
        }
        let inv_sqrt = eig.map_spectrum(|l| 1.0 / l.sqrt());
        let ms = parts
            .iter()
            .map(|p| (&(&inv_sqrt * p) * &inv_sqrt).hermitian_part())
            .collect();
        return Povm::from_matrices(ms);
    }
    Err(Error::SingularNormalizer(MAX_NORMALIZER_ATTEMPTS))
}

/// Classical Fisher information `Σ_{p > 0} tr(D m)² / p`.
pub fn fisher_info(d: &ComplexMatrix, rho: &ComplexMatrix, povm: &Povm) -> Result<f64> {
    if d.dim() != 2 {
        return Err(Error::DimensionMismatch(d.dim(), 2));
    }
    if !d.is_hermitian(1e-10) {
        return Err(Error::NotHermitian(d.hermitian_defect()));
    }
    let ps = probs(rho, povm)?;
    let mut total = 0.0;
    for (e, p) in povm.elements().iter().zip(ps) {
        if p <= SUPPORT_TOL {
            continue;
        }
        let dp = (d * &e.m).trace().re;
        total += dp * dp / p;
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InfoCheck {
    pub fisher: f64,
    pub qfi: f64,
    pub holds: bool,
}

/// Compares the classical information of `povm` with the quantum information.
pub fn info_inequality(model: &QubitModel, theta: f64, povm: &Povm) -> Result<InfoCheck> {
    let rho = model.rho(theta)?;
    let d = model.drho(theta, DerivativeMethod::Analytic)?;
    let fisher = fisher_info(&d, &rho, povm)?;
    let qfi = model_qfi(model, theta)?;
    Ok(InfoCheck {
        fisher,
        qfi,
        holds: fisher <= qfi + GAP_TOL * qfi.max(1.0),
    })
}

/// `k = tr(rho L m L) / p`.
pub fn k_factor(rho: &ComplexMatrix, l: &ComplexMatrix, m: &ComplexMatrix, p: f64) -> Result<f64> {
    if p <= SUPPORT_TOL {
        return Err(Error::ZeroProbability(p));
    }
    let t = (&(&(rho * l) * m) * l).trace();
    Ok(t.re / p)
}

/// Both roots in `k^{1/2}` of `k + c k^{1/2} − I = 0`, `c = w'(2w − 1)/(w(1 − w))`,
/// as `(nonnegative, nonpositive)`.
pub fn k_roots(w: f64, w_dot: f64, _i1: f64, qfi: f64) -> (f64, f64) {
    let c = if w_dot == 0.0 {
        0.0
    } else {
        w_dot * (2.0 * w - 1.0) / (w * (1.0 - w))
    };
    let disc = (c * c + 4.0 * qfi.max(0.0)).sqrt();
    ((-c + disc) / 2.0, (-c - disc) / 2.0)
}

/// `r = (2w − 1) I1^{1/2} / (k^{1/2} − w'/w)`.
pub fn r_of_k(k_sqrt: f64, w: f64, w_dot: f64, i1: f64) -> Result<f64> {
    let denom = k_sqrt - w_dot / w;
    if denom.abs() <= 1e-12 {
        return Err(Error::DegenerateDenominator(denom));
    }
    Ok((2.0 * w - 1.0) * i1.sqrt() / denom)
}

/// `r' = (k^{1/2} + w'/(1 − w)) / ((2w − 1) I2^{1/2})`.
pub fn r_prime_of_k(k_sqrt: f64, w: f64, w_dot: f64, i2: f64) -> Result<f64> {
    let denom = (2.0 * w - 1.0) * i2.sqrt();
    if denom.abs() <= 1e-12 {
        return Err(Error::DegenerateDenominator(denom));
    }
    Ok((k_sqrt + w_dot / (1.0 - w)) / denom)
}

/// `‖s m^{1/2} rho^{1/2} − m^{1/2} L rho^{1/2}‖_F` for a signed root `s`.
pub fn equality_residual_signed(
    k_sqrt: f64,
    m: &ComplexMatrix,
    rho: &ComplexMatrix,
    l: &ComplexMatrix,
) -> Result<f64> {
    let ms = sqrt_psd(m)?;
    let rs = sqrt_psd(rho)?;
    let lhs = (&ms * &rs).scale(k_sqrt);
    let rhs = &(&ms * l) * &rs;
    Ok((&lhs - &rhs).frob_norm())
}

/// Residual of the equality condition with the better of the two square
/// roots `±√k`.
pub fn equality_residual(k: f64, m: &ComplexMatrix, rho: &ComplexMatrix, l: &ComplexMatrix) -> Result<f64> {
    let s = k.max(0.0).sqrt();
    let plus = equality_residual_signed(s, m, rho, l)?;
    let minus = equality_residual_signed(-s, m, rho, l)?;
    Ok(plus.min(minus))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OverlapRatio {
    Finite { re: f64, im: f64 },
    Infinite,
    Undefined,
}

impl OverlapRatio {
    fn of(a1: C64, a2: C64) -> Self {
        if a1.norm() <= 1e-14 && a2.norm() <= 1e-14 {
            OverlapRatio::Undefined
        } else if a2.norm() <= 1e-12 * a1.norm() {
            OverlapRatio::Infinite
        } else {
            let r = a1 / a2;
            OverlapRatio::Finite { re: r.re, im: r.im }
        }
    }

    fn is_real(&self) -> bool {
        match *self {
            OverlapRatio::Finite { re, im } => im.abs() <= REALITY_TOL * (1.0 + re.hypot(im)),
            OverlapRatio::Infinite => true,
            OverlapRatio::Undefined => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Attains,
    FailsRank,
    FailsReality,
    FailsRValue,
    FailsNumeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeReport {
    pub label: String,
    pub probability: f64,
    /// Outside the support; no per-outcome tests were run.
    pub skipped: bool,
    pub rank_one: bool,
    pub second_eigenvalue: f64,
    /// `(re, im)` pairs of the unit ket spanning the element.
    pub gamma: Option<[[f64; 2]; 2]>,
    pub overlap_ratio: Option<OverlapRatio>,
    pub real_proportional: bool,
    pub k_factor: Option<f64>,
    /// Admissible proportionality constants; `None` stands for infinity.
    pub r_expected: Vec<Option<f64>>,
    pub ratio_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttainReport {
    pub outcomes: Vec<OutcomeReport>,
    pub fisher: f64,
    pub qfi: f64,
    /// `qfi − fisher`
    pub gap: f64,
    pub verdict: Verdict,
}

/// Spanning unit vector of the top eigenspace, phase-normalized.
fn top_vector(m: &ComplexMatrix) -> Result<(Ket, f64)> {
    let eig = eig_hermitian(m)?;
    let mut g = eig.eigenvector(1);
    fix_phase_real(&mut g);
    Ok(([g[0], g[1]], eig.eigenvalues[0]))
}

fn r_or_infinite(r: Result<f64>) -> Option<f64> {
    r.ok()
}

/// Audits whether `povm` attains the quantum information of `model` at `theta`.
pub fn attain_check(model: &QubitModel, theta: f64, povm: &Povm) -> Result<AttainReport> {
    let rho = model.rho(theta)?;
    let d = model.drho(theta, DerivativeMethod::Analytic)?;
    let sld = model_sld_closed(model, theta)?;
    let qfi = sld.qfi;
    let fisher = fisher_info(&d, &rho, povm)?;
    let ps = probs(&rho, povm)?;

    let psi1 = model.psi1(theta);
    let psi2 = model.psi2(theta)?;
    let i1 = model.qfi_pure_part(theta);
    let (w, wd) = model.weight_at(theta)?;

    // Mixed models pin r to the two roots of the k-quadratic; for pure models
    // the quadratic is vacuous and r follows from each outcome's own k.
    let mixed_r: Option<Vec<Option<f64>>> = (!model.is_pure()).then(|| {
        let (sp, sm) = k_roots(w, wd, i1, qfi);
        vec![r_or_infinite(r_of_k(sp, w, wd, i1)), r_or_infinite(r_of_k(sm, w, wd, i1))]
    });

    let mut outcomes = Vec::with_capacity(povm.len());
    for (e, &p) in povm.elements().iter().zip(&ps) {
        if p <= SUPPORT_TOL {
            outcomes.push(OutcomeReport {
                label: e.label.clone(),
                probability: p,
                skipped: true,
                rank_one: true,
                second_eigenvalue: 0.0,
                gamma: None,
                overlap_ratio: None,
                real_proportional: true,
                k_factor: None,
                r_expected: Vec::new(),
                ratio_matches: true,
            });
            continue;
        }
        let (gamma, second) = top_vector(&e.m)?;
        let rank_one = second.abs() <= RANK_ONE_TOL * e.m.frob_norm();
        let ratio = OverlapRatio::of(inner(&gamma, &psi1), inner(&gamma, &psi2));
        let k = k_factor(&rho, &sld.l, &e.m, p)?;
        let r_expected = match &mixed_r {
            Some(rs) => rs.clone(),
            None => {
                let s = k.max(0.0).sqrt();
                vec![r_or_infinite(r_of_k(s, w, wd, i1)), r_or_infinite(r_of_k(-s, w, wd, i1))]
            }
        };
        let ratio_matches = match ratio {
            OverlapRatio::Finite { re, .. } => r_expected
                .iter()
                .flatten()
                .any(|r| (re - r).abs() <= R_MATCH_TOL * r.abs().max(1.0)),
            OverlapRatio::Infinite => r_expected.iter().any(Option::is_none),
            OverlapRatio::Undefined => false,
        };
        outcomes.push(OutcomeReport {
            label: e.label.clone(),
            probability: p,
            skipped: false,
            rank_one,
            second_eigenvalue: second,
            gamma: Some(gamma.map(|z| [z.re, z.im])),
            overlap_ratio: Some(ratio),
            real_proportional: ratio.is_real(),
            k_factor: Some(k),
            r_expected,
            ratio_matches,
        });
    }

    let gap = qfi - fisher;
    let verdict = if outcomes.iter().any(|o| !o.rank_one) {
        Verdict::FailsRank
    } else if outcomes.iter().any(|o| !o.real_proportional) {
        Verdict::FailsReality
    } else if outcomes.iter().any(|o| !o.ratio_matches) {
        Verdict::FailsRValue
    } else if gap > GAP_TOL * qfi.max(1.0) {
        Verdict::FailsNumeric
    } else {
        Verdict::Attains
    };
    Ok(AttainReport {
        outcomes,
        fisher,
        qfi,
        gap,
        verdict,
    })
}

/// Two-outcome projective measurement attaining the quantum information at
/// `theta`: `γ+ = (r+ ψ1 + ψ2)/√(1 + r+²)` from the nonnegative root, and
/// its orthocomplement.
pub fn optimal_measurement(model: &QubitModel, theta: f64) -> Result<Povm> {
    let qfi = model_qfi(model, theta)?;
    if qfi <= 1e-12 {
        return Err(Error::StationaryModel(qfi));
    }
    let psi1 = model.psi1(theta);
    let psi2 = model.psi2(theta)?;
    let i1 = model.qfi_pure_part(theta);
    let (w, wd) = model.weight_at(theta)?;
    let (sp, _) = k_roots(w, wd, i1, qfi);
    let gamma: Ket = match r_of_k(sp, w, wd, i1) {
        Ok(r) => {
            let n = (1.0 + r * r).sqrt();
            [(psi1[0] * r + psi2[0]) / n, (psi1[1] * r + psi2[1]) / n]
        }
        Err(_) => psi1,
    };
    let m1 = ComplexMatrix::outer(&gamma, &gamma).hermitian_part();
    let m2 = &ComplexMatrix::identity(2) - &m1;
    Povm::new(vec![
        PovmElement { label: "+".into(), m: m1 },
        PovmElement { label: "-".into(), m: m2 },
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UniformReport {
    pub uniform: bool,
    pub plane_normal: Option<BlochVector>,
}

/// Geometric test for uniformly attaining measurements: the Bloch vectors of
/// the model over `theta_grid` must have constant length and lie on a plane
/// through the origin.
pub fn uniform_attainability(model: &QubitModel, theta_grid: &[f64]) -> Result<UniformReport> {
    let mut distinct: Vec<f64> = theta_grid.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 8 {
        return Err(Error::GridTooSmall {
            needed: 8,
            got: distinct.len(),
        });
    }
    let vecs = theta_grid
        .iter()
        .map(|&t| bloch_of(&model.rho(t)?))
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = vecs.iter().map(BlochVector::norm).collect();
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let constant_radius = hi - lo <= 1e-8 && lo > 0.0;

    let units: Vec<BlochVector> = vecs.iter().map(BlochVector::normalized).collect();
    let mut gram = ComplexMatrix::zeros(3);
    for u in &units {
        for i in 0..3 {
            for j in 0..3 {
                gram[(i, j)] += c(u.0[i] * u.0[j], 0.0);
            }
        }
    }
    let eig = eig_hermitian(&gram)?;
    let mut nv = eig.eigenvector(0);
    fix_phase_real(&mut nv);
    let mut normal = BlochVector([nv[0].re, nv[1].re, nv[2].re]).normalized();
    if let Some(lead) = normal.0.iter().copied().find(|x| x.abs() > 1e-12) {
        if lead < 0.0 {
            normal = normal.scaled(-1.0);
        }
    }
    let sigma_min = units.iter().map(|u| u.dot(&normal).powi(2)).sum::<f64>().sqrt();
    let sigma_max = eig.eigenvalues[2].max(0.0).sqrt();
    let planar = sigma_min <= 1e-8 * sigma_max;

    let uniform = constant_radius && planar;
    Ok(UniformReport {
        uniform,
        plane_normal: uniform.then_some(normal),
    })
}
