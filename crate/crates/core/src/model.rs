//! One-parameter qubit models.
//!
//! A model is a pure family `theta -> |psi1(theta)>` optionally mixed with its
//! orthogonal complement:
//!
//! ```text
//! rho(theta) = w(theta) rho1(theta) + (1 - w(theta)) rho2(theta),   rho2 = 1 - rho1
//! ```
//!
//! `psi2` is the normalized image of `psi1` under the SLD of `rho1`, so the
//! pair `(psi1, psi2)` is an orthonormal basis adapted to the model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{c, ComplexMatrix, C64};

/// Two-component state vector.
pub type Ket = [C64; 2];

/// Central finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Below this, `I1(theta)` counts as zero.
pub const STATIONARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PureKind {
    /// `(cos(θ/2), sin(θ/2))`: the great circle through the poles in the x–z plane.
    XzCircle,
    /// Longitude is the parameter, colatitude fixed.
    LongitudeParam,
    /// Colatitude is the parameter, longitude fixed.
    ColatitudeParam,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PureFamily {
    pub kind: PureKind,
    /// Colatitude for `LongitudeParam`, longitude for `ColatitudeParam`;
    /// ignored for `XzCircle`.
    pub fixed_angle: f64,
}

impl PureFamily {
    pub fn xz_circle() -> Self {
        Self {
            kind: PureKind::XzCircle,
            fixed_angle: 0.0,
        }
    }

    pub fn longitude(colatitude: f64) -> Self {
        Self {
            kind: PureKind::LongitudeParam,
            fixed_angle: colatitude,
        }
    }

    pub fn colatitude(longitude: f64) -> Self {
        Self {
            kind: PureKind::ColatitudeParam,
            fixed_angle: longitude,
        }
    }

    /// Colatitude and longitude of the state at `theta`.
    fn angles(&self, theta: f64) -> (f64, f64) {
        match self.kind {
            PureKind::XzCircle => (theta, 0.0),
            PureKind::LongitudeParam => (self.fixed_angle, theta),
            PureKind::ColatitudeParam => (theta, self.fixed_angle),
        }
    }

    pub fn psi(&self, theta: f64) -> Ket {
        match self.kind {
            PureKind::XzCircle => [c((theta / 2.0).cos(), 0.0), c((theta / 2.0).sin(), 0.0)],
            _ => {
                let (eta, phi) = self.angles(theta);
                let half = C64::from_polar(1.0, -phi / 2.0);
                [half * (eta / 2.0).cos(), half.conj() * (eta / 2.0).sin()]
            }
        }
    }

    pub fn dpsi(&self, theta: f64) -> Ket {
        let (eta, phi) = self.angles(theta);
        let (ch, sh) = ((eta / 2.0).cos(), (eta / 2.0).sin());
        match self.kind {
            PureKind::XzCircle => [c(-sh / 2.0, 0.0), c(ch / 2.0, 0.0)],
            PureKind::LongitudeParam => {
                let e = C64::from_polar(1.0, -phi / 2.0);
                [e * c(0.0, -0.5) * ch, e.conj() * c(0.0, 0.5) * sh]
            }
            PureKind::ColatitudeParam => {
                let e = C64::from_polar(1.0, -phi / 2.0);
                [e * (-sh / 2.0), e.conj() * (ch / 2.0)]
            }
        }
    }

    pub fn rho(&self, theta: f64) -> ComplexMatrix {
        let p = self.psi(theta);
        ComplexMatrix::outer(&p, &p)
    }

    /// Elementwise derivative of `rho`: `|ψ'><ψ| + |ψ><ψ'|`.
    pub fn drho(&self, theta: f64) -> ComplexMatrix {
        let p = self.psi(theta);
        let dp = self.dpsi(theta);
        &ComplexMatrix::outer(&dp, &p) + &ComplexMatrix::outer(&p, &dp)
    }

    /// Quantum information of the pure family, `2 tr(D1²)`.
    pub fn qfi(&self, theta: f64) -> f64 {
        let d = self.drho(theta);
        2.0 * (&d * &d).trace().re
    }

    /// Bloch vector `u(θ)`.
    pub fn bloch(&self, theta: f64) -> BlochVector {
        let (eta, phi) = self.angles(theta);
        BlochVector([eta.sin() * phi.cos(), eta.sin() * phi.sin(), eta.cos()])
    }

    /// `u_/θ`, analytic.
    pub fn bloch_dot(&self, theta: f64) -> BlochVector {
        let (eta, phi) = self.angles(theta);
        match self.kind {
            PureKind::XzCircle | PureKind::ColatitudeParam => {
                BlochVector([eta.cos() * phi.cos(), eta.cos() * phi.sin(), -eta.sin()])
            }
            PureKind::LongitudeParam => {
                BlochVector([-eta.sin() * phi.sin(), eta.sin() * phi.cos(), 0.0])
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `w(θ) = value`
    Const { value: f64 },
    /// `w(θ) = a + bθ`
    Affine { a: f64, b: f64 },
    /// `w(θ) = a + b sin θ`
    Sinusoidal { a: f64, b: f64 },
}

impl WeightFamily {
    /// `(w, w_/θ)` without range checks.
    pub fn eval_unchecked(&self, theta: f64) -> (f64, f64) {
        match *self {
            WeightFamily::Const { value } => (value, 0.0),
            WeightFamily::Affine { a, b } => (a + b * theta, b),
            WeightFamily::Sinusoidal { a, b } => (a + b * theta.sin(), b * theta.cos()),
        }
    }

    /// `(w, w_/θ)`, rejecting `w ∉ (0,1)` and `w = ½`.
    pub fn eval(&self, theta: f64) -> Result<(f64, f64)> {
        let (w, wd) = self.eval_unchecked(theta);
        if !w.is_finite() || w <= 0.0 || w >= 1.0 || (w - 0.5).abs() <= 1e-12 {
            return Err(Error::WeightOutOfRange(w));
        }
        Ok((w, wd))
    }

    pub fn is_const(&self) -> bool {
        match *self {
            WeightFamily::Const { .. } => true,
            WeightFamily::Affine { b, .. } | WeightFamily::Sinusoidal { b, .. } => b == 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    /// The model is `rho1` itself.
    Pure,
    Mixed(WeightFamily),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitModel {
    pub pure_part: PureFamily,
    pub weight: Weight,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMethod {
    Analytic,
    CentralFd,
}

impl QubitModel {
    pub fn pure(pure_part: PureFamily) -> Self {
        Self {
            pure_part,
            weight: Weight::Pure,
        }
    }

    pub fn mixed(pure_part: PureFamily, weight: WeightFamily) -> Self {
        Self {
            pure_part,
            weight: Weight::Mixed(weight),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.weight, Weight::Pure)
    }

    /// `(w, w_/θ)`; `(1, 0)` for pure models.
    pub fn weight_at(&self, theta: f64) -> Result<(f64, f64)> {
        match &self.weight {
            Weight::Pure => Ok((1.0, 0.0)),
            Weight::Mixed(f) => f.eval(theta),
        }
    }

    pub fn psi1(&self, theta: f64) -> Ket {
        self.pure_part.psi(theta)
    }

    pub fn rho1(&self, theta: f64) -> ComplexMatrix {
        self.pure_part.rho(theta)
    }

    /// Elementwise derivative of `rho1`.
    pub fn drho1(&self, theta: f64) -> ComplexMatrix {
        self.pure_part.drho(theta)
    }

    /// `I1(θ) = 2 tr(D1²)`.
    pub fn qfi_pure_part(&self, theta: f64) -> f64 {
        self.pure_part.qfi(theta)
    }

    /// `|ψ2> = I1^{-1/2} (2 D1) |ψ1>`.
    ///
    /// No phase convention is applied: the sign of the proportionality
    /// constant between `<γ|ψ1>` and `<γ|ψ2>` is defined relative to exactly
    /// this vector.
    pub fn psi2(&self, theta: f64) -> Result<Ket> {
        let i1 = self.qfi_pure_part(theta);
        if i1 <= STATIONARY_TOL {
            return Err(Error::StationaryModel(i1));
        }
        let d1 = self.drho1(theta);
        let v = d1.scale(2.0).apply(&self.psi1(theta));
        let s = 1.0 / i1.sqrt();
        Ok([v[0] * s, v[1] * s])
    }

    /// `rho2 = |ψ2><ψ2|`, which equals `1 - rho1` whenever `psi2` exists.
    pub fn rho2(&self, theta: f64) -> Result<ComplexMatrix> {
        let p2 = self.psi2(theta)?;
        Ok(ComplexMatrix::outer(&p2, &p2))
    }

    pub fn rho(&self, theta: f64) -> Result<ComplexMatrix> {
        let rho1 = self.rho1(theta);
        match self.weight {
            Weight::Pure => Ok(rho1),
            Weight::Mixed(_) => {
                let (w, _) = self.weight_at(theta)?;
                let rho2 = &ComplexMatrix::identity(2) - &rho1;
                Ok(&rho1.scale(w) + &rho2.scale(1.0 - w))
            }
        }
    }

    pub fn drho(&self, theta: f64, method: DerivativeMethod) -> Result<ComplexMatrix> {
        match method {
            DerivativeMethod::Analytic => self.drho_analytic(theta),
            DerivativeMethod::CentralFd => {
                let hi = self.rho(theta + FD_STEP)?;
                let lo = self.rho(theta - FD_STEP)?;
                Ok((&hi - &lo).scale(0.5 / FD_STEP))
            }
        }
    }

    fn drho_analytic(&self, theta: f64) -> Result<ComplexMatrix> {
        let d1 = self.drho1(theta);
        match self.weight {
            Weight::Pure => Ok(d1),
            Weight::Mixed(_) => {
                // w'(rho1 - rho2) + w D1 + (1 - w)(-D1)
                let (w, wd) = self.weight_at(theta)?;
                let rho1 = self.rho1(theta);
                let diff = &rho1.scale(2.0) - &ComplexMatrix::identity(2);
                Ok(&diff.scale(wd) + &d1.scale(2.0 * w - 1.0))
            }
        }
    }

    /// Bloch vector of `rho(θ)`: `(2w - 1) u(θ)`.
    pub fn bloch(&self, theta: f64) -> Result<BlochVector> {
        let (w, _) = self.weight_at(theta)?;
        let u = self.pure_part.bloch(theta);
        let s = if self.is_pure() { 1.0 } else { 2.0 * w - 1.0 };
        Ok(u.scaled(s))
    }
}

/// Real 3-vector `r` with `rho = ½(1 + r·σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / self.norm())
    }

    /// `r·σ`.
    pub fn dot_sigma(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        for k in 0..3 {
            m = &m + &ComplexMatrix::pauli(k).scale(self.0[k]);
        }
        m
    }
}

/// `r_k = tr(ρ σ_k)` for a 2x2 density matrix.
pub fn bloch_of(rho: &ComplexMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::NotDensityMatrix(format!("dimension {} (expected 2)", rho.dim())));
    }
    validate_density(rho)?;
    let r = [0, 1, 2].map(|k| (rho * &ComplexMatrix::pauli(k)).trace().re);
    Ok(BlochVector(r))
}

/// `½(1 + r·σ)`.
pub fn state_of(r: &BlochVector) -> Result<ComplexMatrix> {
    let n = r.norm();
    if !n.is_finite() || n > 1.0 + 1e-12 {
        return Err(Error::BlochOutOfBall(n));
    }
    Ok((&ComplexMatrix::identity(2) + &r.dot_sigma()).scale(0.5))
}

/// Hermitian, unit trace and PSD within the crate tolerances.
pub fn validate_density(rho: &ComplexMatrix) -> Result<()> {
    if !rho.is_finite() {
        return Err(Error::NonFinite);
    }
    if !rho.is_hermitian(1e-12) {
        return Err(Error::NotDensityMatrix("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
        return Err(Error::NotDensityMatrix(format!("trace {}", tr.re)));
    }
    let min = crate::matkernel::eig_hermitian(rho)?.eigenvalues[0];
    if min < -crate::matkernel::PSD_TOL {
        return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}
