//! Symmetric logarithmic derivatives and quantum information.
//!
//! The SLD `L` of a state `rho` with elementwise derivative `D` solves
//! `rho L + L rho = 2 D`; the quantum information is `tr(rho L²)`.
//!
//! Three routes are provided: a generic solver in the eigenbasis of `rho`
//! (any dimension up to 8), `L = 2D` for pure states, and the closed form for
//! the two-component mixed model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{eig_hermitian, ComplexMatrix};
use crate::model::{validate_density, BlochVector, DerivativeMethod, QubitModel, Weight};

/// Eigenvalue sums at or below this are treated as kernel sectors.
pub const KERNEL_TOL: f64 = 1e-12;

/// Largest tolerated `‖D‖_F` on the kernel–kernel block of `rho`.
pub const KERNEL_BLOCK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SldMethod {
    Lyapunov,
    PureClosed,
    MixedClosed,
}

#[derive(Clone, Debug)]
pub struct SldResult {
    pub l: ComplexMatrix,
    pub qfi: f64,
    /// `‖rho L + L rho − 2D‖_F`
    pub residual: f64,
    pub method: SldMethod,
}

/// `‖rho L + L rho − 2D‖_F`.
pub fn sld_residual(rho: &ComplexMatrix, d: &ComplexMatrix, l: &ComplexMatrix) -> f64 {
    (&(&(rho * l) + &(l * rho)) - &d.scale(2.0)).frob_norm()
}

/// `tr(rho L²)`.
pub fn qfi_of(rho: &ComplexMatrix, l: &ComplexMatrix) -> f64 {
    (&(rho * l) * l).trace().re
}

fn check_derivative(rho: &ComplexMatrix, d: &ComplexMatrix) -> Result<()> {
    if rho.dim() != d.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), d.dim()));
    }
    if !d.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = d.frob_norm().max(1.0);
    if !d.is_hermitian(1e-10) {
        return Err(Error::NotHermitian(d.hermitian_defect() / scale));
    }
    let tr = d.trace().norm();
    if tr > 1e-6 * scale {
        return Err(Error::NotTraceless(tr));
    }
    Ok(())
}

fn finish(rho: &ComplexMatrix, d: &ComplexMatrix, l: ComplexMatrix, method: SldMethod) -> SldResult {
    let l = l.hermitian_part();
    SldResult {
        residual: sld_residual(rho, d, &l),
        qfi: qfi_of(rho, &l),
        l,
        method,
    }
}

/// Solves the SLD equation in the eigenbasis of `rho`:
/// `L_ab = 2 D_ab / (λ_a + λ_b)`, zero on kernel sectors.
pub fn sld_lyapunov(rho: &ComplexMatrix, d: &ComplexMatrix) -> Result<SldResult> {
    validate_density(rho)?;
    check_derivative(rho, d)?;
    let n = rho.dim();
    let eig = eig_hermitian(rho)?;
    let v = &eig.eigenvectors;
    let dt = &(&v.adjoint() * d) * v;

    let mut lt = ComplexMatrix::zeros(n);
    let mut kernel_block = 0.0;
    for a in 0..n {
        for b in 0..n {
            let s = eig.eigenvalues[a] + eig.eigenvalues[b];
            if s > KERNEL_TOL {
                lt[(a, b)] = dt[(a, b)] * (2.0 / s);
            } else {
                kernel_block += dt[(a, b)].norm_sqr();
            }
        }
    }
    let kernel_block = kernel_block.sqrt();
    if kernel_block > KERNEL_BLOCK_TOL {
        return Err(Error::UnsupportedOnKernel(kernel_block));
    }
    let l = &(v * &lt) * &v.adjoint();
    Ok(finish(rho, d, l, SldMethod::Lyapunov))
}

/// `L = 2D` for a pure `rho`; `qfi = 2 tr(D²)`.
pub fn sld_pure(rho: &ComplexMatrix, d: &ComplexMatrix) -> Result<SldResult> {
    validate_density(rho)?;
    check_derivative(rho, d)?;
    let eig = eig_hermitian(rho)?;
    let n = eig.eigenvalues.len();
    if n >= 2 {
        let second = eig.eigenvalues[n - 2];
        if second.abs() > 1e-10 {
            return Err(Error::NotPure(second));
        }
    }
    let l = d.scale(2.0);
    let mut out = finish(rho, d, l, SldMethod::PureClosed);
    out.qfi = 2.0 * (d * d).trace().re;
    Ok(out)
}

/// Closed-form SLD of the mixed model:
/// `L = (w'/w) rho1 + (2w − 1) L1 − (w'/(1 − w)) rho2`, with `L1 = 2 D1`.
pub fn sld_mixed_closed(model: &QubitModel, theta: f64) -> Result<SldResult> {
    if model.is_pure() {
        return Err(Error::NotMixed);
    }
    let (w, wd) = model.weight_at(theta)?;
    let rho1 = model.rho1(theta);
    let rho2 = model.rho2(theta)?;
    let l1 = model.drho1(theta).scale(2.0);
    let l = &(&rho1.scale(wd / w) + &l1.scale(2.0 * w - 1.0)) - &rho2.scale(wd / (1.0 - w));

    let rho = model.rho(theta)?;
    let d = model.drho(theta, DerivativeMethod::Analytic)?;
    let mut out = finish(&rho, &d, l, SldMethod::MixedClosed);
    out.qfi = qfi_mixed_closed(model, theta)?;
    Ok(out)
}

/// Quantum information of the mixed model:
/// `I = w'² / (w (1 − w)) + (2w − 1)² I1`.
pub fn qfi_mixed_closed(model: &QubitModel, theta: f64) -> Result<f64> {
    let Weight::Mixed(family) = model.weight else {
        return Err(Error::NotMixed);
    };
    let (w, wd) = family.eval(theta)?;
    let i1 = model.qfi_pure_part(theta);
    let g = 2.0 * w - 1.0;
    if family.is_const() {
        return Ok(g * g * i1);
    }
    Ok(wd * wd / (w * (1.0 - w)) + g * g * i1)
}

/// `I1 = ‖u_/θ‖²` for a pure model with Bloch velocity `u_dot`.
pub fn qfi_bloch_pure(u_dot: &BlochVector) -> f64 {
    u_dot.dot(u_dot)
}

/// SLD of a model at `theta` by the requested route. `PureClosed` needs a
/// pure model and `MixedClosed` a mixed one.
pub fn model_sld(model: &QubitModel, theta: f64, method: SldMethod) -> Result<SldResult> {
    match method {
        SldMethod::Lyapunov => {
            let rho = model.rho(theta)?;
            let d = model.drho(theta, DerivativeMethod::Analytic)?;
            sld_lyapunov(&rho, &d)
        }
        SldMethod::PureClosed => {
            let rho = model.rho(theta)?;
            let d = model.drho(theta, DerivativeMethod::Analytic)?;
            sld_pure(&rho, &d)
        }
        SldMethod::MixedClosed => sld_mixed_closed(model, theta),
    }
}

/// The closed-form SLD appropriate for the model.
pub fn model_sld_closed(model: &QubitModel, theta: f64) -> Result<SldResult> {
    if model.is_pure() {
        model_sld(model, theta, SldMethod::PureClosed)
    } else {
        model_sld(model, theta, SldMethod::MixedClosed)
    }
}

/// Quantum information of the model by its closed form.
pub fn model_qfi(model: &QubitModel, theta: f64) -> Result<f64> {
    if model.is_pure() {
        model.rho(theta)?;
        Ok(model.qfi_pure_part(theta))
    } else {
        qfi_mixed_closed(model, theta)
    }
}
