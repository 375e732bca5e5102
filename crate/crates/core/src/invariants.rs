//! Discrete mass and the discrete energies each scheme conserves.

use crate::error::{Result, RlwError};
use crate::grid::{check_len, ModelParams};

/// Which discrete energy functional a value was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// `h Σ (γu³/6 + a u²/2)`, conserved by FIEP.
    Cubic,
    /// Two-level functional on `(uⁿ, uⁿ⁺¹)`, conserved by LIEP.
    LiepTwoLevel,
    /// `h Σ (γ u v/6 + a u²/2)` with `v ≈ u²`, conserved by LICN and LILF.
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub energy_kind: EnergyKind,
}

/// `h Σ u_j`.
pub fn mass(u: &[f64], h: f64) -> f64 {
    h * u.iter().sum::<f64>()
}

pub fn energy_cubic(u: &[f64], h: f64, params: &ModelParams) -> f64 {
    let (a, g) = (params.a, params.gamma);
    h * u.iter().map(|&x| g * x * x * x / 6.0 + a * x * x / 2.0).sum::<f64>()
}

/// `h Σ (γ u_j^{n+1} u_j^n (u_j^{n+1} + u_j^n)/12 + a u_j^n u_j^{n+1}/2)`.
pub fn energy_liep(u_n: &[f64], u_np1: &[f64], h: f64, params: &ModelParams) -> Result<f64> {
    check_len(u_n.len(), u_np1.len())?;
    let (a, g) = (params.a, params.gamma);
    Ok(h * u_n
        .iter()
        .zip(u_np1)
        .map(|(&p, &q)| g * q * p * (q + p) / 12.0 + a * p * q / 2.0)
        .sum::<f64>())
}

pub fn energy_quad(u: &[f64], v: &[f64], h: f64, params: &ModelParams) -> Result<f64> {
    check_len(u.len(), v.len())?;
    let (a, g) = (params.a, params.gamma);
    Ok(h * u
        .iter()
        .zip(v)
        .map(|(&p, &q)| g * p * q / 6.0 + a * p * p / 2.0)
        .sum::<f64>())
}

/// Closed-form mass and energy of the solitary wave `3c sech²(m(x - v t - x0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticInvariants {
    pub mass: f64,
    pub energy: f64,
    /// Width parameter `m = √(γc/(vσ))/2`.
    pub width: f64,
    /// Speed `v = a + γc`.
    pub speed: f64,
}

pub fn analytic_invariants(c: f64, params: &ModelParams) -> Result<AnalyticInvariants> {
    if !(c.is_finite() && c > 0.0) {
        return Err(RlwError::invalid("c", format!("must be positive, got {c}")));
    }
    let speed = params.a + params.gamma * c;
    let width = (params.gamma * c / (speed * params.sigma)).sqrt() / 2.0;
    // ∫sech² = 2/m, ∫sech⁴ = 4/(3m), ∫sech⁶ = 16/(15m)
    let mass = 6.0 * c / width;
    let energy = 6.0 * params.a * c * c / width + 24.0 * params.gamma * c * c * c / (5.0 * width);
    Ok(AnalyticInvariants {
        mass,
        energy,
        width,
        speed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ModelParams = ModelParams {
        a: 1.0,
        sigma: 1.0,
        gamma: 1.0,
    };

    #[test]
    fn simple_values() {
        assert_eq!(mass(&[1.0; 8], 0.5), 4.0);
        assert_eq!(energy_cubic(&[0.0; 5], 0.1, &P), 0.0);
        assert!((energy_cubic(&[1.0; 4], 1.0, &P) - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_level_energy_reduces_to_cubic() {
        let u = [0.3, -1.2, 2.0, 0.0, 0.7];
        let e = energy_cubic(&u, 0.2, &P);
        assert!((energy_liep(&u, &u, 0.2, &P).unwrap() - e).abs() < 1e-15);
        assert_eq!(energy_liep(&u, &[0.0; 5], 0.2, &P).unwrap(), 0.0);
        assert_eq!(energy_liep(&[0.0; 5], &u, 0.2, &P).unwrap(), 0.0);
        assert!(energy_liep(&u, &[0.0; 4], 0.2, &P).is_err());
    }

    #[test]
    fn quadratic_energy_with_squares_is_cubic() {
        let u = [0.3, -1.2, 2.0, 0.0, 0.7];
        let v: Vec<f64> = u.iter().map(|x| x * x).collect();
        let e = energy_cubic(&u, 0.2, &P);
        assert!((energy_quad(&u, &v, 0.2, &P).unwrap() - e).abs() < 1e-15);
        assert_eq!(energy_quad(&[0.0; 5], &v, 0.2, &P).unwrap(), 0.0);
    }

    #[test]
    fn solitary_invariants() {
        let inv = analytic_invariants(0.1, &P).unwrap();
        assert!((inv.width - 0.5 * (0.1f64 / 1.1).sqrt()).abs() < 1e-15);
        assert!((inv.mass - 3.97995).abs() < 5e-6);
        assert!((inv.energy - 0.42983).abs() < 5e-6);

        let inv = analytic_invariants(1.0 / 3.0, &P).unwrap();
        assert!((inv.speed - 4.0 / 3.0).abs() < 1e-15);
        assert!((inv.width - 0.25).abs() < 1e-15);

        assert!(analytic_invariants(0.0, &P).is_err());
    }

    #[test]
    fn mass_scales_as_c_over_width() {
        for c in [1e-4, 0.1, 1.0, 50.0] {
            let inv = analytic_invariants(c, &P).unwrap();
            assert!((inv.mass * inv.width / c - 6.0).abs() < 1e-12);
        }
    }
}
