//! Ball volumes, sphere areas and the Riesz / Hausdorff normalizers.
//!
//! All Γ values needed here sit at integer or half-integer arguments, so they
//! are produced by exact recursion from Γ(1) = 1 and Γ(1/2) = √π.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};

/// Real dimension `m`, optionally tagged with the complex dimension `n` when `m = 2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DimensionContext {
    m: usize,
    n: Option<usize>,
}

impl DimensionContext {
    pub fn real(m: usize) -> Result<Self> {
        if m < 1 {
            return domain("real dimension must be at least 1");
        }
        Ok(Self { m, n: None })
    }

    /// `C^n` identified with `R^{2n}` as `(x_1, .., x_n, y_1, .., y_n)`.
    pub fn complex(n: usize) -> Result<Self> {
        if n < 1 {
            return domain("complex dimension must be at least 1");
        }
        Ok(Self { m: 2 * n, n: Some(n) })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> Option<usize> {
        self.n
    }
}

/// `b_m`, `s_{m-1}` and `d_{m-1}` for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstants {
    pub m: usize,
    pub ball_volume: f64,
    pub sphere_area: f64,
    pub riesz_normalizer: f64,
}

impl NormConstants {
    pub fn for_dimension(m: usize) -> Result<Self> {
        Ok(Self {
            m,
            ball_volume: ball_volume(m)?,
            sphere_area: sphere_area(m)?,
            riesz_normalizer: riesz_normalizer(m)?,
        })
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

/// Γ(k/2) for k ≥ 1 by the recursion Γ(x + 1) = x Γ(x).
pub fn gamma_half_integer(k: usize) -> Result<f64> {
    if k == 0 {
        return domain("Γ has a pole at 0");
    }
    let (mut x, mut value) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = k as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    Ok(value)
}

/// Volume of the unit ball in `R^m`, using the even/odd closed forms.
pub fn ball_volume(m: usize) -> Result<f64> {
    if m < 1 {
        return domain("ball_volume needs m >= 1");
    }
    let n = m / 2;
    let value = if m % 2 == 0 {
        PI.powi(n as i32) / factorial(n)
    } else {
        factorial(n) * 2f64.powi(2 * n as i32 + 1) * PI.powi(n as i32) / factorial(2 * n + 1)
    };
    Ok(value)
}

/// `π^{m/2} / Γ(m/2 + 1)`; kept as an independent route to [`ball_volume`].
pub fn ball_volume_gamma(m: usize) -> Result<f64> {
    if m < 1 {
        return domain("ball_volume needs m >= 1");
    }
    Ok(PI.powf(m as f64 / 2.0) / gamma_half_integer(m + 2)?)
}

pub fn sphere_area(m: usize) -> Result<f64> {
    if m < 2 {
        return domain("sphere_area needs m >= 2");
    }
    Ok(m as f64 * ball_volume(m)?)
}

/// `d_{m-1} = (1 + (m-3)^+) s_{m-1}`, the divisor turning Δu into the Riesz measure.
pub fn riesz_normalizer(m: usize) -> Result<f64> {
    if m < 2 {
        return domain("riesz_normalizer needs m >= 2");
    }
    let lift = 1 + m.saturating_sub(3);
    Ok(lift as f64 * sphere_area(m)?)
}

/// `2 π^n max{1, 2n-2} / (n-1)!`, the closed form of `d_{2n-1}`.
pub fn riesz_normalizer_complex(n: usize) -> Result<f64> {
    if n < 1 {
        return domain("complex dimension must be at least 1");
    }
    let lift = (2 * n).saturating_sub(2).max(1) as f64;
    Ok(2.0 * PI.powi(n as i32) * lift / factorial(n - 1))
}

/// Normalizer `b_p` of the `p`-dimensional Hausdorff measure; `b_0 = 1` so that
/// `σ_0` counts points.
pub fn hausdorff_weight(p: usize) -> f64 {
    if p == 0 {
        1.0
    } else {
        ball_volume(p).expect("p >= 1")
    }
}
