//! Closed-form radial profiles with known total mass.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::model::{ball_volume, sphere_measure, RadialField};

/// Built-in radial shapes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// `a exp(-(r/w)^2)`.
    GaussianBump { amplitude: f64, width: f64 },
    /// `a` on `[0, radius]`, zero outside.
    Indicator { amplitude: f64, radius: f64 },
    /// `a (1 + (r/w)^2)^(-beta)`.
    PolynomialDecay { amplitude: f64, width: f64, exponent: f64 },
    /// `a` everywhere.
    Constant { amplitude: f64 },
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::GaussianBump { .. } => "gaussian-bump",
            Shape::Indicator { .. } => "indicator",
            Shape::PolynomialDecay { .. } => "polynomial-decay",
            Shape::Constant { .. } => "constant",
        }
    }

    /// Build a shape from its name and parameters; `scale` is the width or
    /// radius and `exponent` is only used by the polynomial decay.
    pub fn from_name(name: &str, amplitude: f64, scale: f64, exponent: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        let positive_scale = || {
            if scale > 0.0 && scale.is_finite() {
                Ok(scale)
            } else {
                Err(invalid("scale", format!("must be positive, got {scale}")))
            }
        };
        Ok(match name {
            "gaussian-bump" => Shape::GaussianBump {
                amplitude,
                width: positive_scale()?,
            },
            "indicator" => Shape::Indicator {
                amplitude,
                radius: positive_scale()?,
            },
            "polynomial-decay" => {
                if !(exponent > 0.0) {
                    return Err(invalid("exponent", "must be positive"));
                }
                Shape::PolynomialDecay {
                    amplitude,
                    width: positive_scale()?,
                    exponent,
                }
            }
            "constant" => Shape::Constant { amplitude },
            other => return Err(invalid("profile", format!("unknown profile `{other}`"))),
        })
    }

    /// Total mass `integral over R^n` of the shape, infinite when it does not decay fast enough.
    pub fn mass(&self, n: f64) -> f64 {
        match *self {
            Shape::GaussianBump { amplitude, width } => amplitude * (std::f64::consts::PI.sqrt() * width).powf(n),
            Shape::Indicator { amplitude, radius } => amplitude * ball_volume(n) * radius.powf(n),
            Shape::PolynomialDecay {
                amplitude,
                width,
                exponent,
            } => {
                if exponent > n / 2.0 {
                    amplitude * width.powf(n) * std::f64::consts::PI.powf(n / 2.0) * gamma(exponent - n / 2.0)
                        / gamma(exponent)
                } else {
                    f64::INFINITY
                }
            }
            Shape::Constant { amplitude } => {
                if amplitude == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Radius covering the visible part of the shape, for default domains.
    pub fn extent(&self) -> f64 {
        match *self {
            Shape::GaussianBump { width, .. } => 4.0 * width,
            Shape::Indicator { radius, .. } => radius,
            Shape::PolynomialDecay { width, .. } => 10.0 * width,
            Shape::Constant { .. } => 1.0,
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Shape::GaussianBump { amplitude, .. }
            | Shape::Indicator { amplitude, .. }
            | Shape::PolynomialDecay { amplitude, .. }
            | Shape::Constant { amplitude } => amplitude.abs(),
        }
    }
}

impl RadialField for Shape {
    fn value(&self, r: f64) -> f64 {
        match *self {
            Shape::GaussianBump { amplitude, width } => amplitude * (-(r / width).powi(2)).exp(),
            Shape::Indicator { amplitude, radius } => {
                if r <= radius {
                    amplitude
                } else {
                    0.0
                }
            }
            Shape::PolynomialDecay {
                amplitude,
                width,
                exponent,
            } => amplitude * (1.0 + (r / width).powi(2)).powf(-exponent),
            Shape::Constant { amplitude } => amplitude,
        }
    }

    fn derivative(&self, r: f64) -> f64 {
        match *self {
            Shape::GaussianBump { width, .. } => -2.0 * r / (width * width) * self.value(r),
            Shape::Indicator { .. } | Shape::Constant { .. } => 0.0,
            Shape::PolynomialDecay {
                amplitude,
                width,
                exponent,
            } => {
                let x = r / width;
                -2.0 * exponent * amplitude * x / width * (1.0 + x * x).powf(-exponent - 1.0)
            }
        }
    }

    fn support(&self) -> f64 {
        match *self {
            Shape::Indicator { radius, .. } => radius,
            _ => f64::INFINITY,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Shape::Indicator { radius, .. } => vec![radius],
            _ => Vec::new(),
        }
    }
}

/// Velocity `u(r) = r * shape(r)`, which vanishes at the origin by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialVelocity {
    pub shape: Shape,
}

impl RadialVelocity {
    pub fn new(shape: Shape) -> Self {
        Self { shape }
    }

    /// Largest `|u|` on `[0, radius]`, sampled.
    pub fn max_abs_on(&self, radius: f64) -> f64 {
        const SAMPLES: usize = 4001;
        (0..SAMPLES)
            .map(|k| self.value(radius * k as f64 / (SAMPLES - 1) as f64).abs())
            .fold(0.0, f64::max)
    }
}

impl RadialField for RadialVelocity {
    fn value(&self, r: f64) -> f64 {
        r * self.shape.value(r)
    }

    fn derivative(&self, r: f64) -> f64 {
        self.shape.value(r) + r * self.shape.derivative(r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.shape.breakpoints()
    }
}

/// Mass of a radial density on `[0, radius]` by composite quadrature,
/// doubling the panel count until the result settles.
pub fn mass_within(rho: &dyn RadialField, radius: f64, n: f64) -> f64 {
    use crate::quadrature::{panel_breaks, GlRule};
    let rule = GlRule::new(16);
    let extra = rho.breakpoints();
    let f = |s: f64| s.powf(n - 1.0) * rho.value(s);
    let mut split = 32;
    let mut prev = rule.composite(&panel_breaks(0.0, radius, &extra, split), f);
    while split < 1 << 16 {
        split *= 2;
        let next = rule.composite(&panel_breaks(0.0, radius, &extra, split), f);
        let done = (next - prev).abs() <= 1e-13 * next.abs();
        prev = next;
        if done {
            break;
        }
    }
    sphere_measure(n - 1.0) * prev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_masses_match_quadrature() {
        let shapes = [
            Shape::GaussianBump { amplitude: 1.3, width: 0.4 },
            Shape::Indicator { amplitude: 2.0, radius: 0.7 },
            Shape::PolynomialDecay {
                amplitude: 0.8,
                width: 0.5,
                exponent: 3.0,
            },
        ];
        for shape in shapes {
            for n in [1.0, 2.0, 3.0] {
                let numeric = mass_within(&shape, 200.0 * shape.extent(), n);
                let exact = shape.mass(n);
                assert!((numeric - exact).abs() / exact < 1e-6, "{shape:?} n={n}: {numeric} vs {exact}");
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let shape = Shape::PolynomialDecay {
            amplitude: 0.8,
            width: 0.5,
            exponent: 1.5,
        };
        let h = 1e-6;
        for r in [0.1, 0.5, 1.3] {
            let fd = (shape.value(r + h) - shape.value(r - h)) / (2.0 * h);
            assert!((fd - shape.derivative(r)).abs() < 1e-6);
        }
        let u = RadialVelocity::new(Shape::GaussianBump { amplitude: -0.5, width: 1.0 });
        assert_eq!(u.value(0.0), 0.0);
        let fd = (u.value(0.7 + h) - u.value(0.7 - h)) / (2.0 * h);
        assert!((fd - u.derivative(0.7)).abs() < 1e-6);
    }

    #[test]
    fn constant_mass_is_infinite() {
        assert!(Shape::Constant { amplitude: 1.0 }.mass(2.0).is_infinite());
        assert!(Shape::from_name("wedge", 1.0, 1.0, 1.0).is_err());
    }
}
