//! Characteristic systems of the radial Euler-Poisson equations.

use crate::ode::{OdeSystem, TrajectoryRecord};

/// Full characteristic system in `(p, q, s, rho)`.
#[derive(Debug, Clone, Copy)]
pub struct EpCharSystem {
    pub n: f64,
    pub kappa: f64,
    pub c: f64,
}

impl OdeSystem for EpCharSystem {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (p, q, s, rho) = (y[0], y[1], y[2], y[3]);
        let m = self.n - 1.0;
        dy[0] = -p * p + self.kappa * (rho - self.c - m * s);
        dy[1] = -q * q + self.kappa * s;
        dy[2] = -(self.n * s + self.c) * q;
        dy[3] = -rho * (p + m * q);
    }
}

/// One-dimensional reduction in `(p, rho)`.
#[derive(Debug, Clone, Copy)]
pub struct SlabSystem {
    pub kappa: f64,
    pub c: f64,
}

impl OdeSystem for SlabSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (p, rho) = (y[0], y[1]);
        dy[0] = -p * p + self.kappa * (rho - self.c);
        dy[1] = -rho * p;
    }
}

/// Damped Burgers in `(p, q)`; zero damping is the inviscid case.
#[derive(Debug, Clone, Copy)]
pub struct BurgersSystem {
    pub damping: f64,
}

impl OdeSystem for BurgersSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0] * y[0] - self.damping * y[0];
        dy[1] = -y[1] * y[1] - self.damping * y[1];
    }
}

/// Closed `(q, s)` subsystem; `c = 0` is the vacuum-background case.
#[derive(Debug, Clone, Copy)]
pub struct QsSystem {
    pub n: f64,
    pub kappa: f64,
    pub c: f64,
}

impl OdeSystem for QsSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (q, s) = (y[0], y[1]);
        dy[0] = -q * q + self.kappa * s;
        dy[1] = -(self.n * s + self.c) * q;
    }
}

/// `(q, s)` in the logarithmic time `ln(t + 1)` with `q (t+1)` and `s (t+1)^2`.
#[derive(Debug, Clone, Copy)]
pub struct RescaledQsSystem {
    pub n: f64,
    pub kappa: f64,
}

impl OdeSystem for RescaledQsSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (qh, sh) = (y[0], y[1]);
        dy[0] = -qh * qh + qh + self.kappa * sh;
        dy[1] = (2.0 - self.n * qh) * sh;
    }
}

/// `(w, v)` system driven by a recorded `(q, s)` trajectory.
///
/// `w` and `v` are `p/rho` and `1/rho` scaled by `exp((n-1) A)` with
/// `A = ln(s~/s~_0)/n` and `s~ = s + c/n`.
pub struct WvSystem<'a> {
    pub n: f64,
    pub kappa: f64,
    pub c: f64,
    pub qs: &'a TrajectoryRecord,
}

impl WvSystem<'_> {
    fn shifted_s0(&self) -> f64 {
        self.qs.first_state()[1] + self.c / self.n
    }

    /// `A(t)` and `s(t)` from the driving trajectory.
    pub fn drivers(&self, t: f64) -> (f64, f64) {
        let s = self.qs.interpolate(t)[1];
        let a = ((s + self.c / self.n) / self.shifted_s0()).ln() / self.n;
        (a, s)
    }
}

impl OdeSystem for WvSystem<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let (a, s) = self.drivers(t);
        let m = self.n - 1.0;
        dy[0] = self.kappa * (m * a).exp() - self.kappa * (self.c + m * s) * y[1];
        dy[1] = y[0];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rescaled_fixed_point() {
        let sys = RescaledQsSystem { n: 3.0, kappa: 1.0 };
        let mut dy = [1.0; 2];
        sys.rhs(0.0, &[1.0, 0.0], &mut dy);
        assert_eq!(dy, [0.0, 0.0]);
    }

    #[test]
    fn full_system_matches_formulas() {
        let sys = EpCharSystem {
            n: 3.0,
            kappa: 2.0,
            c: 0.5,
        };
        let mut dy = [0.0; 4];
        sys.rhs(0.0, &[1.0, 0.5, 0.25, 2.0], &mut dy);
        assert_eq!(dy[0], -1.0 + 2.0 * (2.0 - 0.5 - 0.5));
        assert_eq!(dy[1], -0.25 + 0.5);
        assert_eq!(dy[2], -(0.75 + 0.5) * 0.5);
        assert_eq!(dy[3], -2.0 * 2.0);
    }
}
