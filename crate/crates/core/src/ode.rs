//! Adaptive ODE integration with event location, blowup detection and
//! decay-exponent fitting.
//!
//! The stepper is the Dormand-Prince 5(4) embedded pair with error control on
//! the fifth-order solution. Dense output between accepted steps is the cubic
//! Hermite interpolant built from the step end points and their derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoreError, Result};

/// Right-hand side of an autonomous or time-dependent first-order system.
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]);
}

/// Adapter turning a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        (self.f)(t, y, dy)
    }
}

/// Tolerances, step bounds, horizon and blowup threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub t_max: f64,
    pub magnitude_cap: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-15,
            h_max: 10.0,
            t_max: 200.0,
            magnitude_cap: 1e8,
            max_steps: 5_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_horizon(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    /// Same configuration with both tolerances divided by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        self.with_tolerances(self.rel_tol / factor, self.abs_tol / factor)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(invalid("rel_tol", "tolerances must be positive"));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return Err(invalid("h_init", "need 0 < h_min <= h_init <= h_max"));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(invalid("t_max", "horizon must be positive and finite"));
        }
        if !(self.magnitude_cap > 0.0) {
            return Err(invalid("magnitude_cap", "cap must be positive"));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "step budget must be positive"));
        }
        Ok(())
    }
}

/// Which sign changes of an event functional count as a hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    Rising,
    Falling,
}

/// Event functional `g(t, y)`.
pub type EventFn<'a> = Box<dyn Fn(f64, &[f64]) -> f64 + Sync + 'a>;

/// A scalar functional whose sign changes are located along the solution.
pub struct Event<'a> {
    pub name: String,
    pub g: EventFn<'a>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a> Event<'a> {
    pub fn new(
        name: impl Into<String>,
        direction: Direction,
        terminal: bool,
        g: impl Fn(f64, &[f64]) -> f64 + Sync + 'a,
    ) -> Self {
        Self {
            name: name.into(),
            g: Box::new(g),
            direction,
            terminal,
        }
    }

    fn fires(&self, before: f64, after: f64) -> bool {
        let rising = before < 0.0 && after >= 0.0;
        let falling = before > 0.0 && after <= 0.0;
        match self.direction {
            Direction::Any => rising || falling,
            Direction::Rising => rising,
            Direction::Falling => falling,
        }
    }
}

/// One located event crossing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventHit {
    pub name: String,
    pub t: f64,
    pub state: Vec<f64>,
}

/// Why an integration stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    ReachedHorizon,
    Event { name: String, t: f64 },
    BlowupDetected { t_estimate: f64, component: usize },
    /// The cap was exceeded without the signature of finite-time escape.
    CapExceeded { t: f64, component: usize },
    StepCollapse { t: f64, reason: String },
}

/// Accepted steps of one integration together with how it ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    slopes: Vec<f64>,
    pub termination: Termination,
    pub events: Vec<EventHit>,
}

impl TrajectoryRecord {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            slopes: Vec::new(),
            termination: Termination::ReachedHorizon,
            events: Vec::new(),
        }
    }

    fn push(&mut self, t: f64, y: &[f64], f: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(y);
        self.slopes.extend_from_slice(f);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn slope(&self, k: usize) -> &[f64] {
        &self.slopes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn first_state(&self) -> &[f64] {
        self.state(0)
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        (0..self.len()).map(|k| self.state(k)[i]).collect()
    }

    /// Largest absolute component over all recorded samples.
    pub fn max_norm(&self) -> f64 {
        self.states.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest absolute value of one component over all recorded samples.
    pub fn max_abs_component(&self, i: usize) -> f64 {
        (0..self.len()).fold(0.0_f64, |m, k| m.max(self.state(k)[i].abs()))
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self.termination, Termination::BlowupDetected { .. })
    }

    pub fn blowup_time(&self) -> Option<f64> {
        match self.termination {
            Termination::BlowupDetected { t_estimate, .. } => Some(t_estimate),
            _ => None,
        }
    }

    /// Dense output at `t` within the recorded range.
    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 || t <= self.times[0] {
            return self.state(0).to_vec();
        }
        if t >= self.times[n - 1] {
            return self.state(n - 1).to_vec();
        }
        let k = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => return self.state(k).to_vec(),
            Err(k) => k - 1,
        };
        let mut out = vec![0.0; self.dim];
        hermite(
            self.times[k],
            self.state(k),
            self.slope(k),
            self.times[k + 1],
            self.state(k + 1),
            self.slope(k + 1),
            t,
            &mut out,
        );
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn hermite(t0: f64, y0: &[f64], f0: &[f64], t1: f64, y1: &[f64], f1: &[f64], t: f64, out: &mut [f64]) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    for i in 0..out.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Time-to-escape `|y|/|y'|` below which growth counts as finite-time escape.
const FEEDBACK_WINDOW: f64 = 1e-3;
/// Samples used for the reciprocal extrapolation of the blowup time.
const BLOWUP_FIT_SAMPLES: usize = 6;
/// Width to which event times are bisected.
const EVENT_TOL: f64 = 1e-10;

struct Workspace {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
        }
    }
}

/// One Dormand-Prince step from `(t, y)` with derivative `f0` already in `w.k[0]`.
fn dp_step(sys: &dyn OdeSystem, t: f64, y: &[f64], h: f64, w: &mut Workspace) {
    let n = y.len();
    let Workspace { k, tmp, y_new, err } = w;
    let [k1, k2, k3, k4, k5, k6, k7] = k;
    for i in 0..n {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    sys.rhs(t + C2 * h, tmp, k2);
    for i in 0..n {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    sys.rhs(t + C3 * h, tmp, k3);
    for i in 0..n {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    sys.rhs(t + C4 * h, tmp, k4);
    for i in 0..n {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    sys.rhs(t + C5 * h, tmp, k5);
    for i in 0..n {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    sys.rhs(t + h, tmp, k6);
    for i in 0..n {
        y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    sys.rhs(t + h, y_new, k7);
    for i in 0..n {
        err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn argmax_abs(y: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..y.len() {
        if y[i].abs() > y[best].abs() {
            best = i;
        }
    }
    best
}

/// Finite-time escape signature: the largest component grows in magnitude
/// and its reciprocal is closing in on zero within a short window.
fn escaping(y: &[f64], f: &[f64]) -> Option<usize> {
    let i = argmax_abs(y);
    let growing = y[i] * f[i] > 0.0;
    let horizon = y[i].abs() / f[i].abs();
    if growing && horizon < FEEDBACK_WINDOW {
        Some(i)
    } else {
        None
    }
}

/// Extrapolate `1/|y_i|` linearly to zero over the last recorded samples.
fn blowup_time(record: &TrajectoryRecord, i: usize) -> f64 {
    let n = record.len();
    let start = n.saturating_sub(BLOWUP_FIT_SAMPLES);
    let pts: Vec<(f64, f64)> = (start..n)
        .map(|k| (record.times[k], 1.0 / record.state(k)[i].abs()))
        .collect();
    let last = *pts.last().unwrap();
    // Local Riccati estimate, used when the fit is degenerate.
    let local = {
        let f = record.slope(n - 1)[i].abs();
        let y = record.state(n - 1)[i].abs();
        last.0 + y / f
    };
    if pts.len() < 2 {
        return local;
    }
    let m = pts.len() as f64;
    let (st, sr) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mt, mr) = (st / m, sr / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in &pts {
        sxy += (p.0 - mt) * (p.1 - mr);
        sxx += (p.0 - mt) * (p.0 - mt);
    }
    if sxx <= 0.0 || sxy >= 0.0 {
        return local;
    }
    let slope = sxy / sxx;
    let t = mt - mr / slope;
    if t.is_finite() && t >= last.0 {
        t
    } else {
        local
    }
}

/// Integrate to the horizon or until blowup is detected.
pub fn integrate(sys: &dyn OdeSystem, y0: &[f64], config: &IntegratorConfig) -> Result<TrajectoryRecord> {
    integrate_with_events(sys, y0, config, &[])
}

/// Integrate until the first sign change of `event`, located by bisection on
/// the dense output.
pub fn integrate_until_event(
    sys: &dyn OdeSystem,
    y0: &[f64],
    config: &IntegratorConfig,
    event: Event<'_>,
) -> Result<TrajectoryRecord> {
    let event = Event {
        terminal: true,
        ..event
    };
    integrate_with_events(sys, y0, config, std::slice::from_ref(&event))
}

/// General driver: any number of terminal or recording events.
pub fn integrate_with_events(
    sys: &dyn OdeSystem,
    y0: &[f64],
    config: &IntegratorConfig,
    events: &[Event<'_>],
) -> Result<TrajectoryRecord> {
    config.validate()?;
    let n = sys.dim();
    if y0.len() != n {
        return Err(invalid("y0", format!("expected {n} components, got {}", y0.len())));
    }
    if !finite(y0) {
        return Err(CoreError::Domain("initial state must be finite".into()));
    }
    let mut rec = TrajectoryRecord::new(n);
    let mut w = Workspace::new(n);
    let mut t = 0.0;
    let mut y = y0.to_vec();
    sys.rhs(t, &y, &mut w.k[0]);
    rec.push(t, &y, &w.k[0]);
    if !finite(&w.k[0]) {
        rec.termination = Termination::StepCollapse {
            t,
            reason: "non-finite derivative at the initial state".into(),
        };
        return Ok(rec);
    }
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let mut h = config.h_init.min(config.t_max);
    let mut steps = 0usize;
    let mut dense = vec![0.0; n];

    while t < config.t_max {
        steps += 1;
        if steps > config.max_steps {
            rec.termination = Termination::StepCollapse {
                t,
                reason: "step budget exhausted".into(),
            };
            return Ok(rec);
        }
        let last_step = t + h >= config.t_max;
        if last_step {
            h = config.t_max - t;
        }
        dp_step(sys, t, &y, h, &mut w);
        let ok = finite(&w.y_new) && finite(&w.k[6]) && finite(&w.err);
        let err_norm = if ok {
            let mut acc = 0.0;
            for ((yi, ni), ei) in y.iter().zip(&w.y_new).zip(&w.err) {
                let sc = config.abs_tol + config.rel_tol * yi.abs().max(ni.abs());
                let e = ei / sc;
                acc += e * e;
            }
            (acc / n as f64).sqrt()
        } else {
            f64::INFINITY
        };

        if err_norm > 1.0 {
            let factor = if err_norm.is_finite() {
                (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h *= factor;
            if h < config.h_min {
                if let Some(i) = escaping(&y, &w.k[0]) {
                    let te = blowup_time(&rec, i);
                    rec.termination = Termination::BlowupDetected {
                        t_estimate: te,
                        component: i,
                    };
                } else {
                    rec.termination = Termination::StepCollapse {
                        t,
                        reason: if ok {
                            "step size fell below h_min".into()
                        } else {
                            "non-finite right-hand side".into()
                        },
                    };
                }
                return Ok(rec);
            }
            continue;
        }

        let t_new = if last_step { config.t_max } else { t + h };
        let t_old = t;
        // Event location on the dense output of this step.
        let mut earliest: Option<(usize, f64)> = None;
        let mut hits: Vec<EventHit> = Vec::new();
        let g_new: Vec<f64> = events.iter().map(|e| (e.g)(t_new, &w.y_new)).collect();
        for (j, e) in events.iter().enumerate() {
            if !e.fires(g_prev[j], g_new[j]) {
                continue;
            }
            let (mut a, mut b) = (t_old, t_new);
            let ga = g_prev[j];
            while b - a > EVENT_TOL {
                let m = 0.5 * (a + b);
                hermite(t_old, &y, &w.k[0], t_new, &w.y_new, &w.k[6], m, &mut dense);
                let gm = (e.g)(m, &dense);
                if (gm < 0.0) == (ga < 0.0) && gm != 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            let te = 0.5 * (a + b);
            hermite(t_old, &y, &w.k[0], t_new, &w.y_new, &w.k[6], te, &mut dense);
            hits.push(EventHit {
                name: e.name.clone(),
                t: te,
                state: dense.clone(),
            });
            if e.terminal && earliest.is_none_or(|(_, tb)| te < tb) {
                earliest = Some((j, te));
            }
        }
        g_prev = g_new;

        if let Some((j, te)) = earliest {
            hits.retain(|hit| hit.t <= te);
            hits.sort_by(|a, b| a.t.total_cmp(&b.t));
            rec.events.extend(hits);
            hermite(t_old, &y, &w.k[0], t_new, &w.y_new, &w.k[6], te, &mut dense);
            if te > t_old {
                let mut f = vec![0.0; n];
                sys.rhs(te, &dense, &mut f);
                rec.push(te, &dense, &f);
            }
            rec.termination = Termination::Event {
                name: events[j].name.clone(),
                t: te,
            };
            return Ok(rec);
        }
        hits.sort_by(|a, b| a.t.total_cmp(&b.t));
        rec.events.extend(hits);

        t = t_new;
        y.copy_from_slice(&w.y_new);
        let f_new = w.k[6].clone();
        w.k[0].copy_from_slice(&f_new);
        rec.push(t, &y, &w.k[0]);

        let i = argmax_abs(&y);
        if y[i].abs() > config.magnitude_cap {
            if let Some(i) = escaping(&y, &w.k[0]) {
                let te = blowup_time(&rec, i);
                rec.termination = Termination::BlowupDetected {
                    t_estimate: te,
                    component: i,
                };
            } else {
                rec.termination = Termination::CapExceeded { t, component: i };
            }
            return Ok(rec);
        }

        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(config.h_max);
        if h < config.h_min {
            h = config.h_min;
        }
    }
    rec.termination = Termination::ReachedHorizon;
    Ok(rec)
}

/// Least-squares slope of `log|y_i|` against `log(t + 1)` over a window.
///
/// The record is resampled on points uniform in `log(t + 1)` through the dense
/// output so that the fit is not weighted by the step distribution.
pub fn estimate_decay_exponent(
    record: &TrajectoryRecord,
    component: usize,
    window: (f64, f64),
) -> Result<f64> {
    let (ta, tb) = window;
    if !(tb > ta) || ta < 0.0 {
        return Err(CoreError::Domain(format!("invalid window [{ta}, {tb}]")));
    }
    if record.is_empty() || record.last_time() < tb || record.times()[0] > ta {
        return Err(CoreError::Domain("window outside the recorded range".into()));
    }
    if component >= record.dim() {
        return Err(invalid("component", "index out of range"));
    }
    const SAMPLES: usize = 200;
    let (la, lb) = ((ta + 1.0).ln(), (tb + 1.0).ln());
    let mut xs = Vec::with_capacity(SAMPLES);
    let mut ys = Vec::with_capacity(SAMPLES);
    for k in 0..SAMPLES {
        let x = la + (lb - la) * k as f64 / (SAMPLES - 1) as f64;
        let t = x.exp() - 1.0;
        let v = record.interpolate(t)[component];
        if !(v > 0.0) {
            return Err(CoreError::Domain(format!(
                "component {component} is not positive at t = {t:.6e}"
            )));
        }
        xs.push(x);
        ys.push(v.ln());
    }
    let m = SAMPLES as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn riccati() -> FnSystem<impl Fn(f64, &[f64], &mut [f64]) + Sync> {
        FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0] * y[0])
    }

    #[test]
    fn riccati_blowup_time() {
        let rec = integrate(&riccati(), &[-1.0], &IntegratorConfig::default()).unwrap();
        let te = rec.blowup_time().expect("blowup expected");
        assert!((0.99..=1.01).contains(&te), "t_estimate = {te}");
    }

    #[test]
    fn blowup_time_tracks_reciprocal_of_data() {
        for y0 in [-0.5, -1.0, -2.0, -10.0] {
            let rec = integrate(&riccati(), &[y0], &IntegratorConfig::default()).unwrap();
            let te = rec.blowup_time().unwrap();
            let exact = -1.0 / y0;
            assert!((te - exact).abs() / exact < 0.01, "y0 = {y0}: {te} vs {exact}");
        }
    }

    #[test]
    fn exponential_decay_accuracy() {
        let sys = FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
        let cfg = IntegratorConfig::default().with_horizon(20.0).with_tolerances(1e-10, 1e-20);
        let rec = integrate(&sys, &[1.0], &cfg).unwrap();
        assert_eq!(rec.termination, Termination::ReachedHorizon);
        let exact = (-20.0_f64).exp();
        assert!((rec.last_state()[0] - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn riccati_decay_accuracy() {
        let cfg = IntegratorConfig::default().with_horizon(100.0);
        let rec = integrate(&riccati(), &[1.0], &cfg).unwrap();
        assert_eq!(rec.termination, Termination::ReachedHorizon);
        assert!((rec.last_state()[0] - 1.0 / 101.0).abs() * 101.0 < 1e-6);
    }

    #[test]
    fn linear_event() {
        let sys = FnSystem::new(1, |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0);
        let ev = Event::new("zero", Direction::Any, true, |_t, y: &[f64]| y[0]);
        let rec = integrate_until_event(&sys, &[-1.0], &IntegratorConfig::default(), ev).unwrap();
        match rec.termination {
            Termination::Event { ref name, t } => {
                assert_eq!(name, "zero");
                assert!((t - 1.0).abs() < 1e-9);
            }
            ref other => panic!("unexpected {other:?}"),
        }
        assert!((rec.last_time() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn event_never_fires() {
        let sys = FnSystem::new(1, |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 1.0);
        let ev = Event::new("never", Direction::Any, true, |_t, y: &[f64]| y[0]);
        let cfg = IntegratorConfig::default().with_horizon(5.0);
        let rec = integrate_until_event(&sys, &[1.0], &cfg, ev).unwrap();
        assert_eq!(rec.termination, Termination::ReachedHorizon);
    }

    #[test]
    fn event_independent_of_initial_step() {
        let sys = FnSystem::new(2, |_t, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let mut times = Vec::new();
        for h0 in [1e-4, 1e-3, 1e-2, 1e-1] {
            let cfg = IntegratorConfig {
                h_init: h0,
                ..IntegratorConfig::default()
            }
            .with_tolerances(1e-12, 1e-14);
            let ev = Event::new("cross", Direction::Falling, true, |_t, y: &[f64]| y[0]);
            let rec = integrate_until_event(&sys, &[1.0, 0.0], &cfg, ev).unwrap();
            times.push(rec.last_time());
        }
        for t in &times {
            assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-9, "{t}");
        }
    }

    #[test]
    fn slow_growth_is_not_blowup() {
        let sys = FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0]);
        let rec = integrate(&sys, &[1.0], &IntegratorConfig::default().with_horizon(50.0)).unwrap();
        assert!(matches!(rec.termination, Termination::CapExceeded { .. }));
    }

    #[test]
    fn nan_rhs_collapses() {
        let sys = FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| {
            dy[0] = if y[0] > 1.5 { f64::NAN } else { 1.0 }
        });
        let rec = integrate(&sys, &[0.0], &IntegratorConfig::default().with_horizon(5.0)).unwrap();
        assert!(matches!(rec.termination, Termination::StepCollapse { .. }));
    }

    #[test]
    fn decay_exponent_of_power_law() {
        let sys = FnSystem::new(1, |t, _y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * (t + 1.0).powi(-3));
        let cfg = IntegratorConfig::default().with_horizon(500.0).with_tolerances(1e-11, 1e-16);
        let rec = integrate(&sys, &[1.0], &cfg).unwrap();
        let k = estimate_decay_exponent(&rec, 0, (10.0, 400.0)).unwrap();
        assert!((k + 2.0).abs() < 0.01, "{k}");
    }

    #[test]
    fn decay_exponent_rejects_non_positive() {
        let sys = FnSystem::new(1, |_t, _y: &[f64], dy: &mut [f64]| dy[0] = -1.0);
        let cfg = IntegratorConfig::default().with_horizon(10.0);
        let rec = integrate(&sys, &[1.0], &cfg).unwrap();
        assert!(estimate_decay_exponent(&rec, 0, (1.0, 9.0)).is_err());
    }

    #[test]
    fn tolerance_halving_converges() {
        let sys = FnSystem::new(2, |_t, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0] - 0.1 * y[1];
        });
        let base = IntegratorConfig::default().with_horizon(10.0).with_tolerances(1e-8, 1e-10);
        let a = integrate(&sys, &[1.0, 0.0], &base).unwrap();
        let b = integrate(&sys, &[1.0, 0.0], &base.tightened(2.0)).unwrap();
        for i in 0..2 {
            assert!((a.last_state()[i] - b.last_state()[i]).abs() < 10.0 * 1e-8);
        }
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig {
            h_min: 1.0,
            h_init: 0.1,
            ..IntegratorConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(IntegratorConfig::default().validate().is_ok());
    }
}
