//! Truncated real Fourier series on the unit torus, used to describe smooth
//! periodic initial data and exact heat solutions.

use std::f64::consts::TAU;

/// `mean + sum_m cos[m-1] cos(2 pi m x) + sin[m-1] sin(2 pi m x)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierSeries {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            mean: c,
            ..Self::default()
        }
    }

    /// `amp * cos(2 pi mode x)`.
    pub fn cos_mode(mode: usize, amp: f64) -> Self {
        let mut s = Self::zero();
        s.set_cos(mode, amp);
        s
    }

    /// `amp * sin(2 pi mode x)`.
    pub fn sin_mode(mode: usize, amp: f64) -> Self {
        let mut s = Self::zero();
        s.set_sin(mode, amp);
        s
    }

    pub fn set_cos(&mut self, mode: usize, amp: f64) {
        assert!(mode >= 1, "mode 0 is the mean");
        if self.cos.len() < mode {
            self.cos.resize(mode, 0.0);
        }
        self.cos[mode - 1] = amp;
    }

    pub fn set_sin(&mut self, mode: usize, amp: f64) {
        assert!(mode >= 1, "mode 0 is the mean");
        if self.sin.len() < mode {
            self.sin.resize(mode, 0.0);
        }
        self.sin[mode - 1] = amp;
    }

    pub fn plus(mut self, other: &Self) -> Self {
        self.mean += other.mean;
        for (m, c) in other.cos.iter().enumerate() {
            let cur = self.cos.get(m).copied().unwrap_or(0.0);
            self.set_cos(m + 1, cur + c);
        }
        for (m, s) in other.sin.iter().enumerate() {
            let cur = self.sin.get(m).copied().unwrap_or(0.0);
            self.set_sin(m + 1, cur + s);
        }
        self
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            mean: self.mean * k,
            cos: self.cos.iter().map(|c| c * k).collect(),
            sin: self.sin.iter().map(|s| s * k).collect(),
        }
    }

    pub fn max_mode(&self) -> usize {
        let last = |v: &[f64]| v.iter().rposition(|c| *c != 0.0).map_or(0, |i| i + 1);
        last(&self.cos).max(last(&self.sin))
    }

    fn modes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.cos.len().max(self.sin.len());
        (0..n).map(move |i| {
            (
                (i + 1) as f64,
                self.cos.get(i).copied().unwrap_or(0.0),
                self.sin.get(i).copied().unwrap_or(0.0),
            )
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mean
            + self
                .modes()
                .map(|(m, c, s)| {
                    let (sn, cs) = (TAU * m * x).sin_cos();
                    c * cs + s * sn
                })
                .sum::<f64>()
    }

    pub fn derivative(&self) -> Self {
        let mut d = Self::zero();
        for (m, c, s) in self.modes() {
            let k = TAU * m;
            let mi = m as usize;
            d.set_cos(mi, k * s);
            d.set_sin(mi, -k * c);
        }
        d
    }

    /// Periodic antiderivative of the oscillating part (the mean is dropped,
    /// so `x * mean` must be added by the caller when needed).
    pub fn antiderivative(&self) -> Self {
        let mut a = Self::zero();
        for (m, c, s) in self.modes() {
            let k = TAU * m;
            let mi = m as usize;
            a.set_cos(mi, -s / k);
            a.set_sin(mi, c / k);
        }
        a
    }

    /// Average over `[lo, hi]`.
    pub fn cell_average(&self, lo: f64, hi: f64) -> f64 {
        let anti = self.antiderivative();
        self.mean + (anti.eval(hi) - anti.eval(lo)) / (hi - lo)
    }

    /// Every mode `m` damped by `exp(-4 pi^2 eps m^2 t)`; the mean is kept.
    pub fn heat_flow(&self, eps: f64, t: f64) -> Self {
        let mut out = Self::constant(self.mean);
        for (m, c, s) in self.modes() {
            let damp = (-(TAU * m).powi(2) * eps * t).exp();
            out.set_cos(m as usize, c * damp);
            out.set_sin(m as usize, s * damp);
        }
        out
    }

    /// Drops modes above `k`.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            mean: self.mean,
            cos: self.cos.iter().take(k).copied().collect(),
            sin: self.sin.iter().take(k).copied().collect(),
        }
    }

    /// Minimum over a uniform sample of `n` points.
    pub fn sampled_min(&self, n: usize) -> f64 {
        (0..n)
            .map(|i| self.eval(i as f64 / n as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves `x + w(x) = target` for a 1-periodic `w` with `1 + w' > 0`.
///
/// Safeguarded Newton: the iterate stays inside a bracket that shrinks on
/// every step.
pub fn invert_shifted_identity(w: &FourierSeries, dw: &FourierSeries, target: f64) -> f64 {
    let bound = w.cos.iter().chain(&w.sin).map(|c| c.abs()).sum::<f64>() + w.mean.abs();
    let (mut lo, mut hi) = (target - bound - 1e-12, target + bound + 1e-12);
    let mut x = target - w.eval(target);
    for _ in 0..100 {
        if !(lo..=hi).contains(&x) {
            x = 0.5 * (lo + hi);
        }
        let g = x + w.eval(x) - target;
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = g / (1.0 + dw.eval(x));
        let next = x - step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) || hi - lo <= 1e-15 {
            return next.clamp(lo, hi);
        }
        x = next;
    }
    x
}
