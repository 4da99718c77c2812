use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::noise::NoiseSpec;

/// How the corrector picks one member of the integer family of index shifts
/// that all rearrange the same residue multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Anchor {
    /// Period mean of `xi` as close as possible to the predictor's.
    #[default]
    MeanClosest,
    /// Least-squares fit to the predictor output.
    L2Input,
    /// First output value is the smallest lifted value `>= 0`.
    ZeroPhase,
}

impl Anchor {
    pub const ALL: [Anchor; 3] = [Anchor::MeanClosest, Anchor::L2Input, Anchor::ZeroPhase];

    pub fn name(self) -> &'static str {
        match self {
            Anchor::MeanClosest => "mean_closest",
            Anchor::L2Input => "l2_input",
            Anchor::ZeroPhase => "zero_phase",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// Everything one run of the scheme needs besides initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// Time step.
    pub h: f64,
    /// Viscosity / noise level.
    pub epsilon: f64,
    /// Pressure scale relative to viscosity.
    pub lambda: f64,
    /// Label cells per period.
    pub cells: usize,
    pub noise: NoiseSpec,
    pub forcing: ForcingSpec,
    pub anchor: Anchor,
    /// Final time.
    pub horizon: f64,
    /// Record every `save_stride`-th state (the final state is always kept).
    pub save_stride: usize,
}

impl SchemeConfig {
    /// Binary noise on the economy grid `M = 2L`, no forcing, mean-closest
    /// anchor, `save_stride = 1`.
    pub fn economy(
        h: f64,
        epsilon: f64,
        lambda: f64,
        frequency: usize,
        horizon: f64,
    ) -> Result<Self> {
        let cfg = Self {
            h,
            epsilon,
            lambda,
            cells: 2 * frequency,
            noise: NoiseSpec::binary(frequency)?,
            forcing: ForcingSpec::None,
            anchor: Anchor::MeanClosest,
            horizon,
            save_stride: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_forcing(mut self, forcing: ForcingSpec) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_save_stride(mut self, stride: usize) -> Self {
        self.save_stride = stride;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::config("h", "time step must be positive"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::config("epsilon", "must be finite and >= 0"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::config("lambda", "must be finite and >= 0"));
        }
        if self.lambda * self.h >= 1.0 {
            return Err(Error::config("lambda", "lambda * h must be < 1"));
        }
        if self.cells < 2 {
            return Err(Error::config("M", "need at least 2 cells"));
        }
        self.noise.check_grid(self.cells)?;
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return Err(Error::config("T", "horizon must be finite and >= 0"));
        }
        if self.save_stride == 0 {
            return Err(Error::config("save_stride", "must be >= 1"));
        }
        Ok(())
    }

    /// Noise period `r = 1/L`.
    pub fn r(&self) -> f64 {
        self.noise.period()
    }

    /// `sqrt(2 eps h)`.
    pub fn noise_amplitude(&self) -> f64 {
        (2.0 * self.epsilon * self.h).sqrt()
    }

    /// Noise amplitude measured in label cells, `sqrt(2 eps h) M`.
    pub fn amplitude_in_cells(&self) -> f64 {
        self.noise_amplitude() * self.cells as f64
    }

    /// Whether the noise shifts parcels by a whole number of cells (to 1e-12),
    /// the condition under which the rest state is an exact fixed point.
    pub fn integral_amplitude(&self) -> bool {
        let a = self.amplitude_in_cells();
        (a - a.round()).abs() <= 1e-12
    }

    /// `ceil(T/h)`, insensitive to the rounding of `T/h` itself.
    pub fn steps(&self) -> usize {
        let ratio = self.horizon / self.h;
        let n = ratio.round();
        if (ratio - n).abs() <= 1e-9 * n.max(1.0) {
            n as usize
        } else {
            ratio.ceil() as usize
        }
    }

    /// Growth constant `max(lambda + 1, lambda^2 + l_F)` of the predictor in
    /// the sup norm.
    pub fn growth_constant(&self) -> f64 {
        (self.lambda + 1.0).max(self.lambda * self.lambda + self.forcing.lipschitz())
    }
}

/// Among multiples of `multiple` within a factor 2 of `target`, the cell count
/// whose noise amplitude `sqrt(2 eps h) M` is closest to an integer.
/// Returns `(M, |defect|)`; ties prefer the count closest to `target`.
pub fn nearest_compliant_cells(
    epsilon: f64,
    h: f64,
    target: usize,
    multiple: usize,
) -> (usize, f64) {
    let amp = (2.0 * epsilon * h).sqrt();
    let multiple = multiple.max(1);
    let lo = (target / 2).max(multiple) / multiple;
    let hi = (2 * target).max(multiple) / multiple;
    (lo..=hi)
        .map(|i| {
            let m = i * multiple;
            let a = amp * m as f64;
            (m, (a - a.round()).abs())
        })
        .min_by(|x, y| {
            let dx = x.0.abs_diff(target);
            let dy = y.0.abs_diff(target);
            x.1.total_cmp(&y.1).then(dx.cmp(&dy))
        })
        .unwrap_or((target, f64::NAN))
}
