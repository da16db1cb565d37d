use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diff::{DEFAULT_CUTOFF, DEFAULT_DAMPING};
use crate::error::{Error, Result};

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }

            pub fn names() -> Vec<&'static str> {
                Self::ALL.iter().map(|v| v.as_str()).collect()
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::Config(format!(
                        "unknown {} {other:?}; expected one of: {}",
                        stringify!($name),
                        Self::names().join(", ")
                    ))),
                }
            }
        }
    };
}

named_enum!(
    /// Registered optimizers.
    OptimizerName {
        Sgd => "sgd",
        Adagrad => "adagrad",
        Adam => "adam",
        Qng => "qng",
        Lookahead => "lookahead",
        Laws => "laws",
        WsSgd => "wssgd",
    }
);

impl OptimizerName {
    /// Optimizers that take one step per call without an inner loop; these
    /// are the valid warm-start optimizers for WS-SGD.
    pub fn is_single_step(self) -> bool {
        matches!(self, OptimizerName::Sgd | OptimizerName::Adagrad | OptimizerName::Adam | OptimizerName::Qng)
    }
}

named_enum!(
    /// Inner learning-rate schedule.
    Schedule {
        Constant => "constant",
        Theorem1 => "theorem1",
    }
);

named_enum!(
    /// How the warm-start point is produced from the previous slow weights.
    WarmStartStrategy {
        InnerSgd => "inner-sgd",
        AveragedAtTheta => "averaged-at-theta",
        Ema => "ema",
    }
);

named_enum!(
    /// Reparameterization coefficient used by WS-SGD to mix slow weights
    /// with the warm-start point.
    DeltaVariant {
        Lookahead => "lookahead",
        Fisher => "fisher",
        AdamLike => "adam-like",
    }
);

/// Hyperparameters shared by all optimizers. Each optimizer reads the
/// subset it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    /// Outer learning rate η.
    pub eta: f64,
    /// Warm-start (look-around) learning rate μ₀.
    pub mu: f64,
    /// Warm-start iterations K.
    pub k: usize,
    /// Lookahead coefficient α.
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// EMA mixing of warm-start steps.
    pub beta: f64,
    pub epsilon: f64,
    /// Metric damping δ.
    pub delta: f64,
    /// Eigenvalue cutoff of the damped pseudo-inverse.
    pub cutoff: f64,
    /// Constant of the decaying inner schedule.
    pub c0: f64,
    pub schedule: Schedule,
    pub warm_start: WarmStartStrategy,
    pub delta_variant: DeltaVariant,
    /// Warm-start optimizer W for WS-SGD and Lookahead.
    pub inner: OptimizerName,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            eta: 0.01,
            mu: 0.5,
            k: 5,
            alpha: 0.5,
            beta1: 0.9,
            beta2: 0.999,
            beta: 0.9,
            epsilon: 1e-8,
            delta: DEFAULT_DAMPING,
            cutoff: DEFAULT_CUTOFF,
            c0: 1.0,
            schedule: Schedule::Constant,
            warm_start: WarmStartStrategy::InnerSgd,
            delta_variant: DeltaVariant::Fisher,
            inner: OptimizerName::Sgd,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("eta", self.eta), ("mu", self.mu)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let open_unit = [
            ("alpha", self.alpha),
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("beta", self.beta),
        ];
        for (name, v) in open_unit {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        let non_negative = [("epsilon", self.epsilon), ("delta", self.delta), ("cutoff", self.cutoff)];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be ≥ 0 and finite, got {v}")));
            }
        }
        if !(self.c0 > 0.0 && self.c0 <= 1.0) {
            return Err(Error::Config(format!("c0 must lie in (0, 1], got {}", self.c0)));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !self.inner.is_single_step() {
            return Err(Error::Config(format!(
                "inner optimizer must be one of sgd, adagrad, adam, qng; got {}",
                self.inner
            )));
        }
        if self.inner != OptimizerName::Sgd && self.warm_start != WarmStartStrategy::InnerSgd {
            return Err(Error::Config(format!(
                "warm-start strategy {} is defined for an sgd inner loop only",
                self.warm_start
            )));
        }
        Ok(())
    }

    /// `λ_t = η_t / K`.
    pub fn lambda(&self) -> f64 {
        self.eta / self.k as f64
    }
}
