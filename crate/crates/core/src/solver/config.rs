//! Solver configuration: tunable constants, variant selection, and TOML loading.

use serde::Deserialize;

use crate::error::{Error, Result};

/// How the penalty parameter is managed between the two Cauchy steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteeringMode {
    /// Classic updates only: the penalty parameter is cut after iterations
    /// that reach the residual target but miss the feasibility target.
    Off,
    /// Adaptive steering: the penalty parameter is cut inside the iteration
    /// until the augmented-Lagrangian Cauchy step makes enough progress on
    /// the constraint-violation model.
    On,
    /// Adaptive steering that stops cutting once the penalty parameter falls
    /// to [`SolverConfig::safeguard_threshold`].
    Safeguarded,
}

/// Globalization strategy used by the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Backtracking line search along the accepted step.
    LineSearch,
    /// Step acceptance by actual-versus-predicted reduction with an own
    /// trust-region radius.
    TrustRegion,
}

/// The six named solver configurations understood by [`SolverConfig::named`].
///
/// `ba*` prefixes select classic penalty updates, `aa*` adaptive steering,
/// and the `-safe` suffix the safeguarded steering mode; `*ls` selects the
/// line-search globalization and `*tr` the trust-region one.
pub const VARIANT_NAMES: [&str; 6] = [
    "balls",
    "baltr",
    "aalls",
    "aaltr",
    "aalls-safe",
    "aaltr-safe",
];

/// Tunable constants for the augmented-Lagrangian solver.
///
/// Every field has a default; a TOML configuration file may override any
/// subset of them by key name. Unknown keys are rejected.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Backtracking factor for both Cauchy searches, in (0, 1). Default 0.5.
    pub gamma: f64,
    /// Penalty reduction factor for classic updates and the zero-residual
    /// guard, in (0, 1). Default 0.1.
    pub gamma_mu: f64,
    /// Backtracking factor for the Armijo line search, in (0, 1). Default 0.5.
    pub gamma_alpha: f64,
    /// Feasibility-target reduction factor, in (0, 1). Default 0.1.
    pub gamma_t: f64,
    /// Residual-target reduction factor, in (0, 1). Default 0.1.
    pub gamma_cap_t: f64,
    /// Fraction of the Cauchy model decrease the accepted step must retain,
    /// in (0, 1]. Default 1.0.
    pub kappa_1: f64,
    /// Fraction of the step radius available to the subspace step, in
    /// (0, 1]. Default 1.0.
    pub kappa_2: f64,
    /// Fraction of the feasibility Cauchy decrease demanded by the steering
    /// test, in (0, 1). Default 1e-4.
    pub kappa_3: f64,
    /// Residual fraction used in both Cauchy sufficient-decrease conditions,
    /// in (0, 1). Default 1e-4.
    pub eps_r: f64,
    /// Fraction of the feasibility target used by the steering test, in
    /// (0, 1). Default 0.9.
    pub kappa_t: f64,
    /// Sufficient-decrease fraction for step acceptance, in (0, 1).
    /// Default 1e-4.
    pub eta_s: f64,
    /// Ratio above which a trust-region step counts as very successful, in
    /// [`eta_s`](Self::eta_s), 1). Default 0.9.
    pub eta_vs: f64,
    /// Exponent increment for the superlinear feasibility-target decrease,
    /// in (0, 1). Default 0.5.
    pub target_exponent: f64,
    /// Initial penalty parameter, positive. Default 1.0.
    pub mu_0: f64,
    /// Stationarity tolerance on the projected-gradient residual. Default 1e-5.
    pub kappa_opt: f64,
    /// Feasibility tolerance on the constraint violation. Default 1e-5.
    pub kappa_feas: f64,
    /// Penalty value below which an infeasible stationary point may be
    /// declared. Default 1e-8.
    pub mu_min: f64,
    /// Iteration limit. Default 10_000.
    pub k_max: usize,
    /// Cap used when scaling the objective and constraint rows by their
    /// initial gradient norms. Default 100.0.
    pub grad_scale_cap: f64,
    /// Penalty reduction factor applied by the steering loop, in (0, 1).
    /// Default 0.7.
    pub steering_decrease: f64,
    /// Penalty management mode. Default [`SteeringMode::On`].
    pub steering: SteeringMode,
    /// Penalty value at which safeguarded steering stops cutting.
    /// Default 1e-4.
    pub safeguard_threshold: f64,
    /// Globalization strategy. Default [`Variant::LineSearch`].
    pub variant: Variant,
    /// Wall-clock limit in seconds. Default 300. The environment variable
    /// `STEER_AL_TIME_LIMIT_S` overrides this at run time.
    pub time_limit_s: f64,
    /// Record a per-iteration trace in the report. Default false.
    pub trace: bool,
    /// Scale the objective and constraints from their initial gradient norms
    /// before solving. Default true.
    pub prescale: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gamma: 0.5,
            gamma_mu: 0.1,
            gamma_alpha: 0.5,
            gamma_t: 0.1,
            gamma_cap_t: 0.1,
            kappa_1: 1.0,
            kappa_2: 1.0,
            kappa_3: 1e-4,
            eps_r: 1e-4,
            kappa_t: 0.9,
            eta_s: 1e-4,
            eta_vs: 0.9,
            target_exponent: 0.5,
            mu_0: 1.0,
            kappa_opt: 1e-5,
            kappa_feas: 1e-5,
            mu_min: 1e-8,
            k_max: 10_000,
            grad_scale_cap: 100.0,
            steering_decrease: 0.7,
            steering: SteeringMode::On,
            safeguard_threshold: 1e-4,
            variant: Variant::LineSearch,
            time_limit_s: 300.0,
            trace: false,
            prescale: true,
        }
    }
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(what.to_string()))
    }
}

impl SolverConfig {
    /// Checks that every constant lies in its admissible range.
    pub fn validate(&self) -> Result<()> {
        let open_unit = [
            ("gamma", self.gamma),
            ("gamma_mu", self.gamma_mu),
            ("gamma_alpha", self.gamma_alpha),
            ("gamma_t", self.gamma_t),
            ("gamma_cap_t", self.gamma_cap_t),
            ("kappa_3", self.kappa_3),
            ("eps_r", self.eps_r),
            ("kappa_t", self.kappa_t),
            ("eta_s", self.eta_s),
            ("eta_vs", self.eta_vs),
            ("target_exponent", self.target_exponent),
            ("steering_decrease", self.steering_decrease),
        ];
        for (name, value) in open_unit {
            require(
                value > 0.0 && value < 1.0,
                &format!("{name} must lie strictly between 0 and 1, got {value}"),
            )?;
        }
        for (name, value) in [("kappa_1", self.kappa_1), ("kappa_2", self.kappa_2)] {
            require(
                value > 0.0 && value <= 1.0,
                &format!("{name} must lie in (0, 1], got {value}"),
            )?;
        }
        require(
            self.eta_vs >= self.eta_s,
            &format!(
                "eta_vs ({}) must be at least eta_s ({})",
                self.eta_vs, self.eta_s
            ),
        )?;
        let positive = [
            ("mu_0", self.mu_0),
            ("kappa_opt", self.kappa_opt),
            ("kappa_feas", self.kappa_feas),
            ("mu_min", self.mu_min),
            ("grad_scale_cap", self.grad_scale_cap),
            ("safeguard_threshold", self.safeguard_threshold),
            ("time_limit_s", self.time_limit_s),
        ];
        for (name, value) in positive {
            require(
                value > 0.0 && value.is_finite(),
                &format!("{name} must be positive and finite, got {value}"),
            )?;
        }
        require(self.k_max >= 1, "k_max must be at least 1")?;
        Ok(())
    }

    /// Returns the default configuration adjusted for one of the six named
    /// variants in [`VARIANT_NAMES`].
    pub fn named(name: &str) -> Result<Self> {
        let mut config = SolverConfig::default();
        config.apply_variant_name(name)?;
        Ok(config)
    }

    /// Sets the steering mode and globalization strategy from a variant name,
    /// leaving all numeric constants untouched.
    pub fn apply_variant_name(&mut self, name: &str) -> Result<()> {
        let (variant, steering) = match name {
            "balls" => (Variant::LineSearch, SteeringMode::Off),
            "baltr" => (Variant::TrustRegion, SteeringMode::Off),
            "aalls" => (Variant::LineSearch, SteeringMode::On),
            "aaltr" => (Variant::TrustRegion, SteeringMode::On),
            "aalls-safe" => (Variant::LineSearch, SteeringMode::Safeguarded),
            "aaltr-safe" => (Variant::TrustRegion, SteeringMode::Safeguarded),
            other => return Err(Error::UnknownName(format!("solver variant `{other}`"))),
        };
        self.variant = variant;
        self.steering = steering;
        Ok(())
    }

    /// Returns the name from [`VARIANT_NAMES`] matching the current steering
    /// mode and globalization strategy.
    pub fn variant_name(&self) -> &'static str {
        match (self.variant, self.steering) {
            (Variant::LineSearch, SteeringMode::Off) => "balls",
            (Variant::TrustRegion, SteeringMode::Off) => "baltr",
            (Variant::LineSearch, SteeringMode::On) => "aalls",
            (Variant::TrustRegion, SteeringMode::On) => "aaltr",
            (Variant::LineSearch, SteeringMode::Safeguarded) => "aalls-safe",
            (Variant::TrustRegion, SteeringMode::Safeguarded) => "aaltr-safe",
        }
    }

    /// Parses a configuration from TOML text and validates it.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: SolverConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad config file: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and parses a TOML configuration file.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// The wall-clock limit in effect: the `STEER_AL_TIME_LIMIT_S`
    /// environment variable when set to a positive number, otherwise
    /// [`time_limit_s`](Self::time_limit_s).
    pub fn effective_time_limit_s(&self) -> f64 {
        if let Ok(text) = std::env::var("STEER_AL_TIME_LIMIT_S") {
            if let Ok(value) = text.trim().parse::<f64>() {
                if value > 0.0 && value.is_finite() {
                    return value;
                }
            }
        }
        self.time_limit_s
    }
}
