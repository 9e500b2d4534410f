use std::f64::consts::FRAC_PI_3;
use std::path::Path;

use legkit_core::isotropy::{closed_form_family, isotropy_report, FamilyVariant, IsotropyError, IsotropyReport, TripodConfig};
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, load};
use crate::svg::{Frame, Svg};
use crate::{CliError, Output};

/// Parameters of a closed-form isotropic family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    pub alpha1: f64,
    pub gamma1: f64,
    pub beta: f64,
    #[serde(default = "unit_length")]
    pub length: f64,
    #[serde(default = "first_variant")]
    pub variant: FamilyVariant,
    /// Sign of `r_O`.
    #[serde(default = "yes")]
    pub positive: bool,
}

fn unit_length() -> f64 {
    1.0
}

fn first_variant() -> FamilyVariant {
    FamilyVariant::First
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripodInput {
    Family(FamilyParams),
    Explicit(TripodConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsotropyConfig {
    pub tripod: TripodInput,
    /// Largest residual accepted as isotropic.
    pub tolerance: f64,
}

impl Default for IsotropyConfig {
    fn default() -> Self {
        Self {
            tripod: TripodInput::Family(FamilyParams {
                alpha1: 0.0,
                gamma1: FRAC_PI_3,
                beta: std::f64::consts::FRAC_PI_2,
                length: 1.0,
                variant: FamilyVariant::First,
                positive: true,
            }),
            tolerance: 1e-9,
        }
    }
}

fn classify(err: IsotropyError) -> CliError {
    match err {
        IsotropyError::InvalidConfig(m) => CliError::Config(m),
        other => CliError::Infeasible {
            message: other.to_string(),
            diagnostics: serde_json::json!({ "error": other.to_string() }),
        },
    }
}

/// Writes `isotropy.json` and `layout.svg`.
pub fn run(config: &IsotropyConfig, out: &Output) -> Result<IsotropyReport, CliError> {
    if !(config.tolerance.is_finite() && config.tolerance > 0.0) {
        return Err(CliError::Config("tolerance must be positive".into()));
    }
    let built = match config.tripod {
        TripodInput::Family(f) => closed_form_family(f.alpha1, f.gamma1, f.beta, f.length, f.variant, f.positive),
        TripodInput::Explicit(t) => t.validate().map(|_| t),
    };
    let result = built.and_then(|tripod| isotropy_report(&tripod, config.tolerance).map(|r| (tripod, r)));
    let (tripod, report) = match result {
        Ok(pair) => pair,
        Err(e) => {
            let err = classify(e);
            if let CliError::Infeasible { diagnostics, .. } = &err {
                out.json("isotropy.json", diagnostics)?;
            }
            return Err(err);
        }
    };
    out.json("isotropy.json", &report)?;
    out.svg("layout.svg", layout_plot(&tripod))?;
    Ok(report)
}

/// Body triangle through the hips and each leg from hip to foot.
fn layout_plot(config: &TripodConfig) -> Svg {
    let centre = (config.xi, config.eta);
    let hips: Vec<(f64, f64)> = config
        .legs
        .iter()
        .map(|l| {
            let angle = config.theta + l.gamma;
            (config.xi + l.r_o * angle.cos(), config.eta + l.r_o * angle.sin())
        })
        .collect();
    let feet: Vec<(f64, f64)> = config.feet().iter().map(|p| (p.x, p.y)).collect();
    let all: Vec<(f64, f64)> = hips.iter().chain(&feet).chain([&centre]).copied().collect();
    let frame = Frame::fit(&all, 60.0, 30.0, 440.0, 440.0, true);
    let mut svg = Svg::new(540.0, 520.0);
    frame.axes(&mut svg, "x", "y");
    svg.polygon(&frame.map_all(&hips), "#dde8f5", "#1f77b4");
    for (i, (h, f)) in hips.iter().zip(&feet).enumerate() {
        svg.line(frame.map(*h), frame.map(*f), "#333", 2.0);
        svg.circle(frame.map(*f), 4.0, "#d62728");
        let (x, y) = frame.map(*f);
        svg.text((x + 6.0, y - 6.0), 12.0, "start", &format!("leg {}", [1, 3, 5][i]));
    }
    svg.circle(frame.map(centre), 3.0, "#1f77b4");
    svg.text((60.0, 20.0), 12.0, "start", "hips (body triangle) and feet");
    svg
}

pub fn main(config_path: Option<&Path>, out_dir: &Path) -> Result<IsotropyReport, CliError> {
    let config: IsotropyConfig = load(config_path)?;
    let out = Output::create(out_dir, "isotropy", config_hash(&config))?;
    run(&config, &out)
}
