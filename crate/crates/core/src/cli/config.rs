//! Experiment configuration: a JSON document validated completely before any
//! computation. Numeric fields accept plain numbers or exact decimal strings.

use crate::error::{Error, Result};
use crate::models::{qhd_mass_flux, shock_speed, ModelFamily, ShockData, ShockFamily, StressLaw};
use serde::Deserialize;

/// f64 fields that tolerate `1e-10` and `"1e-10"` alike.
mod flexnum {
    use serde::de::{Deserializer, Error as DeError};
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrStr {
        Num(f64),
        Str(String),
    }

    fn to_f64<E: DeError>(v: NumOrStr) -> Result<f64, E> {
        match v {
            NumOrStr::Num(x) => Ok(x),
            NumOrStr::Str(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| E::custom(format!("bad numeric string {s:?}: {e}"))),
        }
    }

    pub fn required<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        to_f64(NumOrStr::deserialize(d)?)
    }

    pub fn optional<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<NumOrStr>::deserialize(d)?.map(to_f64).transpose()
    }

    pub fn list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<NumOrStr>::deserialize(d)?
            .into_iter()
            .map(to_f64)
            .collect()
    }

    pub fn optional_pair<'de, D: Deserializer<'de>>(d: D) -> Result<Option<(f64, f64)>, D::Error> {
        let v = Option::<[NumOrStr; 2]>::deserialize(d)?;
        match v {
            None => Ok(None),
            Some([a, b]) => Ok(Some((to_f64(a)?, to_f64(b)?))),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub shock: Option<ShockSpec>,
    #[serde(default)]
    pub numerics: NumericsSpec,
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ModelSpec {
    Elasticity {
        stress: StressSpec,
    },
    Qhd {
        #[serde(deserialize_with = "flexnum::required")]
        gamma: f64,
    },
    Boussinesq {
        #[serde(deserialize_with = "flexnum::required")]
        speed: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StressSpec {
    Sqrt,
    Power {
        #[serde(deserialize_with = "flexnum::required")]
        exponent: f64,
    },
    Cubic {
        #[serde(deserialize_with = "flexnum::required")]
        linear: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ShockSpec {
    Elasticity {
        #[serde(deserialize_with = "flexnum::required")]
        u_minus: f64,
        #[serde(deserialize_with = "flexnum::required")]
        u_plus: f64,
        family: u8,
    },
    Qhd {
        #[serde(deserialize_with = "flexnum::required")]
        rho_minus: f64,
        #[serde(deserialize_with = "flexnum::required")]
        rho_plus: f64,
        family: u8,
    },
}

#[derive(Debug, Default, Deserialize)]
pub struct NumericsSpec {
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub rtol: Option<f64>,
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub atol: Option<f64>,
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub offset_scale: Option<f64>,
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub tau_budget: Option<f64>,
}

impl NumericsSpec {
    pub fn rtol(&self) -> f64 {
        self.rtol.unwrap_or(1e-10)
    }

    pub fn offset_scale(&self) -> f64 {
        self.offset_scale.unwrap_or(1e-7)
    }
}

/// Dispersion parameters: any two of (epsilon, delta, c), or c alone with
/// delta defaulting to 1.
#[derive(Debug, Default, Deserialize, Clone, Copy)]
pub struct DispersionSpec {
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub epsilon: Option<f64>,
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub delta: Option<f64>,
    #[serde(default, deserialize_with = "flexnum::optional")]
    pub c: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentSpec {
    Validate {
        #[serde(flatten)]
        dispersion: DispersionSpec,
    },
    Profile {
        #[serde(flatten)]
        dispersion: DispersionSpec,
    },
    Periods {
        #[serde(default)]
        count: Option<usize>,
        #[serde(default, deserialize_with = "flexnum::list")]
        energies: Vec<f64>,
    },
    Oscillations {
        #[serde(flatten)]
        dispersion: DispersionSpec,
    },
    Sweep {},
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::Validate { .. } => "validate",
            ExperimentSpec::Profile { .. } => "profile",
            ExperimentSpec::Periods { .. } => "periods",
            ExperimentSpec::Oscillations { .. } => "oscillations",
            ExperimentSpec::Sweep {} => "sweep",
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct SweepSpec {
    #[serde(deserialize_with = "flexnum::list")]
    pub eps_list: Vec<f64>,
    #[serde(deserialize_with = "flexnum::required")]
    pub exponent: f64,
    #[serde(default, deserialize_with = "flexnum::optional_pair")]
    pub window: Option<(f64, f64)>,
}

#[derive(Debug, Default, Deserialize)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub prefix: Option<String>,
    #[serde(default)]
    pub gnuplot: bool,
}

impl OutputSpec {
    pub fn dir(&self) -> &str {
        self.dir.as_deref().unwrap_or(".")
    }

    pub fn prefix(&self) -> &str {
        self.prefix.as_deref().unwrap_or("run")
    }
}

impl ModelSpec {
    pub fn to_model(&self) -> Result<ModelFamily> {
        let model = match self {
            ModelSpec::Elasticity { stress } => ModelFamily::Elasticity(stress.to_law()?),
            ModelSpec::Qhd { gamma } => ModelFamily::Qhd { gamma: *gamma },
            ModelSpec::Boussinesq { speed } => ModelFamily::Boussinesq { speed: *speed },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn describe(&self) -> String {
        match self {
            ModelSpec::Elasticity { stress } => format!("elasticity({})", stress.describe()),
            ModelSpec::Qhd { gamma } => format!("qhd(gamma={gamma})"),
            ModelSpec::Boussinesq { speed } => format!("boussinesq(s={speed})"),
        }
    }
}

impl StressSpec {
    pub fn to_law(&self) -> Result<StressLaw> {
        match self {
            StressSpec::Sqrt => Ok(StressLaw::sqrt()),
            StressSpec::Power { exponent } => StressLaw::power(*exponent),
            StressSpec::Cubic { linear } => StressLaw::cubic(*linear),
        }
    }

    fn describe(&self) -> String {
        match self {
            StressSpec::Sqrt => "sqrt".into(),
            StressSpec::Power { exponent } => format!("power:{exponent}"),
            StressSpec::Cubic { linear } => format!("cubic:{linear}"),
        }
    }
}

/// Unknown keys are rejected before typed parsing; serde's own
/// deny_unknown_fields does not compose with the tagged/flattened layout.
fn reject_unknown_keys(value: &serde_json::Value) -> Result<()> {
    use serde_json::Value;
    let obj = |v: &Value, what: &str| -> Result<serde_json::Map<String, Value>> {
        v.as_object()
            .cloned()
            .ok_or_else(|| Error::Config(format!("{what} must be a JSON object")))
    };
    let check =
        |map: &serde_json::Map<String, Value>, allowed: &[&str], what: &str| -> Result<()> {
            for key in map.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(Error::Config(format!("unknown key {key:?} in {what}")));
                }
            }
            Ok(())
        };

    let root = obj(value, "config")?;
    check(
        &root,
        &[
            "model",
            "shock",
            "numerics",
            "experiment",
            "sweep",
            "output",
        ],
        "config",
    )?;
    if let Some(model) = root.get("model") {
        let m = obj(model, "model")?;
        check(&m, &["family", "stress", "gamma", "speed"], "model")?;
        if let Some(stress) = m.get("stress") {
            let s = obj(stress, "model.stress")?;
            check(&s, &["kind", "exponent", "linear"], "model.stress")?;
        }
    }
    if let Some(shock) = root.get("shock") {
        let s = obj(shock, "shock")?;
        check(
            &s,
            &["u_minus", "u_plus", "rho_minus", "rho_plus", "family"],
            "shock",
        )?;
    }
    if let Some(numerics) = root.get("numerics") {
        let n = obj(numerics, "numerics")?;
        check(
            &n,
            &["rtol", "atol", "offset_scale", "tau_budget"],
            "numerics",
        )?;
    }
    if let Some(experiment) = root.get("experiment") {
        let e = obj(experiment, "experiment")?;
        let allowed: &[&str] = match e.get("kind").and_then(Value::as_str) {
            Some("periods") => &["kind", "count", "energies"],
            Some("sweep") => &["kind"],
            _ => &["kind", "epsilon", "delta", "c"],
        };
        check(&e, allowed, "experiment")?;
    }
    if let Some(sweep) = root.get("sweep") {
        let s = obj(sweep, "sweep")?;
        check(&s, &["eps_list", "exponent", "window"], "sweep")?;
    }
    if let Some(output) = root.get("output") {
        let o = obj(output, "output")?;
        check(&o, &["dir", "prefix", "gnuplot"], "output")?;
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("{e}")))?;
        reject_unknown_keys(&raw)?;
        let cfg: ExperimentConfig =
            serde_json::from_value(raw).map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.model.to_model()?;
        match (&self.model, &self.shock) {
            (ModelSpec::Boussinesq { .. }, Some(_)) => {
                return Err(Error::Config(
                    "Boussinesq end states follow from the speed; drop the shock section".into(),
                ))
            }
            (ModelSpec::Boussinesq { .. }, None) => {}
            (_, None) => {
                return Err(Error::Config(
                    "elasticity and qhd runs need a shock section".into(),
                ))
            }
            (ModelSpec::Elasticity { .. }, Some(ShockSpec::Qhd { .. })) => {
                return Err(Error::Config(
                    "elasticity shock needs u_minus/u_plus, not densities".into(),
                ))
            }
            (ModelSpec::Qhd { .. }, Some(ShockSpec::Elasticity { .. })) => {
                return Err(Error::Config("qhd shock needs rho_minus/rho_plus".into()))
            }
            _ => {}
        }
        if let Some(spec) = &self.shock {
            let family = match spec {
                ShockSpec::Elasticity { family, .. } | ShockSpec::Qhd { family, .. } => *family,
            };
            ShockFamily::from_index(family)?;
        }
        if matches!(self.experiment, ExperimentSpec::Sweep {}) && self.sweep.is_none() {
            return Err(Error::Config(
                "sweep experiment needs a sweep section".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.eps_list.is_empty() {
                return Err(Error::Config("sweep.eps_list must not be empty".into()));
            }
            if !(sweep.exponent > 1.0) {
                return Err(Error::Config(format!(
                    "sweep.exponent = {} must exceed 1 (delta = epsilon^p = o(epsilon))",
                    sweep.exponent
                )));
            }
        }
        if let Some(rtol) = self.numerics.rtol {
            if !(1e-13..=1e-6).contains(&rtol) {
                return Err(Error::Config(format!(
                    "numerics.rtol = {rtol} outside [1e-13, 1e-6]"
                )));
            }
        }
        Ok(())
    }

    pub fn build_shock(&self) -> Result<ShockData> {
        match (&self.model, &self.shock) {
            (ModelSpec::Boussinesq { speed }, None) => ShockData::boussinesq(*speed),
            (
                ModelSpec::Elasticity { stress },
                Some(ShockSpec::Elasticity {
                    u_minus,
                    u_plus,
                    family,
                }),
            ) => shock_speed(
                &stress.to_law()?,
                *u_minus,
                *u_plus,
                ShockFamily::from_index(*family)?,
            ),
            (
                ModelSpec::Qhd { gamma },
                Some(ShockSpec::Qhd {
                    rho_minus,
                    rho_plus,
                    family,
                }),
            ) => qhd_mass_flux(
                *gamma,
                *rho_minus,
                *rho_plus,
                ShockFamily::from_index(*family)?,
            ),
            _ => Err(Error::Config("model/shock sections do not match".into())),
        }
    }

    /// Resolve (epsilon, delta) from any two of (epsilon, delta, c); with c
    /// alone delta defaults to 1. When all three are present they must agree
    /// to 1e-14 relative.
    pub fn resolve_dispersion(
        &self,
        spec: &DispersionSpec,
        shock: &ShockData,
    ) -> Result<(f64, f64)> {
        let c_of = |eps: f64, delta: f64| -> f64 {
            match self.model {
                ModelSpec::Boussinesq { speed } => eps / (speed * delta).sqrt(),
                _ => shock.s.abs() * eps / delta.sqrt(),
            }
        };
        let eps_of = |c: f64, delta: f64| -> f64 {
            match self.model {
                ModelSpec::Boussinesq { speed } => c * (speed * delta).sqrt(),
                _ => c * delta.sqrt() / shock.s.abs(),
            }
        };
        let (eps, delta) = match (spec.epsilon, spec.delta, spec.c) {
            (Some(e), Some(d), maybe_c) => {
                if let Some(c) = maybe_c {
                    let implied = c_of(e, d);
                    if (implied - c).abs() > 1e-14 * c.abs().max(implied.abs()) {
                        return Err(Error::Config(format!(
                            "inconsistent dispersion: c={c} but epsilon/delta imply {implied}"
                        )));
                    }
                }
                (e, d)
            }
            (Some(e), None, Some(c)) => {
                let delta = match self.model {
                    ModelSpec::Boussinesq { speed } => e * e / (c * c * speed),
                    _ => (shock.s.abs() * e / c).powi(2),
                };
                (e, delta)
            }
            (None, Some(d), Some(c)) => (eps_of(c, d), d),
            (None, None, Some(c)) => (eps_of(c, 1.0), 1.0),
            _ => {
                return Err(Error::Config(
                    "give two of (epsilon, delta, c), or c alone (delta defaults to 1)".into(),
                ))
            }
        };
        if !(eps > 0.0) || !(delta > 0.0) {
            return Err(Error::Config(format!(
                "dispersion must be positive: epsilon={eps}, delta={delta}"
            )));
        }
        Ok((eps, delta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = r#"{
        "model": {"family": "elasticity", "stress": {"kind": "sqrt"}},
        "shock": {"u_minus": "4", "u_plus": 5.0, "family": 2},
        "numerics": {"rtol": "1e-10"},
        "experiment": {"kind": "profile", "c": "0.004", "delta": "1e-4"},
        "output": {"dir": "out", "prefix": "fig3"}
    }"#;

    #[test]
    fn exact_decimal_strings_parse() {
        let cfg = ExperimentConfig::parse(FIG3).unwrap();
        let shock = cfg.build_shock().unwrap();
        assert_eq!(cfg.experiment.kind(), "profile");
        assert_eq!(cfg.numerics.rtol(), 1e-10);
        let (eps, delta) = cfg
            .resolve_dispersion(
                &DispersionSpec {
                    epsilon: None,
                    delta: Some(1e-4),
                    c: Some(0.004),
                },
                &shock,
            )
            .unwrap();
        assert_eq!(delta, 1e-4);
        assert!((shock.s * eps / delta.sqrt() - 0.004).abs() <= 1e-17);
    }

    #[test]
    fn unknown_keys_rejected_everywhere() {
        let bad_root = FIG3.replace("\"output\"", "\"outputs\"");
        assert!(ExperimentConfig::parse(&bad_root).is_err());
        let bad_model = FIG3.replace("\"stress\"", "\"stress_law\"");
        assert!(ExperimentConfig::parse(&bad_model).is_err());
        let bad_shock = FIG3.replace("\"u_minus\"", "\"u_left\"");
        assert!(ExperimentConfig::parse(&bad_shock).is_err());
        let bad_exp = FIG3.replace("\"c\": \"0.004\"", "\"cc\": \"0.004\"");
        assert!(ExperimentConfig::parse(&bad_exp).is_err());
        // periods experiment must not carry dispersion keys
        let periods = FIG3.replace(
            r#"{"kind": "profile", "c": "0.004", "delta": "1e-4"}"#,
            r#"{"kind": "periods", "c": "0.004"}"#,
        );
        assert!(ExperimentConfig::parse(&periods).is_err());
    }

    #[test]
    fn dispersion_resolution_paths() {
        let cfg = ExperimentConfig::parse(FIG3).unwrap();
        let shock = cfg.build_shock().unwrap();
        let s = shock.s;

        // (epsilon, delta) direct, with consistent c accepted
        let full = DispersionSpec {
            epsilon: Some(1e-3),
            delta: Some(1e-4),
            c: Some(s * 1e-3 / 1e-2),
        };
        let (e, d) = cfg.resolve_dispersion(&full, &shock).unwrap();
        assert_eq!((e, d), (1e-3, 1e-4));

        // inconsistent triple rejected
        let clash = DispersionSpec {
            epsilon: Some(1e-3),
            delta: Some(1e-4),
            c: Some(0.5),
        };
        assert!(cfg.resolve_dispersion(&clash, &shock).is_err());

        // (c, epsilon) and c alone
        let ce = DispersionSpec {
            epsilon: Some(1e-3),
            delta: None,
            c: Some(0.004),
        };
        let (e, d) = cfg.resolve_dispersion(&ce, &shock).unwrap();
        assert!((s * e / d.sqrt() - 0.004).abs() <= 1e-16);
        let c_only = DispersionSpec {
            epsilon: None,
            delta: None,
            c: Some(0.004),
        };
        let (_, d) = cfg.resolve_dispersion(&c_only, &shock).unwrap();
        assert_eq!(d, 1.0);
        assert!(cfg
            .resolve_dispersion(&DispersionSpec::default(), &shock)
            .is_err());
    }

    #[test]
    fn model_shock_mismatches_rejected() {
        let qhd_with_strain = r#"{
            "model": {"family": "qhd", "gamma": 1.4},
            "shock": {"u_minus": 4, "u_plus": 5, "family": 2},
            "experiment": {"kind": "validate"}
        }"#;
        assert!(ExperimentConfig::parse(qhd_with_strain).is_err());
        let boussinesq_with_shock = r#"{
            "model": {"family": "boussinesq", "speed": 2.0},
            "shock": {"u_minus": 0, "u_plus": 1, "family": 2},
            "experiment": {"kind": "validate"}
        }"#;
        assert!(ExperimentConfig::parse(boussinesq_with_shock).is_err());
        let missing_shock = r#"{
            "model": {"family": "elasticity", "stress": {"kind": "sqrt"}},
            "experiment": {"kind": "validate"}
        }"#;
        assert!(ExperimentConfig::parse(missing_shock).is_err());
    }

    #[test]
    fn sweep_section_validated() {
        let no_section = r#"{
            "model": {"family": "boussinesq", "speed": 2.0},
            "experiment": {"kind": "sweep"}
        }"#;
        assert!(ExperimentConfig::parse(no_section).is_err());
        let bad_exponent = r#"{
            "model": {"family": "boussinesq", "speed": 2.0},
            "experiment": {"kind": "sweep"},
            "sweep": {"eps_list": [0.04, 0.02], "exponent": 1.0}
        }"#;
        assert!(ExperimentConfig::parse(bad_exponent).is_err());
        let good = r#"{
            "model": {"family": "boussinesq", "speed": 2.0},
            "experiment": {"kind": "sweep"},
            "sweep": {"eps_list": ["4e-2", "2e-2", "1e-2", "5e-3"], "exponent": 1.5, "window": [-0.5, 0.5]}
        }"#;
        let cfg = ExperimentConfig::parse(good).unwrap();
        assert_eq!(cfg.sweep.as_ref().unwrap().eps_list.len(), 4);
        assert_eq!(cfg.sweep.as_ref().unwrap().window, Some((-0.5, 0.5)));
    }
}
