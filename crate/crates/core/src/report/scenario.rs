use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::device::{default_catalog, find_device, load_catalog, tianhe1_catalog, ByteStepRate, DeviceSpec, Fleet};
use crate::estimate::{ComparisonBound, DictionaryModel, Tf1Model, ANNUAL_PROGRESS_FACTOR};
use crate::time::parse_duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    BruteForce,
    Dictionary,
    Tf1,
    GameOtp,
    DeskValidation,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::BruteForce => "brute_force",
            ScenarioKind::Dictionary => "dictionary",
            ScenarioKind::Tf1 => "tf1",
            ScenarioKind::GameOtp => "game_otp",
            ScenarioKind::DeskValidation => "desk_validation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            ScenarioKind::BruteForce,
            ScenarioKind::Dictionary,
            ScenarioKind::Tf1,
            ScenarioKind::GameOtp,
            ScenarioKind::DeskValidation,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    fn keys(self) -> &'static [&'static str] {
        const FLEET: [&str; 3] = ["fleet", "fleet_rate", "catalog"];
        match self {
            ScenarioKind::BruteForce => &[
                "key_bits",
                "cipher",
                "bytes_per_key_bit",
                "target",
                "annual_factor",
                FLEET[0],
                FLEET[1],
                FLEET[2],
            ],
            ScenarioKind::Dictionary => &[
                "key_bits",
                "epsilon",
                "plaintext_blocks",
                "steps_per_comparison",
                "bound",
                FLEET[0],
                FLEET[1],
                FLEET[2],
            ],
            ScenarioKind::Tf1 => &[
                "word_bits",
                "ops_per_state_check",
                "scan_rate",
                FLEET[0],
                FLEET[1],
                FLEET[2],
            ],
            ScenarioKind::GameOtp => &["seed", "bias", "trials", "budget", "alpha", "per_step_information"],
            ScenarioKind::DeskValidation => &["seed", "quick"],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "scenario line {l}: {}", self.message),
            None => write!(f, "scenario: {}", self.message),
        }
    }
}

fn error(line: Option<usize>, message: impl Into<String>) -> ScenarioError {
    ScenarioError {
        line,
        message: message.into(),
    }
}

/// A parsed but not yet validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    entries: Vec<(String, String, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogChoice {
    Default,
    Tianhe1,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FleetSpec {
    Devices(Vec<Fleet>),
    Rate(f64),
}

impl ByteStepRate for FleetSpec {
    fn byte_steps_per_second(&self) -> f64 {
        match self {
            FleetSpec::Devices(f) => f.byte_steps_per_second(),
            FleetSpec::Rate(r) => *r,
        }
    }
}

impl FleetSpec {
    pub fn describe(&self) -> String {
        match self {
            FleetSpec::Devices(f) => f
                .iter()
                .map(|x| format!("{} x {}", x.unit_count(), x.device().name()))
                .collect::<Vec<_>>()
                .join(" + "),
            FleetSpec::Rate(r) => format!("{r:e} byte-steps/s"),
        }
    }
}

/// A validated scenario ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    BruteForce {
        key_bits: u32,
        bytes_per_key_bit: f64,
        fleet: FleetSpec,
        target_seconds: Option<f64>,
        annual_factor: f64,
    },
    Dictionary {
        model: DictionaryModel,
        fleet: Option<FleetSpec>,
    },
    Tf1 {
        model: Tf1Model,
        fleet: FleetSpec,
    },
    GameOtp {
        seed: u64,
        bias: f64,
        trials: u64,
        budget: f64,
        alpha: f64,
        per_step_information: Option<f64>,
    },
    DeskValidation {
        seed: u64,
        quick: bool,
    },
}

impl Scenario {
    /// One `[kind]` header followed by `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut kind = None;
        let mut entries: Vec<(String, String, usize)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if kind.is_some() {
                    return Err(error(Some(line_no), "only one [section] per scenario"));
                }
                kind = Some(
                    ScenarioKind::parse(header.trim())
                        .ok_or_else(|| error(Some(line_no), format!("unknown scenario kind [{header}]")))?,
                );
                continue;
            }
            let Some(k) = kind else {
                return Err(error(Some(line_no), "expected a [kind] header first"));
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| error(Some(line_no), "expected `key = value`"))?;
            let key = key.trim().to_string();
            if !k.keys().contains(&key.as_str()) {
                return Err(error(Some(line_no), format!("unknown key {key:?} for [{k}]")));
            }
            if entries.iter().any(|e| e.0 == key) {
                return Err(error(Some(line_no), format!("duplicate key {key:?}")));
            }
            entries.push((key, value.trim().to_string(), line_no));
        }
        let kind = kind.ok_or_else(|| error(None, "missing [kind] header"))?;
        Ok(Self { kind, entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entry(key).map(|e| e.1.as_str())
    }

    fn entry(&self, key: &str) -> Option<&(String, String, usize)> {
        self.entries.iter().find(|e| e.0 == key)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entry(key).map(|e| e.2)
    }

    fn required(&self, key: &str) -> Result<&str, ScenarioError> {
        self.get(key)
            .ok_or_else(|| error(None, format!("[{}] requires `{key}`", self.kind)))
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .replace('_', "")
                .parse::<T>()
                .map(Some)
                .map_err(|_| error(self.line(key), format!("`{key}` is not a valid number: {v:?}"))),
        }
    }

    fn in_range<T: PartialOrd + fmt::Display + Copy>(&self, key: &str, v: T, lo: T, hi: T) -> Result<T, ScenarioError> {
        if v < lo || v > hi {
            return Err(error(self.line(key), format!("`{key}` = {v} outside [{lo}, {hi}]")));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, v: f64) -> Result<f64, ScenarioError> {
        if !(v.is_finite() && v > 0.0) {
            return Err(error(self.line(key), format!("`{key}` must be positive and finite")));
        }
        Ok(v)
    }

    fn catalog(&self, base_dir: Option<&Path>) -> Result<Vec<DeviceSpec>, ScenarioError> {
        let choice = match self.get("catalog") {
            None | Some("default") => CatalogChoice::Default,
            Some("tianhe1") => CatalogChoice::Tianhe1,
            Some(path) => CatalogChoice::File(base_dir.map_or_else(|| PathBuf::from(path), |d| d.join(path))),
        };
        match choice {
            CatalogChoice::Default => Ok(default_catalog()),
            CatalogChoice::Tianhe1 => Ok(tianhe1_catalog()),
            CatalogChoice::File(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| error(self.line("catalog"), format!("cannot read {}: {e}", p.display())))?;
                load_catalog(&text).map_err(|e| error(self.line("catalog"), format!("{}: {e}", p.display())))
            }
        }
    }

    fn fleet(&self, base_dir: Option<&Path>) -> Result<Option<FleetSpec>, ScenarioError> {
        match (self.get("fleet"), self.number::<f64>("fleet_rate")?) {
            (Some(_), Some(_)) => Err(error(self.line("fleet_rate"), "give either `fleet` or `fleet_rate`, not both")),
            (None, Some(r)) => Ok(Some(FleetSpec::Rate(self.positive("fleet_rate", r)?))),
            (None, None) => Ok(None),
            (Some(text), None) => {
                let line = self.line("fleet");
                let catalog = self.catalog(base_dir)?;
                let mut fleets = Vec::new();
                for part in text.split('+') {
                    let part = part.trim();
                    let (count, name) = match part.split_once(" x ") {
                        Some((c, n)) => {
                            let c = c.trim().replace(['_', ','], "");
                            let units = c
                                .parse::<u64>()
                                .map_err(|_| error(line, format!("bad unit count {c:?}")))?;
                            (units, n.trim())
                        }
                        None => (1, part),
                    };
                    let device = find_device(&catalog, name).map_err(|e| error(line, e.to_string()))?;
                    fleets.push(Fleet::new(device.clone(), count).map_err(|e| error(line, e.to_string()))?);
                }
                Ok(Some(FleetSpec::Devices(fleets)))
            }
        }
    }

    fn required_fleet(&self, base_dir: Option<&Path>) -> Result<FleetSpec, ScenarioError> {
        self.fleet(base_dir)?
            .ok_or_else(|| error(None, format!("[{}] requires `fleet` or `fleet_rate`", self.kind)))
    }

    fn seed(&self) -> Result<u64, ScenarioError> {
        self.required("seed")?;
        Ok(self.number::<u64>("seed")?.expect("checked present"))
    }

    /// Checks every parameter and resolves device names. Relative catalog
    /// paths are taken from `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<ScenarioSpec, ScenarioError> {
        let req_u32 = |key: &str| -> Result<u32, ScenarioError> {
            self.required(key)?;
            Ok(self.number::<u32>(key)?.expect("checked present"))
        };
        match self.kind {
            ScenarioKind::BruteForce => {
                let key_bits = self.in_range("key_bits", req_u32("key_bits")?, 1, 256)?;
                let per_bit = match (self.get("cipher"), self.number::<f64>("bytes_per_key_bit")?) {
                    (_, Some(b)) => self.positive("bytes_per_key_bit", b)?,
                    (None | Some("des"), None) => crate::estimate::DES_BYTES_PER_KEY_BIT,
                    (Some("3des"), None) => crate::estimate::TRIPLE_DES_BYTES_PER_KEY_BIT,
                    (Some(c), None) => {
                        return Err(error(self.line("cipher"), format!("unknown cipher {c:?}; use des or 3des")))
                    }
                };
                let target_seconds = match self.get("target") {
                    None => None,
                    Some(t) => Some(self.positive(
                        "target",
                        parse_duration(t).ok_or_else(|| error(self.line("target"), format!("bad duration {t:?}")))?,
                    )?),
                };
                let annual_factor = self.number::<f64>("annual_factor")?.unwrap_or(ANNUAL_PROGRESS_FACTOR);
                if !(annual_factor.is_finite() && annual_factor > 1.0) {
                    return Err(error(self.line("annual_factor"), "`annual_factor` must exceed 1"));
                }
                Ok(ScenarioSpec::BruteForce {
                    key_bits,
                    bytes_per_key_bit: per_bit,
                    fleet: self.required_fleet(base_dir)?,
                    target_seconds,
                    annual_factor,
                })
            }
            ScenarioKind::Dictionary => {
                let key_bits = self.in_range("key_bits", req_u32("key_bits")?, 1, 256)?;
                let epsilon = req_u32("epsilon")?;
                let bad = |key: &str, e: crate::estimate::EstimateError| error(self.line(key), e.to_string());
                let mut model = DictionaryModel::new(key_bits, epsilon).map_err(|e| bad("epsilon", e))?;
                if let Some(b) = self.number::<u32>("plaintext_blocks")? {
                    model = model.with_plaintext_blocks(b).map_err(|e| bad("plaintext_blocks", e))?;
                }
                if let Some(s) = self.number::<u32>("steps_per_comparison")? {
                    model = model.with_steps_per_comparison(s).map_err(|e| bad("steps_per_comparison", e))?;
                }
                model = model.with_bound(match self.get("bound") {
                    None | Some("conservative") => ComparisonBound::Conservative,
                    Some("upper") => ComparisonBound::UpperBound,
                    Some(b) => {
                        return Err(error(self.line("bound"), format!("unknown bound {b:?}; use conservative or upper")))
                    }
                });
                Ok(ScenarioSpec::Dictionary {
                    model,
                    fleet: self.fleet(base_dir)?,
                })
            }
            ScenarioKind::Tf1 => {
                let w = self.in_range("word_bits", req_u32("word_bits")?, 1, 128)?;
                let bad = |key: &str, e: crate::estimate::EstimateError| error(self.line(key), e.to_string());
                let mut model = Tf1Model::new(w).map_err(|e| bad("word_bits", e))?;
                if let Some(o) = self.number::<u32>("ops_per_state_check")? {
                    model = model.with_ops_per_state_check(o).map_err(|e| bad("ops_per_state_check", e))?;
                }
                if let Some(r) = self.number::<f64>("scan_rate")? {
                    model = model.with_scan_rate(r).map_err(|e| bad("scan_rate", e))?;
                }
                Ok(ScenarioSpec::Tf1 {
                    model,
                    fleet: self.required_fleet(base_dir)?,
                })
            }
            ScenarioKind::GameOtp => {
                let seed = self.seed()?;
                self.required("bias")?;
                let bias = self.number::<f64>("bias")?.expect("checked present");
                let bias = self.in_range("bias", bias, 0.0, 1.0)?;
                self.required("trials")?;
                let trials = self.number::<u64>("trials")?.expect("checked present");
                let trials = self.in_range("trials", trials, 1, 10_000_000)?;
                let budget = match self.required("budget")? {
                    "unlimited" | "inf" => f64::INFINITY,
                    _ => {
                        let b = self.number::<f64>("budget")?.expect("checked present");
                        if !(b.is_finite() && b >= 0.0) {
                            return Err(error(self.line("budget"), "`budget` must be a non-negative number or `unlimited`"));
                        }
                        b
                    }
                };
                let alpha = self.number::<f64>("alpha")?.unwrap_or(0.01);
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(error(self.line("alpha"), "`alpha` must lie strictly between 0 and 1"));
                }
                let per_step_information = match self.number::<f64>("per_step_information")? {
                    Some(i) if !(i.is_finite() && i >= 0.0) => {
                        return Err(error(self.line("per_step_information"), "must be non-negative"))
                    }
                    other => other,
                };
                Ok(ScenarioSpec::GameOtp {
                    seed,
                    bias,
                    trials,
                    budget,
                    alpha,
                    per_step_information,
                })
            }
            ScenarioKind::DeskValidation => Ok(ScenarioSpec::DeskValidation {
                seed: self.seed()?,
                quick: match self.get("quick") {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(q) => return Err(error(self.line("quick"), format!("`quick` must be true or false, got {q:?}"))),
                },
            }),
        }
    }
}

/// Reads, parses and resolves a scenario file.
pub fn load_scenario(path: &Path) -> Result<ScenarioSpec, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| error(None, format!("cannot read {}: {e}", path.display())))?;
    Scenario::parse(&text)?.resolve(path.parent())
}
