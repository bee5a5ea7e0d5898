//! Flat key=value config file support.
//!
//! Recognized keys: case, estimators, paths, outer, inner, steps_per_year,
//! bump, seed, s0, quad, deriv_form, format, out, mortality; product keys
//! premium, withdrawal_rate, guarantee_fee, fund_fee, ratchet_years,
//! ratchet_cap, term_years, lapse_rate, entry_age; explicit model keys
//! kappa_v, theta_v, sigma_v, v0, kappa_r, theta_r, sigma_r, r0, rho_sv,
//! rho_sr, rho_vr (all eleven required together, mutually exclusive with
//! `case`). Lines starting with `#` and blank lines are ignored.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use vagreeks_engine::error::EngineError;
use vagreeks_engine::model::ModelParams;
use vagreeks_engine::product::{MortalityTable, ProductSpec};

pub struct KeyValueFile {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
    dir: PathBuf,
}

impl KeyValueFile {
    pub fn empty() -> Self {
        Self {
            values: BTreeMap::new(),
            used: RefCell::new(BTreeSet::new()),
            dir: PathBuf::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let text = std::fs::read_to_string(path)?;
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                EngineError::Config(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self {
            values,
            used: RefCell::new(BTreeSet::new()),
            dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).cloned()
    }

    fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, EngineError> {
        match self.get_string(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| {
                EngineError::Config(format!("bad value '{v}' for key '{key}'"))
            }),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, EngineError> {
        self.get_parsed(key)
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, EngineError> {
        self.get_parsed(key)
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, EngineError> {
        self.get_parsed(key)
    }

    pub fn get_u32(&self, key: &str) -> Result<Option<u32>, EngineError> {
        self.get_parsed(key)
    }

    /// Fails on any key that was never consulted, catching typos like
    /// `step_per_year`.
    pub fn check_unknown_keys(&self) -> Result<(), EngineError> {
        let used = self.used.borrow();
        for key in self.values.keys() {
            if !used.contains(key) {
                return Err(EngineError::Config(format!("unknown config key '{key}'")));
            }
        }
        Ok(())
    }
}

/// Explicit model parameters: None when no model key is present, an error when
/// only some of the eleven are given.
pub fn explicit_params(file: &KeyValueFile) -> Result<Option<ModelParams>, EngineError> {
    const KEYS: [&str; 11] = [
        "kappa_v", "theta_v", "sigma_v", "v0", "kappa_r", "theta_r", "sigma_r", "r0", "rho_sv",
        "rho_sr", "rho_vr",
    ];
    let mut vals = [0.0f64; 11];
    let mut present = 0;
    for (i, key) in KEYS.iter().enumerate() {
        if let Some(v) = file.get_f64(key)? {
            vals[i] = v;
            present += 1;
        }
    }
    match present {
        0 => Ok(None),
        11 => Ok(Some(ModelParams {
            kappa_v: vals[0],
            theta_v: vals[1],
            sigma_v: vals[2],
            v0: vals[3],
            kappa_r: vals[4],
            theta_r: vals[5],
            sigma_r: vals[6],
            r0: vals[7],
            rho_sv: vals[8],
            rho_sr: vals[9],
            rho_vr: vals[10],
        })),
        _ => Err(EngineError::Config(
            "explicit model parameters require all eleven keys".into(),
        )),
    }
}

/// Product spec from config keys, starting from the defaults. A `mortality`
/// key points at a table file, resolved relative to the config file.
pub fn product_spec(file: &KeyValueFile) -> Result<ProductSpec, EngineError> {
    let mut p = ProductSpec::default();
    if let Some(v) = file.get_f64("premium")? {
        p.premium = v;
    }
    if let Some(v) = file.get_f64("withdrawal_rate")? {
        p.withdrawal_rate = v;
    }
    if let Some(v) = file.get_f64("guarantee_fee")? {
        p.guarantee_fee = v;
    }
    if let Some(v) = file.get_f64("fund_fee")? {
        p.fund_fee = v;
    }
    if let Some(v) = file.get_usize("ratchet_years")? {
        p.ratchet_years = v;
    }
    if let Some(v) = file.get_f64("ratchet_cap")? {
        p.ratchet_cap = v;
    }
    if let Some(v) = file.get_usize("term_years")? {
        p.term_years = v;
    }
    if let Some(v) = file.get_f64("lapse_rate")? {
        p.lapse_rate = v;
    }
    if let Some(v) = file.get_u32("entry_age")? {
        p.entry_age = v;
    }
    if let Some(path) = file.get_string("mortality") {
        let resolved = file.dir.join(&path);
        p.mortality = MortalityTable::from_file(&resolved)?;
    }
    Ok(p)
}
