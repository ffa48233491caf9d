//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored; sections are expressed with
//! dotted keys. A synthetic-market config looks like:
//!
//! ```text
//! format_version = 1
//! n_periods = 10000
//! seed = 7
//! idio_vol = 0
//! n_bonds = 20
//! start = 1990-01-31
//! factors = shift, twist, banking:A
//! vol.shift = 24
//! vol.twist = 8
//! vol.banking:A = 14
//! corr.shift.banking:A = -0.33
//! ```
//!
//! Correlations not listed are zero. Unknown keys are errors.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::covariance::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::sector_model::{SynthConfig, DEFAULT_BONDS_PER_SECTOR};

use super::{check_version, parse_iso_date, read_file};

#[derive(Debug)]
pub struct KeyValueFile {
    path: PathBuf,
    entries: BTreeMap<String, (String, u64)>,
    used: RefCell<BTreeSet<String>>,
}

impl KeyValueFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i as u64 + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected key = value, found '{content}'"),
            })?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: "empty key".into(),
                });
            }
            if entries.insert(k.clone(), (v, line)).is_some() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("duplicate key '{k}'"),
                });
            }
        }
        let file = Self {
            path: path.to_path_buf(),
            entries,
            used: RefCell::new(BTreeSet::new()),
        };
        if let Some((v, line)) = file.entries.get("format_version") {
            check_version(v, path, *line)?;
            file.mark("format_version");
        }
        Ok(file)
    }

    fn mark(&self, key: &str) {
        self.used.borrow_mut().insert(key.to_string());
    }

    fn error(&self, line: u64, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    pub fn raw(&self, key: &str) -> Option<(&str, u64)> {
        self.entries.get(key).map(|(v, l)| {
            self.mark(key);
            (v.as_str(), *l)
        })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| self.error(line, format!("invalid value '{v}' for '{key}'"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::InvalidConfig(format!("{}: missing key '{key}'", self.path.display())))
    }

    /// Keys starting with `prefix.`, with the prefix removed.
    pub fn section(&self, prefix: &str) -> Vec<(String, String, u64)> {
        let p = format!("{prefix}.");
        self.entries
            .iter()
            .filter_map(|(k, (v, l))| {
                k.strip_prefix(&p).map(|rest| {
                    self.mark(k);
                    (rest.to_string(), v.clone(), *l)
                })
            })
            .collect()
    }

    /// Errors on the first key no getter has asked for.
    pub fn reject_unused(&self) -> Result<()> {
        let used = self.used.borrow();
        match self.entries.iter().find(|(k, _)| !used.contains(*k)) {
            Some((k, (_, line))) => Err(self.error(*line, format!("unknown key '{k}'"))),
            None => Ok(()),
        }
    }
}

pub fn load_synth_config(path: &Path) -> Result<SynthConfig> {
    parse_synth_config(&read_file(path)?, path)
}

pub fn parse_synth_config(text: &str, path: &Path) -> Result<SynthConfig> {
    let kv = KeyValueFile::parse(text, path)?;
    let (factor_list, list_line) = kv
        .raw("factors")
        .ok_or_else(|| Error::InvalidConfig(format!("{}: missing key 'factors'", path.display())))?;
    let labels: Vec<String> = factor_list
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if labels.is_empty() {
        return Err(kv.error(list_line, "no factors listed".into()));
    }
    let index = |name: &str, line: u64| {
        labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| kv.error(line, format!("'{name}' is not a listed factor")))
    };
    let number = |v: &str, line: u64| {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| kv.error(line, format!("'{v}' is not a finite number")))
    };

    let n = labels.len();
    let mut vols = vec![None; n];
    for (name, v, line) in kv.section("vol") {
        vols[index(&name, line)?] = Some(number(&v, line)?);
    }
    let vols = vols
        .into_iter()
        .zip(&labels)
        .map(|(v, l)| v.ok_or_else(|| Error::InvalidConfig(format!("missing key 'vol.{l}'"))))
        .collect::<Result<Vec<_>>>()?;

    let mut rho = DMatrix::identity(n, n);
    let mut seen = BTreeSet::new();
    for (pair, v, line) in kv.section("corr") {
        let (a, b) = pair
            .split_once('.')
            .ok_or_else(|| kv.error(line, format!("expected corr.<factor>.<factor>, found 'corr.{pair}'")))?;
        let (i, j) = (index(a, line)?, index(b, line)?);
        if i == j {
            return Err(kv.error(line, "self-correlation is fixed at 1".into()));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(kv.error(line, format!("correlation between '{a}' and '{b}' given twice")));
        }
        let r = number(&v, line)?;
        rho[(i, j)] = r;
        rho[(j, i)] = r;
    }
    let target = CorrelationMatrix::new(labels, rho, vols).map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut cfg = SynthConfig::new(target, kv.require("n_periods")?, kv.require("seed")?);
    if let Some(v) = kv.get::<f64>("idio_vol")? {
        cfg.idio_vol = v;
    }
    cfg.n_bonds = kv.get("n_bonds")?.unwrap_or(DEFAULT_BONDS_PER_SECTOR);
    if let Some((v, line)) = kv.raw("start") {
        cfg.start = parse_iso_date(v).ok_or_else(|| kv.error(line, format!("'{v}' is not a YYYY-MM-DD date")))?;
    }
    kv.reject_unused()?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# anchors
format_version = 1
n_periods = 120
seed = 7
idio_vol = 2.5
factors = shift, twist, banking:A
vol.shift = 24
vol.twist = 8
vol.banking:A = 14
corr.shift.banking:A = -0.33
";

    fn p() -> &'static Path {
        Path::new("synth.cfg")
    }

    #[test]
    fn parses_sample() {
        let cfg = parse_synth_config(SAMPLE, p()).unwrap();
        assert_eq!(cfg.n_periods, 120);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.idio_vol, 2.5);
        assert_eq!(cfg.n_bonds, 20);
        assert_eq!(cfg.target.get("banking:A", "shift"), Some(-0.33));
        assert_eq!(cfg.target.get("twist", "shift"), Some(0.0));
        assert_eq!(cfg.target.vol("twist"), Some(8.0));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let unknown = format!("{SAMPLE}colour = blue\n");
        assert!(matches!(
            parse_synth_config(&unknown, p()),
            Err(Error::Parse { line: 11, .. })
        ));
        let dup = format!("{SAMPLE}seed = 8\n");
        assert!(matches!(
            parse_synth_config(&dup, p()),
            Err(Error::Parse { line: 11, .. })
        ));
    }

    #[test]
    fn rejects_bad_values() {
        let missing_vol = SAMPLE.replace("vol.twist = 8\n", "");
        assert!(matches!(
            parse_synth_config(&missing_vol, p()),
            Err(Error::InvalidConfig(_))
        ));
        let bad_corr = SAMPLE.replace("-0.33", "-1.5");
        assert!(matches!(
            parse_synth_config(&bad_corr, p()),
            Err(Error::InvalidConfig(_))
        ));
        let unlisted = format!("{SAMPLE}corr.shift.utilities:A = 0.1\n");
        assert!(parse_synth_config(&unlisted, p()).is_err());
        let version = SAMPLE.replace("format_version = 1", "format_version = 2");
        assert!(matches!(
            parse_synth_config(&version, p()),
            Err(Error::Parse { line: 2, .. })
        ));
        let no_eq = format!("{SAMPLE}garbage\n");
        assert!(matches!(
            parse_synth_config(&no_eq, p()),
            Err(Error::Parse { line: 11, .. })
        ));
    }

    #[test]
    fn non_psd_target_reports_eigenvalue() {
        let text = "n_periods = 10\nseed = 1\nfactors = shift, twist, banking:A\n\
            vol.shift = 1\nvol.twist = 1\nvol.banking:A = 1\n\
            corr.shift.twist = 0.9\ncorr.twist.banking:A = 0.9\ncorr.shift.banking:A = -0.9\n";
        match parse_synth_config(text, p()) {
            Err(Error::InvalidConfig(m)) => assert!(m.contains("eigenvalue"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
