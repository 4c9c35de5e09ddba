use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Equilibrium,
    Orthopoly,
    Isomonodromy,
    Hankelfact,
    Linsys,
    Elliptic,
    All,
}

impl Suite {
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Equilibrium,
                Suite::Orthopoly,
                Suite::Isomonodromy,
                Suite::Hankelfact,
                Suite::Linsys,
                Suite::Elliptic,
            ],
            s => vec![s],
        }
    }
}

/// Keys accepted in the config file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub suite: Option<Suite>,
    pub json: Option<PathBuf>,
    pub tol_scale: Option<f64>,
    pub quad_nodes: Option<usize>,
    pub trunc: Option<usize>,
    pub terms: Option<usize>,
    pub no_timings: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub json: Option<PathBuf>,
    pub tol_scale: f64,
    pub quad_nodes: Option<usize>,
    pub trunc: Option<usize>,
    pub terms: Option<usize>,
    pub timings: bool,
}

/// Values given on the command line; they override the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub suite: Option<Suite>,
    pub json: Option<PathBuf>,
    pub tol_scale: Option<f64>,
    pub quad_nodes: Option<usize>,
    pub trunc: Option<usize>,
    pub terms: Option<usize>,
    pub no_timings: bool,
}

impl SuiteConfig {
    pub fn merge(file: FileConfig, flags: Overrides) -> Result<Self> {
        let Some(suite) = flags.suite.or(file.suite) else {
            bail!("no suite selected (pass --suite or set `suite` in the config file)");
        };
        let tol_scale = flags.tol_scale.or(file.tol_scale).unwrap_or(1.0);
        if !(tol_scale > 0.0 && tol_scale.is_finite()) {
            bail!("tolerance scale must be positive, got {tol_scale}");
        }
        let quad_nodes = flags.quad_nodes.or(file.quad_nodes);
        if quad_nodes == Some(0) {
            bail!("quadrature node count must be positive");
        }
        let terms = flags.terms.or(file.terms);
        if terms == Some(0) {
            bail!("symbol term count must be positive");
        }
        Ok(Self {
            suite,
            json: flags.json.or(file.json),
            tol_scale,
            quad_nodes,
            trunc: flags.trunc.or(file.trunc),
            terms,
            timings: !(flags.no_timings || file.no_timings.unwrap_or(false)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("suite = \"linsys\"\ntol_scale = 3.0\ntrunc = 30\n").unwrap();
        let flags = Overrides { tol_scale: Some(10.0), ..Default::default() };
        let c = SuiteConfig::merge(file, flags).unwrap();
        assert_eq!(c.suite, Suite::Linsys);
        assert_eq!(c.tol_scale, 10.0);
        assert_eq!(c.trunc, Some(30));
        assert!(c.timings);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(SuiteConfig::merge(FileConfig::default(), Overrides::default()).is_err());
        let flags = Overrides { suite: Some(Suite::All), tol_scale: Some(0.0), ..Default::default() };
        assert!(SuiteConfig::merge(FileConfig::default(), flags).is_err());
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        assert!(toml::from_str::<FileConfig>("suite = \"bogus\"").is_err());
        assert_eq!(Suite::All.expand().len(), 6);
    }
}
