use std::path::PathBuf;
use std::str::FromStr;

use alphaforge_core::IndustryLevel;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub days: usize,
    pub assets: usize,
    pub groups: usize,
}

impl FromStr for SyntheticSpec {
    type Err = String;

    /// `seed=S,days=D,assets=N[,groups=G]`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (mut seed, mut days, mut assets, mut groups) = (None, None, None, 10usize);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let number = |v: &str| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| format!("`{key}` needs a non-negative integer, got `{v}`"))
            };
            match key.trim() {
                "seed" => seed = Some(number(value)?),
                "days" => days = Some(number(value)? as usize),
                "assets" => assets = Some(number(value)? as usize),
                "groups" => groups = number(value)? as usize,
                other => return Err(format!("unknown synthetic parameter `{other}`")),
            }
        }
        Ok(Self {
            seed: seed.ok_or("missing `seed`")?,
            days: days.ok_or("missing `days`")?,
            assets: assets.ok_or("missing `assets`")?,
            groups,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphaSelection {
    All,
    Ids(Vec<u32>),
    File(PathBuf),
}

impl AlphaSelection {
    /// `all`, a comma-separated id list, or a path to an alpha source file.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(AlphaSelection::All);
        }
        let looks_numeric = s
            .chars()
            .all(|c| c.is_ascii_digit() || c == ',' || c.is_whitespace());
        if !looks_numeric {
            return Ok(AlphaSelection::File(PathBuf::from(s)));
        }
        let mut ids = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let id: u32 = part
                .parse()
                .map_err(|_| CliError::Validation(format!("bad alpha id `{part}`")))?;
            if !(1..=101).contains(&id) {
                return Err(CliError::Validation(format!(
                    "alpha id {id} is outside 1..101"
                )));
            }
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        if ids.is_empty() {
            return Err(CliError::Validation("no alpha ids given".into()));
        }
        ids.sort_unstable();
        Ok(AlphaSelection::Ids(ids))
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub data: DataSource,
    pub alphas: AlphaSelection,
    pub book_size: f64,
    pub out_dir: PathBuf,
    pub emit_values: bool,
    pub industry_level: Option<IndustryLevel>,
}

impl RunManifest {
    pub fn describe(&self) -> String {
        let data = match &self.data {
            DataSource::Csv(p) => format!("csv {}", p.display()),
            DataSource::Synthetic(s) => format!(
                "synthetic seed={} days={} assets={} groups={}",
                s.seed, s.days, s.assets, s.groups
            ),
        };
        let alphas = match &self.alphas {
            AlphaSelection::All => "all".to_string(),
            AlphaSelection::Ids(ids) => ids
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
            AlphaSelection::File(p) => format!("file {}", p.display()),
        };
        let level = self
            .industry_level
            .map_or_else(|| "as written".to_string(), |l| l.to_string());
        format!(
            "data: {data}\nalphas: {alphas}\nbook_size: {}\nemit_values: {}\nindustry_level: {level}\n",
            self.book_size, self.emit_values
        )
    }
}
