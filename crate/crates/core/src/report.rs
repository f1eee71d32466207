//! Report files of a campaign run.
//!
//! `report.json` is always written and is what `compare` reads back. The CSV
//! format adds `per_repeat.csv` and `summary.csv`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::campaign::{CampaignResult, LossRow, RepeatResult, SummaryRow};
use crate::config::{CampaignConfig, OutputFormat};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: CampaignConfig,
    pub seeds: Vec<u64>,
    pub repeats: Vec<RepeatResult>,
    pub summary: Vec<SummaryRow>,
}

impl Report {
    pub fn new(config: &CampaignConfig, result: CampaignResult) -> Self {
        Self {
            config: config.clone(),
            seeds: result.repeats.iter().map(|r| r.seed).collect(),
            repeats: result.repeats,
            summary: result.summary,
        }
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("report.json");
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn per_repeat_csv(repeats: &[RepeatResult]) -> String {
    let mut out = String::from("method,repeat,energy_J,monetary_AC,resp_excess_s,sec_dissat,joint\n");
    for r in repeats {
        for m in &r.reports {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                m.method.name(),
                r.repeat,
                m.energy,
                m.monetary,
                m.resp_excess,
                m.sec_dissat,
                m.joint
            );
        }
    }
    out
}

pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from("method,energy_J,monetary_AC,resp_excess_s,sec_dissat,joint\n");
    for s in summary {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.method.name(),
            s.energy,
            s.monetary,
            s.resp_excess,
            s.sec_dissat,
            s.joint
        );
    }
    out
}

pub fn loss_csv(first: &str, second: &str, rows: &[LossRow]) -> String {
    let mut out = String::from("comparison");
    for r in rows {
        let _ = write!(out, ",{}", r.metric);
    }
    let _ = write!(out, "\n{second}_vs_{first}");
    for r in rows {
        match r.loss {
            Some(l) => {
                let _ = write!(out, ",{}", l * 100.0);
            }
            None => out.push_str(",undefined"),
        }
    }
    out.push('\n');
    out
}

/// Writes all files of a set at once: each goes to a temporary name first
/// and is renamed only after every write succeeded.
pub fn write_files(dir: &Path, files: &[(&str, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let staged = files
        .iter()
        .map(|(name, body)| {
            let tmp = dir.join(format!(".{name}.partial"));
            fs::write(&tmp, body)?;
            Ok((tmp, dir.join(name)))
        })
        .collect::<Result<Vec<_>>>();
    let staged = match staged {
        Ok(s) => s,
        Err(e) => {
            for (name, _) in files {
                let _ = fs::remove_file(dir.join(format!(".{name}.partial")));
            }
            return Err(e);
        }
    };
    for (tmp, dst) in staged {
        fs::rename(tmp, dst)?;
    }
    Ok(())
}

/// The files of one run directory.
pub fn run_files(report: &Report, format: OutputFormat) -> Result<Vec<(&'static str, String)>> {
    let mut files = vec![("report.json", serde_json::to_string_pretty(report)? + "\n")];
    if format == OutputFormat::Csv {
        files.push(("per_repeat.csv", per_repeat_csv(&report.repeats)));
        files.push(("summary.csv", summary_csv(&report.summary)));
    }
    Ok(files)
}
