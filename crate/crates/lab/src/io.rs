//! Report files: one JSON document per run plus CSV plot data for profiles.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use logconcave_core::{num, CheckReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{LabError, Result};

#[derive(Serialize)]
struct Document<'a> {
    command: &'a str,
    config: RunConfig,
    pass: bool,
    reports: &'a [CheckReport],
}

/// A named text file produced next to the reports.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

pub fn report_json(config: &RunConfig, reports: &[CheckReport], pass: bool) -> Result<String> {
    let doc = Document {
        command: config.command.name(),
        config: config.recorded(),
        pass,
        reports,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// `t,profile,second_difference`; the end points have no second difference.
pub fn profile_csv(report: &CheckReport) -> String {
    let d2 = num::second_differences(&report.profile);
    let mut out = String::from("t,profile,second_difference\n");
    for (i, (t, p)) in report.grid.iter().zip(&report.profile).enumerate() {
        let d = if i == 0 || i + 1 == report.profile.len() {
            String::new()
        } else {
            format!("{:e}", d2[i - 1])
        };
        let _ = writeln!(out, "{t:e},{p:e},{d}");
    }
    out
}

/// File-system safe stem for the `index`-th report.
fn stem(index: usize, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{index:03}_{clean}")
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|e| LabError::io(&path, e))?;
    Ok(path)
}

/// Writes `report.json`, one CSV per profile report and the artifacts, in
/// this order. Returns the written paths.
pub fn write_outputs(dir: &Path, config: &RunConfig, reports: &[CheckReport], pass: bool, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut written = vec![write(dir.join("report.json"), &report_json(config, reports, pass)?)?];
    for (i, r) in reports.iter().enumerate() {
        if !r.profile.is_empty() {
            written.push(write(dir.join(format!("{}.csv", stem(i, &r.name))), &profile_csv(r))?);
        }
    }
    for a in artifacts {
        written.push(write(dir.join(&a.name), &a.contents)?);
    }
    Ok(written)
}
