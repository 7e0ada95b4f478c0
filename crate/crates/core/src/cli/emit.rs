//! Writing reports and CSV tables.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::report::Report;
use super::run::{RunOutput, Tables};
use crate::error::{Error, Result};

pub const KERNEL_HEADER: [&str; 8] = ["z_re", "z_im", "λ_re", "λ_im", "x", "value_re", "value_im", "tail"];
pub const POWER_NORM_HEADER: [&str; 6] = ["family", "axis", "k", "norm", "argmax_x", "at_edge"];
pub const DEFECT_HEADER: [&str; 5] = ["mode", "order", "x", "value", "relative"];

pub fn report_json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::InvalidArgument(format!("report serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_report(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_kernel_csv(tables: &Tables, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(KERNEL_HEADER)?;
    for r in &tables.kernel {
        out.write_record([r.z[0], r.z[1], r.lambda[0], r.lambda[1], r.x, r.value[0], r.value[1], r.tail].map(num))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_power_norm_csv(tables: &Tables, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(POWER_NORM_HEADER)?;
    for r in &tables.power_norms {
        out.write_record([r.family.clone(), r.axis.to_string(), r.k.to_string(), num(r.norm), num(r.argmax_x), r.at_edge.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_defect_csv(tables: &Tables, w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(DEFECT_HEADER)?;
    for r in &tables.defects {
        out.write_record([r.mode.clone(), r.order.clone(), num(r.x), num(r.value), num(r.relative)])?;
    }
    out.flush()?;
    Ok(())
}

/// JSON report to `path`, or to stdout when `path` is `None`.
pub fn emit_json(report: &Report, path: Option<&Path>) -> Result<()> {
    let text = report_json(report)?;
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `report.json` plus `kernel_<i>.csv`, `power_norms_<i>.csv` and
/// `defects_<i>.csv` per tuple in the directory `dir`.
pub fn emit_csv(output: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![dir.join("report.json")];
    emit_json(&output.report, Some(&written[0]))?;
    for (i, t) in output.tables.iter().enumerate() {
        let files: [(&str, fn(&Tables, fs::File) -> Result<()>); 3] = [
            ("kernel", |t, f| write_kernel_csv(t, f)),
            ("power_norms", |t, f| write_power_norm_csv(t, f)),
            ("defects", |t, f| write_defect_csv(t, f)),
        ];
        for (stem, write) in files {
            let path = dir.join(format!("{stem}_{i}.csv"));
            write(t, fs::File::create(&path)?)?;
            written.push(path);
        }
    }
    Ok(written)
}
