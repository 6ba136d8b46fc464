//! CSV rows shared by `deblur` and `sweep`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

pub const HEADER: [&str; 14] = [
    "image_id",
    "kernel_spec",
    "noise_level",
    "seed",
    "method",
    "p",
    "mu",
    "K",
    "iterations",
    "psnr_db",
    "ssim",
    "re",
    "wall_time_s",
    "error",
];

/// Outcome of one restoration. Metric fields are `None` when the solve failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub image_id: String,
    pub kernel_spec: String,
    pub noise_level: Option<f64>,
    pub seed: Option<u64>,
    pub method: &'static str,
    pub p: f64,
    pub mu: f64,
    pub group_size: usize,
    pub outcome: Result<Outcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub iterations: usize,
    pub psnr_db: f64,
    pub ssim: f64,
    pub re: f64,
    pub wall_time_s: Option<f64>,
}

/// Shortest round-trip decimal; infinities print as `inf`.
fn num(x: f64) -> String {
    x.to_string()
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl RunRecord {
    pub fn fields(&self) -> Vec<String> {
        let mut row = vec![
            self.image_id.clone(),
            self.kernel_spec.clone(),
            opt(self.noise_level.map(num)),
            opt(self.seed),
            self.method.to_string(),
            num(self.p),
            num(self.mu),
            self.group_size.to_string(),
        ];
        match &self.outcome {
            Ok(o) => row.extend([
                o.iterations.to_string(),
                num(o.psnr_db),
                num(o.ssim),
                num(o.re),
                opt(o.wall_time_s.map(num)),
                String::new(),
            ]),
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.push(e.clone());
            }
        }
        row
    }
}

pub fn write_all(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Appends one row, writing the header first if the file is new or empty.
pub fn append(path: &Path, record: &RunRecord) -> Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    if fresh {
        w.write_record(HEADER)?;
    }
    w.write_record(record.fields())?;
    file.write_all(&w.into_inner()?)?;
    Ok(())
}
