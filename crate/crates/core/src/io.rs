//! File formats: system JSON, entropy-series CSV, rate CSV, and atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::certified::CertifiedValue;
use crate::error::{Error, Result};
use crate::orbit::EntropySeries;
use crate::rank_one::{PrimeSeq, RankOneSystem, Stage};
use crate::rates::RateReport;
use crate::scalar::{format_rational, format_real, parse_rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub n: usize,
    pub p: u64,
    /// Decimal string, since heights exceed the JSON number range.
    pub height: String,
    pub x: String,
    pub y: String,
    pub k: u64,
    pub j: u64,
    pub level_len: String,
}

impl From<&Stage> for StageRecord {
    fn from(s: &Stage) -> Self {
        Self {
            n: s.n,
            p: s.p,
            height: s.height.to_string(),
            x: format_rational(&s.x),
            y: format_rational(&s.y),
            k: s.k,
            j: s.j,
            level_len: format_rational(&s.level_len),
        }
    }
}

/// On-disk system: the primes and stage count define it; the stage records
/// are derived and checked on load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub primes: Vec<u64>,
    pub stages: usize,
    pub truncated: bool,
    pub stage_data: Vec<StageRecord>,
}

pub fn system_to_json(sys: &RankOneSystem) -> String {
    let file = SystemFile {
        primes: sys.primes().primes().to_vec(),
        stages: sys.num_stages(),
        truncated: sys.is_truncated(),
        stage_data: sys.stages().iter().map(StageRecord::from).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serialises") + "\n"
}

pub fn system_from_json(text: &str) -> Result<RankOneSystem> {
    let file: SystemFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("system JSON: {e}")))?;
    let sys = RankOneSystem::build(PrimeSeq::new(file.primes)?, file.stages)?;
    for (rec, st) in file.stage_data.iter().zip(sys.stages()) {
        let same = rec.n == st.n
            && rec.p == st.p
            && rec.height == st.height.to_string()
            && parse_rational(&rec.x)? == st.x
            && parse_rational(&rec.y)? == st.y
            && rec.k == st.k
            && rec.j == st.j
            && parse_rational(&rec.level_len)? == st.level_len;
        if !same {
            return Err(Error::Parse(format!("stage {} record disagrees with the construction", rec.n)));
        }
    }
    if file.stage_data.len() > sys.num_stages() {
        return Err(Error::Parse("more stage records than stages".into()));
    }
    Ok(sys)
}

pub const SERIES_HEADER: [&str; 5] = ["n", "H_lower", "H_upper", "method", "residual_upper"];

pub fn series_to_csv(series: &EntropySeries) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SERIES_HEADER).unwrap();
    for e in &series.entries {
        w.write_record([
            e.n.to_string(),
            format_real(e.h.lower),
            format_real(e.h.upper),
            series.meta.method.as_str().to_string(),
            format_real(e.residual_upper),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn parse_real(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Parse(format!("bad real {s:?}"))),
    }
}

/// `(n, H)` pairs from a series CSV.
pub fn series_points_from_csv(text: &str) -> Result<Vec<(usize, CertifiedValue)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(SERIES_HEADER) {
        return Err(Error::Parse(format!("unexpected series header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let n = rec[0].parse().map_err(|_| Error::Parse(format!("bad index {:?}", &rec[0])))?;
        out.push((n, CertifiedValue::new(parse_real(&rec[1])?, parse_real(&rec[2])?)));
    }
    Ok(out)
}

pub fn rate_to_csv(report: &RateReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "ratio_lower", "ratio_upper", "threshold_index"]).unwrap();
    for row in &report.rows {
        w.write_record([
            row.n.to_string(),
            format_real(row.ratio.lower),
            format_real(row.ratio.upper),
            row.threshold_index.map(|k| k.to_string()).unwrap_or_default(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises") + "\n"
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run leaves no partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
