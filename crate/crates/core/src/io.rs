//! Plain-text file formats.
//!
//! Q-curve files start with `key=value` header lines and a `# i Q_i` marker,
//! followed by one `i Q_i` pair per line for `i = 0..=N`. Values are written
//! in shortest round-trip form, so the integer counts behind each `Q_i` are
//! recovered exactly on reading. Statistics files are flat `key=value` text
//! and carry the exact integer sums next to the derived means.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dynamics::ModelParams;
use crate::ensemble::{QCurve, StatsAccumulator};
use crate::error::{Error, Result};

const QCURVE_MAGIC: &str = "# volperc q-curve";
const STATS_MAGIC: &str = "# volperc final-state statistics";
const DATA_MARKER: &str = "# i Q_i";

pub fn qcurve_to_string(q: &QCurve) -> String {
    let mut out = String::new();
    writeln!(out, "{QCURVE_MAGIC}").unwrap();
    writeln!(out, "L={}", q.side).unwrap();
    writeln!(out, "r={}", q.r).unwrap();
    writeln!(out, "mode={}", q.mode).unwrap();
    writeln!(out, "runs={}", q.runs()).unwrap();
    writeln!(out, "seed={}", q.seed).unwrap();
    writeln!(out, "run_start={}", q.run_start).unwrap();
    writeln!(out, "sites={}", q.sites()).unwrap();
    writeln!(out, "percolating_runs={}", q.percolating_runs()).unwrap();
    writeln!(out, "{DATA_MARKER}").unwrap();
    for (i, v) in q.values().into_iter().enumerate() {
        writeln!(out, "{i} {v}").unwrap();
    }
    out
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

struct Header<'a> {
    path: &'a Path,
    map: BTreeMap<String, (usize, String)>,
}

impl Header<'_> {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (line, raw) = self
            .map
            .get(key)
            .ok_or_else(|| parse_err(self.path, 0, format!("missing header key `{key}`")))?;
        raw.parse()
            .map_err(|_| parse_err(self.path, *line, format!("bad value `{raw}` for `{key}`")))
    }

    fn params(&self) -> Result<ModelParams> {
        let side: usize = self.get("L")?;
        if !(2..=crate::lattice::MAX_SIDE).contains(&side) {
            return Err(parse_err(self.path, 0, format!("L = {side} out of range")));
        }
        Ok(ModelParams { side, r: self.get("r")?, mode: self.get("mode")?, seed: self.get("seed")? })
    }
}

fn split_header<'a>(path: &'a Path, text: &'a str, magic: &str) -> Result<(Header<'a>, Vec<(usize, &'a str)>)> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    match lines.next() {
        Some((_, first)) if first.trim() == magic => {}
        _ => return Err(parse_err(path, 1, format!("expected `{magic}`"))),
    }
    let mut map = BTreeMap::new();
    let mut rest = Vec::new();
    let mut in_header = true;
    for (no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if in_header {
            if line == DATA_MARKER {
                in_header = false;
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(path, no, format!("expected key=value, got `{line}`")))?;
            map.insert(k.trim().to_string(), (no, v.trim().to_string()));
        } else {
            rest.push((no, line));
        }
    }
    Ok((Header { path, map }, rest))
}

pub fn parse_qcurve(path: &Path, text: &str) -> Result<QCurve> {
    let (header, data) = split_header(path, text, QCURVE_MAGIC)?;
    let params = header.params()?;
    let runs: u64 = header.get("runs")?;
    let run_start: u64 = header.get("run_start")?;
    if runs == 0 {
        return Err(parse_err(path, 0, "runs must be positive"));
    }
    let n = params.side * params.side;
    if data.len() != n + 1 {
        return Err(parse_err(path, 0, format!("expected {} data lines, found {}", n + 1, data.len())));
    }
    let mut cumulative = Vec::with_capacity(n + 1);
    for (expect_i, (no, line)) in data.into_iter().enumerate() {
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, no, "bad index"))?;
        let q: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, no, "bad Q value"))?;
        if i != expect_i {
            return Err(parse_err(path, no, format!("expected index {expect_i}, found {i}")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(parse_err(path, no, format!("Q_{i} = {q} outside [0, 1]")));
        }
        cumulative.push((q * runs as f64).round() as u64);
    }
    QCurve::from_cumulative(&params, run_start, runs, &cumulative).map_err(|e| parse_err(path, 0, e.to_string()))
}

pub fn write_qcurve(path: &Path, q: &QCurve) -> Result<()> {
    fs::write(path, qcurve_to_string(q)).map_err(|e| Error::io(path, e))
}

pub fn read_qcurve(path: &Path) -> Result<QCurve> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qcurve(path, &text)
}

/// Final-state statistics of one `(L, r, mode)` job.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsFile {
    pub params: ModelParams,
    pub run_start: u64,
    pub stats: StatsAccumulator,
}

pub fn stats_to_string(s: &StatsFile) -> String {
    let a = &s.stats;
    let (rho, m, d) = (a.rho(), a.largest_fraction(), a.distinct_volumes());
    let mut out = String::new();
    writeln!(out, "{STATS_MAGIC}").unwrap();
    writeln!(out, "L={}", s.params.side).unwrap();
    writeln!(out, "r={}", s.params.r).unwrap();
    writeln!(out, "mode={}", s.params.mode).unwrap();
    writeln!(out, "runs={}", a.runs).unwrap();
    writeln!(out, "seed={}", s.params.seed).unwrap();
    writeln!(out, "run_start={}", s.run_start).unwrap();
    writeln!(out, "rho_mean={}", rho.mean).unwrap();
    writeln!(out, "rho_std={}", rho.std).unwrap();
    writeln!(out, "largest_fraction_mean={}", m.mean).unwrap();
    writeln!(out, "largest_fraction_std={}", m.std).unwrap();
    writeln!(out, "distinct_volumes_mean={}", d.mean).unwrap();
    writeln!(out, "distinct_volumes_std={}", d.std).unwrap();
    writeln!(out, "wrap_fraction={}", a.wrap_fraction()).unwrap();
    writeln!(out, "# exact sums").unwrap();
    writeln!(out, "sites={}", a.sites).unwrap();
    writeln!(out, "open_sum={}", a.open_sum).unwrap();
    writeln!(out, "open_sq={}", a.open_sq).unwrap();
    writeln!(out, "largest_sum={}", a.largest_sum).unwrap();
    writeln!(out, "largest_sq={}", a.largest_sq).unwrap();
    writeln!(out, "distinct_sum={}", a.distinct_sum).unwrap();
    writeln!(out, "distinct_sq={}", a.distinct_sq).unwrap();
    writeln!(out, "wrapped_runs={}", a.wrapped_runs).unwrap();
    out
}

pub fn parse_stats(path: &Path, text: &str) -> Result<StatsFile> {
    let (h, data) = split_header(path, text, STATS_MAGIC)?;
    if let Some((no, _)) = data.first() {
        return Err(parse_err(path, *no, "unexpected data section"));
    }
    let stats = StatsAccumulator {
        sites: h.get("sites")?,
        runs: h.get("runs")?,
        open_sum: h.get("open_sum")?,
        open_sq: h.get("open_sq")?,
        largest_sum: h.get("largest_sum")?,
        largest_sq: h.get("largest_sq")?,
        distinct_sum: h.get("distinct_sum")?,
        distinct_sq: h.get("distinct_sq")?,
        wrapped_runs: h.get("wrapped_runs")?,
    };
    Ok(StatsFile { params: h.params()?, run_start: h.get("run_start")?, stats })
}

pub fn write_stats(path: &Path, s: &StatsFile) -> Result<()> {
    fs::write(path, stats_to_string(s)).map_err(|e| Error::io(path, e))
}

pub fn read_stats(path: &Path) -> Result<StatsFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_stats(path, &text)
}

/// Writes `text` to `path`, mapping the error.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{Engine, Mode};
    use proptest::prelude::*;

    fn sample_curve(side: usize, r: u32, runs: u64, seed: u64) -> QCurve {
        let p = ModelParams::new(side, r).with_seed(seed);
        let mut e = Engine::new(p);
        let recs: Vec<_> = (0..runs).map(|k| e.run_indexed(k)).collect();
        QCurve::accumulate(&p, 0, &recs).unwrap()
    }

    #[test]
    fn qcurve_header_layout() {
        let q = sample_curve(2, 0, 3, 5);
        let text = qcurve_to_string(&q);
        let head: Vec<&str> = text.lines().take(11).collect();
        assert_eq!(
            head,
            vec![
                "# volperc q-curve",
                "L=2",
                "r=0",
                "mode=standard",
                "runs=3",
                "seed=5",
                "run_start=0",
                "sites=4",
                "percolating_runs=3",
                "# i Q_i",
                "0 0",
            ]
        );
    }

    #[test]
    fn rejects_garbage() {
        let p = Path::new("x.txt");
        assert!(parse_qcurve(p, "hello").is_err());
        let q = sample_curve(2, 0, 3, 5);
        let text = qcurve_to_string(&q).replace("2 1", "3 1");
        assert!(matches!(parse_qcurve(p, &text), Err(Error::Parse { .. })));
        let text = qcurve_to_string(&q).replace("L=2", "L=3");
        assert!(parse_qcurve(p, &text).is_err());
        let text = qcurve_to_string(&q).replace("mode=standard", "mode=sideways");
        assert!(parse_qcurve(p, &text).is_err());
    }

    #[test]
    fn stats_round_trip() {
        let p = ModelParams::new(8, 2).with_seed(3).with_mode(Mode::Opposite);
        let mut e = Engine::new(p);
        let mut acc = StatsAccumulator::new(64);
        for k in 0..20 {
            acc.push(&e.run_indexed(k));
        }
        let s = StatsFile { params: p, run_start: 0, stats: acc };
        let back = parse_stats(Path::new("s"), &stats_to_string(&s)).unwrap();
        assert_eq!(back, s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn qcurve_text_round_trips(side in 2usize..7, r in 0u32..4, runs in 1u64..40, seed in any::<u64>()) {
            let q = sample_curve(side, r, runs, seed);
            let back = parse_qcurve(Path::new("q"), &qcurve_to_string(&q)).unwrap();
            prop_assert_eq!(back, q);
        }
    }
}
