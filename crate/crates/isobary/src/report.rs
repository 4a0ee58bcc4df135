//! Scan report assembly and serialization.
//!
//! Reports carry signed margins: positive means the checked inequality
//! held with that much slack, zero means exact equality where equality is
//! allowed, negative means a violation. Assertive scans fail on any
//! violation; report-only scans list violations without failing.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Cap on the serialized violation list; overflow is counted in a note.
const VIOLATION_CAP: usize = 100;

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::ReportOnly => "report-only",
        })
    }
}

/// Grid description carried verbatim into the report, rationals as text.
#[derive(Serialize, Clone, Debug)]
pub struct GridSpec {
    pub start: String,
    pub end: String,
    pub step: String,
}

/// One evaluated grid point. `t` is free-form: a rational for t-grids, an
/// index or compound label for scans over other parameter spaces.
#[derive(Clone, Debug)]
pub struct Row {
    pub n: u32,
    pub t: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct WorstPoint {
    pub n: u32,
    pub t: String,
    pub margin: f64,
}

#[derive(Serialize, Clone, Debug)]
pub struct Violation {
    pub n: u32,
    pub t: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Serialize, Clone, Debug)]
pub struct PerN {
    pub n: u32,
    pub points: u64,
    pub min_margin: f64,
}

#[derive(Serialize, Debug)]
pub struct ScanReport {
    pub name: String,
    pub n_range: [u32; 2],
    pub grid: GridSpec,
    pub verdict: Verdict,
    pub worst_point: Option<WorstPoint>,
    pub violations: Vec<Violation>,
    pub per_n: Vec<PerN>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

impl ScanReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per evaluated point under the fixed header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,t,value,bound,margin,verdict\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.t,
                r.value,
                r.bound,
                r.margin,
                if r.pass { "pass" } else { "fail" }
            ));
        }
        out
    }
}

pub struct ScanBuilder {
    name: String,
    n_range: [u32; 2],
    grid: GridSpec,
    assertive: bool,
    rows: Vec<Row>,
    violations: Vec<Violation>,
    overflow: u64,
    per_n: BTreeMap<u32, (u64, f64)>,
    notes: Vec<String>,
    worst: Option<WorstPoint>,
    failed: bool,
}

impl ScanBuilder {
    pub fn new(
        name: impl Into<String>,
        n_lo: u32,
        n_hi: u32,
        grid: GridSpec,
        assertive: bool,
    ) -> Self {
        ScanBuilder {
            name: name.into(),
            n_range: [n_lo, n_hi],
            grid,
            assertive,
            rows: Vec::new(),
            violations: Vec::new(),
            overflow: 0,
            per_n: BTreeMap::new(),
            notes: Vec::new(),
            worst: None,
            failed: false,
        }
    }

    pub fn add_row(&mut self, row: Row) {
        let entry = self.per_n.entry(row.n).or_insert((0, f64::INFINITY));
        entry.0 += 1;
        if row.margin < entry.1 {
            entry.1 = row.margin;
        }
        if self.worst.as_ref().is_none_or(|w| row.margin < w.margin) {
            self.worst = Some(WorstPoint {
                n: row.n,
                t: row.t.clone(),
                margin: row.margin,
            });
        }
        if !row.pass {
            self.record_violation(Violation {
                n: row.n,
                t: row.t.clone(),
                value: row.value,
                bound: row.bound,
                margin: row.margin,
            });
        }
        self.rows.push(row);
    }

    /// Violation from a side check that has no row of its own.
    pub fn add_violation(&mut self, v: Violation) {
        self.record_violation(v);
    }

    fn record_violation(&mut self, v: Violation) {
        self.failed = true;
        if self.violations.len() < VIOLATION_CAP {
            self.violations.push(v);
        } else {
            self.overflow += 1;
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn finish(mut self) -> ScanReport {
        if self.overflow > 0 {
            self.notes
                .push(format!("{} further violations beyond the listed cap", self.overflow));
        }
        let verdict = if !self.assertive {
            Verdict::ReportOnly
        } else if self.failed {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        ScanReport {
            name: self.name,
            n_range: self.n_range,
            grid: self.grid,
            verdict,
            worst_point: self.worst,
            violations: self.violations,
            per_n: self
                .per_n
                .into_iter()
                .map(|(n, (points, min_margin))| PerN {
                    n,
                    points,
                    min_margin,
                })
                .collect(),
            notes: self.notes,
            rows: self.rows,
        }
    }
}

/// Write via a temp file in the same directory, then rename into place, so
/// readers never observe a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}
