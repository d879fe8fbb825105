//! Append-only JSONL survey store with a derived CSV summary.
//!
//! Records are appended as each batch of denominators finishes. On open, a
//! denominator counts as done only if all of its unit-level orbits are present,
//! so a run killed mid-write resumes cleanly. `finalize` rewrites the log sorted
//! by `(n, rep)` without duplicates, which makes the final bytes independent of
//! batch order and worker count.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use log::warn;
use orbitlab_core::measures::exact_serde;
use orbitlab_core::{subgroup_info, ExactRational, Modulus, OutlierCriterion, SurveyRecord};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const STORE_FILE: &str = "survey.jsonl";
pub const SUMMARY_FILE: &str = "survey_summary.csv";
pub const META_FILE: &str = "survey_meta.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredRecord {
    pub schema_version: u32,
    #[serde(flatten)]
    pub record: SurveyRecord,
}

impl StoredRecord {
    pub fn new(record: SurveyRecord) -> Self {
        StoredRecord {
            schema_version: SCHEMA_VERSION,
            record,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    pub fn from_line(line: &str) -> anyhow::Result<Self> {
        let r: StoredRecord = serde_json::from_str(line)?;
        if r.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                r.schema_version
            );
        }
        Ok(r)
    }
}

/// Criterion the stored `outlier` flags were computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Meta {
    schema_version: u32,
    #[serde(with = "exact_serde")]
    threshold: ExactRational,
    min_length: usize,
}

#[derive(Debug)]
pub struct SurveyStore {
    dir: PathBuf,
    records: BTreeMap<(u64, u64), SurveyRecord>,
}

/// Raised when a store was written under a different outlier criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionMismatch {
    pub stored: String,
    pub requested: String,
}

impl fmt::Display for CriterionMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "store was written with {}, this run uses {}; pick another output directory",
            self.stored, self.requested
        )
    }
}

impl std::error::Error for CriterionMismatch {}

impl fmt::Display for Meta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "threshold {} and min_length {}", self.threshold, self.min_length)
    }
}

impl SurveyStore {
    /// Opens (or creates) the store in `dir`, dropping denominators whose
    /// records are incomplete.
    pub fn open(dir: &Path, crit: &OutlierCriterion) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        check_meta(dir, crit)?;
        let path = dir.join(STORE_FILE);
        let mut by_n: BTreeMap<u64, Vec<SurveyRecord>> = BTreeMap::new();
        if path.exists() {
            let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
            let lines: Vec<String> = BufReader::new(file).lines().collect::<Result<_, _>>()?;
            let last = lines.len();
            for (i, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                match StoredRecord::from_line(line) {
                    Ok(r) => by_n.entry(r.record.n).or_default().push(r.record),
                    // a torn final line is what an interrupted append leaves behind
                    Err(e) if i + 1 == last => warn!("dropping truncated last line: {e}"),
                    Err(e) => bail!("{}:{}: {e}", path.display(), i + 1),
                }
            }
        }
        let mut records = BTreeMap::new();
        for (n, recs) in by_n {
            let mut uniq: HashMap<u64, SurveyRecord> = HashMap::new();
            for r in recs {
                uniq.insert(r.rep, r);
            }
            let expected = expected_orbits(n)?;
            if uniq.len() as u64 != expected {
                warn!("n = {n}: {} of {expected} orbits stored; recomputing", uniq.len());
                continue;
            }
            records.extend(uniq.into_iter().map(|(rep, r)| ((n, rep), r)));
        }
        Ok(SurveyStore {
            dir: dir.to_path_buf(),
            records,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains_n(&self, n: u64) -> bool {
        self.records.range((n, 0)..=(n, u64::MAX)).next().is_some()
    }

    pub fn records_for(&self, n: u64) -> impl Iterator<Item = &SurveyRecord> {
        self.records.range((n, 0)..=(n, u64::MAX)).map(|(_, r)| r)
    }

    pub fn records(&self) -> impl Iterator<Item = &SurveyRecord> {
        self.records.values()
    }

    /// Appends complete per-denominator batches to the log.
    pub fn append(&mut self, batch: Vec<SurveyRecord>) -> anyhow::Result<()> {
        let path = self.dir.join(STORE_FILE);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("opening {}", path.display()))?;
        let mut w = BufWriter::new(file);
        for r in batch {
            writeln!(w, "{}", StoredRecord::new(r.clone()).to_line())?;
            self.records.insert((r.n, r.rep), r);
        }
        w.flush()?;
        w.get_ref().sync_data()?;
        Ok(())
    }

    /// Rewrites the log in canonical order and regenerates the CSV summary.
    pub fn finalize(&self) -> anyhow::Result<()> {
        let mut jsonl = Vec::new();
        for r in self.records.values() {
            writeln!(jsonl, "{}", StoredRecord::new(r.clone()).to_line())?;
        }
        replace(&self.dir.join(STORE_FILE), &jsonl)?;

        let mut csv = csv::Writer::from_writer(Vec::new());
        for r in self.records.values() {
            csv.serialize(r)?;
        }
        if self.records.is_empty() {
            csv.write_record(SUMMARY_HEADER)?;
        }
        replace(&self.dir.join(SUMMARY_FILE), &csv.into_inner()?)
    }
}

const SUMMARY_HEADER: [&str; 10] = [
    "n",
    "rep",
    "length",
    "distance",
    "distance_f64",
    "symmetric",
    "left",
    "right",
    "outlier",
    "mirror_rep",
];

fn expected_orbits(n: u64) -> anyhow::Result<u64> {
    Ok(subgroup_info(Modulus::new(n)?)?.unit_orbit_count())
}

fn check_meta(dir: &Path, crit: &OutlierCriterion) -> anyhow::Result<()> {
    let meta = Meta {
        schema_version: SCHEMA_VERSION,
        threshold: crit.threshold,
        min_length: crit.min_length,
    };
    let path = dir.join(META_FILE);
    if path.exists() {
        let stored: Meta = serde_json::from_str(&fs::read_to_string(&path)?)
            .with_context(|| format!("parsing {}", path.display()))?;
        if stored != meta {
            return Err(CriterionMismatch {
                stored: stored.to_string(),
                requested: meta.to_string(),
            }
            .into());
        }
        return Ok(());
    }
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    replace(&path, text.as_bytes())
}

/// Writes via a temporary file and rename so readers never see a partial file.
fn replace(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}
