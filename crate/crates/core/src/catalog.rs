//! The 74 Mordell–Weil types: computation, comparison with the reference
//! table, and export.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::Rat;
use crate::multiplicity::embedding_outcomes;
use crate::rootsys::{count_roots, LatticeSpec, RootSysError};

const TABLES_CSV: &str = include_str!("../data/tables.csv");
const ERRATA_CSV: &str = include_str!("../data/errata.csv");

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{spec}: expected {expected} distinct embeddings, found {found}")]
    EmbeddingMismatch { spec: LatticeSpec, expected: usize, found: usize },
    #[error("fixture line {line}: {message}")]
    Fixture { line: u64, message: String },
    #[error("fixture: {0}")]
    Csv(#[from] csv::Error),
    #[error("fixture: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Spec(#[from] RootSysError),
    #[error("unknown format {0:?} (expected csv or json)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Row {
    pub height: Rat,
    pub m: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub number: u32,
    pub spec: LatticeSpec,
    pub r: usize,
    pub v: usize,
    /// Descending height, then descending `m`.
    pub rows: Vec<Row>,
}

impl CatalogEntry {
    /// `Σ m·count`.
    pub fn weighted_total(&self) -> u64 {
        self.rows.iter().map(|r| r.m * r.count).sum()
    }

    pub fn section_count(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn satisfies_identity(&self) -> bool {
        self.weighted_total() + self.v as u64 == 240
    }
}

fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| b.height.cmp(&a.height).then(b.m.cmp(&a.m)));
}

/// Reference values, one entry per table number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableFixture {
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, Deserialize)]
struct CsvRecord {
    no: u32,
    r: usize,
    #[serde(rename = "T")]
    spec: String,
    #[serde(rename = "vT")]
    v: usize,
    height: Option<String>,
    m: Option<u64>,
    count: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    no: u32,
    r: usize,
    #[serde(rename = "T")]
    spec: String,
    #[serde(rename = "vT")]
    v: usize,
    rows: Vec<Row>,
}

impl TableFixture {
    /// Table as printed, without corrections.
    pub fn verbatim() -> Self {
        Self::from_csv(TABLES_CSV).expect("embedded table parses")
    }

    /// Table with the known transcription errors in the source corrected.
    pub fn embedded() -> Self {
        let mut f = Self::verbatim();
        f.apply(&Self::errata());
        f
    }

    /// Replacement entries applied by [`TableFixture::embedded`].
    pub fn errata() -> Self {
        Self::from_csv(ERRATA_CSV).expect("embedded errata parse")
    }

    /// Replaces entries that share a number with one in `patch`.
    pub fn apply(&mut self, patch: &TableFixture) {
        for p in &patch.entries {
            match self.entries.iter_mut().find(|e| e.number == p.number) {
                Some(e) => *e = p.clone(),
                None => self.entries.push(p.clone()),
            }
        }
        self.entries.sort_by_key(|e| e.number);
    }

    pub fn get(&self, number: u32) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.number == number)
    }

    /// Parses `no,r,T,vT,height,m,count`, one line per row; an entry
    /// without rows has the last three fields empty.
    pub fn from_csv(text: &str) -> Result<Self, CatalogError> {
        let mut entries: BTreeMap<u32, CatalogEntry> = BTreeMap::new();
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        let mut raw = csv::StringRecord::new();
        while reader.read_record(&mut raw)? {
            let line = raw.position().map_or(0, csv::Position::line);
            let rec: CsvRecord = raw.deserialize(Some(&headers))?;
            let bad = |message: String| CatalogError::Fixture { line, message };
            let spec: LatticeSpec = rec.spec.parse()?;
            let entry = entries.entry(rec.no).or_insert_with(|| CatalogEntry {
                number: rec.no,
                spec: spec.clone(),
                r: rec.r,
                v: rec.v,
                rows: Vec::new(),
            });
            if entry.spec != spec || entry.r != rec.r || entry.v != rec.v {
                return Err(bad(format!("entry {} changes its header fields", rec.no)));
            }
            match (rec.height, rec.m, rec.count) {
                (None, None, None) => {}
                (Some(h), Some(m), Some(count)) => {
                    let height = h.parse().map_err(|e| bad(format!("height {h:?}: {e}")))?;
                    entry.rows.push(Row { height, m, count });
                }
                _ => return Err(bad("row must give all of height, m, count or none".into())),
            }
        }
        let mut entries: Vec<CatalogEntry> = entries.into_values().collect();
        for e in &mut entries {
            sort_rows(&mut e.rows);
        }
        Ok(TableFixture { entries })
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let raw: Vec<JsonEntry> = serde_json::from_str(text)?;
        let mut entries = Vec::with_capacity(raw.len());
        for j in raw {
            let mut rows = j.rows;
            sort_rows(&mut rows);
            entries.push(CatalogEntry { number: j.no, spec: j.spec.parse()?, r: j.r, v: j.v, rows });
        }
        entries.sort_by_key(|e| e.number);
        Ok(TableFixture { entries })
    }
}

fn row_multiset(rows: &[Row]) -> Vec<Row> {
    let mut r = rows.to_vec();
    r.sort();
    r
}

/// Computes every entry of the embedded fixture.
pub fn build_catalog() -> Result<Vec<CatalogEntry>, CatalogError> {
    build_catalog_for(&TableFixture::embedded())
}

/// Computes the embedded-fixture entries selected by `keep`, numbered as in
/// the fixture.
pub fn build_catalog_matching(keep: impl Fn(&CatalogEntry) -> bool) -> Result<Vec<CatalogEntry>, CatalogError> {
    let full = TableFixture::embedded();
    let subset = TableFixture { entries: full.entries.into_iter().filter(|e| keep(e)).collect() };
    build_catalog_for(&subset)
}

/// Computes every lattice type listed in `fixture`. Entries sharing a
/// lattice are matched to fixture numbers by their row lists; any left
/// unmatched are assigned in search order so the mismatch shows up in
/// [`verify_tables`].
pub fn build_catalog_for(fixture: &TableFixture) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut groups: BTreeMap<LatticeSpec, Vec<&CatalogEntry>> = BTreeMap::new();
    for e in &fixture.entries {
        groups.entry(e.spec.clone()).or_default().push(e);
    }
    let groups: Vec<(LatticeSpec, Vec<&CatalogEntry>)> = groups.into_iter().collect();
    let built: Vec<Vec<CatalogEntry>> = groups
        .par_iter()
        .map(|(spec, expected)| build_group(spec, expected))
        .collect::<Result<_, _>>()?;
    let mut out: Vec<CatalogEntry> = built.into_iter().flatten().collect();
    out.sort_by_key(|e| e.number);
    Ok(out)
}

fn build_group(spec: &LatticeSpec, expected: &[&CatalogEntry]) -> Result<Vec<CatalogEntry>, CatalogError> {
    let outcomes = embedding_outcomes(spec);
    if outcomes.len() != expected.len() {
        return Err(CatalogError::EmbeddingMismatch {
            spec: spec.clone(),
            expected: expected.len(),
            found: outcomes.len(),
        });
    }
    let computed: Vec<Vec<Row>> = outcomes
        .iter()
        .map(|(_, sig)| {
            sig.rows.iter().map(|(height, m, count)| Row { height: height.clone(), m: *m, count: *count }).collect()
        })
        .collect();
    let mut used = HashSet::new();
    let mut assignment: Vec<Option<usize>> = expected
        .iter()
        .map(|e| {
            let want = row_multiset(&e.rows);
            let hit = (0..computed.len()).find(|i| !used.contains(i) && row_multiset(&computed[*i]) == want);
            if let Some(i) = hit {
                used.insert(i);
            }
            hit
        })
        .collect();
    let mut spare = (0..computed.len()).filter(|i| !used.contains(i));
    for slot in assignment.iter_mut().filter(|s| s.is_none()) {
        *slot = spare.next();
    }
    let r = 8 - spec.rank();
    let v = count_roots(spec);
    Ok(expected
        .iter()
        .zip(assignment)
        .map(|(e, i)| CatalogEntry {
            number: e.number,
            spec: spec.clone(),
            r,
            v,
            rows: computed[i.expect("one outcome per entry")].clone(),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiscrepancyKind {
    /// Present in the fixture, absent from the computation.
    MissingEntry,
    /// Computed but absent from the fixture.
    UnexpectedEntry,
    Field { field: &'static str, expected: String, found: String },
    Count { height: Rat, m: u64, expected: u64, found: u64 },
    RowMissing(Row),
    RowExtra(Row),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub number: u32,
    pub kind: DiscrepancyKind,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "No.{}: ", self.number)?;
        match &self.kind {
            DiscrepancyKind::MissingEntry => write!(f, "entry missing from computed catalog"),
            DiscrepancyKind::UnexpectedEntry => write!(f, "entry not in fixture"),
            DiscrepancyKind::Field { field, expected, found } => {
                write!(f, "{field}: expected {expected}, found {found}")
            }
            DiscrepancyKind::Count { height, m, expected, found } => {
                write!(f, "row (h={height}, m={m}) count: expected {expected}, found {found}")
            }
            DiscrepancyKind::RowMissing(r) => {
                write!(f, "row (h={}, m={}, #={}) not computed", r.height, r.m, r.count)
            }
            DiscrepancyKind::RowExtra(r) => {
                write!(f, "row (h={}, m={}, #={}) computed but not expected", r.height, r.m, r.count)
            }
        }
    }
}

/// Field-by-field comparison; rows are compared as multisets keyed by
/// `(height, m)`.
pub fn verify_tables(computed: &[CatalogEntry], fixture: &TableFixture) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for exp in &fixture.entries {
        let number = exp.number;
        let Some(got) = computed.iter().find(|e| e.number == number) else {
            out.push(Discrepancy { number, kind: DiscrepancyKind::MissingEntry });
            continue;
        };
        let mut field = |field: &'static str, expected: String, found: String| {
            if expected != found {
                out.push(Discrepancy { number, kind: DiscrepancyKind::Field { field, expected, found } });
            }
        };
        field("T", exp.spec.to_string(), got.spec.to_string());
        field("r", exp.r.to_string(), got.r.to_string());
        field("vT", exp.v.to_string(), got.v.to_string());
        let key = |rows: &[Row]| -> BTreeMap<(Rat, u64), Vec<u64>> {
            let mut m: BTreeMap<(Rat, u64), Vec<u64>> = BTreeMap::new();
            for r in rows {
                m.entry((r.height.clone(), r.m)).or_default().push(r.count);
            }
            m
        };
        let (want, have) = (key(&exp.rows), key(&got.rows));
        for ((height, m), counts) in &want {
            match have.get(&(height.clone(), *m)) {
                None => {
                    for &count in counts {
                        let row = Row { height: height.clone(), m: *m, count };
                        out.push(Discrepancy { number, kind: DiscrepancyKind::RowMissing(row) });
                    }
                }
                Some(found) if found != counts => out.push(Discrepancy {
                    number,
                    kind: DiscrepancyKind::Count {
                        height: height.clone(),
                        m: *m,
                        expected: counts.iter().sum(),
                        found: found.iter().sum(),
                    },
                }),
                Some(_) => {}
            }
        }
        for ((height, m), counts) in &have {
            if !want.contains_key(&(height.clone(), *m)) {
                for &count in counts {
                    let row = Row { height: height.clone(), m: *m, count };
                    out.push(Discrepancy { number, kind: DiscrepancyKind::RowExtra(row) });
                }
            }
        }
    }
    for got in computed {
        if fixture.get(got.number).is_none() {
            out.push(Discrepancy { number: got.number, kind: DiscrepancyKind::UnexpectedEntry });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CatalogError::UnknownFormat(s.to_string())),
        }
    }
}

pub fn export(entries: &[CatalogEntry], format: Format) -> String {
    match format {
        Format::Csv => export_csv(entries),
        Format::Json => export_json(entries),
    }
}

fn export_csv(entries: &[CatalogEntry]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["no", "r", "T", "vT", "height", "m", "count"]).expect("in-memory write");
    for e in entries {
        let head = [e.number.to_string(), e.r.to_string(), e.spec.to_string(), e.v.to_string()];
        if e.rows.is_empty() {
            let rec: Vec<String> = head.iter().cloned().chain(["".into(), "".into(), "".into()]).collect();
            w.write_record(&rec).expect("in-memory write");
        }
        for r in &e.rows {
            let rec: Vec<String> =
                head.iter().cloned().chain([r.height.to_string(), r.m.to_string(), r.count.to_string()]).collect();
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("ASCII output")
}

fn export_json(entries: &[CatalogEntry]) -> String {
    let raw: Vec<JsonEntry> = entries
        .iter()
        .map(|e| JsonEntry { no: e.number, r: e.r, spec: e.spec.to_string(), v: e.v, rows: e.rows.clone() })
        .collect();
    let mut s = serde_json::to_string_pretty(&raw).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn row(h: Rat, m: u64, count: u64) -> Row {
        Row { height: h, m, count }
    }

    #[test]
    fn fixture_shape() {
        let f = TableFixture::embedded();
        assert_eq!(f.entries.len(), 74);
        assert!(f.entries.iter().enumerate().all(|(i, e)| e.number == i as u32 + 1));
        let one = f.get(1).unwrap();
        assert_eq!(one.spec, LatticeSpec::empty());
        assert_eq!(one.rows, vec![row(rat(2, 1), 1, 240)]);
        assert!(f.get(62).unwrap().rows.is_empty());
        assert_eq!(
            f.get(39).unwrap().rows,
            vec![row(rat(2, 1), 1, 6), row(rat(2, 3), 9, 18), row(rat(0, 1), 27, 2)]
        );
    }

    #[test]
    fn fixture_header_fields_are_consistent() {
        for e in TableFixture::verbatim().entries {
            assert_eq!(e.r, 8 - e.spec.rank(), "No.{}", e.number);
            assert_eq!(e.v, count_roots(&e.spec), "No.{}", e.number);
        }
    }

    #[test]
    fn identity_holds_in_corrected_fixture() {
        for e in TableFixture::embedded().entries {
            assert!(e.satisfies_identity(), "No.{}", e.number);
        }
    }

    #[test]
    fn verbatim_differs_only_at_errata() {
        let verbatim = TableFixture::verbatim();
        let broken: Vec<u32> =
            verbatim.entries.iter().filter(|e| !e.satisfies_identity()).map(|e| e.number).collect();
        assert_eq!(broken, vec![71]);
        let errata: Vec<u32> = TableFixture::errata().entries.iter().map(|e| e.number).collect();
        assert_eq!(errata, vec![58, 71, 74]);
        let diff = verify_tables(&TableFixture::embedded().entries, &verbatim);
        let mut touched: Vec<u32> = diff.iter().map(|d| d.number).collect();
        touched.dedup();
        assert_eq!(touched, errata);
        assert!(diff.contains(&Discrepancy {
            number: 71,
            kind: DiscrepancyKind::Count { height: rat(0, 1), m: 48, expected: 2, found: 1 },
        }));
    }

    #[test]
    fn corrupted_count_gives_one_discrepancy() {
        let good = TableFixture::embedded();
        let mut bad = good.clone();
        bad.entries[15].rows[0].count += 1;
        let diff = verify_tables(&good.entries, &bad);
        assert_eq!(diff.len(), 1);
        assert_eq!(diff[0].number, 16);
        assert!(diff[0].to_string().contains("count"));
    }

    #[test]
    fn missing_entry_is_reported() {
        let good = TableFixture::embedded();
        let computed: Vec<CatalogEntry> = good.entries.iter().filter(|e| e.number != 5).cloned().collect();
        let diff = verify_tables(&computed, &good);
        assert_eq!(diff, vec![Discrepancy { number: 5, kind: DiscrepancyKind::MissingEntry }]);
    }

    #[test]
    fn csv_export_round_trips() {
        let f = TableFixture::embedded();
        let text = export(&f.entries, Format::Csv);
        assert!(text.contains("16,3,D5,40,3/4,16,8"));
        assert!(text.contains("62,0,E8,240,,,"));
        assert_eq!(TableFixture::from_csv(&text).unwrap(), f);
        assert_eq!(export(&[], Format::Csv), "no,r,T,vT,height,m,count\n");
    }

    #[test]
    fn json_export_round_trips() {
        let f = TableFixture::embedded();
        let text = export(&f.entries, Format::Json);
        assert_eq!(TableFixture::from_json(&text).unwrap(), f);
        assert!(matches!("xml".parse::<Format>(), Err(CatalogError::UnknownFormat(_))));
    }

    #[test]
    fn malformed_fixture_rows() {
        let text = "no,r,T,vT,height,m,count\n2,7,A1,2,2,1,\n";
        assert!(matches!(TableFixture::from_csv(text), Err(CatalogError::Fixture { .. })));
        let text = "no,r,T,vT,height,m,count\n2,7,Q1,2,2,1,126\n";
        assert!(TableFixture::from_csv(text).is_err());
    }
}
