//! Trade-record ingestion: parsing, filtering and per-year edge sets.
//!
//! Economy identifiers are compared on a normalized key (trimmed and
//! case-folded). The first spelling seen while parsing becomes the display
//! form for every later variant of the same key.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Commodity code for crude petroleum oils.
pub const CRUDE_OIL_HS: &str = "270900";

/// Default exclusion patterns: "not elsewhere specified" aggregates such as
/// `Other Asia, nes`, and the `World` partner total.
pub const DEFAULT_EXCLUSIONS: &[&str] = &[r"(?i)\bnes\b", r"(?i)^\s*world\s*$"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    Import,
    Export,
}

impl FromStr for Flow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "import" | "imports" | "m" | "1" => Ok(Flow::Import),
            "export" | "exports" | "x" | "2" => Ok(Flow::Export),
            other => Err(Error::argument(format!("unsupported trade flow `{other}`"))),
        }
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flow::Import => "import",
            Flow::Export => "export",
        })
    }
}

/// One reported trade flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub year: i32,
    pub reporter: String,
    pub partner: String,
    pub flow: Flow,
    pub commodity: String,
    pub value: f64,
}

/// Comparison key for an economy identifier.
pub fn economy_key(id: &str) -> String {
    id.trim().to_lowercase()
}

/// Source column names for each logical field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMapping {
    pub year: String,
    pub reporter: String,
    pub partner: String,
    pub flow: String,
    pub commodity: String,
    pub value: String,
}

impl Default for ColumnMapping {
    /// Header names of the UN Comtrade bulk CSV export.
    fn default() -> Self {
        Self {
            year: "Year".into(),
            reporter: "Reporter".into(),
            partner: "Partner".into(),
            flow: "Trade Flow".into(),
            commodity: "Commodity Code".into(),
            value: "Trade Value (US$)".into(),
        }
    }
}

/// Inclusive year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub first: i32,
    pub last: i32,
}

impl YearRange {
    pub fn new(first: i32, last: i32) -> Self {
        Self { first, last }
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first..=self.last).contains(&year)
    }
}

/// Everything the ingestion stage can be configured with. All fields are
/// optional in the JSON form and fall back to the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub columns: ColumnMapping,
    pub delimiter: char,
    /// Rows outside this range are rejected while parsing.
    pub years: Option<YearRange>,
    pub commodity: String,
    pub flows: Vec<Flow>,
    /// Regular expressions; an identifier matching any of them is excluded.
    pub exclusions: Vec<String>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            columns: ColumnMapping::default(),
            delimiter: ',',
            years: None,
            commodity: CRUDE_OIL_HS.into(),
            flows: vec![Flow::Import],
            exclusions: DEFAULT_EXCLUSIONS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl IngestConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn record_filter(&self) -> Result<RecordFilter> {
        RecordFilter::new(
            &self.commodity,
            self.flows.iter().copied(),
            &self.exclusions,
        )
    }
}

/// A row that could not be turned into a [`TradeRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    /// 1-based line number in the source, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOutcome {
    pub records: Vec<TradeRecord>,
    pub rejected: Vec<RejectedRow>,
}

struct ColumnIndex {
    year: usize,
    reporter: usize,
    partner: usize,
    flow: usize,
    commodity: usize,
    value: usize,
}

impl ColumnIndex {
    fn resolve(headers: &csv::StringRecord, mapping: &ColumnMapping) -> Result<Self> {
        let mut missing = Vec::new();
        let mut find = |logical: &str, name: &str| {
            let pos = headers.iter().position(|h| h.trim() == name.trim());
            if pos.is_none() {
                missing.push(format!("{logical} (`{name}`)"));
            }
            pos.unwrap_or(0)
        };
        let idx = ColumnIndex {
            year: find("year", &mapping.year),
            reporter: find("reporter", &mapping.reporter),
            partner: find("partner", &mapping.partner),
            flow: find("flow", &mapping.flow),
            commodity: find("commodity", &mapping.commodity),
            value: find("value", &mapping.value),
        };
        if missing.is_empty() {
            Ok(idx)
        } else {
            Err(Error::Schema(format!(
                "missing required column(s): {}",
                missing.join(", ")
            )))
        }
    }
}

fn csv_error(err: csv::Error) -> Error {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Csv(err)
    }
}

/// Parses delimiter-separated trade records with a header row.
///
/// Well-formed rows become records; every other row is reported in
/// [`ParseOutcome::rejected`] with its line number.
pub fn parse_records<R: Read>(source: R, config: &IngestConfig) -> Result<ParseOutcome> {
    let delimiter = u8::try_from(u32::from(config.delimiter))
        .map_err(|_| Error::Config(format!("delimiter `{}` is not ASCII", config.delimiter)))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .has_headers(true)
        .from_reader(source);

    let headers = reader.headers().map_err(csv_error)?.clone();
    let cols = ColumnIndex::resolve(&headers, &config.columns)?;

    let mut display: HashMap<String, String> = HashMap::new();
    let mut canonical = |raw: &str| -> String {
        let trimmed = raw.trim();
        display
            .entry(economy_key(trimmed))
            .or_insert_with(|| trimmed.to_string())
            .clone()
    };

    let mut outcome = ParseOutcome::default();
    let mut raw = csv::ByteRecord::new();
    loop {
        match reader.read_byte_record(&mut raw) {
            Ok(true) => {}
            Ok(false) => break,
            Err(err) if err.is_io_error() => return Err(csv_error(err)),
            Err(err) => {
                let line = err.position().map_or(0, |p| p.line());
                outcome.rejected.push(RejectedRow {
                    line,
                    reason: err.to_string(),
                });
                continue;
            }
        }
        let line = raw.position().map_or(0, |p| p.line());
        match parse_row(&raw, &cols, config) {
            Ok(mut rec) => {
                rec.reporter = canonical(&rec.reporter);
                rec.partner = canonical(&rec.partner);
                outcome.records.push(rec);
            }
            Err(reason) => outcome.rejected.push(RejectedRow { line, reason }),
        }
    }
    Ok(outcome)
}

fn parse_row(
    raw: &csv::ByteRecord,
    cols: &ColumnIndex,
    config: &IngestConfig,
) -> std::result::Result<TradeRecord, String> {
    let field = |idx: usize, name: &str| -> std::result::Result<&str, String> {
        let bytes = raw
            .get(idx)
            .ok_or_else(|| format!("missing field `{name}`"))?;
        let text = std::str::from_utf8(bytes).map_err(|_| format!("`{name}` is not UTF-8"))?;
        let text = text.trim();
        if text.is_empty() {
            Err(format!("blank `{name}`"))
        } else {
            Ok(text)
        }
    };

    let year_text = field(cols.year, "year")?;
    let year: i32 = year_text
        .parse()
        .map_err(|_| format!("invalid year `{year_text}`"))?;
    if let Some(range) = config.years {
        if !range.contains(year) {
            return Err(format!(
                "year {year} outside {}..={}",
                range.first, range.last
            ));
        }
    }
    let reporter = field(cols.reporter, "reporter")?;
    let partner = field(cols.partner, "partner")?;
    if economy_key(reporter) == economy_key(partner) {
        return Err(format!("reporter equals partner (`{reporter}`)"));
    }
    let flow: Flow = field(cols.flow, "flow")?
        .parse()
        .map_err(|e: Error| e.to_string())?;
    let commodity = field(cols.commodity, "commodity")?;
    let value_text = field(cols.value, "value")?;
    let value: f64 = value_text
        .parse()
        .map_err(|_| format!("invalid value `{value_text}`"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!(
            "trade value must be finite and non-negative, got {value_text}"
        ));
    }

    Ok(TradeRecord {
        year,
        reporter: reporter.to_string(),
        partner: partner.to_string(),
        flow,
        commodity: commodity.to_string(),
        value,
    })
}

/// Commodity, flow and identifier-exclusion filter.
#[derive(Debug, Clone)]
pub struct RecordFilter {
    commodity: String,
    flows: BTreeSet<Flow>,
    exclusions: Vec<Regex>,
}

impl RecordFilter {
    pub fn new<I, S>(commodity: &str, flows: I, exclusions: &[S]) -> Result<Self>
    where
        I: IntoIterator<Item = Flow>,
        S: AsRef<str>,
    {
        let exclusions = exclusions
            .iter()
            .map(|p| {
                Regex::new(p.as_ref()).map_err(|e| {
                    Error::Config(format!("bad exclusion pattern `{}`: {e}", p.as_ref()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            commodity: commodity.trim().to_string(),
            flows: flows.into_iter().collect(),
            exclusions,
        })
    }

    pub fn is_excluded(&self, id: &str) -> bool {
        self.exclusions.iter().any(|re| re.is_match(id))
    }

    pub fn accepts(&self, rec: &TradeRecord) -> bool {
        rec.commodity.trim() == self.commodity
            && self.flows.contains(&rec.flow)
            && !self.is_excluded(&rec.reporter)
            && !self.is_excluded(&rec.partner)
    }
}

impl Default for RecordFilter {
    fn default() -> Self {
        IngestConfig::default()
            .record_filter()
            .expect("default exclusion patterns compile")
    }
}

pub fn filter_records(records: &[TradeRecord], filter: &RecordFilter) -> Vec<TradeRecord> {
    records
        .iter()
        .filter(|r| filter.accepts(r))
        .cloned()
        .collect()
}

/// Directed (exporter, importer) pairs observed in one year.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet {
    pub year: i32,
    pub edges: BTreeSet<(String, String)>,
}

impl EdgeSet {
    pub fn new(year: i32) -> Self {
        Self {
            year,
            edges: BTreeSet::new(),
        }
    }

    /// Inserts an edge, ignoring self-loops. Returns whether it was new.
    pub fn insert(&mut self, exporter: &str, importer: &str) -> bool {
        if economy_key(exporter) == economy_key(importer) {
            return false;
        }
        self.edges
            .insert((exporter.to_string(), importer.to_string()))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Groups filtered records into one edge set per year.
///
/// An import report `(reporter r, partner p)` is an export from `p` to `r`;
/// an export report is an export from `r` to `p`. Zero-value rows carry no
/// trade and produce no edge.
pub fn build_edge_sets(records: &[TradeRecord]) -> BTreeMap<i32, EdgeSet> {
    // Smallest spelling per key, so the result does not depend on record order.
    let mut display: HashMap<String, &str> = HashMap::new();
    for rec in records {
        for id in [rec.reporter.as_str(), rec.partner.as_str()] {
            let id = id.trim();
            display
                .entry(economy_key(id))
                .and_modify(|cur| {
                    if id < *cur {
                        *cur = id;
                    }
                })
                .or_insert(id);
        }
    }

    let mut by_year: BTreeMap<i32, EdgeSet> = BTreeMap::new();
    for rec in records {
        let set = by_year
            .entry(rec.year)
            .or_insert_with(|| EdgeSet::new(rec.year));
        if rec.value <= 0.0 {
            continue;
        }
        let reporter = display[&economy_key(&rec.reporter)];
        let partner = display[&economy_key(&rec.partner)];
        match rec.flow {
            Flow::Import => set.insert(partner, reporter),
            Flow::Export => set.insert(reporter, partner),
        };
    }
    by_year
}

/// Writes `exporter,importer` lines in lexicographic order, no header.
pub fn write_edge_list<W: Write>(set: &EdgeSet, out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for (from, to) in &set.edges {
        writer.write_record([from, to])?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads an edge list written by [`write_edge_list`].
pub fn read_edge_list<R: Read>(year: i32, source: R) -> Result<EdgeSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(source);
    let mut set = EdgeSet::new(year);
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        if row.len() != 2 {
            return Err(Error::Schema(format!(
                "edge list line {}: expected 2 fields, found {}",
                row.position().map_or(0, |p| p.line()),
                row.len()
            )));
        }
        let (from, to) = (row[0].trim(), row[1].trim());
        if from.is_empty() || to.is_empty() {
            return Err(Error::Schema("edge list contains a blank endpoint".into()));
        }
        if !set.insert(from, to) && economy_key(from) == economy_key(to) {
            return Err(Error::Schema(format!(
                "edge list contains self-loop `{from}`"
            )));
        }
    }
    Ok(set)
}
