//! Company files, the 2019 peer snapshot and the discount-input table.
//!
//! A company file is UTF-8 comma-separated text with a leading metadata
//! block:
//!
//! ```text
//! #name: Facebook
//! #country: USA
//! #unit: millions-USD
//! #actual_ev: 584350
//! #rank: 1
//! year,revenue_advertising,revenue_other,cost_price,rnd,marketing,admin,other_income,ebit,income_tax,net_income,da,capex,delta_nwc,net_borrowing,dau,mau,forecast
//! 2020,84319,1249,...,true
//! ```
//!
//! Empty cells are nulls. Money cells are in the declared unit; `dau`/`mau`
//! are millions of users. The last `forecast=true` row is the post-forecast
//! period.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rust_decimal::Decimal;

use crate::comparables::CompanySnapshot;
use crate::error::{Result, ValuationError};
use crate::model::{
    slug, CompanyProfile, DiscountInputs, FinancialStatement, LineItem, Money, MoneyUnit,
};

pub const COMPANY_HEADER: &str = "year,revenue_advertising,revenue_other,cost_price,rnd,marketing,admin,other_income,ebit,income_tax,net_income,da,capex,delta_nwc,net_borrowing,dau,mau,forecast";
pub const SNAPSHOT_HEADER: &str = "company,revenue,ebit,ebitda,ni,dau,mau,actual_ev,rank";
pub const DISCOUNT_HEADER: &str =
    "company,risk_free,premium,beta,debt_rate,equity_weight,debt_weight,tax_rate,terminal_growth";

pub const SNAPSHOT_FILE: &str = "snapshot_2019.csv";
pub const DISCOUNT_FILE: &str = "discount_inputs.csv";
pub const COMPANIES_DIR: &str = "companies";

/// Net income may differ from EBIT - tax by this many units of the file's
/// last printed digit.
const CONSISTENCY_TOLERANCE: Decimal = Decimal::TWO;

/// Non-fatal finding attached to a loaded file.
#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub source_name: String,
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}: line {}: {}", self.source_name, line, self.message),
            None => write!(f, "{}: {}", self.source_name, self.message),
        }
    }
}

/// Directory of the data files shipped with this crate.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// The bundled files compiled into the binary, for targets without a
/// filesystem.
pub mod bundled {
    pub const COMPANIES: [(&str, &str); 6] = [
        ("facebook.csv", include_str!("../data/companies/facebook.csv")),
        ("pinterest.csv", include_str!("../data/companies/pinterest.csv")),
        ("sina_weibo.csv", include_str!("../data/companies/sina_weibo.csv")),
        ("snapchat.csv", include_str!("../data/companies/snapchat.csv")),
        ("twitter.csv", include_str!("../data/companies/twitter.csv")),
        ("vkontakte.csv", include_str!("../data/companies/vkontakte.csv")),
    ];
    pub const SNAPSHOT: &str = include_str!("../data/snapshot_2019.csv");
    pub const DISCOUNT_INPUTS: &str = include_str!("../data/discount_inputs.csv");
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| ValuationError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> ValuationError {
    ValuationError::Parse {
        source_name: source.to_string(),
        line,
        message: message.into(),
    }
}

fn validation_err(
    source: &str,
    line: usize,
    column: &str,
    message: impl Into<String>,
) -> ValuationError {
    ValuationError::Validation {
        source_name: source.to_string(),
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

/// `(line, key, value)` per metadata line.
type Metadata = Vec<(usize, String, String)>;

/// Splits leading `#key: value` lines from the table body. Returns the
/// metadata (with line numbers) and the 1-based line where the body starts.
fn split_metadata<'a>(
    text: &'a str,
    source: &str,
) -> Result<(Metadata, usize, &'a str)> {
    let mut meta = Vec::new();
    let mut offset = 0;
    let mut line_no = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.starts_with('#') {
            if !trimmed.is_empty() {
                break;
            }
        } else {
            let body = &trimmed[1..];
            let (key, value) = body.split_once(':').ok_or_else(|| {
                parse_err(source, line_no + 1, format!("metadata line `{trimmed}` lacks `:`"))
            })?;
            meta.push((line_no + 1, key.trim().to_string(), value.trim().to_string()));
        }
        offset += line.len();
        line_no += 1;
    }
    Ok((meta, line_no + 1, &text[offset..]))
}

fn parse_decimal(cell: &str) -> std::result::Result<Option<Decimal>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    Decimal::from_str(cell)
        .or_else(|_| Decimal::from_scientific(cell))
        .map(Some)
        .map_err(|_| format!("`{cell}` is not a number"))
}

fn parse_f64(cell: &str) -> std::result::Result<Option<f64>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Some)
        .ok_or_else(|| format!("`{cell}` is not a finite number"))
}

fn csv_reader(body: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes())
}

fn check_header(
    reader: &mut csv::Reader<&[u8]>,
    expected: &str,
    source: &str,
    line: usize,
) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| parse_err(source, line, e.to_string()))?;
    let got = header.iter().collect::<Vec<_>>().join(",");
    if got != expected {
        return Err(parse_err(
            source,
            line,
            format!("unexpected header `{got}`, expected `{expected}`"),
        ));
    }
    Ok(())
}

/// Parses one company file held in memory.
pub fn parse_company(text: &str, source: &str) -> Result<(CompanyProfile, Vec<Warning>)> {
    let (meta, header_line, body) = split_metadata(text, source)?;

    let mut name = None;
    let mut country = None;
    let mut unit = None;
    let mut actual_ev = None;
    let mut rank = None;
    let mut note = None;
    for (line, key, value) in &meta {
        match key.as_str() {
            "name" => name = Some(value.clone()),
            "country" => country = Some(value.clone()),
            "unit" => {
                unit = Some(
                    MoneyUnit::from_str(value).map_err(|e| parse_err(source, *line, e.to_string()))?,
                )
            }
            "actual_ev" => {
                actual_ev = parse_decimal(value).map_err(|m| parse_err(source, *line, m))?
            }
            "rank" => {
                if !value.is_empty() {
                    let r: u32 = value
                        .parse()
                        .ok()
                        .filter(|r| *r > 0)
                        .ok_or_else(|| parse_err(source, *line, "rank must be a positive integer"))?;
                    rank = Some(r);
                }
            }
            "note" => note = Some(value.clone()),
            other => return Err(parse_err(source, *line, format!("unknown metadata key `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| parse_err(source, 1, "missing `#name`"))?;
    let country = country.ok_or_else(|| parse_err(source, 1, "missing `#country`"))?;
    let unit = unit.ok_or_else(|| parse_err(source, 1, "missing `#unit`"))?;
    let actual_enterprise_value = actual_ev.map(|a| Money::new(a, unit));
    if let Some(ev) = actual_enterprise_value {
        if ev.is_negative() || ev.is_zero() {
            return Err(validation_err(source, 1, "actual_ev", "actual EV must be positive"));
        }
    }

    let mut reader = csv_reader(body);
    check_header(&mut reader, COMPANY_HEADER, source, header_line)?;

    let mut statements: Vec<FinancialStatement> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = header_line + 1 + idx;
        let record = record.map_err(|e| parse_err(source, line, e.to_string()))?;
        if record.len() != 18 {
            return Err(parse_err(
                source,
                line,
                format!("expected 18 columns, found {}", record.len()),
            ));
        }
        let year: i32 = record[0]
            .trim()
            .parse()
            .map_err(|_| validation_err(source, line, "year", format!("`{}` is not a year", &record[0])))?;
        let mut st = FinancialStatement::empty(year, unit);
        for (i, item) in LineItem::ALL.into_iter().enumerate() {
            let v = parse_decimal(&record[i + 1])
                .map_err(|m| validation_err(source, line, item.column(), m))?;
            st.set(item, v.map(|a| Money::new(a, unit)));
        }
        st.dau = parse_f64(&record[15]).map_err(|m| validation_err(source, line, "dau", m))?;
        st.mau = parse_f64(&record[16]).map_err(|m| validation_err(source, line, "mau", m))?;
        st.forecast = match record[17].trim() {
            "true" => true,
            "false" | "" => false,
            other => {
                return Err(validation_err(
                    source,
                    line,
                    "forecast",
                    format!("`{other}` is not true/false"),
                ))
            }
        };
        if let Some(prev) = statements.last() {
            if year <= prev.year {
                return Err(validation_err(
                    source,
                    line,
                    "year",
                    format!("year {year} does not follow {} (years must strictly increase)", prev.year),
                ));
            }
        }
        st.validate(CONSISTENCY_TOLERANCE)
            .map_err(|(col, msg)| validation_err(source, line, &col, msg))?;
        statements.push(st);
    }

    let mut warnings = Vec::new();
    if let Some(ev) = actual_enterprise_value {
        for (idx, st) in statements.iter().enumerate() {
            let earnings = st.net_income.map(|v| ("net income", v)).or(st.ebit.map(|v| ("EBIT", v)));
            if let Some((label, ni)) = earnings {
                if ni.amount().abs() > ev.amount() {
                    warnings.push(Warning {
                        source_name: source.to_string(),
                        line: Some(header_line + 1 + idx),
                        message: format!(
                            "{} {label} {} exceeds the actual enterprise value {}; check the declared unit",
                            st.year, ni, ev
                        ),
                    });
                }
            }
        }
    }
    if statements.is_empty() {
        warnings.push(Warning {
            source_name: source.to_string(),
            line: None,
            message: "file has no statement rows".to_string(),
        });
    }

    Ok((
        CompanyProfile {
            name,
            country,
            unit,
            statements,
            discount_inputs: None,
            terminal_growth: None,
            actual_enterprise_value,
            ranking_place: rank,
            note,
        },
        warnings,
    ))
}

/// Loads and validates one company file.
pub fn load_company(path: impl AsRef<Path>) -> Result<CompanyProfile> {
    load_company_with_warnings(path).map(|(p, _)| p)
}

pub fn load_company_with_warnings(path: impl AsRef<Path>) -> Result<(CompanyProfile, Vec<Warning>)> {
    let path = path.as_ref();
    parse_company(&read(path)?, &path.display().to_string())
}

fn finish_corpus(
    mut loaded: Vec<(CompanyProfile, Vec<Warning>)>,
    origin: &str,
) -> Result<(Vec<CompanyProfile>, Vec<Warning>)> {
    if loaded.is_empty() {
        return Err(ValuationError::EmptyCorpus(origin.to_string()));
    }
    let mut seen = HashSet::new();
    for (p, _) in &loaded {
        if !seen.insert(p.slug()) {
            return Err(ValuationError::DuplicateCompany(p.name.clone()));
        }
    }
    loaded.sort_by(|a, b| a.0.name.cmp(&b.0.name));
    let mut warnings = Vec::new();
    let profiles = loaded
        .into_iter()
        .map(|(p, w)| {
            warnings.extend(w);
            p
        })
        .collect();
    Ok((profiles, warnings))
}

/// Loads every `.csv` company file in `dir`, sorted by company name.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Vec<CompanyProfile>> {
    load_corpus_with_warnings(dir).map(|(p, _)| p)
}

pub fn load_corpus_with_warnings(
    dir: impl AsRef<Path>,
) -> Result<(Vec<CompanyProfile>, Vec<Warning>)> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| ValuationError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    paths.sort();
    let loaded = paths
        .iter()
        .map(load_company_with_warnings)
        .collect::<Result<Vec<_>>>()?;
    finish_corpus(loaded, &dir.display().to_string())
}

/// Parses the peer snapshot table (all money in millions of USD).
pub fn parse_snapshot(text: &str, source: &str) -> Result<Vec<CompanySnapshot>> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, SNAPSHOT_HEADER, source, 1)?;
    let unit = MoneyUnit::MillionsUsd;
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| parse_err(source, line, e.to_string()))?;
        let money = |col: usize, name: &str| -> Result<Money> {
            parse_decimal(&record[col])
                .map_err(|m| validation_err(source, line, name, m))?
                .map(|a| Money::new(a, unit))
                .ok_or_else(|| validation_err(source, line, name, "missing value"))
        };
        let users = |col: usize, name: &str| -> Result<f64> {
            parse_f64(&record[col])
                .map_err(|m| validation_err(source, line, name, m))?
                .ok_or_else(|| validation_err(source, line, name, "missing value"))
        };
        let rank = match record[8].trim() {
            "" => None,
            r => Some(r.parse::<u32>().map_err(|_| {
                validation_err(source, line, "rank", format!("`{r}` is not a positive integer"))
            })?),
        };
        let snap = CompanySnapshot {
            name: record[0].trim().to_string(),
            revenue: money(1, "revenue")?,
            ebit: money(2, "ebit")?,
            ebitda: money(3, "ebitda")?,
            ni: money(4, "ni")?,
            dau: users(5, "dau")?,
            mau: users(6, "mau")?,
            actual_ev: money(7, "actual_ev")?,
            rank,
        };
        snap.validate()
            .map_err(|e| validation_err(source, line, "actual_ev", e.to_string()))?;
        out.push(snap);
    }
    let mut seen = HashSet::new();
    for s in &out {
        if !seen.insert(slug(&s.name)) {
            return Err(ValuationError::DuplicateCompany(s.name.clone()));
        }
    }
    Ok(out)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Vec<CompanySnapshot>> {
    let path = path.as_ref();
    parse_snapshot(&read(path)?, &path.display().to_string())
}

/// Row of the discount-input table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountRow {
    pub inputs: DiscountInputs,
    pub terminal_growth: Option<f64>,
}

/// Parses the discount-input table keyed by company slug.
pub fn parse_discount_inputs(text: &str, source: &str) -> Result<BTreeMap<String, DiscountRow>> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, DISCOUNT_HEADER, source, 1)?;
    let cols = DISCOUNT_HEADER.split(',').collect::<Vec<_>>();
    let mut out = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2;
        let record = record.map_err(|e| parse_err(source, line, e.to_string()))?;
        let num = |col: usize| -> Result<f64> {
            parse_f64(&record[col])
                .map_err(|m| validation_err(source, line, cols[col], m))?
                .ok_or_else(|| validation_err(source, line, cols[col], "missing value"))
        };
        let inputs = DiscountInputs {
            risk_free_rate: num(1)?,
            market_risk_premium: num(2)?,
            beta: num(3)?,
            debt_rate: num(4)?,
            equity_weight: num(5)?,
            debt_weight: num(6)?,
            corporate_tax: num(7)?,
        };
        inputs
            .validate()
            .map_err(|e| validation_err(source, line, "company", e.to_string()))?;
        let terminal_growth =
            parse_f64(&record[8]).map_err(|m| validation_err(source, line, cols[8], m))?;
        let key = slug(&record[0]);
        if out
            .insert(key.clone(), DiscountRow { inputs, terminal_growth })
            .is_some()
        {
            return Err(ValuationError::DuplicateCompany(key));
        }
    }
    Ok(out)
}

/// Company corpus plus the cross-company tables.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub companies: Vec<CompanyProfile>,
    pub snapshot: Vec<CompanySnapshot>,
    pub warnings: Vec<Warning>,
}

impl Dataset {
    /// Loads `<root>/companies/*.csv`, plus `<root>/discount_inputs.csv` and
    /// `<root>/snapshot_2019.csv` when present.
    pub fn load(root: impl AsRef<Path>) -> Result<Dataset> {
        let root = root.as_ref();
        let (companies, warnings) = load_corpus_with_warnings(root.join(COMPANIES_DIR))?;
        let discount_path = root.join(DISCOUNT_FILE);
        let discounts = if discount_path.exists() {
            Some(parse_discount_inputs(
                &read(&discount_path)?,
                &discount_path.display().to_string(),
            )?)
        } else {
            None
        };
        let snapshot_path = root.join(SNAPSHOT_FILE);
        let snapshot = if snapshot_path.exists() {
            load_snapshot(&snapshot_path)?
        } else {
            Vec::new()
        };
        Dataset::assemble(companies, discounts, snapshot, warnings)
    }

    /// The six-company corpus compiled into the crate.
    pub fn bundled() -> Result<Dataset> {
        let loaded = bundled::COMPANIES
            .iter()
            .map(|(name, text)| parse_company(text, name))
            .collect::<Result<Vec<_>>>()?;
        let (companies, warnings) = finish_corpus(loaded, "bundled corpus")?;
        let discounts = parse_discount_inputs(bundled::DISCOUNT_INPUTS, DISCOUNT_FILE)?;
        let snapshot = parse_snapshot(bundled::SNAPSHOT, SNAPSHOT_FILE)?;
        Dataset::assemble(companies, Some(discounts), snapshot, warnings)
    }

    fn assemble(
        mut companies: Vec<CompanyProfile>,
        discounts: Option<BTreeMap<String, DiscountRow>>,
        snapshot: Vec<CompanySnapshot>,
        warnings: Vec<Warning>,
    ) -> Result<Dataset> {
        if let Some(discounts) = discounts {
            for (key, row) in discounts {
                let company = companies
                    .iter_mut()
                    .find(|c| c.slug() == key)
                    .ok_or_else(|| ValuationError::UnknownCompany(key.clone()))?;
                company.discount_inputs = Some(row.inputs);
                company.terminal_growth = row.terminal_growth;
            }
        }
        Ok(Dataset {
            companies,
            snapshot,
            warnings,
        })
    }

    pub fn company(&self, name: &str) -> Result<&CompanyProfile> {
        let key = slug(name);
        self.companies
            .iter()
            .find(|c| c.slug() == key)
            .ok_or_else(|| ValuationError::UnknownCompany(name.to_string()))
    }

    pub fn snapshot_for(&self, name: &str) -> Result<&CompanySnapshot> {
        let key = slug(name);
        self.snapshot
            .iter()
            .find(|s| slug(&s.name) == key)
            .ok_or_else(|| ValuationError::UnknownCompany(name.to_string()))
    }
}

/// Renders a profile back into the company file format.
pub fn write_company(profile: &CompanyProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#name: {}", profile.name);
    let _ = writeln!(out, "#country: {}", profile.country);
    let _ = writeln!(out, "#unit: {}", profile.unit);
    if let Some(ev) = profile.actual_enterprise_value {
        let _ = writeln!(out, "#actual_ev: {}", ev.amount());
    }
    if let Some(rank) = profile.ranking_place {
        let _ = writeln!(out, "#rank: {rank}");
    }
    if let Some(note) = &profile.note {
        let _ = writeln!(out, "#note: {note}");
    }
    out.push_str(COMPANY_HEADER);
    out.push('\n');
    for st in &profile.statements {
        let mut cells = vec![st.year.to_string()];
        for item in LineItem::ALL {
            cells.push(st.get(item).map(|m| m.amount().to_string()).unwrap_or_default());
        }
        for users in [st.dau, st.mau] {
            cells.push(users.map(|u| format!("{u:?}")).unwrap_or_default());
        }
        cells.push(st.forecast.to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
