//! Recomputes the reference tables from a dataset and compares every cell
//! with its published value.

use serde::Serialize;

use crate::comparables::{
    average_implied_value, implied_value, multiple, peer_average, MultipleKind,
};
use crate::dcf::{cost_of_equity, statement_fcff, value_company, wacc};
use crate::error::{Result, ValuationError};
use crate::ingest::Dataset;
use crate::model::MoneyUnit;
use crate::reference as r;

pub const TABLES: [u32; 7] = [2, 3, 4, 5, 6, 7, 18];

/// How a cell's value is meant to be displayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellFormat {
    Percent,
    Ratio,
    Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tolerance {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub row: String,
    pub column: String,
    pub computed: f64,
    pub published: f64,
    /// `computed - published`, or `computed / published - 1` for relative
    /// tolerances.
    pub delta: f64,
    pub tolerance: f64,
    pub tolerance_kind: Tolerance,
    pub format: CellFormat,
    /// Monetary unit for [`CellFormat::Money`] cells.
    pub unit: Option<MoneyUnit>,
    pub sign_checked: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub table: String,
    pub title: String,
    pub cells: Vec<CellCheck>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| !c.passed)
    }
}

struct Cell<'a> {
    row: &'a str,
    column: &'a str,
    computed: f64,
    published: f64,
    format: CellFormat,
    unit: Option<MoneyUnit>,
}

impl Cell<'_> {
    fn check(self, tolerance: f64, kind: Tolerance, sign: bool) -> CellCheck {
        let delta = match kind {
            Tolerance::Absolute => self.computed - self.published,
            Tolerance::Relative => self.computed / self.published - 1.0,
        };
        let within = delta.is_finite() && delta.abs() <= tolerance + 1e-12;
        let sign_ok = !sign || self.computed.signum() == self.published.signum();
        CellCheck {
            row: self.row.to_string(),
            column: self.column.to_string(),
            computed: self.computed,
            published: self.published,
            delta,
            tolerance,
            tolerance_kind: kind,
            format: self.format,
            unit: self.unit,
            sign_checked: sign,
            passed: within && sign_ok,
        }
    }
}

fn cell<'a>(row: &'a str, column: &'a str, computed: f64, published: f64, format: CellFormat) -> Cell<'a> {
    Cell {
        row,
        column,
        computed,
        published,
        format,
        unit: (format == CellFormat::Money).then_some(MoneyUnit::MillionsUsd),
    }
}

fn wacc_table(data: &Dataset) -> Result<Vec<CellCheck>> {
    let mut cells = Vec::new();
    for (i, name) in r::DCF_COMPANIES.iter().enumerate() {
        let profile = data.company(name)?;
        let inputs = profile.discount_inputs.ok_or_else(|| ValuationError::Refused {
            company: profile.name.clone(),
            reason: "no discount inputs".into(),
        })?;
        cells.push(
            cell("Re", name, cost_of_equity(&inputs), r::COST_OF_EQUITY[i], CellFormat::Percent)
                .check(0.0005, Tolerance::Absolute, false),
        );
        cells.push(
            cell("WACC", name, wacc(&inputs)?, r::WACC[i], CellFormat::Percent)
                .check(0.001, Tolerance::Absolute, false),
        );
    }
    Ok(cells)
}

fn dcf_table(data: &Dataset, deviations: bool) -> Result<Vec<CellCheck>> {
    let mut cells = Vec::new();
    for (i, name) in r::DCF_COMPANIES.iter().enumerate() {
        let v = value_company(data.company(name)?)?;
        if deviations {
            let actual = v.actual_value_millions.unwrap_or(r::DCF_ACTUAL[i]);
            let dev = v.enterprise_value_millions / actual - 1.0;
            cells.push(
                cell("Deviation", name, dev, r::DCF_DEVIATION[i], CellFormat::Percent)
                    .check(0.01, Tolerance::Absolute, false),
            );
        } else {
            cells.push(
                cell(
                    "Company value",
                    name,
                    v.enterprise_value_millions,
                    r::DCF_VALUE[i],
                    CellFormat::Money,
                )
                .check(0.02, Tolerance::Relative, false),
            );
        }
    }
    Ok(cells)
}

fn multiples_grid(
    published: &[[f64; 6]],
    format: CellFormat,
    tolerance: f64,
    kind: Tolerance,
    sign: bool,
    compute: impl Fn(usize, &str) -> Result<f64>,
) -> Result<Vec<CellCheck>> {
    let mut cells = Vec::new();
    for (row, values) in published.iter().enumerate() {
        for (col, name) in r::MULTIPLES_COMPANIES.iter().enumerate() {
            let computed = compute(row, name)?;
            cells.push(
                cell(r::MULTIPLE_ROW_LABELS[row], name, computed, values[col], format)
                    .check(tolerance, kind, sign),
            );
        }
    }
    Ok(cells)
}

fn implied(data: &Dataset, row: usize, name: &str) -> Result<f64> {
    let target = data.snapshot_for(name)?;
    let value = if row < MultipleKind::ALL.len() {
        implied_value(target, &data.snapshot, MultipleKind::ALL[row])?
    } else {
        average_implied_value(target, &data.snapshot)?
    };
    Ok(value.to_f64())
}

/// Reproduction report for one published table.
pub fn table(number: u32, data: &Dataset) -> Result<TableReport> {
    let (title, cells) = match number {
        2 => ("Cost of equity and WACC", wacc_table(data)?),
        3 => ("Enterprise value by discounted FCFF, millions of USD", dcf_table(data, false)?),
        4 => ("Deviation of discounted FCFF value from actual", dcf_table(data, true)?),
        5 => (
            "Own multiples",
            multiples_grid(&r::OWN_MULTIPLES, CellFormat::Ratio, 0.01, Tolerance::Absolute, false, |row, name| {
                multiple(data.snapshot_for(name)?, MultipleKind::ALL[row])
            })?,
        ),
        18 => (
            "Peer-average multiples",
            multiples_grid(&r::PEER_AVERAGES, CellFormat::Ratio, 0.02, Tolerance::Absolute, false, |row, name| {
                peer_average(name, &data.snapshot, MultipleKind::ALL[row])
            })?,
        ),
        6 => (
            "Implied values from peer-average multiples, millions of USD",
            multiples_grid(&r::IMPLIED_VALUES, CellFormat::Money, 0.005, Tolerance::Relative, false, |row, name| {
                implied(data, row, name)
            })?,
        ),
        7 => (
            "Deviation of implied values from actual",
            multiples_grid(&r::MULTIPLE_DEVIATIONS, CellFormat::Percent, 0.01, Tolerance::Absolute, true, |row, name| {
                let target = data.snapshot_for(name)?;
                let actual = target.actual_ev.convert(MoneyUnit::MillionsUsd).to_f64();
                Ok(implied(data, row, name)? / actual - 1.0)
            })?,
        ),
        other => return Err(ValuationError::UnknownTable(other)),
    };
    Ok(TableReport {
        table: number.to_string(),
        title: title.to_string(),
        cells,
    })
}

/// Every reference table, in [`TABLES`] order.
pub fn all_tables(data: &Dataset) -> Result<Vec<TableReport>> {
    TABLES.iter().map(|&n| table(n, data)).collect()
}

/// FCFF recomputed from each forecast row's components against the printed
/// FCFF, within two units of the file's unit.
pub fn fcff_construction(data: &Dataset) -> Result<TableReport> {
    let mut cells = Vec::new();
    for (name, printed) in r::PRINTED_FCFF.iter() {
        let profile = data.company(name)?;
        let rows: Vec<_> = profile.forecast_rows().collect();
        if rows.len() != printed.len() {
            return Err(ValuationError::invalid(format!(
                "{name}: {} forecast rows, expected {}",
                rows.len(),
                printed.len()
            )));
        }
        for (st, &published) in rows.iter().zip(printed.iter()) {
            let year = st.year.to_string();
            let computed = statement_fcff(st)?.to_f64();
            let mut c = cell("FCFF", name, computed, published, CellFormat::Money);
            c.unit = Some(profile.unit);
            let mut check = c.check(2.0, Tolerance::Absolute, false);
            check.row = format!("FCFF {year}");
            cells.push(check);
        }
    }
    Ok(TableReport {
        table: "fcff".into(),
        title: "FCFF rebuilt from forecast components".into(),
        cells,
    })
}
