mod render;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use valuation_core::comparables::{value_target, PeerFilter, TargetValuation};
use valuation_core::dcf::{value_company, CompanyValuation};
use valuation_core::forecast::{parse_assignments, project_statement, statutory_tax_rate};
use valuation_core::ingest::Dataset;
use valuation_core::model::{slug, LineItem};
use valuation_core::realoptions::{
    binomial_call, black_scholes_call, datar_mathews, datar_mathews_with_workers,
    fuzzy::fuzzy_payoff, OptionSpec, ScenarioSet, TriangularFuzzyNumber,
};
use valuation_core::reproduce::{self, CellCheck, CellFormat, TableReport, Tolerance};
use valuation_core::FinancialStatement;

use render::Table;

#[derive(Parser)]
#[command(
    name = "valuation",
    version,
    about = "Company valuation by discounted cash flow, peer multiples and real options"
)]
struct Cli {
    /// Data directory (companies/, discount_inputs.csv, snapshot_2019.csv).
    /// Defaults to the bundled corpus.
    #[arg(long, global = true)]
    data: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Monte Carlo seed. Overrides the scenario file; the file's own
    /// default is 42.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Discounted FCFF valuation of one company.
    Dcf {
        #[arg(long)]
        company: String,
    },
    /// Peer-multiple valuation.
    Multiples {
        #[arg(long, required_unless_present = "all", conflicts_with = "all")]
        target: Option<String>,
        /// Value every company in the snapshot.
        #[arg(long)]
        all: bool,
        /// Restrict the peer set (comma separated).
        #[arg(long, value_delimiter = ',')]
        peers: Vec<String>,
        /// Keep peers within this many ranking places of the target.
        #[arg(long)]
        max_rank_distance: Option<u32>,
    },
    /// Price a call or real option.
    Option {
        #[command(subcommand)]
        model: OptionModel,
    },
    /// Extrapolate a company's statements over a horizon.
    Forecast {
        #[arg(long)]
        company: String,
        /// Method file with `item = method[:parameter]` lines.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        horizon: usize,
        /// Use the published forecast rows as history too.
        #[arg(long)]
        include_forecast: bool,
        /// Tax rate; defaults to the statutory rate of the company's country.
        #[arg(long)]
        tax_rate: Option<f64>,
    },
    /// Recompute a published table and compare every cell.
    Reproduce {
        /// One of 2, 3, 4, 5, 6, 7, 18.
        table: u32,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, allow_negative_numbers = true)]
    spot: f64,
    #[arg(long, allow_negative_numbers = true)]
    strike: f64,
    #[arg(long, allow_negative_numbers = true)]
    rate: f64,
    /// Years to expiry.
    #[arg(long, allow_negative_numbers = true)]
    time: f64,
    #[arg(long, allow_negative_numbers = true)]
    vol: f64,
}

impl SpecArgs {
    fn spec(&self) -> OptionSpec {
        OptionSpec {
            spot: self.spot,
            strike: self.strike,
            risk_free: self.rate,
            time_to_expiry: self.time,
            volatility: self.vol,
        }
    }
}

#[derive(Subcommand)]
enum OptionModel {
    /// Black-Scholes European call.
    Bs(SpecArgs),
    /// CRR binomial lattice, European call.
    Binomial {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Datar-Mathews Monte Carlo from a scenario file (TOML).
    Dm {
        #[arg(long)]
        config: PathBuf,
        /// Override the number of paths.
        #[arg(long)]
        paths: Option<u64>,
        /// Worker threads; the result does not depend on this.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fuzzy pay-off method on a triangular NPV.
    Fuzzy {
        #[arg(long, allow_negative_numbers = true)]
        peak: f64,
        #[arg(long, allow_negative_numbers = true)]
        left: f64,
        #[arg(long, allow_negative_numbers = true)]
        right: f64,
    },
}

enum Outcome {
    Success,
    OutOfTolerance,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::OutOfTolerance) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli) -> Result<Dataset> {
    match &cli.data {
        Some(dir) => Dataset::load(dir).with_context(|| format!("loading {}", dir.display())),
        None => Ok(Dataset::bundled()?),
    }
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T) -> String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Table => print!("{}", text(value)),
    }
    Ok(())
}

fn warn_for(data: &Dataset, company: &str) {
    let key = slug(company);
    for w in data.warnings.iter().filter(|w| w.source_name.contains(&key)) {
        eprintln!("warning: {w}");
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Dcf { company } => {
            let data = load(cli)?;
            let profile = data.company(company)?;
            warn_for(&data, &profile.name);
            let v = value_company(profile)?;
            emit(cli.format, &v, dcf_text)?;
        }
        Command::Multiples {
            target,
            all,
            peers,
            max_rank_distance,
        } => {
            let data = load(cli)?;
            let filter = PeerFilter {
                max_rank_distance: *max_rank_distance,
            };
            if *all {
                let mut names: Vec<String> = data.snapshot.iter().map(|s| s.name.clone()).collect();
                names.sort();
                let rows = names
                    .iter()
                    .map(|n| multiples_for(&data, n, peers, &filter))
                    .collect::<Result<Vec<_>>>()?;
                emit(cli.format, &rows, |r| grid_text(r))?;
            } else {
                let name = target.as_deref().expect("clap requires --target or --all");
                let v = multiples_for(&data, name, peers, &filter)?;
                emit(cli.format, &v, target_text)?;
            }
        }
        Command::Option { model } => run_option(cli, model)?,
        Command::Forecast {
            company,
            config,
            horizon,
            include_forecast,
            tax_rate,
        } => {
            let data = load(cli)?;
            let profile = data.company(company)?;
            let text = std::fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let methods = parse_assignments(&text)?;
            let rate = match tax_rate {
                Some(r) => *r,
                None => statutory_tax_rate(&profile.country).with_context(|| {
                    format!("no statutory tax rate for {}; pass --tax-rate", profile.country)
                })?,
            };
            let history: Vec<FinancialStatement> = profile
                .statements
                .iter()
                .filter(|s| *include_forecast || !s.forecast)
                .cloned()
                .collect();
            let projected = project_statement(&history, &methods, *horizon, rate)?;
            let report = ForecastReport {
                company: profile.name.clone(),
                unit: profile.unit.to_string(),
                tax_rate: rate,
                rows: projected.iter().map(ProjectedRow::from).collect(),
            };
            emit(cli.format, &report, forecast_text)?;
        }
        Command::Reproduce { table } => {
            let data = load(cli)?;
            let report = reproduce::table(*table, &data)?;
            emit(cli.format, &report, reproduce_text)?;
            if !report.passed() {
                return Ok(Outcome::OutOfTolerance);
            }
        }
    }
    Ok(Outcome::Success)
}

fn multiples_for(
    data: &Dataset,
    target: &str,
    peers: &[String],
    filter: &PeerFilter,
) -> Result<TargetValuation> {
    let snapshot = data.snapshot_for(target)?;
    if peers.is_empty() {
        return Ok(value_target(snapshot, &data.snapshot, filter)?);
    }
    let chosen = peers
        .iter()
        .map(|p| data.snapshot_for(p).cloned())
        .collect::<valuation_core::Result<Vec<_>>>()?;
    Ok(value_target(snapshot, &chosen, filter)?)
}

#[derive(Serialize)]
struct PriceReport {
    model: &'static str,
    #[serde(flatten)]
    spec: OptionSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    price: f64,
}

#[derive(Serialize)]
struct MonteCarloReport {
    model: &'static str,
    value: f64,
    std_error: f64,
    paths: u64,
    seed: u64,
}

#[derive(Serialize)]
struct FuzzyReport {
    model: &'static str,
    peak: f64,
    left_spread: f64,
    right_spread: f64,
    positive_area_ratio: f64,
    positive_mean: f64,
    value: f64,
}

fn run_option(cli: &Cli, model: &OptionModel) -> Result<()> {
    match model {
        OptionModel::Bs(args) => {
            let spec = args.spec();
            let r = PriceReport {
                model: "black-scholes",
                price: black_scholes_call(&spec)?,
                spec,
                steps: None,
            };
            emit(cli.format, &r, price_text)
        }
        OptionModel::Binomial { spec, steps } => {
            let spec = spec.spec();
            let r = PriceReport {
                model: "binomial",
                price: binomial_call(&spec, *steps)?,
                spec,
                steps: Some(*steps),
            };
            emit(cli.format, &r, price_text)
        }
        OptionModel::Dm {
            config,
            paths,
            workers,
        } => {
            let text = std::fs::read_to_string(config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut s = ScenarioSet::from_toml(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            if let Some(p) = paths {
                s.paths = *p;
            }
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            let e = match workers {
                Some(w) => datar_mathews_with_workers(&s, *w)?,
                None => datar_mathews(&s)?,
            };
            let r = MonteCarloReport {
                model: "datar-mathews",
                value: e.value,
                std_error: e.std_error,
                paths: e.paths,
                seed: e.seed,
            };
            emit(cli.format, &r, |r| {
                format!(
                    "Datar-Mathews real option value\nvalue           {}\nstandard error  {}\npaths           {}\nseed            {}\n",
                    render::price(r.value),
                    render::price(r.std_error),
                    r.paths,
                    r.seed
                )
            })
        }
        OptionModel::Fuzzy { peak, left, right } => {
            let t = TriangularFuzzyNumber::new(*peak, *left, *right)?;
            let p = fuzzy_payoff(&t)?;
            let r = FuzzyReport {
                model: "fuzzy-payoff",
                peak: t.peak,
                left_spread: t.left_spread,
                right_spread: t.right_spread,
                positive_area_ratio: p.positive_area_ratio,
                positive_mean: p.positive_mean,
                value: p.value,
            };
            emit(cli.format, &r, |r| {
                format!(
                    "Fuzzy pay-off real option value\npositive area ratio  {}\npositive mean        {}\nvalue                {}\n",
                    render::price(r.positive_area_ratio),
                    render::price(r.positive_mean),
                    render::price(r.value)
                )
            })
        }
    }
}

fn price_text(r: &PriceReport) -> String {
    let mut out = String::new();
    let title = match r.steps {
        Some(n) => format!("Binomial call price ({n} steps)"),
        None => "Black-Scholes call price".to_string(),
    };
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "spot {}  strike {}  rate {}  time {}  vol {}",
        r.spec.spot, r.spec.strike, r.spec.risk_free, r.spec.time_to_expiry, r.spec.volatility
    );
    let _ = writeln!(out, "price {}", render::price(r.price));
    out
}

fn dcf_text(v: &CompanyValuation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} ({})", v.company, v.unit);
    let _ = writeln!(
        out,
        "cost of equity {}  WACC {}  terminal growth {}",
        render::pct(v.cost_of_equity),
        render::pct(v.wacc),
        render::pct(v.terminal_growth)
    );
    let _ = writeln!(out);
    let mut t = Table::new(["year", "FCFF", "discounted FCFF", "unit"]);
    for ((y, f), d) in v.years.iter().zip(&v.fcff).zip(&v.discounted_fcff) {
        t.row([y.to_string(), render::money(*f), render::money(*d), v.unit.clone()]);
    }
    t.row([
        "post-forecast".to_string(),
        render::money(v.post_forecast_fcff),
        String::new(),
        v.unit.clone(),
    ]);
    out.push_str(&t.render());
    let _ = writeln!(out);
    let mut s = Table::new(["item", "value", "unit"]);
    s.row(["terminal value".into(), render::money(v.terminal_value), v.unit.clone()]);
    s.row([
        "discounted terminal value".into(),
        render::money(v.discounted_terminal),
        v.unit.clone(),
    ]);
    s.row(["enterprise value".into(), render::money(v.enterprise_value), v.unit.clone()]);
    if v.unit != "millions-USD" {
        s.row([
            "enterprise value".to_string(),
            render::money(v.enterprise_value_millions),
            "millions-USD".to_string(),
        ]);
    }
    if let Some(a) = v.actual_value_millions {
        s.row(["actual value".to_string(), render::money(a), "millions-USD".to_string()]);
    }
    if let Some(d) = v.deviation {
        s.row(["deviation".to_string(), render::pct(d), String::new()]);
    }
    out.push_str(&s.render());
    out
}

fn target_text(v: &TargetValuation) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: actual value {} (millions-USD)",
        v.company,
        render::money(v.actual_value)
    );
    let _ = writeln!(out, "peers: {}", v.peers.join(", "));
    let _ = writeln!(out);
    let mut t = Table::new(["multiple", "own", "peer average", "implied value", "deviation", "band"]);
    for r in &v.rows {
        t.row([
            r.kind.label().to_string(),
            render::ratio(r.own_multiple),
            render::ratio(r.peer_average),
            render::money(r.implied_value),
            render::pct(r.deviation),
            r.band.label().to_string(),
        ]);
    }
    t.row([
        "Average".to_string(),
        String::new(),
        String::new(),
        render::money(v.average_value),
        render::pct(v.average_deviation),
        v.average_band.label().to_string(),
    ]);
    out.push_str(&t.render());
    out
}

fn grid_text(all: &[TargetValuation]) -> String {
    let mut out = String::new();
    let headers = std::iter::once("multiple".to_string()).chain(all.iter().map(|v| v.company.clone()));
    let labels: Vec<&str> = all
        .first()
        .map(|v| v.rows.iter().map(|r| r.kind.label()).collect())
        .unwrap_or_default();

    let _ = writeln!(out, "Implied values (millions-USD)");
    let mut t = Table::new(headers.clone());
    for (i, label) in labels.iter().enumerate() {
        t.row(std::iter::once(label.to_string()).chain(all.iter().map(|v| render::money(v.rows[i].implied_value))));
    }
    t.row(std::iter::once("Average".to_string()).chain(all.iter().map(|v| render::money(v.average_value))));
    out.push_str(&t.render());

    let _ = writeln!(out);
    let _ = writeln!(out, "Deviation from actual value");
    let mut t = Table::new(headers);
    t.row(std::iter::once("Actual value".to_string()).chain(all.iter().map(|v| render::money(v.actual_value))));
    for (i, label) in labels.iter().enumerate() {
        t.row(std::iter::once(label.to_string()).chain(all.iter().map(|v| {
            let r = &v.rows[i];
            format!("{} {}", render::pct(r.deviation), r.band.label())
        })));
    }
    t.row(std::iter::once("Average".to_string()).chain(
        all.iter()
            .map(|v| format!("{} {}", render::pct(v.average_deviation), v.average_band.label())),
    ));
    out.push_str(&t.render());
    out
}

#[derive(Serialize)]
struct ProjectedRow {
    year: i32,
    values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mau: Option<f64>,
}

impl From<&FinancialStatement> for ProjectedRow {
    fn from(st: &FinancialStatement) -> Self {
        ProjectedRow {
            year: st.year,
            values: LineItem::ALL
                .iter()
                .filter_map(|&li| st.get(li).map(|m| (li.column().to_string(), m.to_f64())))
                .collect(),
            dau: st.dau,
            mau: st.mau,
        }
    }
}

#[derive(Serialize)]
struct ForecastReport {
    company: String,
    unit: String,
    tax_rate: f64,
    rows: Vec<ProjectedRow>,
}

fn forecast_text(r: &ForecastReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} projection ({}), tax rate {}", r.company, r.unit, render::pct(r.tax_rate));
    let mut t = Table::new(std::iter::once("item".to_string()).chain(r.rows.iter().map(|x| x.year.to_string())));
    for li in LineItem::ALL {
        let col = li.column();
        if r.rows.iter().any(|x| x.values.contains_key(col)) {
            t.row(std::iter::once(col.to_string()).chain(
                r.rows
                    .iter()
                    .map(|x| x.values.get(col).map(|v| render::money(*v)).unwrap_or_default()),
            ));
        }
    }
    for (name, get) in [
        ("dau", (|x: &ProjectedRow| x.dau) as fn(&ProjectedRow) -> Option<f64>),
        ("mau", |x: &ProjectedRow| x.mau),
    ] {
        if r.rows.iter().any(|x| get(x).is_some()) {
            t.row(std::iter::once(name.to_string()).chain(
                r.rows.iter().map(|x| get(x).map(|v| format!("{v:.1}")).unwrap_or_default()),
            ));
        }
    }
    out.push_str(&t.render());
    out
}

fn cell_value(c: &CellCheck, v: f64) -> String {
    match c.format {
        CellFormat::Percent => render::pct(v),
        CellFormat::Ratio => render::ratio(v),
        CellFormat::Money => render::money(v),
    }
}

fn cell_delta(c: &CellCheck, v: f64) -> String {
    match (c.tolerance_kind, c.format) {
        (Tolerance::Relative, _) => format!("{:.2}%", v * 100.0),
        (Tolerance::Absolute, CellFormat::Percent) => format!("{:.2} pp", v * 100.0),
        (Tolerance::Absolute, CellFormat::Ratio) => format!("{v:.3}"),
        (Tolerance::Absolute, CellFormat::Money) => format!("{v:.1}"),
    }
}

fn reproduce_text(r: &TableReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Table {}: {}", r.table, r.title);
    let mut t = Table::new([
        "row", "column", "computed", "published", "unit", "delta", "tolerance", "status",
    ]);
    for c in &r.cells {
        let sign = if c.sign_checked { " +sign" } else { "" };
        t.row([
            c.row.clone(),
            c.column.clone(),
            cell_value(c, c.computed),
            cell_value(c, c.published),
            c.unit.map(|u| u.to_string()).unwrap_or_default(),
            cell_delta(c, c.delta),
            format!("±{}{sign}", cell_delta(c, c.tolerance)),
            if c.passed { "ok" } else { "FAIL" }.to_string(),
        ]);
    }
    out.push_str(&t.render());
    let passed = r.cells.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} cells within tolerance", r.cells.len());
    out
}
