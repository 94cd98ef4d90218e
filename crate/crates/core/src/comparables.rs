//! Peer-multiple (comparable company) valuation.
//!
//! Each company's multiples are `actual EV / metric` with the sign kept.
//! A target is valued with the mean of its peers' signed multiples (the
//! target itself is always excluded); the absolute value is taken only on
//! the final implied value.

use std::fmt;

use serde::Serialize;

use crate::dcf::deviation;
use crate::error::{Result, ValuationError};
use crate::model::{slug, Money, MoneyUnit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MultipleKind {
    #[serde(rename = "EV/EBIT")]
    EvEbit,
    #[serde(rename = "EV/EBITDA")]
    EvEbitda,
    #[serde(rename = "EV/R")]
    EvRevenue,
    #[serde(rename = "EV/DAU")]
    EvDau,
    #[serde(rename = "EV/MAU")]
    EvMau,
}

impl MultipleKind {
    pub const ALL: [MultipleKind; 5] = [
        MultipleKind::EvEbit,
        MultipleKind::EvEbitda,
        MultipleKind::EvRevenue,
        MultipleKind::EvDau,
        MultipleKind::EvMau,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MultipleKind::EvEbit => "EV/EBIT",
            MultipleKind::EvEbitda => "EV/EBITDA",
            MultipleKind::EvRevenue => "EV/R",
            MultipleKind::EvDau => "EV/DAU",
            MultipleKind::EvMau => "EV/MAU",
        }
    }

    /// Profit-based multiples may legitimately be negative.
    fn allows_negative_metric(self) -> bool {
        matches!(self, MultipleKind::EvEbit | MultipleKind::EvEbitda)
    }
}

impl fmt::Display for MultipleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One company's fiscal-year figures used for multiples. Money in millions
/// of USD, users in millions.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanySnapshot {
    pub name: String,
    pub revenue: Money,
    pub ebit: Money,
    pub ebitda: Money,
    pub ni: Money,
    pub dau: f64,
    pub mau: f64,
    pub actual_ev: Money,
    pub rank: Option<u32>,
}

impl CompanySnapshot {
    pub fn validate(&self) -> Result<()> {
        if self.actual_ev.is_negative() || self.actual_ev.is_zero() {
            return Err(ValuationError::invalid(format!(
                "{}: actual EV must be positive",
                self.name
            )));
        }
        if self.mau < self.dau {
            return Err(ValuationError::invalid(format!(
                "{}: mau ({}) is below dau ({})",
                self.name, self.mau, self.dau
            )));
        }
        Ok(())
    }

    /// The denominator of `kind`, in millions of USD or millions of users.
    pub fn metric(&self, kind: MultipleKind) -> f64 {
        match kind {
            MultipleKind::EvEbit => self.ebit.convert(MoneyUnit::MillionsUsd).to_f64(),
            MultipleKind::EvEbitda => self.ebitda.convert(MoneyUnit::MillionsUsd).to_f64(),
            MultipleKind::EvRevenue => self.revenue.convert(MoneyUnit::MillionsUsd).to_f64(),
            MultipleKind::EvDau => self.dau,
            MultipleKind::EvMau => self.mau,
        }
    }

    fn ev_millions(&self) -> f64 {
        self.actual_ev.convert(MoneyUnit::MillionsUsd).to_f64()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AccuracyBand {
    /// |deviation| <= 20%
    High,
    /// 20% < |deviation| <= 35%
    Medium,
    /// 35% < |deviation| <= 50%
    Low,
    /// |deviation| > 50%
    Rejected,
}

impl AccuracyBand {
    pub fn label(self) -> &'static str {
        match self {
            AccuracyBand::High => "high",
            AccuracyBand::Medium => "medium",
            AccuracyBand::Low => "low",
            AccuracyBand::Rejected => "rejected",
        }
    }
}

/// Bands by absolute deviation; each boundary belongs to the better band.
pub fn classify(dev: f64) -> AccuracyBand {
    let d = dev.abs();
    if d <= 0.20 {
        AccuracyBand::High
    } else if d <= 0.35 {
        AccuracyBand::Medium
    } else if d <= 0.50 {
        AccuracyBand::Low
    } else {
        AccuracyBand::Rejected
    }
}

/// `actual EV / metric`, sign preserved.
pub fn multiple(snapshot: &CompanySnapshot, kind: MultipleKind) -> Result<f64> {
    let metric = snapshot.metric(kind);
    if !metric.is_finite() {
        return Err(ValuationError::NonFinite(format!("{} {kind} metric", snapshot.name)));
    }
    if metric == 0.0 {
        return Err(ValuationError::ZeroDenominator(format!(
            "{} has zero {kind} denominator",
            snapshot.name
        )));
    }
    if metric < 0.0 && !kind.allows_negative_metric() {
        return Err(ValuationError::invalid(format!(
            "{} has a negative {kind} denominator",
            snapshot.name
        )));
    }
    Ok(snapshot.ev_millions() / metric)
}

/// Optional peer restriction. The default keeps every peer.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PeerFilter {
    /// Keep peers whose ranking place is within this distance of the
    /// target's. Unranked companies are dropped when this is set.
    pub max_rank_distance: Option<u32>,
}

impl PeerFilter {
    fn admits(&self, target: &CompanySnapshot, peer: &CompanySnapshot) -> bool {
        match self.max_rank_distance {
            None => true,
            Some(max) => match (target.rank, peer.rank) {
                (Some(t), Some(p)) => t.abs_diff(p) <= max,
                _ => false,
            },
        }
    }
}

/// Peers of `target`: everything in `peers` except the target, by name.
pub fn select_peers<'a>(
    target: &str,
    peers: &'a [CompanySnapshot],
) -> Vec<&'a CompanySnapshot> {
    let key = slug(target);
    peers.iter().filter(|p| slug(&p.name) != key).collect()
}

fn filtered_peers<'a>(
    target: &CompanySnapshot,
    peers: &'a [CompanySnapshot],
    filter: &PeerFilter,
) -> Result<Vec<&'a CompanySnapshot>> {
    let chosen: Vec<_> = select_peers(&target.name, peers)
        .into_iter()
        .filter(|p| filter.admits(target, p))
        .collect();
    if chosen.is_empty() {
        return Err(ValuationError::NoPeers(target.name.clone()));
    }
    Ok(chosen)
}

/// Mean of the signed multiples of every company except `target`.
pub fn peer_average(target: &str, peers: &[CompanySnapshot], kind: MultipleKind) -> Result<f64> {
    let chosen = select_peers(target, peers);
    mean_multiple(target, &chosen, kind)
}

fn mean_multiple(target: &str, chosen: &[&CompanySnapshot], kind: MultipleKind) -> Result<f64> {
    if chosen.is_empty() {
        return Err(ValuationError::NoPeers(target.to_string()));
    }
    let sum = chosen
        .iter()
        .map(|p| multiple(p, kind))
        .sum::<Result<f64>>()?;
    Ok(sum / chosen.len() as f64)
}

pub fn peer_average_filtered(
    target: &CompanySnapshot,
    peers: &[CompanySnapshot],
    kind: MultipleKind,
    filter: &PeerFilter,
) -> Result<f64> {
    let chosen = filtered_peers(target, peers, filter)?;
    mean_multiple(&target.name, &chosen, kind)
}

/// `|peer average × target metric|`, in millions of USD.
pub fn implied_value(
    target: &CompanySnapshot,
    peers: &[CompanySnapshot],
    kind: MultipleKind,
) -> Result<Money> {
    implied_value_filtered(target, peers, kind, &PeerFilter::default())
}

pub fn implied_value_filtered(
    target: &CompanySnapshot,
    peers: &[CompanySnapshot],
    kind: MultipleKind,
    filter: &PeerFilter,
) -> Result<Money> {
    let avg = peer_average_filtered(target, peers, kind, filter)?;
    let metric = target.metric(kind);
    if !metric.is_finite() {
        return Err(ValuationError::NonFinite(format!("{} {kind} metric", target.name)));
    }
    Money::from_f64((avg * metric).abs(), MoneyUnit::MillionsUsd)
}

/// Mean of the implied values over all five multiples.
pub fn average_implied_value(target: &CompanySnapshot, peers: &[CompanySnapshot]) -> Result<Money> {
    average_implied_value_filtered(target, peers, &PeerFilter::default())
}

pub fn average_implied_value_filtered(
    target: &CompanySnapshot,
    peers: &[CompanySnapshot],
    filter: &PeerFilter,
) -> Result<Money> {
    let values = MultipleKind::ALL
        .iter()
        .map(|k| implied_value_filtered(target, peers, *k, filter))
        .collect::<Result<Vec<_>>>()?;
    let total = Money::sum(&values)?;
    total.scale(1.0 / values.len() as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipleRow {
    pub kind: MultipleKind,
    pub own_multiple: f64,
    pub peer_average: f64,
    pub implied_value: f64,
    pub deviation: f64,
    pub band: AccuracyBand,
}

/// Multiples valuation of one target against its peers.
#[derive(Debug, Clone, Serialize)]
pub struct TargetValuation {
    pub company: String,
    pub actual_value: f64,
    pub peers: Vec<String>,
    pub rows: Vec<MultipleRow>,
    pub average_value: f64,
    pub average_deviation: f64,
    pub average_band: AccuracyBand,
}

pub fn value_target(
    target: &CompanySnapshot,
    peers: &[CompanySnapshot],
    filter: &PeerFilter,
) -> Result<TargetValuation> {
    let chosen = filtered_peers(target, peers, filter)?;
    let actual = target.actual_ev.convert(MoneyUnit::MillionsUsd);
    let rows = MultipleKind::ALL
        .iter()
        .map(|&kind| {
            let implied = implied_value_filtered(target, peers, kind, filter)?;
            let dev = deviation(implied, actual)?;
            Ok(MultipleRow {
                kind,
                own_multiple: multiple(target, kind)?,
                peer_average: peer_average_filtered(target, peers, kind, filter)?,
                implied_value: implied.to_f64(),
                deviation: dev,
                band: classify(dev),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let avg = average_implied_value_filtered(target, peers, filter)?;
    let avg_dev = deviation(avg, actual)?;
    Ok(TargetValuation {
        company: target.name.clone(),
        actual_value: actual.to_f64(),
        peers: chosen.iter().map(|p| p.name.clone()).collect(),
        rows,
        average_value: avg.to_f64(),
        average_deviation: avg_dev,
        average_band: classify(avg_dev),
    })
}
