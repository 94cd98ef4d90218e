use valuation_core::comparables::{
    average_implied_value, classify, select_peers, value_target, AccuracyBand, PeerFilter,
};
use valuation_core::ingest::Dataset;
use valuation_core::reproduce::{self, TABLES};
use valuation_core::ValuationError;

#[test]
fn twitter_average_implied_value() {
    let data = Dataset::bundled().unwrap();
    let tw = data.snapshot_for("twitter").unwrap();
    let v = average_implied_value(tw, &data.snapshot).unwrap().to_f64();
    assert!((v / 20_780.0 - 1.0).abs() < 0.005, "{v}");
    let report = value_target(tw, &data.snapshot, &PeerFilter::default()).unwrap();
    assert_eq!(report.peers.len(), 5);
    assert_eq!(classify(report.average_deviation), AccuracyBand::High);
}

#[test]
fn target_never_among_its_peers() {
    let data = Dataset::bundled().unwrap();
    for s in &data.snapshot {
        let peers = select_peers(&s.name, &data.snapshot);
        assert_eq!(peers.len(), data.snapshot.len() - 1);
        assert!(peers.iter().all(|p| p.name != s.name));
    }
}

#[test]
fn rank_filter_drops_distant_and_unranked_peers() {
    let data = Dataset::bundled().unwrap();
    let tw = data.snapshot_for("twitter").unwrap();
    let filter = PeerFilter {
        max_rank_distance: Some(1),
    };
    let report = value_target(tw, &data.snapshot, &filter).unwrap();
    assert_eq!(report.peers, ["Pinterest", "Snapchat"]);
    let fb = data.snapshot_for("facebook").unwrap();
    assert!(matches!(
        value_target(fb, &data.snapshot, &filter),
        Err(ValuationError::NoPeers(_))
    ));
}

#[test]
fn every_reference_table_is_computable() {
    let data = Dataset::bundled().unwrap();
    for n in TABLES {
        let report = reproduce::table(n, &data).unwrap();
        assert!(!report.cells.is_empty());
        assert!(report.cells.iter().all(|c| c.computed.is_finite()));
    }
    assert!(matches!(
        reproduce::table(99, &data),
        Err(ValuationError::UnknownTable(99))
    ));
}

#[test]
fn wacc_table_reproduces() {
    let data = Dataset::bundled().unwrap();
    assert!(reproduce::table(2, &data).unwrap().passed());
}
