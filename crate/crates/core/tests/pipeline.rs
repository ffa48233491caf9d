use std::path::{Path, PathBuf};

use approx::assert_abs_diff_eq;
use chrono::NaiveDate;
use nalgebra::DMatrix;

use ratespread::covariance::{corr_matrix, CorrelationMatrix, WeightScheme};
use ratespread::curve_factors::{factor_series, CurveObservation};
use ratespread::data_io::{load_spreads, load_synth_config, load_yields, render_yields};
use ratespread::sector_model::{generate_market, SynthConfig};
use ratespread::workflow::{estimate_sectors, market_changes};
use ratespread::Error;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn sample_files_estimate_end_to_end() {
    let curve = load_yields(&data("sample_yields.csv")).unwrap();
    let spreads = load_spreads(&data("sample_spreads.csv")).unwrap();
    let changes = market_changes(&curve, &spreads).unwrap();
    assert_eq!(changes.dropped, 0);
    assert_eq!(changes.series.n_periods(), curve.len() - 1);
    assert_eq!(
        changes.series.labels(),
        ["shift", "twist", "banking:A", "utilities:BBB"]
    );

    let est = estimate_sectors(&changes.series, WeightScheme::long_term()).unwrap();
    assert_eq!(est.stats.len(), 2);
    assert!(est.corr.is_psd());
    assert!(!est.corr.short_sample());
    for s in est.stats.iter() {
        assert!(s.rho_shift < 0.0, "{s:?}");
    }

    // shift column agrees with direct decomposition of the curve
    let direct = factor_series(&curve).unwrap();
    assert_eq!(changes.series.column(0), direct.shift);
    assert_eq!(changes.series.column(1), direct.twist);
}

#[test]
fn short_ewma_sample_is_flagged() {
    let curve = load_yields(&data("sample_yields.csv")).unwrap();
    let spreads = load_spreads(&data("sample_spreads.csv")).unwrap();
    let changes = market_changes(&curve[..20], &spreads).unwrap();
    let est = estimate_sectors(&changes.series, WeightScheme::short_term()).unwrap();
    assert!(est.corr.short_sample());
    assert_eq!(est.corr.n_obs(), Some(19));
}

#[test]
fn misaligned_dates_are_dropped() {
    let curve = load_yields(&data("sample_yields.csv")).unwrap();
    let mut spreads = load_spreads(&data("sample_spreads.csv")).unwrap();
    for series in spreads.values_mut() {
        series.remove(5);
    }
    let changes = market_changes(&curve, &spreads).unwrap();
    assert_eq!(changes.dropped, 1);
    assert_eq!(changes.series.n_periods(), curve.len() - 2);
}

#[test]
fn written_yields_load_back_and_cumulate() {
    let start = NaiveDate::from_ymd_opt(2000, 1, 31).unwrap();
    let obs: Vec<CurveObservation> = (0..12)
        .map(|i| CurveObservation {
            date: start.checked_add_months(chrono::Months::new(i)).unwrap(),
            levels_bp: [
                100.0 + i as f64,
                200.0,
                300.0 - 2.0 * i as f64,
                350.0,
                400.0 + 0.5 * i as f64,
            ],
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("yields.csv");
    std::fs::write(&path, render_yields(&obs)).unwrap();
    let back = load_yields(&path).unwrap();
    let series = factor_series(&back).unwrap();
    let cum = series.cumulative(back[0].date);
    assert_eq!(cum.shift[0], 0.0);
    assert_eq!(cum.timestamps.len(), back.len());
    let level_shift = |o: &CurveObservation| o.levels_bp.iter().sum::<f64>() / 5.0;
    assert_abs_diff_eq!(
        *cum.shift.last().unwrap(),
        level_shift(back.last().unwrap()) - level_shift(&back[0]),
        epsilon = 1e-9
    );
}

#[test]
fn missing_file_is_io_error() {
    match load_yields(Path::new("/definitely/not/here.csv")) {
        Err(Error::Io { path, .. }) => assert!(path.ends_with("here.csv")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn bundled_config_generates_deterministically() {
    let cfg = load_synth_config(&data("synthetic_market.cfg")).unwrap();
    let a = generate_market(&cfg).unwrap();
    let b = generate_market(&cfg).unwrap();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(generate_market(&other).unwrap(), a);
}

fn two_factor(rho: f64) -> CorrelationMatrix {
    CorrelationMatrix::new(
        ["shift", "twist", "banking:A"].map(String::from).to_vec(),
        DMatrix::from_row_slice(3, 3, &[1.0, 0.0, rho, 0.0, 1.0, 0.0, rho, 0.0, 1.0]),
        vec![24.0, 8.0, 14.0],
    )
    .unwrap()
}

// Issuer noise averages down by the basket size: variance adds idio^2/n and
// the correlation shrinks by the matching ratio.
#[test]
fn idiosyncratic_noise_dilutes_as_expected() {
    let (sigma, rho, idio, n) = (14.0f64, -0.33, 30.0f64, 20usize);
    let total = (sigma * sigma + idio * idio / n as f64).sqrt();
    for seed in 0..5 {
        let mut cfg = SynthConfig::new(two_factor(rho), 10_000, seed);
        cfg.idio_vol = idio;
        cfg.n_bonds = n;
        let est = corr_matrix(&generate_market(&cfg).unwrap(), WeightScheme::long_term()).unwrap();
        let vol = est.vol("banking:A").unwrap();
        let r = est.get("shift", "banking:A").unwrap();
        assert!((vol / total - 1.0).abs() < 0.02, "seed {seed}: vol {vol} vs {total}");
        assert!((r - rho * sigma / total).abs() < 0.03, "seed {seed}: rho {r}");
        assert!(r > rho, "seed {seed}: noise should weaken the correlation");
    }
}

#[test]
fn more_bonds_means_less_dilution() {
    let sd = |n: usize| {
        let mut cfg = SynthConfig::new(two_factor(0.0), 5_000, 3);
        cfg.idio_vol = 40.0;
        cfg.n_bonds = n;
        corr_matrix(&generate_market(&cfg).unwrap(), WeightScheme::long_term())
            .unwrap()
            .vol("banking:A")
            .unwrap()
    };
    let (few, many) = (sd(5), sd(80));
    assert!(few > many, "{few} vs {many}");
}
