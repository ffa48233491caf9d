//! From yield and spread histories to per-sector statistics.

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::covariance::{corr_matrix, AlignedSeries, CorrelationMatrix, WeightScheme};
use crate::curve_factors::CurveObservation;
use crate::curve_factors::{decompose, KeyRateChange};
use crate::data_io::{Cell, Report, SpreadHistory};
use crate::duration::{effective_duration_multiplier, FactorStats, SectorStats};
use crate::error::{invalid, Result};
use crate::scenario::StatsTable;
use crate::sector_model::{SectorId, SHIFT_LABEL, TWIST_LABEL};

const TENOR_LABELS: [&str; 5] = ["y2", "y5", "y10", "y20", "y30"];

/// Period changes of the Treasury factors and of every sector's OAS.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketChanges {
    /// Columns: `shift`, `twist`, then one per sector.
    pub series: AlignedSeries,
    /// Level dates discarded because some series lacked them.
    pub dropped: usize,
}

/// Intersects curve and spread levels on common dates, differences them and
/// decomposes each curve change.
pub fn market_changes(curve: &[CurveObservation], spreads: &SpreadHistory) -> Result<MarketChanges> {
    let mut inputs: Vec<(String, Vec<(NaiveDate, f64)>)> = TENOR_LABELS
        .iter()
        .enumerate()
        .map(|(k, l)| (l.to_string(), curve.iter().map(|o| (o.date, o.levels_bp[k])).collect()))
        .collect();
    inputs.extend(spreads.iter().map(|(s, obs)| (s.to_string(), obs.clone())));
    let aligned = AlignedSeries::align(&inputs)?;
    let diffs = aligned.series.differences()?;
    let n = diffs.n_periods();
    let n_sectors = spreads.len();
    let mut values = DMatrix::zeros(n, 2 + n_sectors);
    for t in 0..n {
        let dy: [f64; 5] = std::array::from_fn(|k| diffs.values()[(t, k)]);
        let l = decompose(&KeyRateChange::new(dy)?);
        values[(t, 0)] = l.gamma_shift();
        values[(t, 1)] = l.gamma_twist();
        for j in 0..n_sectors {
            values[(t, 2 + j)] = diffs.values()[(t, 5 + j)];
        }
    }
    let mut labels = vec![SHIFT_LABEL.to_string(), TWIST_LABEL.to_string()];
    labels.extend(diffs.labels()[5..].iter().cloned());
    Ok(MarketChanges {
        series: AlignedSeries::new(labels, diffs.timestamps().to_vec(), values)?,
        dropped: aligned.dropped,
    })
}

/// Estimated factor volatilities, per-sector statistics and the full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorEstimate {
    pub scheme: WeightScheme,
    pub corr: CorrelationMatrix,
    pub factors: FactorStats,
    pub stats: StatsTable,
}

/// Estimates correlations of every sector column with shift and twist.
/// Columns other than `shift` and `twist` must be sector ids.
pub fn estimate_sectors(changes: &AlignedSeries, scheme: WeightScheme) -> Result<SectorEstimate> {
    let corr = corr_matrix(changes, scheme)?;
    let shift = corr.index_of(SHIFT_LABEL).ok_or_else(|| invalid("no shift series"))?;
    let twist = corr.index_of(TWIST_LABEL).ok_or_else(|| invalid("no twist series"))?;
    let factors = FactorStats::new(corr.vols()[shift], corr.vols()[twist])?;
    let mut stats = StatsTable::new();
    for (j, label) in corr.labels().iter().enumerate() {
        if j == shift || j == twist {
            continue;
        }
        let sector: SectorId = label.parse()?;
        stats.insert(SectorStats::new(
            sector,
            corr.vols()[j],
            corr.matrix()[(j, shift)],
            corr.matrix()[(j, twist)],
        )?);
    }
    Ok(SectorEstimate {
        scheme,
        corr,
        factors,
        stats,
    })
}

pub fn sector_estimate_report(e: &SectorEstimate) -> Result<Report> {
    let scheme = match e.scheme {
        WeightScheme::EqualWeight => "equal weight".to_string(),
        WeightScheme::ExponentialHalfLife(h) => format!("half-life {h} periods"),
    };
    let mut r = Report::new(
        format!(
            "Sector spread statistics ({scheme}; sigma_shift {:.2} bp, sigma_twist {:.2} bp, {} periods)",
            e.factors.sigma_shift,
            e.factors.sigma_twist,
            e.corr.n_obs().unwrap_or(0)
        ),
        ["sector", "sigma_spread", "rho_shift", "rho_twist", "m_eff"]
            .map(String::from)
            .to_vec(),
    );
    for s in e.stats.iter() {
        r.push(vec![
            Cell::Text(s.sector.to_string()),
            Cell::Number(s.sigma_spread, 2),
            Cell::Correlation(s.rho_shift),
            Cell::Correlation(s.rho_twist),
            Cell::Multiplier(effective_duration_multiplier(
                s.rho_shift,
                s.sigma_spread,
                e.factors.sigma_shift,
            )?),
        ]);
    }
    Ok(r)
}
