//! Portfolio effective duration, scenario P&L under shift/twist shocks and
//! factor-model volatility.
//!
//! Twist shocks move a bond's yield by the twist basis value at its nearest
//! key-rate tenor; this is an approximation and results carry a flag when it
//! was used.

use std::collections::BTreeMap;

use nalgebra::DVector;

use crate::covariance::CorrelationMatrix;
use crate::curve_factors::FactorBasis;
use crate::duration::{effective_duration, price_impact, spread_response, FactorStats, SectorStats};
use crate::error::{invalid, Error, Result};
use crate::sector_model::{SectorId, SHIFT_LABEL, TWIST_LABEL};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BondPosition {
    pub id: String,
    /// `None` for Treasuries.
    pub sector: Option<SectorId>,
    pub d_mod: f64,
    pub d_spread: f64,
    /// Fraction of portfolio market value; negative for shorts.
    pub weight: f64,
    /// Price per 100 notional.
    pub price: f64,
    pub maturity: f64,
}

impl BondPosition {
    pub fn new(
        id: impl Into<String>,
        sector: Option<SectorId>,
        d_mod: f64,
        d_spread: f64,
        weight: f64,
        price: f64,
        maturity: f64,
    ) -> Result<Self> {
        let id = id.into();
        for (v, what) in [
            (d_mod, "modified duration"),
            (d_spread, "spread duration"),
            (maturity, "maturity"),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("{id}: {what} must be non-negative, got {v}")));
            }
        }
        if !weight.is_finite() {
            return Err(invalid(format!("{id}: weight must be finite")));
        }
        if !price.is_finite() || price <= 0.0 {
            return Err(invalid(format!("{id}: price must be positive, got {price}")));
        }
        if sector.is_none() && d_spread != 0.0 {
            return Err(invalid(format!("{id}: a Treasury position has no spread duration")));
        }
        Ok(Self {
            id,
            sector,
            d_mod,
            d_spread,
            weight,
            price,
            maturity,
        })
    }

    /// Par Treasury bond.
    pub fn treasury(id: impl Into<String>, d_mod: f64, weight: f64, maturity: f64) -> Result<Self> {
        Self::new(id, None, d_mod, 0.0, weight, 100.0, maturity)
    }

    /// Par credit bond.
    pub fn credit(
        id: impl Into<String>,
        sector: SectorId,
        d_mod: f64,
        d_spread: f64,
        weight: f64,
        maturity: f64,
    ) -> Result<Self> {
        Self::new(id, Some(sector), d_mod, d_spread, weight, 100.0, maturity)
    }

    pub fn is_treasury(&self) -> bool {
        self.sector.is_none()
    }
}

/// Checks that long-only or long/short weights add up to one.
pub fn validate_weights(positions: &[BondPosition]) -> Result<()> {
    let total: f64 = positions.iter().map(|p| p.weight).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(invalid(format!("portfolio weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Sector statistics keyed by sector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StatsTable(BTreeMap<SectorId, SectorStats>);

impl StatsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, stats: SectorStats) {
        self.0.insert(stats.sector, stats);
    }

    pub fn get(&self, sector: SectorId) -> Result<&SectorStats> {
        self.0.get(&sector).ok_or(Error::MissingSector(sector))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SectorStats> {
        self.0.values()
    }
}

impl FromIterator<SectorStats> for StatsTable {
    fn from_iter<I: IntoIterator<Item = SectorStats>>(iter: I) -> Self {
        let mut t = StatsTable::new();
        for s in iter {
            t.insert(s);
        }
        t
    }
}

pub fn position_effective_duration(pos: &BondPosition, stats: &StatsTable, factors: &FactorStats) -> Result<f64> {
    match pos.sector {
        None => Ok(pos.d_mod),
        Some(sector) => {
            let s = stats.get(sector)?;
            effective_duration(
                pos.d_mod,
                pos.d_spread,
                s.rho_shift,
                s.sigma_spread,
                factors.sigma_shift,
            )
        }
    }
}

/// Weight-averaged effective duration, summed in position order.
pub fn portfolio_effective_duration(
    positions: &[BondPosition],
    stats: &StatsTable,
    factors: &FactorStats,
) -> Result<f64> {
    positions.iter().try_fold(0.0, |acc, p| {
        Ok(acc + p.weight * position_effective_duration(p, stats, factors)?)
    })
}

/// Effective duration of `portfolio` minus that of `benchmark`.
pub fn duration_mismatch(
    portfolio: &[BondPosition],
    benchmark: &[BondPosition],
    stats: &StatsTable,
    factors: &FactorStats,
) -> Result<f64> {
    Ok(portfolio_effective_duration(portfolio, stats, factors)?
        - portfolio_effective_duration(benchmark, stats, factors)?)
}

/// Joint Treasury factor move; twist is in units of the `(-2,-1,0,1,2)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioShock {
    pub delta_shift: f64,
    pub delta_twist: f64,
}

impl ScenarioShock {
    pub fn new(delta_shift: f64, delta_twist: f64) -> Result<Self> {
        if !delta_shift.is_finite() || !delta_twist.is_finite() {
            return Err(invalid("scenario shock must be finite"));
        }
        Ok(Self {
            delta_shift,
            delta_twist,
        })
    }

    pub fn shift(delta: f64) -> Result<Self> {
        Self::new(delta, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositionPnl {
    pub id: String,
    /// Yield change applied to the bond, bp.
    pub delta_y: f64,
    /// Expected spread change, bp.
    pub delta_s: f64,
    /// Change per 100 of the position's market value.
    pub pnl: f64,
    /// Change per 100 notional.
    pub price_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub positions: Vec<PositionPnl>,
    /// Weighted sum of position P&L, per 100 of portfolio value.
    pub total: f64,
    /// Set when a non-zero twist used the nearest-tenor yield approximation.
    pub twist_approximated: bool,
}

pub fn scenario_pnl(
    positions: &[BondPosition],
    shock: &ScenarioShock,
    stats: &StatsTable,
    factors: &FactorStats,
) -> Result<ScenarioResult> {
    let twist = shock.delta_twist != 0.0;
    let mut out = Vec::with_capacity(positions.len());
    let mut total = 0.0;
    for p in positions {
        let mut delta_y = shock.delta_shift;
        if twist {
            delta_y += FactorBasis::twist_at_maturity(p.maturity) * shock.delta_twist;
        }
        let delta_s = match p.sector {
            None => 0.0,
            Some(sector) => {
                let s = stats.get(sector)?;
                let mut ds = spread_response(
                    s.rho_shift,
                    s.sigma_spread,
                    factors.sigma_shift,
                    shock.delta_shift,
                    "shift",
                )?;
                if twist {
                    ds += spread_response(
                        s.rho_twist,
                        s.sigma_spread,
                        factors.sigma_twist,
                        shock.delta_twist,
                        "twist",
                    )?;
                }
                ds
            }
        };
        let pnl = price_impact(p.d_mod, delta_y, p.d_spread, delta_s)?;
        total += p.weight * pnl;
        out.push(PositionPnl {
            id: p.id.clone(),
            delta_y,
            delta_s,
            pnl,
            price_change: pnl * p.price / 100.0,
        });
    }
    Ok(ScenarioResult {
        positions: out,
        total,
        twist_approximated: twist,
    })
}

/// Price sensitivity per bp to each risk factor, per 100 of portfolio value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureVector {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl ExposureVector {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(invalid(format!(
                "{} labels for {} exposures",
                labels.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("exposures must be finite"));
        }
        Ok(Self { labels, values })
    }

    /// Maps positions onto `labels`: Treasury yield risk goes to `shift` (and
    /// to `twist` through the nearest key rate), spread risk to the sector's
    /// label. Labels not touched by any position get zero exposure.
    pub fn from_positions(positions: &[BondPosition], labels: &[String]) -> Result<Self> {
        let idx = |l: &str| labels.iter().position(|x| x == l);
        let mut values = vec![0.0; labels.len()];
        let shift = idx(SHIFT_LABEL).ok_or_else(|| invalid("exposure labels must include 'shift'"))?;
        let twist = idx(TWIST_LABEL);
        for p in positions {
            values[shift] -= p.weight * p.d_mod / 100.0;
            if let Some(t) = twist {
                values[t] -= p.weight * p.d_mod * FactorBasis::twist_at_maturity(p.maturity) / 100.0;
            }
            if let Some(sector) = p.sector {
                let j = idx(&sector.to_string()).ok_or(Error::MissingSector(sector))?;
                values[j] -= p.weight * p.d_spread / 100.0;
            }
        }
        Self::new(labels.to_vec(), values)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            labels: self.labels.clone(),
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }
}

/// `sqrt(x' Σ x)` with `Σ` assembled from correlations and volatilities.
pub fn portfolio_volatility(exposure: &ExposureVector, corr: &CorrelationMatrix) -> Result<f64> {
    if exposure.labels() != corr.labels() {
        return Err(invalid(format!(
            "exposure factors {:?} do not match covariance factors {:?}",
            exposure.labels(),
            corr.labels()
        )));
    }
    if !corr.is_psd() {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: corr.min_eigenvalue(),
        });
    }
    let x = DVector::from_column_slice(exposure.values());
    let q = (x.transpose() * corr.covariance() * &x)[(0, 0)];
    Ok(q.max(0.0).sqrt())
}
