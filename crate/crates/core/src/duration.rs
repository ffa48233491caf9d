//! Spread response to Treasury factor moves and the resulting effective
//! duration of a credit bond.
//!
//! Given the correlation `rho` between a sector spread and a Treasury factor,
//! and both volatilities in the same units (bp per month), the expected spread
//! move is `rho · sigma_spread / sigma_factor · delta_factor`. Feeding that
//! into the yield and spread legs of the price change gives
//!
//! ```text
//! D_eff = D_mod + rho · sigma_spread / sigma_shift · D_spread
//! M_eff = 1 + rho · sigma_spread / sigma_shift
//! ```
//!
//! Durations are stored positive; price changes carry the minus sign.

use crate::error::{invalid, Error, Result};
use crate::sector_model::SectorId;

/// Spread volatility and Treasury-factor correlations of one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorStats {
    pub sector: SectorId,
    /// bp per period
    pub sigma_spread: f64,
    pub rho_shift: f64,
    pub rho_twist: f64,
}

impl SectorStats {
    pub fn new(sector: SectorId, sigma_spread: f64, rho_shift: f64, rho_twist: f64) -> Result<Self> {
        if !sigma_spread.is_finite() || sigma_spread < 0.0 {
            return Err(invalid(format!("{sector}: spread volatility must be non-negative")));
        }
        check_rho(rho_shift)?;
        check_rho(rho_twist)?;
        Ok(Self {
            sector,
            sigma_spread,
            rho_shift,
            rho_twist,
        })
    }
}

/// Treasury factor volatilities in bp per period.
///
/// A zero twist volatility is accepted and only rejected once a twist move
/// has to be translated into a spread move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorStats {
    pub sigma_shift: f64,
    pub sigma_twist: f64,
}

impl FactorStats {
    pub fn new(sigma_shift: f64, sigma_twist: f64) -> Result<Self> {
        check_sigma_factor(sigma_shift, "shift")?;
        if !sigma_twist.is_finite() || sigma_twist < 0.0 {
            return Err(invalid(format!(
                "twist volatility must be non-negative, got {sigma_twist}"
            )));
        }
        Ok(Self {
            sigma_shift,
            sigma_twist,
        })
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho.abs() <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("correlation must lie in [-1, 1], got {rho}")))
    }
}

fn check_sigma_factor(sigma: f64, which: &'static str) -> Result<()> {
    if sigma.is_nan() || sigma.is_infinite() {
        Err(invalid(format!("{which} volatility must be finite")))
    } else if sigma <= 0.0 {
        Err(Error::DegenerateFactor(which))
    } else {
        Ok(())
    }
}

fn check_duration(d: f64, what: &str) -> Result<()> {
    if d.is_finite() && d >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "{what} must be a non-negative number of years, got {d}"
        )))
    }
}

pub(crate) fn spread_response(
    rho: f64,
    sigma_spread: f64,
    sigma_factor: f64,
    delta_factor: f64,
    which: &'static str,
) -> Result<f64> {
    check_rho(rho)?;
    check_sigma_factor(sigma_factor, which)?;
    if !sigma_spread.is_finite() || sigma_spread < 0.0 || !delta_factor.is_finite() {
        return Err(invalid("spread volatility and factor move must be finite"));
    }
    Ok(rho * sigma_spread * delta_factor / sigma_factor)
}

/// Expected spread change in bp accompanying a Treasury factor move of
/// `delta_factor` bp.
pub fn expected_spread_change(rho: f64, sigma_spread: f64, sigma_factor: f64, delta_factor: f64) -> Result<f64> {
    spread_response(rho, sigma_spread, sigma_factor, delta_factor, "factor")
}

/// Price change per 100 of initial value for yield and spread moves in bp.
pub fn price_impact(d_mod: f64, delta_y: f64, d_spread: f64, delta_s: f64) -> Result<f64> {
    check_duration(d_mod, "modified duration")?;
    check_duration(d_spread, "spread duration")?;
    if !delta_y.is_finite() || !delta_s.is_finite() {
        return Err(invalid("yield and spread changes must be finite"));
    }
    Ok(-(d_mod * delta_y + d_spread * delta_s) / 100.0)
}

/// `1 + rho · sigma_spread / sigma_shift`
pub fn effective_duration_multiplier(rho: f64, sigma_spread: f64, sigma_shift: f64) -> Result<f64> {
    Ok(1.0 + spread_response(rho, sigma_spread, sigma_shift, 1.0, "shift")?)
}

/// `d_mod + rho · sigma_spread / sigma_shift · d_spread`
pub fn effective_duration(d_mod: f64, d_spread: f64, rho: f64, sigma_spread: f64, sigma_shift: f64) -> Result<f64> {
    check_duration(d_mod, "modified duration")?;
    check_duration(d_spread, "spread duration")?;
    let beta = spread_response(rho, sigma_spread, sigma_shift, 1.0, "shift")?;
    Ok(d_mod + beta * d_spread)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationReport {
    pub d_mod: f64,
    pub d_spread: f64,
    pub d_eff: f64,
    pub m_eff: f64,
}

impl DurationReport {
    pub fn compute(d_mod: f64, d_spread: f64, rho: f64, sigma_spread: f64, sigma_shift: f64) -> Result<Self> {
        Ok(Self {
            d_mod,
            d_spread,
            d_eff: effective_duration(d_mod, d_spread, rho, sigma_spread, sigma_shift)?,
            m_eff: effective_duration_multiplier(rho, sigma_spread, sigma_shift)?,
        })
    }

    pub fn for_sector(d_mod: f64, d_spread: f64, stats: &SectorStats, factors: &FactorStats) -> Result<Self> {
        Self::compute(
            d_mod,
            d_spread,
            stats.rho_shift,
            stats.sigma_spread,
            factors.sigma_shift,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn worked_example_spread_move() {
        let ds = expected_spread_change(-0.34, 18.2, 24.3, 10.0).unwrap();
        assert_abs_diff_eq!(ds, -2.547, epsilon = 5e-4);
        assert_eq!(format!("{ds:.1}"), "-2.5");
    }

    #[test]
    fn one_sigma_shift_tightening() {
        let ds = expected_spread_change(-0.33, 14.0, 24.0, 24.0).unwrap();
        assert_abs_diff_eq!(ds, -4.62, epsilon = 1e-12);
        assert_eq!(expected_spread_change(-0.33, 14.0, 24.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_factor_vol_is_degenerate() {
        assert!(matches!(
            expected_spread_change(-0.3, 10.0, 0.0, 1.0),
            Err(Error::DegenerateFactor(_))
        ));
        assert!(matches!(
            effective_duration(7.5, 7.5, -0.3, 10.0, 0.0),
            Err(Error::DegenerateFactor("shift"))
        ));
        assert!(effective_duration_multiplier(-0.3, 10.0, 0.0).is_err());
        assert!(expected_spread_change(1.2, 10.0, 5.0, 1.0).is_err());
    }

    #[test]
    fn price_impact_legs() {
        assert_abs_diff_eq!(price_impact(7.5, 10.0, 7.5, 0.0).unwrap(), -0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(price_impact(7.5, 10.0, 7.5, -2.5).unwrap(), -0.5625, epsilon = 1e-15);
        assert_eq!(price_impact(7.5, 0.0, 7.5, 0.0).unwrap(), 0.0);
        assert!(price_impact(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn effective_duration_cases() {
        let d = effective_duration(7.5, 7.5, -0.34, 18.2, 24.3).unwrap();
        assert_abs_diff_eq!(d, 5.590, epsilon = 5e-4);
        assert!((d - 5.625).abs() < 0.05);
        assert_eq!(effective_duration(6.0, 6.5, 0.0, 18.0, 24.0).unwrap(), 6.0);
    }

    #[test]
    fn multiplier_cases() {
        let m = effective_duration_multiplier(-0.34, 18.2, 24.3).unwrap();
        assert_abs_diff_eq!(m, 0.745, epsilon = 5e-4);
        assert_eq!(format!("{:.0}%", m * 100.0), "75%");
        let m = effective_duration_multiplier(-0.33, 14.0, 24.0).unwrap();
        assert_abs_diff_eq!(m, 0.8075, epsilon = 1e-12);
        assert_eq!(format!("{:.0}%", m * 100.0), "81%");
        assert_eq!(effective_duration_multiplier(0.0, 14.0, 24.0).unwrap(), 1.0);
    }

    #[test]
    fn stats_validation() {
        let s = SectorId::all().next().unwrap();
        assert!(SectorStats::new(s, 10.0, -1.1, 0.0).is_err());
        assert!(SectorStats::new(s, -1.0, 0.0, 0.0).is_err());
        assert!(matches!(
            FactorStats::new(0.0, 5.0),
            Err(Error::DegenerateFactor("shift"))
        ));
        assert!(FactorStats::new(24.3, 0.0).is_ok());
    }

    proptest! {
        #[test]
        fn chain_rule_consistency(
            d_mod in 0.0f64..30.0,
            d_spread in 0.0f64..30.0,
            rho in -1.0f64..1.0,
            sigma_spread in 0.0f64..100.0,
            sigma_shift in 0.5f64..100.0,
            dy in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        ) {
            let d_eff = effective_duration(d_mod, d_spread, rho, sigma_spread, sigma_shift).unwrap();
            let ds = expected_spread_change(rho, sigma_spread, sigma_shift, dy).unwrap();
            let via_price = -price_impact(d_mod, dy, d_spread, ds).unwrap() * 100.0 / dy;
            prop_assert!((d_eff - via_price).abs() < 1e-9 * (1.0 + d_eff.abs()));
        }

        #[test]
        fn equal_durations_link_multiplier(
            d in 0.0f64..30.0,
            rho in -1.0f64..1.0,
            sigma_spread in 0.0f64..100.0,
            sigma_shift in 0.5f64..100.0,
        ) {
            let r = DurationReport::compute(d, d, rho, sigma_spread, sigma_shift).unwrap();
            prop_assert!((r.d_eff - r.m_eff * r.d_mod).abs() <= 1e-12 * (1.0 + r.d_eff.abs()));
        }

        #[test]
        fn monotone_in_rho_and_sigma(
            d in 0.1f64..30.0,
            rho in -1.0f64..0.9,
            bump in 0.01f64..0.1,
            sigma_spread in 1.0f64..100.0,
            sigma_shift in 0.5f64..100.0,
        ) {
            let base = effective_duration(d, d, rho, sigma_spread, sigma_shift).unwrap();
            let higher = effective_duration(d, d, rho + bump, sigma_spread, sigma_shift).unwrap();
            prop_assert!(higher > base);
            if rho < 0.0 {
                let wider = effective_duration(d, d, rho, sigma_spread * 1.1, sigma_shift).unwrap();
                prop_assert!(wider < base);
            }
        }

        #[test]
        fn linear_responses(
            rho in -1.0f64..1.0, a in -50.0f64..50.0, b in -50.0f64..50.0,
            dm in 0.0f64..20.0, dsd in 0.0f64..20.0,
        ) {
            let f = |x| expected_spread_change(rho, 15.0, 24.0, x).unwrap();
            prop_assert!((f(a + b) - (f(a) + f(b))).abs() < 1e-9);
            let p = |y, s| price_impact(dm, y, dsd, s).unwrap();
            prop_assert!((p(a + b, b) - (p(a, 0.0) + p(b, b))).abs() < 1e-9);
        }
    }
}
