//! Treasury curve shift/twist decomposition.
//!
//! A key-rate yield change over the 2/5/10/20/30-year tenors is projected onto
//! a unit parallel shift `(1,1,1,1,1)` and a unit steepening twist
//! `(-2,-1,0,1,2)` rotating around the 10-year point. The two basis vectors are
//! orthogonal, so the loadings are plain projections:
//!
//! ```text
//! shift = (dy2 + dy5 + dy10 + dy20 + dy30) / 5
//! twist = (-2 dy2 - dy5 + dy20 + 2 dy30) / 10
//! ```
//!
//! and the residual carries neither a parallel nor a twist component.

use chrono::NaiveDate;

use crate::error::{invalid, Error, Result};

/// Key-rate maturities in years.
pub const KEY_RATE_TENORS: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 30.0];

/// The fixed shift and twist basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorBasis;

impl FactorBasis {
    pub const SHIFT: [f64; 5] = [1.0, 1.0, 1.0, 1.0, 1.0];
    pub const TWIST: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];
    /// `dot(SHIFT, SHIFT)`
    pub const SHIFT_NORM_SQ: f64 = 5.0;
    /// `dot(TWIST, TWIST)`
    pub const TWIST_NORM_SQ: f64 = 10.0;

    /// Twist basis value at the key rate closest to `maturity_years`.
    /// Ties resolve to the shorter tenor.
    pub fn twist_at_maturity(maturity_years: f64) -> f64 {
        let idx = KEY_RATE_TENORS
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, t)| {
                let d = (t - maturity_years).abs();
                if d < best.1 {
                    (i, d)
                } else {
                    best
                }
            })
            .0;
        Self::TWIST[idx]
    }
}

fn dot(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One period's yield changes in bp at the 2/5/10/20/30-year key rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateChange([f64; 5]);

impl KeyRateChange {
    pub fn new(values: [f64; 5]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "key rate change at {}y is not finite",
                KEY_RATE_TENORS[i]
            )));
        }
        Ok(Self(values))
    }

    pub fn zero() -> Self {
        Self([0.0; 5])
    }

    pub fn values(&self) -> &[f64; 5] {
        &self.0
    }

    pub fn dy2(&self) -> f64 {
        self.0[0]
    }
    pub fn dy5(&self) -> f64 {
        self.0[1]
    }
    pub fn dy10(&self) -> f64 {
        self.0[2]
    }
    pub fn dy20(&self) -> f64 {
        self.0[3]
    }
    pub fn dy30(&self) -> f64 {
        self.0[4]
    }
}

/// Shift and twist loadings plus the unexplained residual, all in bp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorLoadings {
    gamma_shift: f64,
    gamma_twist: f64,
    residual: [f64; 5],
}

impl FactorLoadings {
    pub fn new(gamma_shift: f64, gamma_twist: f64, residual: [f64; 5]) -> Result<Self> {
        if !gamma_shift.is_finite() || !gamma_twist.is_finite() {
            return Err(invalid("factor loadings must be finite"));
        }
        if residual.iter().any(|v| !v.is_finite()) {
            return Err(invalid("residual entries must be finite"));
        }
        Ok(Self {
            gamma_shift,
            gamma_twist,
            residual,
        })
    }

    pub fn gamma_shift(&self) -> f64 {
        self.gamma_shift
    }

    pub fn gamma_twist(&self) -> f64 {
        self.gamma_twist
    }

    pub fn residual(&self) -> &[f64; 5] {
        &self.residual
    }

    /// Euclidean norm of the residual in bp.
    pub fn residual_norm(&self) -> f64 {
        dot(&self.residual, &self.residual).sqrt()
    }
}

/// Projects a key-rate change onto the shift and twist basis.
pub fn decompose(dy: &KeyRateChange) -> FactorLoadings {
    let v = dy.values();
    let gamma_shift = (v[0] + v[1] + v[2] + v[3] + v[4]) / 5.0;
    let gamma_twist = (-2.0 * v[0] - v[1] + v[3] + 2.0 * v[4]) / 10.0;
    let mut residual = [0.0; 5];
    for (i, r) in residual.iter_mut().enumerate() {
        *r = v[i] - gamma_shift * FactorBasis::SHIFT[i] - gamma_twist * FactorBasis::TWIST[i];
    }
    FactorLoadings {
        gamma_shift,
        gamma_twist,
        residual,
    }
}

/// Rebuilds the key-rate change from its loadings.
pub fn reconstruct(loadings: &FactorLoadings) -> Result<KeyRateChange> {
    let mut out = [0.0; 5];
    for (i, o) in out.iter_mut().enumerate() {
        *o = loadings.gamma_shift * FactorBasis::SHIFT[i]
            + loadings.gamma_twist * FactorBasis::TWIST[i]
            + loadings.residual[i];
    }
    KeyRateChange::new(out)
}

/// Yield-curve levels in bp at the five key rates on one date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveObservation {
    pub date: NaiveDate,
    pub levels_bp: [f64; 5],
}

/// Per-period shift/twist loadings derived from a sequence of curve levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSeries {
    /// End date of each differencing period.
    pub timestamps: Vec<NaiveDate>,
    pub shift: Vec<f64>,
    pub twist: Vec<f64>,
    pub residual_norms: Vec<f64>,
}

/// Running totals of the factor series, anchored at zero on the first level date.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeFactors {
    pub timestamps: Vec<NaiveDate>,
    pub shift: Vec<f64>,
    pub twist: Vec<f64>,
}

impl FactorSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Running sums starting from zero at `start`, the date of the first level.
    pub fn cumulative(&self, start: NaiveDate) -> CumulativeFactors {
        let mut timestamps = Vec::with_capacity(self.len() + 1);
        timestamps.push(start);
        timestamps.extend_from_slice(&self.timestamps);
        let running = |xs: &[f64]| {
            std::iter::once(0.0)
                .chain(xs.iter().scan(0.0, |acc, x| {
                    *acc += x;
                    Some(*acc)
                }))
                .collect::<Vec<_>>()
        };
        CumulativeFactors {
            timestamps,
            shift: running(&self.shift),
            twist: running(&self.twist),
        }
    }
}

/// Differences consecutive curve observations and decomposes each change.
pub fn factor_series(levels: &[CurveObservation]) -> Result<FactorSeries> {
    if levels.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: levels.len(),
        });
    }
    let n = levels.len() - 1;
    let mut out = FactorSeries {
        timestamps: Vec::with_capacity(n),
        shift: Vec::with_capacity(n),
        twist: Vec::with_capacity(n),
        residual_norms: Vec::with_capacity(n),
    };
    for pair in levels.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if cur.date <= prev.date {
            return Err(invalid(format!(
                "curve observations must have strictly increasing dates ({} follows {})",
                cur.date, prev.date
            )));
        }
        let mut dy = [0.0; 5];
        for (i, d) in dy.iter_mut().enumerate() {
            *d = cur.levels_bp[i] - prev.levels_bp[i];
        }
        let loadings = decompose(&KeyRateChange::new(dy)?);
        out.timestamps.push(cur.date);
        out.shift.push(loadings.gamma_shift);
        out.twist.push(loadings.gamma_twist);
        out.residual_norms.push(loadings.residual_norm());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn krc(v: [f64; 5]) -> KeyRateChange {
        KeyRateChange::new(v).unwrap()
    }

    /// Least-squares regression of `dy` on the two basis columns, solved
    /// through the normal equations without using orthogonality.
    fn ols(dy: &[f64; 5]) -> (f64, f64) {
        let x = DMatrix::from_fn(5, 2, |r, c| {
            if c == 0 {
                FactorBasis::SHIFT[r]
            } else {
                FactorBasis::TWIST[r]
            }
        });
        let y = DVector::from_column_slice(dy);
        let xtx = x.transpose() * &x;
        let xty = x.transpose() * y;
        let beta = xtx.lu().solve(&xty).unwrap();
        (beta[0], beta[1])
    }

    #[test]
    fn basis_geometry() {
        assert_eq!(dot(&FactorBasis::SHIFT, &FactorBasis::TWIST), 0.0);
        assert_eq!(
            dot(&FactorBasis::SHIFT, &FactorBasis::SHIFT),
            FactorBasis::SHIFT_NORM_SQ
        );
        assert_eq!(
            dot(&FactorBasis::TWIST, &FactorBasis::TWIST),
            FactorBasis::TWIST_NORM_SQ
        );
    }

    #[test]
    fn parallel_ten_bp() {
        let l = decompose(&krc([10.0; 5]));
        assert_eq!(l.gamma_shift(), 10.0);
        assert_eq!(l.gamma_twist(), 0.0);
        assert_eq!(l.residual(), &[0.0; 5]);
    }

    #[test]
    fn zero_change() {
        let l = decompose(&KeyRateChange::zero());
        assert_eq!((l.gamma_shift(), l.gamma_twist()), (0.0, 0.0));
        assert_eq!(l.residual(), &[0.0; 5]);
        assert_eq!(reconstruct(&l).unwrap(), KeyRateChange::zero());
    }

    #[test]
    fn illustrated_twist_row_loads_five() {
        let l = decompose(&krc([-10.0, -5.0, 0.0, 5.0, 10.0]));
        assert_eq!(l.gamma_shift(), 0.0);
        assert_eq!(l.gamma_twist(), 5.0);
        assert_eq!(l.residual(), &[0.0; 5]);
    }

    #[test]
    fn reconstruct_parallel() {
        let l = FactorLoadings::new(10.0, 0.0, [0.0; 5]).unwrap();
        assert_eq!(reconstruct(&l).unwrap().values(), &[10.0; 5]);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            KeyRateChange::new([0.0, f64::NAN, 0.0, 0.0, 0.0]),
            Err(Error::InvalidInput(_))
        ));
        assert!(FactorLoadings::new(f64::INFINITY, 0.0, [0.0; 5]).is_err());
    }

    #[test]
    fn nearest_tenor_twist() {
        assert_eq!(FactorBasis::twist_at_maturity(10.0), 0.0);
        assert_eq!(FactorBasis::twist_at_maturity(1.0), -2.0);
        assert_eq!(FactorBasis::twist_at_maturity(27.0), 2.0);
        assert_eq!(FactorBasis::twist_at_maturity(7.0), -1.0);
        assert_eq!(FactorBasis::twist_at_maturity(15.0), 0.0);
    }

    fn obs(d: &str, lv: f64) -> CurveObservation {
        CurveObservation {
            date: d.parse().unwrap(),
            levels_bp: [lv; 5],
        }
    }

    #[test]
    fn constant_levels_give_zero_series() {
        let levels: Vec<_> = (1..=12)
            .map(|m| CurveObservation {
                date: NaiveDate::from_ymd_opt(2013, m, 1).unwrap(),
                levels_bp: [30.0, 140.0, 250.0, 320.0, 350.0],
            })
            .collect();
        let s = factor_series(&levels).unwrap();
        assert_eq!(s.len(), 11);
        assert!(s.shift.iter().chain(&s.twist).all(|v| *v == 0.0));
        assert!(s.residual_norms.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_observations_rising_ten() {
        let s = factor_series(&[obs("2013-01-31", 200.0), obs("2013-02-28", 210.0)]).unwrap();
        assert_eq!(s.shift, vec![10.0]);
        assert_eq!(s.twist, vec![0.0]);
        assert_eq!(s.timestamps, vec!["2013-02-28".parse::<NaiveDate>().unwrap()]);
    }

    #[test]
    fn series_errors() {
        assert!(matches!(
            factor_series(&[obs("2013-01-31", 1.0)]),
            Err(Error::InsufficientData { required: 2, actual: 1 })
        ));
        assert!(matches!(
            factor_series(&[obs("2013-01-31", 1.0), obs("2013-01-31", 2.0)]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn cumulative_starts_at_zero() {
        let s = factor_series(&[
            obs("2013-01-31", 200.0),
            obs("2013-02-28", 210.0),
            obs("2013-03-31", 205.0),
        ])
        .unwrap();
        let c = s.cumulative("2013-01-31".parse().unwrap());
        assert_eq!(c.shift, vec![0.0, 10.0, 5.0]);
        assert_eq!(c.timestamps.len(), 3);
    }

    proptest! {
        #[test]
        fn projection_is_orthogonal(v in proptest::array::uniform5(-500.0f64..500.0)) {
            let l = decompose(&krc(v));
            let r = l.residual();
            prop_assert!(r.iter().sum::<f64>().abs() <= 1e-9);
            prop_assert!(dot(r, &FactorBasis::TWIST).abs() <= 1e-9);
        }

        #[test]
        fn matches_least_squares(v in proptest::array::uniform5(-500.0f64..500.0)) {
            let l = decompose(&krc(v));
            let (bs, bt) = ols(&v);
            prop_assert!((l.gamma_shift() - bs).abs() <= 1e-12 * (1.0 + bs.abs()));
            prop_assert!((l.gamma_twist() - bt).abs() <= 1e-12 * (1.0 + bt.abs()));
        }

        #[test]
        fn round_trip(v in proptest::array::uniform5(-500.0f64..500.0)) {
            let back = reconstruct(&decompose(&krc(v))).unwrap();
            for (a, b) in back.values().iter().zip(&v) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }

        #[test]
        fn linear(
            x in proptest::array::uniform5(-100.0f64..100.0),
            y in proptest::array::uniform5(-100.0f64..100.0),
            a in -5.0f64..5.0,
            b in -5.0f64..5.0,
        ) {
            let mut z = [0.0; 5];
            for i in 0..5 { z[i] = a * x[i] + b * y[i]; }
            let (lx, ly, lz) = (decompose(&krc(x)), decompose(&krc(y)), decompose(&krc(z)));
            prop_assert!((lz.gamma_shift() - (a * lx.gamma_shift() + b * ly.gamma_shift())).abs() < 1e-9);
            prop_assert!((lz.gamma_twist() - (a * lx.gamma_twist() + b * ly.gamma_twist())).abs() < 1e-9);
            for i in 0..5 {
                prop_assert!((lz.residual()[i] - (a * lx.residual()[i] + b * ly.residual()[i])).abs() < 1e-9);
            }
        }

        #[test]
        fn telescoping_shift_sum(steps in proptest::collection::vec(proptest::array::uniform5(-30.0f64..30.0), 1..60)) {
            let start = NaiveDate::from_ymd_opt(1990, 1, 1).unwrap();
            let mut levels = vec![CurveObservation { date: start, levels_bp: [500.0, 550.0, 600.0, 650.0, 660.0] }];
            for (i, st) in steps.iter().enumerate() {
                let prev = levels.last().unwrap().levels_bp;
                let mut next = prev;
                for k in 0..5 { next[k] += st[k]; }
                levels.push(CurveObservation { date: start + chrono::Days::new(31 * (i as u64 + 1)), levels_bp: next });
            }
            let s = factor_series(&levels).unwrap();
            let avg = |lv: &[f64; 5]| lv.iter().sum::<f64>() / 5.0;
            let total: f64 = s.shift.iter().sum();
            let expected = avg(&levels.last().unwrap().levels_bp) - avg(&levels[0].levels_bp);
            prop_assert!((total - expected).abs() < 1e-9);
            prop_assert_eq!(s.shift.len(), levels.len() - 1);
            prop_assert_eq!(s.residual_norms.len(), s.twist.len());
        }
    }
}
