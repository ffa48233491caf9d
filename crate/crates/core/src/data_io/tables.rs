//! Published sector correlation and multiplier tables, stored as whole
//! percents in industry-major, AAA/AA-A-BBB order.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error};
use crate::sector_model::{Industry, Rating, SectorId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vintage {
    /// Estimated as of December 2003.
    Y2003,
    /// Estimated as of June 2013.
    Y2013,
}

impl Vintage {
    pub const ALL: [Vintage; 2] = [Vintage::Y2003, Vintage::Y2013];

    pub fn year(self) -> u16 {
        match self {
            Vintage::Y2003 => 2003,
            Vintage::Y2013 => 2013,
        }
    }
}

impl FromStr for Vintage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "2003" => Ok(Vintage::Y2003),
            "2013" => Ok(Vintage::Y2013),
            other => Err(invalid(format!("unknown vintage '{other}', expected 2003 or 2013"))),
        }
    }
}

impl fmt::Display for Vintage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.year())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Calibration {
    /// Equal weights.
    LongTerm,
    /// 12-month half-life exponential weights.
    ShortTerm,
}

impl Calibration {
    pub const ALL: [Calibration; 2] = [Calibration::LongTerm, Calibration::ShortTerm];

    pub fn name(self) -> &'static str {
        match self {
            Calibration::LongTerm => "long",
            Calibration::ShortTerm => "short",
        }
    }
}

impl FromStr for Calibration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "long" | "long-term" | "longterm" => Ok(Calibration::LongTerm),
            "short" | "short-term" | "shortterm" => Ok(Calibration::ShortTerm),
            other => Err(invalid(format!(
                "unknown calibration '{other}', expected long or short"
            ))),
        }
    }
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// 9 industries × 3 rating buckets, whole percents.
pub type SectorGrid = [[i8; 3]; 9];

/// Rows: credit spread twist, credit spread dispersion.
/// Columns: Treasury shift, Treasury twist. Whole percents.
pub type ExtraGrid = [[i8; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtraFactor {
    SpreadTwist,
    SpreadDispersion,
}

impl ExtraFactor {
    pub const ALL: [ExtraFactor; 2] = [ExtraFactor::SpreadTwist, ExtraFactor::SpreadDispersion];

    pub fn name(self) -> &'static str {
        match self {
            ExtraFactor::SpreadTwist => "Credit Spread Twist (Steepening)",
            ExtraFactor::SpreadDispersion => "Credit Spread Dispersion",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreasuryFactor {
    Shift,
    Twist,
}

impl TreasuryFactor {
    pub const ALL: [TreasuryFactor; 2] = [TreasuryFactor::Shift, TreasuryFactor::Twist];

    pub fn name(self) -> &'static str {
        match self {
            TreasuryFactor::Shift => "Treasury Shift",
            TreasuryFactor::Twist => "Treasury Twist",
        }
    }
}

/// One vintage × calibration set of published estimates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTables {
    pub vintage: Vintage,
    pub calibration: Calibration,
    pub shift_corr: SectorGrid,
    pub twist_corr: SectorGrid,
    pub extra_corr: ExtraGrid,
    pub multipliers: SectorGrid,
}

impl ReferenceTables {
    pub fn shift_corr(&self, s: SectorId) -> f64 {
        pct(self.shift_corr, s)
    }

    pub fn twist_corr(&self, s: SectorId) -> f64 {
        pct(self.twist_corr, s)
    }

    pub fn multiplier(&self, s: SectorId) -> f64 {
        pct(self.multipliers, s)
    }

    pub fn extra_corr(&self, spread: ExtraFactor, treasury: TreasuryFactor) -> f64 {
        f64::from(self.extra_corr[spread as usize][treasury as usize]) / 100.0
    }
}

fn pct(grid: SectorGrid, s: SectorId) -> f64 {
    f64::from(grid[s.industry.index()][s.rating.index()]) / 100.0
}

const LONG_2013: ReferenceTables = ReferenceTables {
    vintage: Vintage::Y2013,
    calibration: Calibration::LongTerm,
    shift_corr: [
        [-32, -33, -31],
        [-26, -33, -38],
        [-32, -35, -35],
        [-38, -34, -30],
        [-35, -32, -30],
        [-31, -34, -36],
        [-37, -37, -38],
        [-24, -35, -34],
        [-32, -34, -36],
    ],
    twist_corr: [
        [13, 13, 13],
        [11, 13, 12],
        [11, 12, 13],
        [13, 13, 14],
        [12, 12, 12],
        [9, 13, 14],
        [12, 13, 14],
        [10, 12, 13],
        [8, 13, 14],
    ],
    extra_corr: [[5, -1], [-42, 17]],
    multipliers: [
        [79, 81, 65],
        [83, 69, 46],
        [87, 79, 67],
        [84, 75, 63],
        [84, 82, 77],
        [88, 74, 59],
        [82, 79, 70],
        [87, 79, 69],
        [91, 82, 66],
    ],
};

const SHORT_2013: ReferenceTables = ReferenceTables {
    vintage: Vintage::Y2013,
    calibration: Calibration::ShortTerm,
    shift_corr: [
        [-39, -34, -38],
        [-21, -34, -42],
        [-25, -26, -36],
        [-29, -27, -32],
        [-25, -23, -26],
        [-19, -29, -37],
        [-21, -31, -36],
        [-34, -29, -30],
        [-23, -36, -15],
    ],
    twist_corr: [
        [-26, -24, -26],
        [-16, -23, -28],
        [-18, -18, -24],
        [-20, -19, -22],
        [-18, -17, -19],
        [-14, -20, -25],
        [-15, -22, -25],
        [-23, -20, -21],
        [-14, -25, -12],
    ],
    extra_corr: [[-21, -13], [-50, -33]],
    multipliers: [
        [68, 70, 48],
        [83, 65, 32],
        [88, 84, 62],
        [85, 79, 63],
        [88, 86, 78],
        [92, 75, 55],
        [88, 80, 66],
        [79, 83, 73],
        [93, 75, 82],
    ],
};

// The multiplier grid of this set is captioned 2004 at its source while the
// surrounding estimates are as of December 2003.
const LONG_2003: ReferenceTables = ReferenceTables {
    vintage: Vintage::Y2003,
    calibration: Calibration::LongTerm,
    shift_corr: [
        [-31, -31, -22],
        [-38, -31, -29],
        [-31, -43, -36],
        [-41, -41, -22],
        [-40, -35, -33],
        [-31, -38, -31],
        [-41, -43, -40],
        [-21, -36, -29],
        [-31, -35, -41],
    ],
    twist_corr: [
        [17, 19, 15],
        [20, 18, 16],
        [15, 21, 20],
        [19, 21, 15],
        [19, 17, 18],
        [16, 20, 18],
        [18, 21, 21],
        [11, 18, 16],
        [15, 18, 21],
    ],
    extra_corr: [[10, -13], [-56, 48]],
    multipliers: [
        [89, 87, 81],
        [88, 87, 84],
        [92, 87, 84],
        [89, 83, 79],
        [89, 89, 87],
        [89, 84, 78],
        [87, 86, 82],
        [93, 87, 81],
        [93, 88, 71],
    ],
};

const SHORT_2003: ReferenceTables = ReferenceTables {
    vintage: Vintage::Y2003,
    calibration: Calibration::ShortTerm,
    shift_corr: [
        [-56, -52, -46],
        [-52, -43, -45],
        [-61, -62, -56],
        [-58, -56, -49],
        [-57, -53, -55],
        [-44, -51, -45],
        [-57, -60, -60],
        [-56, -54, -40],
        [-60, -53, -55],
    ],
    twist_corr: [
        [33, 31, 30],
        [35, 33, 23],
        [23, 28, 31],
        [22, 32, 40],
        [25, 23, 25],
        [26, 32, 36],
        [26, 29, 30],
        [27, 31, 33],
        [21, 26, 36],
    ],
    extra_corr: [[9, -12], [-46, 44]],
    multipliers: [
        [84, 83, 79],
        [85, 79, 75],
        [83, 79, 75],
        [85, 75, 64],
        [83, 83, 79],
        [80, 76, 58],
        [80, 80, 77],
        [77, 77, 62],
        [89, 86, 61],
    ],
};

/// The bundled estimates for one vintage and calibration.
pub fn reference_table(vintage: Vintage, calibration: Calibration) -> &'static ReferenceTables {
    match (vintage, calibration) {
        (Vintage::Y2013, Calibration::LongTerm) => &LONG_2013,
        (Vintage::Y2013, Calibration::ShortTerm) => &SHORT_2013,
        (Vintage::Y2003, Calibration::LongTerm) => &LONG_2003,
        (Vintage::Y2003, Calibration::ShortTerm) => &SHORT_2003,
    }
}

/// Industry row labels as they appear in the published grids.
pub fn grid_row_label(industry: Industry) -> &'static str {
    industry.name()
}

/// Rating column labels in grid order.
pub fn grid_columns() -> [&'static str; 3] {
    [Rating::AaaAa.label(), Rating::A.label(), Rating::Bbb.label()]
}
