//! Yield-curve and sector OAS history files.
//!
//! Yield files carry `date,y2,y5,y10,y20,y30` in percent; levels are held in
//! bp once loaded. Spread files carry `date,industry,rating,oas_bp`.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;

use crate::curve_factors::CurveObservation;
use crate::error::{Error, Result};
use crate::sector_model::{Industry, Rating, SectorId};

use super::{read_file, Table, FORMAT_VERSION};

const YIELD_COLUMNS: [&str; 5] = ["y2", "y5", "y10", "y20", "y30"];

pub fn load_yields(path: &Path) -> Result<Vec<CurveObservation>> {
    parse_yields(&read_file(path)?, path)
}

pub fn parse_yields(text: &str, path: &Path) -> Result<Vec<CurveObservation>> {
    let table = Table::parse(text, path)?;
    let date_col = table.col("date")?;
    let cols = YIELD_COLUMNS.iter().map(|c| table.col(c)).collect::<Result<Vec<_>>>()?;
    let mut out: Vec<CurveObservation> = Vec::with_capacity(table.rows().len());
    for (line, row) in table.rows() {
        let date = table.date(*line, &row[date_col])?;
        if let Some(prev) = out.last() {
            if date <= prev.date {
                return Err(Error::NonMonotonicDates {
                    path: table.path().to_path_buf(),
                    line: *line,
                    date: date.to_string(),
                });
            }
        }
        let mut levels_bp = [0.0; 5];
        for (k, (&c, name)) in cols.iter().zip(YIELD_COLUMNS).enumerate() {
            levels_bp[k] = table.number(*line, &row[c], name)? * 100.0;
        }
        out.push(CurveObservation { date, levels_bp });
    }
    Ok(out)
}

/// Writes observations back in the yield file format (percent).
pub fn render_yields(obs: &[CurveObservation]) -> String {
    let mut out = format!("# format_version={FORMAT_VERSION}\ndate,{}\n", YIELD_COLUMNS.join(","));
    for o in obs {
        out.push_str(&o.date.to_string());
        for v in o.levels_bp {
            out.push(',');
            out.push_str(&(v / 100.0).to_string());
        }
        out.push('\n');
    }
    out
}

/// OAS levels in bp per sector, each in strictly increasing date order.
pub type SpreadHistory = BTreeMap<SectorId, Vec<(NaiveDate, f64)>>;

pub fn load_spreads(path: &Path) -> Result<SpreadHistory> {
    parse_spreads(&read_file(path)?, path)
}

pub fn parse_spreads(text: &str, path: &Path) -> Result<SpreadHistory> {
    let table = Table::parse(text, path)?;
    let (dc, ic, rc, oc) = (
        table.col("date")?,
        table.col("industry")?,
        table.col("rating")?,
        table.col("oas_bp")?,
    );
    let mut out = SpreadHistory::new();
    for (line, row) in table.rows() {
        let date = table.date(*line, &row[dc])?;
        let industry: Industry = row[ic].parse().map_err(|e: Error| table.error(*line, e.to_string()))?;
        let rating: Rating = row[rc].parse().map_err(|e: Error| table.error(*line, e.to_string()))?;
        let oas = table.number(*line, &row[oc], "oas_bp")?;
        let series = out.entry(SectorId::new(industry, rating)).or_default();
        if let Some((prev, _)) = series.last() {
            if date <= *prev {
                return Err(Error::NonMonotonicDates {
                    path: table.path().to_path_buf(),
                    line: *line,
                    date: date.to_string(),
                });
            }
        }
        series.push((date, oas));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("test.csv")
    }

    #[test]
    fn two_rows_in_bp() {
        let text = "date,y2,y5,y10,y20,y30\n2013-05-31,0.30,1.05,2.16,2.93,3.28\n2013-06-28,0.36,1.41,2.49,3.21,3.50\n";
        let obs = parse_yields(text, p()).unwrap();
        assert_eq!(obs.len(), 2);
        assert!((obs[0].levels_bp[2] - 216.0).abs() < 1e-9);
        assert!((obs[1].levels_bp[4] - 350.0).abs() < 1e-9);
    }

    #[test]
    fn shuffled_dates_name_the_row() {
        let text = "date,y2,y5,y10,y20,y30\n2013-05-31,1,1,1,1,1\n2013-07-31,1,1,1,1,1\n2013-06-28,1,1,1,1,1\n";
        match parse_yields(text, p()) {
            Err(Error::NonMonotonicDates { line, date, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(date, "2013-06-28");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_cells_have_locations() {
        let bad_num = "date,y2,y5,y10,y20,y30\n2013-05-31,1,1,x,1,1\n";
        assert!(matches!(parse_yields(bad_num, p()), Err(Error::Parse { line: 2, .. })));
        let bad_date = "date,y2,y5,y10,y20,y30\n31/05/2013,1,1,1,1,1\n";
        assert!(matches!(parse_yields(bad_date, p()), Err(Error::Parse { line: 2, .. })));
        let short_row = "date,y2,y5,y10,y20,y30\n2013-05-31,1,1,1,1\n";
        assert!(matches!(
            parse_yields(short_row, p()),
            Err(Error::Parse { line: 2, .. })
        ));
        let missing = "date,y2,y5,y10,y30\n2013-05-31,1,1,1,1\n";
        assert!(matches!(parse_yields(missing, p()), Err(Error::MissingColumn { column, .. }) if column == "y20"));
        assert!(matches!(parse_yields("", p()), Err(Error::Parse { .. })));
        let comma_decimal = "date,y2,y5,y10,y20,y30\n2013-05-31,\"1,5\",1,1,1,1\n";
        assert!(parse_yields(comma_decimal, p()).is_err());
    }

    #[test]
    fn version_checked() {
        let ok = "# format_version=1\ndate,y2,y5,y10,y20,y30\n";
        assert!(parse_yields(ok, p()).unwrap().is_empty());
        let bad = "# format_version=7\ndate,y2,y5,y10,y20,y30\n";
        assert!(matches!(parse_yields(bad, p()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn spreads_grouped_by_sector() {
        let text = "date,industry,rating,oas_bp\n\
            2013-05-31,banking,A,150\n\
            2013-05-31,Utilities,BBB,170\n\
            2013-06-28,banking,A,155.5\n";
        let h = parse_spreads(text, p()).unwrap();
        assert_eq!(h.len(), 2);
        let b = &h[&SectorId::new(Industry::BankingBrokerage, Rating::A)];
        assert_eq!(b[1].1, 155.5);
        let dup = "date,industry,rating,oas_bp\n2013-05-31,banking,A,150\n2013-05-31,banking,A,151\n";
        assert!(matches!(
            parse_spreads(dup, p()),
            Err(Error::NonMonotonicDates { line: 3, .. })
        ));
        let unknown = "date,industry,rating,oas_bp\n2013-05-31,mining,A,150\n";
        assert!(matches!(parse_spreads(unknown, p()), Err(Error::Parse { line: 2, .. })));
    }

    proptest! {
        #[test]
        fn write_then_load(levels in proptest::collection::vec(proptest::array::uniform5(-100.0f64..2000.0), 1..30)) {
            let start = NaiveDate::from_ymd_opt(1990, 1, 31).unwrap();
            let obs: Vec<CurveObservation> = levels
                .iter()
                .enumerate()
                .map(|(i, l)| CurveObservation { date: start + chrono::Days::new(30 * i as u64), levels_bp: *l })
                .collect();
            let back = parse_yields(&render_yields(&obs), p()).unwrap();
            prop_assert_eq!(back.len(), obs.len());
            for (a, b) in back.iter().zip(&obs) {
                prop_assert_eq!(a.date, b.date);
                for k in 0..5 {
                    prop_assert!((a.levels_bp[k] - b.levels_bp[k]).abs() <= 1e-9);
                }
            }
        }
    }
}
