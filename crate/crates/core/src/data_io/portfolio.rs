//! Portfolio and sector-statistics files.
//!
//! Portfolio: `id,industry,rating,d_mod,d_spread,weight,price,maturity`, with
//! `treasury` in the industry column for government bonds. Weights must sum
//! to one.
//!
//! Sector statistics: `industry,rating,sigma_spread,rho_shift,rho_twist`.

use std::path::Path;

use crate::duration::SectorStats;
use crate::error::{Error, Result};
use crate::scenario::{validate_weights, BondPosition, StatsTable};
use crate::sector_model::{Industry, Rating, SectorId};

use super::tables::ReferenceTables;
use super::{read_file, Table};

const TREASURY: &str = "treasury";

pub fn load_portfolio(path: &Path) -> Result<Vec<BondPosition>> {
    parse_portfolio(&read_file(path)?, path)
}

pub fn parse_portfolio(text: &str, path: &Path) -> Result<Vec<BondPosition>> {
    let t = Table::parse(text, path)?;
    let cols = [
        "id", "industry", "rating", "d_mod", "d_spread", "weight", "price", "maturity",
    ]
    .map(|c| t.col(c));
    let [id, ind, rat, dm, ds, w, pr, mat] = cols;
    let (id, ind, rat, dm, ds, w, pr, mat) = (id?, ind?, rat?, dm?, ds?, w?, pr?, mat?);
    let mut out = Vec::with_capacity(t.rows().len());
    for (line, row) in t.rows() {
        let line = *line;
        let sector = if row[ind].eq_ignore_ascii_case(TREASURY) {
            None
        } else {
            let industry: Industry = row[ind].parse().map_err(|e: Error| t.error(line, e.to_string()))?;
            let rating: Rating = row[rat].parse().map_err(|e: Error| t.error(line, e.to_string()))?;
            Some(SectorId::new(industry, rating))
        };
        let pos = BondPosition::new(
            row[id].clone(),
            sector,
            t.number(line, &row[dm], "d_mod")?,
            t.number(line, &row[ds], "d_spread")?,
            t.number(line, &row[w], "weight")?,
            t.number(line, &row[pr], "price")?,
            t.number(line, &row[mat], "maturity")?,
        )
        .map_err(|e| t.error(line, e.to_string()))?;
        out.push(pos);
    }
    if out.is_empty() {
        return Err(t.error(1, "portfolio has no positions"));
    }
    validate_weights(&out).map_err(|e| t.error(0, e.to_string()))?;
    Ok(out)
}

pub fn load_sector_stats(path: &Path) -> Result<StatsTable> {
    parse_sector_stats(&read_file(path)?, path)
}

pub fn parse_sector_stats(text: &str, path: &Path) -> Result<StatsTable> {
    let t = Table::parse(text, path)?;
    let (ind, rat, sig, rs, rt) = (
        t.col("industry")?,
        t.col("rating")?,
        t.col("sigma_spread")?,
        t.col("rho_shift")?,
        t.col("rho_twist")?,
    );
    let mut out = StatsTable::new();
    for (line, row) in t.rows() {
        let line = *line;
        let industry: Industry = row[ind].parse().map_err(|e: Error| t.error(line, e.to_string()))?;
        let rating: Rating = row[rat].parse().map_err(|e: Error| t.error(line, e.to_string()))?;
        let sector = SectorId::new(industry, rating);
        if out.get(sector).is_ok() {
            return Err(t.error(line, format!("duplicate statistics for {sector}")));
        }
        let stats = SectorStats::new(
            sector,
            t.number(line, &row[sig], "sigma_spread")?,
            t.number(line, &row[rs], "rho_shift")?,
            t.number(line, &row[rt], "rho_twist")?,
        )
        .map_err(|e| t.error(line, e.to_string()))?;
        out.insert(stats);
    }
    Ok(out)
}

/// Sector statistics built from bundled correlations and a spread volatility
/// supplied per sector by `sigma_spread`.
pub fn stats_from_tables(tables: &ReferenceTables, sigma_spread: impl Fn(SectorId) -> f64) -> Result<StatsTable> {
    SectorId::all()
        .map(|s| SectorStats::new(s, sigma_spread(s), tables.shift_corr(s), tables.twist_corr(s)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_io::{reference_table, Calibration, Vintage};

    fn p() -> &'static Path {
        Path::new("p.csv")
    }

    #[test]
    fn parses_mixed_portfolio() {
        let text = "id,industry,rating,d_mod,d_spread,weight,price,maturity\n\
            corp,consumer_cyclical,A,7.5,7.5,0.6,100,10\n\
            ust,treasury,,7.5,0,0.4,100,10\n";
        let ps = parse_portfolio(text, p()).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps[1].is_treasury());
        assert_eq!(ps[0].sector.unwrap().to_string(), "consumer_cyclical:A");
    }

    #[test]
    fn rejects_bad_weights_and_rows() {
        let bad_w = "id,industry,rating,d_mod,d_spread,weight,price,maturity\nc,banking,A,5,5,0.5,100,7\n";
        assert!(matches!(parse_portfolio(bad_w, p()), Err(Error::Parse { .. })));
        let neg = "id,industry,rating,d_mod,d_spread,weight,price,maturity\nc,banking,A,-5,5,1,100,7\n";
        assert!(matches!(parse_portfolio(neg, p()), Err(Error::Parse { line: 2, .. })));
        let empty = "id,industry,rating,d_mod,d_spread,weight,price,maturity\n";
        assert!(parse_portfolio(empty, p()).is_err());
    }

    #[test]
    fn stats_file() {
        let text = "industry,rating,sigma_spread,rho_shift,rho_twist\nconsumer_cyclical,A,18.2,-0.34,0.13\n";
        let s = parse_sector_stats(text, p()).unwrap();
        let cc = s.get("consumer_cyclical:A".parse().unwrap()).unwrap();
        assert_eq!((cc.sigma_spread, cc.rho_shift), (18.2, -0.34));
        let dup = format!("{text}consumer_cyclical,A,1,0,0\n");
        assert!(matches!(
            parse_sector_stats(&dup, p()),
            Err(Error::Parse { line: 3, .. })
        ));
        let bad_rho = "industry,rating,sigma_spread,rho_shift,rho_twist\nbanking,A,10,-1.5,0\n";
        assert!(parse_sector_stats(bad_rho, p()).is_err());
    }

    #[test]
    fn tables_to_stats() {
        let t = reference_table(Vintage::Y2013, Calibration::LongTerm);
        let s = stats_from_tables(t, |_| 14.0).unwrap();
        assert_eq!(s.len(), 27);
        assert_eq!(s.get("banking:A".parse().unwrap()).unwrap().rho_shift, -0.33);
    }
}
