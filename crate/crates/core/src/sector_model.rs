//! Industry/rating sectors, equal-weight sector portfolios and a seeded
//! synthetic market with a known correlation structure.

use std::fmt;
use std::str::FromStr;

use chrono::{Months, NaiveDate};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::covariance::{AlignedSeries, CorrelationMatrix, PSD_TOLERANCE};
use crate::error::{invalid, Error, Result};

/// Bonds in a hypothetical sector portfolio.
pub const DEFAULT_BONDS_PER_SECTOR: usize = 20;

/// Label of the Treasury shift factor in synthetic and estimated series.
pub const SHIFT_LABEL: &str = "shift";
/// Label of the Treasury twist factor in synthetic and estimated series.
pub const TWIST_LABEL: &str = "twist";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Industry {
    BankingBrokerage,
    FinanceInsuranceReits,
    BasicIndustries,
    ConsumerCyclical,
    ConsumerNonCyclical,
    CommunicationTechnology,
    EnergyTransportation,
    Utilities,
    NonCorporate,
}

impl Industry {
    pub const ALL: [Industry; 9] = [
        Industry::BankingBrokerage,
        Industry::FinanceInsuranceReits,
        Industry::BasicIndustries,
        Industry::ConsumerCyclical,
        Industry::ConsumerNonCyclical,
        Industry::CommunicationTechnology,
        Industry::EnergyTransportation,
        Industry::Utilities,
        Industry::NonCorporate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Industry::BankingBrokerage => "Banking and Brokerage",
            Industry::FinanceInsuranceReits => "Financial Companies, Insurance and REITS",
            Industry::BasicIndustries => "Basic Industries and Capital Goods",
            Industry::ConsumerCyclical => "Consumer Cyclical",
            Industry::ConsumerNonCyclical => "Consumer Non-Cyclical",
            Industry::CommunicationTechnology => "Communication and Technology",
            Industry::EnergyTransportation => "Energy and Transportation",
            Industry::Utilities => "Utilities",
            Industry::NonCorporate => "Non-Corporate",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            Industry::BankingBrokerage => "banking",
            Industry::FinanceInsuranceReits => "finance",
            Industry::BasicIndustries => "basic_industries",
            Industry::ConsumerCyclical => "consumer_cyclical",
            Industry::ConsumerNonCyclical => "consumer_noncyclical",
            Industry::CommunicationTechnology => "comm_tech",
            Industry::EnergyTransportation => "energy_transport",
            Industry::Utilities => "utilities",
            Industry::NonCorporate => "non_corporate",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

fn normalize(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl FromStr for Industry {
    type Err = Error;

    /// Accepts the slug or the full industry name, ignoring case, punctuation
    /// and a trailing plural "s".
    fn from_str(s: &str) -> Result<Self> {
        let key = normalize(s);
        let singular = key.strip_suffix('s').unwrap_or(&key);
        Industry::ALL
            .into_iter()
            .find(|ind| {
                let (slug, name) = (normalize(ind.slug()), normalize(ind.name()));
                [key.as_str(), singular].iter().any(|k| *k == slug || *k == name)
            })
            .ok_or_else(|| invalid(format!("unknown industry '{s}'")))
    }
}

impl fmt::Display for Industry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rating {
    AaaAa,
    A,
    Bbb,
}

impl Rating {
    pub const ALL: [Rating; 3] = [Rating::AaaAa, Rating::A, Rating::Bbb];

    pub fn label(self) -> &'static str {
        match self {
            Rating::AaaAa => "AAA/AA",
            Rating::A => "A",
            Rating::Bbb => "BBB",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for Rating {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize(s).as_str() {
            "aaaaa" | "aaa" | "aa" => Ok(Rating::AaaAa),
            "a" => Ok(Rating::A),
            "bbb" => Ok(Rating::Bbb),
            _ => Err(invalid(format!("unknown rating bucket '{s}'"))),
        }
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// An industry × rating bucket; 27 combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorId {
    pub industry: Industry,
    pub rating: Rating,
}

impl SectorId {
    pub fn new(industry: Industry, rating: Rating) -> Self {
        Self { industry, rating }
    }

    /// All sectors, industry-major in table order.
    pub fn all() -> impl Iterator<Item = SectorId> {
        Industry::ALL
            .into_iter()
            .flat_map(|i| Rating::ALL.into_iter().map(move |r| SectorId::new(i, r)))
    }
}

/// Formats as `<industry slug>:<rating>`, e.g. `banking:A`.
impl fmt::Display for SectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.industry, self.rating)
    }
}

impl FromStr for SectorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ind, rat) = s
            .rsplit_once(':')
            .ok_or_else(|| invalid(format!("sector '{s}' is not of the form industry:rating")))?;
        Ok(SectorId::new(ind.trim().parse()?, rat.trim().parse()?))
    }
}

/// Equal-weight basket of bonds standing in for a sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorPortfolio {
    sector: SectorId,
    bond_spreads: Vec<f64>,
    avg_maturity: f64,
    avg_oas: f64,
}

impl SectorPortfolio {
    pub fn new(sector: SectorId, bond_spreads: Vec<f64>, avg_maturity: f64) -> Result<Self> {
        if bond_spreads.is_empty() {
            return Err(invalid("a sector portfolio needs at least one bond"));
        }
        if bond_spreads.iter().any(|s| !s.is_finite()) || !avg_maturity.is_finite() || avg_maturity < 0.0 {
            return Err(invalid("bond spreads and maturity must be finite"));
        }
        let avg_oas = bond_spreads.iter().sum::<f64>() / bond_spreads.len() as f64;
        Ok(Self {
            sector,
            bond_spreads,
            avg_maturity,
            avg_oas,
        })
    }

    /// `n_bonds` bonds all quoted at the sector's average OAS.
    pub fn matching(sector: SectorId, n_bonds: usize, avg_maturity: f64, avg_oas: f64) -> Result<Self> {
        Self::new(sector, vec![avg_oas; n_bonds], avg_maturity)
    }

    pub fn sector(&self) -> SectorId {
        self.sector
    }

    pub fn n_bonds(&self) -> usize {
        self.bond_spreads.len()
    }

    pub fn bond_spreads(&self) -> &[f64] {
        &self.bond_spreads
    }

    pub fn avg_maturity(&self) -> f64 {
        self.avg_maturity
    }

    pub fn avg_oas(&self) -> f64 {
        self.avg_oas
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.n_bonds() as f64
    }

    /// Portfolio OAS change given the common sector move and one
    /// issuer-specific move per bond.
    pub fn spread_change(&self, factor_change: f64, idio_changes: &[f64]) -> Result<f64> {
        if idio_changes.len() != self.n_bonds() {
            return Err(invalid(format!(
                "expected {} issuer-specific changes, got {}",
                self.n_bonds(),
                idio_changes.len()
            )));
        }
        portfolio_spread_change(factor_change, idio_changes)
    }
}

/// `factor_change + mean(idio_changes)`: the sector factor loads with
/// coefficient one on an equal-weight basket.
pub fn portfolio_spread_change(factor_change: f64, idio_changes: &[f64]) -> Result<f64> {
    if idio_changes.is_empty() {
        return Err(invalid("no bonds in portfolio"));
    }
    Ok(factor_change + idio_changes.iter().sum::<f64>() / idio_changes.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthFactor {
    Shift,
    Twist,
    Sector(SectorId),
}

impl FromStr for SynthFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            SHIFT_LABEL => Ok(SynthFactor::Shift),
            TWIST_LABEL => Ok(SynthFactor::Twist),
            other => other.parse().map(SynthFactor::Sector),
        }
    }
}

/// Parameters of a synthetic market.
///
/// `target` holds the factor labels (`shift`, `twist` or a sector id), their
/// per-period volatilities in bp and their correlations. Every sector factor
/// is observed through an equal-weight portfolio of `n_bonds` bonds carrying
/// iid issuer noise of `idio_vol` bp per period.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_periods: usize,
    pub target: CorrelationMatrix,
    pub idio_vol: f64,
    pub n_bonds: usize,
    pub seed: u64,
    /// Date of the first generated period; later periods step by one month.
    pub start: NaiveDate,
}

impl SynthConfig {
    pub fn new(target: CorrelationMatrix, n_periods: usize, seed: u64) -> Self {
        Self {
            n_periods,
            target,
            idio_vol: 0.0,
            n_bonds: DEFAULT_BONDS_PER_SECTOR,
            seed,
            start: NaiveDate::from_ymd_opt(1990, 1, 31).expect("valid date"),
        }
    }

    pub fn factors(&self) -> Result<Vec<SynthFactor>> {
        self.target
            .labels()
            .iter()
            .map(|l| {
                l.parse()
                    .map_err(|_| Error::InvalidConfig(format!("unknown factor '{l}'")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_periods < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_periods must be at least 2, got {}",
                self.n_periods
            )));
        }
        if self.n_bonds == 0 {
            return Err(Error::InvalidConfig("n_bonds must be positive".into()));
        }
        if !self.idio_vol.is_finite() || self.idio_vol < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "idio_vol must be non-negative, got {}",
                self.idio_vol
            )));
        }
        if self.target.dim() == 0 {
            return Err(Error::InvalidConfig("no factors configured".into()));
        }
        if !self.target.is_psd() {
            return Err(Error::InvalidConfig(format!(
                "target correlation is not positive semidefinite: smallest eigenvalue {:e}",
                self.target.min_eigenvalue()
            )));
        }
        self.factors().map(|_| ())
    }
}

/// Spectral square root `V · sqrt(max(Λ, 0))` of a PSD covariance matrix.
fn covariance_root(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = cov.clone().symmetric_eigen();
    let scale = cov.diagonal().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if let Some(min) = eig.eigenvalues.iter().copied().reduce(f64::min) {
        if min < -PSD_TOLERANCE * scale {
            return Err(Error::InvalidConfig(format!(
                "target covariance is not positive semidefinite: smallest eigenvalue {min:e}"
            )));
        }
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(eig.eigenvectors * DMatrix::from_diagonal(&roots))
}

/// Draws jointly Gaussian factor changes with the target covariance and
/// reports shift/twist directly and every sector through its portfolio.
///
/// The stream comes from ChaCha8 seeded with `cfg.seed`; for each period the
/// factor normals are drawn first, then `n_bonds` issuer normals per sector
/// factor in label order (skipped when `idio_vol` is zero).
pub fn generate_market(cfg: &SynthConfig) -> Result<AlignedSeries> {
    cfg.validate()?;
    let factors = cfg.factors()?;
    let k = factors.len();
    let root = covariance_root(&cfg.target.covariance())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut values = DMatrix::zeros(cfg.n_periods, k);
    let mut z = DVector::zeros(k);
    let mut idio = vec![0.0; cfg.n_bonds];
    for t in 0..cfg.n_periods {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let f = &root * &z;
        for (j, factor) in factors.iter().enumerate() {
            values[(t, j)] = match factor {
                SynthFactor::Shift | SynthFactor::Twist => f[j],
                SynthFactor::Sector(_) => {
                    if cfg.idio_vol > 0.0 {
                        for e in idio.iter_mut() {
                            let n: f64 = StandardNormal.sample(&mut rng);
                            *e = cfg.idio_vol * n;
                        }
                    }
                    portfolio_spread_change(f[j], &idio)?
                }
            };
        }
    }
    let timestamps = (0..cfg.n_periods)
        .map(|i| {
            cfg.start
                .checked_add_months(Months::new(i as u32))
                .ok_or_else(|| Error::InvalidConfig("synthetic calendar overflow".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    AlignedSeries::new(cfg.target.labels().to_vec(), timestamps, values)
}
