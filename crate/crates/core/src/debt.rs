//! Period-by-period national accounts for one-off government spending under
//! different financing modes.
//!
//! A "generation" is everyone alive in a period. Spending happens in period 1.
//! Debt is a single bullet bond redeemed with simple interest in the final
//! period through a tax levied in proportion to income. The cohort is split
//! into bondholders (who buy all domestically absorbed bonds) and
//! non-holders. All quantities are deviations from, or levels alongside, a
//! no-spending economy whose output is `cohort_income` every period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Financing {
    Tax,
    InternalDebt,
    ExternalDebt,
}

impl Financing {
    pub const ALL: [Financing; 3] = [Financing::Tax, Financing::InternalDebt, Financing::ExternalDebt];

    pub fn as_str(self) -> &'static str {
        match self {
            Financing::Tax => "tax",
            Financing::InternalDebt => "internal_debt",
            Financing::ExternalDebt => "external_debt",
        }
    }
}

impl std::str::FromStr for Financing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Financing::ALL.into_iter().find(|f| f.as_str() == s).ok_or_else(|| {
            Error::validation(
                "financing",
                format!("expected tax, internal_debt or external_debt, got {s:?}"),
            )
        })
    }
}

fn default_bondholder_share() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerConfig {
    pub periods: u32,
    /// Output per period of the whole cohort.
    pub cohort_income: f64,
    /// Government purchases in period 1.
    pub gov_spending: f64,
    pub financing: Financing,
    /// Simple interest per period on outstanding debt.
    pub interest_rate: f64,
    /// Fraction of domestically absorbed debt that displaces investment.
    pub crowding_out_share: f64,
    /// Output lost per period per unit of displaced capital.
    pub marginal_product: f64,
    /// Households save the whole deficit, so bond purchases never displace
    /// investment.
    #[serde(default)]
    pub ricardian: bool,
    /// Income share of the households that buy the domestic bonds.
    #[serde(default = "default_bondholder_share")]
    pub bondholder_share: f64,
    /// No foreign sector: bonds cannot be sold abroad, so external financing
    /// is absorbed at home.
    #[serde(default)]
    pub closed_economy: bool,
}

impl LedgerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.periods < 2 {
            return Err(Error::validation(
                "periods",
                format!("must be >= 2, got {}", self.periods),
            ));
        }
        for (name, v) in [
            ("cohort_income", self.cohort_income),
            ("gov_spending", self.gov_spending),
            ("interest_rate", self.interest_rate),
            ("marginal_product", self.marginal_product),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.crowding_out_share) {
            return Err(Error::validation(
                "crowding_out_share",
                format!("must lie in [0, 1], got {}", self.crowding_out_share),
            ));
        }
        if !(0.0..=1.0).contains(&self.bondholder_share) {
            return Err(Error::validation(
                "bondholder_share",
                format!("must lie in [0, 1], got {}", self.bondholder_share),
            ));
        }
        if self.gov_spending > self.cohort_income {
            return Err(Error::Infeasible(format!(
                "period-1 spending {} exceeds period-1 output {}",
                self.gov_spending, self.cohort_income
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: LedgerConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }

    fn effective_financing(&self) -> Financing {
        match self.financing {
            Financing::ExternalDebt if self.closed_economy => Financing::InternalDebt,
            f => f,
        }
    }

    fn effective_crowding(&self) -> f64 {
        if self.ricardian {
            0.0
        } else {
            self.crowding_out_share
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PeriodRecord {
    /// One-based period number.
    pub period: u32,
    pub output: f64,
    pub gov_spending: f64,
    pub taxes: f64,
    pub debt_issued: f64,
    pub debt_outstanding: f64,
    pub debt_service: f64,
    pub transfers_to_domestic_bondholders: f64,
    pub payments_abroad: f64,
    /// Goods bought with foreign lending.
    pub foreign_inflow: f64,
    /// Change in private investment against the no-spending economy.
    pub investment: f64,
    pub aggregate_consumption: f64,
    pub bondholder_consumption: f64,
    pub non_holder_consumption: f64,
}

impl PeriodRecord {
    /// Sources minus uses of goods: output plus foreign inflow against
    /// consumption, government purchases, investment and payments abroad.
    pub fn resource_gap(&self) -> f64 {
        self.output + self.foreign_inflow
            - (self.aggregate_consumption + self.gov_spending + self.investment + self.payments_abroad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationalLedger {
    pub financing: Financing,
    pub records: Vec<PeriodRecord>,
}

impl GenerationalLedger {
    pub fn consumption(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.aggregate_consumption).collect()
    }

    pub fn final_debt(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.debt_outstanding)
    }
}

pub fn run_ledger(config: &LedgerConfig) -> Result<GenerationalLedger> {
    config.validate()?;
    let y = config.cohort_income;
    let g = config.gov_spending;
    let h = config.bondholder_share;
    let financing = config.effective_financing();
    let debt = match financing {
        Financing::Tax => 0.0,
        _ => g,
    };
    let kappa = match financing {
        Financing::InternalDebt => config.effective_crowding(),
        _ => 0.0,
    };
    let displaced = kappa * debt;
    let lost_output = config.marginal_product * displaced;
    let periods = config.periods;
    let redemption = debt * (1.0 + config.interest_rate * f64::from(periods - 1));

    let mut records = Vec::with_capacity(periods as usize);
    let first = match financing {
        Financing::Tax => PeriodRecord {
            taxes: g,
            aggregate_consumption: y - g,
            bondholder_consumption: h * (y - g),
            non_holder_consumption: (1.0 - h) * (y - g),
            ..PeriodRecord::default()
        },
        Financing::InternalDebt => PeriodRecord {
            debt_issued: debt,
            debt_outstanding: debt,
            investment: -displaced,
            aggregate_consumption: y - (debt - displaced),
            bondholder_consumption: h * y - (debt - displaced),
            non_holder_consumption: (1.0 - h) * y,
            ..PeriodRecord::default()
        },
        Financing::ExternalDebt => PeriodRecord {
            debt_issued: debt,
            debt_outstanding: debt,
            foreign_inflow: debt,
            aggregate_consumption: y,
            bondholder_consumption: h * y,
            non_holder_consumption: (1.0 - h) * y,
            ..PeriodRecord::default()
        },
    };
    records.push(PeriodRecord {
        period: 1,
        output: y,
        gov_spending: g,
        ..first
    });

    for period in 2..=periods {
        let output = y - lost_output;
        let last = period == periods;
        let service = if last { redemption } else { 0.0 };
        let (transfers, abroad) = match financing {
            Financing::Tax => (0.0, 0.0),
            Financing::InternalDebt => (service, 0.0),
            Financing::ExternalDebt => (0.0, service),
        };
        // taxes fund the repayment; abroad it leaves the country, at home it
        // comes back to bondholders
        let taxes = service;
        let consumption = output - taxes + transfers;
        records.push(PeriodRecord {
            period,
            output,
            taxes,
            debt_outstanding: if last { 0.0 } else { debt },
            debt_service: service,
            transfers_to_domestic_bondholders: transfers,
            payments_abroad: abroad,
            aggregate_consumption: consumption,
            bondholder_consumption: h * (output - taxes) + transfers,
            non_holder_consumption: (1.0 - h) * (output - taxes),
            ..PeriodRecord::default()
        });
    }
    Ok(GenerationalLedger {
        financing: config.financing,
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinancingComparison {
    pub tax: GenerationalLedger,
    pub internal_debt: GenerationalLedger,
    pub external_debt: GenerationalLedger,
}

impl FinancingComparison {
    pub fn get(&self, f: Financing) -> &GenerationalLedger {
        match f {
            Financing::Tax => &self.tax,
            Financing::InternalDebt => &self.internal_debt,
            Financing::ExternalDebt => &self.external_debt,
        }
    }
}

/// Runs the same config under every financing mode.
pub fn compare_financing(config: &LedgerConfig) -> Result<FinancingComparison> {
    let run = |financing| {
        run_ledger(&LedgerConfig {
            financing,
            ..config.clone()
        })
    };
    Ok(FinancingComparison {
        tax: run(Financing::Tax)?,
        internal_debt: run(Financing::InternalDebt)?,
        external_debt: run(Financing::ExternalDebt)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WartimeOutcome {
    pub financing: Financing,
    pub period1_consumption_drop: f64,
}

/// Period-1 consumption loss in a closed economy with no capital: nothing can
/// be displaced from investment and nothing can be imported, so the goods the
/// government takes come out of current consumption whatever the financing.
pub fn wartime_no_capital_demo(gov_spending: f64, cohort_income: f64, financing: Financing) -> Result<WartimeOutcome> {
    let config = LedgerConfig {
        periods: 2,
        cohort_income,
        gov_spending,
        financing,
        interest_rate: 0.0,
        crowding_out_share: 0.0,
        marginal_product: 0.0,
        ricardian: false,
        bondholder_share: default_bondholder_share(),
        closed_economy: true,
    };
    let ledger = run_ledger(&config)?;
    Ok(WartimeOutcome {
        financing,
        period1_consumption_drop: cohort_income - ledger.records[0].aggregate_consumption,
    })
}
