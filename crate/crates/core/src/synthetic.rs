//! Seeded random scenarios for property tests and benchmarks.
//!
//! Every generated scenario passes validation: producers have a positive
//! profile in every slot, so demand is always reachable in continuous mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ScenarioError;
use crate::scenario::tables::*;
use crate::scenario::{AssetKind, InvestmentMethod, Scenario, Year};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    /// Vintage-less profiles only, so every vintage behaves alike.
    Homogeneous,
    /// Per-vintage profiles scaled down from the base; the newest vintage
    /// keeps the base profile, older ones are pointwise at or below it.
    VintageScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOptions {
    pub profiles: ProfileMode,
    pub max_years: usize,
    pub max_producers: usize,
    /// Largest gap between consecutive milestone years.
    pub max_year_gap: i32,
    pub max_lifetime: u32,
    /// Allow a pre-horizon vintage with initial units.
    pub legacy_units: bool,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        SyntheticOptions {
            profiles: ProfileMode::Homogeneous,
            max_years: 3,
            max_producers: 2,
            max_year_gap: 10,
            max_lifetime: 30,
            legacy_units: true,
        }
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Raw tables of one random scenario; identical seeds give identical tables.
pub fn random_tables(seed: u64, opts: &SyntheticOptions) -> ScenarioTables {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = ScenarioTables::default();

    let n_years = rng.gen_range(2..=opts.max_years.max(2));
    let mut years = vec![Year(2030)];
    for _ in 1..n_years {
        let gap = rng.gen_range(1..=opts.max_year_gap.max(1));
        years.push(Year(years.last().unwrap().0 + gap));
    }
    t.years = years.iter().map(|&year| YearRow { year }).collect();

    let n_blocks = rng.gen_range(1..=2);
    let blocks: Vec<String> = (0..n_blocks).map(|b| format!("b{}", b + 1)).collect();
    for &y in &years {
        t.rep_periods.push(RepPeriodRow { year: y, rep_period: "rp1".into(), weight: rng.gen_range(1..=3) as f64 });
        for b in &blocks {
            t.time_blocks.push(TimeBlockRow { year: y, rep_period: "rp1".into(), block: b.clone(), duration: rng.gen_range(1..=12) as f64 });
        }
    }

    t.assets.push(AssetRow {
        name: "load".into(),
        kind: AssetKind::Consumer,
        investment_method: InvestmentMethod::None,
        technical_lifetime: 1,
        unit_capacity: 1.0,
    });
    for &y in &years {
        for b in &blocks {
            t.demand.push(DemandRow { asset: "load".into(), year: y, rep_period: "rp1".into(), block: b.clone(), value: rng.gen_range(0..=40) as f64 });
        }
    }

    let n_producers = rng.gen_range(1..=opts.max_producers.max(1));
    for p in 0..n_producers {
        let name = format!("gen{}", p + 1);
        let lifetime = rng.gen_range(1..=opts.max_lifetime.max(1));
        t.assets.push(AssetRow {
            name: name.clone(),
            kind: AssetKind::Producer,
            investment_method: InvestmentMethod::Compact,
            technical_lifetime: lifetime,
            unit_capacity: rng.gen_range(1..=5) as f64 * 5.0,
        });
        // the first producer can build every year, which keeps demand reachable
        let mut investable: Vec<bool> = years.iter().map(|_| p == 0 || rng.gen_bool(0.7)).collect();
        if !investable.iter().any(|&b| b) {
            let k = rng.gen_range(0..years.len());
            investable[k] = true;
        }
        let legacy = (opts.legacy_units && rng.gen_bool(0.4)).then(|| {
            let v = Year(years[0].0 - rng.gen_range(1..=10));
            (v, rng.gen_range(1..=2) as f64)
        });
        let legacy_at = |y: Year| match legacy {
            Some((v, units)) if v.0 <= y.0 && y.0 < v.0 + lifetime as i32 => units,
            _ => 0.0,
        };
        let inv_cost = rng.gen_range(5..=20) as f64 * 100.0;
        for (k, &y) in years.iter().enumerate() {
            t.asset_year.push(AssetYearRow {
                asset: name.clone(),
                year: y,
                investment_cost: inv_cost,
                fixed_cost: rng.gen_range(0..=50) as f64,
                capacity: None,
                initial_units: legacy_at(y),
                investable: investable[k] as u8,
            });
            if let Some((v, _)) = legacy {
                if legacy_at(y) > 0.0 {
                    t.asset_vintage.push(AssetVintageRow { asset: name.clone(), year: y, vintage: v, fixed_cost: None, initial_units: legacy_at(y) });
                }
            }
        }

        let flow = format!("{name}_load");
        t.flows.push(FlowRow { flow: flow.clone(), from_asset: name.clone(), to_asset: "load".into() });
        for &y in &years {
            t.flow_year.push(FlowYearRow { flow: flow.clone(), year: y, variable_cost: rng.gen_range(0..=20) as f64 });
        }

        let mut base = Vec::new();
        for &y in &years {
            for b in &blocks {
                let value = round2(rng.gen_range(0.3..=1.0));
                base.push((y, b.clone(), value));
                t.profiles.push(ProfileRow { asset: name.clone(), vintage: None, year: y, rep_period: "rp1".into(), block: b.clone(), value });
            }
        }
        if opts.profiles == ProfileMode::VintageScaled {
            let mut vintages: Vec<Year> = years.iter().zip(&investable).filter(|(_, &i)| i).map(|(&y, _)| y).collect();
            if let Some((v, _)) = legacy {
                vintages.insert(0, v);
            }
            let newest = *vintages.last().unwrap();
            for &v in &vintages {
                let factor = if v == newest { 1.0 } else { round2(rng.gen_range(0.5..=1.0)) };
                for (y, b, value) in &base {
                    if v.0 <= y.0 && y.0 < v.0 + lifetime as i32 {
                        t.profiles.push(ProfileRow {
                            asset: name.clone(),
                            vintage: Some(v),
                            year: *y,
                            rep_period: "rp1".into(),
                            block: b.clone(),
                            value: round2(value * factor),
                        });
                    }
                }
            }
        }
    }
    t
}

pub fn random_scenario(seed: u64, opts: &SyntheticOptions) -> Result<Scenario, ScenarioError> {
    Scenario::from_tables(random_tables(seed, opts))
}
