//! Subsidy making a target hydrogen output cost-optimal, from the maximisation ladder.
//!
//! Along the max lineage, `μ(ε)` is the marginal hydrogen per EUR of extra budget, so `1/μ` is
//! the marginal cost per MWh of pushing production to `M(ε)`. At ε = 0 that marginal cost is
//! nil and `1/μ` is taken as 0.

use crate::error::{Error, Result};
use crate::network::KG_PER_MWH;
use crate::pathway::{PathwayRecord, RecordSense};

/// One rung: slack, maximal production in Mt and the budget dual in MWh per EUR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rung {
    pub epsilon: f64,
    pub m_mt: f64,
    pub mu_raw: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Subsidy {
    pub eur_per_kg: f64,
    /// `eur_per_kg × target × 10⁹ kg/Mt`, EUR/a.
    pub volume_eur: f64,
    /// The target lies beyond the last rung, which is used as is.
    pub fallback: bool,
}

/// Marginal subsidy at a rung in EUR/kg.
fn inverse_mu(rung: &Rung) -> Result<f64> {
    if rung.epsilon == 0.0 {
        return Ok(0.0);
    }
    match rung.mu_raw {
        Some(mu) if mu > 0.0 && mu.is_finite() => Ok(1.0 / mu / KG_PER_MWH),
        other => Err(Error::InvalidArgument(format!(
            "budget dual at ε = {} is {:?}; a positive value is needed to price production",
            rung.epsilon, other
        ))),
    }
}

/// Interpolate `1/μ` linearly in production between the rungs bracketing `target_mt`.
///
/// The ladder must start at ε = 0, be strictly increasing in ε and non-decreasing in `M`.
/// Above the last rung its `1/μ` is used unchanged.
pub fn subsidy(target_mt: f64, ladder: &[Rung]) -> Result<Subsidy> {
    if !(target_mt >= 0.0) || !target_mt.is_finite() {
        return Err(Error::InvalidArgument(format!("target must be finite and ≥ 0, got {target_mt}")));
    }
    let first = ladder.first().ok_or_else(|| Error::InvalidArgument("empty ladder".into()))?;
    if first.epsilon != 0.0 {
        return Err(Error::InvalidArgument(format!("ladder must start at ε = 0, starts at {}", first.epsilon)));
    }
    for w in ladder.windows(2) {
        if !(w[1].epsilon > w[0].epsilon) {
            return Err(Error::InvalidArgument("ladder ε values must be strictly increasing".into()));
        }
        if w[1].m_mt < w[0].m_mt {
            return Err(Error::InvalidArgument(format!(
                "maximal production falls from {} Mt at ε = {} to {} Mt at ε = {}",
                w[0].m_mt, w[0].epsilon, w[1].m_mt, w[1].epsilon
            )));
        }
    }

    let priced = |t: f64, fallback: bool| Subsidy { eur_per_kg: t, volume_eur: t * target_mt * 1e9, fallback };
    if target_mt <= first.m_mt {
        return Ok(priced(0.0, false));
    }
    for w in ladder.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if target_mt > hi.m_mt {
            continue;
        }
        if target_mt == lo.m_mt {
            return Ok(priced(inverse_mu(lo)?, false));
        }
        if target_mt == hi.m_mt {
            return Ok(priced(inverse_mu(hi)?, false));
        }
        let span = hi.m_mt - lo.m_mt;
        let t = (hi.m_mt - target_mt) / span * inverse_mu(lo)? + (target_mt - lo.m_mt) / span * inverse_mu(hi)?;
        return Ok(priced(t, false));
    }
    let last = ladder.last().expect("non-empty");
    Ok(priced(inverse_mu(last)?, true))
}

/// Ladder of one scenario at one horizon: the optimal record at ε = 0 then the max records in
/// ascending ε. `None` when any of them is missing or unsolved.
pub fn subsidy_ladder(records: &[PathwayRecord], scenario_id: &str, horizon: i32) -> Option<Vec<Rung>> {
    let mine: Vec<&PathwayRecord> =
        records.iter().filter(|r| r.scenario_id == scenario_id && r.horizon == horizon).collect();
    let optimal = mine.iter().find(|r| r.sense == RecordSense::Optimal)?;
    if !optimal.is_optimal() {
        return None;
    }
    let mut ladder = vec![Rung { epsilon: 0.0, m_mt: optimal.h2_mt?, mu_raw: None }];
    let mut maxima: Vec<&&PathwayRecord> = mine.iter().filter(|r| r.sense == RecordSense::Max).collect();
    maxima.sort_by(|a, b| a.epsilon.unwrap_or(0.0).total_cmp(&b.epsilon.unwrap_or(0.0)));
    for r in maxima {
        if !r.is_optimal() {
            return None;
        }
        ladder.push(Rung { epsilon: r.epsilon?, m_mt: r.h2_mt?, mu_raw: r.mu_raw });
    }
    Some(ladder)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsidyTable {
    pub target_mt: f64,
    pub horizon: i32,
    pub per_scenario: Vec<(String, Subsidy)>,
    /// Scenarios without a complete ladder or whose ladder could not be priced, with the reason.
    pub excluded: Vec<(String, String)>,
    /// Mean over `per_scenario`; `None` when it is empty.
    pub mean_eur_per_kg: Option<f64>,
    pub mean_volume_eur: Option<f64>,
}

/// Subsidy for `target_mt` at `horizon` in every scenario present in `records`.
pub fn subsidy_table(records: &[PathwayRecord], target_mt: f64, horizon: i32) -> Result<SubsidyTable> {
    if !(target_mt >= 0.0) || !target_mt.is_finite() {
        return Err(Error::InvalidArgument(format!("target must be finite and ≥ 0, got {target_mt}")));
    }
    let mut ids: Vec<&str> = records.iter().map(|r| r.scenario_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut table = SubsidyTable {
        target_mt,
        horizon,
        per_scenario: Vec::new(),
        excluded: Vec::new(),
        mean_eur_per_kg: None,
        mean_volume_eur: None,
    };
    for id in ids {
        let Some(ladder) = subsidy_ladder(records, id, horizon) else {
            table.excluded.push((id.to_string(), "incomplete or unsolved ladder".into()));
            continue;
        };
        match subsidy(target_mt, &ladder) {
            Ok(s) => table.per_scenario.push((id.to_string(), s)),
            Err(Error::InvalidArgument(msg)) => table.excluded.push((id.to_string(), msg)),
            Err(e) => return Err(e),
        }
    }
    let n = table.per_scenario.len() as f64;
    if n > 0.0 {
        table.mean_eur_per_kg = Some(table.per_scenario.iter().map(|(_, s)| s.eur_per_kg).sum::<f64>() / n);
        table.mean_volume_eur = Some(table.per_scenario.iter().map(|(_, s)| s.volume_eur).sum::<f64>() / n);
    }
    Ok(table)
}
