use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::grid::TreatmentCondition;

/// Base calibration of the surrogate model. The condition-dependent
/// probabilities are given as a baseline plus a per-level effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    pub population: u32,
    pub horizon_days: u32,
    /// Agents in OUD on day 0; everyone else starts in NoUse.
    pub initial_oud: u32,
    pub p_onset: f64,
    pub p_treat_base: f64,
    pub p_treat_gain: f64,
    pub p_relapse: f64,
    pub p_remit: f64,
    pub p_overdose: f64,
    pub p_death_base: f64,
    pub p_death_drop: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            population: 10_000,
            horizon_days: 730,
            initial_oud: 1000,
            p_onset: 0.0002,
            p_treat_base: 0.01,
            p_treat_gain: 0.005,
            p_relapse: 0.002,
            p_remit: 0.003,
            p_overdose: 0.004,
            p_death_base: 0.10,
            p_death_drop: 0.015,
        }
    }
}

/// Daily transition probabilities at one treatment condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParams {
    pub population: u32,
    pub horizon_days: u32,
    pub initial_oud: u32,
    /// NoUse -> OUD
    pub p_onset: f64,
    /// OUD -> Treatment
    pub p_treat: f64,
    /// Treatment -> OUD
    pub p_relapse: f64,
    /// Treatment -> Remission
    pub p_remit: f64,
    /// Overdose probability for an agent in OUD.
    pub p_overdose: f64,
    /// Death probability given an overdose.
    pub p_death: f64,
}

fn check_probability(key: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::params(key, format!("{p} is not a probability in [0, 1]")));
    }
    Ok(())
}

impl SimParams {
    /// Checks every probability and the level-effect bounds for levels
    /// `0..=max_x1` (Buprenorphine) and `0..=max_x2` (Naloxone).
    pub fn validate(&self, max_x1: usize, max_x2: usize) -> Result<()> {
        for (key, p) in [
            ("p_onset", self.p_onset),
            ("p_treat_base", self.p_treat_base),
            ("p_treat_gain", self.p_treat_gain),
            ("p_relapse", self.p_relapse),
            ("p_remit", self.p_remit),
            ("p_overdose", self.p_overdose),
            ("p_death_base", self.p_death_base),
            ("p_death_drop", self.p_death_drop),
        ] {
            check_probability(key, p)?;
        }
        if self.population == 0 {
            return Err(Error::params("population", "must be at least 1"));
        }
        if self.initial_oud > self.population {
            return Err(Error::params(
                "initial_oud",
                format!("{} exceeds population {}", self.initial_oud, self.population),
            ));
        }
        let top_treat = self.p_treat_base + self.p_treat_gain * max_x1 as f64;
        if top_treat > 1.0 {
            return Err(Error::params(
                "p_treat_gain",
                format!("p_treat_base + p_treat_gain * {max_x1} = {top_treat} exceeds 1"),
            ));
        }
        let bottom_death = self.p_death_base - self.p_death_drop * max_x2 as f64;
        if bottom_death < 0.0 {
            return Err(Error::params(
                "p_death_drop",
                format!("p_death_base - p_death_drop * {max_x2} = {bottom_death} is negative"),
            ));
        }
        // Outflows from OUD are largest at the top Buprenorphine level and
        // the baseline Naloxone level.
        self.resolve(max_x1, 0)?.validate()
    }

    fn resolve(&self, x1: usize, x2: usize) -> Result<TransitionParams> {
        let p_treat = self.p_treat_base + self.p_treat_gain * x1 as f64;
        let p_death = self.p_death_base - self.p_death_drop * x2 as f64;
        if !(0.0..=1.0).contains(&p_treat) {
            return Err(Error::params(
                "p_treat_gain",
                format!("treatment probability {p_treat} at buprenorphine level {x1} is outside [0, 1]"),
            ));
        }
        if !(0.0..=1.0).contains(&p_death) {
            return Err(Error::params(
                "p_death_drop",
                format!("death probability {p_death} at naloxone level {x2} is outside [0, 1]"),
            ));
        }
        Ok(TransitionParams {
            population: self.population,
            horizon_days: self.horizon_days,
            initial_oud: self.initial_oud,
            p_onset: self.p_onset,
            p_treat,
            p_relapse: self.p_relapse,
            p_remit: self.p_remit,
            p_overdose: self.p_overdose,
            p_death,
        })
    }
}

/// Applies the level effects of `cond` to the base calibration.
pub fn condition_params(base: &SimParams, cond: &TreatmentCondition) -> Result<TransitionParams> {
    let params = base.resolve(cond.buprenorphine_index, cond.naloxone_index)?;
    params.validate()?;
    Ok(params)
}

impl TransitionParams {
    /// Daily probability that an agent in OUD dies of an overdose.
    pub fn p_od_death(&self) -> f64 {
        self.p_overdose * self.p_death
    }

    pub fn validate(&self) -> Result<()> {
        for (key, p) in [
            ("p_onset", self.p_onset),
            ("p_treat", self.p_treat),
            ("p_relapse", self.p_relapse),
            ("p_remit", self.p_remit),
            ("p_overdose", self.p_overdose),
            ("p_death", self.p_death),
        ] {
            check_probability(key, p)?;
        }
        if self.population == 0 {
            return Err(Error::params("population", "must be at least 1"));
        }
        if self.initial_oud > self.population {
            return Err(Error::params("initial_oud", "exceeds population"));
        }
        let oud_out = self.p_treat + self.p_od_death();
        if oud_out > 1.0 {
            return Err(Error::params(
                "p_treat",
                format!("daily outflow from OUD sums to {oud_out} > 1"),
            ));
        }
        let treat_out = self.p_relapse + self.p_remit;
        if treat_out > 1.0 {
            return Err(Error::params(
                "p_relapse",
                format!("daily outflow from Treatment sums to {treat_out} > 1"),
            ));
        }
        Ok(())
    }
}
