//! Discrete-time Markov surrogate of opioid use disorder progression.
//!
//! States: NoUse -> OUD -> {Treatment, ODDeath}, Treatment -> {OUD,
//! Remission}. ODDeath and Remission are absorbing. Agents are independent
//! and identically distributed, so each day the transitions out of a state
//! are drawn as a multinomial split of that state's occupancy. This has the
//! same law as stepping every agent individually.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::binomial::binomial;
use super::params::TransitionParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    NoUse,
    Oud,
    Treatment,
    Remission,
    OdDeath,
}

impl State {
    pub const ALL: [State; 5] = [
        State::NoUse,
        State::Oud,
        State::Treatment,
        State::Remission,
        State::OdDeath,
    ];
}

/// Agent counts per state on one day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Occupancy {
    pub no_use: u32,
    pub oud: u32,
    pub treatment: u32,
    pub remission: u32,
    pub od_death: u32,
}

impl Occupancy {
    pub fn initial(params: &TransitionParams) -> Self {
        Occupancy {
            no_use: params.population - params.initial_oud,
            oud: params.initial_oud,
            ..Default::default()
        }
    }

    pub fn total(&self) -> u64 {
        [self.no_use, self.oud, self.treatment, self.remission, self.od_death]
            .iter()
            .map(|&c| u64::from(c))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOutcome {
    pub od_deaths: u32,
    /// OUD -> Treatment transitions over the horizon.
    pub treated_entries: u32,
}

/// Splits `n` agents into (first, second, stay) with marginal daily
/// probabilities `p_first` and `p_second`.
fn split<R: RngCore + ?Sized>(rng: &mut R, n: u32, p_first: f64, p_second: f64) -> (u32, u32) {
    let first = binomial(rng, n, p_first);
    let rest = n - first;
    let second = if p_first < 1.0 {
        binomial(rng, rest, (p_second / (1.0 - p_first)).min(1.0))
    } else {
        0
    };
    (first, second)
}

/// Runs one replication, reporting the occupancy after each day to `observe`
/// (day 0 is the initial state).
pub fn simulate_with<R, F>(params: &TransitionParams, rng: &mut R, mut observe: F) -> SimOutcome
where
    R: RngCore + ?Sized,
    F: FnMut(u32, &Occupancy),
{
    let mut occ = Occupancy::initial(params);
    let mut treated_entries = 0u32;
    let p_od_death = params.p_od_death();
    observe(0, &occ);
    for day in 1..=params.horizon_days {
        let onset = binomial(rng, occ.no_use, params.p_onset);
        let (treat, death) = split(rng, occ.oud, params.p_treat, p_od_death);
        let (relapse, remit) = split(rng, occ.treatment, params.p_relapse, params.p_remit);

        occ.no_use -= onset;
        occ.oud = occ.oud + onset + relapse - treat - death;
        occ.treatment = occ.treatment + treat - relapse - remit;
        occ.remission += remit;
        occ.od_death += death;
        treated_entries += treat;
        observe(day, &occ);
    }
    SimOutcome {
        od_deaths: occ.od_death,
        treated_entries,
    }
}

pub fn simulate_with_rng<R: RngCore + ?Sized>(params: &TransitionParams, rng: &mut R) -> SimOutcome {
    simulate_with(params, rng, |_, _| {})
}

/// One replication seeded from a single 64-bit seed.
pub fn simulate_replication(params: &TransitionParams, seed: u64) -> SimOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_with_rng(params, &mut rng)
}

/// State-occupancy probabilities of a single agent after `horizon_days`,
/// indexed as [`State::ALL`].
pub fn expected_occupancy(params: &TransitionParams) -> [f64; 5] {
    let pop = f64::from(params.population);
    let mut dist = [
        f64::from(params.population - params.initial_oud) / pop,
        f64::from(params.initial_oud) / pop,
        0.0,
        0.0,
        0.0,
    ];
    let p_od_death = params.p_od_death();
    for _ in 0..params.horizon_days {
        let [no_use, oud, treatment, remission, dead] = dist;
        dist = [
            no_use * (1.0 - params.p_onset),
            no_use * params.p_onset
                + oud * (1.0 - params.p_treat - p_od_death)
                + treatment * params.p_relapse,
            oud * params.p_treat + treatment * (1.0 - params.p_relapse - params.p_remit),
            remission + treatment * params.p_remit,
            dead + oud * p_od_death,
        ];
    }
    dist
}

/// Expected OD deaths over the horizon, by cohort recursion.
pub fn expected_outcome(params: &TransitionParams) -> f64 {
    f64::from(params.population) * expected_occupancy(params)[4]
}
