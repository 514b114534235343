use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::normality::is_integrally_closed;
use crate::polytope::LatticePolytope;

use super::jumps::{enumerate_jumps_up, Jump};

pub enum Strategy<'a> {
    /// Largest jump volume; ties go to the lexicographically least new point.
    Greedy,
    /// Uniform choice among all jumps, drawn from the bit source.
    Random(&'a mut BitSource),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaximalReached,
    StepBudget,
    UserStop,
}

/// Per-step record: the jump taken and how many were available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkStep {
    pub jump: Jump,
    pub options: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTrace {
    /// `P_0, P_1, ..., P_n`.
    pub chain: Vec<LatticePolytope>,
    pub steps: Vec<WalkStep>,
    pub terminated: Termination,
}

impl WalkTrace {
    pub fn jumps(&self) -> impl Iterator<Item = &Jump> {
        self.steps.iter().map(|s| &s.jump)
    }

    /// Normalized volumes of `P_0, ..., P_n`.
    pub fn volumes(&self) -> Vec<BigInt> {
        self.chain.iter().map(LatticePolytope::normalized_volume).collect()
    }

    /// `sum_{i >= first} vol(P_i)^{-s}` over the recorded chain, for
    /// `first` in `{0, 1}`.
    pub fn zeta_partial(&self, s: u32, first: usize) -> BigRational {
        self.volumes()
            .into_iter()
            .skip(first)
            .map(|v| BigRational::new(BigInt::one(), Pow::pow(v, s)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Running sums `sum_{i=first..=k} vol(P_i)^{-s}` for every `k >= first`.
    pub fn zeta_prefixes(&self, s: u32, first: usize) -> Vec<BigRational> {
        let mut acc = BigRational::zero();
        self.volumes()
            .into_iter()
            .skip(first)
            .map(|v| {
                acc += BigRational::new(BigInt::one(), Pow::pow(v, s));
                acc.clone()
            })
            .collect()
    }
}

pub fn walk(p0: &LatticePolytope, strategy: Strategy<'_>, budget: usize) -> Result<WalkTrace> {
    walk_with(p0, strategy, budget, |_| false)
}

/// Like [`walk`], with a callback consulted after every step; returning
/// `true` stops the walk with [`Termination::UserStop`].
pub fn walk_with(
    p0: &LatticePolytope,
    mut strategy: Strategy<'_>,
    budget: usize,
    mut stop: impl FnMut(&WalkStep) -> bool,
) -> Result<WalkTrace> {
    if budget == 0 {
        return Err(Error::InvalidArgument("step budget must be positive".into()));
    }
    if !is_integrally_closed(p0) {
        return Err(Error::NotIntegrallyClosed);
    }
    let mut chain = vec![p0.clone()];
    let mut steps = Vec::new();
    let terminated = loop {
        if steps.len() == budget {
            break Termination::StepBudget;
        }
        let current = chain.last().expect("nonempty chain");
        let jumps = enumerate_jumps_up(current)?;
        if jumps.is_empty() {
            break Termination::MaximalReached;
        }
        let options = jumps.len();
        let pick = match &mut strategy {
            // jumps are sorted by point, so the first maximum is the least point
            Strategy::Greedy => {
                let best = jumps.iter().map(|j| &j.volume).max().expect("nonempty");
                jumps.iter().position(|j| &j.volume == best).expect("present")
            }
            Strategy::Random(src) => src.uniform_below(options as u64)? as usize,
        };
        let jump = jumps.into_iter().nth(pick).expect("index in range");
        chain.push(jump.target.clone());
        let step = WalkStep { jump, options };
        let halt = stop(&step);
        steps.push(step);
        if halt {
            break Termination::UserStop;
        }
    };
    Ok(WalkTrace {
        chain,
        steps,
        terminated,
    })
}
