//! Model parameters and their validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a transaction. Arrival `n` carries id `n`; the genesis is `0`.
pub type VertexId = u64;

const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{field} must not be empty")]
    Empty { field: &'static str },
    #[error("{field} must be strictly increasing positive integers")]
    NotIncreasing { field: &'static str },
    #[error("{field} has {got} probabilities but its support has {expected} values")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{field} must be strictly positive")]
    NonPositive { field: &'static str },
    #[error("{field} probabilities sum to {sum}, expected 1")]
    NotNormalized { field: &'static str, sum: f64 },
    #[error("b = {b} must exceed {b_min}")]
    ThresholdTooSmall { b: u64, b_min: u64 },
    #[error("{0}")]
    Invalid(String),
}

/// How many parents each arrival selects (with replacement).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParentCount {
    Fixed(u32),
    Random { support: Vec<u32>, probs: Vec<f64> },
}

impl ParentCount {
    pub fn support(&self) -> Vec<u32> {
        match self {
            ParentCount::Fixed(k) => vec![*k],
            ParentCount::Random { support, .. } => support.clone(),
        }
    }

    pub fn contains(&self, k: u32) -> bool {
        match self {
            ParentCount::Fixed(f) => *f == k,
            ParentCount::Random { support, .. } => support.contains(&k),
        }
    }

    pub fn max(&self) -> u32 {
        self.support().into_iter().max().unwrap_or(0)
    }

    /// Smallest admissible count that allows at least `distinct` distinct parents.
    pub fn smallest_at_least(&self, distinct: u32) -> Option<u32> {
        self.support().into_iter().filter(|&k| k >= distinct).min()
    }
}

/// Parameters of the tangle process.
///
/// `h` is the sorted support of the proof-of-work duration, `eps_support`
/// the support of the tip-set lookback and `b` the tip-count threshold that
/// defines a bottleneck anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub h: Vec<u32>,
    pub p_theta: Vec<f64>,
    pub eps_support: Vec<u32>,
    pub p_eps: Vec<f64>,
    pub k_parents: ParentCount,
    pub b: u64,
}

impl ModelParams {
    /// `h = (2, 3)`, `eps in {1, 2}` with uniform weights, two parents, `b = 33`.
    pub fn reference() -> Self {
        ModelParams {
            h: vec![2, 3],
            p_theta: vec![0.5, 0.5],
            eps_support: vec![1, 2],
            p_eps: vec![0.5, 0.5],
            k_parents: ParentCount::Fixed(2),
            b: 33,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check_support("h", &self.h)?;
        check_probs("p_theta", self.h.len(), &self.p_theta)?;
        check_support("eps_support", &self.eps_support)?;
        check_probs("p_eps", self.eps_support.len(), &self.p_eps)?;
        match &self.k_parents {
            ParentCount::Fixed(0) => return Err(ConfigError::NonPositive { field: "k_parents" }),
            ParentCount::Fixed(_) => {}
            ParentCount::Random { support, probs } => {
                check_support("k_parents.support", support)?;
                check_probs("k_parents.probs", support.len(), probs)?;
            }
        }
        let b_min = self.b_min();
        if self.b <= b_min {
            return Err(ConfigError::ThresholdTooSmall { b: self.b, b_min });
        }
        Ok(())
    }

    pub fn h_min(&self) -> u32 {
        self.h[0]
    }

    pub fn h_max(&self) -> u32 {
        *self.h.last().expect("validated")
    }

    /// Number of distinct proof-of-work durations.
    pub fn m(&self) -> u64 {
        self.h.len() as u64
    }

    pub fn eps_min(&self) -> u32 {
        self.eps_support[0]
    }

    pub fn eps_max(&self) -> u32 {
        *self.eps_support.last().expect("validated")
    }

    pub fn k_max(&self) -> u32 {
        self.k_parents.max()
    }

    /// Lower limit that `b` has to exceed.
    pub fn b_min(&self) -> u64 {
        let (h1, hm) = (self.h_min() as u64, self.h_max() as u64);
        10 * hm + 3 * self.m() * self.eps_max() as u64 + 2 - 6 * h1
    }
}

fn check_support(field: &'static str, v: &[u32]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(ConfigError::Empty { field });
    }
    if v[0] == 0 || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::NotIncreasing { field });
    }
    Ok(())
}

fn check_probs(field: &'static str, expected: usize, p: &[f64]) -> Result<(), ConfigError> {
    if p.len() != expected {
        return Err(ConfigError::LengthMismatch {
            field,
            expected,
            got: p.len(),
        });
    }
    if p.iter().any(|&x| x.is_nan() || x <= 0.0 || !x.is_finite()) {
        return Err(ConfigError::NonPositive { field });
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(ConfigError::NotNormalized { field, sum });
    }
    Ok(())
}
