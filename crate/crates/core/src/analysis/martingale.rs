use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::bottleneck::thresholds_for_b;
use crate::engine::Trace;

/// Largest `|F(S_n) - F(S_{n-1}) - (completions(n) - delta(n))|` over the trace.
pub fn bookkeeping_residual_max(trace: &Trace) -> u64 {
    let mut prev_f = 1i64;
    let mut worst = 0u64;
    for s in &trace.steps {
        let res = s.f as i64 - prev_f - (s.completions as i64 - s.delta as i64);
        worst = worst.max(res.unsigned_abs());
        prev_f = s.f as i64;
    }
    worst
}

/// Completions over the arrivals `alpha .. alpha + len`, compared with
/// `len +- (h_M - h_1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCheck {
    pub alpha: u64,
    pub len: u64,
    pub completions: u64,
    pub lower: u64,
    pub upper: u64,
}

impl WindowCheck {
    pub fn holds(&self) -> bool {
        (self.lower..=self.upper).contains(&self.completions)
    }
}

pub fn completion_window(trace: &Trace, alpha: u64, len: u64) -> Result<WindowCheck, AnalysisError> {
    if alpha == 0 || alpha + len - 1 > trace.len() {
        return Err(AnalysisError::BeyondHorizon {
            t: alpha + len - 1,
            horizon: trace.len(),
        });
    }
    let spread = (trace.params.h_max() - trace.params.h_min()) as u64;
    let completions = trace.steps[(alpha - 1) as usize..(alpha - 1 + len) as usize]
        .iter()
        .map(|s| s.completions as u64)
        .sum();
    Ok(WindowCheck {
        alpha,
        len,
        completions,
        lower: len.saturating_sub(spread),
        upper: len + spread,
    })
}

/// Free-tip count against `Y`, the process that starts at `F(S_alpha)` and
/// moves by `1 - delta` per arrival.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartingaleMonitor {
    pub alpha: u64,
    /// `Y(S_n)` for `n = alpha ..= horizon`.
    #[serde(skip)]
    pub y: Vec<i64>,
    pub max_gap: u64,
    pub bound: u64,
    /// The uniform bound is only claimed once every earlier arrival could
    /// have finished its proof of work.
    pub bound_applies: bool,
    pub a_star: u64,
    pub first_f_hit: Option<u64>,
    pub first_l_hit: Option<u64>,
}

impl MartingaleMonitor {
    pub fn within_bound(&self) -> bool {
        !self.bound_applies || self.max_gap <= self.bound
    }
}

pub fn martingale_check(trace: &Trace, alpha: u64) -> Result<MartingaleMonitor, AnalysisError> {
    if alpha >= trace.len() {
        return Err(AnalysisError::BeyondHorizon {
            t: alpha,
            horizon: trace.len(),
        });
    }
    let th = thresholds_for_b(&trace.params, trace.params.b)?;
    let b = trace.params.b;
    let mut y = Vec::with_capacity((trace.len() - alpha + 1) as usize);
    let mut cur = trace.counts(alpha).1 as i64;
    y.push(cur);
    let mut max_gap = 0;
    let (mut first_f_hit, mut first_l_hit) = (None, None);
    for n in alpha..=trace.len() {
        let (l, f, _) = trace.counts(n);
        if n > alpha {
            cur += 1 - trace.steps[n as usize - 1].delta as i64;
            y.push(cur);
        }
        max_gap = max_gap.max((f as i64 - cur).unsigned_abs());
        if first_f_hit.is_none() && (f as u64) <= th.a_star {
            first_f_hit = Some(n);
        }
        if first_l_hit.is_none() && (l as u64) <= b {
            first_l_hit = Some(n);
        }
    }
    Ok(MartingaleMonitor {
        alpha,
        y,
        max_gap,
        bound: th.delta_yf,
        bound_applies: alpha >= trace.params.h_max() as u64,
        a_star: th.a_star,
        first_f_hit,
        first_l_hit,
    })
}
