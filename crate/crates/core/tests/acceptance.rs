//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use tangleproof::analysis::{
    completion_window, confirmed_set, martingale_check, reachable, tip_recurrence, History, Snapshot,
};
use tangleproof::bottleneck::{interchange_parents, Label, Labeling};
use tangleproof::engine::{run, DecisionSampler, Engine, Overrides, Trace};
use tangleproof::experiment::{self, ExperimentConfig};
use tangleproof::{fixtures, io, ArrivalDecision, ModelParams, ParentCount, TangleState, VertexId};

const SEEDS: std::ops::Range<u64> = 1..11;
const STEPS: u64 = 100_000;

type Check = Result<String, String>;

struct Line {
    id: String,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: &str, name: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> Line {
    let t = Instant::now();
    let res = f();
    let elapsed = t.elapsed();
    let (mut pass, mut detail) = match res {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail = format!("{detail}; took longer than {limit:?}");
        }
    }
    Line {
        id: id.to_string(),
        name,
        pass,
        detail,
        elapsed,
    }
}

fn print(line: &Line) {
    println!(
        "[{}] {:<12} {:<36} {:>7.2}s  {}",
        if line.pass { "PASS" } else { "FAIL" },
        line.id,
        line.name,
        line.elapsed.as_secs_f64(),
        line.detail
    );
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn with_k(k: ParentCount) -> ModelParams {
    ModelParams {
        k_parents: k,
        ..ModelParams::reference()
    }
}

fn laws() -> Vec<(&'static str, ModelParams)> {
    vec![
        ("k=3", with_k(ParentCount::Fixed(3))),
        (
            "k in {1,3}",
            with_k(ParentCount::Random {
                support: vec![1, 3],
                probs: vec![0.5, 0.5],
            }),
        ),
    ]
}

fn runs(p: &ModelParams) -> Vec<Trace> {
    SEEDS
        .into_par_iter()
        .map(|s| run(p, s, STEPS, &Overrides::new()).expect("simulation"))
        .collect()
}

// ---------------------------------------------------------------- criterion 1

/// Recounts completions, delta and F from the decisions alone and compares
/// them with the recorded rows.
fn recount(trace: &Trace) -> Result<(), String> {
    let p = &trace.params;
    let len = trace.len() as usize;
    let w_bound = p.k_max() as u64 * p.h_max() as u64;
    let mut completions = vec![0u64; len + p.h_max() as usize + 1];
    for s in &trace.steps {
        completions[s.n as usize + s.decision.theta as usize] += 1;
    }
    let mut first_child = vec![u64::MAX; len + 1];
    let mut f: i64 = 1;
    for s in &trace.steps {
        let n = s.n;
        let mut delta = 0;
        for &q in &s.decision.distinct_parents() {
            if first_child[q as usize] == u64::MAX {
                first_child[q as usize] = n;
                delta += 1;
            }
        }
        let c = completions[n as usize] as i64;
        f += c - delta;
        ensure(s.completions as i64 == c, || format!("seed {} step {n}: completions {} vs recount {c}", trace.seed, s.completions))?;
        ensure(s.delta as i64 == delta, || format!("seed {} step {n}: delta {} vs recount {delta}", trace.seed, s.delta))?;
        ensure(s.f as i64 == f, || format!("seed {} step {n}: F {} vs recount {f}", trace.seed, s.f))?;
        ensure(s.l == s.f + s.w, || format!("seed {} step {n}: L != F + W", trace.seed))?;
        ensure(s.w as u64 <= w_bound, || format!("seed {} step {n}: W = {} above {w_bound}", trace.seed, s.w))?;
    }
    Ok(())
}

fn c1(traces: &[Trace]) -> Check {
    traces.par_iter().try_for_each(recount)?;
    let residual = traces
        .iter()
        .map(tangleproof::analysis::bookkeeping_residual_max)
        .max()
        .unwrap_or(0);
    ensure(residual == 0, || format!("bookkeeping residual {residual}"))?;
    let w = traces.iter().flat_map(|t| t.steps.iter().map(|s| s.w)).max().unwrap_or(0);
    Ok(format!("{} seeds x {STEPS} steps exact, residual 0, max W {w}", traces.len()))
}

// ---------------------------------------------------------------- criterion 2

fn c2(traces: &[Trace]) -> Check {
    let len = 1000;
    let counts: Vec<(u64, u64)> = traces
        .par_iter()
        .map(|t| {
            let mut windows = 0;
            let mut alpha = 100;
            while alpha + len - 1 <= t.len() {
                let w = completion_window(t, alpha, len).map_err(|e| e.to_string())?;
                ensure(w.holds(), || {
                    format!("seed {} window at {alpha}: {} completions", t.seed, w.completions)
                })?;
                windows += 1;
                alpha += 100;
            }
            Ok((windows, t.seed))
        })
        .collect::<Result<_, String>>()?;
    let total: u64 = counts.iter().map(|c| c.0).sum();
    Ok(format!("{total} windows of {len} within +-1"))
}

// ---------------------------------------------------------------- criterion 3

fn c3(traces: &[Trace]) -> Check {
    let worst = traces
        .par_iter()
        .map(|t| {
            let mut worst = 0;
            for alpha in (1000..t.len()).step_by(1000) {
                let m = martingale_check(t, alpha).map_err(|e| e.to_string())?;
                ensure(m.bound_applies && m.within_bound(), || {
                    format!("seed {} anchor {alpha}: |F - Y| = {} above {}", t.seed, m.max_gap, m.bound)
                })?;
                worst = worst.max(m.max_gap);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<u64>, String>>()?;
    Ok(format!("max |F - Y| = {} <= 2", worst.into_iter().max().unwrap_or(0)))
}

// ---------------------------------------------------------------- criterion 4

fn excursion_check(trace: &Trace, b: u64) -> Result<u64, String> {
    let rec = tip_recurrence(trace, b).map_err(|e| e.to_string())?;
    let max_l = trace.steps.iter().map(|s| s.l).max().unwrap_or(0);
    ensure(rec.completed_excursions >= 100, || {
        format!(
            "seed {}: {} completed excursions above b = {b} (max L = {max_l})",
            trace.seed, rec.completed_excursions
        )
    })?;
    let open = rec.excursions.iter().filter(|e| e.end.is_none()).count();
    ensure(open == 0, || format!("seed {}: excursion without return", trace.seed))?;
    Ok(rec.completed_excursions)
}

fn c4(p: &ModelParams) -> Check {
    let results: Vec<Result<u64, String>> = (1..=3u64)
        .into_par_iter()
        .map(|s| excursion_check(&run(p, s, 1_000_000, &Overrides::new()).unwrap(), p.b))
        .collect();
    let errs: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    ensure(errs.is_empty(), || errs.join("; "))?;
    Ok(format!("{:?} completed excursions", results.into_iter().map(Result::unwrap).collect::<Vec<_>>()))
}

/// Arrivals that only approve already-approved tips, the same choice the
/// first forced phase makes.
fn pending_pick(state: &TangleState, p: &ModelParams, k: u32) -> ArrivalDecision {
    let pool = state.tips_at_lookback(p.eps_min()).unwrap();
    let free = state.free_tips();
    let x = pool.iter().copied().find(|v| !free.contains(v)).unwrap_or(pool[0]);
    ArrivalDecision::new(p.h_max(), p.eps_min(), &vec![x; k as usize])
}

/// Pushes the tip count above `b` every 10^4 arrivals, then lets the
/// process run freely.
fn injected_run(p: &ModelParams, seed: u64, steps: u64) -> Trace {
    let k = p.k_parents.smallest_at_least(1).unwrap();
    let mut eng = Engine::new(p.clone(), seed).unwrap();
    let mut forcing = 0u64;
    for n in 1..=steps {
        if n % 10_000 == 5_000 {
            forcing = 200;
        }
        if eng.state().l() as u64 > p.b + 5 {
            forcing = 0;
        }
        if forcing > 0 {
            forcing -= 1;
            let d = pending_pick(eng.state(), p, k);
            eng.step(Some(&d)).unwrap();
        } else {
            eng.step(None).unwrap();
        }
    }
    eng.into_trace()
}

fn c4_probe(p: &ModelParams) -> Check {
    let results: Vec<Result<u64, String>> = (1..=3u64)
        .into_par_iter()
        .map(|s| {
            let t = injected_run(p, s, 1_000_000);
            recount(&t)?;
            excursion_check(&t, p.b)
        })
        .collect();
    let errs: Vec<String> = results.iter().filter_map(|r| r.clone().err()).collect();
    ensure(errs.is_empty(), || errs.join("; "))?;
    Ok(format!(
        "{:?} injected excursions, all returned below b",
        results.into_iter().map(Result::unwrap).collect::<Vec<_>>()
    ))
}

// ---------------------------------------------------------------- criteria 5, 6

fn force_cfg(p: &ModelParams, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        h: p.h.clone(),
        p_theta: p.p_theta.clone(),
        eps_support: p.eps_support.clone(),
        p_eps: p.p_eps.clone(),
        k_parents: p.k_parents.clone(),
        b: p.b,
        seeds: vec![seed],
        search_from: 1000,
        ..ExperimentConfig::default()
    }
}

fn c5(outcome: &experiment::ForceOutcome) -> Check {
    let plan = &outcome.plans[0];
    let report = &outcome.reports[0];
    let th = &plan.thresholds;
    ensure((th.kappa_a, th.kappa_b, th.kappa_c) == (20, 22, 12828), || {
        format!("kappas {} / {} / {}", th.kappa_a, th.kappa_b, th.kappa_c)
    })?;
    ensure(report.deviations.is_empty(), || format!("{} deviations", report.deviations.len()))?;
    for (name, c) in [
        ("temp2", &report.temp2),
        ("temp3", &report.temp3),
        ("temp4", &report.temp4),
        ("cauchy1", &report.cauchy1),
    ] {
        ensure(c.holds, || format!("{name}: {}", c.counterexample.clone().unwrap_or_default()))?;
    }
    ensure(outcome.trace.len() >= plan.end() + 500, || "horizon shorter than 500 post steps".into())?;
    Ok(format!(
        "i = {}, c_i = {}, kappas 20/22/12828, rho = {}, {} states checked",
        plan.i,
        plan.c(),
        report.rho,
        outcome.trace.len()
    ))
}

fn c6(outcome: &experiment::ForceOutcome) -> Check {
    let conf = &outcome.summary.bottlenecks[0].confirmation;
    ensure(conf.holds(), || format!("{} vertices of the anchor state unconfirmed at {}", conf.missing.len(), conf.t))?;
    Ok(format!("{} anchor vertices confirmed at T = {}", conf.anchor_vertices, conf.t))
}

fn forced(p: &ModelParams, seed: u64) -> Result<experiment::ForceOutcome, String> {
    experiment::force(&force_cfg(p, seed)).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- criterion 7

fn c7() -> Check {
    let fig1 = fixtures::build("fig1").map_err(|e| e.to_string())?;
    let s = &fig1.final_state;
    let g = Snapshot::of_state(s);
    let edges: BTreeSet<(VertexId, VertexId)> = s.solid_edges().collect();
    let want: BTreeSet<(VertexId, VertexId)> = [(1, 0), (2, 0), (2, 1), (3, 1)].into();
    ensure(edges == want, || format!("fig1 solid edges {edges:?}"))?;
    let dashed: BTreeSet<(VertexId, VertexId)> = s.inflight_edges().collect();
    let want_dashed: BTreeSet<(VertexId, VertexId)> = [(4, 2), (4, 3), (5, 2), (5, 3)].into();
    ensure(dashed == want_dashed, || format!("fig1 in-flight edges {dashed:?}"))?;
    ensure(s.degrees(1).unwrap().0 == 2, || "fig1 in-degree of 1".into())?;
    // reachability against the closure of the drawn edges
    let closure: [&[VertexId]; 4] = [&[0], &[0, 1], &[0, 1, 2], &[0, 1, 3]];
    for (u, reach) in closure.iter().enumerate() {
        for v in 0..4u64 {
            let got = reachable(&g, u as VertexId, v).map_err(|e| e.to_string())?;
            ensure(got == reach.contains(&v), || format!("fig1 reachable({u},{v}) = {got}"))?;
        }
    }

    let right = fixtures::build("fig2-right").map_err(|e| e.to_string())?;
    let h = History::from_trace(&right);
    let g = h.eventual();
    ensure(!reachable(&g, 3, 2).unwrap(), || "fig2-right: 3 reaches 2".into())?;
    for t in 0..=h.horizon() {
        let set = confirmed_set(&h, t).map_err(|e| e.to_string())?;
        ensure(set.iter().all(|&v| v == 0), || format!("fig2-right confirms {set:?} at {t}"))?;
    }
    Ok("fig1 edges and reachability exact; fig2-right confirms no vertex besides the root".into())
}

// ---------------------------------------------------------------- criterion 8

fn c8() -> Check {
    let l = Labeling {
        i: 47,
        start: 52,
        last: 52 + 1000,
        column_one: vec![2, 7, 50, 51],
    };
    let xi = |j, k| l.xi(Label::new(47, j, k)).map_err(|e| e.to_string());
    ensure(xi(1, 3)? == 50, || "xi(47,1,3)".into())?;
    ensure(xi(2, 3)? == 54, || "xi(47,2,3)".into())?;
    let mesh: Vec<u64> = (1..=4).map(|k| xi(2, k)).collect::<Result<_, _>>()?;
    ensure(mesh == [52, 53, 54, 55], || format!("column two {mesh:?}"))?;
    let lab = |j, k| Label::new(50, j, k);
    ensure(interchange_parents(lab(2, 1), 4) == (lab(1, 1), lab(1, 2)), || "parents of (50,2,1)".into())?;
    ensure(interchange_parents(lab(7, 2), 4) == (lab(6, 1), lab(6, 3)), || "parents of (50,7,2)".into())?;
    Ok("xi(47,1,3) = 50, xi(47,2,3) = 54, step-C parent maps match".into())
}

// ---------------------------------------------------------------- criterion 9

fn frozen_state(p: &ModelParams, tips: usize) -> TangleState {
    let mut eng = Engine::new(p.clone(), 99).unwrap();
    loop {
        eng.step(None).unwrap();
        let s = eng.state();
        let ok = p
            .eps_support
            .iter()
            .all(|&e| s.tips_at_lookback(e).unwrap().len() == tips);
        if ok && s.now() > 100 {
            return s.clone();
        }
    }
}

fn c9(p: &ModelParams) -> Check {
    let draws = 100_000u64;
    let state = frozen_state(p, 4);
    let sampler = DecisionSampler::new(p).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut seen: BTreeMap<(u32, u32, Vec<VertexId>), u64> = BTreeMap::new();
    for _ in 0..draws {
        let d = sampler.sample(&mut rng, &state).map_err(|e| e.to_string())?;
        *seen.entry((d.theta, d.eps, d.parents.to_vec())).or_default() += 1;
    }

    // product law over every cell
    let mut expected: BTreeMap<(u32, u32, Vec<VertexId>), f64> = BTreeMap::new();
    let ks: Vec<(u32, f64)> = match &p.k_parents {
        ParentCount::Fixed(k) => vec![(*k, 1.0)],
        ParentCount::Random { support, probs } => support.iter().copied().zip(probs.iter().copied()).collect(),
    };
    for (&theta, &pt) in p.h.iter().zip(&p.p_theta) {
        for (&eps, &pe) in p.eps_support.iter().zip(&p.p_eps) {
            let pool = state.tips_at_lookback(eps).unwrap();
            for &(k, pk) in &ks {
                let cells = pool.len().pow(k);
                for idx in 0..cells {
                    let mut rest = idx;
                    let parents: Vec<VertexId> = (0..k)
                        .map(|_| {
                            let v = pool[rest % pool.len()];
                            rest /= pool.len();
                            v
                        })
                        .collect();
                    *expected.entry((theta, eps, parents)).or_default() += pt * pe * pk / cells as f64;
                }
            }
        }
    }
    ensure(seen.keys().all(|c| expected.contains_key(c)), || "draw outside the support".into())?;
    let stat: f64 = expected
        .iter()
        .map(|(cell, &q)| {
            let e = q * draws as f64;
            let o = seen.get(cell).copied().unwrap_or(0) as f64;
            (o - e).powi(2) / e
        })
        .sum();
    let dof = (expected.len() - 1) as f64;
    let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.99);
    ensure(stat < critical, || format!("chi2 = {stat:.1} above {critical:.1} ({dof} dof)"))?;

    let within = |value: u32, prob: f64, pick: fn(&(u32, u32, Vec<VertexId>)) -> u32| {
        let n = draws as f64;
        let count: u64 = seen.iter().filter(|(c, _)| pick(c) == value).map(|(_, &m)| m).sum();
        (count as f64 - n * prob).abs() <= 3.0 * (n * prob * (1.0 - prob)).sqrt()
    };
    for (&theta, &pt) in p.h.iter().zip(&p.p_theta) {
        ensure(within(theta, pt, |c| c.0), || format!("theta = {theta} marginal off by more than 3 sigma"))?;
    }
    for (&eps, &pe) in p.eps_support.iter().zip(&p.p_eps) {
        ensure(within(eps, pe, |c| c.1), || format!("eps = {eps} marginal off by more than 3 sigma"))?;
    }
    Ok(format!(
        "chi2 = {stat:.1} < {critical:.1} over {} cells, marginals within 3 sigma",
        expected.len()
    ))
}

// ---------------------------------------------------------------- criterion 11

fn c11() -> Check {
    let cfg = ExperimentConfig {
        seeds: vec![7],
        search_from: 500,
        bottlenecks: 2,
        ..ExperimentConfig::default()
    };
    let out = experiment::force(&cfg).map_err(|e| e.to_string())?;
    let th = &out.plans[0].thresholds;
    let b = &out.summary.bottlenecks;
    ensure(b.len() == 2 && b[1].i - b[0].i > 2 * th.kappa_c, || "bottlenecks too close".into())?;
    ensure(b.iter().all(|x| x.all_hold), || "a bottleneck check failed".into())?;
    let (r0, r1) = (b[0].stabilization.radius, b[1].stabilization.radius);
    ensure(r1 > r0, || format!("radii {r0} then {r1}"))?;
    for x in b {
        ensure(x.stabilization.stable(), || format!("ball around anchor {} changed at {:?}", x.i, x.stabilization.change))?;
    }
    Ok(format!(
        "anchors {} and {}, radii {r0} -> {r1}, balls identical over {} and {} snapshots",
        b[0].i, b[1].i, b[0].stabilization.snapshots, b[1].stabilization.snapshots
    ))
}

// ---------------------------------------------------------------- criterion 12

fn replays_clean(trace: &Trace, dir: &std::path::Path, name: &str) -> Result<(), String> {
    let path = dir.join(format!("{name}.csv"));
    io::write_trace(trace, &path).map_err(|e| e.to_string())?;
    let (outcome, rebuilt) = experiment::replay_file(&path).map_err(|e| e.to_string())?;
    ensure(outcome.identical && outcome.differences.is_empty(), || format!("{name}: {:?}", outcome.differences))?;
    ensure(outcome.regenerated != Some(false), || format!("{name}: seed does not regenerate the decisions"))?;
    ensure(io::trace_csv_bytes(&rebuilt) == io::trace_csv_bytes(trace), || format!("{name}: bytes differ"))
}

fn c12(forced: &Trace) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = ModelParams::reference();
    for seed in [1, 77, 123_456] {
        let a = run(&p, seed, 20_000, &Overrides::new()).unwrap();
        let b = run(&p, seed, 20_000, &Overrides::new()).unwrap();
        ensure(io::trace_csv_bytes(&a) == io::trace_csv_bytes(&b), || format!("seed {seed} not reproducible"))?;
        replays_clean(&a, dir.path(), &format!("seed-{seed}"))?;
    }
    replays_clean(forced, dir.path(), "forced")?;
    for name in fixtures::NAMES {
        replays_clean(&fixtures::build(name).unwrap(), dir.path(), name)?;
    }
    Ok("same seed gives identical bytes; free, forced and fixture traces replay with an empty diff".into())
}

// ---------------------------------------------------------------- criterion 10

fn criteria_1_to_6(p: &ModelParams, label: &str, lines: &mut Vec<Line>) {
    let secs = Duration::from_secs;
    let mut traces = Vec::new();
    lines.push(timed(&format!("{label}.1"), "bookkeeping exactness", Some(secs(30)), || {
        traces = runs(p);
        c1(&traces)
    }));
    lines.push(timed(&format!("{label}.2"), "completion windows", Some(secs(10)), || c2(&traces)));
    lines.push(timed(&format!("{label}.3"), "martingale coupling", Some(secs(10)), || c3(&traces)));
    drop(traces);
    lines.push(timed(&format!("{label}.4"), "tip recurrence above b", Some(secs(120)), || c4(p)));
    let mut outcome = None;
    lines.push(timed(&format!("{label}.5"), "forced bottleneck", Some(secs(60)), || {
        let o = forced(p, 1)?;
        let r = c5(&o);
        outcome = Some(o);
        r
    }));
    lines.push(timed(&format!("{label}.6"), "confirmation at finite horizon", Some(secs(10)), || match &outcome {
        Some(o) => c6(o),
        None => Err("no forced trace".into()),
    }));
}

fn main() {
    if let Ok(n) = std::env::var("TANGLEPROOF_THREADS").map(|v| v.parse::<usize>().unwrap_or(0)) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let reference = ModelParams::reference();
    let secs = Duration::from_secs;
    let mut lines: Vec<Line> = Vec::new();

    let mut traces = Vec::new();
    lines.push(timed("1", "bookkeeping exactness", Some(secs(30)), || {
        traces = runs(&reference);
        c1(&traces)
    }));
    lines.push(timed("2", "completion windows", Some(secs(10)), || c2(&traces)));
    lines.push(timed("3", "martingale coupling", Some(secs(10)), || c3(&traces)));
    drop(traces);
    lines.push(timed("4", "tip recurrence above b", Some(secs(120)), || c4(&reference)));
    let supplementary = timed("4s", "injected excursions (supplementary)", Some(secs(120)), || c4_probe(&reference));

    let mut outcome = None;
    lines.push(timed("5", "forced bottleneck", Some(secs(60)), || {
        let o = forced(&reference, 1)?;
        let r = c5(&o);
        outcome = Some(o);
        r
    }));
    lines.push(timed("6", "confirmation at finite horizon", Some(secs(10)), || match &outcome {
        Some(o) => c6(o),
        None => Err("no forced trace".into()),
    }));
    lines.push(timed("7", "figure fixtures", None, c7));
    lines.push(timed("8", "labeling conformance", None, c8));
    lines.push(timed("9", "sampling law", Some(secs(10)), || c9(&reference)));

    let t10 = Instant::now();
    let mut sub = Vec::new();
    for (label, p) in laws() {
        criteria_1_to_6(&p, label, &mut sub);
    }
    let failed: Vec<String> = sub.iter().filter(|l| !l.pass).map(|l| l.id.clone()).collect();
    lines.push(Line {
        id: "10".into(),
        name: "k = 3 and k in {1,3}",
        pass: failed.is_empty() && t10.elapsed() < secs(300),
        detail: if failed.is_empty() {
            "criteria 1-6 hold for both parent laws".into()
        } else {
            format!("failing: {}", failed.join(", "))
        },
        elapsed: t10.elapsed(),
    });
    lines.push(timed("11", "stabilization", Some(secs(180)), c11));
    lines.push(timed("12", "determinism and replay", None, || match &outcome {
        Some(o) => c12(&o.trace),
        None => Err("no forced trace".into()),
    }));

    for l in &lines {
        print(l);
    }
    println!("sub-results of 10:");
    for l in &sub {
        print(l);
    }
    println!("supplementary, not a criterion:");
    print(&supplementary);

    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
