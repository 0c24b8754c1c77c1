//! Acceptance suite. Runs every criterion, prints one `[PASS]`/`[FAIL]`
//! line per criterion and exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ctmg_nets::model::{
    build_chain_game, build_erlang, build_running_example, normalise, ChainGameParams, GameBuilder, MarkovGame,
    NormedGame,
};
use ctmg_nets::model::{number, Player};
use ctmg_nets::nets::{solve, step_budget_table, step_level, step_single, NetLevel, SolverConfig};
use ctmg_nets::oracle::{convergence_study, fine_single_net, transient_fixed, TransientConfig};
use ctmg_nets::poly::{envelope_linear, envelope_poly, ActionQuality, Envelope, Polynomial, Sense};
use ctmg_nets::strategy::{count_switch_points, evaluate_best_response, simulate};
use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{label}: got {got}, want {want} ± {tol}"))
}

fn in_time(label: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("{label} took {elapsed:?}, limit {limit:?}"))
}

fn idx(game: &MarkovGame, name: &str) -> usize {
    game.location_index(name).unwrap()
}

fn worked_example() -> Result<String, String> {
    let started = Instant::now();
    let game = build_running_example();
    let mut anchor = vec![0.0; game.num_locations()];
    for (name, v) in [("G", 1.0), ("l", 0.244), ("l_R", 0.107), ("l_S", 0.075), ("bot", 0.0)] {
        anchor[idx(&game, name)] = v;
    }
    let (l_r, l_s) = (idx(&game, "l_R"), idx(&game, "l_S"));
    let (_, single) = step_single(&game, &anchor, 0.1).map_err(|e| e.to_string())?;
    let (pieces, report) = step_level(&game, NetLevel::DOUBLE, &anchor, 0.1).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();

    let a_r = game.action_index(l_r, "a").unwrap();
    let b_r = game.action_index(l_r, "b").unwrap();
    let a_s = game.action_index(l_s, "a").unwrap();
    within("c(l_R)", single.gradients[l_r], 0.0286, 1e-12)?;
    within("c(l_S)", single.gradients[l_s], 0.032, 1e-12)?;
    ensure(single.envelopes[l_r].action_at(0.0) == a_r, || "l_R level-1 action is not a".into())?;
    ensure(single.envelopes[l_s].action_at(0.0) == a_s, || "l_S level-1 action is not a".into())?;

    let env = report.envelopes[l_r].pieces();
    ensure(env.len() == 2 && env[0].0 == a_r && env[1].0 == b_r, || format!("l_R envelope {env:?}"))?;
    within("z", env[1].1, 5.0 / 63.0, 1e-12)?;
    let f = &pieces[l_r];
    ensure(f.polys().len() == 2, || format!("l_R has {} pieces", f.polys().len()))?;
    within("break", f.breaks()[1], 5.0 / 63.0, 1e-12)?;
    let first = f.polys()[0].coeffs();
    let second = f.polys()[1].coeffs();
    for (got, want) in first.iter().zip([0.107, 0.0286, -0.00286]) {
        within("first quadratic", *got, want, 1e-12)?;
    }
    // the second constant term is fixed by continuity at z = 5/63
    let z = 5.0 / 63.0;
    let c0 = 0.107 + 0.0286 * z - 0.00286 * z * z - (0.0274 * z + 0.0047 * z * z);
    for (got, want) in second.iter().zip([c0, 0.0274, 0.0047]) {
        within("second quadratic", *got, want, 1e-12)?;
    }
    within("second constant (printed digits)", second[0], 0.107047619, 1e-9)?;
    in_time("worked example", elapsed, Duration::from_millis(100))?;
    Ok(format!("z = {:.15}, {elapsed:?}", env[1].1))
}

fn budget_table() -> Result<String, String> {
    let started = Instant::now();
    let rows = step_budget_table(10.0, &[1e-7, 1e-9, 1e-11]).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let want: [u64; 12] = [
        1_000_000_000,
        100_000_000_000,
        10_000_000_000_000,
        81_650,
        816_497,
        8_164_966,
        3_219,
        14_939,
        69_337,
        605,
        1_911,
        6_043,
    ];
    let got: Vec<u64> = rows.iter().map(|r| r.intervals).collect();
    ensure(got == want, || format!("table {got:?}"))?;
    in_time("table", elapsed, Duration::from_millis(10))?;
    Ok(format!("12 entries exact, {elapsed:?}"))
}

fn switch_times() -> Result<String, String> {
    let started = Instant::now();
    let game = build_running_example();
    let config = SolverConfig::with_precision(NetLevel::DOUBLE, 4.0, 1e-6).retain_values(false);
    let result = solve(&game, &config).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let reach = count_switch_points(&result.reach_strategy);
    let safe = count_switch_points(&result.safe_strategy);
    ensure(reach.total == 1 && reach.points[0].location == "l_R", || format!("reach switches {reach:?}"))?;
    ensure(safe.total == 1 && safe.points[0].location == "l_S", || format!("safe switches {safe:?}"))?;
    let (t1, t2) = (reach.points[0].time, safe.points[0].time);
    within("t1", t1, 1.123, 5e-3)?;
    within("t2", t2, 0.609, 5e-3)?;
    ensure(reach.points[0].before == "b" && reach.points[0].after == "a", || "l_R switches b to a".into())?;
    in_time("solve", elapsed, Duration::from_secs(5))?;
    Ok(format!("t1 = {t1:.6}, t2 = {t2:.6}, {elapsed:?}"))
}

fn convergence_orders() -> Result<String, String> {
    let started = Instant::now();
    let game = build_running_example();
    let horizon = 2.0;
    let study = convergence_study("running-example", &game, horizon, &NetLevel::ALL, &[0.1, 0.05, 0.025, 0.0125])
        .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let mut slopes = Vec::new();
    for (level, fit) in study.levels.iter().zip(&study.fits).take(3) {
        let fit = (*fit).ok_or_else(|| format!("no fit for level {}", level.k()))?;
        within(&format!("order of level {}", level.k()), fit.slope, level.k() as f64, 0.4)?;
        slopes.push(format!("{:.3}", fit.slope));
    }
    let level4 = study.errors[3][0];
    let limit = (2.0 / 15.0) * 0.1f64.powi(4) * horizon;
    ensure(level4 < limit, || format!("level-4 error {level4} >= {limit}"))?;
    in_time("study", elapsed, Duration::from_secs(60))?;
    Ok(format!("slopes {}, level-4 error {level4:.3e} < {limit:.3e}, {elapsed:?}", slopes.join("/")))
}

fn erlang_oracle() -> Result<String, String> {
    let started = Instant::now();
    let erlang = build_erlang(30, 10.0).map_err(|e| e.to_string())?;
    let normed = normalise(&erlang, 7.0).map_err(|e| e.to_string())?;
    within("normed horizon", normed.horizon, 70.0, 1e-12)?;
    let game = &normed.game;
    let reference = fine_single_net(game, normed.horizon, 1e-5).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for level in [NetLevel::DOUBLE, NetLevel::TRIPLE] {
        let config = SolverConfig::with_precision(level, normed.horizon, 1e-6).retain_values(false);
        let result = solve(game, &config).map_err(|e| e.to_string())?;
        let tol = result.value_bound + reference.bound;
        let worst = result
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ensure(worst <= tol, || format!("level {}: deviation {worst} > {tol}", level.k()))?;
        notes.push(format!("k={} dev {worst:.2e}", level.k()));
    }
    for pi in [1e-3, 1e-6, 1e-9] {
        let n2 = ctmg_nets::nets::interval_count(NetLevel::DOUBLE, 70.0, pi).unwrap();
        let n3 = ctmg_nets::nets::interval_count(NetLevel::TRIPLE, 70.0, pi).unwrap();
        ensure(n3 < n2, || format!("π = {pi}: level 3 uses {n3} intervals, level 2 {n2}"))?;
    }
    let elapsed = started.elapsed();
    in_time("erlang", elapsed, Duration::from_secs(600))?;
    Ok(format!("{}, {elapsed:?}", notes.join(", ")))
}

fn strategy_quality() -> Result<String, String> {
    let started = Instant::now();
    let game = build_running_example();
    let horizon = 4.0;
    let precision = 1e-6;
    let l_s = idx(&game, "l_S");
    let mut notes = Vec::new();
    let mut level2 = None;
    for level in [NetLevel::DOUBLE, NetLevel::TRIPLE] {
        let config = SolverConfig::with_precision(level, horizon, precision).retain_values(false);
        let result = solve(&game, &config).map_err(|e| e.to_string())?;
        let report = evaluate_best_response(&game, &result.reach_strategy, level, precision).map_err(|e| e.to_string())?;
        let limit = (level.value_constant_f64() + level.strategy_constant_f64())
            * result.epsilon.powi(level.k() as i32)
            * horizon;
        let worst = report
            .values
            .iter()
            .zip(&result.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        ensure(worst <= limit, || format!("level {}: |evaluation - optimum| = {worst} > {limit}", level.k()))?;
        notes.push(format!("k={} gap {worst:.2e}", level.k()));
        if level == NetLevel::DOUBLE {
            level2 = Some(result);
        }
    }
    let result = level2.unwrap();
    let sim = simulate(&game, &result.reach_strategy, &result.safe_strategy, horizon, 1_000_000, 20_240_601)
        .map_err(|e| e.to_string())?;
    let combined = result.value_bound + 2.0 * result.strategy_bound;
    let tol = (3.0 * sim.std_error).max(combined);
    within("simulation", sim.estimate, result.values[l_s], tol)?;
    let elapsed = started.elapsed();
    in_time("strategy quality", elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{}, simulated {:.5} vs {:.5} (tol {tol:.2e}), {elapsed:?}",
        notes.join(", "),
        sim.estimate,
        result.values[l_s]
    ))
}

fn constant_identities() -> Result<String, String> {
    let c: Vec<Ratio<i64>> = NetLevel::ALL.iter().map(|l| l.value_constant()).collect();
    let d: Vec<Ratio<i64>> = NetLevel::ALL.iter().map(|l| l.strategy_constant()).collect();
    ensure(c == [Ratio::new(1, 1), Ratio::new(2, 3), Ratio::new(1, 3), Ratio::new(2, 15)], || format!("c = {c:?}"))?;
    ensure(d == [Ratio::new(2, 1), Ratio::new(2, 1), Ratio::new(17, 6), Ratio::new(67, 30)], || format!("d = {d:?}"))?;
    for k in 2..4usize {
        let denom = Ratio::from_integer(k as i64 + 2);
        let c_next = Ratio::from_integer(2) * c[k - 1] / denom;
        let d_next = (Ratio::from_integer(8) * c[k - 1] + Ratio::from_integer(3) * d[k - 1]) / denom;
        ensure(c_next == c[k], || format!("c_{} = {c_next} != {}", k + 1, c[k]))?;
        ensure(d_next == d[k], || format!("d_{} = {d_next} != {}", k + 1, d[k]))?;
    }
    Ok("2/3 -> 1/3 -> 2/15 and 2 -> 17/6 -> 67/30 exact".into())
}

fn sampled_gap(qualities: &[ActionQuality], eps: f64, sense: Sense, env: &Envelope) -> f64 {
    let n = 10_000;
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let tau = eps * i as f64 / n as f64;
        let values = qualities.iter().map(|q| q.quality.eval(tau));
        let best = match sense {
            Sense::Max => values.fold(f64::NEG_INFINITY, f64::max),
            Sense::Min => values.fold(f64::INFINITY, f64::min),
        };
        let chosen = env.action_at(tau);
        let got = qualities.iter().find(|q| q.action == chosen).unwrap().quality.eval(tau);
        worst = worst.max((got - best).abs());
    }
    worst
}

fn envelope_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for degree in [1usize, 2] {
        for case in 0..1000 {
            let actions = rng.gen_range(1..=6);
            let eps = rng.gen_range(0.01..1.0);
            let sense = if rng.gen_bool(0.5) { Sense::Max } else { Sense::Min };
            let qualities: Vec<ActionQuality> = (0..actions)
                .map(|a| {
                    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    ActionQuality { action: a, quality: Polynomial::new(&coeffs) }
                })
                .collect();
            let env = if degree == 1 {
                let env = envelope_linear(&qualities, eps, sense);
                ensure(env.len() <= actions, || format!("case {case}: {} pieces for {actions} actions", env.len()))?;
                env
            } else {
                envelope_poly(&qualities, eps, sense).map_err(|e| e.to_string())?
            };
            let gap = sampled_gap(&qualities, eps, sense, &env);
            ensure(gap <= 1e-10, || format!("degree {degree} case {case}: gap {gap}"))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("2000 sets, worst sampled gap {worst:.1e}"))
}

fn switch_frugality() -> Result<String, String> {
    let started = Instant::now();
    let erlang = build_erlang(30, 10.0).map_err(|e| e.to_string())?;
    let normed = normalise(&erlang, 7.0).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for pi in [1e-6, 1e-8] {
        let config = SolverConfig::with_precision(NetLevel::TRIPLE, normed.horizon, pi).retain_values(false);
        let result = solve(&normed.game, &config).map_err(|e| e.to_string())?;
        counts.push(count_switch_points(&result.reach_strategy).per_location);
    }
    ensure(counts[0] == counts[1], || format!("per-location counts differ: {counts:?}"))?;
    let erlang_total: usize = counts[0].values().sum();

    let chain = build_chain_game(&ChainGameParams::default()).map_err(|e| e.to_string())?;
    let normed = normalise(&chain, 10.0).map_err(|e| e.to_string())?;
    let config = SolverConfig::with_precision(NetLevel::TRIPLE, normed.horizon, 1e-6).retain_values(false);
    let result = solve(&normed.game, &config).map_err(|e| e.to_string())?;
    let total = count_switch_points(&result.reach_strategy).total + count_switch_points(&result.safe_strategy).total;
    ensure(total >= 50, || format!("chain game has only {total} switch points"))?;
    Ok(format!("erlang {erlang_total} switch(es) at both precisions, chain game {total}, {:?}", started.elapsed()))
}

/// The normed running example with every rate doubled, self-loops
/// included, so that every enabled row sums to 2.
fn doubled_running_example() -> MarkovGame {
    let game = build_running_example();
    let mut b = GameBuilder::new();
    for loc in game.locations() {
        b.location(&loc.name, loc.owner).unwrap();
    }
    for l in 0..game.num_locations() {
        let src = &game.location(l).name;
        for action in game.actions(l) {
            for (t, r) in &action.rates {
                b.rate(src, &action.name, &game.location(*t).name, r * number::integer(2)).unwrap();
            }
        }
        if game.is_goal(l) {
            b.goal(src).unwrap();
        }
        let p = &game.initial()[l];
        if !num::Zero::is_zero(p) {
            b.init(src, p.clone()).unwrap();
        }
    }
    b.build()
}

fn argopt(game: &MarkovGame, l: usize, values: &[f64]) -> Option<String> {
    let enabled = game.enabled_actions(l);
    if enabled.len() < 2 {
        return None;
    }
    let quality = |a: usize| -> f64 {
        game.actions(l)[a]
            .rates
            .iter()
            .map(|(t, r)| number::to_f64(r) * (values[*t] - values[l]))
            .sum()
    };
    let mut best = enabled[0];
    for &a in &enabled[1..] {
        let better = match game.owner(l) {
            Player::Reach => quality(a) > quality(best),
            Player::Safe => quality(a) < quality(best),
        };
        if better {
            best = a;
        }
    }
    Some(game.actions(l)[best].name.clone())
}

fn uniformisation() -> Result<String, String> {
    let started = Instant::now();
    let original = doubled_running_example();
    ensure(original.uniform_rate() == Some(number::integer(2)), || "test game is not uniform at 2".into())?;
    let horizon = 2.0;
    let normed = normalise(&original, horizon).map_err(|e| e.to_string())?;
    ensure(normed.lambda == number::integer(2), || format!("lambda = {}", normed.lambda))?;
    within("normed horizon", normed.horizon, 2.0 * horizon, 0.0)?;
    let game: &NormedGame = &normed.game;

    let level = NetLevel::TRIPLE;
    let config = SolverConfig::with_precision(level, normed.horizon, 1e-8);
    let result = solve(game, &config).map_err(|e| e.to_string())?;
    let reach = result.reach_strategy.scaled(0.5);
    let safe = result.safe_strategy.scaled(0.5);
    let transient = transient_fixed(&original, &reach, &safe, horizon, &TransientConfig::default())
        .map_err(|e| e.to_string())?;
    let normed_transient =
        transient_fixed(game, &result.reach_strategy, &result.safe_strategy, normed.horizon, &TransientConfig::default())
            .map_err(|e| e.to_string())?;
    let tol = result.value_bound + 2.0 * result.strategy_bound + 1e-10;
    let mut worst: f64 = 0.0;
    for l in 0..original.num_locations() {
        within("normed vs original transient", normed_transient.values[l], transient.values[l], 1e-10)?;
        within(&format!("value at {}", original.location(l).name), result.values[l], transient.values[l], tol)?;
        worst = worst.max((result.values[l] - transient.values[l]).abs());
    }

    let functions = result.value_functions.as_ref().unwrap();
    let switches: Vec<f64> = reach.switch_times().into_iter().chain(safe.switch_times()).collect();
    let mut compared = 0;
    for i in 0..400 {
        let t = horizon * (i as f64 + 0.5) / 400.0;
        if switches.iter().any(|s| (s - t).abs() < 1e-3) {
            continue;
        }
        let values: Vec<f64> = functions.iter().map(|f| f.eval(2.0 * t).unwrap()).collect();
        for l in 0..original.num_locations() {
            let Some(in_original) = argopt(&original, l, &values) else { continue };
            let in_normed = argopt(game, l, &values).unwrap();
            let name = &original.location(l).name;
            let strategy = if original.owner(l) == Player::Reach { &reach } else { &safe };
            let chosen = strategy.action_at(name, t).unwrap();
            ensure(in_original == in_normed && in_normed == chosen, || {
                format!("t = {t}, {name}: original {in_original}, normed {in_normed}, strategy {chosen}")
            })?;
            compared += 1;
        }
    }
    Ok(format!("max deviation {worst:.2e} (tol {tol:.2e}), {compared} argopt decisions agree, {:?}", started.elapsed()))
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("worked-example exactness", worked_example),
        ("interval budget table", budget_table),
        ("running-example switch times", switch_times),
        ("convergence orders", convergence_orders),
        ("Erlang oracle equivalence", erlang_oracle),
        ("strategy quality", strategy_quality),
        ("constant-table identities", constant_identities),
        ("envelope property suite", envelope_suite),
        ("switch-point frugality", switch_frugality),
        ("uniformisation correctness", uniformisation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
