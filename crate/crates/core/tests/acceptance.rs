//! Acceptance criteria, one pass/fail line each. Run with `--nocapture` to see the table.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde_json::Value;

use coarsekit::coarsify::{asdim_upper_bound, greedy_net, measure_complex, DEFAULT_BUDGET};
use coarsekit::homology::{
    homology_at_scale, homology_colimit, induced_map_at, mv_check, prism, rips_complex, smith_normal_form,
    swindle_identity_check, BigMatrix, ChainComplexAtScale, EngineConfig, HomologyError, Matrix,
};
use coarsekit::io::{fixture, run};
use coarsekit::morphisms::{certify_flasque, FlasqueCaps, SpaceMap};
use coarsekit::space::{point_set, subspace, BigFamilyPrefix, BornCoarseSpace, BuiltinKind, PointSet};

const SEED: u64 = 0x5eed_c0a5;

fn cfg() -> EngineConfig {
    EngineConfig::default()
}

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn check(id: usize, name: &'static str, limit: Option<Duration>, body: impl FnOnce() -> Result<String, String>) -> Verdict {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let (pass, mut detail) = match outcome {
        Ok(d) => (in_time, d),
        Err(d) => (false, d),
    };
    if !in_time {
        detail.push_str("; over the time limit");
    }
    Verdict {
        id,
        name,
        pass,
        detail,
        elapsed,
        limit,
    }
}

fn cli(args: &[&str]) -> (String, i32) {
    let o = run(std::iter::once("coarsekit").chain(args.iter().copied()));
    (o.stdout, o.code)
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (out, code) = cli(&a);
    let v: Value = serde_json::from_str(&out).map_err(|e| format!("{}: {e}", a.join(" ")))?;
    if code != 0 {
        return Err(format!("`{}` exited {code}: {}", a.join(" "), v["refusal"]));
    }
    Ok(v)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn betti_of(v: &Value) -> Vec<u64> {
    v.as_array().map_or_else(Vec::new, |a| a.iter().filter_map(Value::as_u64).collect())
}

fn generated_spaces() -> Vec<RandomSpace> {
    let mut r = rng(SEED);
    (0..50).map(|_| random_space(&mut r, 40, 120, 8)).collect()
}

fn point_axiom() -> Result<String, String> {
    let v = cli_json(&["homology", "--space", "point", "--colimit", "--max-dim", "4"])?;
    let table = v["results"]["homology"].as_array().ok_or("no table")?;
    let groups: Vec<&str> = table.iter().filter_map(|g| g["group"].as_str()).collect();
    ensure(groups == ["Z", "0", "0", "0", "0"], || format!("got {groups:?}"))?;
    Ok("H_0 = Z, H_1..H_4 = 0".into())
}

fn components_law(spaces: &[RandomSpace]) -> Result<String, String> {
    for (i, rs) in spaces.iter().enumerate() {
        let (h, _) = homology_colimit(&rs.space, 0, &cfg());
        let expected = union_find_components(rs.space.len(), &rs.pairs);
        ensure(h[0].free_rank == expected, || format!("space {i}: rank {} vs {expected}", h[0].free_rank))?;
    }
    let pairs: usize = spaces.iter().map(|s| s.pairs.len()).sum();
    Ok(format!("{} spaces, {pairs} generator pairs, all ranks match", spaces.len()))
}

fn complex_identity(spaces: &[RandomSpace]) -> Result<String, String> {
    let mut checked = 0;
    for (i, rs) in spaces.iter().enumerate() {
        let mut scales = vec![1, 2, rs.space.stabilized_at()];
        scales.sort_unstable();
        scales.dedup();
        for k in scales {
            let c = ChainComplexAtScale::build(&rs.space, k, 3, &cfg()).map_err(|e| format!("space {i}: {e}"))?;
            ensure(c.boundary_squares_vanish(), || format!("space {i}, scale {k}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} complexes through degree 3"))
}

/// A self-map sending each point to a random point of its coarse component.
fn random_component_map(r: &mut rand_chacha::ChaCha8Rng, x: &Arc<BornCoarseSpace>) -> SpaceMap {
    let mut table = vec![0; x.len()];
    for c in x.coarse_components() {
        for &p in &c {
            table[p] = c[r.gen_range(0..c.len())];
        }
    }
    SpaceMap::new(x.clone(), x.clone(), table).unwrap()
}

fn reduce(m: &BigMatrix, orders: &[BigInt]) -> Vec<Vec<BigInt>> {
    m.to_rows()
        .into_iter()
        .zip(orders)
        .map(|(row, d)| row.into_iter().map(|v| if d.is_zero() { v } else { v.mod_floor(d) }).collect())
        .collect()
}

fn coarse_invariance() -> Result<String, String> {
    let mut r = rng(SEED + 4);
    let n = 1;
    for trial in 0..25 {
        let rs = random_space(&mut r, 12, 24, 5);
        let x = Arc::new(rs.space);
        let f = random_component_map(&mut r, &x);
        let g = random_component_map(&mut r, &x);
        let k = r.gen_range(0..=1);
        let p = prism(&f, &g, k, n, &cfg()).map_err(|e| format!("pair {trial}: {e}"))?;
        let src = ChainComplexAtScale::build(&x, k, n, &cfg()).map_err(|e| e.to_string())?;
        let tgt = ChainComplexAtScale::build(&x, p.target_scale, n + 1, &cfg()).map_err(|e| e.to_string())?;
        for m in 0..=n {
            let cf = induced_map_at(&f, k, p.target_scale, m, &cfg()).map_err(|e| e.to_string())?;
            let cg = induced_map_at(&g, k, p.target_scale, m, &cfg()).map_err(|e| e.to_string())?;
            let mut lhs = tgt.boundary(m + 1).mul(&p.h[m]).ok_or("overflow")?;
            if m > 0 {
                lhs = lhs.add(&p.h[m - 1].mul(src.boundary(m)).ok_or("overflow")?).ok_or("overflow")?;
            }
            let rhs = cg.chain.sub(&cf.chain).ok_or("overflow")?;
            ensure(lhs.to_dense() == rhs.to_dense(), || format!("pair {trial}: identity fails in degree {m}"))?;
            let orders = &cf.target_basis.orders;
            ensure(reduce(&cf.homology, orders) == reduce(&cg.homology, orders), || {
                format!("pair {trial}: induced maps differ on H_{m}")
            })?;
        }
    }
    Ok("25 pairs: prism identity exact in degrees 0..1, H_0 and H_1 maps equal".into())
}

fn window_region(x: &BornCoarseSpace, keep: impl Fn(&[i64]) -> bool) -> PointSet {
    let w = x.window().expect("windowed");
    point_set(x.len(), (0..x.len()).filter(|&i| keep(&w.coords[i])))
}

fn excision() -> Result<String, String> {
    let mut r = rng(SEED + 5);
    let (mut isos, mut short) = (0, 0);
    for trial in 0..20 {
        let x = match trial % 3 {
            0 => BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, r.gen_range(8..=16)),
            1 => BornCoarseSpace::windowed_builtin(BuiltinKind::IntWindow, r.gen_range(4..=8)),
            _ => BornCoarseSpace::windowed_builtin(BuiltinKind::Grid2Window, 2),
        }
        .unwrap();
        let radius = x.window().unwrap().radius as i64;
        let lo = if trial % 3 == 0 { 0 } else { -radius };
        let cut = r.gen_range(lo + 1..radius);
        let overlap = r.gen_range(0..=2);
        let z = window_region(&x, |c| c[0] <= cut + overlap);
        let seed = window_region(&x, |c| c[0] >= cut);
        let fam = BigFamilyPrefix::generated(&x, &seed, r.gen_range(1..=4));
        let k = r.gen_range(1..=2);
        match mv_check(&x, &z, &fam, k, 2, &cfg()) {
            Ok(rep) => {
                ensure(rep.all_isomorphisms(), || {
                    format!("pair {trial}: non-isomorphism without an approximation warning: {:?}", rep.degrees)
                })?;
                isos += 1;
            }
            Err(HomologyError::PrefixTooShort { .. }) => short += 1,
            Err(e) => return Err(format!("pair {trial}: {e}")),
        }
    }
    ensure(isos > 0, || "every pair hit PrefixTooShort".into())?;
    Ok(format!("{isos} pairs isomorphic in degrees 0..2, {short} raised PrefixTooShort"))
}

fn flasque_swindle() -> Result<String, String> {
    let x = Arc::new(BornCoarseSpace::windowed_builtin(BuiltinKind::HalfLine, 100).unwrap());
    let f = SpaceMap::translate(x.clone(), &[1]).unwrap();
    let b = point_set(x.len(), 0..=10);
    let caps = FlasqueCaps {
        scale_cap: 4,
        iter_cap: 64,
        tested: Some(vec![b.clone()]),
    };
    let c = certify_flasque(&f, &caps).map_err(|e| e.to_string())?;
    ensure(c.window == 100, || format!("window {}", c.window))?;
    let escape = c.cond3_table[0].1;
    ensure(escape <= 64, || format!("escape iterate {escape}"))?;
    let mut checked = 0;
    for n in 0..=3 {
        let s = swindle_identity_check(&f, &b, 1, n, escape - 1, &cfg()).map_err(|e| e.to_string())?;
        ensure(s.holds(), || format!("degree {n}: fails at {:?}", s.failure))?;
        checked += s.checked;
    }
    Ok(format!("certificate on window 100 (escape after {escape} iterates); swindle exact on {checked} tuples"))
}

fn backend_agreement() -> Result<String, String> {
    let mut r = rng(SEED + 7);
    for trial in 0..30 {
        let rs = random_space(&mut r, 25, 60, 6);
        let k = [1, 2, rs.space.stabilized_at()][r.gen_range(0..3)];
        let h = homology_at_scale(&rs.space, k, 2, &cfg()).map_err(|e| e.to_string())?;
        let tuples: Vec<usize> = h.iter().map(|g| g.free_rank).collect();
        let rips = rips_complex(&rs.space, k, 2, &cfg()).map_err(|e| e.to_string())?.betti();
        ensure(tuples == rips, || format!("space {trial}, scale {k}: {tuples:?} vs {rips:?}"))?;
    }
    Ok("30 spaces, Betti numbers equal in degrees 0..2".into())
}

fn snf_correctness() -> Result<String, String> {
    let mut r = rng(SEED + 8);
    for trial in 0..100 {
        let a: Vec<Vec<i64>> = (0..6).map(|_| (0..6).map(|_| r.gen_range(-5..=5)).collect()).collect();
        let s = smith_normal_form(&Matrix::from_rows(a.clone()));
        let back = s.u.checked_mul(&s.s).and_then(|us| us.checked_mul(&s.v)).ok_or("product")?;
        ensure(back == Matrix::from_rows(a.clone()).to_big(), || format!("matrix {trial}: A != U S V"))?;
        let one = BigInt::from(1);
        ensure(s.u.determinant().abs() == one && s.v.determinant().abs() == one, || {
            format!("matrix {trial}: transform not unimodular")
        })?;
        let f = s.invariant_factors();
        ensure(f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), || format!("matrix {trial}: chain {f:?}"))?;
        if trial < 20 {
            let oracle = factors_from_minors(&minor_gcds(&a, 5));
            let head: Vec<BigInt> = f.iter().take(oracle.len()).cloned().collect();
            ensure(head == oracle && (oracle.len() == 5 || f.len() == oracle.len()), || {
                format!("matrix {trial}: {f:?} vs minors {oracle:?}")
            })?;
        }
    }
    Ok("100 matrices reconstructed; 20 match the minor-gcd oracle through 5x5".into())
}

fn coarsification_values() -> Result<String, String> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let expected: Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{dir}/hexagon_betti.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let doc = format!("{dir}/hexagon.json");
    let x = coarsekit::io::parse_space(&std::fs::read_to_string(&doc).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let oracle = |k: usize| {
        let u = x.closure_at(k);
        betti_q(&clique_simplices(6, |a, b| u.contains(a, b), 3), 2)
    };
    let adj = oracle(1);
    let stab = oracle(x.stabilized_at());
    let as_u64 = |v: Vec<usize>| v.into_iter().map(|b| b as u64).collect::<Vec<_>>();
    ensure(as_u64(adj.clone()) == betti_of(&expected["adjacency_betti"]), || format!("oracle {adj:?} vs fixture"))?;
    ensure(as_u64(stab.clone()) == betti_of(&expected["stabilized_betti"]), || format!("oracle {stab:?} vs fixture"))?;
    let v = cli_json(&["qhomology", "--space", &doc, "--scale", "1", "--max-dim", "2"])?;
    let got_adj = betti_of(&v["results"]["per_scale"][0]["betti"]);
    let got_stab = betti_of(&v["results"]["terminal_betti"]);
    ensure(got_adj == as_u64(adj), || format!("adjacency {got_adj:?}"))?;
    ensure(got_stab == as_u64(stab), || format!("stabilized {got_stab:?}"))?;
    Ok(format!("adjacency Betti {got_adj:?}, stabilized Betti {got_stab:?}"))
}

fn coarsification_space() -> Result<String, String> {
    let circle = fixture("cycle:12").unwrap().build().map_err(|e| e.to_string())?;
    let net = greedy_net(&circle, 1);
    ensure(net.count_ones(..) == 6, || format!("net of {} points", net.count_ones(..)))?;
    let sub = subspace(&circle, &net).map_err(|e| e.to_string())?;
    let metric = sub.metric().ok_or("net lost its metric")?;
    let ids = sub.ground().ids().to_vec();
    let matched = coarsekit::space::Rational::new(5, 2);
    let d = BornCoarseSpace::from_metric(&ids, metric.matrix().to_vec(), vec![matched]).map_err(|e| e.to_string())?;
    let p_u = measure_complex(&d, 1, 2, &cfg()).map_err(|e| e.to_string())?.betti();
    let model = rips_complex(&circle, 1, 2, &cfg()).map_err(|e| e.to_string())?.betti();
    let u = circle.closure_at(1);
    let oracle = betti_q(&clique_simplices(circle.len(), |a, b| u.contains(a, b), 3), 2);
    ensure(model == oracle, || format!("circle complex {model:?} vs oracle {oracle:?}"))?;
    ensure(p_u == model, || format!("net {p_u:?} vs circle {model:?}"))?;
    Ok(format!("net of 6 in a 12-cycle at scale 5/2: Betti {p_u:?} = circle {model:?}"))
}

fn asdim_smoke() -> Result<String, String> {
    let x = BornCoarseSpace::windowed_builtin(BuiltinKind::IntWindow, 100).unwrap();
    let r = asdim_upper_bound(&x, &[2, 4, 8], DEFAULT_BUDGET);
    ensure(r.upper_bound == Some(1), || format!("upper bound {:?}", r.upper_bound))?;
    Ok("upper bound 1 at scales 2, 4, 8".into())
}

const COMMANDS: &[&[&str]] = &[
    &["homology", "--space", "point", "--colimit", "--max-dim", "4"],
    &["components", "--space", "hexagon"],
    &["homology", "--space", "hexagon", "--scale", "1", "--max-dim", "2"],
    &["qhomology", "--space", "hexagon", "--scale", "1", "--max-dim", "2"],
    &["nerve", "--space", "hexagon", "--scale", "1"],
    &["anti-cech", "--space", "hexagon", "--scales", "1,stable"],
    &["telescope", "--space", "hexagon", "--scales", "1,stable", "--max-dim", "2"],
    &["flasque", "--space", "half_line:100", "--map", "shift", "--subset", "0..10", "--swindle"],
    &["asdim", "--space", "int_window:100", "--scales", "2,4,8"],
    &["mv-check", "--space", "half_line:12", "--subset", "0..7", "--seed-set", "6..12", "--depth", "3", "--max-dim", "2"],
    &["close", "--space", "half_line:20", "--map", "shift", "--map", "identity"],
    &["equivalence", "--space", "int_window:5", "--map", "translate:2", "--map", "translate:-2"],
    &["check-morphism", "--space", "grid2_window:2", "--map", "translate:1,0"],
    &["hybrid", "--space", "half_line:10", "--seed-set", "0..2", "--depth", "2", "--phi", "3,2,1", "--scale", "3"],
    &["udecomp", "--space", "hexagon", "--subset", "0..3", "--subset", "3..5,0", "--radii", "3,2,1"],
    &["snf", "--matrix", "2,4,4;-6,6,12;10,-4,-16"],
];

fn determinism() -> Result<String, String> {
    let mut runs = 0;
    for args in COMMANDS {
        for format in ["text", "json"] {
            let mut a = args.to_vec();
            a.extend(["--format", format]);
            let first = cli(&a);
            let second = cli(&a);
            ensure(first == second, || format!("`{}` differs between runs", a.join(" ")))?;
            ensure(first.1 != 2, || format!("`{}` is a usage error", a.join(" ")))?;
            runs += 2;
        }
    }
    Ok(format!("{} commands x 2 formats, {runs} runs byte-identical", COMMANDS.len()))
}

#[test]
fn acceptance() {
    let spaces = generated_spaces();
    let s = Duration::from_secs;
    let verdicts = vec![
        check(1, "point axiom", Some(s(1)), point_axiom),
        check(2, "components law", Some(s(10)), || components_law(&spaces)),
        check(3, "complex identity", None, || complex_identity(&spaces)),
        check(4, "coarse invariance shadow", Some(s(20)), coarse_invariance),
        check(5, "excision shadow", None, excision),
        check(6, "flasque certification + swindle", None, flasque_swindle),
        check(7, "backend agreement", None, backend_agreement),
        check(8, "SNF correctness", None, snf_correctness),
        check(9, "coarsification values", Some(s(1)), coarsification_values),
        check(10, "coarsification-space shadow", None, coarsification_space),
        check(11, "asdim smoke", None, asdim_smoke),
        check(12, "determinism", None, determinism),
    ];
    for v in &verdicts {
        let limit = v.limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        println!(
            "criterion {:>2} [{}] {}: {} ({} ms{limit})",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail,
            v.elapsed.as_millis()
        );
    }
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
