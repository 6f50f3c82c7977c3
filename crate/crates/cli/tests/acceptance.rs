//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! status if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regcomp::cohomology::{check_euler_all, pair_dims_v_w};
use regcomp::engine::{
    check_wonderful_oracle, dominant_box, integer_box, multiplicities, multiplicity, search_wonderful, toric_degree_vector,
    wonderful_degree_vector, wonderful_multiplicity, Target, WonderfulCounter,
};
use regcomp::refine::refine;
use regcomp::{rat, ChamberFan, Coweight, PLFunction, Rat, RootDatum, Weight};
use regcomp_cli::problem::parse_problem;

use common::*;

type Outcome = Result<String, String>;

/// Every `(h, ν)` the engine refined while checking criteria 1–9, keyed by
/// the fan and the values of `⟨ν,·⟩ − h` on its rays up to positive scale.
/// The refinement depends on nothing else.
#[derive(Default)]
struct Configurations {
    seen: HashSet<String>,
    list: Vec<(PLFunction, Weight)>,
}

impl Configurations {
    fn add(&mut self, h: &PLFunction, nu: &Weight) {
        let fan = h.fan();
        let g: Vec<Rat> = fan
            .rays()
            .iter()
            .map(|r| {
                let n = Coweight::new(r.clone());
                fan.ambient().pairing(nu, &n) - h.eval(&n).unwrap()
            })
            .collect();
        let scale = g.iter().find(|x| !x.is_zero()).map_or(rat(1), |x| x.abs());
        let key = format!(
            "{:?}|{:?}|{:?}|{}",
            fan.root_datum().map(|rd| rd.cartan_type().to_string()),
            fan.rays(),
            fan.cones(),
            g.iter().map(|x| (x / &scale).to_string()).collect::<Vec<_>>().join(",")
        );
        if self.seen.insert(key) {
            self.list.push((h.clone(), nu.clone()));
        }
    }

    /// The refinements made by the general formula for `m_h(μ)`.
    fn engine(&mut self, h: &PLFunction, mu: &Weight) {
        if h.in_h_plus_x(mu) {
            let rd = h.fan().root_datum().unwrap().clone();
            for t in rd.weyl_elements() {
                self.add(h, &rd.dot_action(t, mu));
            }
        }
    }

    /// The refinement made in torus mode for the character `μ`.
    fn toric(&mut self, h: &PLFunction, mu: &Weight) {
        if h.in_h_plus_x(mu) {
            self.add(h, mu);
        }
    }
}

fn rd(ty: &str) -> Arc<RootDatum> {
    Arc::new(RootDatum::adjoint(ty).unwrap())
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took < limit {
        Ok(took)
    } else {
        Err(format!("took {} (limit {})", secs(took), secs(limit)))
    }
}

fn criterion_1(configs: &mut Configurations) -> Outcome {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/pgl3_blowup.json");
    let out = regcomp_cli::run(["regcomp", "mult", path.to_str().unwrap(), "--mu", "0,0", "--i", "3", "--format", "csv"]);
    if out.code != 0 || !out.stdout.lines().any(|l| l == "m,2") {
        return Err(format!("cli printed {:?} (exit {})", out.stdout, out.code));
    }
    let problem = parse_problem(&path).map_err(|e| e.to_string())?;
    let mu = Weight::zero(2);
    let report = multiplicity(&problem.h, &mu, 3).map_err(|e| e.to_string())?;
    let breakdown: BTreeMap<&str, usize> = report.terms.iter().map(|t| (t.word.as_str(), t.value)).collect();
    let expected: BTreeMap<&str, usize> = [("s1", 1), ("s2", 1), ("s1s2", 0), ("s2s1", 0), ("s1s2s1", 0)].into();
    if report.value != 2 || report.chamber_term != 0 || breakdown != expected {
        return Err(format!("m = {}, chamber {}, terms {breakdown:?}", report.value, report.chamber_term));
    }
    configs.engine(&problem.h, &mu);
    let took = within(Duration::from_secs(5), start)?;
    Ok(format!("m³_h(0) = 2 = s1:1 + s2:1 + chamber:0 in {}", secs(took)))
}

fn criterion_2(configs: &mut Configurations) -> Outcome {
    let start = Instant::now();
    let mut triples = 0;
    for (ty, radius) in [("A2", 3), ("B2", 3), ("G2", 2)] {
        let rd = rd(ty);
        let report = check_wonderful_oracle(&rd, radius, radius, rd.group_dimension()).map_err(|e| e.to_string())?;
        if let Some(m) = report.mismatches.first() {
            return Err(format!(
                "{ty}: {} mismatches, first λ = {}, μ = {}, i = {}: general {} vs closed {}",
                report.mismatches.len(),
                m.lambda,
                m.mu,
                m.degree,
                m.general,
                m.closed_form
            ));
        }
        triples += report.triples;
        let fan = Arc::new(ChamberFan::wonderful(rd.clone()));
        for lambda in integer_box(rd.rank(), -radius, radius) {
            let h = PLFunction::linear(fan.clone(), Weight::from_ints(&lambda)).unwrap();
            for mu in dominant_box(rd.rank(), radius) {
                configs.engine(&h, &mu);
            }
        }
    }
    let took = within(Duration::from_secs(600), start)?;
    Ok(format!("{triples} triples over A2, B2 (box 3) and G2 (box 2), 0 mismatches in {}", secs(took)))
}

const SUPPORTED: [&str; 31] = [
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "B2", "B3", "B4", "B5", "B6", "C3", "C4", "C5", "C6", "D4", "D5", "D6", "E6", "F4", "G2",
    "A1xA1", "A1xA1xA1", "A1xA2", "A1xB2", "A1xG2", "A2xA2", "A2xG2", "B2xG2", "A1xA3",
];

fn criterion_3() -> Outcome {
    let mut checked = 0usize;
    for (ty, radius) in [("A1xA1", 4), ("A2", 4), ("B2", 4), ("G2", 4), ("A3", 3), ("B3", 3)] {
        let rd = rd(ty);
        for mu in dominant_box(rd.rank(), radius) {
            let counter = WonderfulCounter::new(&rd, &mu).map_err(|e| e.to_string())?;
            for lambda in integer_box(rd.rank(), -radius, radius) {
                let m = counter.degree_vector(&lambda);
                if m[1] + m[2] + m[4] != 0 {
                    return Err(format!("{ty}: λ = {lambda:?}, μ = {mu}: {m:?}"));
                }
                checked += 1;
            }
        }
    }
    for ty in SUPPORTED {
        let degrees = rd(ty).wonderful_degrees();
        if [1, 2, 4].iter().any(|d| degrees.contains(d)) {
            return Err(format!("{ty} reaches degree set {degrees:?}"));
        }
    }
    Ok(format!("{checked} (λ, μ) pairs vanish in degrees 1, 2, 4; degree sets avoid them for {} types", SUPPORTED.len()))
}

fn criterion_4() -> Outcome {
    let mut checked = 0usize;
    for (ty, radius, only) in [("A1xA1", 4, None), ("A2", 4, None), ("B2", 4, None), ("G2", 4, None), ("A3", 3, Some(3)), ("B3", 3, Some(3))] {
        let rd = rd(ty);
        for mu in dominant_box(rd.rank(), radius) {
            let counter = WonderfulCounter::new(&rd, &mu).map_err(|e| e.to_string())?;
            for lambda in integer_box(rd.rank(), -radius, radius) {
                let m = counter.degree_vector(&lambda);
                let bad = match only {
                    Some(i) => m[i] > 1,
                    None => m.iter().any(|&x| x > 1),
                };
                if bad {
                    return Err(format!("{ty}: λ = {lambda:?}, μ = {mu}: {m:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (λ, μ) pairs multiplicity-free (all degrees in rank 2, m³ for A3, B3)"))
}

/// Searches at `μ = 0` and confirms the first hit through the rational
/// closed form.
fn search_and_confirm(ty: &str, target: &str, radius: i64, limit: Duration) -> Outcome {
    let start = Instant::now();
    let rd = rd(ty);
    let mu = Weight::zero(rd.rank());
    let target: Target = target.parse().map_err(|e: regcomp::engine::TargetParseError| e.0)?;
    let hits = search_wonderful(&rd, &mu, &target, radius).map_err(|e| e.to_string())?;
    let first = hits.first().ok_or("no hit")?;
    let lambda = Weight::from_ints(&first.lambda);
    let confirmed: Vec<usize> = (0..=rd.group_dimension())
        .map(|i| wonderful_multiplicity(&rd, &lambda, &mu, i).unwrap().value)
        .collect();
    if confirmed != first.multiplicities || !target.holds(&confirmed) {
        return Err(format!("hit λ = {lambda} not confirmed: {confirmed:?}"));
    }
    let took = within(limit, start)?;
    Ok(format!("{} hits, first λ = {lambda} with m = {confirmed:?} in {}", hits.len(), secs(took)))
}

fn criterion_7(configs: &mut Configurations) -> Outcome {
    let rd = rd("A1");
    let fan = Arc::new(ChamberFan::wonderful(rd.clone()));
    for n in -8i64..=8 {
        let lambda = Weight::from_ints(&[n]);
        let h = PLFunction::linear(fan.clone(), lambda.clone()).unwrap();
        let mut closed = vec![0i64; 4];
        let mut general = vec![0i64; 4];
        for mu in dominant_box(1, 14) {
            let dim = rd.weyl_dimension(&mu).unwrap().to_i64().unwrap();
            let c = wonderful_degree_vector(&rd, &lambda, &mu);
            let g: Vec<usize> = multiplicities(&h, &mu).unwrap().iter().map(|r| r.value).collect();
            configs.engine(&h, &mu);
            for i in 0..4 {
                closed[i] += c[i] as i64 * dim * dim;
                general[i] += g[i] as i64 * dim * dim;
            }
        }
        let classical = vec![binom(n + 3, 3), 0, 0, binom(-n - 1, 3)];
        if closed != classical || general != classical {
            return Err(format!("n = {n}: closed {closed:?}, general {general:?}, classical {classical:?}"));
        }
    }
    Ok("Σ_μ m^i(μ)·dim L(μ)² = h^i(ℙ³, O(n)) for n in [-8, 8] (closed form and general formula)".into())
}

/// Engine totals of `Σ a_ρ D_ρ` over the μ box of the given radius.
fn toric_totals(fan: &Arc<ChamberFan>, rays: &[Vec<i64>], a: &[i64], radius: i64, configs: &mut Configurations) -> Vec<i64> {
    let r = rays[0].len();
    let h = pl_from_values(fan, rays, a);
    let mut out = vec![0; r + 1];
    for mu in integer_box(r, -radius, radius) {
        let mu = Weight::from_ints(&mu);
        configs.toric(&h, &mu);
        for (i, m) in toric_degree_vector(&h, &mu).unwrap().iter().enumerate() {
            out[i] += *m as i64;
        }
    }
    out
}

struct Surface {
    name: &'static str,
    rays: &'static [[i64; 2]],
    class: fn(&[i64]) -> Vec<i64>,
    margin: i64,
}

fn check_surface(s: &Surface, configs: &mut Configurations, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let rays: Vec<Vec<i64>> = s.rays.iter().map(|r| r.to_vec()).collect();
    let fan = complete_fan(2, &cyclic_cones(s.rays));
    let grid = integer_box(rays.len(), -4, 4);
    let size = |a: &Vec<i64>| a.iter().map(|x| x.abs()).max().unwrap();
    let mut representative: BTreeMap<Vec<i64>, &Vec<i64>> = BTreeMap::new();
    for a in &grid {
        let rep = representative.entry((s.class)(a)).or_insert(a);
        if size(a) < size(rep) {
            *rep = a;
        }
    }
    let mut totals = BTreeMap::new();
    for (class, a) in &representative {
        totals.insert(class.clone(), toric_totals(&fan, &rays, a, size(a) + s.margin, configs));
    }
    for a in &grid {
        let classical = toric_surface(s.rays, a);
        if totals[&(s.class)(a)] != classical {
            return Err(format!("{} a = {a:?}: engine {:?}, classical {classical:?}", s.name, totals[&(s.class)(a)]));
        }
    }
    for a in grid.choose_multiple(rng, 24) {
        let direct = toric_totals(&fan, &rays, a, size(a) + s.margin, configs);
        if direct != totals[&(s.class)(a)] {
            return Err(format!("{} a = {a:?}: translation identity fails, {direct:?}", s.name));
        }
    }
    Ok(grid.len())
}

fn criterion_8(configs: &mut Configurations) -> Outcome {
    let start = Instant::now();
    let p1: Vec<Vec<i64>> = P1_RAYS.iter().map(|r| r.to_vec()).collect();
    let p1_fan = complete_fan(1, &p1.iter().map(|r| vec![r.clone()]).collect());
    for d in -6..=6 {
        for a in [[d, 0], [0, d]] {
            let got = toric_totals(&p1_fan, &p1, &a, 8, configs);
            if got != projective_space(1, d) {
                return Err(format!("ℙ¹ O({d}): {got:?}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let surfaces = [
        Surface { name: "ℙ²", rays: &P2_RAYS, class: |a| vec![a[0] + a[1] + a[2]], margin: 4 },
        Surface { name: "ℙ¹×ℙ¹", rays: &P1XP1_RAYS, class: |a| vec![a[0] + a[2], a[1] + a[3]], margin: 1 },
        Surface { name: "F₁", rays: &F1_RAYS, class: |a| vec![a[0] + a[2] + a[3], a[1] + a[3]], margin: 4 },
    ];
    let mut divisors = 13;
    for s in &surfaces {
        divisors += check_surface(s, configs, &mut rng)?;
    }
    // ℙ² also against the binomial formulas
    for d in -12..=12 {
        if toric_surface(&P2_RAYS, &[d, 0, 0]) != projective_space(2, d) {
            return Err(format!("ℙ² oracles disagree at O({d})"));
        }
    }
    Ok(format!("{divisors} divisors on ℙ¹, ℙ², ℙ¹×ℙ¹, F₁ match classical dimensions in {}", secs(start.elapsed())))
}

fn criterion_9(configs: &mut Configurations) -> Outcome {
    let mut checked = 0;
    for ty in ["A2", "B2", "G2"] {
        let rd = rd(ty);
        let r = rd.rank();
        let fan = Arc::new(ChamberFan::wonderful(rd.clone()));
        for lambda in [Weight::zero(r), rd.fundamental_weight(0)] {
            let h = PLFunction::linear(fan.clone(), lambda.clone()).unwrap();
            for gamma in integer_box(r, -4, 4) {
                let nu = lambda.add(&rd.root_weight(&gamma));
                configs.add(&h, &nu);
                let lc = refine(&h, &nu).map_err(|e| e.to_string())?;
                for t in &rd.weyl_elements()[1..] {
                    let j = t.descent_set();
                    let in_qt = (0..r).all(|k| (gamma[k] > 0) == j.contains(k));
                    let mut expected = vec![0; r + 1];
                    if in_qt {
                        expected[j.len() - 1] = 1;
                    }
                    let dims = pair_dims_v_w(&lc, j, r).dims;
                    if dims != expected {
                        return Err(format!("{ty} t = {} λ = {lambda} γ = {gamma:?}: {dims:?}", t.word_string()));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (t, ν) pairs over A2, B2, G2 with ν − λ in the root box 4"))
}

fn criterion_10(configs: &Configurations) -> Outcome {
    let start = Instant::now();
    for (k, (h, nu)) in configs.list.iter().enumerate() {
        let fail = |m: String| format!("configuration {k} (ν = {nu}): {m}");
        let lc = refine(h, nu).map_err(|e| fail(e.to_string()))?;
        lc.check_invariants(h, nu).map_err(fail)?;
        lc.check_sign_soundness(h, nu, 100, k as u64).map_err(fail)?;
        if refine(h, nu).map_err(|e| fail(e.to_string()))? != lc {
            return Err(fail("refinement differs between runs".into()));
        }
        check_euler_all(&lc, h.fan().rank()).map_err(fail)?;
    }
    Ok(format!("{} distinct refinements validated in {}", configs.list.len(), secs(start.elapsed())))
}

fn main() {
    let mut configs = Configurations::default();
    let mut failures = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = secs(start.elapsed());
        match result {
            Ok(detail) => println!("[PASS] criterion {n} ({name}): {detail} [{took}]"),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {n} ({name}): {detail} [{took}]");
            }
        }
    };
    report(1, "blow-up of PGL(3)", &mut || criterion_1(&mut configs));
    report(2, "general formula vs closed form", &mut || criterion_2(&mut configs));
    report(3, "vanishing in degrees 1, 2, 4", &mut criterion_3);
    report(4, "multiplicity-freeness", &mut criterion_4);
    report(5, "D4 multiplicity 3 in degree 5", &mut || search_and_confirm("D4", "m5=3", 8, Duration::from_secs(120)));
    report(6, "F4 degrees 10 and 11", &mut || search_and_confirm("F4", "m10>0,m11>0", 12, Duration::from_secs(600)));
    report(7, "ℙ³ as wonderful PGL(2)", &mut || criterion_7(&mut configs));
    report(8, "toric line bundles", &mut || criterion_8(&mut configs));
    report(9, "pair cohomology detects Q_t", &mut || criterion_9(&mut configs));
    report(10, "refiner and cohomology invariants", &mut || criterion_10(&configs));
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
