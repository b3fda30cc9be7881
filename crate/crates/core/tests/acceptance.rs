//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances are exact unless a time limit is stated.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topomu::decision::{bounded_sat, bounded_valid, canonical_frames, SatResult, SearchConfig, ValidResult};
use topomu::frames::random::{random_frame, random_model, random_valuation};
use topomu::frames::{check_frame_class, fmp_bound, irreflexive_unfold, Exponent, FrameClass, Model};
use topomu::morphisms::{check_p_morphism, compute_bisimilarity, quotient_model, sigma_atoms, BisimMode};
use topomu::proofs::{derived_theorems, fix_instance, soundness_fuzz, FuzzConfig, Schema};
use topomu::semantics::{eval_closed, evaluate, gfp_trace, Environment};
use topomu::syntax::random::FormulaGen;
use topomu::syntax::{closure_set, parse_formula};
use topomu::tangle::{build_spine, expressivity_experiment, separating_formula, ExperimentReport};
use topomu::topology::{lazy_verify, LazyFrameSpace, VerifyConfig};
use topomu::{Formula, Symbol, WorldSet};

const SPINE_LIMIT: Duration = Duration::from_secs(1);
const EXPERIMENT_LIMIT: Duration = Duration::from_secs(5 * 60);
const FUZZ_LIMIT: Duration = Duration::from_secs(2 * 60);
const LAZY_LIMIT: Duration = Duration::from_secs(60);

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn atoms() -> Vec<Symbol> {
    vec![Symbol::new("p"), Symbol::new("q")]
}

fn f(text: &str) -> Formula {
    parse_formula(text).expect("fixed formula parses")
}

fn spine_evaluation() -> Verdict {
    let t = Instant::now();
    let spine = build_spine(50).expect("spine");
    let ext = eval_closed(&spine, &separating_formula().normalize().expect("positive")).expect("closed");
    let elapsed = t.elapsed();
    verdict(
        ext.to_vec() == vec![51, 52] && elapsed < SPINE_LIMIT,
        format!(
            "extension {:?} in {elapsed:.2?} (limit {SPINE_LIMIT:?})",
            ext.to_vec()
        ),
    )
}

fn expressivity_gap(report: &ExperimentReport, elapsed: Duration) -> Verdict {
    verdict(
        report.all_agree()
            && report.separator_at_omega != report.separator_at_omega_plus2
            && elapsed < EXPERIMENT_LIMIT,
        format!(
            "{} of {} formulas agree at 30 and 32; separator gives {} / {}; {elapsed:.2?} (limit {EXPERIMENT_LIMIT:?})",
            report.omega_agreement,
            report.formula_count,
            report.separator_at_omega,
            report.separator_at_omega_plus2
        ),
    )
}

fn parity(report: &ExperimentReport) -> Verdict {
    // Recount from the spine directly rather than trusting the row totals.
    let spine = build_spine(report.m).expect("spine");
    let n = report.m + 3;
    let mut recount = 0;
    for row in &report.rows {
        let truth = eval_closed(&spine, &f(&row.formula)).expect("closed");
        let odd = |w: usize| {
            if w < report.m {
                w % 2 == 1
            } else {
                w == report.m + 1
            }
        };
        for a in row.cutoff + 1..n {
            for b in a + 1..n {
                if odd(a) == odd(b) && truth.contains(a) != truth.contains(b) {
                    recount += 1;
                }
            }
        }
    }
    verdict(
        report.total_violations == 0 && recount == 0,
        format!(
            "{} violations reported, {recount} recounted",
            report.total_violations
        ),
    )
}

fn soundness() -> Verdict {
    let t = Instant::now();
    let runs = [
        (
            vec![Schema::Taut, Schema::K, Schema::W, Schema::Fix],
            FrameClass::Wk4,
            40_000,
        ),
        (vec![Schema::T0Ax], FrameClass::Wk4T0, 10_000),
        (vec![Schema::FourAx], FrameClass::K4, 10_000),
    ];
    let mut failures = 0;
    let mut per_schema = BTreeMap::new();
    for (i, (logic, class, trials)) in runs.into_iter().enumerate() {
        let r = soundness_fuzz(&logic, &FuzzConfig::new(class, trials, 7, 40 + i as u64));
        failures += r.failures + r.rule_failures;
        for (name, tally) in r.schemas {
            per_schema.insert(name, tally.instances);
        }
    }
    let elapsed = t.elapsed();
    let enough = per_schema.len() == 6 && per_schema.values().all(|&k| k >= 10_000);
    verdict(
        failures == 0 && enough && elapsed < FUZZ_LIMIT,
        format!("{failures} failures, instances {per_schema:?}, {elapsed:.2?} (limit {FUZZ_LIMIT:?})"),
    )
}

fn theorems() -> Verdict {
    let frames: Vec<_> = (1..=5)
        .flat_map(|n| canonical_frames(FrameClass::Wk4, n))
        .collect();
    let gen = FormulaGen::new(&["p", "q"], 2);
    let x = Symbol::new("Z");
    let mut r = rng(5);
    let mut bad = None;
    let mut checked = 0usize;
    'outer: for trial in 0..100 {
        let theta = gen.positive_in(&mut r, x);
        let phi = gen.formula(&mut r);
        let psi = gen.formula(&mut r);
        let schema = derived_theorems(x, &theta, &phi, &psi);
        for frame in &frames {
            for _ in 0..20 {
                let m = random_valuation(&mut r, frame.clone(), &atoms());
                for (item, t) in schema.iter().enumerate() {
                    checked += 1;
                    if eval_closed(&m, t).expect("closed").count() != m.len() {
                        bad = Some(format!("trial {trial}, item {}: {t} on {:?}", item + 1, m.frame));
                        break 'outer;
                    }
                }
            }
        }
    }
    verdict(
        bad.is_none(),
        bad.unwrap_or_else(|| format!("{checked} instance checks on {} frames", frames.len())),
    )
}

/// Greatest fixpoint by Knaster-Tarski: the union of all post-fixpoints.
fn gfp_by_subsets(m: &Model, x: Symbol, body: &Formula) -> WorldSet {
    let n = m.len();
    let mut acc = WorldSet::empty(n);
    let mut env = Environment::new();
    for mask in 0u64..1 << n {
        let s = WorldSet::from_mask(n, mask);
        env.insert(x, s.clone());
        if s.is_subset(&evaluate(m, body, &env).expect("closed")) {
            acc.union_with(&s);
        }
    }
    acc
}

fn fixpoint_laws() -> Verdict {
    let gen = FormulaGen::new(&["p", "q"], 4);
    let x = Symbol::new("Z");
    let mut r = rng(6);
    let mut mismatches = 0;
    for _ in 0..200 {
        let body = gen.positive_in(&mut r, x);
        let nu = Formula::nu(x, body.clone()).alpha_normalize();
        let class = FrameClass::VALUES[r.gen_range(0..FrameClass::VALUES.len())];
        let n = r.gen_range(1..=12);
        let frame = random_frame(&mut r, class, n);
        let m = random_valuation(&mut r, frame, &atoms());
        let Formula::Nu(y, b) = &nu else { unreachable!() };
        if eval_closed(&m, &nu).expect("closed") != gfp_by_subsets(&m, *y, b) {
            mismatches += 1;
        }
    }
    let mut slow = 0;
    for _ in 0..1000 {
        let body = gen.positive_in(&mut r, x);
        let nu = Formula::nu(x, body).alpha_normalize();
        let m = random_model(&mut r, FrameClass::All, 12, &atoms());
        let trace = gfp_trace(&m, &nu, &Environment::new()).expect("closed");
        if trace.stabilization > m.len() {
            slow += 1;
        }
    }
    verdict(
        mismatches == 0 && slow == 0,
        format!("{mismatches} gfp mismatches of 200, {slow} late stabilizations of 1000"),
    )
}

fn bounded_formula(gen: &FormulaGen, r: &mut ChaCha8Rng, max_size: usize) -> Formula {
    loop {
        let g = gen.formula(r);
        if g.size() <= max_size {
            return g;
        }
    }
}

fn morphism_invariance() -> Verdict {
    let gen = FormulaGen::new(&["p", "q"], 4);
    let mut r = rng(7);
    let formulas: Vec<Formula> = (0..200).map(|_| bounded_formula(&gen, &mut r, 8)).collect();
    let keep: BTreeSet<Symbol> = atoms().into_iter().collect();
    let (mut not_morphism, mut not_commuting, mut shrunk) = (0, 0, 0);
    for _ in 0..500 {
        let m = random_model(&mut r, FrameClass::Wk4, 8, &atoms());
        let part = compute_bisimilarity(&m, &BisimMode::Atoms(keep.clone()));
        let Ok((q, proj)) = quotient_model(&m, &part, &keep) else {
            not_morphism += 1;
            continue;
        };
        if !check_p_morphism(&proj, &m, &q, &keep).is_yes() {
            not_morphism += 1;
        }
        shrunk += usize::from(q.len() < m.len());
        for g in &formulas {
            let big = eval_closed(&m, g).expect("closed");
            let small = eval_closed(&q, g).expect("closed");
            if proj.preimage(&small) != big {
                not_commuting += 1;
            }
        }
    }
    verdict(
        not_morphism == 0 && not_commuting == 0,
        format!("{not_morphism} non-morphisms, {not_commuting} non-commuting evaluations; {shrunk} of 500 quotients proper"),
    )
}

fn quotient_class() -> Verdict {
    let gen = FormulaGen::new(&["p", "q"], 3);
    let mut r = rng(8);
    let mut bad = 0;
    for _ in 0..500 {
        let m = random_model(&mut r, FrameClass::Wk4, 8, &atoms());
        let sigma = closure_set(&gen.formula(&mut r));
        let keep = sigma_atoms(&sigma);
        let part = compute_bisimilarity(&m, &BisimMode::Sigma(sigma));
        match quotient_model(&m, &part, &keep) {
            Ok((q, _)) if q.frame.is_weakly_transitive() => {}
            _ => bad += 1,
        }
    }
    verdict(bad == 0, format!("{bad} of 500 quotients not weakly transitive"))
}

fn unfolding() -> Verdict {
    let gen = FormulaGen::new(&["p", "q"], 4);
    let mut r = rng(9);
    let formulas: Vec<Formula> = (0..200).map(|_| gen.formula(&mut r)).collect();
    let (mut size_bad, mut sat_bad, mut pre_bad) = (0, 0, 0);
    for _ in 0..500 {
        let m = random_model(&mut r, FrameClass::Wk4, 7, &atoms());
        let (u, proj) = irreflexive_unfold(&m).expect("weakly transitive");
        let refl = (0..m.len()).filter(|&w| m.frame.is_reflexive_at(w)).count();
        if u.len() != (m.len() - refl) + 2 * refl
            || !check_frame_class(&u.frame, FrameClass::IrrWk4).is_member()
        {
            size_bad += 1;
        }
        for g in &formulas {
            let a = eval_closed(&m, g).expect("closed");
            let b = eval_closed(&u, g).expect("closed");
            sat_bad += usize::from(a.is_empty() != b.is_empty());
            pre_bad += usize::from(proj.preimage(&a) != b);
        }
    }
    verdict(
        size_bad == 0 && sat_bad == 0 && pre_bad == 0,
        format!(
            "{size_bad} size mismatches, {sat_bad} satisfiability mismatches, {pre_bad} preimage mismatches"
        ),
    )
}

fn fmp() -> Verdict {
    let one = fmp_bound(1).expect("bound");
    let eight = one.total.to_biguint(64) == Some(BigUint::from(8u32))
        && one.per_depth.len() == 1
        && one.depth_bound == 0;
    let mut mismatches = Vec::new();
    for s in 1..=4usize {
        let b = fmp_bound(s).expect("bound");
        // Depth 0: 2^s · 2^(2^s); depth n: that times 2^(bound at n-1).
        let base = BigUint::from(s) + (BigUint::from(1u32) << s);
        let mut prev: Option<Exponent> = None;
        for (depth, term) in b.per_depth.iter().enumerate() {
            let [e] = term.exponents() else {
                mismatches.push(format!("s={s} depth {depth}: not a single power"));
                continue;
            };
            let ok = match (&prev, e) {
                (None, Exponent::Int(k)) => *k == base,
                (Some(p), Exponent::AddPow { offset, inner }) => *offset == base && **inner == *p,
                (Some(p), Exponent::Int(k)) => p
                    .value(64)
                    .and_then(|v| u64::try_from(v).ok())
                    .is_some_and(|v| *k == &base + (BigUint::from(1u32) << v)),
                _ => false,
            };
            if !ok {
                mismatches.push(format!("s={s} depth {depth}: {e}"));
            }
            prev = Some(e.clone());
        }
        let mut total: Vec<Exponent> = b.per_depth.iter().map(|t| t.exponents()[0].clone()).collect();
        total.reverse();
        if b.per_depth.len() != s || b.depth_bound != s - 1 || b.total.exponents() != total.as_slice() {
            mismatches.push(format!("s={s}: depth count or total"));
        }
    }
    verdict(
        eight && mismatches.is_empty(),
        format!("fmpBound(1) total = {}; mismatches {mismatches:?}", one.total),
    )
}

fn lazy_space() -> Verdict {
    let t = Instant::now();
    let mut r = rng(11);
    let cfg = |seed| VerifyConfig {
        seed,
        ..VerifyConfig::default()
    };
    let (mut t0_violations, mut t0_checked) = (0, 0);
    for i in 0..100 {
        let n = r.gen_range(1..=6);
        let frame = random_frame(&mut r, FrameClass::Wk4T0, n);
        let ls = LazyFrameSpace::build(&frame).expect("weakly transitive");
        let rep = lazy_verify(&ls, cfg(i));
        t0_violations += rep.violations.len();
        t0_checked += usize::from(matches!(rep.t0, topomu::topology::GateStatus::Checked(_)));
    }
    let (mut td_violations, mut td_checked) = (0, 0);
    for i in 0..100 {
        let n = r.gen_range(1..=6);
        let frame = random_frame(&mut r, FrameClass::K4, n);
        let ls = LazyFrameSpace::build(&frame).expect("transitive");
        let rep = lazy_verify(&ls, cfg(1000 + i));
        td_violations += rep.violations.len();
        td_checked += usize::from(matches!(rep.td, topomu::topology::GateStatus::Checked(_)));
    }
    let elapsed = t.elapsed();
    verdict(
        t0_violations == 0 && td_violations == 0 && t0_checked == 100 && td_checked == 100 && elapsed < LAZY_LIMIT,
        format!(
            "wK4T0: {t0_violations} violations ({t0_checked} T0-gated); K4: {td_violations} violations ({td_checked} TD-gated); {elapsed:.2?} (limit {LAZY_LIMIT:?})"
        ),
    )
}

fn decision() -> Verdict {
    let cfg = SearchConfig::new(FrameClass::Wk4, 5);
    let z = Symbol::new("Z");
    let instances = [
        ("K", f("[](p -> q) -> ([]p -> []q)")),
        ("K", f("[](<>p -> q) -> ([]<>p -> []q)")),
        ("W", f("<><>p -> p | <>p")),
        ("W", f("<><>(p & ~q) -> (p & ~q) | <>(p & ~q)")),
        (
            "Fix",
            fix_instance(z, &Formula::dia(Formula::and(Formula::Var(z), f("q")))),
        ),
        (
            "Fix",
            fix_instance(z, &Formula::and(f("p"), Formula::boxed(Formula::Var(z)))),
        ),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, g) in &instances {
        match bounded_valid(g, &cfg) {
            Ok(ValidResult::NoCounterexampleUpToBound { .. }) => {}
            other => {
                ok = false;
                notes.push(format!("{name} {g}: {other:?}"));
            }
        }
    }
    match bounded_sat(&f("nu X. <>X"), &SearchConfig::new(FrameClass::IrrWk4, 4)) {
        Ok(SatResult::Satisfiable(w)) if w.model.len() == 2 => {}
        other => {
            ok = false;
            notes.push(format!("tangled top: {other:?}"));
        }
    }
    match bounded_sat(&f("<>T & []F"), &SearchConfig::new(FrameClass::Wk4, 4)) {
        Ok(SatResult::NoneUpToBound { .. }) => {}
        other => {
            ok = false;
            notes.push(format!("<>T & []F: {other:?}"));
        }
    }
    verdict(
        ok,
        if notes.is_empty() {
            format!(
                "{} instances valid up to 5 worlds; 2-world model; none for <>T & []F",
                instances.len()
            )
        } else {
            notes.join("; ")
        },
    )
}

type Criterion<'a> = Box<dyn FnOnce() -> Verdict + 'a>;

fn main() -> ExitCode {
    let t = Instant::now();
    let report = expressivity_experiment(30, 5).expect("m = 30 satisfies the precondition");
    let experiment_time = t.elapsed();

    let mut results: Vec<(&str, Criterion)> = vec![
        ("spine evaluation", Box::new(spine_evaluation)),
        (
            "expressivity gap",
            Box::new(|| expressivity_gap(&report, experiment_time)),
        ),
        ("parity lemma", Box::new(|| parity(&report))),
        ("soundness fuzz", Box::new(soundness)),
        ("derived theorems", Box::new(theorems)),
        ("fixpoint laws", Box::new(fixpoint_laws)),
        ("morphism invariance", Box::new(morphism_invariance)),
        ("quotient class", Box::new(quotient_class)),
        ("irreflexive unfolding", Box::new(unfolding)),
        ("fmp bound", Box::new(fmp)),
        ("symbolic space", Box::new(lazy_space)),
        ("bounded decision", Box::new(decision)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in results.drain(..).enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!v.ok);
        println!(
            "{status} {:>2} {name}: {} [{:.2?}]",
            i + 1,
            v.detail,
            start.elapsed()
        );
    }
    if failed == 0 {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 12 criteria fail");
        ExitCode::FAILURE
    }
}
