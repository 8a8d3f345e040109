//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line.
//!
//! All comparisons are exact; every value is an element of a finite ring.

use std::path::Path;
use std::process::Command;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use incidence_core::oracle::{self, Options, SweepEntry};
use incidence_core::{instances, sample, IncidenceAlgebra, Preorder, Ring, WeightSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

struct Sweep {
    entries: Vec<SweepEntry>,
    elapsed: Duration,
}

fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        let entries = oracle::sweep(5, &oracle::standard_rings(), Options::default());
        Sweep { entries, elapsed: start.elapsed() }
    })
}

/// Names of failed checks among `names`, over every swept instance.
fn sweep_failures(names: &[&str]) -> Vec<String> {
    sweep()
        .entries
        .iter()
        .filter_map(|e| e.report.as_ref())
        .flat_map(|r| {
            r.failures()
                .filter(|c| names.contains(&c.name.as_str()) || c.name == "run")
                .map(move |c| format!("{:?} over {}: {}", r.instance.relations, r.instance.ring, c.name))
        })
        .collect()
}

fn count(p: Preorder, ring: &str) -> (usize, usize, usize) {
    let space = WeightSpace::new(p.quotient(), Ring::parse(ring).unwrap());
    let r = oracle::verify_structure(&space, Options::default()).unwrap();
    (r.counts.mult.unwrap(), r.counts.inner.unwrap(), r.counts.tree_trivial.unwrap())
}

#[test]
fn criterion_1_decomposition_sweep() {
    let s = sweep();
    let checked = s.entries.iter().filter(|e| e.report.is_some()).count();
    let skipped = s.entries.len() - checked;
    let failures = sweep_failures(&["decomposition", "intersection", "product_count"]);
    // 1 + 1 + 3 + 10 + 44 connected posets, five rings
    let ok = failures.is_empty() && s.entries.len() == 59 * 5 && skipped == 0 && s.elapsed < Duration::from_secs(600);
    report(
        1,
        ok,
        &format!("{checked} instances, {skipped} skipped, {} failures, {:.1?}", failures.len(), s.elapsed),
    );
}

#[test]
fn criterion_2_inner_count() {
    let failures = sweep_failures(&["inner_count"]);
    let pinned = [
        (count(instances::crown(), "Z/5"), (256, 64, 4)),
        (count(instances::diamond(), "Z/5"), (64, 64, 1)),
        (count(instances::chain(3), "Z/12"), (16, 16, 1)),
    ];
    let pinned_ok = pinned.iter().all(|(got, want)| got == want);
    report(2, failures.is_empty() && pinned_ok, &format!("{} failures, pinned {:?}", failures.len(), pinned));
}

#[test]
fn criterion_3_innerness_equivalence() {
    let mut failures = sweep_failures(&["innerness_equivalence", "path_independence", "mult_equals_inner_iff_trivial_mult1"]);
    let six: Vec<Preorder> = oracle::posets(6).into_iter().filter(|p| p.quotient().is_connected()).collect();
    let mut six_checked = 0;
    for p in &six {
        for ring in ["Z/2", "Z/3"] {
            let space = WeightSpace::new(p.quotient(), Ring::parse(ring).unwrap());
            let r = oracle::verify_structure(&space, Options::default()).unwrap();
            six_checked += 1;
            failures.extend(
                r.failures()
                    .filter(|c| c.name == "innerness_equivalence" || c.name == "path_independence")
                    .map(|c| format!("{:?} over {ring}: {}", r.instance.relations, c.name)),
            );
        }
    }
    report(
        3,
        failures.is_empty() && six.len() == 238,
        &format!("{} failures, plus {six_checked} six-point instances", failures.len()),
    );
}

#[test]
fn criterion_4_inner_multiplicative_conjugations() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2, 3] {
        for ring in ["Z/2", "Z/3"] {
            let alg = IncidenceAlgebra::new(instances::chain(n), Ring::parse(ring).unwrap());
            let r = oracle::verify_inner_conjugations(&alg, Options::default()).unwrap();
            ok &= r.passed();
            details.push(format!("{n}-chain/{ring}: {} induced", r.counts.mult.unwrap()));
        }
    }
    let elapsed = start.elapsed();
    report(4, ok && elapsed < Duration::from_secs(30), &format!("{}; {elapsed:.1?}", details.join(", ")));
}

#[test]
fn criterion_5_bimodule_endomorphisms() {
    let start = Instant::now();
    let cases = [(1, 1, "Z/2", 2, 1), (1, 1, "Z/3", 3, 2), (2, 1, "Z/2", 2, 1), (1, 2, "Z/2", 2, 1)];
    let mut ok = true;
    for (n, m, ring, endo, auto) in cases {
        let r = oracle::verify_bimodule_maps(n, m, &Ring::parse(ring).unwrap(), Options::default()).unwrap();
        ok &= r.passed() && r.counts.endomorphisms == Some(endo) && r.counts.automorphisms == Some(auto);
    }
    let elapsed = start.elapsed();
    report(5, ok && elapsed < Duration::from_secs(30), &format!("4 cases, {elapsed:.1?}"));
}

fn random_instances(count: usize, seed: u64) -> Vec<Arc<IncidenceAlgebra>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: Vec<Preorder> = (1..=4).flat_map(oracle::preorders).collect();
    let rings = ["Z/2", "Z/4", "Z/12", "Z/2 x Z/3", "M(2,Z/2)"];
    (0..count)
        .map(|_| {
            let p = shapes[rng.gen_range(0..shapes.len())].clone();
            let r = Ring::parse(rings[rng.gen_range(0..rings.len())]).unwrap();
            IncidenceAlgebra::new(p, r)
        })
        .collect()
}

#[test]
fn criterion_6_algebra_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut algebras = random_instances(8, 6);
    algebras.push(IncidenceAlgebra::new(instances::crown(), Ring::parse("Z/12").unwrap()));
    algebras.push(IncidenceAlgebra::new(instances::collapsed_pair(), Ring::parse("M(2,Z/2)").unwrap()));
    let mut bad = Vec::new();
    for alg in &algebras {
        let name = format!("{:?} over {}", alg.preorder().labels(), alg.ring().spec());
        let delta = alg.delta();
        for _ in 0..200 {
            let (f, g, h) = (sample::function(alg, &mut rng), sample::function(alg, &mut rng), sample::function(alg, &mut rng));
            let assoc = f.convolve(&g).unwrap().convolve(&h).unwrap() == f.convolve(&g.convolve(&h).unwrap()).unwrap();
            let ident = f.convolve(&delta).unwrap() == f && delta.convolve(&f).unwrap() == f;
            if !(assoc && ident && oracle::matrix_oracle(&f, &g).unwrap()) {
                bad.push(format!("{name}: triple law"));
                break;
            }
        }
        for _ in 0..50 {
            let u = sample::unit_function(alg, &mut rng);
            let v = u.invert().unwrap();
            let (d, l) = u.unit_decompose().unwrap();
            let recomposed = delta.add(&d).unwrap().convolve(&l).unwrap() == u && d.is_in_m() && l.is_in_l();
            let d = sample::radical(alg, &mut rng);
            let one_plus = delta.add(&d).unwrap();
            let w = one_plus.invert().unwrap();
            if !(u.convolve(&v).unwrap() == delta && v.convolve(&u).unwrap() == delta && recomposed)
                || one_plus.convolve(&w).unwrap() != delta
            {
                bad.push(format!("{name}: unit law"));
                break;
            }
        }
    }
    report(6, bad.is_empty(), &format!("{} instances, failures {:?}", algebras.len(), bad));
}

#[test]
fn criterion_7_automorphism_action() {
    let instances = [
        (instances::crown(), "Z/5"),
        (instances::diamond(), "Z/5"),
        (instances::chain(3), "Z/12"),
        (instances::collapsed_pair(), "Z/12"),
        (instances::crown(), "Z/2 x Z/3"),
    ];
    let mut bad = Vec::new();
    let mut systems = 0;
    for (p, ring) in instances {
        let alg = IncidenceAlgebra::new(p, Ring::parse(ring).unwrap());
        let space = WeightSpace::for_algebra(&alg);
        let all = oracle::enumerate_mult(&space, Options::default()).unwrap();
        let step = (all.len() / 20).max(1);
        for ws in all.iter().step_by(step).take(20) {
            systems += 1;
            let r = oracle::automorphism_check(ws, &alg, 100, 7).unwrap();
            bad.extend(r.failures().map(|c| format!("{:?} over {ring}: {}", alg.preorder().labels(), c.name)));
        }
    }
    report(7, bad.is_empty(), &format!("{systems} systems, failures {bad:?}"));
}

#[test]
fn criterion_8_quotient() {
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 1..=6 {
        for p in oracle::preorders(n) {
            checked += 1;
            if let Some(msg) = oracle::check_quotient_properties(&p) {
                bad.push(msg);
            }
            if p.is_poset() && p.quotient().as_preorder() != p {
                bad.push(format!("quotient of poset {:?} changed it", p.labels()));
            }
        }
    }
    report(8, bad.is_empty(), &format!("{checked} preorders, failures {bad:?}"));
}

fn incalg(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_incalg")).args(args).current_dir(dir).output().unwrap();
    (out.status.code().unwrap(), out.stdout)
}

#[test]
fn criterion_9_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("crown.txt"), "elements a b c d\nrel a c\nrel a d\nrel b c\nrel b d\n").unwrap();
    std::fs::write(
        d.join("w.json"),
        r#"{"ring":"Z/5","weights":[{"from":"a","to":"c","value":"2"},{"from":"a","to":"d","value":"1"},{"from":"b","to":"c","value":"1"},{"from":"b","to":"d","value":"1"}]}"#,
    )
    .unwrap();
    let verify = ["verify", "--poset", "crown.txt", "--ring", "Z/5", "--seed", "42", "--trials", "20"];
    let (c1, r1) = incalg(&verify, d);
    let (c2, r2) = incalg(&verify, d);
    let (c3, r3) = incalg(&["verify", "--poset", "crown.txt", "--ring", "Z/5", "--seed", "43", "--trials", "20"], d);
    let (inner_code, _) = incalg(&["is-inner", "--poset", "crown.txt", "--weights", "w.json", "--expect-inner"], d);
    let (bad_code, _) = incalg(&["verify", "--poset", "missing.txt", "--ring", "Z/5"], d);
    let ok = c1 == 0 && c2 == 0 && c3 == 0 && r1 == r2 && r1 != r3 && !r1.is_empty() && inner_code == 1 && bad_code == 2;
    report(9, ok, &format!("exit codes {c1}/{c2}/{c3}, is-inner {inner_code}, bad input {bad_code}, identical {}", r1 == r2));
}
