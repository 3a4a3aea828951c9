//! Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.
//!
//! Lines are written straight to the stdout handle so they show up even when
//! the harness captures test output.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use mubforge::artifact::{family_artifact, generator_artifact, to_json, Pipeline};
use mubforge::crosscheck::eigenbasis_crosscheck;
use mubforge::finite_field::make_field;
use mubforge::group::{Group, EXHAUSTIVE_LIMIT};
use mubforge::intertwiner::uniqueness_check;
use mubforge::lie::{verify_sl_decomposition, verify_sp_decomposition};
use mubforge::linalg::{span_rank, ExactMatrix};
use mubforge::mub::{
    flatness_profile, generate_family, is_flat, verify_fixture_q2, verify_fixture_real4,
};
use mubforge::representation::{build_representation, verify_character};

/// Residual bound for the floating-point eigenbasis route.
const FLOAT_TOL: f64 = 1e-9;
const LIMIT_Q2: Duration = Duration::from_secs(1);
const LIMIT_Q16: Duration = Duration::from_secs(300);
const LIMIT_ODD: Duration = Duration::from_secs(60);
const LIMIT_LIE_Q8: Duration = Duration::from_secs(120);
const LIMIT_FIXTURES: Duration = Duration::from_secs(1);
const MAX_Q: u64 = 32;

fn report(n: u32, title: &str, failures: &[String]) {
    let line = if failures.is_empty() {
        format!("criterion {n:>2} PASS  {title}\n")
    } else {
        format!("criterion {n:>2} FAIL  {title}: {}\n", failures.join("; "))
    };
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(failures.is_empty(), "{line}");
}

fn expect(failures: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

fn pipeline(p: u64, a: u32) -> Pipeline {
    Pipeline::build(p, a, MAX_Q, 0, 0).expect("pipeline builds")
}

/// D^{q+1} = I, det 1, unitary, conductor.
fn generator_basics(f: &mut Vec<String>, pl: &Pipeline, conductor: u32) {
    let d = &pl.generator.matrix;
    let q = pl.q() as u64;
    expect(f, d.pow(q + 1).unwrap().is_identity(), format!("q={q}: D^(q+1) != I"));
    expect(f, d.det().unwrap().is_one(), format!("q={q}: det D != 1"));
    expect(f, d.is_unitary(), format!("q={q}: D not unitary"));
    expect(f, d.conductor() == conductor, format!("q={q}: conductor {}", d.conductor()));
}

#[test]
fn criterion_01_q2_three_bases() {
    let mut f = Vec::new();
    let start = Instant::now();
    let pl = pipeline(2, 1);
    generator_basics(&mut f, &pl, 4);
    let d = &pl.generator.matrix;
    let d2 = d.mul(d).unwrap();
    expect(&mut f, d.mul(&d2).unwrap().is_identity(), "D^3 != I");
    expect(&mut f, is_flat(d, 2) && is_flat(&d2, 2), "D or D^2 not flat");
    let fam = generate_family(&pl.generator, 2).unwrap();
    expect(&mut f, fam.bases.len() == 3, "family size");
    let t = start.elapsed();
    expect(&mut f, t < LIMIT_Q2, format!("runtime {t:?}"));
    report(1, "q = 2: D^3 = I, det 1, unitary over Q(i), D and D^2 flat", &f);
}

#[test]
fn criterion_02_full_families() {
    let mut f = Vec::new();
    let mut timing = String::new();
    for a in [2, 3, 4] {
        let start = Instant::now();
        let pl = pipeline(2, a);
        let q = pl.q();
        generator_basics(&mut f, &pl, 4);
        let d = &pl.generator.matrix;
        let mut power = ExactMatrix::identity(q, 4);
        for k in 1..=q {
            power = power.mul(d).unwrap();
            expect(&mut f, is_flat(&power, q), format!("q={q}: D^{k} not flat"));
        }
        let t = start.elapsed();
        timing += &format!(" q={q}:{:.2}s", t.as_secs_f64());
        if q == 16 {
            expect(&mut f, t < LIMIT_Q16, format!("q=16 runtime {t:?}"));
        }
    }
    report(2, &format!("q in {{4, 8, 16}}: q+1 bases, every D^k flat;{timing}"), &f);
}

#[test]
fn criterion_03_half_families() {
    let mut f = Vec::new();
    let start = Instant::now();
    for (p, a) in [(3, 1), (5, 1), (3, 2)] {
        let pl = pipeline(p, a);
        let q = pl.q();
        generator_basics(&mut f, &pl, p as u32);
        let inv = pl.generator.matrix.dagger();
        let mut power = ExactMatrix::identity(q, p as u32);
        for k in 1..=(q - 1) / 2 {
            power = power.mul(&inv).unwrap();
            expect(&mut f, is_flat(&power, q), format!("q={q}: D^-{k} not flat"));
        }
        let fam = generate_family(&pl.generator, p as u32).unwrap();
        expect(&mut f, fam.bases.len() == (q + 1) / 2, format!("q={q}: family size"));
        if a == 1 {
            let involution = pl.generator.matrix.pow((q as u64 + 1) / 2).unwrap();
            let target = mubforge::CyclotomicNumber::from_rational(p as u32, mubforge::exact_number::rational(1, q as i64));
            let diag_flat = (0..q).all(|i| involution.get(i, i).norm_squared() == target);
            expect(&mut f, !diag_flat, format!("q={q}: involution has a flat diagonal"));
            expect(&mut f, flatness_profile(&pl.generator, p as u32, a).is_ok(), format!("q={q}: profile"));
        }
    }
    let t = start.elapsed();
    expect(&mut f, t < LIMIT_ODD, format!("runtime {t:?}"));
    report(3, "q in {3, 5, 9}: (q+1)/2 bases via D^-k; involution diagonal non-flat at q in {3, 5}", &f);
}

#[test]
fn criterion_04_character() {
    let mut f = Vec::new();
    for (p, a) in [(2, 1), (3, 1), (2, 2)] {
        let g = Group::new(make_field(p, a).unwrap());
        expect(&mut f, g.order() <= EXHAUSTIVE_LIMIT, "group too large for exhaustive scan");
        let rep = build_representation(&g, 0).unwrap();
        let cert = verify_character(&rep).unwrap();
        expect(&mut f, cert.passed(), format!("q={}: {}", g.q(), cert));
        let exhaustive = cert.clauses.iter().any(|c| c.tag == "character-vanishing" && c.detail.contains("exhaustive"));
        expect(&mut f, exhaustive, format!("q={}: vanishing not exhaustive", g.q()));
    }
    report(4, "character at q in {2, 3, 4}: degree, vanishing off Z, norm q^4, kernel q^2/p", &f);
}

#[test]
fn criterion_05_subgroups() {
    let mut f = Vec::new();
    for a in [1, 2, 3] {
        let g = Group::new(make_field(2, a).unwrap());
        let c = g.check_subgroup_partition().unwrap();
        expect(&mut f, c.passed(), format!("q={}: {c}", g.q()));
    }
    for p in [3, 5] {
        let g = Group::new(make_field(p, 1).unwrap());
        let c = g.check_subgroup_aliasing().unwrap();
        expect(&mut f, c.passed(), format!("q={}: {c}", g.q()));
    }
    report(5, "A_i meet in Z and cover G_q at q in {2, 4, 8}; half-family aliasing at q in {3, 5}", &f);
}

#[test]
fn criterion_06_sl_decomposition() {
    let mut f = Vec::new();
    let mut timing = String::new();
    for a in [1, 2, 3] {
        let start = Instant::now();
        let pl = pipeline(2, a);
        let q = pl.q();
        let dec = verify_sl_decomposition(&pl.rep, &pl.generator).unwrap();
        expect(&mut f, dec.certificate.passed(), format!("q={q}: {}", dec.certificate));
        expect(&mut f, dec.summands.len() == q + 1, format!("q={q}: summand count"));
        let all: Vec<ExactMatrix> = dec.summands.iter().flat_map(|s| s.basis.clone()).collect();
        expect(&mut f, span_rank(&all).unwrap() == q * q - 1, format!("q={q}: global rank"));
        let cycle: Vec<u32> = (1..=q as u32 + 1).map(|i| i % (q as u32 + 1) + 1).collect();
        expect(&mut f, dec.orbit == cycle, format!("q={q}: orbit {:?}", dec.orbit));
        let t = start.elapsed();
        timing += &format!(" q={q}:{:.2}s", t.as_secs_f64());
        if q == 8 {
            expect(&mut f, t < LIMIT_LIE_Q8, format!("q=8 runtime {t:?}"));
        }
    }
    report(6, &format!("sl_q into q+1 orthogonal Cartan subalgebras, (q+1)-cycle under D;{timing}"), &f);
}

#[test]
fn criterion_07_sp_decomposition() {
    let mut f = Vec::new();
    for a in [1, 2, 3] {
        let pl = pipeline(2, a);
        let q = pl.q();
        let dec = verify_sp_decomposition(&pl.rep, &pl.generator).unwrap();
        expect(&mut f, dec.certificate.passed(), format!("q={q}: {}", dec.certificate));
        let s = &dec.form.as_ref().expect("form").matrix;
        let d = &pl.generator.matrix;
        expect(&mut f, d.mul(s).unwrap().mul(&d.transpose()).unwrap() == *s, format!("q={q}: D S D^T != S"));
        let all: Vec<ExactMatrix> = dec.summands.iter().flat_map(|s| s.basis.clone()).collect();
        expect(&mut f, span_rank(&all).unwrap() == q * (q + 1) / 2, format!("q={q}: global rank"));
        expect(&mut f, dec.summands.iter().all(|s| s.basis.len() == q / 2), format!("q={q}: summand sizes"));
    }
    report(7, "sp_q: invariant skew S, q+1 summands of dimension q/2, (q+1)-cycle under D", &f);
}

#[test]
fn criterion_08_fixtures() {
    let mut f = Vec::new();
    let start = Instant::now();
    let a = verify_fixture_q2().unwrap();
    let b = verify_fixture_real4().unwrap();
    expect(&mut f, a.passed(), a.to_string());
    expect(&mut f, b.passed(), b.to_string());
    let t = start.elapsed();
    expect(&mut f, t < LIMIT_FIXTURES, format!("runtime {t:?}"));
    report(8, "2x2 and real 4x4 reference matrices: order 3, unitary/orthogonal, flat, Hadamard", &f);
}

#[test]
fn criterion_09_uniqueness_and_determinism() {
    let mut f = Vec::new();
    for (p, a) in [(2, 1), (2, 2), (3, 1)] {
        let pl = pipeline(p, a);
        let c = uniqueness_check(&pl.rep, 2).unwrap();
        expect(&mut f, c.passed(), format!("q={}: {c}", pl.q()));
    }
    let render = || {
        let pl = pipeline(2, 3);
        let fam = generate_family(&pl.generator, 2).unwrap();
        (
            to_json(&generator_artifact(&pl)).unwrap(),
            to_json(&family_artifact(&pl, &fam)).unwrap(),
        )
    };
    expect(&mut f, render() == render(), "library JSON differs between runs");

    let bin = env!("CARGO_BIN_EXE_mubforge");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let st = Command::new(bin)
            .args(["generate", "--p", "2", "--a", "2", "--out"])
            .arg(d.path())
            .output()
            .unwrap();
        expect(&mut f, st.status.success(), "generate failed");
    }
    for name in ["generator.json", "mub_family.json"] {
        let x = std::fs::read(dirs[0].path().join(name)).unwrap_or_default();
        let y = std::fs::read(dirs[1].path().join(name)).unwrap_or_default();
        expect(&mut f, !x.is_empty() && x == y, format!("{name} not byte-identical"));
    }
    report(9, "independent seeds give identical D; repeated runs give byte-identical JSON", &f);
}

#[test]
fn criterion_10_float_crosscheck() {
    let mut f = Vec::new();
    let mut residuals = String::new();
    for a in [1, 2, 3] {
        let pl = pipeline(2, a);
        let c = eigenbasis_crosscheck(&pl.generator, &pl.rep, FLOAT_TOL).unwrap();
        expect(&mut f, c.passed(), format!("q={}: {c}", pl.q()));
        if let Some(cl) = c.clauses.iter().find(|c| c.clause.starts_with("D^{-(i-1)}B")) {
            residuals += &format!(" q={}:{}", pl.q(), cl.detail.trim_start_matches("worst residual "));
        }
    }
    report(10, &format!("eigenbasis route agrees with exact route, tol {FLOAT_TOL:e};{residuals}"), &f);
}
