//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use pinfloer::models::{identity_cobordism, minus_e8_cobordism, single_entry_corruptions};
use pinfloer::models::{generate_random_complex, generate_random_filtered};
use pinfloer::pin2::{check_invariant_properties, cobordism_homology, ijp_homology, induced_module, InvariantCase};
use pinfloer::{model, BitMatrix, BitVec, FloerData, GradedComplex, Grading, ModelName, StandardModuleParams, Window};
use pinfloer_cli::document::{emit_cobordism, emit_document, parse_cobordism_between, parse_document};
use pinfloer_cli::table::Table;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_pinfloer");
const WINDOW: &str = "-24..24";
const LO: i64 = -24;
const HI: i64 = 24;
const BUDGET: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn pinfloer(args: &[&str]) -> (i32, String) {
    let o = Command::new(BIN).args(args).output().expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8(o.stdout).expect("utf8"))
}

fn model_file(name: &str) -> Result<PathBuf, String> {
    let path = scratch(&format!("{name}.json"));
    if !path.exists() {
        let (code, _) = pinfloer(&["model", name, "--window", WINDOW, "--emit", path.to_str().unwrap()]);
        ensure(code == 0, || format!("model {name} exited {code}"))?;
    }
    Ok(path)
}

/// Interior `degree -> dimension` of a CLI homology table.
fn cli_homology(name: &str, flavor: &str) -> Result<BTreeMap<i64, usize>, String> {
    let path = model_file(name)?;
    let (code, out) = pinfloer(&["homology", path.to_str().unwrap(), "--flavor", flavor, "--invariant", "--format", "csv"]);
    ensure(code == 0, || format!("homology {name} {flavor} exited {code}"))?;
    let t = Table::parse_csv(&out).ok_or("unparseable csv")?;
    let mut dims = BTreeMap::new();
    for r in t.rows.iter().filter(|r| r[2] == "no") {
        let d: Grading = r[0].parse().map_err(|e| format!("{e}"))?;
        let d = d.as_integer().ok_or("fractional degree")?;
        dims.insert(d, r[1].parse::<usize>().map_err(|e| e.to_string())?);
    }
    Ok(dims)
}

/// Module pieces generated by `1` in degree `top`; `Q^j V^k` sits in `top - j - 4k`.
#[derive(Clone, Copy)]
enum Piece {
    Laurent,
    QLaurent,
    LaurentModOne,
    QLaurentModQ,
    Ring,
    QRing,
}

fn piece_dim(p: Piece, top: i64, d: i64) -> usize {
    let j = (top - d).rem_euclid(4);
    if j == 3 {
        return 0;
    }
    let k = (top - d - j) / 4;
    usize::from(match p {
        Piece::Laurent => true,
        Piece::QLaurent => j >= 1,
        Piece::LaurentModOne => d > top,
        Piece::QLaurentModQ => j >= 1 && d > top - 1,
        Piece::Ring => k >= 0,
        Piece::QRing => k >= 0 && j >= 1,
    })
}

fn match_decomposition(name: &str, flavor: &str, parts: &[(Piece, i64, usize)]) -> Result<(), String> {
    let got = cli_homology(name, flavor)?;
    for d in LO + 1..HI {
        let want: usize = parts.iter().map(|&(p, t, m)| m * piece_dim(p, t, d)).sum();
        let have = got.get(&d).copied().unwrap_or(0);
        ensure(have == want, || format!("{name} {flavor}: degree {d} has {have}, expected {want}"))?;
    }
    Ok(())
}

fn min_nonzero(name: &str, flavor: &str) -> Result<i64, String> {
    cli_homology(name, flavor)?
        .into_iter()
        .find(|(_, n)| *n > 0)
        .map(|(d, _)| d)
        .ok_or_else(|| "no classes".into())
}

fn window() -> Window {
    Window::new(LO, HI)
}

fn c1_s3_tables() -> Outcome {
    for (flavor, rule) in [
        ("check", (|d: i64| d >= 0 && d.rem_euclid(4) != 3) as fn(i64) -> bool),
        ("hat", |d: i64| d < 0 && d.rem_euclid(4) != 0),
        ("bar", |d: i64| d.rem_euclid(4) != 3),
    ] {
        let got = cli_homology("s3", flavor)?;
        for d in LO + 1..HI {
            let have = got.get(&d).copied().unwrap_or(0);
            ensure(have == usize::from(rule(d)), || format!("{flavor} degree {d}: dim {have}"))?;
        }
    }
    Ok(format!("interior degrees {}..{} in all three flavors", LO + 1, HI - 1))
}

fn c2_s3_module() -> Outcome {
    let w = window();
    let data = model(ModelName::S3, w).map_err(|e| e.to_string())?;
    let m = induced_module(&data, pinfloer::Flavor::Hat, w).map_err(|e| e.to_string())?;
    let h = &m.homology;
    ensure(m.q.shift == Grading::int(-1) && m.v.shift == Grading::int(-4), || "operator degrees".into())?;
    let (mut tops, mut v_isos) = (0, 0);
    for d in LO + 1..HI {
        let g = Grading::int(d);
        if m.q_power_reliable(3, g) {
            ensure(m.q_power(3, g).is_zero(), || format!("Q^3 nonzero at {d}"))?;
        }
        if h.dim(g) == 1 && h.dim(g + 1) == 0 && m.q_power_reliable(2, g) {
            tops += 1;
            ensure(m.q_power(1, g).rank() == 1, || format!("Q zero at top {d}"))?;
            ensure(m.q_power(2, g).rank() == 1, || format!("Q^2 zero at top {d}"))?;
        }
        if h.dim(g) > 0 && h.is_reliable(g) && h.is_reliable(g - 4) {
            let v = m.v.block(g, h, h);
            ensure(v.rows() == v.cols() && v.rank() == v.cols(), || format!("V not iso at {d}"))?;
            v_isos += 1;
        }
    }
    // Tops at -1 - 4k; V out of every class whose target stays interior.
    let interior = LO + 1..HI;
    let want_tops = interior.clone().filter(|d| *d < 0 && d.rem_euclid(4) == 3 && d - 2 > LO).count();
    let want_v = interior.filter(|d| *d < 0 && d.rem_euclid(4) != 0 && d - 4 > LO).count();
    ensure(tops == want_tops && v_isos == want_v, || {
        format!("{tops} tops and {v_isos} V isomorphisms, expected {want_tops} and {want_v}")
    })?;
    Ok(format!("{tops} tower tops, V iso at {v_isos} degrees, Q^3 = 0"))
}

fn params(line: &str) -> Result<StandardModuleParams, String> {
    let mut vals = line.trim().split(' ').map(|kv| kv.split_once('=').map(|(_, v)| v.parse::<Grading>()));
    let mut next = || -> Result<Grading, String> {
        vals.next().flatten().ok_or("short line")?.map_err(|e| e.to_string())
    };
    Ok(StandardModuleParams {
        alpha: next()?,
        beta: next()?,
        gamma: next()?,
    })
}

fn c3_invariants() -> Outcome {
    let mut cases = Vec::new();
    let mut summary = Vec::new();
    for (name, want) in [("s3", "alpha=0 beta=0 gamma=0\n"), ("poincare", "alpha=-1 beta=-1 gamma=-1\n")] {
        let path = model_file(name)?;
        let (code, out) = pinfloer(&["invariants", path.to_str().unwrap()]);
        ensure(code == 0 && out == want, || format!("{name}: exit {code}, output {out:?}"))?;
        let p = params(&out)?;
        let doc = parse_document(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
        let dual_path = scratch(&format!("{name}_dual.json"));
        let dw = window().dual(Grading::int(-1));
        std::fs::write(&dual_path, emit_document(&doc.data.dual(), Some(dw))).unwrap();
        let (code, out) = pinfloer(&["invariants", dual_path.to_str().unwrap()]);
        ensure(code == 0, || format!("dual {name}: exit {code}"))?;
        let d = params(&out)?;
        ensure(d.alpha == -p.gamma && d.beta == -p.beta && d.gamma == -p.alpha, || {
            format!("dual {name}: {d}")
        })?;
        summary.push(format!("{name} ({p}), dual ({d})"));
        cases.push(InvariantCase {
            name: name.into(),
            params: p,
            dual: Some(d),
            rokhlin_times8: doc.data.metadata.rokhlin_times8,
        });
    }
    let report = check_invariant_properties(&cases);
    ensure(report.passed() && report.checks.len() == 6, || format!("{:?}", report.failures()))?;
    Ok(summary.join("; "))
}

fn c4_s1xs2() -> Outcome {
    match_decomposition("s1xs2", "check", &[(Piece::LaurentModOne, -3, 1), (Piece::LaurentModOne, -2, 1)])?;
    match_decomposition("s1xs2", "hat", &[(Piece::Ring, -2, 1), (Piece::Ring, -1, 1)])?;
    match_decomposition("s1xs2", "bar", &[(Piece::Laurent, -3, 1), (Piece::Laurent, -2, 1)])?;
    let min = min_nonzero("s1xs2", "check")?;
    ensure(min == -1, || format!("minimum degree {min}"))?;
    Ok("tensor decomposition with H(S^1) in all flavors, minimum -1".into())
}

fn c5_t3() -> Outcome {
    match_decomposition("t3", "check", &[(Piece::LaurentModOne, -4, 3), (Piece::LaurentModOne, -3, 3)])?;
    match_decomposition("t3", "hat", &[(Piece::Ring, -3, 3), (Piece::Ring, -2, 3)])?;
    match_decomposition("t3", "bar", &[(Piece::Laurent, -4, 3), (Piece::Laurent, -3, 3)])?;
    let min = min_nonzero("t3", "check")?;
    ensure(min == -2, || format!("minimum degree {min}"))?;
    let path = model_file("t3")?;
    for flavor in ["check", "hat", "bar"] {
        let (code, out) =
            pinfloer(&["specseq", path.to_str().unwrap(), "--flavor", flavor, "--invariant", "--pages", "12"]);
        ensure(code == 0, || format!("specseq {flavor} exited {code}"))?;
        ensure(out.contains("\nnonzero differentials on pages: 1, 3\n"), || format!("{flavor}: wrong pages"))?;
    }
    Ok("decomposition against H1+H2, minimum -2, differentials on pages 1 and 3".into())
}

fn c6_flat_bundle() -> Outcome {
    match_decomposition("flat_bundle", "check", &[(Piece::QLaurentModQ, -2, 1), (Piece::QLaurentModQ, 0, 1)])?;
    match_decomposition("flat_bundle", "hat", &[(Piece::QRing, -1, 1), (Piece::QRing, 1, 1)])?;
    match_decomposition("flat_bundle", "bar", &[(Piece::QLaurent, -2, 1), (Piece::QLaurent, 0, 1)])?;
    Ok("Q-submodule decompositions in all flavors".into())
}

const MODELS: [&str; 6] = ["s3", "poincare", "s1xs2", "t3", "flat_bundle", "hantzsche_wendt"];

fn c7_exact_sequences() -> Outcome {
    let mut runs = 0;
    for name in MODELS {
        let path = model_file(name)?;
        let p = path.to_str().unwrap();
        for extra in [&[][..], &["--invariant"][..]] {
            let mut args = vec!["les", p];
            args.extend_from_slice(extra);
            let (code, out) = pinfloer(&args);
            ensure(code == 0 && out.contains("\nexact: "), || format!("les {name} {extra:?}: exit {code}"))?;
            runs += 1;
        }
        for flavor in ["check", "hat", "bar"] {
            let (code, out) = pinfloer(&["gysin", p, "--flavor", flavor]);
            ensure(code == 0 && out.contains("\nexact: "), || format!("gysin {name} {flavor}: exit {code}"))?;
            runs += 1;
        }
    }
    let s3 = model(ModelName::S3, window()).map_err(|e| e.to_string())?;
    let les = ijp_homology(&s3, window(), true).map_err(|e| e.to_string())?;
    ensure(les.j.vanishes(), || "j nonzero on S3".into())?;
    Ok(format!("{runs} sequences exact at every interior junction; j = 0 on S3"))
}

fn c8_cobordisms() -> Outcome {
    let w = Window::new(-16, 16);
    for name in ModelName::data_models() {
        let data = model(name, w).map_err(|e| e.to_string())?;
        let ops = identity_cobordism(&data);
        for flavor in pinfloer::Flavor::ALL {
            let c = cobordism_homology(&data, &data, &ops, flavor, w, true).map_err(|e| e.to_string())?;
            for &d in &c.map.reliable {
                let m = c.map.block(d, &c.src, &c.tgt);
                ensure(m == BitMatrix::identity(c.src.dim(d)), || format!("{name} {flavor}: not identity at {d}"))?;
            }
        }
    }
    let s3 = model_file("s3")?;
    let p = model_file("poincare")?;
    let e8 = model_file("minus_e8_cobordism")?;
    let (code, out) = pinfloer(&[
        "cobmap", "--src", s3.to_str().unwrap(), "--tgt", p.to_str().unwrap(), "--ops", e8.to_str().unwrap(),
        "--flavor", "bar", "--invariant", "--format", "csv",
    ]);
    ensure(code == 0, || format!("cobmap exited {code}"))?;
    let body = out.strip_prefix("chain map: pass\n").ok_or("chain map check failed")?;
    let t = Table::parse_csv(body).ok_or("unparseable csv")?;
    let mut isos = 0;
    for r in t.rows.iter().filter(|r| r[5] == "no") {
        let d: i64 = r[0].parse().map_err(|_| "degree")?;
        let e: i64 = r[1].parse().map_err(|_| "degree")?;
        ensure(e == d + 2, || format!("degree shift {}", e - d))?;
        ensure(r[2] == r[3] && r[2] == r[4], || format!("not an isomorphism at {d}: {r:?}"))?;
        isos += usize::from(r[2] != "0");
    }
    ensure(isos >= 30, || format!("only {isos} interior degrees"))?;
    Ok(format!("identity on every model and flavor; -E8 iso of degree 2 at {isos} bar degrees"))
}

fn brute_force(c: &GradedComplex) -> BTreeMap<Grading, usize> {
    let v = |bits: u64, n: usize| BitVec::from_bools(&(0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>());
    let mut out = BTreeMap::new();
    for d in c.space.degrees() {
        let n = c.space.dim(d);
        let down = c.d(d);
        let kernel = (0u64..1 << n).filter(|&b| down.mul_vec(&v(b, n)).is_zero()).count();
        let up = c.d(d + 1);
        let image: BTreeSet<Vec<usize>> = (0u64..1 << up.cols()).map(|b| up.mul_vec(&v(b, up.cols())).support()).collect();
        out.insert(d, (kernel.trailing_zeros() - image.len().trailing_zeros()) as usize);
    }
    out
}

fn c9_properties() -> Outcome {
    for seed in 0..500u64 {
        let c = generate_random_complex(seed, (seed % 13) as usize, 1 + (seed % 5) as i64).map_err(|e| e.to_string())?;
        let h = c.homology().map_err(|e| e.to_string())?;
        for (d, n) in brute_force(&c) {
            ensure(h.dim(d) == n, || format!("seed {seed}: degree {d}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..1000 {
        let (r, c) = (rng.gen_range(0..=64), rng.gen_range(0..=64));
        let density = rng.gen_range(0.0..1.0);
        let mut m = BitMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                m.set(i, j, rng.gen_bool(density));
            }
        }
        let rank = m.rank();
        ensure(rank + m.kernel_basis().len() == c, || format!("matrix {k}: rank-nullity"))?;
        ensure(m.transpose().rank() == rank, || format!("matrix {k}: transpose rank"))?;
    }
    let w = Window::new(-4, 4);
    let mut rejected = 0;
    let mut by_check: BTreeMap<String, usize> = BTreeMap::new();
    for name in ModelName::data_models() {
        let data = model(name, w).map_err(|e| e.to_string())?;
        ensure(data.validate(w).passed(), || format!("{name} fails before corruption"))?;
        for c in single_entry_corruptions(&data) {
            let report = c.data.validate(w);
            let failures = report.failures();
            ensure(!failures.is_empty(), || format!("{name}: {} accepted", c.label))?;
            let first = if failures.iter().any(|f| f.check.starts_with("square_zero")) {
                "square_zero"
            } else if failures.iter().any(|f| f.check.starts_with("module")) {
                "module chain map"
            } else {
                "involution"
            };
            *by_check.entry(first.into()).or_default() += 1;
            rejected += 1;
        }
    }
    for seed in 0..200u64 {
        let f = generate_random_filtered(seed, 1 + (seed % 16) as usize, 1 + (seed % 5) as i64).map_err(|e| e.to_string())?;
        let ss = f.spectral_sequence(64);
        let h = f.complex.homology().map_err(|e| e.to_string())?;
        let last = ss.last().ok_or("no pages")?;
        ensure(ss.complete, || format!("filtration {seed}: incomplete"))?;
        for d in f.complex.space.degrees() {
            ensure(last.total_dim(d) == h.dim(d), || format!("filtration {seed}: degree {d}"))?;
        }
    }
    let checks: Vec<String> = by_check.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Ok(format!(
        "500 complexes, 1000 matrices, {rejected} corruptions rejected ({}), 200 filtrations",
        checks.join(", ")
    ))
}

fn c10_serialization() -> Outcome {
    let w = window();
    for name in ModelName::data_models() {
        let data: FloerData = model(name, w).map_err(|e| e.to_string())?;
        let text = emit_document(&data, Some(w));
        let doc = parse_document(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(doc.data == data, || format!("{name}: parsed data differs"))?;
        ensure(emit_document(&doc.data, doc.window) == text, || format!("{name}: re-emitted text differs"))?;
    }
    let fx = minus_e8_cobordism(w).map_err(|e| e.to_string())?;
    let text = emit_cobordism(&fx.name, &fx.ops);
    let ops = parse_cobordism_between(&text, &fx.src, &fx.tgt).map_err(|e| e.to_string())?;
    ensure(ops == fx.ops, || "cobordism operators differ".into())?;
    let s3 = model_file("s3")?;
    let t3 = model_file("t3")?;
    let (s3, t3) = (s3.to_str().unwrap(), t3.to_str().unwrap());
    let commands: [&[&str]; 6] = [
        &["validate", t3],
        &["homology", s3, "--flavor", "bar"],
        &["invariants", s3],
        &["les", t3, "--invariant"],
        &["specseq", t3, "--flavor", "check", "--pages", "6"],
        &["model", "flat_bundle", "--window", "-8..8"],
    ];
    for args in commands {
        let first = pinfloer(args);
        for _ in 0..2 {
            ensure(pinfloer(args) == first, || format!("{args:?} output differs between runs"))?;
        }
    }
    Ok("emit/parse identity on 7 builtin documents; 6 commands byte-identical over 3 runs".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("S3 tables", c1_s3_tables),
        ("S3 module structure", c2_s3_module),
        ("alpha/beta/gamma", c3_invariants),
        ("S1xS2", c4_s1xs2),
        ("T3", c5_t3),
        ("flat torus bundle", c6_flat_bundle),
        ("exact sequences", c7_exact_sequences),
        ("cobordism fixtures", c8_cobordisms),
        ("property suites", c9_properties),
        ("serialization", c10_serialization),
    ];
    // Documents are regenerated on every run.
    let _ = std::fs::remove_dir_all(Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance"));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{:.1}s]", k + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{:.1}s]", k + 1, elapsed.as_secs_f64());
            }
        }
        if elapsed > BUDGET && k + 1 != 9 {
            println!("             note: exceeded the {}s budget", BUDGET.as_secs());
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
