use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ktrunc::figures::{interlock_cells, FiguresConfig};
use ktrunc::functoriality::{crossing_count, ell, lemma_predicate, reconcile, TowerMapQuery};
use ktrunc::kgroups::{check_equivalence, k_closed_form, k_witt_form};
use ktrunc::mult::{theorem, GeneratorDescriptor, Parity};
use ktrunc::oracle::{auto_r_max, h1_fiber_lengths, honest_support, window_support, BasisSupport, OracleMode, ProductOracle};
use ktrunc::verify::{self, lambda_tally, pi_star_counts, Scale};
use ktrunc::{kgroups::band_length, Prime};

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn info(&self, detail: String) {
        println!("     info: {detail}");
    }
}

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn closed_vs_witt(r: &mut Report) {
    let start = Instant::now();
    let (mut cases, mut bad, mut first) = (0, 0, None);
    for p in [2, 3, 5, 7].map(prime) {
        for e in 1..=12 {
            for i in 1..=40 {
                cases += 1;
                let eq = check_equivalence(p, e, i);
                let direct = k_closed_form(p, e, i).bands == k_witt_form(p, e, i).bands;
                if !eq.agree || !direct {
                    bad += 1;
                    first.get_or_insert((p, e, i));
                }
            }
        }
    }
    let took = start.elapsed();
    r.line(
        "closed form vs Witt form",
        bad == 0 && took < Duration::from_secs(5),
        format!("{cases} cases, {bad} mismatches (first {first:?}), {} (target 5 s)", secs(took)),
    );
}

fn total_length(r: &mut Report) {
    let (mut cases, mut bad) = (0, 0);
    for p in [2, 3, 5, 7].map(prime) {
        for e in 1..=12 {
            for i in 1..=40 {
                cases += 1;
                if k_closed_form(p, e, i).total != i * (e - 1) {
                    bad += 1;
                }
            }
        }
    }
    r.line("total length", bad == 0, format!("{cases} cases, {bad} mismatches"));
}

fn oracle_agreement(r: &mut Report) {
    let start = Instant::now();
    let (mut cases, mut bad, mut unstable, mut first) = (0, 0, 0, None);
    for p in [2, 3].map(prime) {
        for e in 1..=6 {
            for i in 1..=8 {
                for j in (1..=25).filter(|&j| !p.divides(j)) {
                    cases += 1;
                    let r_max = auto_r_max(p, e, i, j);
                    let a = h1_fiber_lengths(p, e, i, j, r_max).unwrap();
                    let b = h1_fiber_lengths(p, e, i, j, r_max + 1).unwrap();
                    if a != b {
                        unstable += 1;
                    }
                    if b != band_length(p, e, i, j) {
                        bad += 1;
                        first.get_or_insert((p, e, i, j));
                    }
                }
            }
        }
    }
    let took = start.elapsed();
    r.line(
        "oracle agreement",
        bad == 0 && unstable == 0 && took < Duration::from_secs(60),
        format!(
            "{cases} bands, {bad} length mismatches (first {first:?}), {unstable} unstable in r_max, {} (target 60 s)",
            secs(took)
        ),
    );
}

fn worked_products(r: &mut Report) {
    let p = prime(3);
    let e = 2;
    // (parity of second factor, i1, j1, i2, j2, expected nonzero)
    let cases = [
        (Parity::A, 1, 2, 1, 2, true),
        (Parity::B, 2, 1, 3, 1, true),
        (Parity::A, 1, 2, 2, 4, false),
    ];
    let mut oracle = ProductOracle::new();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut window_parts = Vec::new();
    for (parity, i1, j1, i2, j2, want) in cases {
        let g1 = GeneratorDescriptor::new(Parity::A, p, e, i1, j1).unwrap();
        let g2 = GeneratorDescriptor::new(parity, p, e, i2, j2).unwrap();
        let th = theorem(parity, p, e, i1, j1, i2, j2).nonzero;
        let out = oracle.product(&g1, &g2).unwrap();
        let ok = th == want && out.is_nonzero() == want;
        pass &= ok;
        parts.push(format!(
            "{g1} · {g2}: theorem {th}, oracle {:?} λ={:?} (expected nonzero={want})",
            out.mode, out.lambda
        ));
        let forced = oracle.product_in(&g1, &g2, Some(OracleMode::Window)).unwrap();
        window_parts.push(format!("λ={:?}", forced.lambda));
    }
    r.line("worked products", pass, parts.join("; "));
    r.info(format!("window-mode λ for the same three products: {}", window_parts.join(", ")));
}

fn generator_vectors(r: &mut Report) {
    let p = prime(3);
    let e = 2;
    let support = |levels: &[usize], valuations: &[u64]| BasisSupport { levels: levels.to_vec(), valuations: valuations.to_vec() };
    let expected = [
        (Parity::A, 1, 2, support(&[0, 1], &[0, 0])),
        (Parity::A, 2, 1, support(&[1, 2], &[1, 0])),
        (Parity::A, 2, 4, support(&[0, 1], &[0, 0])),
        (Parity::B, 3, 1, support(&[1, 2], &[1, 0])),
        (Parity::B, 5, 2, support(&[1, 2], &[2, 0])),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut window_ok = 0;
    for (parity, i, j, want) in &expected {
        let g = GeneratorDescriptor::new(*parity, p, e, *i, *j).unwrap();
        let got = honest_support(&g).unwrap();
        let ok = got.as_ref() == Some(want);
        pass &= ok;
        parts.push(match got {
            Some(s) => format!("{g}: levels {:?} valuations {:?}{}", s.levels, s.valuations, if ok { "" } else { " (mismatch)" }),
            None => format!("{g}: no basis vector"),
        });
        if window_support(&g).unwrap().as_ref() == Some(want) {
            window_ok += 1;
        }
    }
    r.line("generator vectors", pass, parts.join("; "));
    r.info(format!("window representatives match {window_ok}/{} listed vectors", expected.len()));
}

fn functoriality(r: &mut Report) {
    let start = Instant::now();
    let (mut queries, mut ell_bad, mut rec_bad, mut lemma_bad) = (0u64, 0u64, 0u64, 0u64);
    for p in [2, 3].map(prime) {
        for m in 2..=12 {
            for n in 1..m {
                for j in (1..=60).filter(|&j| !p.divides(j)) {
                    for i in 1..=100 {
                        let q = TowerMapQuery::new(p, m, n, i, j).unwrap();
                        queries += 1;
                        let l = ell(&q);
                        if l != crossing_count(&q) {
                            ell_bad += 1;
                        }
                        if !reconcile(&q) {
                            rec_bad += 1;
                        }
                        if lemma_predicate(&q) && l as i64 <= q.t() {
                            lemma_bad += 1;
                        }
                    }
                }
            }
        }
    }
    let took = start.elapsed();
    let tower_ok = ell_bad == 0 && rec_bad == 0 && lemma_bad == 0 && took < Duration::from_secs(30);
    let (c, first) = pi_star_counts(6, 6, 15).unwrap();
    let pi_ok = c.literal_agree == c.queries;
    r.line(
        "functoriality",
        tower_ok && pi_ok,
        format!(
            "{queries} queries: ell≠crossing {ell_bad}, reconcile {rec_bad}, lemma {lemma_bad}, {} (target 30 s); \
             π^* vs min(ℓ′, t+1): {}/{} agree, first {}",
            secs(took),
            c.literal_agree,
            c.queries,
            first.unwrap_or_default()
        ),
    );
    r.info(format!(
        "π^* vs min(ℓ′, length of N): {}/{} agree; literal misses with length N = t+1: {}",
        c.honest_agree, c.queries, c.literal_disagree_full_length
    ));
}

fn suite_line(r: &mut Report, name: &str, suites: &[&str]) {
    let mut pass = true;
    let mut parts = Vec::new();
    for want in suites {
        let reports = verify::run(Scale::Full, Some(want)).unwrap();
        let report = reports.iter().find(|s| s.name == *want).expect("suite is registered");
        pass &= report.passed();
        parts.push(format!("{} {}/{}", report.name, report.checked - report.failures, report.checked));
    }
    r.line(name, pass, parts.join(", "));
}

fn figures(r: &mut Report) {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let figs = FiguresConfig::builtin().render_all().unwrap();
    let mut compared = 0;
    let mut mismatched = Vec::new();
    for f in figs.iter().filter(|f| f.name.starts_with("interlock") || f.name.starts_with("multtable")) {
        compared += 1;
        let want = std::fs::read_to_string(golden.join(format!("{}.csv", f.name))).unwrap_or_default();
        if want != f.csv {
            mismatched.push(f.name.clone());
        }
    }
    let mut cells = 0;
    let mut violations = 0;
    for p in [2, 3].map(prime) {
        for c in interlock_cells(p, 12, 11, 300, 180).unwrap() {
            cells += 1;
            if (c.green && c.red) || (c.red && c.j > 11 * c.i) {
                violations += 1;
            }
        }
    }
    r.line(
        "figures",
        compared == 6 && mismatched.is_empty() && violations == 0,
        format!("{compared} golden CSVs, mismatched {mismatched:?}; {cells} plotted cells, {violations} property violations"),
    );
}

fn lambda_consistency(r: &mut Report) {
    let t = lambda_tally(Scale::Full, true).unwrap();
    r.line(
        "λ-consistency",
        t.failures == 0,
        format!("{} products with existing operands, {} inconsistencies {}", t.checked, t.failures, t.first.unwrap_or_default()),
    );
    let all = lambda_tally(Scale::Full, false).unwrap();
    r.info(format!("including nonexistent operands (window mode): {} inconsistencies in {}", all.failures, all.checked));
}

fn main() -> ExitCode {
    let mut r = Report { failed: 0 };
    closed_vs_witt(&mut r);
    total_length(&mut r);
    oracle_agreement(&mut r);
    worked_products(&mut r);
    generator_vectors(&mut r);
    functoriality(&mut r);
    suite_line(&mut r, "identity suite", &["legendre", "nested-floor", "brace-identity", "gamma-ratio"]);
    suite_line(&mut r, "TC length bookkeeping", &["tc-length"]);
    figures(&mut r);
    lambda_consistency(&mut r);
    println!("{} criteria failed", r.failed);
    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
