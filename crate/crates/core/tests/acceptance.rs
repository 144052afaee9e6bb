//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS or FAIL line; the process fails if any do.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rand::{Rng, SeedableRng};

use saut_core::atlas::{named, subgroup_classes, SmallGroup};
use saut_core::control::{chi, psi_chi, psl_action, SL2Mat};
use saut_core::free_aut::{brute_force_centralizer, closure, d_prime_generators, fixing_first_two, FreeAutomorphism};
use saut_core::hom::{brute_force_homs, enumerate_hom_classes_all, same_class_sets, InjectivityMode};
use saut_core::orchestrator::{
    check_monotonicity, resume, run_in_memory, run_search, DegreeOutcome, RunOptions, RunReport, RunStatus, SearchConfig,
};
use saut_core::relations::check_gersten;
use saut_core::search::{check_certificate, classify, verify_certificate, Certificate, Classification};
use saut_core::sources::SourceGroups;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn sweep(rank: usize, lo: usize, hi: usize) -> Result<(RunReport, Vec<(usize, Certificate)>), String> {
    run_in_memory(&SearchConfig::new(rank, lo, hi), None).map_err(e)
}

/// Every certificate re-audits, and only the last degree is nontrivial.
fn check_sweep(report: &RunReport, certs: &[(usize, Certificate)], answer: usize) -> Result<(), String> {
    for d in &report.degrees {
        let expect_nontrivial = d.m == answer;
        match (&d.outcome, expect_nontrivial) {
            (DegreeOutcome::Exhausted { .. }, false) | (DegreeOutcome::Nontrivial { .. }, true) => {}
            (o, _) => return Err(format!("m = {}: unexpected {o:?}", d.m)),
        }
    }
    for (m, cert) in certs {
        let check = check_certificate(cert).map_err(e)?;
        ensure(check.passed, format!("certificate for m = {m} fails: {:?}", check.problems))?;
        ensure(cert.is_nontrivial() == (*m == answer), format!("certificate kind wrong at m = {m}"))?;
    }
    ensure(certs.iter().any(|(m, _)| *m == answer), "no certificate at the answer")?;
    ensure(report.statement == format!("x_{} = {answer}", report.rank), format!("statement {:?}", report.statement))
}

fn relations_hold_on_automorphisms() -> Outcome {
    let mut total = 0;
    for n in 3..=6 {
        let audit = check_gersten(n).map_err(e)?;
        ensure(audit.passed(), format!("n = {n}: {:?}", audit.failures.first()))?;
        ensure(audit.checked.iter().all(|&c| c > 0), format!("n = {n}: empty family"))?;
        total += audit.total_checked();
    }
    Ok(format!("{total} instances for n = 3..6"))
}

fn stabilizer_is_centralizer() -> Outcome {
    let n = 5;
    let elements = closure(&d_prime_generators(n).map_err(e)?, n, 10_000).map_err(e)?;
    ensure(elements.len() == 960, format!("|D_5'| = {}", elements.len()))?;
    let rho = FreeAutomorphism::rho(1, 2, n).map_err(e)?;
    let cent = brute_force_centralizer(&elements, &rho).map_err(e)?;
    let fix = fixing_first_two(&elements);
    ensure(cent == fix, "centralizer differs from the pointwise stabilizer")?;
    ensure(cent.len() == 12, format!("|S| = {}", cent.len()))?;
    let s = SourceGroups::new(n).map_err(e)?;
    ensure(s.stabilizer.len() == 12, "source stabilizer order")?;
    Ok("|S| = 12".into())
}

fn rank_three() -> Outcome {
    let (report, certs) = sweep(3, 2, 7)?;
    check_sweep(&report, &certs, 7)?;
    Ok(report.statement)
}

fn rank_four() -> Outcome {
    let (report, certs) = sweep(4, 2, 8)?;
    check_sweep(&report, &certs, 8)?;
    Ok(report.statement)
}

fn controls_audit() -> Outcome {
    for n in [3, 5] {
        let t = psl_action(n).map_err(e)?;
        let audit = verify_certificate(&t).map_err(e)?;
        ensure(audit.passed(), format!("n = {n}: {:?}", audit.failures.first()))?;
        ensure(classify(&t) == Classification::Nontrivial, format!("n = {n} classified trivial"))?;
        ensure(t.rho(1, 2).degree() == (1 << n) - 1, "degree")?;
    }
    Ok("degrees 7 and 31".into())
}

fn rank_five_lower_bound() -> Outcome {
    let (report, certs) = sweep(5, 2, 11)?;
    ensure(report.lower_bound == Some(12) && report.upper_bound.is_none(), format!("{report:?}"))?;
    for (m, cert) in &certs {
        ensure(!cert.is_nontrivial(), format!("nontrivial at m = {m}"))?;
        ensure(check_certificate(cert).map_err(e)?.passed, format!("record for m = {m} fails"))?;
    }
    // Without the injectivity filter the search must still come up empty.
    let mut cfg = SearchConfig::new(5, 2, 10);
    cfg.injectivity = InjectivityMode::Off;
    let (open, _) = run_in_memory(&cfg, None).map_err(e)?;
    ensure(open.upper_bound.is_none(), "injectivity-free cross-check found an action")?;
    Ok(format!("{}; cross-check without injectivity: {}", report.statement, open.statement))
}

fn hom_oracles() -> Outcome {
    let d3 = SourceGroups::new(3).map_err(e)?.d_prime;
    let cases: Vec<(SmallGroup, usize)> = vec![
        (named::cyclic(2), 4),
        (named::cyclic(2), 5),
        (named::symmetric(3), 5),
        (d3, 6),
        (named::alternating(4), 6),
    ];
    let mut sizes = Vec::new();
    for (g, m) in cases {
        let fast = enumerate_hom_classes_all(&g, &subgroup_classes(&g).map_err(e)?, m).map_err(e)?;
        let slow = brute_force_homs(&g, m).map_err(e)?;
        ensure(same_class_sets(&fast, &slow).map_err(e)?, format!("{} into S_{m}", g.name()))?;
        sizes.push(fast.len().to_string());
    }
    Ok(format!("class counts {}", sizes.join(", ")))
}

fn character_of_sl2() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(12);
    let word = |rng: &mut rand::rngs::StdRng| -> Result<SL2Mat, String> {
        let len = rng.gen_range(0..=24);
        let mut m = SL2Mat::identity();
        for _ in 0..len {
            let g = match rng.gen_range(0..4) {
                0 => SL2Mat::s(),
                1 => SL2Mat::t(),
                2 => SL2Mat::new(1, -1, 0, 1).map_err(e)?,
                _ => SL2Mat::new(0, 1, -1, 0).map_err(e)?,
            };
            m = m.mul(&g).map_err(e)?;
        }
        Ok(m)
    };
    for _ in 0..1000 {
        let (a, b) = (word(&mut rng)?, word(&mut rng)?);
        let ab = a.mul(&b).map_err(e)?;
        let (ca, cb, cab) = (chi(&a).map_err(e)?, chi(&b).map_err(e)?, chi(&ab).map_err(e)?);
        ensure(cab == (ca + cb) % 12, format!("chi({a:?} {b:?})"))?;
    }
    ensure(chi(&SL2Mat::identity()).map_err(e)? == 0, "chi(1) != 0")?;
    ensure(psi_chi(&SL2Mat::t()).map_err(e)? == 1, "psi chi is trivial on T")?;
    Ok("1000 random products".into())
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    out.insert("report.json".into(), std::fs::read(dir.join("report.json")).unwrap_or_default());
    if let Ok(entries) = std::fs::read_dir(dir.join("certificates")) {
        for entry in entries.flatten() {
            let name = format!("certificates/{}", entry.file_name().to_string_lossy());
            out.insert(name, std::fs::read(entry.path()).unwrap_or_default());
        }
    }
    out
}

fn resume_is_deterministic() -> Outcome {
    let mut cfg = SearchConfig::new(3, 2, 7);
    cfg.shard_size = 2;
    cfg.batch_shards = 2;
    let root = tempfile::tempdir().map_err(e)?;

    let reference = root.path().join("reference");
    let opts = RunOptions { threads: Some(1), checkpoint: Some(reference.clone()), ..Default::default() };
    ensure(matches!(run_search(&cfg, &opts).map_err(e)?, RunStatus::Complete(_)), "reference run interrupted")?;
    let expected = dir_bytes(&reference);
    ensure(expected.len() == 7, format!("expected report plus 6 certificates, got {}", expected.len()))?;

    // Count the steps of a full run by interrupting far past the end.
    // Afterwards `total / 2` steps are known to leave work undone.
    let mut total = 2;
    loop {
        let dir = root.path().join(format!("count{total}"));
        let o = RunOptions { threads: Some(1), checkpoint: Some(dir), stop_after_steps: Some(total), ..Default::default() };
        match run_search(&cfg, &o).map_err(e)? {
            RunStatus::Interrupted { .. } => total *= 2,
            RunStatus::Complete(_) => break,
        }
    }

    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    let mut points = Vec::new();
    for trial in 0..5 {
        let stop = rng.gen_range(1..=total / 2);
        let (t1, t2) = ([1, 2, 3, 4][trial % 4], [4, 1, 2, 3][trial % 4]);
        let dir = root.path().join(format!("trial{trial}"));
        let o = RunOptions { threads: Some(t1), checkpoint: Some(dir.clone()), stop_after_steps: Some(stop), ..Default::default() };
        run_search(&cfg, &o).map_err(e)?;
        // A second interruption on resume, then a final resume.
        let o = RunOptions { threads: Some(t2), stop_after_steps: Some(1), ..Default::default() };
        resume(&dir, &o).map_err(e)?;
        let o = RunOptions { threads: Some(t1), ..Default::default() };
        ensure(matches!(resume(&dir, &o).map_err(e)?, RunStatus::Complete(_)), "resume did not finish")?;
        ensure(dir_bytes(&dir) == expected, format!("trial {trial} (stop {stop}, threads {t1}/{t2}) differs"))?;
        points.push(stop.to_string());
    }
    Ok(format!("interrupted after steps {} (full run takes over {})", points.join(", "), total / 2))
}

fn monotone_in_rank() -> Outcome {
    let r3 = sweep(3, 2, 7)?.0;
    let r4 = sweep(4, 2, 8)?.0;
    let r5 = sweep(5, 2, 11)?.0;
    check_monotonicity(&[r3.clone(), r4.clone(), r5.clone()]).map_err(e)?;
    let (x3, x4, l5) = (r3.upper_bound, r4.upper_bound, r5.lower_bound);
    ensure(x3 == Some(7) && x4 == Some(8) && l5 == Some(12), format!("{x3:?} {x4:?} {l5:?}"))?;
    Ok("x_3 = 7 <= x_4 = 8 <= 12 <= x_5".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("relations hold on the automorphisms, n = 3..6", relations_hold_on_automorphisms),
        ("centralizer of rho_12 in D_5' is the stabilizer S", stabilizer_is_centralizer),
        ("rank 3, degrees 2..7", rank_three),
        ("rank 4, degrees 2..8", rank_four),
        ("control actions pass the full audit", controls_audit),
        ("rank 5, degrees 2..11 exhausted", rank_five_lower_bound),
        ("hom class enumeration matches brute force", hom_oracles),
        ("order-12 character of SL_2(Z)", character_of_sl2),
        ("interrupted runs resume to identical bytes", resume_is_deterministic),
        ("minimal degrees are monotone in the rank", monotone_in_rank),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
