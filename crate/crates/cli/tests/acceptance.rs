//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N: PASS` line when its checks go through. Criteria that
//! specify command-line behaviour drive the real binary; the rest call the
//! library directly.

use std::collections::BTreeMap;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oflp::counter::{self, CmVar, CounterMachine, CounterOp, Run};
use oflp::instantiate::{instantiate_finite, oracle_supremum, orbit_sums, symmetrize_over};
use oflp::numerics::Polynomial;
use oflp::numerics::{frac, int, rat, Int, Rational};
use oflp::orbit::{parse_system, OrbitSystem, PartialInjection};
use oflp::paramlp::{almost_all_solve, evaluate_at, valid_threshold, MaxResult, ParamSystem};
use oflp::pipeline::solve_system;
use oflp::reduction::{build_p1, build_p2};
use oflp::simplex::Constraint;
use oflp::simplex::{self, LpOutcome};
use oflp_testsupport::{feasible_vertices, oracle_maximize, random_finite_lp, random_orbit_system};

const SUM_OF_OTHERS: &str = "rows: 1\ncols: 1\ncoef 1 1 0 1\ntarget 1 1\n";

const VERTEX_EDGE: &str = "rows: 1 0\ncols: 1 2\ncoef 1 1 1 -1\ncoef 1 2 1 1\ncoef 1 2 2 -2\ncoef 2 1 - 1\ntarget 2 1\nobjective 2 3\n";

const VERTEX_EDGE_CANCELLING: &str = "rows: 1 0\ncols: 1 2\ncoef 1 1 1 -1\ncoef 1 2 1 1\ncoef 1 2 2 -1\ncoef 2 1 - 1\ntarget 2 1\nobjective 2 3\n";

fn run_cli(args: &[&str], files: &[(&str, &str)]) -> Output {
    let dir = tempfile::tempdir().expect("temp dir");
    for (name, contents) in files {
        std::fs::write(dir.path().join(name), contents).expect("fixture write");
    }
    let mut full: Vec<String> = Vec::new();
    for a in args {
        // Bare fixture names refer to files created above.
        if files.iter().any(|(name, _)| name == a) {
            full.push(dir.path().join(a).to_string_lossy().into_owned());
        } else {
            full.push((*a).to_string());
        }
    }
    Command::new(env!("CARGO_BIN_EXE_oflp"))
        .args(&full)
        .output()
        .expect("binary runs")
}

fn stdout_lines(out: &Output) -> Vec<String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(str::to_string)
        .collect()
}

fn corpus(size: usize) -> Vec<OrbitSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    (0..size)
        .map(|_| random_orbit_system(&mut rng, true))
        .collect()
}

fn objective_of(sys: &OrbitSystem) -> Vec<Rational> {
    sys.cols
        .iter()
        .map(|c| Rational::from_integer(c.objective.clone()))
        .collect()
}

fn reduced_supremum(p2: &ParamSystem, objective: &[Rational], n: u64) -> MaxResult {
    match simplex::maximize(&evaluate_at(p2, n), objective) {
        LpOutcome::Infeasible => MaxResult::NegInfinity,
        LpOutcome::Unbounded => MaxResult::PosInfinity,
        LpOutcome::Optimal { value, .. } => MaxResult::Finite {
            value,
            attained: true,
        },
        other => unreachable!("maximize returned {other:?}"),
    }
}

#[test]
fn criterion_01_reduce_emits_the_two_scaled_rows() {
    let started = Instant::now();
    let out = run_cli(&["reduce", "sys.of"], &[("sys.of", SUM_OF_OTHERS)]);
    assert!(out.status.success());
    let lines = stdout_lines(&out);
    let rows: Vec<&String> = lines
        .iter()
        .take_while(|l| !l.starts_with("objective"))
        .collect();
    assert_eq!(rows.len(), 2, "got {lines:?}");
    assert!(rows.contains(&&"n·x1 >= n".to_string()));
    assert!(rows.contains(&&"(n - 1)·x1 >= n".to_string()));
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 1: PASS");
}

#[test]
fn criterion_02_vertex_edge_end_to_end() {
    let started = Instant::now();
    let sys = parse_system(VERTEX_EDGE).unwrap();
    let p1 = build_p1(&sys);
    assert_eq!(p1.ineqs.len(), 2);
    assert_eq!(p1.ineqs[0].to_string(), "-x1 - (n - 1)·x2 >= 0");
    assert_eq!(p1.ineqs[1].to_string(), "n·x1 >= 1");
    let p2 = build_p2(&sys);
    assert_eq!(p2.system.ineqs.len(), 2);
    assert_eq!(
        p2.system.ineqs[0].to_string(),
        "-(n - 1)·x1 - (n - 1)·x2 >= 0"
    );
    assert_eq!(p2.system.ineqs[1].to_string(), "(n^2 - n)·x1 >= n^2 - n");

    let out = run_cli(&["max", "sys.of"], &[("sys.of", VERTEX_EDGE)]);
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out), vec!["sup = -3 (attained)"]);
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 2: PASS");
}

#[test]
fn criterion_03_infimum_two_is_not_attained() {
    let started = Instant::now();
    let with_objective = "rows: 1\ncols: 1\ncoef 1 1 0 1\ntarget 1 1\nobjective 1 2\n";
    let out = run_cli(
        &["max", "sys.of", "--minimize"],
        &[("sys.of", with_objective)],
    );
    assert!(out.status.success());
    assert_eq!(stdout_lines(&out), vec!["inf = 2 (not attained)"]);
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 3: PASS");
}

#[test]
fn criterion_04_cancelling_variant_is_unsolvable() {
    let started = Instant::now();
    let out = run_cli(&["solve", "sys.of"], &[("sys.of", VERTEX_EDGE_CANCELLING)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_lines(&out), vec!["UNSOLVABLE"]);
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 4: PASS");
}

#[test]
fn criterion_05_three_iteration_trace() {
    let started = Instant::now();
    let poly = |coeffs: &[i64]| Polynomial::from_coeffs(coeffs.iter().map(|&v| int(v)).collect());
    let mut p = ParamSystem::new(3);
    p.push(
        vec![poly(&[0, 0, 1]), poly(&[0, 0, -1]), poly(&[0, 1])],
        poly(&[]),
    );
    p.push(vec![poly(&[0, -1]), poly(&[3, 1]), poly(&[])], poly(&[]));
    let report = almost_all_solve(&p);
    assert!(report.verdict.is_solvable());
    assert_eq!(report.iterations(), 3);
    assert_eq!(
        report.trace[0].chosen.as_deref(),
        Some("n^2·x1 - n^2·x2 + n·x3 >= 0")
    );
    assert_eq!(
        report.trace[1].chosen.as_deref(),
        Some("-n·x1 + (n + 3)·x2 >= 0")
    );
    assert_eq!(report.trace[2].chosen, None);
    assert_eq!(report.trace[2].verdict, Some(true));
    assert_eq!(
        report.final_gamma,
        vec![
            Constraint::new(vec![rat(1), rat(-1), rat(0)], rat(0)),
            Constraint::new(vec![rat(-1), rat(1), rat(0)], rat(0)),
        ]
    );
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 5: PASS");
}

#[test]
fn criterion_06_reduction_equals_direct_oracle() {
    let started = Instant::now();
    let systems = corpus(200);
    for (idx, sys) in systems.iter().enumerate() {
        let p2 = build_p2(sys);
        let objective = objective_of(sys);
        for n in p2.n_floor..=p2.n_floor + 3 {
            let direct = oracle_supremum(sys, n);
            let reduced = reduced_supremum(&p2.system, &objective, n);
            assert_eq!(direct, reduced, "case {idx}, n = {n}\n{}", sys.to_text());
        }
    }
    assert!(
        started.elapsed() < Duration::from_secs(120),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 6: PASS");
}

#[test]
fn criterion_07_reduced_vertices_stay_feasible() {
    let started = Instant::now();
    let systems = corpus(200);
    for (idx, sys) in systems.iter().enumerate() {
        let p2 = build_p2(sys);
        let d = p2.dim as u64;
        for n in d..=d + 3 {
            let next = evaluate_at(&p2.system, n + 1);
            for v in feasible_vertices(&evaluate_at(&p2.system, n)) {
                assert!(
                    next.satisfied_by(&v),
                    "case {idx}: vertex {v:?} of n = {n} fails at n + 1"
                );
            }
        }
    }
    assert!(
        started.elapsed() < Duration::from_secs(60),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 7: PASS");
}

#[test]
fn criterion_08_symmetrization() {
    // Full averaging on every feasible small instantiation of the corpus.
    let mut feasible_seen = 0;
    for sys in corpus(200) {
        for n in 1..=4 {
            let inst = instantiate_finite(&sys, n);
            let LpOutcome::Feasible { witness } = simplex::feasible(&inst.lp) else {
                continue;
            };
            feasible_seen += 1;
            let avg = symmetrize_over(&inst, &witness, inst.atom_count)
                .expect("instance is small enough to average");
            assert!(inst.lp.satisfied_by(&avg), "averaging broke feasibility");
            assert_eq!(orbit_sums(&inst, &witness), orbit_sums(&inst, &avg));
        }
    }
    assert!(feasible_seen >= 100, "corpus too skewed: {feasible_seen}");

    // Averaging over the two tracked atoms of a hand-built pair vector
    // mixes its -1 and -2 entries to -3/2 and keeps the rest.
    let sys = parse_system("rows: 0\ncols: 2\n").unwrap();
    let inst = instantiate_finite(&sys, 4);
    let value = |a: u64, b: u64| -> Rational {
        match (a, b) {
            (1, 2) | (2, 1) => rat(3),
            (1, _) | (_, 1) => rat(-1),
            (2, _) | (_, 2) => rat(-2),
            _ => rat(0),
        }
    };
    let x: Vec<Rational> = inst
        .column_labels
        .iter()
        .map(|cl| value(cl.tuple[0], cl.tuple[1]))
        .collect();
    let y = symmetrize_over(&inst, &x, 2).unwrap();
    let mut mixed_seen = 0;
    for (cl, v) in inst.column_labels.iter().zip(&y) {
        let tracked = |a: u64| a <= 2;
        if tracked(cl.tuple[0]) != tracked(cl.tuple[1]) {
            assert_eq!(v, &frac(-3, 2), "at column {cl}");
            mixed_seen += 1;
        }
    }
    assert_eq!(mixed_seen, 8);
    assert_eq!(orbit_sums(&inst, &x), orbit_sums(&inst, &y));
    println!("criterion 8: PASS");
}

#[test]
fn criterion_09_thresholds_are_sound() {
    let mut solvable = 0;
    for sys in corpus(200) {
        let analysis = solve_system(&sys).expect("corpus systems are valid");
        let Some(x) = analysis.witness().map(<[Rational]>::to_vec) else {
            continue;
        };
        solvable += 1;
        let n0 = valid_threshold(&analysis.reduced.system, &x).expect("witness must verify");
        for n in n0..=n0 + 10 {
            assert!(
                analysis.reduced.system.at(n).satisfied_by(&x),
                "witness fails at n = {n}\n{}",
                sys.to_text()
            );
        }
    }
    assert!(solvable >= 50, "corpus too skewed: {solvable}");
    println!("criterion 9: PASS");
}

#[test]
fn criterion_10_simplex_matches_vertex_enumeration() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x51AB);
    for case in 0..500 {
        let lp = random_finite_lp(&mut rng, 3, 6);
        let objective: Vec<Rational> = (0..lp.num_vars)
            .map(|_| rat(rng.random_range(-3..=3i64)))
            .collect();
        assert_eq!(
            matches!(simplex::feasible(&lp), LpOutcome::Infeasible),
            matches!(
                oflp_testsupport::oracle_feasibility(&lp),
                LpOutcome::Infeasible
            ),
            "case {case}: feasibility disagreement"
        );
        match (
            simplex::maximize(&lp, &objective),
            oracle_maximize(&lp, &objective),
        ) {
            (LpOutcome::Infeasible, LpOutcome::Infeasible) => {}
            (LpOutcome::Unbounded, LpOutcome::Unbounded) => {}
            (LpOutcome::Optimal { value: a, .. }, LpOutcome::Optimal { value: b, .. }) => {
                assert_eq!(a, b, "case {case}: optima differ")
            }
            (k, o) => panic!("case {case}: kernel {k:?} vs oracle {o:?}"),
        }
    }
    assert!(
        started.elapsed() < Duration::from_secs(60),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 10: PASS");
}

/// Twenty machines with runs of length up to six, several using zero
/// tests. `A`/`S` add or subtract, `Z` is a zero test, `.` is a no-op.
fn witness_cases() -> Vec<(CounterMachine, Vec<u64>, Vec<usize>)> {
    let a = CounterOp::Add(1);
    let s = CounterOp::Add(-1);
    let z = CounterOp::Zero;
    let o = CounterOp::Add(0);
    vec![
        (CounterMachine::new(1, vec![vec![a]]), vec![0], vec![0]),
        (
            CounterMachine::new(1, vec![vec![a]]),
            vec![0],
            vec![0, 0, 0],
        ),
        (
            CounterMachine::new(1, vec![vec![a], vec![s]]),
            vec![1],
            vec![0, 1],
        ),
        (CounterMachine::new(1, vec![vec![z]]), vec![0], vec![0]),
        (
            CounterMachine::new(1, vec![vec![a], vec![z]]),
            vec![0],
            vec![1, 0],
        ),
        (
            CounterMachine::new(1, vec![vec![CounterOp::Add(2)]]),
            vec![0],
            vec![0, 0],
        ),
        (
            CounterMachine::new(1, vec![vec![a], vec![s], vec![z]]),
            vec![0],
            vec![0, 1, 2],
        ),
        (
            CounterMachine::new(1, vec![vec![CounterOp::Add(3)], vec![CounterOp::Add(-2)]]),
            vec![2],
            vec![1, 0],
        ),
        (
            CounterMachine::new(2, vec![vec![s, a], vec![z, o], vec![a, o]]),
            vec![2, 0],
            vec![0, 0, 1, 2],
        ),
        (
            CounterMachine::new(2, vec![vec![a, o], vec![o, a]]),
            vec![0, 0],
            vec![0, 1, 0],
        ),
        (
            CounterMachine::new(2, vec![vec![a, a]]),
            vec![0, 0],
            vec![0, 0],
        ),
        (
            CounterMachine::new(2, vec![vec![s, o], vec![o, z]]),
            vec![1, 0],
            vec![1, 0],
        ),
        (
            CounterMachine::new(2, vec![vec![a, s]]),
            vec![0, 3],
            vec![0, 0, 0],
        ),
        (CounterMachine::new(1, vec![vec![o]]), vec![3], vec![0]),
        (
            CounterMachine::new(2, vec![vec![z, a], vec![a, z]]),
            vec![0, 0],
            vec![0],
        ),
        (
            CounterMachine::new(1, vec![vec![s]]),
            vec![4],
            vec![0, 0, 0, 0],
        ),
        (
            CounterMachine::new(2, vec![vec![a, o], vec![s, CounterOp::Add(2)], vec![z, s]]),
            vec![0, 1],
            vec![0, 1, 2, 2],
        ),
        (
            CounterMachine::new(1, vec![vec![a], vec![z], vec![s]]),
            vec![0],
            vec![1, 0, 2, 1],
        ),
        (CounterMachine::new(1, vec![vec![a]]), vec![2], vec![]),
        (
            CounterMachine::new(2, vec![vec![s, s], vec![a, a]]),
            vec![1, 1],
            vec![0, 1, 0],
        ),
    ]
}

#[test]
fn criterion_11_machine_witness_round_trip_and_mutations() {
    let started = Instant::now();
    let cases = witness_cases();
    assert_eq!(cases.len(), 20);
    for (machine, start, steps) in cases {
        assert!(machine.dim <= 2 && steps.len() <= 6);
        let run = Run::from_steps(&machine, start, &steps).expect("runs are valid");
        let tallest = run
            .configs
            .iter()
            .flat_map(|c| c.iter().copied())
            .max()
            .unwrap_or(0);
        let atoms = (steps.len() as u64 + 2 + tallest).max(3);
        let source = run.configs[0].clone();
        let target = run.configs.last().unwrap().clone();
        let inst = counter::encode(&machine, &source, &target, atoms).expect("enough atoms");
        let witness = counter::run_to_witness(&run, &inst).expect("witness builds");
        assert!(
            counter::check_witness(&inst, &witness).is_empty(),
            "round trip failed for machine\n{}",
            machine.to_text()
        );

        // Any single-variable flip must break some constraint. The
        // instruction unknowns at the two endpoint atoms are exempt: no
        // constraint restricts them, by construction.
        for var in inst.variables() {
            if matches!(var, CmVar::T { atom, .. } if atom <= 2) {
                continue;
            }
            for delta in [1i64, -1] {
                let mut mutated: BTreeMap<CmVar, Int> = witness.clone();
                let slot = mutated.entry(var.clone()).or_insert_with(Int::default);
                *slot += int(delta);
                let caught = inst.constraints.iter().any(|c| !c.holds(&mutated));
                assert!(
                    caught,
                    "flip {var} by {delta} went unnoticed for machine\n{}",
                    machine.to_text()
                );
            }
        }
    }
    assert!(
        started.elapsed() < Duration::from_secs(30),
        "took {:?}",
        started.elapsed()
    );
    println!("criterion 11: PASS");
}

/// Chain system with `k` dimension-0 row orbits over `k` dimension-2
/// column orbits (2k orbits total, atom dimension fixed at 2).
fn chain_system(k: usize) -> OrbitSystem {
    let mut sys = OrbitSystem::new(&vec![0; k], &vec![2; k]);
    for i in 0..k {
        sys.set_coeff(i, i, PartialInjection::empty(0, 2), int(1));
        sys.set_coeff(i, (i + 1) % k, PartialInjection::empty(0, 2), int(1));
        sys.rows[i].target = int(1);
    }
    sys
}

#[test]
fn criterion_12_orbit_count_scaling() {
    // Median-of-three timing per size, then a least-squares slope of
    // log(time) against log(number of orbits). Growth should stay roughly
    // cubic; the bound leaves room for timer noise.
    let sizes: Vec<usize> = (1..=10).collect();
    let mut points = Vec::new();
    for &k in &sizes {
        let sys = chain_system(k);
        let mut samples = Vec::new();
        for _ in 0..3 {
            let started = Instant::now();
            for _ in 0..20 {
                let analysis = solve_system(&sys).expect("chain systems are valid");
                assert!(analysis.is_solvable());
            }
            samples.push(started.elapsed().as_secs_f64() / 20.0);
        }
        samples.sort_by(f64::total_cmp);
        let best = samples[0].max(1e-9);
        points.push((((2 * k) as f64).ln(), best.ln()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        slope <= 3.5,
        "solve time grows too fast with the orbit count: slope {slope:.2}"
    );
    println!("criterion 12: PASS (slope {slope:.2})");
}

#[test]
fn exit_codes_are_a_stable_contract() {
    let ok = run_cli(&["solve", "sys.of"], &[("sys.of", SUM_OF_OTHERS)]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = run_cli(&["solve", "sys.of"], &[("sys.of", "rows: x\n")]);
    assert_eq!(bad.status.code(), Some(2));
    let missing = run_cli(&["solve", "no-such-file.of"], &[]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn json_schema_is_stable() {
    let out = run_cli(
        &["max", "sys.of", "--format", "json", "--trace"],
        &[("sys.of", VERTEX_EDGE)],
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid json");
    let obj = v.as_object().expect("top-level object");
    for key in [
        "verdict",
        "sup",
        "attained",
        "threshold",
        "witness",
        "trace",
    ] {
        assert!(obj.contains_key(key), "missing key {key}");
    }
    assert_eq!(obj["sup"], "-3");
    assert_eq!(obj["attained"], true);
}
