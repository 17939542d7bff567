//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switchlab_core::causal::{
    attack_combined, attack_table1, attack_table2, branch_ancilla_factor, build_fixed_circuit, expected_ancilla_factor,
    fidelity_with, query_accounting, simulate_fixed_circuit, trace_ancillas,
};
use switchlab_core::gates::{gate_set_g, hadamard_m4, NamedGate};
use switchlab_core::oracle::{
    chart_fixture, check_promise, enumerate_promise_sets, equivalence_classes, Chart, ClassMethod, EquivalenceMode, PromiseSet,
};
use switchlab_core::process::{build_effective_process, success_probability, witness_operator, WitnessComponent};
use switchlab_core::scs::{quartet_census, scs, SupersequenceResult};
use switchlab_core::switch::{
    apply_n_switch, check_dimension_constraint, product_pi, run_hadamard_algorithm, sample_shots, NoiseModel, OracleSet,
    PermutationSet, PromiseKind,
};
use switchlab_core::tensor::{kron_vec, random_qubit_unitary, ComplexMatrix, PureState};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn promise_sets() -> Vec<PromiseSet> {
    enumerate_promise_sets(&gate_set_g(), &PermutationSet::sigma_star(), &hadamard_m4()).expect("enumeration runs").sets
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn scs_census() -> Outcome {
    let (c, took) = timed(|| quartet_census(4));
    let c = c.map_err(|e| e.to_string())?;
    let want = BTreeMap::from([(6, 37), (7, 946), (8, 779), (9, 9)]);
    ensure(c.total == 1771, || format!("{} quartets", c.total))?;
    ensure(c.histogram == want, || format!("histogram {:?}", c.histogram))?;
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("histogram {:?} over {} quartets in {:.2?}", c.histogram, c.total, took))
}

fn sigma_star_quartet() -> Outcome {
    let perms = PermutationSet::sigma_star();
    let r = scs(&perms).map_err(|e| e.to_string())?;
    ensure(r.length == 9, || format!("length {}", r.length))?;
    SupersequenceResult::from_sequence("ACBADACDB", &perms).map_err(|e| format!("ACBADACDB rejected: {e}"))?;
    let q = query_accounting(&perms).map_err(|e| e.to_string())?;
    ensure(q.fixed_order == 9 && q.switch == 4 && q.gap == 5, || format!("{q:?}"))?;
    Ok(format!("length 9 ({}), ACBADACDB embeds all four, gap {} - {} = {}", r.sequence, q.fixed_order, q.switch, q.gap))
}

fn oracle_enumeration() -> Outcome {
    let (e, took) = timed(|| enumerate_promise_sets(&gate_set_g(), &PermutationSet::sigma_star(), &hadamard_m4()));
    let e = e.map_err(|e| e.to_string())?;
    ensure(e.census.total == 460, || format!("total {}", e.census.total))?;
    ensure(e.census.per_column == [316, 60, 42, 42], || format!("split {:?}", e.census.per_column))?;
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("460 sets, split {:?}, in {:.2?}", e.census.per_column, took))
}

fn chart_fixtures() -> Outcome {
    let perms = PermutationSet::sigma_star();
    let m = hadamard_m4();
    let mut counts = Vec::new();
    for chart in [Chart::Table1, Chart::Table2, Chart::Thirty] {
        let sets = chart_fixture(chart);
        for o in &sets {
            let v = check_promise(o, &perms, &m).map_err(|e| e.to_string())?;
            ensure(v.satisfied && v.y == o.claimed_y, || format!("{chart:?} {:?}: {v:?}", o.names()))?;
        }
        counts.push(sets.len());
    }
    ensure(counts == [4, 4, 30], || format!("fixture sizes {counts:?}"))?;
    Ok("8 table columns and 30 listed sets satisfy the promise with their stated y".into())
}

fn noiseless_algorithm() -> Outcome {
    let perms = PermutationSet::sigma_star();
    let m = hadamard_m4();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let targets: Vec<PureState> = (0..100).map(|_| PureState::random(2, &mut rng)).collect();
    let mut worst: f64 = 0.0;
    let sets = promise_sets();
    for s in &sets {
        for t in &targets {
            let r = run_hadamard_algorithm(&s.oracle, &perms, &m, t, &NoiseModel::ideal()).map_err(|e| e.to_string())?;
            let p = r.success_probability.ok_or("no claimed column")?;
            worst = worst.max((p - 1.0).abs());
            ensure(r.decoded_y == s.y, || format!("{:?} decoded {} not {}", s.oracle.names(), r.decoded_y, s.y))?;
        }
    }
    ensure(worst <= 1e-9, || format!("largest deviation from 1: {worst:e}"))?;
    Ok(format!("{} sets x {} targets, max |p - 1| = {worst:.1e}", sets.len(), targets.len()))
}

fn circuit_equivalence() -> Outcome {
    let perms = PermutationSet::sigma_star();
    let seq = SupersequenceResult::from_sequence("ACBADACDB", &perms).map_err(|e| e.to_string())?;
    let circuit = build_fixed_circuit(&seq, &perms).map_err(|e| e.to_string())?;
    let control = PureState::uniform(4);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let target = PureState::random(2, &mut rng);
    let mut worst = 1.0f64;
    let sets = promise_sets();
    for s in &sets {
        let joint = simulate_fixed_circuit(&circuit, &s.oracle, &control, &target).map_err(|e| e.to_string())?;
        let rho = trace_ancillas(&joint, &circuit, 2).map_err(|e| e.to_string())?;
        let switched = apply_n_switch(&control, &target, &s.oracle, &perms).map_err(|e| e.to_string())?;
        worst = worst.min(fidelity_with(&rho, &switched));
    }
    ensure(worst >= 1.0 - 1e-10, || format!("min fidelity {worst}"))?;

    // U_A^2|0> ⊗ U_B|0> ⊗ U_C|0> ⊗ U_D|0>, on random gates as well as the promise sets
    let check_factor = |o: &OracleSet| -> Result<(), String> {
        let zero = PureState::basis(2, 0);
        let ua = &o.gate(0).matrix;
        let parts = [
            ua.apply(&ua.apply(zero.amplitudes())),
            o.gate(1).matrix.apply(zero.amplitudes()),
            o.gate(2).matrix.apply(zero.amplitudes()),
            o.gate(3).matrix.apply(zero.amplitudes()),
        ];
        let want = PureState::new(parts.iter().fold(vec![C64::new(1.0, 0.0)], |acc, p| kron_vec(&acc, p)))
            .map_err(|e| e.to_string())?;
        ensure(expected_ancilla_factor(&circuit, o).fidelity(&want) >= 1.0 - 1e-12, || "expected factor differs".into())?;
        for x in 0..4 {
            let f = branch_ancilla_factor(&circuit, o, x).fidelity(&want);
            ensure(f >= 1.0 - 1e-12, || format!("branch {x} ancillas at fidelity {f}"))?;
        }
        Ok(())
    };
    for s in &sets {
        check_factor(&s.oracle)?;
    }
    for _ in 0..20 {
        let gates = (0..4).map(|i| NamedGate::new(format!("R{i}"), random_qubit_unitary(&mut rng))).collect::<Result<_, _>>();
        check_factor(&OracleSet::new(gates.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?)?;
    }
    Ok(format!("{} sets, min fidelity {worst:.12}; ancillas end in U_A^2|0>U_B|0>U_C|0>U_D|0> on every branch", sets.len()))
}

fn process_matrix_unity() -> Outcome {
    let psi = PureState::basis(2, 0);
    let w = build_effective_process(&psi, &hadamard_m4()).map_err(|e| e.to_string())?;
    ensure((w.trace() - 16.0).abs() < 1e-9, || format!("Tr W = {}", w.trace()))?;
    let single = |o: &OracleSet, y: usize| -> Result<f64, String> {
        let g = witness_operator(vec![WitnessComponent { oracle: o.clone(), y, weight: 1.0 }], 4).map_err(|e| e.to_string())?;
        success_probability(&w, &g).map_err(|e| e.to_string())
    };
    let mut worst: f64 = 0.0;
    let sets = promise_sets();
    for s in &sets {
        worst = worst.max((single(&s.oracle, s.y)? - 1.0).abs());
    }
    ensure(worst <= 1e-8, || format!("max |Tr[G_k W] - 1| = {worst:e}"))?;

    let perms = PermutationSet::sigma_star();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cross: f64 = 0.0;
    let mut oracles: Vec<OracleSet> = sets.iter().step_by(23).map(|s| s.oracle.clone()).collect();
    for _ in 0..10 {
        let gates = (0..4).map(|i| NamedGate::new(format!("R{i}"), random_qubit_unitary(&mut rng))).collect::<Result<_, _>>();
        oracles.push(OracleSet::new(gates.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?);
    }
    for o in &oracles {
        let run = run_hadamard_algorithm(o, &perms, &hadamard_m4(), &psi, &NoiseModel::ideal()).map_err(|e| e.to_string())?;
        for y in 0..4 {
            cross = cross.max((single(o, y)? - run.outcome_distribution[y]).abs());
        }
    }
    ensure(cross <= 1e-8, || format!("process vs switch differ by {cross:e}"))?;
    Ok(format!("Tr W = 16, {} witnesses at unity (max dev {worst:.1e}), switch agreement {cross:.1e}", sets.len()))
}

fn attacks() -> Outcome {
    let mut max = [0usize; 3];
    for o in chart_fixture(Chart::Table1) {
        let y = o.claimed_y.unwrap();
        let t = attack_table1(&o).map_err(|e| e.to_string())?;
        ensure(t.guessed_y == y && t.query_count == 2, || format!("table 1 column {y}: {t:?}"))?;
        max[0] = max[0].max(t.query_count);
    }
    for o in chart_fixture(Chart::Table2) {
        let y = o.claimed_y.unwrap();
        let t = attack_table2(&o).map_err(|e| e.to_string())?;
        ensure(t.guessed_y == y && t.query_count <= 4, || format!("table 2 column {y}: {t:?}"))?;
        max[1] = max[1].max(t.query_count);
    }
    for chart in [Chart::Table1, Chart::Table2] {
        for o in chart_fixture(chart) {
            let y = o.claimed_y.unwrap();
            let t = attack_combined(&o).map_err(|e| e.to_string())?;
            ensure(t.guessed_y == y && t.query_count <= 5, || format!("combined {chart:?} column {y}: {t:?}"))?;
            max[2] = max[2].max(t.query_count);
        }
    }
    Ok(format!("all hidden columns recovered; max queries table1 {}, table2 {}, combined {}", max[0], max[1], max[2]))
}

/// `V U_rep V^dagger` against each member, gate by gate.
fn verify_merges(sets: &[OracleSet], mode: EquivalenceMode) -> Result<(usize, usize), String> {
    let c = equivalence_classes(sets, mode).map_err(|e| e.to_string())?;
    ensure(c.method == ClassMethod::Explicit && c.fallback_merges == 0, || format!("{} unverified merges", c.fallback_merges))?;
    let mut covered = vec![false; sets.len()];
    let mut merges = 0;
    for class in &c.classes {
        let rep = &sets[class.members[0]];
        for (&m, v) in class.members.iter().zip(&class.conjugators) {
            ensure(v.is_unitary(1e-9), || "conjugator is not unitary".into())?;
            covered[m] = true;
            for (a, b) in rep.gates().iter().zip(sets[m].gates()) {
                let w: ComplexMatrix = &(v * &a.matrix) * &v.adjoint();
                let ok = match mode {
                    EquivalenceMode::Exact => w.approx_eq(&b.matrix, 1e-8),
                    EquivalenceMode::UpToGatePhases => {
                        let phase = (&b.matrix.adjoint() * &w).trace() / 2.0;
                        (phase.norm() - 1.0).abs() < 1e-8 && b.matrix.scale(phase).approx_eq(&w, 1e-8)
                    }
                };
                ensure(ok, || format!("member {m} not reached from {:?}", rep.names()))?;
            }
            merges += 1;
        }
    }
    ensure(covered.iter().all(|&c| c), || "some set is in no class".into())?;
    Ok((c.len(), merges - c.classes.len()))
}

fn equivalence() -> Outcome {
    let sets: Vec<OracleSet> = promise_sets().into_iter().map(|s| s.oracle).collect();
    let (phases, merged) = verify_merges(&sets, EquivalenceMode::UpToGatePhases)?;
    let (exact, _) = verify_merges(&sets, EquivalenceMode::Exact)?;
    let diagnostic = format!("up to per-gate phases {phases} classes, exact conjugation {exact} classes; {merged} merges checked with explicit V");
    ensure(phases == 98, || format!("target 98 not met: {diagnostic}"))?;
    Ok(diagnostic)
}

fn property_suites() -> Outcome {
    let m = hadamard_m4();
    let h = m.unitary();
    // H_P|0> is the uniform superposition
    ensure((0..4).all(|x| (h[(x, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15), || "H|0> not uniform".into())?;
    ensure((&h * &h).approx_eq(&ComplexMatrix::identity(4), 1e-15), || "H_4 is not self-inverse".into())?;
    ensure(m.gram() == (0..4).map(|i| (0..4).map(|j| if i == j { 4 } else { 0 }).collect()).collect::<Vec<Vec<i64>>>(), || {
        format!("Gram matrix {:?}", m.gram())
    })?;

    // post-switch state factorizes as (1/sqrt P) Σ_x m_{x,y}|x> ⊗ Π_0|Ψ>
    let perms = PermutationSet::sigma_star();
    let control = PureState::new((0..4).map(|x| h[(x, 0)]).collect()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let target = PureState::random(2, &mut rng);
    for s in promise_sets() {
        let out = apply_n_switch(&control, &target, &s.oracle, &perms).map_err(|e| e.to_string())?;
        let pi0 = product_pi(&s.oracle, &perms, 0).map_err(|e| e.to_string())?.apply(target.amplitudes());
        let col: Vec<C64> = (0..4).map(|x| C64::new(m.entry(x, s.y) as f64 / 2.0, 0.0)).collect();
        let want = kron_vec(&col, &pi0);
        let dev = out.amplitudes().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        ensure(dev <= 1e-9, || format!("{:?}: post-switch state off by {dev:e}", s.oracle.names()))?;
    }

    let dims = [
        (PromiseKind::Fourier, 2, 4, false),
        (PromiseKind::Fourier, 4, 4, true),
        (PromiseKind::Fourier, 8, 4, true),
        (PromiseKind::Hadamard, 2, 4, true),
        (PromiseKind::Hadamard, 3, 4, false),
    ];
    for (kind, d, p, ok) in dims {
        ensure(check_dimension_constraint(kind, d, p).is_ok() == ok, || format!("{kind:?} d={d} P={p}"))?;
    }

    let o = chart_fixture(Chart::Table1)[1].clone();
    let psi = PureState::basis(2, 0);
    let mut last = f64::INFINITY;
    for g in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let noise = NoiseModel::new(g, 0.0, 0).map_err(|e| e.to_string())?;
        let p = run_hadamard_algorithm(&o, &perms, &m, &psi, &noise).map_err(|e| e.to_string())?.success_probability.unwrap();
        ensure(p <= last + 1e-12, || format!("success rose to {p} at gamma {g}"))?;
        last = p;
    }
    ensure((last - 0.25).abs() < 1e-12, || format!("full dephasing leaves {last}"))?;

    let noisy = NoiseModel::new(0.3, 0.0, 7).map_err(|e| e.to_string())?;
    let r = run_hadamard_algorithm(&o, &perms, &m, &psi, &noisy).map_err(|e| e.to_string())?;
    let a = sample_shots(&r, 6000, 7).map_err(|e| e.to_string())?;
    let b = sample_shots(&r, 6000, 7).map_err(|e| e.to_string())?;
    ensure(a == b && a == [434, 4666, 481, 419], || format!("seeded histogram {a:?} / {b:?}"))?;
    Ok("uniform H|0>, factorized post-switch states, H_4 self-inverse, exact orthogonality, dimension rules, gamma monotonicity, seeded sampling".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 supersequence census", scs_census),
        ("2 experimental quartet", sigma_star_quartet),
        ("3 oracle enumeration", oracle_enumeration),
        ("4 chart fixtures", chart_fixtures),
        ("5 noiseless algorithm", noiseless_algorithm),
        ("6 circuit equivalence", circuit_equivalence),
        ("7 process-matrix unity", process_matrix_unity),
        ("8 side-information attacks", attacks),
        ("9 equivalence classes", equivalence),
        ("10 property suites", property_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("not reproduced here: hardware success rates and semidefinite-program causal bounds");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
