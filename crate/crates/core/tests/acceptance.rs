//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{full_corpus, subsidy_cases, Case};
use fixpoint_core::corpus;
use fixpoint_core::oracles::{self, lcfp_roundrobin};
use fixpoint_core::problems::{
    bellman_ford_family, count_greater_family, edge_relaxation_family, floyd_warshall_family, johnson_family,
    stable_marriage_family, subsidy_family, transitive_closure_family, Digraph, PreferenceProfile, SubsidyInstance,
};
use fixpoint_core::trace::{check_dominated, check_round_progress};
use fixpoint_core::tracefile::{write_trace, TraceHeader};
use fixpoint_core::{
    audit_family, run_counterexample, run_distributed, run_interleaved, run_parallel, run_repaired_twin, Answer, Error,
    ExecutionTrace, FairSchedule, FunctionFamily, ParallelConfig, StalenessParams, Verdict, SCENARIOS,
};

/// Outcome of one criterion: the first few failure descriptions, if any.
struct Check {
    failures: Vec<String>,
    checked: usize,
    note: String,
}

impl Check {
    fn new() -> Self {
        Check {
            failures: Vec::new(),
            checked: 0,
            note: String::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Every run made on one corpus case.
struct CaseRuns {
    lcfp: fixpoint_core::StateVector,
    interleaved: ExecutionTrace,
    parallel: ExecutionTrace,
    /// `(label, T, trace, max observed lag)`.
    distributed: Vec<(&'static str, usize, ExecutionTrace, usize)>,
}

const UNIFORM_T: [usize; 5] = [0, 1, 2, 3, 5];
const MAX_DELAY_T: [usize; 4] = [0, 1, 2, 5];

fn run_case(case: &Case) -> Result<CaseRuns, Error> {
    let fam = &case.family;
    let lcfp = lcfp_roundrobin(fam)?;
    let interleaved = run_interleaved(fam, &FairSchedule::seeded(case.seed))?;
    let parallel = run_parallel(fam, &ParallelConfig::seeded(case.seed))?;
    let mut distributed = Vec::new();
    for t in UNIFORM_T {
        let (trace, q) = run_distributed(fam, &StalenessParams::uniform(t, case.seed), None)?;
        distributed.push(("uniform", t, trace, q.max_lag));
    }
    for t in MAX_DELAY_T {
        let (trace, q) = run_distributed(fam, &StalenessParams::max_delay(t), None)?;
        distributed.push(("max-delay", t, trace, q.max_lag));
    }
    Ok(CaseRuns {
        lcfp,
        interleaved,
        parallel,
        distributed,
    })
}

fn decoded(fam: &FunctionFamily, trace: &ExecutionTrace) -> String {
    if !trace.converged() {
        return format!("status {}", trace.status.as_str());
    }
    match fam.decode(trace.terminal()) {
        Ok(a) => a.to_string(),
        Err(e) => format!("error {e}"),
    }
}

fn criteria_on_corpus(c1: &mut Check, c3: &mut Check, c4: &mut Check, c6: &mut Check) {
    for case in full_corpus() {
        let fam = &case.family;
        let runs = match run_case(&case) {
            Ok(r) => r,
            Err(e) => {
                c1.expect(false, || format!("{}: {e}", case.label));
                continue;
            }
        };
        let matches = |trace: &ExecutionTrace| {
            trace.converged() && fam.decode(trace.terminal()).ok() == Some(case.expected.clone())
        };

        c1.expect(matches(&runs.interleaved), || {
            format!(
                "{} interleaved: got {} want {}",
                case.label,
                decoded(fam, &runs.interleaved),
                case.expected
            )
        });
        c1.expect(matches(&runs.parallel), || {
            format!(
                "{} parallel: got {} want {}",
                case.label,
                decoded(fam, &runs.parallel),
                case.expected
            )
        });
        for (policy, t, trace, _) in &runs.distributed {
            if *policy == "uniform" && (*t == 1 || *t == 3) {
                c1.expect(matches(trace), || {
                    format!(
                        "{} distributed T={t}: got {} want {}",
                        case.label,
                        decoded(fam, trace),
                        case.expected
                    )
                });
            }
        }

        let progress = check_round_progress(&fam.bounds, &runs.parallel);
        c3.expect(progress.all_hold(), || format!("{}: {progress:?}", case.label));

        let mut traces = vec![("interleaved", &runs.interleaved), ("parallel", &runs.parallel)];
        traces.extend(runs.distributed.iter().map(|(_, _, t, _)| ("distributed", t)));
        for (engine, trace) in traces {
            let failure = check_dominated(&fam.bounds, trace, &runs.lcfp);
            c4.expect(failure.is_none(), || format!("{} {engine}: {failure:?}", case.label));
        }

        let reference = runs.distributed[0].2.terminal();
        for (policy, t, trace, lag) in &runs.distributed {
            c6.expect(lag <= t, || format!("{} {policy} T={t}: lag {lag}", case.label));
            c6.expect(trace.converged() && trace.terminal() == reference, || {
                format!(
                    "{} {policy} T={t}: terminal {} differs from {reference}",
                    case.label,
                    trace.terminal()
                )
            });
        }
    }

    let naive = run_counterexample("NAIVE_PARALLEL").expect("scenario exists");
    let fam = fixpoint_core::counterexamples::two_bit_family();
    let progress = check_round_progress(&fam.bounds, &naive.trace);
    c3.expect(progress.unchanged_iff_unwritten.is_some(), || {
        "negative control: NAIVE lost-update trace satisfies the unchanged-iff-unwritten property".into()
    });
}

fn criterion_2() -> Check {
    let mut c = Check::new();
    let g = corpus::path_graph(64);
    let fam = transitive_closure_family(&g).unwrap();
    let trace = run_parallel(&fam, &ParallelConfig::synchronous()).unwrap();
    let expected = Answer::Closure(oracles::warshall_closure(&g));
    c.expect(
        trace.converged() && fam.decode(trace.terminal()).unwrap() == expected,
        || format!("closure not reached: {}", trace.status.as_str()),
    );
    // Rounds that changed the state; a final round confirms quiescence.
    let changing = trace.states.windows(2).filter(|w| w[0] != w[1]).count();
    c.expect(changing <= 7, || format!("{changing} changing rounds, bound 7"));
    c.note = format!("; {changing} changing rounds, {} in total", trace.len());
    c
}

fn criterion_5() -> Check {
    let mut c = Check::new();
    for name in SCENARIOS {
        match run_counterexample(name) {
            Ok(o) => c.expect(o.verdict == Verdict::MatchesPaper, || {
                format!("{name}: observed {}", o.observed)
            }),
            Err(e) => c.expect(false, || format!("{name}: {e}")),
        }
        match run_repaired_twin(name) {
            Ok(t) => c.expect(t.converged_to_oracle, || {
                format!("{name} twin ended at {} not {}", t.trace.terminal(), t.oracle)
            }),
            Err(e) => c.expect(false, || format!("{name} twin: {e}")),
        }
    }
    c
}

fn solve_johnson(g: &Digraph, seed: u64) -> Vec<Result<Answer, Error>> {
    let fam = johnson_family(g).unwrap();
    let mut traces = vec![
        run_interleaved(&fam, &FairSchedule::seeded(seed)).unwrap(),
        run_parallel(&fam, &ParallelConfig::seeded(seed)).unwrap(),
    ];
    traces.push(
        run_distributed(&fam, &StalenessParams::uniform(2, seed), None)
            .unwrap()
            .0,
    );
    traces
        .iter()
        .map(|t| {
            if t.converged() {
                fam.decode(t.terminal())
            } else {
                Err(Error::StepLimit { steps: t.len() })
            }
        })
        .collect()
}

fn criterion_7() -> Check {
    let mut c = Check::new();
    for seed in 0..50 {
        let g = corpus::random_negative_graph(seed, 8, 9);
        c.expect(!oracles::has_negative_cycle(&g), || {
            format!("graph {seed} has a negative cycle")
        });
        for result in solve_johnson(&g, seed) {
            match result {
                Ok(Answer::Reweighting { edges, .. }) => c.expect(edges.iter().all(|e| e.2 >= 0), || {
                    format!("graph {seed}: negative reweighted edge in {edges:?}")
                }),
                other => c.expect(false, || format!("graph {seed}: {other:?}")),
            }
        }
    }
    for seed in 0..10 {
        let g = corpus::planted_negative_cycle(seed, 8, 9);
        for result in solve_johnson(&g, seed) {
            c.expect(matches!(result, Err(Error::NegativeCycle)), || {
                format!("planted graph {seed}: {result:?}")
            });
        }
    }
    c
}

fn criterion_8() -> Check {
    let mut c = Check::new();
    for case in subsidy_cases(50) {
        let trace = run_parallel(&case.family, &ParallelConfig::seeded(case.seed)).unwrap();
        let got = case.family.decode(trace.terminal()).ok();
        c.expect(trace.converged() && got.as_ref() == Some(&case.expected), || {
            format!("{}: got {got:?} want {}", case.label, case.expected)
        });
    }
    c
}

fn shipped_families() -> Vec<FunctionFamily> {
    let small = Digraph::new(3, vec![(0, 1, 1), (1, 2, 2), (2, 0, 1), (0, 2, 3)]).unwrap();
    let pair = Digraph::new(2, vec![(0, 1, 2), (1, 0, 1)]).unwrap();
    let negative = Digraph::new(3, vec![(0, 1, -2), (1, 2, 1), (2, 0, 3)]).unwrap();
    let profile = PreferenceProfile::new(
        vec![vec![0, 1, 2], vec![1, 0, 2], vec![0, 2, 1]],
        vec![vec![1, 0, 2], vec![0, 1, 2], vec![2, 1, 0]],
    )
    .unwrap();
    let subsidy = SubsidyInstance::new(vec![vec![1, 3, 0], vec![0, 2, 1], vec![0, 1, 2]]).unwrap();
    let mut out = vec![
        transitive_closure_family(&small).unwrap(),
        stable_marriage_family(&profile, None).unwrap(),
        stable_marriage_family(&profile, Some((0, 2))).unwrap(),
        edge_relaxation_family(&small).unwrap(),
        bellman_ford_family(&pair).unwrap(),
        floyd_warshall_family(&pair).unwrap(),
        johnson_family(&negative).unwrap(),
        count_greater_family(&[4, 9, 1, 7, 3, 8], 4).unwrap(),
        subsidy_family(&subsidy).unwrap(),
    ];
    // Larger corpus instances, audited by sampling.
    for seed in 0..5 {
        let g = corpus::random_weighted_graph(seed, 8, 9);
        out.push(transitive_closure_family(&g).unwrap());
        out.push(edge_relaxation_family(&g).unwrap());
        out.push(bellman_ford_family(&g).unwrap());
        out.push(floyd_warshall_family(&g).unwrap());
        out.push(johnson_family(&corpus::random_negative_graph(seed, 8, 9)).unwrap());
        out.push(stable_marriage_family(&corpus::random_profile(seed, 6), None).unwrap());
        out.push(subsidy_family(&corpus::random_subsidy(seed, 3, 5)).unwrap());
    }
    out
}

fn criterion_9() -> Check {
    let mut c = Check::new();
    let mut exhaustive = 0;
    for fam in shipped_families() {
        let report = audit_family(&fam, 2000, 7);
        exhaustive += usize::from(report.exhaustive);
        c.expect(report.is_clean(), || {
            format!("{}: {:?}", fam.name, report.violations.first())
        });
    }
    c.expect(exhaustive >= 8, || {
        format!("only {exhaustive} families audited exhaustively")
    });
    c
}

fn criterion_10() -> Check {
    let mut c = Check::new();
    let header = TraceHeader {
        family: "determinism".into(),
        fingerprint: "-".into(),
        params: "-".into(),
    };
    let cases = common::closure_cases(10)
        .into_iter()
        .chain(common::marriage_cases(5))
        .chain(common::path_cases(5))
        .chain(subsidy_cases(5));
    for case in cases {
        let render = || -> Vec<String> {
            let fam = &case.family;
            let mut traces = vec![
                run_interleaved(fam, &FairSchedule::seeded(case.seed)).unwrap(),
                run_parallel(fam, &ParallelConfig::seeded(case.seed)).unwrap(),
            ];
            traces.push(
                run_distributed(fam, &StalenessParams::uniform(3, case.seed), None)
                    .unwrap()
                    .0,
            );
            traces.iter().map(|t| write_trace(&header, t)).collect()
        };
        c.expect(render() == render(), || {
            format!("{}: traces differ between runs", case.label)
        });
    }
    c
}

fn report(index: usize, title: &str, check: &Check, seconds: f64) -> bool {
    let ok = check.failures.is_empty();
    println!(
        "criterion {index:>2} {:<4} {title} ({} checks, {} failed{}, {seconds:.1}s)",
        if ok { "PASS" } else { "FAIL" },
        check.checked,
        check.failures.len(),
        check.note,
    );
    for f in check.failures.iter().take(5) {
        println!("    {f}");
    }
    ok
}

fn main() -> ExitCode {
    let started = Instant::now();
    let (mut c1, mut c3, mut c4, mut c6) = (Check::new(), Check::new(), Check::new(), Check::new());
    criteria_on_corpus(&mut c1, &mut c3, &mut c4, &mut c6);
    let corpus = started.elapsed().as_secs_f64();
    let timed = |f: fn() -> Check| {
        let t = Instant::now();
        let c = f();
        (c, t.elapsed().as_secs_f64())
    };

    let mut ok = true;
    ok &= report(1, "cross-engine answers equal the problem oracles", &c1, corpus);
    let (c, secs) = timed(criterion_2);
    ok &= report(2, "path closure in logarithmically many parallel rounds", &c, secs);
    ok &= report(
        3,
        "round progress holds on update-on-change traces; naive control fails",
        &c3,
        corpus,
    );
    ok &= report(
        4,
        "every committed state lies below the least common fixed point",
        &c4,
        corpus,
    );
    let (c, secs) = timed(criterion_5);
    ok &= report(5, "counterexample registry and repaired twins", &c, secs);
    ok &= report(6, "view lag within T and terminal states independent of T", &c6, corpus);
    let (c, secs) = timed(criterion_7);
    ok &= report(7, "Johnson reweighting and negative-cycle detection", &c, secs);
    let (c, secs) = timed(criterion_8);
    ok &= report(8, "subsidy payments equal the brute-force minimum", &c, secs);
    let (c, secs) = timed(criterion_9);
    ok &= report(9, "audits of shipped families are clean", &c, secs);
    let (c, secs) = timed(criterion_10);
    ok &= report(10, "seeded runs produce byte-identical traces", &c, secs);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
