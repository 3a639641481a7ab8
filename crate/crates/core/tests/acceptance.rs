//! Acceptance criteria 1-16. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use eigenpath::harness::{run, ExperimentConfig, PathSpec, RunReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(cfg: ExperimentConfig) -> RunReport {
    run(&cfg).unwrap_or_else(|e| panic!("{}: {e}", cfg.experiment))
}

fn agg(r: &RunReport, k: &str) -> f64 {
    r.aggregates.get(k).copied().unwrap_or(f64::NAN)
}

fn verdict(r: &RunReport, name: &str) -> bool {
    r.verdicts.iter().find(|v| v.name == name).unwrap_or_else(|| panic!("no verdict {name}")).pass
}

fn failing(r: &RunReport) -> String {
    r.failed_verdicts().map(|v| v.name.clone()).collect::<Vec<_>>().join(",")
}

fn summarize(reports: &[(String, RunReport)], show: impl Fn(&RunReport) -> String) -> Outcome {
    let pass = reports.iter().all(|(_, r)| r.pass);
    let detail = reports
        .iter()
        .map(|(label, r)| {
            let bad = if r.pass { String::new() } else { format!(" failed[{}]", failing(r)) };
            format!("{label}: {}{bad}", show(r))
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn c1() -> Outcome {
    let rs: Vec<_> = [0.1, 1.0 / 3.0, 0.5, 0.75]
        .iter()
        .map(|&p| {
            let r = report(ExperimentConfig::new("rt-transition", 101).with_trials(100_000).with_param("p", p));
            (format!("p={p:.3}"), r)
        })
        .collect();
    summarize(&rs, |r| format!("rate {:.4} vs {:.4}", agg(r, "transition_rate"), r.bounds["transition_probability"]))
}

fn c2() -> Outcome {
    let rs: Vec<_> = [0.5, 0.75, 1.0 / 3.0]
        .iter()
        .map(|&p| {
            let cfg = ExperimentConfig::new("t", 102).with_trials(100_000).with_param("p", p).with_param("p0", p);
            (format!("p={p:.3}"), report(cfg))
        })
        .collect();
    summarize(&rs, |r| format!("mean n {:.4} vs {:.4}", agg(r, "n_mean"), r.bounds["mean_n"]))
}

fn c3() -> Outcome {
    let rs: Vec<_> = [1.0 / 3.0, 0.5, 1.0]
        .iter()
        .map(|&p| (format!("p={p:.3}"), report(ExperimentConfig::new("tm", 103).with_trials(100_000).with_param("p", p))))
        .collect();
    summarize(&rs, |r| format!("mean n {:.4}", agg(r, "n_mean")))
}

fn c4() -> Outcome {
    let rs: Vec<_> = [0.25, 0.5, 0.75]
        .iter()
        .map(|&p| (format!("p={p}"), report(ExperimentConfig::new("tx-prime", 104).with_trials(100_000).with_param("p", p))))
        .collect();
    let mut out = summarize(&rs, |r| format!("success {:.4}, mean n {:.3}", agg(r, "success_rate"), agg(r, "n_mean")));
    let required = ["success_at_least", "mean_n", "moment_given_success", "consecutive_n_correlation"];
    out.pass &= rs.iter().all(|(_, r)| required.iter().all(|v| verdict(r, v)));
    out
}

fn c5() -> Outcome {
    let cfg = ExperimentConfig::new("er", 105)
        .with_trials(10_000)
        .with_param("p", 0.75)
        .with_param("gamma", 0.1)
        .with_param("copies", 200.0);
    let r = report(cfg);
    summarize(&[("r=200".into(), r)], |r| {
        format!("failure {:.4} vs e^-4 = {:.4}", agg(r, "failure_rate_observed"), r.bounds["failure_rate"])
    })
}

fn c6() -> Outcome {
    let rs: Vec<_> = [("b=1 branch", 0.95), ("b=0 branch", 0.5), ("between", 0.75)]
        .iter()
        .map(|&(label, p)| {
            let cfg = ExperimentConfig::new("erx", 106)
                .with_trials(1_000)
                .with_param("p", p)
                .with_param("p_m", 0.85)
                .with_param("gamma", 0.1)
                .with_param("copies", 400.0);
            (label.to_string(), report(cfg))
        })
        .collect();
    summarize(&rs, |r| format!("contract failures {:.4}", agg(r, "contract_failure_rate_observed")))
}

fn c7() -> Outcome {
    let rs: Vec<_> = [("flag # at p=0.7", 0.7), ("success at p=0.95", 0.95)]
        .iter()
        .map(|&(label, p)| {
            let cfg = ExperimentConfig::new("tpx", 107)
                .with_trials(500)
                .with_param("p", p)
                .with_param("gamma", 0.1)
                .with_param("copies", 2000.0);
            (label.to_string(), report(cfg))
        })
        .collect();
    // at r = 2000, gamma = 0.1 the failure bound exceeds 1 and is clamped
    summarize(&rs, |r| {
        format!(
            "failures {:.4} (bound {:.2}), mean n {:.0} <= 5r",
            agg(r, "failure_rate_observed"),
            r.bounds["failure_rate"],
            agg(r, "n_mean")
        )
    })
}

fn c8() -> Outcome {
    let cfg = ExperimentConfig::new("known-overlaps", 108).with_trials(10_000).with_path(PathSpec::Grover { items: 16 });
    let r = report(cfg);
    summarize(&[("grover N=16".into(), r)], |r| {
        format!("n={} segments, mean m {:.3} < {}", agg(r, "segments"), agg(r, "m_mean"), r.bounds["mean_m"])
    })
}

fn c9() -> Outcome {
    let cfg = ExperimentConfig::new("parallel", 109)
        .with_trials(1_000)
        .with_param("segments", 4.0)
        .with_param("p", 0.9)
        .with_param("copies", 600.0)
        .with_param("gamma", 0.05);
    let r = report(cfg);
    summarize(&[("n=4 r=600".into(), r)], |r| {
        format!("failure {:.4} vs {:.4}", agg(r, "failure_rate_observed"), r.bounds["failure_rate"])
    })
}

fn c10() -> Outcome {
    let cfg = ExperimentConfig::new("overlap-free", 110).with_trials(1_000).with_param("length", 3.0);
    let r = report(cfg);
    summarize(&[("L=3".into(), r)], |r| format!("mean n {:.3} <= nbar {:.1}", agg(r, "n_mean"), r.bounds["n_bar"]))
}

fn c11() -> Outcome {
    let r = report(ExperimentConfig::new("reduction", 111).with_trials(1_000).with_param("steps", 20.0));
    summarize(&[("20-step trace".into(), r)], |r| format!("mean k {:.2}", agg(r, "k_mean")))
}

fn c12() -> Outcome {
    let rs: Vec<_> = [0.6, 0.8, 0.95]
        .iter()
        .map(|&p| {
            (format!("p_s={p}"), report(ExperimentConfig::new("galton-watson", 112).with_trials(1_000_000).with_param("p_s", p)))
        })
        .collect();
    // the mean p_s/(2p_s - 1) counts successful intervals; the total count has mean 1/(2p_s - 1)
    summarize(&rs, |r| format!("successful {:.4}, total {:.4}", agg(r, "leaves_mean"), agg(r, "size_mean")))
}

fn c13() -> Outcome {
    let r = report(ExperimentConfig::new("speed", 113).with_param("points", 20.0));
    summarize(&[("3 profiles".into(), r)], |r| {
        (0..3)
            .map(|k| {
                format!(
                    "{}<={:.1}<={:.1}",
                    agg(r, &format!("profile_{k}_enumerated")),
                    agg(r, &format!("profile_{k}_integral")),
                    agg(r, &format!("profile_{k}_rough"))
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    })
}

fn c14() -> Outcome {
    let r = report(ExperimentConfig::new("perturbation", 114).with_trials(100).with_param("grover_points", 50.0));
    summarize(&[("100 random + 50 t".into(), r)], |r| format!("max angle/bound {:.3}", agg(r, "max_angle_over_bound")))
}

fn c15() -> Outcome {
    let r = report(ExperimentConfig::new("cost-ratio", 115).with_trials(200));
    summarize(&[("n=4".into(), r)], |r| format!("per-copy ratio {:.3}", agg(r, "ratio")))
}

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let mut out = Vec::new();
    report(cfg.clone()).write_csv(&mut out).unwrap();
    out
}

fn c16() -> Outcome {
    let cfgs = [
        ExperimentConfig::new("tx-prime", 116).with_trials(5_000),
        ExperimentConfig::new("tp", 116).with_trials(50),
        ExperimentConfig::new("overlap-free", 116).with_trials(200),
        ExperimentConfig::new("dominant", 116).with_trials(5),
    ];
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut pass = true;
    let mut names = Vec::new();
    for cfg in &cfgs {
        let a = csv_bytes(cfg);
        let b = csv_bytes(cfg);
        let c = one.install(|| csv_bytes(cfg));
        pass &= a == b && a == c;
        names.push(format!("{} {}B", cfg.experiment, a.len()));
    }
    Outcome { pass, detail: format!("byte-identical across reruns and thread counts: {}", names.join(", ")) }
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("reflection chain transition 4pq", c1),
        ("T mean reflections", c2),
        ("T_m mean and moment", c3),
        ("T'_x success, moments, independence", c4),
        ("ER failure and phase error", c5),
        ("ER_x three-branch contract", c6),
        ("T_px flag and success branches", c7),
        ("known-overlap traversal on Grover", c8),
        ("parallel traversal failure and anchors", c9),
        ("overlap-free traversal cost", c10),
        ("checkpoint reduction bounds", c11),
        ("branching process", c12),
        ("speed profile functionals", c13),
        ("perturbation bounds", c14),
        ("cost accounting ratio", c15),
        ("determinism", c16),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
