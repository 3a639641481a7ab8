use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    /// `None`: derived from other parameters.
    pub default: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub description: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSpec {
    pub name: &'static str,
    pub description: &'static str,
    /// Result being checked.
    pub anchor: &'static str,
    pub params: &'static [ParamSpec],
    pub default_trials: usize,
    /// Trial count for quick runs.
    pub smoke_trials: usize,
    /// Accepts a path override.
    pub takes_path: bool,
}

const fn param(name: &'static str, default: f64, min: f64, max: f64, description: &'static str) -> ParamSpec {
    ParamSpec { name, default: Some(default), min, max, description }
}

const P_UNIT: ParamSpec = param("p", 0.5, 0.0, 1.0, "overlap |<psi|phi>|^2");
const GAMMA: ParamSpec = param("gamma", 0.1, 1e-3, 0.5, "concentration margin");
const GAP: ParamSpec = param("gap", 1.0, 1e-3, 1.5, "eigenphase gap lower bound");
const INNER_MC: ParamSpec = param("inner_mc", 64.0, 0.0, 4096.0, "resamples modelling the ER_x post-measurement state");

static CATALOG: &[ExperimentSpec] = &[
    ExperimentSpec {
        name: "rt-transition",
        description: "single RT attempt from phi-perp; success probability 4pq",
        anchor: "reflection chain transition probability",
        params: &[P_UNIT],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "t",
        description: "mean reflections of T and agreement with the classical chain",
        anchor: "T lemma: <n> = p0 + (1-p0)(1 + 1/(2pq))",
        params: &[
            param("p", 0.5, 0.01, 0.99, "overlap of psi and phi"),
            ParamSpec { name: "p0", default: None, min: 0.0, max: 1.0, description: "overlap of the start state with phi (default p)" },
        ],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "tm",
        description: "overlap-suppressed T: mean and (7/4)-moment of n",
        anchor: "T_m lemma: <n> < 4, <G^n> <= G^6 for G <= 7/4",
        params: &[param("p", 0.5, 0.01, 1.0, "overlap of psi and phi")],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "tx",
        description: "overlap-tested T: flag 1 above p = 1/2, flag 0 below 1/3",
        anchor: "T_x lemma",
        params: &[param("p", 0.6, 0.0, 1.0, "overlap of psi and phi")],
        default_trials: 10_000,
        smoke_trials: 100,
        takes_path: false,
    },
    ExperimentSpec {
        name: "tx-prime",
        description: "bounded-attempt T'_x: success rate, conditional moments, independence of consecutive calls",
        anchor: "T'_x corollaries: success >= 19/20 on [1/4, 3/4], <G^n|A> <= G^11 for G <= 8/7",
        params: &[P_UNIT],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "tmx-prime",
        description: "T'_x on the suppressed overlap 3p/4",
        anchor: "T'_mx: success >= 19/20 when 3p/4 lies in [1/4, 3/4]",
        params: &[param("p", 1.0, 0.0, 1.0, "overlap of psi and phi")],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "er",
        description: "parallel eigenphase range estimation on r copies",
        anchor: "ER lemma: failure <= exp(-2 r gamma^2), phase within gap/5",
        params: &[
            param("p", 0.75, 0.0, 1.0, "overlap of psi and phi"),
            GAMMA,
            param("copies", 200.0, 1.0, 1e5, "copies r"),
            GAP,
        ],
        default_trials: 10_000,
        smoke_trials: 20,
        takes_path: false,
    },
    ExperimentSpec {
        name: "erx",
        description: "lattice-threshold ER_x: three-branch contract",
        anchor: "ER_x lemma: b=1 above p_m, b=0 below p_m - 2 gamma, j >= r/20 between; failure <= (5 exp(-r gamma^2))^2",
        params: &[
            param("p", 0.95, 0.0, 1.0, "overlap of psi and phi"),
            param("p_m", 0.85, 0.0, 1.0, "threshold overlap"),
            GAMMA,
            param("copies", 400.0, 1.0, 1e5, "copies r"),
            GAP,
            param("resolution", 0.2, 1e-3, 1.5, "dominance resolution delta"),
            param("spurious", 0.5, 0.0, 1.0, "share of the complement on the phase opposite the target"),
            INNER_MC,
        ],
        default_trials: 1_000,
        smoke_trials: 10,
        takes_path: false,
    },
    ExperimentSpec {
        name: "tp",
        description: "multi-copy T_p",
        anchor: "T_p lemma: failure <= exp(-2 r gamma^2), <n> < 2r, <G^n> <= G^(3r)",
        params: &[param("p", 0.9, 0.0, 1.0, "overlap of psi and phi"), GAMMA, param("copies", 100.0, 1.0, 1e5, "copies r"), GAP],
        default_trials: 1_000,
        smoke_trials: 20,
        takes_path: false,
    },
    ExperimentSpec {
        name: "tpx",
        description: "multi-copy T_px: flag # at low overlap, transformation at high overlap",
        anchor: "T_px lemma: failure <= (6 exp(-r gamma^2/36))^2, <n> <= 5r",
        params: &[
            param("p", 0.98, 0.0, 1.0, "overlap of psi and phi"),
            param("gamma", 0.05, 1e-3, 0.25, "concentration margin"),
            param("copies", 400.0, 1.0, 1e5, "copies r"),
            GAP,
            param("resolution", 0.2, 1e-3, 1.5, "dominance resolution delta"),
            INNER_MC,
        ],
        default_trials: 500,
        smoke_trials: 5,
        takes_path: false,
    },
    ExperimentSpec {
        name: "known-overlaps",
        description: "traversal with known checkpoints of overlap >= 1/3 and phase anchors",
        anchor: "known-overlaps: fidelity 1, <m> < 4n, <G^m> <= G^(6n)",
        params: &[
            param("min_overlap", 1.0 / 3.0, 1.0 / 3.0, 1.0, "overlap required between consecutive checkpoints"),
            param("grid", 400.0, 2.0, 1e5, "grid points for checkpoint selection"),
            param("anchor_offset", 0.0, -1.0, 1.0, "error added to every phase anchor"),
        ],
        default_trials: 10_000,
        smoke_trials: 20,
        takes_path: true,
    },
    ExperimentSpec {
        name: "parallel",
        description: "r copies moved through n checkpoints by T_p, anchors recovered on the way",
        anchor: "parallel-copies: failure <= (n exp(-r gamma^2))^2, anchors within gap/5",
        params: &[
            param("segments", 4.0, 1.0, 1000.0, "checkpoints n on the default great circle"),
            param("p", 0.9, 0.0, 1.0, "segment overlap on the default great circle"),
            param("gamma", 0.05, 1e-3, 0.5, "concentration margin"),
            param("copies", 600.0, 1.0, 1e5, "copies r"),
        ],
        default_trials: 1_000,
        smoke_trials: 5,
        takes_path: true,
    },
    ExperimentSpec {
        name: "dominant",
        description: "recursive T_px descent over the binary interval tree",
        anchor: "dominant-eigenphase: attempts <= C, <n> <= 5rC",
        params: &[
            param("gamma", 0.05, 1e-3, 0.08, "concentration margin"),
            param("resolution", 0.1, 1e-3, 1.5, "dominance resolution delta"),
            param("copies", 30.0, 1.0, 1e5, "copies r"),
            INNER_MC,
            param("length_over_theta", 5.0, 0.0, 100.0, "default great-circle length in units of theta"),
            param("dim", 4.0, 3.0, 64.0, "default great-circle dimension"),
        ],
        default_trials: 1_000,
        smoke_trials: 3,
        takes_path: true,
    },
    ExperimentSpec {
        name: "overlap-free",
        description: "recursive T'_mx descent with a single copy and approximate anchors",
        anchor: "overlap-free: <n> <= 40L(log2(vmax/vavg)+3)/theta + 10, <G^n> <= G^(36 nbar)",
        params: &[
            param("length", 3.0, 0.0, 50.0, "default great-circle length"),
            param("dim", 3.0, 2.0, 64.0, "default great-circle dimension"),
            param("anchor_offset", 0.05, -1.0, 1.0, "error added to every phase anchor"),
        ],
        default_trials: 1_000,
        smoke_trials: 10,
        takes_path: true,
    },
    ExperimentSpec {
        name: "reduction",
        description: "checkpoint reduction of a fine trace",
        anchor: "checkpoint-reduction lemma: gaps in [theta_lo, theta_hi + theta], L(S) >= theta_lo (k-1)",
        params: &[
            param("steps", 20.0, 1.0, 1e4, "trace steps"),
            param("length", 6.0, 0.0, 50.0, "great-circle length"),
            param("theta", 0.4, 1e-3, 1.5, "trace step bound"),
            param("theta_lo", 0.3, 1e-3, 1.5, "lower overlap-test angle"),
            param("theta_hi", 0.5, 1e-3, 1.5, "upper overlap-test angle"),
        ],
        default_trials: 1_000,
        smoke_trials: 10,
        takes_path: false,
    },
    ExperimentSpec {
        name: "galton-watson",
        description: "subdivision branching process: interval counts and their moment",
        anchor: "branching-process lemma: mean p_s/(2p_s-1), <G^|S|> <= G^(1+2/(2p_s-1))",
        params: &[param("p_s", 0.8, 0.501, 1.0, "success probability per interval")],
        default_trials: 1_000_000,
        smoke_trials: 1000,
        takes_path: false,
    },
    ExperimentSpec {
        name: "speed",
        description: "speed-profile functionals and binary-interval-tree cost bounds",
        anchor: "sigma <= 2 rho; enumerated tree cost <= integral bound <= rough bound",
        params: &[param("theta", 0.1, 1e-3, 1.0, "angular resolution"), param("points", 20.0, 1.0, 1000.0, "sample points per profile")],
        default_trials: 3,
        smoke_trials: 3,
        takes_path: false,
    },
    ExperimentSpec {
        name: "perturbation",
        description: "eigenvector angle bound on random matrices and the rate bound on the Grover path",
        anchor: "angle <= arcsin(|(S-shift)psi|/gap); |P_perp dpsi/ds| <= |dH/ds|/gap",
        params: &[
            param("dim", 8.0, 2.0, 64.0, "random matrix dimension"),
            param("scale", 0.05, 0.0, 10.0, "perturbation scale"),
            param("level", 3.0, 0.0, 63.0, "eigenvalue index"),
            param("grover_items", 16.0, 2.0, 1024.0, "Grover search space size"),
            param("grover_points", 50.0, 0.0, 1e4, "trials that also check the rate bound"),
            param("slack", 1e-3, 0.0, 1.0, "finite-difference slack"),
        ],
        default_trials: 100,
        smoke_trials: 10,
        takes_path: false,
    },
    ExperimentSpec {
        name: "ldev-composition",
        description: "moment of a sum of sequential T_m runs",
        anchor: "composition: <G^(sum n_i)> <= G^(sum C_i)",
        params: &[param("p", 0.5, 0.01, 1.0, "overlap of each step"), param("steps", 3.0, 1.0, 100.0, "sequential steps")],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "ldev-random-count",
        description: "success-gated sequences of T'_x attempts with a random number of invocations",
        anchor: "random-count composition: <G^C> <= G^(m c), <(G^c)^m> <= (G^c)^m",
        params: &[param("p_s", 0.9, 0.6, 1.0, "success probability per attempt"), param("idle_prob", 0.2, 0.0, 0.99, "zero-cost invocations")],
        default_trials: 100_000,
        smoke_trials: 200,
        takes_path: false,
    },
    ExperimentSpec {
        name: "cost-ratio",
        description: "per-copy oracle calls of known-overlap and parallel traversals on the same checkpoints",
        anchor: "the two traversals agree within a constant factor",
        params: &[
            param("segments", 4.0, 1.0, 100.0, "checkpoints n"),
            param("p", 0.9, 0.0, 1.0, "segment overlap"),
            param("copies", 100.0, 1.0, 1e5, "copies r"),
            param("factor", 4.0, 1.0, 100.0, "allowed ratio"),
        ],
        default_trials: 200,
        smoke_trials: 5,
        takes_path: false,
    },
];

pub fn catalog() -> &'static [ExperimentSpec] {
    CATALOG
}

pub fn lookup(name: &str) -> Option<&'static ExperimentSpec> {
    CATALOG.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shape() {
        assert!(catalog().len() >= 15);
        for e in catalog() {
            for p in e.params {
                if let Some(d) = p.default {
                    assert!(p.min <= d && d <= p.max, "{}.{}", e.name, p.name);
                }
            }
            assert_eq!(lookup(e.name).unwrap().name, e.name);
        }
        let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
        for n in ["t", "tm", "tx-prime", "er", "erx", "tpx", "known-overlaps", "parallel", "dominant", "overlap-free"] {
            assert!(names.contains(&n));
        }
    }
}
