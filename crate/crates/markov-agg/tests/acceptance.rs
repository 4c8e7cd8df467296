//! Acceptance suite: one test per acceptance criterion, each printing a
//! single pass/fail line. Tolerances are pinned in the assertions.

mod common;

use std::time::Instant;

use common::{random_regular_chain, seeded_rng};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use markov_agg::info::p_lift_of;
use markov_agg::textio::fmt_file;
use markov_agg::{
    aggregate, aib_greedy, enumerate_partitions, evaluate, exhaustive_search,
    finite_n_projection_kld, gene_expression_network, kldr_markov, lumpability_check,
    mu_lift_bound, p_lift, pi_lift, relevant_loss_x, relevant_loss_y, sweep, uniformize,
    Criterion, FixedClass, MarkovChain, Partition, StochasticMatrix, SweepMethod,
};

struct Gate(&'static str, bool);

impl Drop for Gate {
    fn drop(&mut self) {
        let verdict = if self.1 && !std::thread::panicking() { "PASS" } else { "FAIL" };
        println!("acceptance {}: {verdict}", self.0);
    }
}

impl Gate {
    fn new(name: &'static str) -> Self {
        Gate(name, false)
    }

    fn pass(mut self) {
        self.1 = true;
    }
}

fn chain(rows: Vec<Vec<f64>>) -> MarkovChain {
    MarkovChain::new(StochasticMatrix::new(rows, false).unwrap()).unwrap()
}

fn example1() -> MarkovChain {
    chain(vec![
        vec![0.97, 0.01, 0.02],
        vec![0.02, 0.48, 0.50],
        vec![0.01, 0.75, 0.24],
    ])
}

fn example3() -> MarkovChain {
    chain(vec![
        vec![0.0475, 0.9025, 0.05],
        vec![0.9025, 0.0475, 0.05],
        vec![0.95, 0.05, 0.0],
    ])
}

fn example4() -> MarkovChain {
    chain(vec![
        vec![0.25, 0.25, 0.5],
        vec![0.0, 1.0 / 6.0, 5.0 / 6.0],
        vec![0.875, 0.125, 0.0],
    ])
}

fn part(labels: &[usize]) -> Partition {
    Partition::canonicalize(labels).unwrap()
}

#[test]
fn criterion_1_bound_table_reproduction() {
    let gate = Gate::new("1 (three-state bound table)");
    let started = Instant::now();
    let x = example1();
    let expected_mu = [0.347, 0.388, 0.265];
    for (a, b) in x.mu().entries().iter().zip(&expected_mu) {
        assert!((a - b).abs() <= 1e-3, "stationary {a} vs {b}");
    }
    let cases: [(&[usize], f64, f64, [f64; 3]); 3] = [
        (&[1, 1, 2], 0.823, 0.185, [0.077, 0.658, 0.265]),
        (&[1, 2, 1], 0.808, 0.317, [0.065, 0.388, 0.546]),
        (&[1, 2, 2], 0.037, 0.001, [0.347, 0.388, 0.265]),
    ];
    for (labels, want_mu_bound, want_p_bound, want_hat) in cases {
        let g = part(labels);
        let report = evaluate(&x, &g, 1e-10).unwrap();
        assert!((report.kldr_mu - want_mu_bound).abs() <= 1e-3, "{labels:?}: {}", report.kldr_mu);
        assert!((report.kldr_p - want_p_bound).abs() <= 1e-3, "{labels:?}: {}", report.kldr_p);
        let lifted = p_lift_of(&x, &g).unwrap();
        let hat_chain = MarkovChain::new(lifted.kernel().clone()).unwrap();
        for (a, b) in hat_chain.mu().entries().iter().zip(&want_hat) {
            assert!((a - b).abs() <= 1e-3, "{labels:?}: lift stationary {a} vs {b}");
        }
    }
    assert!(started.elapsed().as_secs_f64() < 1.0);
    gate.pass();
}

#[test]
fn criterion_2_greedy_vs_exhaustive_gap() {
    let gate = Gate::new("2 (greedy relaxation vs exhaustive)");
    let started = Instant::now();
    let x = example3();
    let mut entropies: Vec<f64> = [[1usize, 1, 2], [1, 2, 1], [1, 2, 2]]
        .iter()
        .map(|labels| relevant_loss_x(&x, &part(labels)).cond_entropy)
        .collect();
    assert!((entropies[0] - 1.19).abs() <= 0.005, "{}", entropies[0]);
    entropies[1..].sort_by(f64::total_cmp);
    assert!((entropies[1] - 0.55).abs() <= 0.005, "{}", entropies[1]);
    assert!((entropies[2] - 0.69).abs() <= 0.005, "{}", entropies[2]);
    let greedy = aib_greedy(&x, 2, None).unwrap();
    assert_eq!(greedy.assignment(), &[1, 2, 2]);
    let best = exhaustive_search(&x, 2, Criterion::PLiftKldr, None).unwrap();
    assert_eq!(best.best.assignment(), &[1, 1, 2]);
    assert!(best.value <= 1e-10);
    assert!(lumpability_check(x.p(), &best.best, 1e-12).lumpable);
    assert!(started.elapsed().as_secs_f64() < 1.0);
    gate.pass();
}

#[test]
fn criterion_3_weakly_lumpable_chain() {
    let gate = Gate::new("3 (weakly lumpable chain)");
    let x = example4();
    let g = part(&[1, 2, 2]);
    let expected = [
        [0.25, 0.25, 0.5],
        [7.0 / 12.0, 5.0 / 72.0, 25.0 / 72.0],
        [7.0 / 12.0, 5.0 / 12.0, 0.0],
    ];
    let lifted = p_lift_of(&x, &g).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!((lifted.kernel().get(i, j) - expected[i][j]).abs() <= 1e-12);
        }
    }
    let kldr_p = kldr_markov(&x, lifted.kernel()).unwrap();
    assert!((kldr_p - 0.347).abs() <= 1e-3, "{kldr_p}");
    assert!(!lumpability_check(x.p(), &g, 1e-10).lumpable);
    for steps in 2..=8 {
        let d = finite_n_projection_kld(&x, &g, steps).unwrap();
        assert!(d.abs() <= 1e-10, "n={steps}: {d}");
    }
    gate.pass();
}

fn corpus(count: usize, max_n: usize, seed: u64) -> Vec<MarkovChain> {
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_n);
            random_regular_chain(&mut rng, n)
        })
        .collect()
}

/// A random lumpable lifting of Q: each row i spreads Q_{g(i)l} over class l
/// with independent random simplex weights.
fn random_lumpable_lifting(
    rng: &mut ChaCha8Rng,
    q: &StochasticMatrix,
    g: &Partition,
) -> StochasticMatrix {
    let n = g.n();
    let classes = g.classes();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        let k = g.class_of(i);
        for (l, members) in classes.iter().enumerate() {
            let weights: Vec<f64> = members.iter().map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for (&j, w) in members.iter().zip(&weights) {
                rows[i][j] = q.get(k, l) * w / total;
            }
        }
    }
    StochasticMatrix::new(rows, true).unwrap()
}

#[test]
fn criterion_4_lifting_property_suite() {
    let gate = Gate::new("4 (lifting property suite)");
    let started = Instant::now();
    let mut rng = seeded_rng(41);
    for x in corpus(100, 8, 40) {
        let n = x.n();
        let partitions: Vec<Partition> = (1..=n.min(4))
            .flat_map(|m| enumerate_partitions(n, m, None).unwrap())
            .collect();
        for g in &partitions {
            let y = aggregate(&x, g);
            let plifted = p_lift(&x, &y, g).unwrap();
            let mulifted = pi_lift(&y, g, x.mu()).unwrap();
            for lifted in [plifted.kernel(), mulifted.kernel()] {
                let report = lumpability_check(lifted, g, 1e-10);
                assert!(report.lumpable, "violation {}", report.max_violation);
                let back = aggregate(&MarkovChain::new(lifted.clone()).unwrap(), g);
                for k in 0..g.m() {
                    for l in 0..g.m() {
                        assert!((back.q().get(k, l) - y.q().get(k, l)).abs() <= 1e-10);
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if x.p().get(i, j) > 0.0 {
                        assert!(plifted.kernel().get(i, j) > 0.0, "zero-pattern dominance");
                    }
                }
            }
            let kldr_p = kldr_markov(&x, plifted.kernel()).unwrap();
            let kldr_mu = kldr_markov(&x, mulifted.kernel()).unwrap();
            let loss_x = relevant_loss_x(&x, g).loss;
            let loss_y = relevant_loss_y(&x, g);
            assert!(kldr_p <= kldr_mu + 1e-12);
            assert!((loss_y - kldr_p).abs() <= 1e-10);
            assert!((mu_lift_bound(&x, g) - kldr_mu).abs() <= 1e-10);
            assert!(loss_y <= loss_x + 1e-12);
            assert!(loss_x <= kldr_mu + 1e-12);
        }
        // minimizer property on bi-partitions of small chains
        if n <= 5 {
            for g in enumerate_partitions(n, 2, None).unwrap() {
                let y = aggregate(&x, &g);
                let best = kldr_markov(&x, p_lift(&x, &y, &g).unwrap().kernel()).unwrap();
                for _ in 0..10_000 {
                    let alt = random_lumpable_lifting(&mut rng, y.q(), &g);
                    let value = kldr_markov(&x, &alt).unwrap();
                    assert!(value >= best - 1e-12, "sampled lifting beat the optimum");
                }
            }
        }
    }
    assert!(started.elapsed().as_secs_f64() < 300.0);
    gate.pass();
}

#[test]
fn criterion_5_finite_n_certificates() {
    let gate = Gate::new("5 (finite-horizon certificates)");
    let mut rng = seeded_rng(50);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let x = random_regular_chain(&mut rng, n);
        let partitions: Vec<Partition> = (1..=n.min(3))
            .flat_map(|m| enumerate_partitions(n, m, None).unwrap())
            .collect();
        // seeded sample keeps the run fast while touching every chain
        for _ in 0..5 {
            let g = &partitions[rng.gen_range(0..partitions.len())];
            let bound = kldr_markov(&x, p_lift_of(&x, g).unwrap().kernel()).unwrap();
            for steps in 2..=8 {
                let d = finite_n_projection_kld(&x, g, steps).unwrap();
                assert!(d <= (steps - 1) as f64 * bound + 1e-9);
            }
        }
    }
    gate.pass();
}

fn gene_chain() -> (MarkovChain, Vec<Vec<u64>>) {
    let network = gene_expression_network(10, [0.01, 0.01, 1.0, 0.1]);
    let states = network.enumerate_reachable(100_000).unwrap();
    let generator = network.build_generator(states.clone()).unwrap();
    let u = uniformize(&generator, None).unwrap();
    (MarkovChain::new(u.p).unwrap(), states)
}

#[test]
fn criterion_6_gene_expression_workflow() {
    let gate = Gate::new("6 (gene expression workflow)");
    let started = Instant::now();
    let (x, states) = gene_chain();
    assert_eq!(states.len(), 22);
    // fixed class: every state with the gene active (species index 1)
    let gene_on: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s[1] > 0)
        .map(|(i, _)| i)
        .collect();
    let g_on = aib_greedy(&x, 2, Some(&FixedClass::frozen(gene_on))).unwrap();
    let on_report = evaluate(&x, &g_on, 1e-10).unwrap();
    assert!(on_report.kldr_p <= 1e-9, "{}", on_report.kldr_p);
    // threshold class: protein count above T = 0.9 * n_P = 9
    let above: Vec<usize> = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s[3] > 9)
        .map(|(i, _)| i)
        .collect();
    let fixed = FixedClass::frozen(above);
    let records =
        sweep(&x, x.n() - 1, 2, SweepMethod::Aib, Some(&fixed), 1e-10).unwrap();
    for record in &records {
        assert!(
            record.kldr_p >= on_report.kldr_p - 1e-12,
            "m={}: {} < {}",
            record.m,
            record.kldr_p,
            on_report.kldr_p
        );
    }
    assert!(started.elapsed().as_secs_f64() < 30.0);
    gate.pass();
}

/// 4 blocks of 5 states; within-block mass 0.95 split uniformly, cross-block
/// mass 0.05 structured so that exactly the block partition is lumpable:
/// block-to-block totals depend only on the source block (asymmetrically,
/// so merging blocks loses), while the spread inside a target block varies
/// with the source state (so splitting blocks loses too).
fn block_chain() -> MarkovChain {
    let n = 20;
    let dir = |a: usize, b: usize| (1 + (3 * a + b) % 5) as f64;
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (a, r) = (i / 5, i % 5);
        let total: f64 = (0..4).filter(|&b| b != a).map(|b| dir(a, b)).sum();
        for j in 0..n {
            let (b, s) = (j / 5, j % 5);
            rows[i][j] = if a == b {
                0.95 / 5.0
            } else {
                // inner weights sum to 15 for every source state r
                let inner = (1 + (r + 2 * s) % 5) as f64;
                0.05 * (dir(a, b) / total) * (inner / 15.0)
            };
        }
    }
    chain(rows)
}

#[test]
fn criterion_7_block_chain_sweep_shape() {
    let gate = Gate::new("7 (block chain sweep shape)");
    let x = block_chain();
    let records = sweep(&x, 10, 2, SweepMethod::Aib, None, 1e-10).unwrap();
    assert_eq!(records.first().unwrap().m, 10);
    assert_eq!(records.last().unwrap().m, 2);
    let at = |m: usize| records.iter().find(|r| r.m == m).unwrap();
    assert!(at(4).kldr_p < at(5).kldr_p, "{} vs {}", at(4).kldr_p, at(5).kldr_p);
    assert!(at(4).kldr_p < at(3).kldr_p, "{} vs {}", at(4).kldr_p, at(3).kldr_p);
    let flagged: Vec<usize> = markov_agg::strict_local_minima(&records)
        .into_iter()
        .map(|i| records[i].m)
        .collect();
    assert!(flagged.contains(&4), "flagged minima at m = {flagged:?}");
    // the fixed-distribution bound only degrades as classes merge
    for w in records.windows(2) {
        assert!(w[0].kldr_mu <= w[1].kldr_mu + 1e-12, "m={} vs m={}", w[0].m, w[1].m);
    }
    gate.pass();
}

/// Byte-level transcript of the deterministic artifacts the other criteria
/// produce: full-precision metric dumps and sweep tables.
fn transcript() -> String {
    let mut out = String::new();
    let x1 = example1();
    for labels in [[1usize, 1, 2], [1, 2, 1], [1, 2, 2]] {
        let g = part(&labels);
        let r = evaluate(&x1, &g, 1e-10).unwrap();
        out.push_str(&format!(
            "{g} {} {} {} {}\n",
            fmt_file(r.kldr_p),
            fmt_file(r.kldr_mu),
            fmt_file(r.loss_x),
            fmt_file(r.loss_y)
        ));
    }
    let x4 = example4();
    let lifted = p_lift_of(&x4, &part(&[1, 2, 2])).unwrap();
    for row in lifted.kernel().rows() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_file(v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    for x in corpus(10, 6, 40) {
        for g in enumerate_partitions(x.n(), 2, None).unwrap() {
            let r = evaluate(&x, &g, 1e-10).unwrap();
            out.push_str(&format!("{} {}\n", fmt_file(r.kldr_p), fmt_file(r.kldr_mu)));
        }
    }
    let (gene, _) = gene_chain();
    for r in sweep(&gene, 5, 2, SweepMethod::Aib, None, 1e-10).unwrap() {
        out.push_str(&format!("{} {} {}\n", r.m, r.partition, fmt_file(r.kldr_p)));
    }
    for r in sweep(&block_chain(), 10, 2, SweepMethod::Aib, None, 1e-10).unwrap() {
        out.push_str(&format!("{} {} {}\n", r.m, r.partition, fmt_file(r.kldr_p)));
    }
    out
}

#[test]
fn criterion_8_determinism() {
    let gate = Gate::new("8 (byte-identical reruns)");
    let dir = tempfile::TempDir::new().unwrap();
    let first = dir.path().join("first.txt");
    let second = dir.path().join("second.txt");
    std::fs::write(&first, transcript()).unwrap();
    std::fs::write(&second, transcript()).unwrap();
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    gate.pass();
}
