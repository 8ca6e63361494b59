use bcc_lab::distributions::{sample_a_k, sample_a_rand, InputAssignment};
use bcc_lab::gf2::{is_full_rank, random_bitmatrix, random_bitvector, BitMatrix};
use bcc_lab::model::{run, Protocol};
use bcc_lab::prg::PrgParams;
use bcc_lab::protocols::{
    full_rank_protocol, max_clique, planted_clique_finder, reconstruct_matrix, seed_breaker, finder_input,
    CliqueFinderParams, FinderStatus, IdentityPrg, MatrixPrg,
};
use bcc_lab::rng::stream;

#[test]
fn finder_recovers_planted_clique_within_budget() {
    let params = CliqueFinderParams::new(200, 100).unwrap();
    let finder = planted_clique_finder(params);
    let budget = 2.0 * params.n as f64 * params.p + 3.0;
    let trials = 12;
    let mut exact = 0;
    for t in 0..trials {
        let mut rng = stream(31, "finder-planted", t);
        let (graph, clique) = sample_a_k(200, 100, &mut rng).unwrap();
        let coins = random_bitmatrix(200, params.coin_bits, &mut rng);
        let result = finder.run_on(&finder_input(&params, &graph, &coins).unwrap()).unwrap();
        assert!(result.rounds_used as f64 <= budget);
        assert!(result.rounds_used <= params.rounds());
        if result.members() == Some(clique.members()) {
            exact += 1;
        }
    }
    assert!(exact as f64 >= 0.9 * trials as f64, "{exact}/{trials}");
}

#[test]
fn finder_aborts_on_random_graphs() {
    let params = CliqueFinderParams::new(200, 100).unwrap();
    let finder = planted_clique_finder(params);
    let trials = 12;
    let mut aborted = 0;
    for t in 0..trials {
        let mut rng = stream(32, "finder-random", t);
        let graph = sample_a_rand(200, &mut rng);
        let coins = random_bitmatrix(200, params.coin_bits, &mut rng);
        let result = finder.run_on(&finder_input(&params, &graph, &coins).unwrap()).unwrap();
        match result.members() {
            None => aborted += 1,
            Some(m) => assert!((m.len() as f64) < params.clique_floor),
        }
    }
    assert!(aborted as f64 >= 0.9 * trials as f64);
}

#[test]
fn activation_count_matches_its_mean() {
    let params = CliqueFinderParams::new(200, 100).unwrap();
    let p = params.effective_p();
    assert!(p >= params.p && p - params.p < params.p / 256.0);
    let trials = 2000u64;
    let counts: Vec<f64> = (0..trials)
        .map(|t| {
            let mut rng = stream(33, "activation", t);
            (0..params.n)
                .filter(|_| {
                    let mut row = random_bitvector(params.n, &mut rng);
                    row = row.concat(&random_bitvector(params.coin_bits, &mut rng));
                    params.is_active(&row)
                })
                .count() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / trials as f64;
    let expect = params.n as f64 * p;
    let se = (params.n as f64 * p * (1.0 - p) / trials as f64).sqrt();
    assert!((mean - expect).abs() <= 3.0 * se, "{mean} vs {expect}");
}

#[test]
fn finder_parameter_guards() {
    assert!(CliqueFinderParams::new(64, 10).is_err());
    assert!(CliqueFinderParams::new(10, 0).is_err());
    assert!(CliqueFinderParams::new(10, 11).is_err());
    let params = CliqueFinderParams::new(16, 16).unwrap();
    let graph = sample_a_rand(15, &mut stream(34, "bad", 0));
    let coins = random_bitmatrix(16, params.coin_bits, &mut stream(34, "bad", 1));
    assert!(finder_input(&params, &graph, &coins).is_err());
}

#[test]
fn full_clique_graph_always_recovered() {
    let params = CliqueFinderParams::new(16, 16).unwrap();
    let finder = planted_clique_finder(params);
    for t in 0..10 {
        let mut rng = stream(35, "full", t);
        let (graph, _) = sample_a_k(16, 16, &mut rng).unwrap();
        let coins = random_bitmatrix(16, params.coin_bits, &mut rng);
        let result = finder.run_on(&finder_input(&params, &graph, &coins).unwrap()).unwrap();
        assert_eq!(result.status, FinderStatus::Recovered((1..=16).collect()));
    }
}

#[test]
fn full_rank_protocol_decides_rank() {
    for n in [1usize, 2, 5, 9] {
        let protocol = full_rank_protocol(n);
        assert_eq!(protocol.horizon(), n * n);
        for t in 0..200 {
            let a = random_bitmatrix(n, n, &mut stream(36, "frp", t));
            let ex = run(&protocol, &InputAssignment::new(a.clone())).unwrap();
            assert_eq!(reconstruct_matrix(&ex.transcript), a);
            let want = is_full_rank(&a).unwrap();
            assert!(ex.outputs.iter().all(|o| o.len() == 1 && o.get(1) == want));
        }
    }
}

#[test]
fn breaker_reachable_set_is_bounded_by_seeds() {
    for (n, k, m) in [(1, 1, 2), (2, 1, 3), (3, 1, 3), (2, 1, 5), (3, 1, 7)] {
        let prg = MatrixPrg(PrgParams::new(n, k, m).unwrap());
        let breaker = seed_breaker(&prg).unwrap();
        let s = k + PrgParams::new(n, k, m).unwrap().share_len();
        assert!(breaker.reachable_count() <= 1 << (n * s));
        assert_eq!(breaker.prg_acceptance(&prg).unwrap(), 1.0);
        let expect = breaker.reachable_count() as f64 / (1u64 << (n * breaker.broadcast_len())) as f64;
        assert_eq!(breaker.uniform_acceptance(), expect);
    }
    // When the generator does not stretch there is nothing to exploit.
    let id = IdentityPrg { n: 2, len: 3 };
    let breaker = seed_breaker(&id).unwrap();
    assert_eq!(breaker.uniform_acceptance(), 1.0);
}

/// Brute-force clique number for small graphs.
fn clique_number(a: &BitMatrix) -> usize {
    let n = a.rows();
    (0u32..1 << n)
        .filter(|s| {
            (0..n).all(|i| s >> i & 1 == 0 || (i + 1..n).all(|j| s >> j & 1 == 0 || a.get(i + 1, j + 1)))
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

#[test]
fn max_clique_matches_brute_force() {
    for t in 0..40 {
        let n = 4 + t as usize % 10;
        let raw = random_bitmatrix(n, n, &mut stream(37, "mc", t));
        let mut g = BitMatrix::zeros(n, n);
        for i in 1..=n {
            for j in i + 1..=n {
                g.set(i, j, raw.get(i, j));
                g.set(j, i, raw.get(i, j));
            }
        }
        let c = max_clique(&g).unwrap();
        assert_eq!(c.len(), clique_number(&g));
        assert!(c.iter().all(|&u| c.iter().all(|&w| u == w || g.get(u, w))));
    }
}
