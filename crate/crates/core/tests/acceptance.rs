//! Acceptance gate. Every criterion runs at zero tolerance and prints one
//! PASS/FAIL line; the process exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use frcode::bounds;
use frcode::constructions::{self, fixtures};
use frcode::hierarchy::{self, SearchConfig, DEFAULT_ENUMERATION_CAP};
use frcode::storage::{mds::for_each_subset, Reconstruction, StorageSystem};
use frcode::{validate_fr, FrCode, FrParams, PointSet};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SIZE: usize = 200;
const CORPUS_MAX: usize = 12;
const CORPUS_SEED: u64 = 0x00FC_0DE5;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn corpus() -> Vec<FrCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| common::random_fr_code(&mut rng, CORPUS_MAX))
        .collect()
}

fn fixture_codes() -> Vec<FrCode> {
    vec![
        validate_fr(&fixtures::example2()).unwrap(),
        validate_fr(&fixtures::example3_petersen()).unwrap(),
    ]
}

fn example2_regression() -> Outcome {
    let s = fixtures::example2();
    let h = hierarchy::full_hierarchy(&s, &cfg()).map_err(|e| e.to_string())?;
    ensure!(h.m()[1..] == [4, 7, 9, 10, 10], "M_k(C) = {:?}", &h.m()[1..]);

    let d = s.dual();
    ensure!(d == fixtures::example2_dual(), "transpose differs from printed dual");
    let hd = hierarchy::full_hierarchy(&d, &cfg()).map_err(|e| e.to_string())?;
    ensure!(
        hd.m()[1..] == [2, 3, 3, 4, 4, 4, 5, 5, 5, 5],
        "M_l(C^t) = {:?}",
        &hd.m()[1..]
    );
    let n_dual: Vec<usize> = (1..=10)
        .map(|l| hierarchy::n_value(&d, l, &cfg()).unwrap())
        .collect();
    ensure!(
        n_dual == [3, 2, 2, 1, 1, 1, 0, 0, 0, 0],
        "N_l(C^t) = {n_dual:?}"
    );
    Ok("M = [4,7,9,10,10], M(dual) = [2,3,3,4,4,4,5,5,5,5], N(dual) matches".into())
}

fn example3_regression() -> Outcome {
    let s = fixtures::example3_petersen();
    let p = validate_fr(&s).map_err(|e| e.to_string())?.params();
    ensure!(p == FrParams::new(15, 2, 10, 3).unwrap(), "params {p}");
    let binomial = bounds::binomial_bound(p, 6).unwrap();
    ensure!(binomial == 8, "binomial bound at k=6 = {binomial}");
    let g6 = bounds::recursive_g(p)[5];
    ensure!(g6 == 7, "g(6) = {g6}");
    let gp = bounds::g_prime(p);
    ensure!(gp == [3, 5, 7, 9, 11, 12, 13, 14, 15, 15], "g' = {gp:?}");
    let dual = bounds::dual_bound(p, 6).unwrap();
    ensure!(dual == 6, "dual bound at k=6 = {dual}");
    let m6 = hierarchy::supported_file_size(&s, 6, &cfg()).map_err(|e| e.to_string())?;
    ensure!(m6 == 6, "M_6 = {m6}");
    // Rows 1,2,3,4,5,10 counted from one.
    let mut union = PointSet::empty(10);
    for row in [1, 2, 3, 4, 5, 10] {
        union.union_with(s.block(row - 1));
    }
    ensure!(union.len() == 6, "witness covers {} points", union.len());
    Ok("binomial=8 g(6)=7 g'=[3,5,7,9,11,12,13,14,15,15] dual=6 M_6=6 witness covers 6".into())
}

fn duality_theorem(corpus: &[FrCode]) -> Outcome {
    let mut checked = 0;
    for (i, code) in corpus.iter().enumerate() {
        let s = code.structure();
        let direct = hierarchy::full_hierarchy(s, &cfg()).map_err(|e| e.to_string())?;
        let via_dual = hierarchy::hierarchy_via_dual(s, &cfg()).map_err(|e| e.to_string())?;
        ensure!(
            direct == via_dual,
            "code {i} {}: direct {:?} vs via dual {:?}",
            code.params(),
            direct.m(),
            via_dual.m()
        );
        for k in 1..=s.num_blocks() {
            let brute = hierarchy::supported_file_size_bruteforce(s, k, DEFAULT_ENUMERATION_CAP)
                .map_err(|e| e.to_string())?;
            ensure!(
                brute == direct.supported(k),
                "code {i} {} k={k}: search {} vs brute force {brute}",
                code.params(),
                direct.supported(k)
            );
            checked += 1;
        }
    }
    Ok(format!("{} codes, {checked} (code, k) pairs agree", corpus.len()))
}

fn bound_soundness(corpus: &[FrCode]) -> Outcome {
    let mut checked = 0;
    for (i, code) in fixture_codes().iter().chain(corpus).enumerate() {
        let p = code.params();
        let h = hierarchy::full_hierarchy(code.structure(), &cfg()).map_err(|e| e.to_string())?;
        let g = bounds::recursive_g(p);
        for k in 1..=p.n {
            let m = h.supported(k);
            let binomial = bounds::binomial_bound(p, k).unwrap();
            let dual = bounds::dual_bound(p, k).unwrap();
            ensure!(m <= binomial, "code {i} {p} k={k}: M_k={m} > binomial bound {binomial}");
            ensure!(m as i64 <= g[k - 1], "code {i} {p} k={k}: M_k={m} > g(k)={}", g[k - 1]);
            ensure!(m <= dual, "code {i} {p} k={k}: M_k={m} > dual={dual}");
            let min_k = bounds::silberstein_min_k(p, m).unwrap();
            ensure!(min_k <= k, "code {i} {p} k={k}: reconstruction degree bound {min_k} > k");
            checked += 1;
        }
    }
    Ok(format!("{checked} (code, k) pairs satisfy all four bounds"))
}

fn structural_identities(corpus: &[FrCode]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0051_AB1E);
    for i in 0..1000 {
        let s = common::random_structure(&mut rng, 20);
        ensure!(s.dual().dual() == s, "structure {i}: dual is not an involution");
    }

    let mut generated: Vec<FrCode> = corpus.to_vec();
    generated.extend(fixture_codes());
    generated.extend((3..=10).map(|t| constructions::complete_graph_code(t).unwrap()));
    for code in &generated {
        let p = code.params();
        ensure!(p.n * p.alpha == p.v * p.rho, "n*alpha != v*rho for {p}");
        let d = validate_fr(&code.structure().dual()).map_err(|e| e.to_string())?;
        ensure!(d.params() == p.dual(), "dual of {p} is {}", d.params());
    }

    let mut tuples = 0;
    while tuples < 100 {
        let n = rng.random_range(1..=60);
        let v = rng.random_range(1..=60);
        let alphas: Vec<usize> = (1..=v).filter(|a| n * a % v == 0).collect();
        let alpha = alphas[rng.random_range(0..alphas.len())];
        let p = FrParams::new(n, alpha, v, n * alpha / v).unwrap();
        ensure!(
            bounds::g_prime(p) == bounds::recursive_g(p.dual()),
            "g' differs from g of dual params for {p}"
        );
        tuples += 1;
    }
    Ok(format!(
        "1000 involutions, n*alpha = v*rho on {} codes, g' = g(dual) on {tuples} tuples",
        generated.len()
    ))
}

fn simulator() -> Outcome {
    let mut reconstructions = 0usize;
    for code in fixture_codes() {
        let p = code.params();
        let h = hierarchy::full_hierarchy(code.structure(), &cfg()).map_err(|e| e.to_string())?;
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut file = vec![0u8; 1024];
            rng.fill_bytes(&mut file);
            for k in 1..=p.n {
                let m = h.supported(k);
                // The caller pads to a multiple of M and trims after decoding.
                let mut padded = file.clone();
                padded.resize(file.len().div_ceil(m) * m, 0);
                let sys = StorageSystem::encode_and_place(&code, &padded, m)
                    .map_err(|e| e.to_string())?;
                for_each_subset(p.n, k, |nodes| {
                    match sys.reconstruct_from(nodes) {
                        Ok(Reconstruction::Recovered(mut bytes)) => {
                            bytes.truncate(file.len());
                            if bytes != file {
                                return Err(format!("{p} k={k} nodes {nodes:?}: bytes differ"));
                            }
                        }
                        other => return Err(format!("{p} k={k} nodes {nodes:?}: {other:?}")),
                    }
                    reconstructions += 1;
                    Ok(())
                })?;
            }

            let m = h.supported(p.n);
            let mut padded = file.clone();
            padded.resize(file.len().div_ceil(m) * m, 0);
            let base = StorageSystem::encode_and_place(&code, &padded, m).map_err(|e| e.to_string())?;
            for i in 0..p.n {
                let mut sys = base.clone();
                sys.fail_node(i).map_err(|e| e.to_string())?;
                let log = sys.repair_node(i).map_err(|e| e.to_string())?;
                ensure!(log.len() == p.alpha, "{p}: repair of {i} moved {} packets", log.len());
                ensure!(sys.node(i) == base.node(i), "{p}: node {i} differs after repair");
            }
        }
    }
    Ok(format!("{reconstructions} reconstructions byte-exact; all single repairs exact with alpha transfers"))
}

struct Criterion<'a> {
    id: &'static str,
    name: &'static str,
    limit: Option<Duration>,
    run: Box<dyn FnOnce() -> Outcome + 'a>,
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion> = vec![
        Criterion {
            id: "AC1",
            name: "example2 regression",
            limit: Some(Duration::from_secs(1)),
            run: Box::new(example2_regression),
        },
        Criterion {
            id: "AC2",
            name: "example3-petersen regression",
            limit: Some(Duration::from_secs(5)),
            run: Box::new(example3_regression),
        },
        Criterion {
            id: "AC3",
            name: "Duality theorem on random FR codes",
            limit: Some(Duration::from_secs(60)),
            run: Box::new(|| duality_theorem(&corpus)),
        },
        Criterion {
            id: "AC4",
            name: "Bound soundness",
            limit: None,
            run: Box::new(|| bound_soundness(&corpus)),
        },
        Criterion {
            id: "AC5",
            name: "Structural identities",
            limit: None,
            run: Box::new(|| structural_identities(&corpus)),
        },
        Criterion {
            id: "AC6",
            name: "Storage simulator",
            limit: Some(Duration::from_secs(30)),
            run: Box::new(simulator),
        },
    ];

    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {}: {detail} ({elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {}: {why} ({elapsed:.2?})", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
