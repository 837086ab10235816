//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::process::{Command, Stdio};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redpow::ctmc::{
    build_master, check_reversibility, detailed_balance_check, kolmogorov_check, parse_rational,
    ring_model, steady_state, BigRational, MasterChain, Model, SolveMode,
};
use redpow::cycles::{is_cycle, p_star, rank};
use redpow::graph::{default_labels, has_triangles};
use redpow::power::{
    cartesian_power, degree_of, edge_count, omega_count, power_betti, quotient_by_symmetry,
    upsilon_count, vertex_count, DEFAULT_TUPLE_BUDGET,
};
use redpow::{
    betti, bfs_spanning_tree, build_reduced_power, greedy_mcb, theorem1_basis, theorem1_basis_with,
    verify_square_space, Graph, Monomial, Provenance,
};

type Outcome = (bool, String);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let suite = suite();
    println!(
        "graph suite: {} connected graphs with v <= 6, k in 1..=3",
        suite.len()
    );
    let criteria: Vec<Criterion> = vec![
        ("count formulas", Box::new(|| counts(&suite))),
        ("quotient oracle", Box::new(|| quotient(&suite))),
        ("degree formula", Box::new(|| degrees(&suite))),
        ("basis correctness", Box::new(|| basis(&suite))),
        ("minimality", Box::new(|| minimality(&suite))),
        ("square space", Box::new(|| square_space(&suite))),
        ("reversibility, uncoupled", Box::new(uncoupled)),
        ("reversibility, equal couplings", Box::new(equal_couplings)),
        ("irreversibility detection", Box::new(irreversibility)),
        ("oracle agreement sweep", Box::new(sweep)),
        ("master rates", Box::new(master_rates)),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run();
        println!(
            "criterion {:>2} {} {name}: {detail}",
            n + 1,
            if pass { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!pass);
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn r(text: &str) -> BigRational {
    parse_rational(text).unwrap()
}

fn ring(lambda: &str, mu: &str, nu: &str, c: [&str; 5]) -> (Graph, redpow::ctmc::RateSpec) {
    ring_model(r(lambda), r(mu), r(nu), c.map(r))
}

fn petersen_pieces() -> Vec<Graph> {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..1 << 10 {
        let size = mask.count_ones();
        if !(5..=6).contains(&size) {
            continue;
        }
        let keep: Vec<usize> = (0..10).filter(|&i| mask >> i & 1 == 1).collect();
        let pos = |x: usize| keep.iter().position(|&y| y == x);
        let sub: Vec<(usize, usize)> = edges
            .iter()
            .filter_map(|&(a, b)| Some((pos(a)?, pos(b)?)))
            .collect();
        let g = Graph::new(default_labels(keep.len()), sub.clone()).unwrap();
        if !g.is_connected() {
            continue;
        }
        let mut degs: Vec<usize> = (0..g.vertex_count()).map(|x| g.degree(x)).collect();
        degs.sort();
        if seen.insert((g.edge_count(), degs)) {
            out.push(g);
        }
    }
    out
}

fn random_connected(seed: u64, v: usize, p: f64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    for i in 1..v {
        edges.insert((rng.gen_range(0..i), i));
    }
    for i in 0..v {
        for j in i + 1..v {
            if rng.gen_bool(p) {
                edges.insert((i, j));
            }
        }
    }
    Graph::new(default_labels(v), edges).unwrap()
}

fn suite() -> Vec<Graph> {
    let mut out: Vec<Graph> = (1..=6).map(Graph::path).collect();
    out.extend((3..=6).map(Graph::cycle));
    out.push(Graph::complete(4));
    out.extend(petersen_pieces());
    out.extend((0..10).map(|s| random_connected(s, 3 + s as usize % 4, 0.35)));
    out
}

fn cases(suite: &[Graph], ks: std::ops::RangeInclusive<usize>) -> Vec<(&Graph, usize)> {
    suite
        .iter()
        .flat_map(|g| ks.clone().map(move |k| (g, k)))
        .collect()
}

/// Edge count from the definition: pairs of multisets differing by one
/// token moved along one base edge.
fn edges_by_pairs(g: &Graph, k: usize) -> usize {
    let states = Monomial::all(g.vertex_count(), k);
    let mut count = 0;
    for (i, x) in states.iter().enumerate() {
        for y in &states[i + 1..] {
            let v = g.vertex_count();
            let moved: u32 = (0..v).map(|l| x.count(l).abs_diff(y.count(l))).sum();
            let from = (0..v).find(|&l| x.count(l) > y.count(l));
            let to = (0..v).find(|&l| x.count(l) < y.count(l));
            if let (2, Some(a), Some(b)) = (moved, from, to) {
                count += usize::from(g.has_edge(a, b));
            }
        }
    }
    count
}

fn counts(suite: &[Graph]) -> Outcome {
    let mut bad = Vec::new();
    for (g, k) in cases(suite, 1..=3) {
        let rp = build_reduced_power(g, k).unwrap();
        let (v, e) = (g.vertex_count(), g.edge_count());
        let built = (
            rp.graph().vertex_count() as u64,
            rp.graph().edge_count() as u64,
        );
        let formula = (vertex_count(v, k).unwrap(), edge_count(e, v, k).unwrap());
        if built != formula || edges_by_pairs(g, k) as u64 != built.1 {
            bad.push(format!("v={v} e={e} k={k}"));
        }
    }
    let c5 = Graph::cycle(5);
    let sizes: Vec<(usize, usize)> = [2, 3]
        .iter()
        .map(|&k| {
            let rp = build_reduced_power(&c5, k).unwrap();
            (rp.graph().vertex_count(), rp.graph().edge_count())
        })
        .collect();
    let enumerated = edges_by_pairs(&c5, 3);
    let pass = bad.is_empty() && sizes == [(15, 25), (35, 75)] && enumerated == 75;
    (
        pass,
        format!(
            "{} cases, {} mismatches; C5: k=2 {:?}, k=3 {:?}; k=3 edges by pair enumeration {enumerated} \
             (a count of 105 is not reproduced){}",
            suite.len() * 3,
            bad.len(),
            sizes[0],
            sizes[1],
            list(&bad)
        ),
    )
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", items.join(", "))
    }
}

fn quotient(suite: &[Graph]) -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for (g, k) in cases(suite, 1..=3) {
        let rp = build_reduced_power(g, k).unwrap();
        let cp = cartesian_power(g, k, DEFAULT_TUPLE_BUDGET).unwrap();
        let qt = quotient_by_symmetry(&cp, g, k).unwrap();
        let vertices = |h: &Graph| h.labels().iter().cloned().collect::<BTreeSet<_>>();
        let edges = |h: &Graph| {
            h.edges()
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (h.label(a).to_string(), h.label(b).to_string());
                    if x < y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                })
                .collect::<BTreeSet<_>>()
        };
        let same = vertices(rp.graph()) == vertices(qt.graph())
            && edges(rp.graph()) == edges(qt.graph())
            && rp == qt;
        if !same {
            bad.push(format!("v={} k={k}", g.vertex_count()));
        }
        n += 1;
    }
    (
        bad.is_empty(),
        format!(
            "{n} cases, labeled vertex and edge sets equal{}",
            list(&bad)
        ),
    )
}

fn degrees(suite: &[Graph]) -> Outcome {
    let (mut states, mut wrong) = (0, 0);
    for (g, k) in cases(suite, 1..=3) {
        let rp = build_reduced_power(g, k).unwrap();
        for (x, m) in rp.states().iter().enumerate() {
            states += 1;
            if degree_of(&rp, m).unwrap() != rp.graph().degree(x) {
                wrong += 1;
            }
        }
    }
    (
        wrong == 0,
        format!("{} of {states} states match", states - wrong),
    )
}

fn basis(suite: &[Graph]) -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for (g, k) in cases(suite, 2..=3) {
        let (v, e) = (g.vertex_count(), g.edge_count());
        let rp = build_reduced_power(g, k).unwrap();
        let t1 = theorem1_basis(g, k).unwrap();
        let card = t1.basis.len() as u64;
        let ok = card == power_betti(e, v, k).unwrap()
            && t1.basis.rank().unwrap() as u64 == card
            && t1
                .basis
                .elements()
                .iter()
                .all(|c| is_cycle(rp.graph(), c.edges()).unwrap())
            && t1.upsilon_len as u64 == upsilon_count(v, k).unwrap()
            && t1.omega_len as u64 == omega_count(betti(g).unwrap(), v, k).unwrap();
        if !ok {
            bad.push(format!("v={v} e={e} k={k}"));
        }
        n += 1;
    }
    let c5 = theorem1_basis(&Graph::cycle(5), 3).unwrap();
    let c5_ok = (c5.basis.len(), c5.upsilon_len, c5.omega_len) == (41, 26, 14);
    (
        bad.is_empty() && c5_ok,
        format!(
            "{n} cases; C5 k=3: {} elements, |upsilon| = {}, |omega| = {}{}",
            c5.basis.len(),
            c5.upsilon_len,
            c5.omega_len,
            list(&bad)
        ),
    )
}

fn minimality(suite: &[Graph]) -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for (g, k) in cases(suite, 2..=3) {
        if has_triangles(g) {
            continue;
        }
        let rp = build_reduced_power(g, k).unwrap();
        let t1 = theorem1_basis(g, k).unwrap();
        let greedy = greedy_mcb(rp.graph()).unwrap();
        if !t1.certified || t1.basis.total_length() != greedy.total_length() {
            bad.push(format!("v={} e={} k={k}", g.vertex_count(), g.edge_count()));
        }
        n += 1;
    }
    let c5 = theorem1_basis(&Graph::cycle(5), 2)
        .unwrap()
        .basis
        .total_length();
    let c3 = Graph::cycle(3);
    let c3_t1 = theorem1_basis(&c3, 2).unwrap().basis.total_length();
    let c3_greedy = greedy_mcb(build_reduced_power(&c3, 2).unwrap().graph())
        .unwrap()
        .total_length();
    (
        bad.is_empty() && c5 == 45 && (c3_t1, c3_greedy) == (15, 12),
        format!(
            "{n} triangle-free cases equal the greedy total; C5 k=2 total {c5}; \
             C3 k=2 square basis {c3_t1} vs greedy {c3_greedy}{}",
            list(&bad)
        ),
    )
}

fn square_space(suite: &[Graph]) -> Outcome {
    let mut bad = Vec::new();
    let mut squares = 0;
    for (g, k) in cases(suite, 2..=3) {
        let rp = build_reduced_power(g, k).unwrap();
        let tree = bfs_spanning_tree(g, 0).unwrap();
        let report = verify_square_space(&rp, &tree).unwrap();
        let t1 = theorem1_basis_with(&rp, &tree, None).unwrap();
        let sq: Vec<_> = t1
            .basis
            .elements()
            .iter()
            .filter(|c| c.provenance() != Provenance::Embedded)
            .collect();
        squares += sq.len();
        let dim =
            power_betti(g.edge_count(), g.vertex_count(), k).unwrap() - betti(g).unwrap() as u64;
        let ok = report.all_pass()
            && rank(sq.iter().map(|c| c.edges())).unwrap() as u64 == dim
            && sq.iter().all(|c| p_star(&rp, c.edges()).unwrap().is_zero());
        if !ok {
            bad.push(format!("v={} k={k}", g.vertex_count()));
        }
    }
    (
        bad.is_empty(),
        format!("{squares} squares: rank equals the square-space dimension and every projection is zero{}", list(&bad)),
    )
}

struct Verdict {
    cycles: usize,
    failing: Vec<String>,
    kolmogorov: bool,
    balanced: bool,
    residual: f64,
}

fn verdict(mc: &MasterChain, g: &Graph) -> Verdict {
    let tree = bfs_spanning_tree(g, 0).unwrap();
    let t1 = theorem1_basis_with(mc.power(), &tree, None).unwrap();
    let report = kolmogorov_check(mc, &t1.basis).unwrap();
    let ss = steady_state(mc, SolveMode::Float).unwrap();
    let balance = detailed_balance_check(&ss, mc);
    Verdict {
        cycles: report.checks.len(),
        failing: report
            .violations()
            .map(|c| {
                format!(
                    "{:?} {} (forward {}, backward {})",
                    c.provenance,
                    c.labels.join("-"),
                    c.forward_product,
                    c.backward_product
                )
            })
            .collect(),
        kolmogorov: report.reversible,
        balanced: balance.balanced,
        residual: ss.residual,
    }
}

fn reversible_case(lambda: &str, c: [&str; 5]) -> Outcome {
    let (g, spec) = ring(lambda, "1", "2", c);
    let mc = build_master(&g, 3, &spec).unwrap();
    let v = verdict(&mc, &g);
    let pass = v.cycles == 41 && v.kolmogorov && v.balanced && v.residual <= 1e-10;
    (
        pass,
        format!(
            "{} of {} cycle criteria hold, detailed balance {}, residual {:.1e}{}",
            v.cycles - v.failing.len(),
            v.cycles,
            if v.balanced { "holds" } else { "fails" },
            v.residual,
            list(&v.failing)
        ),
    )
}

fn uncoupled() -> Outcome {
    reversible_case("32", ["0"; 5])
}

fn equal_couplings() -> Outcome {
    let (pass, detail) = reversible_case("32", ["1"; 5]);
    let (shifted, _) = reversible_case("30", ["1"; 5]);
    (
        pass,
        format!(
            "{detail}; with lambda = 30 (so lambda + 2 alpha = 32 satisfies the ring constraint) \
             both oracles {}",
            if shifted { "pass" } else { "fail" }
        ),
    )
}

fn irreversibility() -> Outcome {
    let (g, spec) = ring("32", "1", "2", ["1", "1", "2", "1", "1"]);
    let mc = build_master(&g, 3, &spec).unwrap();
    let tree = bfs_spanning_tree(&g, 0).unwrap();
    let t1 = theorem1_basis_with(mc.power(), &tree, None).unwrap();
    let report = kolmogorov_check(&mc, &t1.basis).unwrap();
    let squares: Vec<_> = report
        .violations()
        .filter(|c| c.provenance != Provenance::Embedded)
        .collect();
    let on_ab = squares
        .iter()
        .filter(|c| c.base_edges().contains(&("a".to_string(), "b".to_string())))
        .count();
    let ss = steady_state(&mc, SolveMode::Float).unwrap();
    let balanced = detailed_balance_check(&ss, &mc).balanced;

    let model = Model {
        graph: g.clone(),
        k: 3,
        rates: spec,
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, serde_json::to_string(&model.to_json()).unwrap()).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_redpow"))
        .args(["check-reversibility", "--model"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("report.json"))
        .stdout(Stdio::null())
        .status()
        .unwrap();
    let library = check_reversibility(&model, SolveMode::Float, None).unwrap();
    let pass = !squares.is_empty()
        && on_ab == squares.len()
        && !balanced
        && library.oracles_agree
        && status.code() == Some(2);
    (
        pass,
        format!(
            "{} violating squares, {on_ab} contain base edge ab; detailed balance {}; exit code {:?}",
            squares.len(),
            if balanced { "holds" } else { "fails" },
            status.code()
        ),
    )
}

fn sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut points, mut agree, mut reversible) = (0, 0, 0);
    for trial in 0..60 {
        let mu = rng.gen_range(1..4).to_string();
        let nu = rng.gen_range(1..4).to_string();
        let coupling: [String; 5] = if trial % 3 == 0 {
            let c = format!("{}/{}", rng.gen_range(0..4), rng.gen_range(1..3));
            std::array::from_fn(|_| c.clone())
        } else {
            std::array::from_fn(|_| format!("{}/{}", rng.gen_range(0..4), rng.gen_range(1..3)))
        };
        let lambda = if trial % 2 == 0 {
            let target = r(&nu).pow(5) / r(&mu).pow(4) - r(&coupling[0]) * r("2");
            if target > r("0") {
                target.to_string()
            } else {
                rng.gen_range(1..50).to_string()
            }
        } else {
            rng.gen_range(1..50).to_string()
        };
        let c: [&str; 5] = std::array::from_fn(|i| coupling[i].as_str());
        let (g, spec) = ring(&lambda, &mu, &nu, c);
        let mc = build_master(&g, 3, &spec).unwrap();
        let v = verdict(&mc, &g);
        points += 1;
        agree += usize::from(v.kolmogorov == v.balanced);
        reversible += usize::from(v.kolmogorov);
    }
    (
        points >= 50 && agree == points,
        format!("{agree} of {points} points agree ({reversible} reversible)"),
    )
}

fn master_rates() -> Outcome {
    let (lambda, mu, nu) = (32, 1, 2);
    let (alpha, beta, gamma, _delta, epsilon) = (3, 5, 7, 11, 13);
    let (g, spec) = ring("32", "1", "2", ["3", "5", "7", "11", "13"]);
    let mc = build_master(&g, 3, &spec).unwrap();
    let p = mc.power();
    let expected = [
        ("ad^2", "abd", 2 * mu, "2 mu"),
        ("c^3", "c^2d", 3 * nu, "3 nu"),
        ("a^2c", "a^2d", nu, "nu"),
        (
            "abe",
            "b^2e",
            lambda + beta + epsilon,
            "lambda + beta + epsilon",
        ),
        (
            "a^3",
            "a^2b",
            3 * (lambda + 2 * alpha),
            "3 (lambda + 2 alpha)",
        ),
        (
            "a^2c",
            "abc",
            2 * (lambda + alpha + gamma),
            "2 (lambda + alpha + gamma)",
        ),
    ];
    let mut ok = 0;
    let mut lines = Vec::new();
    for (x, y, want, text) in expected {
        let (xi, yi) = (p.state_by_label(x).unwrap(), p.state_by_label(y).unwrap());
        let got = mc.rate(xi, yi).map(|q| q.to_string());
        let hit = got.as_deref() == Some(want.to_string().as_str());
        ok += usize::from(hit);
        lines.push(format!(
            "{x}->{y} = {} (expected {text} = {want}){}",
            got.as_deref().unwrap_or("no transition"),
            if hit { "" } else { " MISMATCH" }
        ));
    }
    (
        ok == expected.len(),
        format!(
            "at lambda={lambda}, mu={mu}, nu={nu}, couplings 3,5,7,11,13: {ok} of 6 reproduced; {}",
            lines.join("; ")
        ),
    )
}
