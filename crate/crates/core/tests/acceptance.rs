//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Run with `cargo test -p normwalk --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use normwalk::bits::BitSource;
use normwalk::cone::RationalCone;
use normwalk::continuous::{is_pyramidal_extension, search_pyramidal_chain, verify_chain, RationalPolytope};
use normwalk::generators::{generate_cluster, hexagon_from_params, theta, ClusterSpec, HexagonParams};
use normwalk::io::write_polytope;
use normwalk::normality::{self, caratheodory_bounds, is_integrally_closed};
use normwalk::poset::{build_atlas, enumerate_jumps_up_with_stats, walk, AtlasBox, AtlasOptions, Strategy};
use normwalk::{LatticePolytope, RationalPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn polygons_are_integrally_closed() -> Outcome {
    let mut r = rng(1);
    for i in 0..200 {
        let n = r.gen_range(3..=8);
        let p = random_full(&mut r, n, 2, -5, 5);
        ensure!(is_integrally_closed(&p), "polygon {i} {:?} not integrally closed", p.vertices());
    }
    Ok("200 polygons".into())
}

fn dilates_are_integrally_closed() -> Outcome {
    let mut r = rng(2);
    for i in 0..50 {
        let n = r.gen_range(4..=8);
        let p = random_full(&mut r, n, 3, 0, 3);
        for c in [2, 3] {
            let q = p.dilate(c).map_err(|e| e.to_string())?;
            ensure!(is_integrally_closed(&q), "dilate {c} of polytope {i} {:?}", p.vertices());
        }
    }
    Ok("50 polytopes, c = 2, 3".into())
}

fn empty_simplex() -> Outcome {
    let p = LatticePolytope::from_i64s(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).map_err(|e| e.to_string())?;
    let rep = normality::check(&p);
    ensure!(!rep.integrally_closed, "reported integrally closed");
    ensure!(rep.normal_wrt_lambda, "reported not normal");
    let w = rep.integrally_closed_witness.ok_or("no witness")?;
    ensure!(w.c == 2 && to_i64(&w.z) == vec![1, 1, 1], "witness c={} z={:?}", w.c, to_i64(&w.z));
    Ok("witness (2, (1,1,1))".into())
}

fn hilbert_bases_match_oracle() -> Outcome {
    let mut r = rng(4);
    let mut sizes = 0;
    for i in 0..100 {
        let d = r.gen_range(2..=3);
        let n = r.gen_range(d..=d + 1);
        let gens = random_cone(&mut r, d, n, 6);
        let cone = RationalCone::new(gens.iter().map(|g| pt(g))).map_err(|e| e.to_string())?;
        let ours: Vec<Vec<i64>> = cone.hilbert_basis().elements.iter().map(to_i64).collect();
        let oracle = hilbert_basis_oracle(&gens);
        ensure!(ours == oracle, "cone {i} {gens:?}: {ours:?} vs {oracle:?}");
        sizes += ours.len();
    }
    Ok(format!("100 cones, {sizes} basis elements in total"))
}

fn jumps_are_sound_and_complete() -> Outcome {
    let mut r = rng(5);
    let mut done = 0;
    let (mut jumps_seen, mut cands_seen) = (0, 0);
    while done < 20 {
        let n = r.gen_range(4..=6);
        let p = random_full(&mut r, n, 3, 0, 2);
        if !is_integrally_closed(&p) {
            continue;
        }
        let (jumps, stats) = enumerate_jumps_up_with_stats(&p).map_err(|e| e.to_string())?;
        let bound = stats.height_bound;
        for j in &jumps {
            ensure!(j.is_valid(), "invalid jump {:?} from {:?}", j.point, p.vertices());
            ensure!(j.height <= BigInt::from(bound), "height {} above bound {bound}", j.height);
        }
        let (lo, hi) = relaxed_box(&p, bound as i64);
        let mut per = vec![0usize; bound as usize];
        let mut brute = Vec::new();
        let n_pts = p.lattice_point_count();
        for z in box_points(&lo, &hi) {
            let z = pt(&z);
            let dist = p.facets().iter().map(|f| f.slack(z.coords())).min().expect("facets");
            if dist < BigInt::zero() && -&dist <= BigInt::from(bound) {
                let j: usize = (-dist).try_into().expect("small");
                per[j - 1] += 1;
                let q = p.with_point(&z).map_err(|e| e.to_string())?;
                if q.lattice_point_count() == n_pts + 1 && is_integrally_closed(&q) {
                    brute.push(z);
                }
            }
        }
        ensure!(stats.candidates_per_height == per, "candidates {:?} vs brute {per:?}", stats.candidates_per_height);
        brute.sort();
        let found: Vec<_> = jumps.iter().map(|j| j.point.clone()).collect();
        ensure!(found == brute, "jump set differs from brute force for {:?}", p.vertices());
        jumps_seen += jumps.len();
        cands_seen += per.iter().sum::<usize>();
        done += 1;
    }
    Ok(format!("20 polytopes, {jumps_seen} jumps among {cands_seen} candidates"))
}

fn greedy_walk_is_deterministic() -> Outcome {
    let cube = LatticePolytope::unit_cube(3);
    let a = walk(&cube, Strategy::Greedy, 10).map_err(|e| e.to_string())?;
    let b = walk(&cube, Strategy::Greedy, 10).map_err(|e| e.to_string())?;
    ensure!(a == b, "walks differ");
    ensure!(a.steps.len() == 10, "walk stopped after {} steps", a.steps.len());
    let hand = a
        .chain
        .iter()
        .map(|p| BigRational::new(BigInt::one(), p.normalized_volume()))
        .fold(BigRational::zero(), |s, x| s + x);
    ensure!(a.zeta_partial(1, 0) == hand, "zeta {} vs {hand}", a.zeta_partial(1, 0));
    Ok(format!("zeta(1) = {hand}"))
}

fn pipeline_is_bit_exact() -> Outcome {
    let expected = [36u64, 144, 324, 576];
    let mut r = rng(7);
    let bytes: Vec<u8> = (0..200).map(|_| r.gen()).collect();
    let run = || -> Result<(Vec<u64>, String), String> {
        let mut src = BitSource::from_bytes(bytes.clone());
        let mut used = Vec::new();
        let mut text = String::new();
        for n in 1..=4 {
            let spec = ClusterSpec::new(n, 2, 3, 1).map_err(|e| e.to_string())?;
            let before = src.cursor();
            for g in generate_cluster(&mut src, spec).map_err(|e| e.to_string())? {
                text.push_str(&write_polytope(&g.polytope));
                text.push('\n');
            }
            used.push(src.cursor() - before);
            ensure!(spec.bits() == n * 2 * 3 * (n * 2 * 3), "spec bits {}", spec.bits());
        }
        Ok((used, text))
    };
    let (used, first) = run()?;
    let (_, second) = run()?;
    ensure!(used == expected, "consumed {used:?}");
    ensure!(first.as_bytes() == second.as_bytes(), "replay differs");
    Ok(format!("bits {used:?}, replay identical ({} bytes)", first.len()))
}

fn theta_and_hexagons() -> Outcome {
    ensure!((theta(1), theta(2), theta(4)) == (37, 41, 58), "theta {:?}", (theta(1), theta(2), theta(4)));
    for d in [2, 3] {
        let params = HexagonParams::zero(d).map_err(|e| e.to_string())?;
        let z = params.z_matrix();
        for (i, row) in z.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                ensure!(*x == BigInt::from(i64::from(i == j)), "z-matrix entry ({i},{j}) = {x}");
            }
        }
        let p = hexagon_from_params(&params).map_err(|e| e.to_string())?;
        ensure!(is_integrally_closed(&p), "zero hexagon for d={d} not integrally closed");
    }
    Ok("theta 37/41/58, zero hexagons integrally closed".into())
}

fn unit_square_atlas() -> Outcome {
    let a = build_atlas(2, AtlasBox::corner(1), AtlasOptions::default()).map_err(|e| e.to_string())?;
    ensure!(a.elements.len() == 15, "{} elements", a.elements.len());
    for &(i, j) in &a.hasse_edges {
        let (p, q) = (&a.elements[i], &a.elements[j]);
        let pp: BTreeSet<_> = p.lattice_points().into_iter().collect();
        let qq: BTreeSet<_> = q.lattice_points().into_iter().collect();
        ensure!(pp.is_subset(&qq) && qq.len() == pp.len() + 1, "edge {i} -> {j} is not +1 point");
    }
    ensure!(a.betti().first() == Some(&1), "betti {:?}", a.betti());
    Ok(format!("15 elements, {} Hasse edges, betti {:?}", a.hasse_edges.len(), a.betti()))
}

fn rp(pts: &[&[i64]]) -> Result<RationalPolytope, String> {
    RationalPolytope::from_i64s(pts).map_err(|e| e.to_string())
}

fn pyramidal_checkers() -> Outcome {
    let tri = rp(&[&[0, 0], &[1, 0], &[0, 1]])?;
    let sq = rp(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])?;
    let flat = rp(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]])?;
    let tet = rp(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])?;
    let kite = rp(&[&[0, 0], &[1, 0], &[0, 1], &[2, 2]])?;
    let verdicts = [
        is_pyramidal_extension(&tri, &sq).map_err(|e| e.to_string())?.holds,
        is_pyramidal_extension(&flat, &tet).map_err(|e| e.to_string())?.holds,
        is_pyramidal_extension(&sq, &kite).map_err(|e| e.to_string())?.holds,
    ];
    ensure!(verdicts == [true, true, false], "verdicts {verdicts:?}");

    let mut r = rng(10);
    let mut steps = 0;
    for i in 0..20 {
        let n = r.gen_range(3..=7);
        let q = random_full(&mut r, n, 2, -6, 6);
        // P: a triangle on random rational points of Q
        let lp = q.lattice_points();
        let p = loop {
            let pts: Vec<RationalPoint> = (0..3)
                .map(|_| {
                    let a = &lp[r.gen_range(0..lp.len())];
                    let b = &lp[r.gen_range(0..lp.len())];
                    RationalPoint::new(
                        a.coords().iter().zip(b.coords()).map(|(x, y)| BigRational::new(x + y, 2.into())).collect(),
                    )
                })
                .collect();
            let p = RationalPolytope::new(pts).map_err(|e| e.to_string())?;
            if p.dim() == 2 {
                break p;
            }
        };
        let q = RationalPolytope::from_lattice(&q);
        let chain = search_pyramidal_chain(&p, &q, 64)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("pair {i}: no chain from {:?} to {:?}", p.vertex_strings(), q.vertex_strings()))?;
        ensure!(verify_chain(&chain).map_err(|e| e.to_string())?, "pair {i}: chain does not verify");
        ensure!(chain.start() == &p && chain.end() == &q, "pair {i}: wrong endpoints");
        steps += chain.len();
    }
    Ok(format!("verdicts true/true/false, 20 chains, {steps} steps"))
}

fn caratheodory_envelope() -> Outcome {
    let mut r = rng(11);
    let mut seen = Vec::new();
    let mut done = 0;
    while done < 10 {
        let d = if done < 5 { 2 } else { 3 };
        let n = r.gen_range(d + 1..=d + 3);
        let p = random_full(&mut r, n, d, 0, 2);
        if !is_integrally_closed(&p) {
            continue;
        }
        let cert = caratheodory_bounds(&p, 5).map_err(|e| e.to_string())?;
        ensure!(
            (d + 1..=2 * d).contains(&cert.lower_bound),
            "lower bound {} outside [{}, {}] for {:?}",
            cert.lower_bound,
            d + 1,
            2 * d,
            p.vertices()
        );
        seen.push(cert.lower_bound);
        done += 1;
    }
    for d in 1..=3 {
        let s = LatticePolytope::unimodular_simplex(d);
        let cert = caratheodory_bounds(&s, 5).map_err(|e| e.to_string())?;
        ensure!(cert.lower_bound == d + 1, "simplex of dim {d}: lower bound {}", cert.lower_bound);
    }
    Ok(format!("lower bounds {seen:?}; simplices exact"))
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "random polygons are integrally closed", limit: Duration::from_secs(10), run: polygons_are_integrally_closed },
        Criterion { name: "dilates 2 and 3 of random 3-polytopes are integrally closed", limit: Duration::from_secs(300), run: dilates_are_integrally_closed },
        Criterion { name: "empty simplex: not integrally closed, normal", limit: Duration::from_secs(1), run: empty_simplex },
        Criterion { name: "Hilbert bases equal the saturation oracle", limit: Duration::from_secs(120), run: hilbert_bases_match_oracle },
        Criterion { name: "jumps sound, heights bounded, candidates complete", limit: Duration::from_secs(600), run: jumps_are_sound_and_complete },
        Criterion { name: "greedy walk determinism and zeta", limit: Duration::from_secs(600), run: greedy_walk_is_deterministic },
        Criterion { name: "generation pipeline bit counts and replay", limit: Duration::from_secs(60), run: pipeline_is_bit_exact },
        Criterion { name: "theta table and zero hexagons", limit: Duration::from_secs(60), run: theta_and_hexagons },
        Criterion { name: "atlas of [0,1]^2", limit: Duration::from_secs(30), run: unit_square_atlas },
        Criterion { name: "pyramidal fixtures and polygon chains", limit: Duration::from_secs(120), run: pyramidal_checkers },
        Criterion { name: "Caratheodory rank envelope", limit: Duration::from_secs(600), run: caratheodory_envelope },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let dt = t0.elapsed();
        let result = match result {
            Ok(msg) if dt > c.limit => Err(format!("{msg}; took {dt:.2?}, limit {:?}", c.limit)),
            other => other,
        };
        match result {
            Ok(msg) => println!("PASS {:>2} {} ({dt:.2?}): {msg}", i + 1, c.name),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {} ({dt:.2?}): {msg}", i + 1, c.name);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
