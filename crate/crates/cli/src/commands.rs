use std::io::Write;

use anyhow::{bail, Context, Result};
use normwalk::bits::BitSource;
use normwalk::continuous::{
    chain_defect, hausdorff_distance, is_pyramidal_extension, search_pyramidal_chain, HausdorffDistance,
};
use normwalk::generators::{
    generate_cluster, hexagon_from_params, survey, ClusterSpec, GeneratedPolytope, HexagonParams, SurveyChecks,
    SurveyStats,
};
use normwalk::io::{format_rational, PolytopeJson};
use normwalk::normality::{caratheodory_bounds, check, icp_check_bounded, is_smooth, is_unimodular_simplex, ucp_falsify};
use normwalk::poset::{
    build_atlas, enumerate_jumps_down, enumerate_jumps_to_height, enumerate_jumps_up_with_stats, height_bound,
    walk, AtlasBox, AtlasOptions, Strategy,
};
use normwalk::{Error, LatticePolytope};
use serde_json::{json, Value};

use crate::support::{
    guard, json_line, open_source, provenance, read_lattice, read_rational, require_json, require_source, writer,
    Status,
};
use crate::{
    AtlasArgs, CheckArgs, Cli, Command, Format, GenArgs, JumpsArgs, PyramidArgs, StrategyArg, SurveyArgs, WalkArgs,
};

pub fn run(cli: &Cli) -> Result<Status> {
    if cli.threads == 0 {
        bail!(Error::InvalidArgument("--threads must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("building thread pool")?;
    pool.install(|| match &cli.command {
        Command::Check(a) => run_check(cli, a),
        Command::Jumps(a) => run_jumps(cli, a),
        Command::Walk(a) => run_walk(cli, a),
        Command::Atlas(a) => run_atlas(cli, a),
        Command::Gen(a) => run_gen(cli, a),
        Command::Survey(a) => run_survey(cli, a),
        Command::Pyramid(a) => run_pyramid(cli, a),
    })
}

fn polytope_json(p: &LatticePolytope) -> Value {
    serde_json::to_value(PolytopeJson::from_polytope(p)).expect("serializable")
}

const NOT_IC: &str = "polytope is not integrally closed";

/// Largest box scanned by the decomposition test.
fn check_box(p: &LatticePolytope) -> Result<u128> {
    let c = p.dim().saturating_sub(1).max(2) as u64;
    Ok(p.dilate(c)?.scan_box_size())
}

fn run_check(cli: &Cli, a: &CheckArgs) -> Result<Status> {
    require_json(cli, "check")?;
    let p = read_lattice(&a.polytope)?;
    guard("normality check", check_box(&p)?)?;
    let report = check(&p);
    let mut falsified = !report.integrally_closed || !report.normal_wrt_lambda;
    let smooth = if p.is_full_dimensional() {
        Some(is_smooth(&p)?)
    } else {
        None
    };
    let mut out = json!({
        "polytope": polytope_json(&p),
        "dim": p.dim(),
        "lattice_points": p.lattice_point_count(),
        "normalized_volume": p.normalized_volume().to_string(),
        "integrally_closed": report.integrally_closed,
        "normal_wrt_lambda": report.normal_wrt_lambda,
        "integrally_closed_witness": report.integrally_closed_witness,
        "normal_witness": report.normal_witness,
        "unimodular_simplex": is_unimodular_simplex(&p),
        "smooth": smooth,
    });
    if let Some(r) = a.icp_r {
        let c_max = a.icp_cmax.expect("clap enforces --icp-cmax");
        guard("integral Carathéodory check", p.dilate(c_max)?.scan_box_size())?;
        out["icp"] = if report.integrally_closed {
            let icp = icp_check_bounded(&p, r, c_max)?;
            falsified |= !icp.holds;
            serde_json::to_value(icp)?
        } else {
            json!({ "skipped": NOT_IC })
        };
    }
    if a.cr {
        let c_max = a.icp_cmax.expect("clap enforces --icp-cmax");
        guard("Carathéodory rank bounds", p.dilate(c_max)?.scan_box_size())?;
        out["caratheodory"] = if report.integrally_closed {
            serde_json::to_value(caratheodory_bounds(&p, c_max)?)?
        } else {
            json!({ "skipped": NOT_IC })
        };
    }
    if let Some(trials) = a.ucp_trials {
        let mut seed = match &a.seed_file {
            Some(path) => Some(BitSource::from_file(path)?),
            None => None,
        };
        if let Some(s) = &seed {
            out["provenance"] = provenance(s);
        }
        let ucp = ucp_falsify(&p, trials, seed.as_mut())?;
        falsified |= ucp.counterexample.is_some();
        out["ucp"] = json!({
            "counterexample": ucp.counterexample,
            "samples_tested": ucp.samples_tested,
            "unimodular_simplices": ucp.unimodular_simplices,
            "bits_consumed": seed.as_ref().map(|s| s.cursor()),
        });
    }
    let mut w = writer(cli)?;
    json_line(&mut *w, &out)?;
    w.flush()?;
    Ok(if falsified { Status::Falsified } else { Status::Ok })
}

fn run_jumps(cli: &Cli, a: &JumpsArgs) -> Result<Status> {
    let p = read_lattice(&a.polytope)?;
    let mut w = writer(cli)?;
    if a.down {
        guard("down steps", p.scan_box_size())?;
        let steps = enumerate_jumps_down(&p)?;
        match cli.format {
            Format::Json => json_line(
                &mut *w,
                &json!({
                    "polytope": polytope_json(&p),
                    "down": steps.iter().map(|s| json!({
                        "point": s.point,
                        "pyramid": s.pyramid,
                        "base": polytope_json(&s.base),
                    })).collect::<Vec<_>>(),
                }),
            )?,
            Format::Csv => {
                let mut c = csv::Writer::from_writer(&mut *w);
                c.write_record(["point", "pyramid", "base_vertices"])?;
                for s in &steps {
                    c.write_record([coords(&s.point), s.pyramid.to_string(), s.base.vertices().len().to_string()])?;
                }
                c.flush()?;
            }
        }
        w.flush()?;
        return Ok(Status::Ok);
    }
    let h = match a.max_height {
        Some(h) => h,
        None => height_bound(&p)?,
    };
    guard("jump candidates", p.dilate(h + 1)?.scan_box_size())?;
    let (jumps, stats) = match a.max_height {
        Some(h) => enumerate_jumps_to_height(&p, h)?,
        None => enumerate_jumps_up_with_stats(&p)?,
    };
    match cli.format {
        Format::Json => json_line(
            &mut *w,
            &json!({
                "polytope": polytope_json(&p),
                "stats": stats,
                "jumps": jumps.iter().map(|j| json!({
                    "point": j.point,
                    "height": j.height.to_string(),
                    "volume": j.volume.to_string(),
                    "target": polytope_json(&j.target),
                })).collect::<Vec<_>>(),
            }),
        )?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut *w);
            c.write_record(["point", "height", "volume"])?;
            for j in &jumps {
                c.write_record([coords(&j.point), j.height.to_string(), j.volume.to_string()])?;
            }
            c.flush()?;
        }
    }
    w.flush()?;
    Ok(Status::Ok)
}

fn coords(p: &normwalk::LatticePoint) -> String {
    p.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn run_walk(cli: &Cli, a: &WalkArgs) -> Result<Status> {
    require_json(cli, "walk")?;
    let p = read_lattice(&a.polytope)?;
    guard("walk start", p.dilate(height_bound(&p)? + 1)?.scan_box_size())?;
    let mut src = match a.strategy {
        StrategyArg::Greedy => open_source(&a.source)?,
        StrategyArg::Random => Some(require_source(&a.source)?),
    };
    let mut w = writer(cli)?;
    json_line(
        &mut *w,
        &json!({
            "start": polytope_json(&p),
            "strategy": match a.strategy { StrategyArg::Greedy => "greedy", StrategyArg::Random => "random" },
            "budget": a.budget,
            "provenance": src.as_ref().map(provenance),
        }),
    )?;
    let strategy = match (&a.strategy, src.as_mut()) {
        (StrategyArg::Random, Some(s)) => Strategy::Random(s),
        _ => Strategy::Greedy,
    };
    let trace = walk(&p, strategy, a.budget)?;
    let volumes = trace.volumes();
    for (i, s) in trace.steps.iter().enumerate() {
        json_line(
            &mut *w,
            &json!({
                "step": i + 1,
                "point": s.jump.point,
                "height": s.jump.height.to_string(),
                "volume_added": s.jump.volume.to_string(),
                "volume": volumes[i + 1].to_string(),
                "options": s.options,
                "vertices": s.jump.target.vertices(),
            }),
        )?;
    }
    let s = a.zeta_s;
    json_line(
        &mut *w,
        &json!({
            "terminated": trace.terminated,
            "steps": trace.steps.len(),
            "volumes": volumes.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "zeta": {
                "s": s,
                "from_p0": format_rational(&trace.zeta_partial(s, 0)),
                "from_p1": format_rational(&trace.zeta_partial(s, 1)),
            },
            "bits_consumed": src.as_ref().map(|b| b.cursor()),
        }),
    )?;
    w.flush()?;
    Ok(Status::Ok)
}

fn run_atlas(cli: &Cli, a: &AtlasArgs) -> Result<Status> {
    require_json(cli, "atlas")?;
    if a.radius < 0 || a.dim == 0 {
        bail!(Error::InvalidArgument("atlas needs --dim >= 1 and --radius >= 0".into()));
    }
    let region = if a.centered {
        AtlasBox::centered(a.radius)
    } else {
        AtlasBox::corner(a.radius)
    };
    let side = (region.hi - region.lo + 1) as u128;
    guard("atlas box", side.checked_pow(a.dim as u32).unwrap_or(u128::MAX))?;
    let opts = AtlasOptions {
        element_cap: a.element_cap,
        ..AtlasOptions::default()
    };
    let atlas = build_atlas(a.dim, region, opts)?;
    let mut w = writer(cli)?;
    json_line(&mut *w, &atlas.to_json())?;
    w.flush()?;
    Ok(Status::Ok)
}

/// Generated polytopes in stream order, plus the source afterwards.
fn generate(a: &GenArgs) -> Result<(Vec<GeneratedPolytope>, BitSource, Value)> {
    let mut src = require_source(&a.source)?;
    let prov = provenance(&src);
    let mut out = Vec::new();
    if a.hexagon {
        for i in 0..a.count {
            let offset = src.cursor();
            let params = HexagonParams::random(a.dim as usize, &mut src, a.a_bound, !a.random_positions)?;
            let points = params.points();
            let polytope = hexagon_from_params(&params)?;
            out.push(GeneratedPolytope {
                degenerate: polytope.vertices().len() < points.len(),
                polytope,
                points,
                cluster: 0,
                index: i as u64,
                offset,
            });
        }
        return Ok((out, src, prov));
    }
    let n_end = a.n_end.unwrap_or(a.n_start);
    if n_end < a.n_start {
        bail!(Error::InvalidArgument("--n-end must be at least --n-start".into()));
    }
    for n in a.n_start..=n_end {
        let spec = ClusterSpec::new(n, a.dim, a.max_vertices, a.c_exponent)?;
        out.extend(generate_cluster(&mut src, spec)?);
    }
    Ok((out, src, prov))
}

fn generated_json(g: &GeneratedPolytope) -> Value {
    json!({
        "cluster": g.cluster,
        "index": g.index,
        "offset": g.offset,
        "degenerate": g.degenerate,
        "polytope": polytope_json(&g.polytope),
    })
}

fn run_gen(cli: &Cli, a: &GenArgs) -> Result<Status> {
    require_json(cli, "gen")?;
    let (stream, src, prov) = generate(a)?;
    let mut w = writer(cli)?;
    json_line(&mut *w, &json!({ "provenance": prov }))?;
    for g in &stream {
        json_line(&mut *w, &generated_json(g))?;
    }
    json_line(
        &mut *w,
        &json!({
            "total": stream.len(),
            "degenerate": stream.iter().filter(|g| g.degenerate).count(),
            "bits_consumed": src.cursor(),
        }),
    )?;
    w.flush()?;
    Ok(Status::Ok)
}

fn survey_json(stats: &SurveyStats, prov: &Value, bits: u64) -> Value {
    json!({
        "provenance": prov,
        "bits_consumed": bits,
        "counts": stats.counts,
        "per_cluster": stats.per_cluster,
        "log": stats.log,
    })
}

fn run_survey(cli: &Cli, a: &SurveyArgs) -> Result<Status> {
    let checks = SurveyChecks::from_names(a.checks.split(',').filter(|s| !s.trim().is_empty()))?;
    let (stream, src, prov) = generate(&a.gen)?;
    for g in &stream {
        guard(format!("survey of polytope {}:{}", g.cluster, g.index), check_box(&g.polytope)?)?;
    }
    let stats = survey(&stream, checks)?;
    let summary = survey_json(&stats, &prov, src.cursor());
    let mut w = writer(cli)?;
    match cli.format {
        Format::Json => json_line(&mut *w, &summary)?,
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut *w);
            c.write_record(["cluster", "n", "total", "normal", "minimal", "maximal"])?;
            for (i, row) in stats.per_cluster.iter().enumerate() {
                let k = &row.counts;
                c.write_record([i as u64, row.cluster, k.total, k.normal, k.minimal, k.maximal].map(|x| x.to_string()))?;
            }
            c.flush()?;
            if let Some(path) = &a.summary {
                std::fs::write(path, serde_json::to_string(&summary)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    w.flush()?;
    Ok(Status::Ok)
}

fn distance_json(d: &HausdorffDistance, digits: u32) -> Value {
    let (lo, hi) = d.enclosure(digits);
    json!({
        "squared": format_rational(&d.squared),
        "exact": d.exact().map(|x| format_rational(&x)),
        "enclosure": [format_rational(&lo), format_rational(&hi)],
        "decimal": d.to_decimal(digits),
    })
}

fn run_pyramid(cli: &Cli, a: &PyramidArgs) -> Result<Status> {
    require_json(cli, "pyramid")?;
    let mut w = writer(cli)?;
    if let Some(paths) = &a.mode.check_extension {
        let p = read_rational(&paths[0])?;
        let q = read_rational(&paths[1])?;
        let v = is_pyramidal_extension(&p, &q)?;
        json_line(
            &mut *w,
            &json!({
                "holds": v.holds,
                "reason": v.reason,
                "kind": v.witness.as_ref().map(|x| x.kind),
                "apex": v.witness.as_ref().map(|x| &x.apex),
                "base": v.witness.as_ref().map(|x| &x.base),
                "delta": v.witness.as_ref().map(|x| &x.delta),
                "distance": distance_json(&hausdorff_distance(&p, &q)?, a.digits),
            }),
        )?;
        w.flush()?;
        return Ok(if v.holds { Status::Ok } else { Status::Falsified });
    }
    let paths = a.mode.search_chain.as_ref().expect("clap requires one mode");
    let p = read_rational(&paths[0])?;
    let q = read_rational(&paths[1])?;
    let found = search_pyramidal_chain(&p, &q, a.budget)?;
    let out = match &found {
        Some(c) => {
            let d = chain_defect(c, a.digits)?;
            json!({
                "found": true,
                "steps": c.len(),
                "chain": c.to_json(),
                "defect": {
                    "terms": d.terms.iter().map(|t| distance_json(t, a.digits)).collect::<Vec<_>>(),
                    "enclosure": [format_rational(&d.lower), format_rational(&d.upper)],
                    "exact": d.exact.as_ref().map(format_rational),
                    "admissible": d.admissible,
                },
            })
        }
        None => json!({ "found": false, "budget": a.budget }),
    };
    json_line(&mut *w, &out)?;
    w.flush()?;
    Ok(if found.is_some() { Status::Ok } else { Status::Falsified })
}
