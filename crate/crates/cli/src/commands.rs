use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use tevp_core::charfn::CharacteristicContext;
use tevp_core::completion::{complete_spectrum_with, complete_then_invert, default_window};
use tevp_core::index::parse_two_columns;
use tevp_core::inverse::{
    delta_asymptotic, delta_density, invert, recover_delta, spread, uniform_grid, DeltaSearchOptions, EigenvalueInput,
    InverseOptions, InverseSolution, DEFAULT_DELTA_MAX, DEFAULT_DELTA_MIN, DEFAULT_DELTA_POINTS, MAX_SEARCH_ORDERS,
};
use tevp_core::nsbf::select_truncation;
use tevp_core::roots::{find_zeros, SearchWindow, Spectrum};
use tevp_core::shooting::{eigenvalues_shooting, liouville_factor, ShootingConfig, ShootingOracle};
use tevp_core::{liouville_transform, RefractiveIndexModel, TevpError};

use crate::output::{config_hash, Output};
use crate::{
    Baseline, Cli, Command, CompleteArgs, DeltaArgs, DirectArgs, Failure, IndexArgs, InvertArgs, OracleArgs,
    SearchArgs, Selection, SpectrumArgs, WindowArgs,
};

const DEFAULT_RE_MAX: f64 = 40.0;
const DEFAULT_STRIP: f64 = 2.0;
const ERROR_POINTS: usize = 200;

pub fn dispatch(cli: &Cli, args: &[OsString]) -> Result<(), Failure> {
    let (index, spectrum) = match &cli.command {
        Command::Direct(a) => (&a.index, None),
        Command::Oracle(a) => (&a.index, None),
        Command::Delta(a) => (&a.index, Some(&a.spectrum)),
        Command::Invert(a) => (&a.index, Some(&a.spectrum)),
        Command::Complete(a) => (&a.index, Some(&a.spectrum)),
    };
    let inputs: Vec<&Path> = index
        .index_csv
        .as_deref()
        .into_iter()
        .chain(spectrum.and_then(|s| s.eigenvalues.as_deref()))
        .collect();
    let mut out = Output::new(&cli.out, config_hash(args, &inputs)?)?;
    let summary = match &cli.command {
        Command::Direct(a) => direct(a, &mut out)?,
        Command::Delta(a) => delta(a, &mut out)?,
        Command::Invert(a) => invert_cmd(a, &mut out)?,
        Command::Complete(a) => complete(a, &mut out)?,
        Command::Oracle(a) => oracle(a, &mut out)?,
    };
    let mut summary = summary;
    summary["config_sha256"] = json!(out.hash());
    summary["outputs"] = json!(out.written());
    let text = serde_json::to_string_pretty(&summary).expect("json values serialise");
    // a closed stdout is not an error of the computation
    let _ = writeln!(std::io::stdout(), "{text}");
    Ok(())
}

fn model(index: &IndexArgs) -> Result<Option<RefractiveIndexModel>, Failure> {
    let m = match (&index.example, &index.expr, &index.index_csv) {
        (Some(id), _, _) => Some(RefractiveIndexModel::named(id.parse()?)),
        (_, Some(src), _) => Some(RefractiveIndexModel::from_expression(src)?),
        (_, _, Some(path)) => Some(RefractiveIndexModel::from_csv(path)?),
        _ => None,
    };
    Ok(m)
}

fn require_model(index: &IndexArgs) -> Result<RefractiveIndexModel, Failure> {
    model(index)?.ok_or_else(|| Failure::validation("an index is required: --example, --expr or --index-csv".into()))
}

fn window(args: &WindowArgs, fallback: SearchWindow) -> SearchWindow {
    SearchWindow::new(
        0.0,
        args.re_max.unwrap_or(fallback.re_max),
        args.strip.unwrap_or(fallback.im_bound),
    )
    .with_min_box(args.min_box)
}

/// Truncated NSBF characteristic function of `m`.
fn nsbf_context(m: &RefractiveIndexModel, index: &IndexArgs) -> Result<CharacteristicContext, Failure> {
    let data = liouville_transform(m, index.grid_size)?;
    let (_, _, table) = select_truncation(&data, index.n_max)?;
    Ok(CharacteristicContext::from_table(table, m.n_at_1(), m.dn_at_1())?)
}

fn spectrum_of(ctx: &CharacteristicContext, w: &SearchWindow) -> Result<Spectrum, TevpError> {
    let ctx = ctx.clone().with_strip_bound(w.im_bound);
    find_zeros(&|k| ctx.eval_d0n(k), w)
}

fn input(spec: &SpectrumArgs, index: &IndexArgs, m: Option<&RefractiveIndexModel>) -> Result<EigenvalueInput, Failure> {
    let eigs = match &spec.eigenvalues {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
            let (re, im) = parse_two_columns(&text)?;
            re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect()
        }
        None => {
            let m =
                m.ok_or_else(|| Failure::validation("give --eigenvalues or an index to compute them from".into()))?;
            let ctx = nsbf_context(m, index)?;
            let s = spectrum_of(&ctx, &SearchWindow::new(0.0, spec.source_re_max, spec.source_strip))?;
            select(&s, spec.select, spec.count)
        }
    };
    let n1 = spec.n1.or(m.map(|m| m.n_at_1()));
    let dn1 = spec.dn1.or(m.map(|m| m.dn_at_1()));
    let (Some(n1), Some(dn1)) = (n1, dn1) else {
        return Err(Failure::validation(
            "n(1) and n'(1) are needed: give --n1 and --dn1 or an index".into(),
        ));
    };
    Ok(EigenvalueInput::new(eigs, n1, dn1)?)
}

fn select(s: &Spectrum, how: Selection, count: usize) -> Vec<C64> {
    let mut pool: Vec<C64> = match how {
        Selection::Lowest => return s.lowest_by_modulus(count),
        Selection::Real => s.eigenvalues.iter().copied().filter(|k| k.im == 0.0).collect(),
        Selection::Complex => s.eigenvalues.iter().copied().filter(|k| k.im > 0.0).collect(),
    };
    pool.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    pool.truncate(count);
    pool
}

fn inverse_options(search: &SearchArgs, delta: Option<f64>, zeta_points: usize) -> InverseOptions {
    let mut opts = InverseOptions {
        delta,
        refinements: search.refinements,
        zeta_points,
        ..InverseOptions::default()
    };
    if !search.orders.is_empty() {
        opts.orders = search.orders.clone();
    }
    opts.delta_grid = explicit_grid(search);
    opts
}

fn explicit_grid(search: &SearchArgs) -> Option<Vec<f64>> {
    if search.delta_min.is_none() && search.delta_max.is_none() && search.delta_points.is_none() {
        return None;
    }
    Some(uniform_grid(
        search.delta_min.unwrap_or(DEFAULT_DELTA_MIN),
        search.delta_max.unwrap_or(DEFAULT_DELTA_MAX),
        search.delta_points.unwrap_or(DEFAULT_DELTA_POINTS),
    ))
}

fn true_delta(m: Option<&RefractiveIndexModel>, index: &IndexArgs) -> Result<Option<f64>, Failure> {
    match m {
        Some(m) => Ok(Some(liouville_transform(m, index.grid_size)?.delta())),
        None => Ok(None),
    }
}

fn paired_error(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let nearest = |k: &C64, set: &[C64]| set.iter().map(|q| (q - k).norm()).fold(f64::INFINITY, f64::min);
    let ab = a.iter().map(|k| nearest(k, b)).fold(0.0, f64::max);
    let ba = b.iter().map(|k| nearest(k, a)).fold(0.0, f64::max);
    ab.max(ba)
}

fn direct(a: &DirectArgs, out: &mut Output) -> Result<Value, Failure> {
    let m = require_model(&a.index)?;
    let data = liouville_transform(&m, a.index.grid_size)?;
    let (n, report, table) = select_truncation(&data, a.index.n_max)?;
    if a.write_coefficients {
        out.csv("coefficients.csv", &table.to_csv())?;
    }
    let ctx = CharacteristicContext::from_table(table, m.n_at_1(), m.dn_at_1())?;
    let w = window(&a.window, SearchWindow::new(0.0, DEFAULT_RE_MAX, DEFAULT_STRIP));
    let s = spectrum_of(&ctx, &w)?;
    out.csv("spectrum.csv", &s.to_csv())?;
    let mut samples = String::from("k,re,im,abs\n");
    for (k, v) in ctx.sample_real_axis(0.0, w.re_max, a.samples) {
        let _ = writeln!(samples, "{k:.17e},{:.17e},{:.17e},{:.17e}", v.re, v.im, v.norm());
    }
    out.csv("d0_real_axis.csv", &samples)?;
    let info = json!({
        "index": m.label(),
        "delta": data.delta(),
        "order": n,
        "n_at_1": m.n_at_1(),
        "dn_at_1": m.dn_at_1(),
        "indicators": report,
        "window": w,
    });
    out.json("indicators.json", info)?;
    Ok(json!({
        "command": "direct",
        "index": m.label(),
        "delta": data.delta(),
        "order": n,
        "eps1_at_delta": report.eps1_at_delta,
        "eigenvalues": s.len(),
        "real": s.real().len(),
        "non_real": s.non_real().len(),
    }))
}

fn delta(a: &DeltaArgs, out: &mut Output) -> Result<Value, Failure> {
    let m = model(&a.index)?;
    let inp = input(&a.spectrum, &a.index, m.as_ref())?;
    let orders = if a.search.orders.is_empty() {
        let usable: Vec<usize> = InverseOptions::default()
            .orders
            .into_iter()
            .filter(|n| 2 * n <= inp.len())
            .collect();
        spread(&usable, MAX_SEARCH_ORDERS)
    } else {
        a.search.orders.clone()
    };
    let mut opts = DeltaSearchOptions::for_input(&inp, orders);
    opts.refinements = a.search.refinements;
    opts.reduced = a.reduced;
    if let Some(grid) = explicit_grid(&a.search) {
        opts.grid = grid;
    }
    let res = recover_delta(&inp, &opts)?;
    for i in 0..res.eps_curve.len() {
        out.csv(&format!("eps_curve_{i}.csv"), &res.curve_csv(i))?;
    }
    let truth = true_delta(m.as_ref(), &a.index)?;
    let mut baselines = serde_json::Map::new();
    for b in &a.baseline {
        let entry = match b {
            Baseline::Asymptotic => {
                let mut real: Vec<f64> = inp
                    .eigenvalues
                    .iter()
                    .filter(|k| k.im == 0.0 && k.re > 0.0)
                    .map(|k| k.re)
                    .collect();
                real.sort_by(f64::total_cmp);
                delta_asymptotic(&real).map(|c| json!({ "candidates": c, "delta": c[0] }))
            }
            Baseline::Density => {
                let r = a.density_radius.unwrap_or_else(|| inp.max_re());
                delta_density(&inp.eigenvalues, r).map(|d| json!({ "radius": r, "delta": d }))
            }
        };
        let mut entry = entry.unwrap_or_else(|e| json!({ "failure": e.kind(), "message": e.to_string() }));
        if let (Some(t), Some(d)) = (truth, entry.get("delta").and_then(Value::as_f64)) {
            entry["error"] = json!((d - t).abs());
        }
        let name = match b {
            Baseline::Asymptotic => "asymptotic",
            Baseline::Density => "density",
        };
        baselines.insert(name.into(), entry);
    }
    let mut body = json!({
        "search": res,
        "eigenvalues": inp.len(),
        "baselines": baselines,
    });
    if let Some(t) = truth {
        body["true_delta"] = json!(t);
        body["error"] = json!((res.delta_star - t).abs());
    }
    out.json("delta.json", body.clone())?;
    let mut summary = json!({
        "command": "delta",
        "delta": res.delta_star,
        "order": res.n_star,
        "eigenvalues": inp.len(),
        "baselines": body["baselines"],
    });
    if let Some(t) = truth {
        summary["error"] = json!((res.delta_star - t).abs());
    }
    Ok(summary)
}

fn write_solution(
    sol: &InverseSolution,
    m: Option<&RefractiveIndexModel>,
    out: &mut Output,
    summary: &mut Value,
) -> Result<(), Failure> {
    out.csv("reconstruction.csv", &sol.reconstruction_csv())?;
    out.json(
        "endpoint.json",
        json!({
            "delta": sol.delta,
            "order": sol.order,
            "n_at_0": sol.n_at_0,
            "n_at_1": sol.n_at_1,
            "dn_at_1": sol.dn_at_1,
            "endpoint_g": sol.endpoint_g,
            "endpoint_s": sol.endpoint_s,
            "monotone": sol.monotone,
            "endpoint_condition": sol.endpoint_condition,
            "delta_search": sol.delta_search,
        }),
    )?;
    summary["delta"] = json!(sol.delta);
    summary["order"] = json!(sol.order);
    summary["n_at_0"] = json!(sol.n_at_0);
    if let Some(m) = m {
        let interp = sol.interpolant()?;
        let (lo, hi) = (interp.knots()[0], *interp.knots().last().expect("nonempty"));
        let mut csv = String::from("r,n_reconstructed,n_true,abs_error\n");
        let mut worst: f64 = 0.0;
        for r in uniform_grid(0.0, 1.0, ERROR_POINTS) {
            let (rec, t) = (interp.eval(r.clamp(lo, hi)), m.n(r));
            worst = worst.max((rec - t).abs());
            let _ = writeln!(csv, "{r:.17e},{rec:.17e},{t:.17e},{:.17e}", (rec - t).abs());
        }
        out.csv("error.csv", &csv)?;
        summary["max_error"] = json!(worst);
    }
    Ok(())
}

fn invert_cmd(a: &InvertArgs, out: &mut Output) -> Result<Value, Failure> {
    let m = model(&a.index)?;
    let inp = input(&a.spectrum, &a.index, m.as_ref())?;
    let sol = invert(&inp, &inverse_options(&a.search, a.delta, a.zeta_points))?;
    let mut summary = json!({ "command": "invert", "eigenvalues": inp.len() });
    write_solution(&sol, m.as_ref(), out, &mut summary)?;
    if let Some(t) = true_delta(m.as_ref(), &a.index)? {
        summary["delta_error"] = json!((sol.delta - t).abs());
    }
    Ok(summary)
}

fn complete(a: &CompleteArgs, out: &mut Output) -> Result<Value, Failure> {
    let m = model(&a.index)?;
    let inp = input(&a.spectrum, &a.index, m.as_ref())?;
    let opts = inverse_options(&a.search, a.delta, a.zeta_points);
    let w = window(&a.window, default_window(&inp));
    let (res, sol) = match a.then_invert {
        Some(extra) => {
            let (res, sol) = complete_then_invert(&inp, &opts, Some(w), extra)?;
            (res, Some(sol))
        }
        None => (complete_spectrum_with(&inp, &opts, Some(w))?, None),
    };
    out.csv("completion.csv", &res.to_csv())?;
    let mut summary = json!({
        "command": "complete",
        "given": inp.len(),
        "completed": res.completed.len(),
        "delta_used": res.delta_used,
        "order_used": res.n_used,
        "max_given_mismatch": res.max_given_mismatch(),
    });
    let mut body = json!({ "completion": res });
    if let Some(m) = &m {
        let ctx = nsbf_context(m, &a.index)?;
        let direct = spectrum_of(&ctx, &res.completed.window)?;
        let err = paired_error(&res.completed.eigenvalues, &direct.eigenvalues);
        body["direct_count"] = json!(direct.len());
        body["direct_error"] = json!(err);
        summary["direct_count"] = json!(direct.len());
        summary["direct_error"] = json!(err);
    }
    out.json("completion.json", body)?;
    if let Some(sol) = &sol {
        write_solution(sol, m.as_ref(), out, &mut summary)?;
        summary["command"] = json!("complete");
    }
    Ok(summary)
}

fn parse_point(s: &str) -> Result<C64, Failure> {
    let bad = || Failure::validation(format!("expected --k RE,IM, got '{s}'"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    Ok(C64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

fn oracle(a: &OracleArgs, out: &mut Output) -> Result<Value, Failure> {
    let m = require_model(&a.index)?;
    let cfg = ShootingConfig::with_steps(a.steps);
    cfg.validate()?;
    let factor = liouville_factor(&m);
    if !a.points.is_empty() {
        let points = a.points.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?;
        let o = ShootingOracle::new(&m, cfg)?;
        let ctx = nsbf_context(&m, &a.index)?;
        let mut csv = String::from("re,im,d0_re,d0_im,scaled_re,scaled_im,nsbf_re,nsbf_im\n");
        let mut worst: f64 = 0.0;
        for k in &points {
            let d = o.d0(*k);
            let (s, n) = (d * factor, ctx.eval_d0n(*k));
            worst = worst.max((s - n).norm());
            let _ = writeln!(
                csv,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                k.re, k.im, d.re, d.im, s.re, s.im, n.re, n.im
            );
        }
        out.csv("d0_oracle.csv", &csv)?;
        return Ok(json!({
            "command": "oracle",
            "points": points.len(),
            "liouville_factor": factor,
            "max_nsbf_difference": worst,
        }));
    }
    let w = window(&a.window, SearchWindow::new(0.0, DEFAULT_RE_MAX, DEFAULT_STRIP));
    let s = eigenvalues_shooting(&m, &w, cfg)?;
    out.csv("oracle_spectrum.csv", &s.to_csv())?;
    let mut summary = json!({
        "command": "oracle",
        "index": m.label(),
        "steps": a.steps,
        "eigenvalues": s.len(),
    });
    if a.compare {
        let ctx = nsbf_context(&m, &a.index)?;
        let direct = spectrum_of(&ctx, &w)?;
        summary["nsbf_eigenvalues"] = json!(direct.len());
        summary["max_difference"] = json!(paired_error(&s.eigenvalues, &direct.eigenvalues));
    }
    Ok(summary)
}
