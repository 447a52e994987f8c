use hermat_core::kp::{
    gaussian_moment_matrix, random_moment_matrix, tau_trunc_for_weight, verify_kp, KpError,
    KpReport, MomentMatrix, SolitonData,
};
use hermat_core::penner::{
    half_edges_needed, topologies_up_to, verify_penner_identity, PennerError, PennerReport,
};
use hermat_core::rational::{fmt_rational, parse_rational};
use hermat_core::ribbon::{classes_for_topology, enumerate_classes, RibbonClass, RibbonError};
use hermat_core::stabilizer::{verify_sl2, MomentAlgebra, StabilizerError};
use hermat_core::wick::{
    matrix_bruteforce_sum, matrix_expansion, scalar_coefficient, scalar_expansion,
};
use hermat_core::{Coeff, DegreeProfile, WeightedSeries};
use serde_json::{json, Value};
use thiserror::Error;

use crate::{ExpandArgs, Format, GsArgs, KpArgs, RibbonArgs, Sl2Args, TruncArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("enumeration needs {need} half-edges, above the budget of {cap}")]
    Budget { need: u32, cap: u32 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Budget { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid(_) => "invalid_config",
            CliError::Budget { .. } => "budget_exceeded",
        }
    }
}

impl From<RibbonError> for CliError {
    fn from(e: RibbonError) -> Self {
        match e {
            RibbonError::BudgetExceeded { need, cap } => CliError::Budget { need, cap },
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<PennerError> for CliError {
    fn from(e: PennerError) -> Self {
        match e {
            PennerError::Ribbon(r) => r.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<KpError> for CliError {
    fn from(e: KpError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<StabilizerError> for CliError {
    fn from(e: StabilizerError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

pub struct Output {
    pub text: String,
    pub ok: bool,
}

impl Output {
    fn json(v: &Value, ok: bool) -> Self {
        Self {
            text: format!("{v}\n"),
            ok,
        }
    }

    fn csv(header: &str, rows: impl IntoIterator<Item = String>, ok: bool) -> Self {
        let mut text = format!("{header}\n");
        for r in rows {
            text.push_str(&r);
            text.push('\n');
        }
        Self { text, ok }
    }
}

fn within_budget(need: u32, cap: u32) -> Result<(), CliError> {
    if need > cap {
        return Err(CliError::Budget { need, cap });
    }
    Ok(())
}

fn parse_profile(s: &str) -> Result<DegreeProfile, CliError> {
    s.parse()
        .map_err(|e| CliError::Invalid(format!("bad profile {s:?}: {e}")))
}

fn parse_gs(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Invalid(format!("bad --gs {s:?}, expected g,s"));
    let (g, rest) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        g.trim().parse().map_err(|_| bad())?,
        rest.trim().parse().map_err(|_| bad())?,
    ))
}

fn monomial_name(names: &[String], exps: &[u32]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| {
            if *e == 1 {
                n.clone()
            } else {
                format!("{n}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

fn series_output<C: Coeff>(
    s: &WeightedSeries<C>,
    format: Format,
    show: impl Fn(&C) -> String,
) -> Output {
    match format {
        Format::Json => Output::json(&s.to_json(), true),
        Format::Csv => Output::csv(
            "monomial,coefficient",
            s.terms()
                .map(|(e, c)| format!("{},{}", monomial_name(s.vars().names(), e), show(c))),
            true,
        ),
    }
}

fn coefficient_output(profile: &DegreeProfile, coeff: String, format: Format) -> Output {
    match format {
        Format::Json => Output::json(
            &json!({ "profile": profile.to_string(), "coefficient": coeff }),
            true,
        ),
        Format::Csv => Output::csv(
            "profile,coefficient",
            [format!("\"{profile}\",{coeff}")],
            true,
        ),
    }
}

pub fn scalar_expand(a: &ExpandArgs, format: Format, _budget: u32) -> Result<Output, CliError> {
    if let Some(p) = &a.profile {
        let p = parse_profile(p)?;
        return Ok(coefficient_output(
            &p,
            fmt_rational(&scalar_coefficient(&p)),
            format,
        ));
    }
    let s = scalar_expansion(a.trunc.max(1), a.trunc);
    Ok(series_output(&s, format, fmt_rational))
}

pub fn matrix_expand(a: &ExpandArgs, format: Format, budget: u32) -> Result<Output, CliError> {
    if let Some(p) = &a.profile {
        let p = parse_profile(p)?;
        within_budget(p.half_edges(), budget)?;
        let c = matrix_bruteforce_sum(&p).map_err(|e| CliError::Invalid(e.to_string()))?;
        return Ok(coefficient_output(&p, c.to_string(), format));
    }
    within_budget(a.trunc, budget)?;
    let s =
        matrix_expansion(a.trunc.max(3), a.trunc).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(series_output(&s, format, |c| c.to_string()))
}

fn classes_output(header: Value, classes: &[RibbonClass], format: Format) -> Output {
    match format {
        Format::Json => {
            let mut v = header;
            v["count"] = json!(classes.len());
            v["classes"] = Value::Array(classes.iter().map(RibbonClass::to_json).collect());
            Output::json(&v, true)
        }
        Format::Csv => Output::csv(
            RibbonClass::CSV_HEADER,
            classes.iter().map(RibbonClass::csv_row),
            true,
        ),
    }
}

pub fn ribbon_enum(a: &RibbonArgs, format: Format, budget: u32) -> Result<Output, CliError> {
    match (&a.profile, &a.gs) {
        (Some(p), None) => {
            let p = parse_profile(p)?;
            within_budget(p.half_edges(), budget)?;
            let classes = enumerate_classes(&p, a.connected)?;
            Ok(classes_output(
                json!({ "profile": p.to_string() }),
                &classes,
                format,
            ))
        }
        (None, Some(gs)) => {
            let (g, s) = parse_gs(gs)?;
            let classes = classes_for_topology(g, s, Some(budget))?;
            Ok(classes_output(json!({ "g": g, "s": s }), &classes, format))
        }
        _ => Err(CliError::Invalid(
            "give exactly one of --profile or --gs".into(),
        )),
    }
}

pub fn penner_verify(a: &GsArgs, format: Format, budget: u32) -> Result<Output, CliError> {
    let (g, s) = parse_gs(&a.gs)?;
    let r = verify_penner_identity(g, s, Some(budget))?;
    Ok(match format {
        Format::Json => Output::json(
            &json!({
                "graph_sum": fmt_rational(&r.graph_sum),
                "closed_form": fmt_rational(&r.closed_form),
                "match": r.matches(),
            }),
            r.matches(),
        ),
        Format::Csv => Output::csv(PennerReport::CSV_HEADER, [r.csv_row()], r.matches()),
    })
}

pub fn penner_table(format: Format, budget: u32) -> Result<Output, CliError> {
    let max_d = budget / 6;
    let mut reports = Vec::new();
    for (g, s) in topologies_up_to(max_d) {
        if half_edges_needed(g, s) <= budget {
            reports.push(verify_penner_identity(g, s, Some(budget))?);
        }
    }
    let ok = reports.iter().all(PennerReport::matches);
    Ok(match format {
        Format::Json => Output::json(
            &json!({
                "budget": budget,
                "rows": reports.iter().map(PennerReport::to_json).collect::<Vec<_>>(),
                "ok": ok,
            }),
            ok,
        ),
        Format::Csv => Output::csv(
            PennerReport::CSV_HEADER,
            reports.iter().map(PennerReport::csv_row),
            ok,
        ),
    })
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{path}: {e}")))
}

fn moment_source(spec: &str, n: usize, rows: usize, seed: u64) -> Result<MomentMatrix, CliError> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("gaussian", None) => Ok(gaussian_moment_matrix(n, rows)?),
        ("random", None) => Ok(random_moment_matrix(n, rows, seed)),
        ("random", Some(s)) => {
            let seed = s
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad seed in {spec:?}")))?;
            Ok(random_moment_matrix(n, rows, seed))
        }
        ("soliton", Some(path)) => {
            let data = SolitonData::from_json(&read_json(path)?)?;
            if data.n() != n {
                return Err(CliError::Invalid(format!(
                    "soliton data has n = {}, --n is {n}",
                    data.n()
                )));
            }
            Ok(data.moments(rows)?)
        }
        ("file", Some(path)) => {
            let m = MomentMatrix::from_json(&read_json(path)?)?;
            if m.n() != n {
                return Err(CliError::Invalid(format!(
                    "moment file has n = {}, --n is {n}",
                    m.n()
                )));
            }
            Ok(m)
        }
        _ => Err(CliError::Invalid(format!(
            "unknown moment source {spec:?}; use gaussian, random[:SEED], soliton:PATH or file:PATH"
        ))),
    }
}

pub fn kp_verify(a: &KpArgs, format: Format) -> Result<Output, CliError> {
    if a.n == 0 {
        return Err(CliError::Invalid("--n must be at least 1".into()));
    }
    let rows = a.n + tau_trunc_for_weight(a.trunc) as usize;
    let xi = moment_source(&a.moments, a.n, rows, a.seed)?;
    let r = verify_kp(&a.moments, &xi, a.trunc)?;
    Ok(match format {
        Format::Json => Output::json(&r.to_json(), r.passed()),
        Format::Csv => Output::csv(
            "moments,n,tau_trunc,max_weight_checked,residual_nonzero_terms,residual_zero",
            [kp_row(&r)],
            r.passed(),
        ),
    })
}

fn kp_row(r: &KpReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        r.label,
        r.n,
        r.tau_trunc,
        r.checked_weight,
        r.nonzero_terms,
        r.passed()
    )
}

pub fn sl2_verify(a: &Sl2Args, format: Format) -> Result<Output, CliError> {
    let mut alg = match &a.a {
        Some(list) => {
            let values = list
                .split(',')
                .map(|x| {
                    parse_rational(x.trim())
                        .ok_or_else(|| CliError::Invalid(format!("bad rational {x:?} in --a")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let alg = MomentAlgebra::numeric(values)?;
            if a.k.is_some_and(|k| k != alg.k()) {
                return Err(CliError::Invalid(format!(
                    "--a has {} coefficients but --k asks for {}",
                    2 * alg.k(),
                    2 * a.k.unwrap_or_default()
                )));
            }
            alg
        }
        None => MomentAlgebra::symbolic(a.k.unwrap_or(1))?,
    };
    let r = verify_sl2(&mut alg, a.n, a.trunc)?;
    Ok(match format {
        Format::Json => Output::json(&r.to_json(), r.ok()),
        Format::Csv => {
            let mut rows = Vec::new();
            for s in &r.stability {
                for e in &s.entries {
                    rows.push(format!("stability,{},{},{}", e.i, e.j, e.ok()));
                }
                rows.push(format!("tail,{},,{}", s.i, s.tail_ok));
            }
            for w in &r.witt {
                rows.push(format!("witt,{},{},{}", w.i, w.j, w.ok));
            }
            Output::csv("check,i,j,ok", rows, r.ok())
        }
    })
}

pub fn oracle_crosscheck(a: &TruncArgs, format: Format, budget: u32) -> Result<Output, CliError> {
    within_budget(a.trunc, budget)?;
    let mut rows = Vec::new();
    for p in DegreeProfile::all_up_to(3, a.trunc.max(3), a.trunc) {
        if p.is_empty() || p.half_edges() % 2 == 1 {
            continue;
        }
        let brute = matrix_bruteforce_sum(&p).map_err(|e| CliError::Invalid(e.to_string()))?;
        let ribbon = hermat_core::ribbon::class_weighted_sum(&p)?;
        rows.push((p, brute, ribbon));
    }
    let ok = rows.iter().all(|(_, b, r)| b == r);
    Ok(match format {
        Format::Json => Output::json(
            &json!({
                "trunc": a.trunc,
                "rows": rows.iter().map(|(p, b, r)| json!({
                    "profile": p.to_string(),
                    "pairing_sum": b.to_string(),
                    "ribbon_sum": r.to_string(),
                    "match": b == r,
                })).collect::<Vec<_>>(),
                "ok": ok,
            }),
            ok,
        ),
        Format::Csv => Output::csv(
            "profile,pairing_sum,ribbon_sum,match",
            rows.iter()
                .map(|(p, b, r)| format!("\"{p}\",\"{b}\",\"{r}\",{}", b == r)),
            ok,
        ),
    })
}
