use chanwit::channels::choi_of_channel;
use chanwit::io::{self, MatrixJson};
use chanwit::linalg::{self, CMatrix};
use chanwit::schmidt::{self, complementary_from_sigma, geometry_profile};
use chanwit::witness::{self, Verdict, UNITALITY_TOL};
use chanwit::{DensityOperator, OptimizerConfig, PureState};
use serde_json::{json, Value};

use crate::detect::{detect, Detected};
use crate::error::{CliError, CliResult};
use crate::geometry;
use crate::report::Report;

/// PPT minimum eigenvalue below this excludes a separable Choi state.
pub const PPT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub optimizer: OptimizerConfig,
    /// Verdict margin.
    pub tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            tolerance: witness::VERDICT_EPS,
        }
    }
}

pub enum StateInput {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl StateInput {
    pub fn density(&self) -> DensityOperator {
        match self {
            StateInput::Pure(p) => p.to_density(),
            StateInput::Mixed(m) => m.clone(),
        }
    }
}

pub fn parse_state(text: &str) -> CliResult<StateInput> {
    let m = io::parse_matrix(text)?;
    if m.is_vector() {
        Ok(StateInput::Pure(PureState::from_vector(m.to_vector()?)?))
    } else {
        Ok(StateInput::Mixed(DensityOperator::from_matrix(m.to_matrix()?)?))
    }
}

pub fn parse_operator(text: &str) -> CliResult<CMatrix> {
    Ok(io::parse_matrix(text)?.to_matrix()?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn check_finite(v: &Value) -> CliResult<()> {
    let ok = match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(items) => return items.iter().try_for_each(check_finite),
        Value::Object(map) => return map.values().try_for_each(check_finite),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Numerical("non-finite value in results".into()))
    }
}

fn verdict_fields(det: &Detected, v: Option<&Verdict>) -> Value {
    let mut out = json!({
        "observable_class": det.class,
        "bounds": det.bounds,
    });
    if let Some(spread) = det.spread {
        out["spread"] = json!(spread);
    }
    if let Some(v) = v {
        out["expectation"] = json!(v.expectation);
        out["flags"] = to_value(&v.flags);
        out["margins"] = to_value(&v.margins);
    }
    out
}

fn observable_verdict(l: &CMatrix, rho: &DensityOperator, opts: &Options) -> CliResult<Value> {
    let det = detect(l, None, &opts.optimizer)?;
    let v = witness::verdict_with_tolerance(l, rho, &det.bounds, opts.tolerance)?;
    Ok(verdict_fields(&det, Some(&v)))
}

fn unitality_fields(rho: &DensityOperator) -> (Value, bool) {
    let (tr_b, tr_a) = witness::unitality_test(rho);
    let ok = tr_a <= UNITALITY_TOL && tr_b <= UNITALITY_TOL;
    (
        json!({
            "tr_b_deviation": tr_b,
            "tr_a_deviation": tr_a,
            "consistent_with_me_mixture": ok,
        }),
        ok,
    )
}

pub fn analyze_state(state_text: &str, observable_text: Option<&str>, opts: &Options) -> CliResult<Report> {
    let state = parse_state(state_text)?;
    let rho = state.density();
    let d = rho.d();
    let mut results = match &state {
        StateInput::Pure(psi) => {
            let s = schmidt::schmidt_decompose(psi)?;
            let comp = complementary_from_sigma(&s.sigma)?;
            let profile = geometry_profile(&s.sigma)?;
            json!({
                "kind": "pure",
                "d": d,
                "schmidt": {
                    "sigma": s.sigma,
                    "basis_a": MatrixJson::from_matrix(&s.basis_a),
                    "basis_b": MatrixJson::from_matrix(&s.basis_b),
                },
                "complementary": {"tau": comp.tau, "theta": comp.theta},
                "geometry": {
                    "sigma": s.sigma,
                    "tau": comp.tau,
                    "norms": {"l1": profile.norm1, "l2": profile.norm2, "linf": profile.norm_inf},
                    "class": profile.classification,
                },
                "bounds": witness::bounds_rank_one(psi, &opts.optimizer)?,
                "white_noise_threshold": witness::white_noise_threshold(psi)?,
            })
        }
        StateInput::Mixed(rho) => {
            let (unitality, _) = unitality_fields(rho);
            let ppt = rho.ppt_min_eigenvalue();
            let mut r = json!({
                "kind": "mixed",
                "d": d,
                "unitality": unitality,
                "ppt_min_eigenvalue": ppt,
                "ppt": ppt >= -PPT_TOL,
            });
            if observable_text.is_none() && d >= 2 {
                let id = linalg::identity(d);
                let bounds = witness::bounds_flip(&id, &id)?;
                let det = Detected {
                    class: crate::detect::ObservableClass::FlipType,
                    bounds,
                    spread: None,
                };
                let v = witness::verdict_with_tolerance(&linalg::flip(d), rho, &det.bounds, opts.tolerance)?;
                let mut w = verdict_fields(&det, Some(&v));
                w["observable"] = json!("flip");
                r["witness"] = w;
            }
            r
        }
    };
    let mut inputs = vec![("state", state_text)];
    if let Some(obs) = observable_text {
        let mut w = observable_verdict(&parse_operator(obs)?, &rho, opts)?;
        w["observable"] = json!("supplied");
        results["witness"] = w;
        inputs.push(("observable", obs));
    }
    check_finite(&results)?;
    Ok(Report::new("analyze-state", &inputs, results))
}

pub fn classify_channel(channel_text: &str, observable_text: Option<&str>, opts: &Options) -> CliResult<Report> {
    let ch = io::parse_channel(channel_text)?;
    let choi = choi_of_channel(&ch)?;
    let rho = &choi.state;
    let (unitality, unital) = unitality_fields(rho);
    let ppt = rho.ppt_min_eigenvalue();
    let mut reasons = Vec::new();
    let mut ru_excluded = !unital;
    if ru_excluded {
        reasons.push("partial traces of the Choi state differ from I/d".to_string());
    }
    let mut rp_excluded = ppt < -PPT_TOL;
    if rp_excluded {
        reasons.push("Choi state has a negative partial transpose".to_string());
    }
    let mut results = json!({
        "d": ch.d(),
        "tag": ch.tag(),
        "terms": ch.terms().len(),
        "choi": {"raw_trace": choi.raw_trace},
        "unitality": unitality,
        "ppt_min_eigenvalue": ppt,
    });
    let mut inputs = vec![("channel", channel_text)];
    if let Some(obs) = observable_text {
        let l = parse_operator(obs)?;
        let det = detect(&l, None, &opts.optimizer)?;
        let v = witness::verdict_with_tolerance(&l, rho, &det.bounds, opts.tolerance)?;
        if v.has(witness::VerdictFlag::NotMeMixture) {
            ru_excluded = true;
            reasons.push("witness expectation lies outside the ME-mixture interval".to_string());
        }
        if v.has(witness::VerdictFlag::Entangled) {
            rp_excluded = true;
            reasons.push("witness expectation lies outside the separable interval".to_string());
        }
        results["witness"] = verdict_fields(&det, Some(&v));
        inputs.push(("observable", obs));
    }
    results["excluded"] = json!({"ru": ru_excluded, "rp": rp_excluded});
    results["reasons"] = json!(reasons);
    check_finite(&results)?;
    Ok(Report::new("classify-channel", &inputs, results))
}

pub struct FlipFactors<'a> {
    pub a: &'a str,
    pub b: &'a str,
}

pub fn witness_report(
    observable_text: &str,
    state_text: Option<&str>,
    flip: Option<FlipFactors<'_>>,
    opts: &Options,
) -> CliResult<Report> {
    let l = parse_operator(observable_text)?;
    let mut inputs = vec![("observable", observable_text)];
    let factors = match &flip {
        Some(f) => {
            inputs.push(("flip_a", f.a));
            inputs.push(("flip_b", f.b));
            Some((parse_operator(f.a)?, parse_operator(f.b)?))
        }
        None => None,
    };
    let det = detect(&l, factors.as_ref().map(|(a, b)| (a, b)), &opts.optimizer)?;
    let verdict = match state_text {
        Some(text) => {
            inputs.push(("state", text));
            let rho = parse_state(text)?.density();
            Some(witness::verdict_with_tolerance(&l, &rho, &det.bounds, opts.tolerance)?)
        }
        None => None,
    };
    let results = verdict_fields(&det, verdict.as_ref());
    check_finite(&results)?;
    Ok(Report::new("witness", &inputs, results))
}

/// Report plus named data files.
pub struct GeometryOutput {
    pub report: Report,
    pub files: Vec<(String, String)>,
}

pub fn geometry_report(d: usize, resolution: usize, csv: bool) -> CliResult<GeometryOutput> {
    let ext = if csv { "csv" } else { "json" };
    let (mut results, files) = if d == 2 || d == 3 {
        let dirs = geometry::directions(d, resolution)?;
        let contents = if csv {
            geometry::surfaces_csv(d, resolution)?
        } else {
            let points: Vec<Value> = geometry::SURFACES
                .iter()
                .enumerate()
                .flat_map(|(s, name)| {
                    dirs.iter().map(move |u| {
                        let r = geometry::surface_radii(u).expect("grid directions are valid").as_array()[s];
                        json!({"sigma": u.iter().map(|x| r * x).collect::<Vec<_>>(), "radius": r, "surface_id": name})
                    })
                })
                .collect();
            serde_json::to_string_pretty(&points).expect("finite points")
        };
        let uniform = vec![1.0; d];
        let mut axis = vec![0.0; d];
        axis[0] = 1.0;
        let results = json!({
            "d": d,
            "resolution": resolution,
            "surfaces": geometry::SURFACES,
            "directions": dirs.len(),
            "reference": [
                {"direction": "uniform", "radii": geometry::surface_radii(&uniform)?},
                {"direction": "axis", "radii": geometry::surface_radii(&axis)?},
            ],
        });
        (results, vec![(format!("surfaces_d{d}.{ext}"), contents)])
    } else {
        let rows = geometry::norms_table(d)?;
        let contents = if csv {
            geometry::norms_csv(&rows)
        } else {
            serde_json::to_string_pretty(&rows).expect("finite rows")
        };
        (json!({"d": d, "norms": rows}), vec![(format!("norms_d{d}.{ext}"), contents)])
    };
    results["files"] = json!(files.iter().map(|f| f.0.clone()).collect::<Vec<_>>());
    Ok(GeometryOutput {
        report: Report::new("geometry", &[], results),
        files,
    })
}
