//! Subcommand implementations. Each returns a payload plus diagnostics, or an
//! error with whatever partial payload is meaningful.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use unitary_schur::json::{
    self as docs, BlaschkeJson, CertificateJson, ColligationJson, ParamsJson, PartitionedJson,
    RationalJson, TraceJson,
};
use unitary_schur::rational::{circle_samples, disc_samples};
use unitary_schur::redheffer::{self, PartitionedColligation};
use unitary_schur::{
    hessenberg, linalg, random, realization, schur_state, tol, CMatrix, Error, Orientation,
    RationalInner, UnitaryColligation, C64,
};

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostic {
    pub check: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Diagnostic {
    fn new(check: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            residual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    /// Tolerance for agreement diagnostics; construction tolerances are fixed.
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

pub struct Outcome {
    pub payload: Value,
    pub diagnostics: Vec<Diagnostic>,
    pub error: Option<Error>,
}

impl Outcome {
    fn ok(payload: Value, diagnostics: Vec<Diagnostic>) -> Self {
        Self {
            payload,
            diagnostics,
            error: None,
        }
    }

    fn failed(payload: Value, diagnostics: Vec<Diagnostic>, error: Error) -> Self {
        Self {
            payload,
            diagnostics,
            error: Some(error),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("documents serialize to JSON")
}

fn parse<T: serde::de::DeserializeOwned>(value: &Value, what: &str) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| invalid(format!("invalid {what}: {e}")))
}

/// Unwraps the `payload` of a previous command's output.
pub fn unwrap_envelope(value: Value) -> Value {
    match value {
        Value::Object(mut map) if map.contains_key("payload") && map.contains_key("status") => {
            map.remove("payload").unwrap_or(Value::Null)
        }
        other => other,
    }
}

fn has(value: &Value, key: &str) -> bool {
    value.get(key).is_some()
}

/// Any square matrix document: `{"matrix": ...}` (optionally with `n`) or a
/// bare nested array.
fn parse_matrix(value: &Value) -> Result<CMatrix> {
    let rows = value.get("matrix").unwrap_or(value);
    let rows: docs::Matrix = parse(rows, "matrix")?;
    let m = docs::from_matrix(&rows)?;
    if !m.is_square() || m.nrows() == 0 {
        return Err(invalid(format!(
            "matrix must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Some(n) = value.get("n").and_then(Value::as_u64) {
        if n as usize + 1 != m.nrows() {
            return Err(Error::DimensionMismatch {
                expected: n as usize + 1,
                found: m.nrows(),
            });
        }
    }
    Ok(m)
}

fn parse_colligation(value: &Value) -> Result<UnitaryColligation> {
    UnitaryColligation::new(parse_matrix(value)?)
}

fn sample_points(settings: &Settings) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    (0..settings.samples)
        .map(|_| random::disc_point(&mut rng, 0.95))
        .collect()
}

fn transfer_error(u: &UnitaryColligation, s: &RationalInner, samples: &[C64]) -> Result<f64> {
    Ok(realization::verify_realization(u, s, samples, None)?.transfer_error)
}

fn unitarity(u: &CMatrix) -> Diagnostic {
    Diagnostic::new("unitarity", linalg::unitarity_residual(u), tol::UNITARY)
}

fn minimality(u: &UnitaryColligation) -> Result<Diagnostic> {
    let rank = u.minimality_report().rank_simplicity;
    Ok(Diagnostic::new(
        "rank_deficiency",
        (u.n() - rank) as f64,
        0.0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Model,
    ClosedForm,
}

pub fn realize(input: &Value, route: Option<Route>, settings: &Settings) -> Result<Outcome> {
    let samples = sample_points(settings);
    if has(input, "params") {
        if route == Some(Route::Model) {
            return Err(invalid(
                "the model route needs the zeros of a Blaschke product, got Schur parameters",
            ));
        }
        let p = parse::<ParamsJson>(input, "parameters")?.to_value()?;
        let u = schur_state::colligation_from_schur_parameters(&p)?;
        let s = RationalInner::from_schur_parameters(&p)?;
        let diagnostics = vec![
            unitarity(u.matrix()),
            minimality(&u)?,
            Diagnostic::new(
                "transfer",
                transfer_error(&u, &s, &samples)?,
                settings.tolerance,
            ),
        ];
        return Ok(Outcome::ok(
            to_value(&ColligationJson::from_value(&u)),
            diagnostics,
        ));
    }
    if has(input, "zeros") {
        let b = parse::<BlaschkeJson>(input, "Blaschke product")?.to_value()?;
        let s = b.to_rational();
        let model = realization::model_colligation(&b)?;
        let closed = schur_state::colligation_from_schur_parameters(&s.schur_parameters()?)?;
        let chosen = match route.unwrap_or(Route::Model) {
            Route::Model => &model,
            Route::ClosedForm => &closed,
        };
        let equivalence = if model.n() == 0 {
            linalg::max_abs_diff(model.matrix(), closed.matrix())
        } else {
            model
                .find_equivalence(&closed)?
                .map_or(f64::INFINITY, |e| e.residual)
        };
        let diagnostics = vec![
            unitarity(chosen.matrix()),
            minimality(chosen)?,
            Diagnostic::new(
                "transfer",
                transfer_error(chosen, &s, &samples)?,
                settings.tolerance,
            ),
            Diagnostic::new("cross_route_equivalence", equivalence, tol::EQUIV),
        ];
        return Ok(Outcome::ok(
            to_value(&ColligationJson::from_value(chosen)),
            diagnostics,
        ));
    }
    Err(invalid(
        "realize expects {\"params\": ...} or {\"c\": ..., \"zeros\": ...}",
    ))
}

pub fn schur(input: &Value, renormalize_each_step: bool) -> Result<Outcome> {
    let u = parse_colligation(input)?;
    match schur_state::schur_algorithm_state_space(&u, renormalize_each_step) {
        Ok(trace) => {
            let params = trace.parameter_sequence()?;
            let rebuilt = schur_state::colligation_from_schur_parameters(&params)?;
            let rebuild = linalg::max_abs_diff(rebuilt.matrix(), &trace.matrices[0]);
            let worst_unitarity = trace
                .matrices
                .iter()
                .map(linalg::unitarity_residual)
                .fold(0.0, f64::max);
            let diagnostics = vec![
                Diagnostic::new("unitarity", worst_unitarity, tol::UNITARY),
                Diagnostic::new("closed_form_rebuild", rebuild, tol::ROUND),
            ];
            Ok(Outcome::ok(
                to_value(&TraceJson::from_value(&trace)),
                diagnostics,
            ))
        }
        Err(Error::NotMinimal {
            step,
            modulus,
            partial,
        }) => {
            let diagnostics = vec![Diagnostic::new(
                &format!("terminal_at_step_{step}"),
                modulus,
                1.0 - tol::DISC,
            )];
            let error = Error::NotMinimal {
                step,
                modulus,
                partial: partial.clone(),
            };
            Ok(Outcome::failed(
                to_value(&TraceJson::from_value(&partial)),
                diagnostics,
                error,
            ))
        }
        Err(e) => Err(e),
    }
}

pub fn hessenberg(input: &Value, orientation: Orientation) -> Result<Outcome> {
    let m = parse_matrix(input)?;
    if m.nrows() < 2 {
        return Err(invalid("reduction needs a matrix of size at least 2"));
    }
    let cert = hessenberg::reduce(&m, orientation)?;
    let diagnostics = vec![
        Diagnostic::new("structure", cert.structural_residual(), tol::STRUCT),
        Diagnostic::new("reproduction", cert.reproduction_residual, tol::UNITARY),
        Diagnostic::new(
            "gauge_unitarity",
            linalg::unitarity_residual(&cert.v),
            tol::UNITARY,
        ),
    ];
    Ok(Outcome::ok(
        to_value(&CertificateJson::from_value(&cert)),
        diagnostics,
    ))
}

pub fn couple(input: &Value, settings: &Settings) -> Result<Outcome> {
    let outer = input
        .get("outer")
        .ok_or_else(|| invalid("couple expects {\"outer\": ..., \"inner\": ...}"))?;
    let inner = input
        .get("inner")
        .ok_or_else(|| invalid("couple expects {\"outer\": ..., \"inner\": ...}"))?;
    let outer: PartitionedColligation = match outer.get("section") {
        Some(s0) => {
            let s0: docs::Complex = parse(s0, "section parameter")?;
            redheffer::elementary_schur_section(docs::from_complex(s0))?
                .colligation()
                .clone()
        }
        None => parse::<PartitionedJson>(outer, "partitioned colligation")?.to_value()?,
    };
    let inner = parse_colligation(inner)?;
    let coupled = redheffer::redheffer_product(&outer, &inner)?;
    let mut transfer: f64 = 0.0;
    for z in sample_points(settings) {
        let s = outer.characteristic_matrix(z)?;
        let omega = inner.characteristic_function(z)?;
        let expected = redheffer::redheffer_transform(s[0][0], s[0][1], s[1][0], s[1][1], omega)?;
        transfer = transfer.max((coupled.characteristic_function(z)? - expected).norm());
    }
    let diagnostics = vec![
        unitarity(coupled.matrix()),
        Diagnostic::new("coupled_transfer", transfer, settings.tolerance),
    ];
    Ok(Outcome::ok(
        to_value(&ColligationJson::from_value(&coupled)),
        diagnostics,
    ))
}

pub fn eval(input: &Value, z: C64) -> Result<Outcome> {
    let value = if has(input, "num") {
        parse::<RationalJson>(input, "rational function")?
            .to_value()?
            .eval(z)?
    } else if has(input, "zeros") {
        parse::<BlaschkeJson>(input, "Blaschke product")?
            .to_value()?
            .eval(z)?
    } else if has(input, "params") {
        let p = parse::<ParamsJson>(input, "parameters")?.to_value()?;
        RationalInner::from_schur_parameters(&p)?.eval(z)?
    } else {
        parse_colligation(input)?.characteristic_function(z)?
    };
    let payload = json!({ "z": docs::complex(z), "value": docs::complex(value) });
    Ok(Outcome::ok(payload, Vec::new()))
}

pub fn verify(input: &Value, settings: &Settings) -> Result<Outcome> {
    let m = parse_matrix(input)?;
    let unitary = unitarity(&m);
    if !unitary.passed() {
        let residual = unitary.residual;
        return Ok(Outcome::failed(
            json!({ "n": m.nrows() - 1 }),
            vec![unitary],
            Error::NotUnitary { residual },
        ));
    }
    let u = UnitaryColligation::new(m)?;
    let mut diagnostics = vec![unitary, minimality(&u)?];
    let mut disc_excess: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let z: Vec<C64> = (0..settings.samples)
        .map(|_| random::disc_point(&mut rng, 0.95))
        .collect();
    let zeta: Vec<C64> = (0..settings.samples)
        .map(|_| random::disc_point(&mut rng, 0.95))
        .collect();
    for w in z.iter().chain(disc_samples(64).iter()) {
        disc_excess = disc_excess.max(u.characteristic_function(*w)?.norm() - 1.0);
    }
    diagnostics.push(Diagnostic::new(
        "disc_contractivity",
        disc_excess.max(0.0),
        tol::INNER,
    ));
    if u.is_minimal()? {
        let mut circle: f64 = 0.0;
        for t in circle_samples(64) {
            circle = circle.max((u.characteristic_function(t)?.norm() - 1.0).abs());
        }
        diagnostics.push(Diagnostic::new("circle_unimodularity", circle, tol::INNER));
    }
    let spectral = u.verify_spectral_identities(&z, &zeta)?;
    diagnostics.push(Diagnostic::new(
        "spectral_identities",
        spectral.max_residual(),
        settings.tolerance,
    ));
    let report = u.minimality_report();
    let payload = json!({
        "n": u.n(),
        "rank_controllability": report.rank_controllability,
        "rank_observability": report.rank_observability,
        "rank_simplicity": report.rank_simplicity,
        "spectral": {
            "observability_kernel": spectral.observability_kernel,
            "controllability_kernel": spectral.controllability_kernel,
            "difference_quotient": spectral.difference_quotient,
            "pointwise": spectral.pointwise,
        },
    });
    Ok(Outcome::ok(payload, diagnostics))
}

pub fn params(input: &Value, settings: &Settings) -> Result<Outcome> {
    let probes = disc_samples(settings.samples.max(1));
    if has(input, "params") {
        let p = parse::<ParamsJson>(input, "parameters")?.to_value()?;
        let s = RationalInner::from_schur_parameters(&p)?;
        let back = s.schur_parameters()?;
        let diagnostics = vec![Diagnostic::new(
            "parameter_round_trip",
            max_gap(back.as_slice(), p.as_slice()),
            settings.tolerance,
        )];
        return Ok(Outcome::ok(
            to_value(&RationalJson::from_value(&s)),
            diagnostics,
        ));
    }
    let s = if has(input, "zeros") {
        parse::<BlaschkeJson>(input, "Blaschke product")?
            .to_value()?
            .to_rational()
    } else if has(input, "num") {
        parse::<RationalJson>(input, "rational function")?.to_value()?
    } else {
        return Err(invalid(
            "params expects {\"params\": ...}, {\"num\": ..., \"den\": ...} or a Blaschke product",
        ));
    };
    let p = s.schur_parameters()?;
    let rebuilt = RationalInner::from_schur_parameters(&p)?;
    let mut gap: f64 = 0.0;
    for z in probes {
        gap = gap.max((rebuilt.eval(z)? - s.eval(z)?).norm());
    }
    let diagnostics = vec![Diagnostic::new(
        "function_round_trip",
        gap,
        settings.tolerance,
    )];
    Ok(Outcome::ok(
        to_value(&ParamsJson::from_value(&p)),
        diagnostics,
    ))
}

fn max_gap(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}
