//! Seeded randomized trial runner and machine-readable reporting.
//!
//! Trial k draws its randomness from a ChaCha8 stream derived from the master
//! seed (`seed_from_u64(seed)` then `set_stream(k + 1)`), so reports are
//! bit-reproducible across machines: identical (seed, config) gives
//! byte-identical JSON. Exact residuals are serialized as `num/den` strings;
//! floats are printed with 17 significant digits. Per-trial timing goes to
//! the console log only — the JSON stays deterministic.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinatorics::VertexLabel;
use crate::euclidean4::{
    check_euclidean_relation, random_points4, Point4, CLOSURE_TOL, RELATION_TOL,
};
use crate::geometry3::{
    boundary_residuals, holonomy, transport_vertex, Configuration3, VolumeTable,
};
use crate::jacobians::{
    admissible_aux_faces, check_main_relation, check_ratio_independence, main_relation_residual,
    volume_products,
};
use crate::lambda_omega::{
    flatness_rank, lambda_map_rank, omega, solve_lambda, volumes_from_lambda, CentralFace,
};
use crate::scalars::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("coord-range must be at least 2")]
    CoordRangeTooSmall,
    #[error("no checks selected")]
    NoChecks,
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

/// The named checks the runner can execute.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum CheckKind {
    Boundary,
    Transport,
    Holonomy,
    Flatness,
    Rank,
    Ratio,
    Main,
    Euclidean,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Boundary,
        CheckKind::Transport,
        CheckKind::Holonomy,
        CheckKind::Flatness,
        CheckKind::Rank,
        CheckKind::Ratio,
        CheckKind::Main,
        CheckKind::Euclidean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Boundary => "boundary",
            CheckKind::Transport => "transport",
            CheckKind::Holonomy => "holonomy",
            CheckKind::Flatness => "flatness",
            CheckKind::Rank => "rank",
            CheckKind::Ratio => "ratio",
            CheckKind::Main => "main",
            CheckKind::Euclidean => "euclidean",
        }
    }

    fn needs_exact_configuration(self) -> bool {
        self != CheckKind::Euclidean
    }
}

impl FromStr for CheckKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| ConfigError::UnknownCheck(s.trim().to_string()))
    }
}

/// Runner configuration; see the CLI for the corresponding flags.
#[derive(Clone, PartialEq, Debug)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: u32,
    pub coord_range: i64,
    pub checks: Vec<CheckKind>,
    pub perturb_delta: Scalar,
    pub output_path: Option<PathBuf>,
    pub quiet: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            seed: 42,
            trials: 10,
            coord_range: 10,
            checks: CheckKind::ALL.to_vec(),
            perturb_delta: Scalar::new(1, 7).expect("nonzero denominator"),
            output_path: None,
            quiet: false,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if self.coord_range < 2 {
            return Err(ConfigError::CoordRangeTooSmall);
        }
        if self.checks.is_empty() {
            return Err(ConfigError::NoChecks);
        }
        Ok(())
    }

    /// Checks in canonical order with duplicates dropped.
    fn normalized_checks(&self) -> Vec<CheckKind> {
        let mut checks = self.checks.clone();
        checks.sort();
        checks.dedup();
        checks
    }
}

/// Euclidean relation directions sampled per trial.
const EUCLIDEAN_DIRECTIONS: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The drawn point was degenerate for this check (e.g. a perturbed
    /// denominator vanished); not a pass, not a failure.
    Skip,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl CheckOutcome {
    fn new(kind: CheckKind) -> Self {
        CheckOutcome {
            check: kind.name(),
            status: CheckStatus::Pass,
            residuals: Vec::new(),
            notes: Vec::new(),
            detail: None,
        }
    }

    fn fail(mut self, message: impl Into<String>) -> Self {
        self.status = CheckStatus::Fail;
        self.notes.push(message.into());
        self
    }

    fn skip(mut self, message: impl Into<String>) -> Self {
        self.status = CheckStatus::Skip;
        self.notes.push(message.into());
        self
    }
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct TrialRecord {
    pub index: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resamples: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<BTreeMap<String, [String; 3]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclidean_resamples: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclidean_points: Option<BTreeMap<String, [f64; 4]>>,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct FailureRef {
    pub trial: u32,
    pub check: &'static str,
    pub message: String,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Summary {
    pub trials: u32,
    pub checks_passed: u32,
    pub checks_failed: u32,
    pub checks_skipped: u32,
    pub all_passed: bool,
    pub total_resamples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<FailureRef>,
    /// Consensus winning denominator variant across euclidean trials, when
    /// they all agree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euclidean_winner: Option<String>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub trials: u32,
    pub coord_range: i64,
    pub checks: Vec<&'static str>,
    pub perturb_delta: String,
    pub euclidean_directions: usize,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct TrialReport {
    pub config: ConfigEcho,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Executes the selected checks over independently seeded trials.
pub fn run(config: &TrialConfig) -> Result<TrialReport, ConfigError> {
    config.validate()?;
    let checks = config.normalized_checks();
    let needs_exact = checks.iter().any(|c| c.needs_exact_configuration());

    let mut records = Vec::with_capacity(config.trials as usize);
    let mut total_resamples: u64 = 0;
    let mut euclidean_winners: Vec<Option<String>> = Vec::new();

    for index in 0..config.trials {
        let started = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(u64::from(index) + 1);

        let mut record = TrialRecord {
            index,
            resamples: None,
            coordinates: None,
            euclidean_resamples: None,
            euclidean_points: None,
            checks: Vec::new(),
        };

        let exact = if needs_exact {
            let (cfg, resamples) = Configuration3::random(&mut rng, config.coord_range);
            total_resamples += u64::from(resamples);
            record.resamples = Some(resamples);
            record.coordinates = Some(echo_coordinates(&cfg));
            Some(cfg)
        } else {
            None
        };

        for kind in &checks {
            let outcome = match kind {
                CheckKind::Boundary => check_boundary(exact.as_ref().unwrap()),
                CheckKind::Transport => check_transport(exact.as_ref().unwrap()),
                CheckKind::Holonomy => {
                    check_holonomy(exact.as_ref().unwrap(), &config.perturb_delta, &mut rng)
                }
                CheckKind::Flatness => {
                    check_flatness(exact.as_ref().unwrap(), &config.perturb_delta, &mut rng)
                }
                CheckKind::Rank => check_rank(exact.as_ref().unwrap()),
                CheckKind::Ratio => check_ratio(exact.as_ref().unwrap()),
                CheckKind::Main => check_main(exact.as_ref().unwrap()),
                CheckKind::Euclidean => {
                    let (points, resamples) = random_points4(&mut rng);
                    total_resamples += u64::from(resamples);
                    record.euclidean_resamples = Some(resamples);
                    record.euclidean_points = Some(echo_points4(&points));
                    let outcome = check_euclidean(&points, &mut rng);
                    euclidean_winners.push(
                        outcome
                            .detail
                            .as_ref()
                            .and_then(|d| d.get("winner"))
                            .and_then(|w| w.as_str())
                            .map(String::from),
                    );
                    outcome
                }
            };
            record.checks.push(outcome);
        }

        if !config.quiet {
            let mut line = format!("trial {index}:");
            for outcome in &record.checks {
                line.push_str(&format!(
                    " {}={}",
                    outcome.check,
                    match outcome.status {
                        CheckStatus::Pass => "pass",
                        CheckStatus::Fail => "FAIL",
                        CheckStatus::Skip => "skip",
                    }
                ));
            }
            let _ = writeln!(
                std::io::stderr(),
                "{line} ({} ms)",
                started.elapsed().as_millis()
            );
        }
        records.push(record);
    }

    let mut passed = 0;
    let mut failed = 0;
    let mut skipped = 0;
    let mut first_failure = None;
    for record in &records {
        for outcome in &record.checks {
            match outcome.status {
                CheckStatus::Pass => passed += 1,
                CheckStatus::Skip => skipped += 1,
                CheckStatus::Fail => {
                    failed += 1;
                    if first_failure.is_none() {
                        first_failure = Some(FailureRef {
                            trial: record.index,
                            check: outcome.check,
                            message: outcome
                                .notes
                                .first()
                                .cloned()
                                .unwrap_or_else(|| "check failed".to_string()),
                        });
                    }
                }
            }
        }
    }

    let euclidean_winner = match euclidean_winners.first() {
        Some(first) if euclidean_winners.iter().all(|w| w == first) => first.clone(),
        _ => None,
    };

    Ok(TrialReport {
        config: ConfigEcho {
            seed: config.seed,
            trials: config.trials,
            coord_range: config.coord_range,
            checks: checks.iter().map(|c| c.name()).collect(),
            perturb_delta: config.perturb_delta.to_string(),
            euclidean_directions: EUCLIDEAN_DIRECTIONS,
        },
        trials: records,
        summary: Summary {
            trials: config.trials,
            checks_passed: passed,
            checks_failed: failed,
            checks_skipped: skipped,
            all_passed: failed == 0,
            total_resamples,
            first_failure,
            euclidean_winner,
        },
    })
}

fn echo_coordinates(cfg: &Configuration3) -> BTreeMap<String, [String; 3]> {
    VertexLabel::ALL
        .into_iter()
        .map(|v| {
            let p = cfg.point(v);
            (
                v.to_string(),
                [p.x.to_string(), p.y.to_string(), p.z.to_string()],
            )
        })
        .collect()
}

fn echo_points4(points: &[Point4; 6]) -> BTreeMap<String, [f64; 4]> {
    VertexLabel::ALL
        .into_iter()
        .map(|v| (v.to_string(), points[v.index()].0))
        .collect()
}

fn random_aux_face(rng: &mut impl Rng) -> crate::combinatorics::FaceKey {
    let aux = admissible_aux_faces();
    aux[rng.random_range(0..aux.len())]
}

fn check_boundary(cfg: &Configuration3) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Boundary);
    let residuals = boundary_residuals(&VolumeTable::from_configuration(cfg));
    outcome.residuals = residuals.iter().map(|r| r.to_string()).collect();
    if residuals.iter().any(|r| !r.is_zero()) {
        return outcome.fail("a boundary relation has nonzero residual");
    }
    outcome
}

fn check_transport(cfg: &Configuration3) -> CheckOutcome {
    use VertexLabel::{C, D, E, F};
    let mut outcome = CheckOutcome::new(CheckKind::Transport);
    let vt = VolumeTable::from_configuration(cfg);
    for (from, to) in [(D, E), (E, F), (F, D)] {
        let coeffs = match transport_vertex(&vt, from, to) {
            Ok(c) => c,
            Err(e) => return outcome.fail(format!("transport {from}->{to}: {e}")),
        };
        let got = coeffs.apply(
            &cfg.edge_vector(C, VertexLabel::A),
            &cfg.edge_vector(C, VertexLabel::B),
            &cfg.edge_vector(C, from),
        );
        let want = cfg.edge_vector(C, to);
        for (g, w) in [(&got.x, &want.x), (&got.y, &want.y), (&got.z, &want.z)] {
            outcome.residuals.push((g.clone() - w.clone()).to_string());
        }
        if got != want {
            return outcome.fail(format!("transported C{to} differs from {to}-C"));
        }
    }
    outcome
}

fn check_holonomy(
    cfg: &Configuration3,
    delta: &Scalar,
    rng: &mut impl Rng,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Holonomy);
    let vt = VolumeTable::from_configuration(cfg);
    let (c_a, c_b, c_d) = match holonomy(&vt) {
        Ok(h) => h,
        Err(e) => return outcome.fail(format!("holonomy: {e}")),
    };
    let flat_ok = c_a.is_zero() && c_b.is_zero() && (c_d.clone() - Scalar::from_integer(1)).is_zero();
    outcome.residuals.extend([
        c_a.to_string(),
        c_b.to_string(),
        (c_d - Scalar::from_integer(1)).to_string(),
    ]);
    if !flat_ok {
        return outcome.fail("holonomy differs from (0, 0, 1) on an embedded table");
    }

    // perturbed table: coefficients must match ω·V_ABCD exactly
    let lambda = match solve_lambda(&vt) {
        Ok(l) => l,
        Err(e) => return outcome.fail(format!("solve_lambda: {e}")),
    };
    let face = random_aux_face(rng);
    let bent = volumes_from_lambda(&lambda.perturbed(&face, delta));
    let (w, h) = match (omega(CentralFace::Abc, &bent), holonomy(&bent)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => {
            return outcome.skip(format!(
                "perturbation at {face} made a denominator volume vanish"
            ))
        }
    };
    let v_abcd = bent
        .signed([VertexLabel::A, VertexLabel::B, VertexLabel::C, VertexLabel::D])
        .expect("distinct");
    let res_a = h.0 - w.w1 * v_abcd.clone();
    let res_b = h.1 - w.w2 * v_abcd;
    let res_d = h.2 - Scalar::from_integer(1);
    outcome.notes.push(format!("perturbed face {face}"));
    outcome
        .residuals
        .extend([res_a.to_string(), res_b.to_string(), res_d.to_string()]);
    if !res_a.is_zero() || !res_b.is_zero() || !res_d.is_zero() {
        return outcome.fail("holonomy coefficients differ from ω·V_ABCD on perturbed table");
    }
    outcome
}

fn check_flatness(
    cfg: &Configuration3,
    delta: &Scalar,
    rng: &mut impl Rng,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Flatness);
    let vt = VolumeTable::from_configuration(cfg);
    for face in CentralFace::BOTH {
        match omega(face, &vt) {
            Ok(pair) => {
                outcome.residuals.push(pair.w1.to_string());
                outcome.residuals.push(pair.w2.to_string());
                if !pair.is_zero() {
                    return outcome.fail(format!("ω_{face} nonzero on an embedded table"));
                }
            }
            Err(e) => return outcome.fail(format!("ω_{face}: {e}")),
        }
    }
    let lambda = match solve_lambda(&vt) {
        Ok(l) => l,
        Err(e) => return outcome.fail(format!("solve_lambda: {e}")),
    };
    if volumes_from_lambda(&lambda) != vt {
        return outcome.fail("λ round-trip does not reproduce the volume table");
    }
    outcome.notes.push("lambda round-trip exact".to_string());

    let face = random_aux_face(rng);
    let bent = volumes_from_lambda(&lambda.perturbed(&face, delta));
    let perturbed_nonzero = CentralFace::BOTH.into_iter().any(|f| {
        omega(f, &bent).map(|pair| !pair.is_zero()).unwrap_or(true)
    });
    outcome.notes.push(format!(
        "perturbation at {face}: omega {}",
        if perturbed_nonzero { "nonzero" } else { "stayed zero" }
    ));
    outcome
}

fn check_rank(cfg: &Configuration3) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Rank);
    let map_rank = lambda_map_rank();
    let lambda = match solve_lambda(&VolumeTable::from_configuration(cfg)) {
        Ok(l) => l,
        Err(e) => return outcome.fail(format!("solve_lambda: {e}")),
    };
    let flat_rank = match flatness_rank(&lambda) {
        Ok(r) => r,
        Err(e) => return outcome.fail(format!("flatness_rank: {e}")),
    };
    outcome.detail = Some(json!({
        "lambda_map_rank": map_rank,
        "flatness_rank": flat_rank,
    }));
    if map_rank != 10 {
        return outcome.fail(format!("λ→V map rank {map_rank}, expected 10"));
    }
    if flat_rank != 3 {
        return outcome.fail(format!("flatness rank {flat_rank}, expected 3"));
    }
    outcome
}

fn check_ratio(cfg: &Configuration3) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Ratio);
    let lambda = match solve_lambda(&VolumeTable::from_configuration(cfg)) {
        Ok(l) => l,
        Err(e) => return outcome.fail(format!("solve_lambda: {e}")),
    };
    let report = match check_ratio_independence(&lambda) {
        Ok(r) => r,
        Err(e) => return outcome.fail(format!("ratio independence: {e}")),
    };
    outcome.detail = Some(json!({
        "pairs_checked": report.pairs_checked,
        "zero_jacobians": report
            .zero_jacobians
            .iter()
            .map(|(f, i)| format!("{f}:{i}"))
            .collect::<Vec<_>>(),
        "violations": report
            .violations
            .iter()
            .map(|v| format!("({}, {}): {} != {}", v.face_i, v.face_j, v.lhs, v.rhs))
            .collect::<Vec<_>>(),
    }));
    if !report.holds() {
        return outcome.fail(format!(
            "{} cross-multiplied pair equalities violated",
            report.violations.len()
        ));
    }
    outcome
}

fn check_main(cfg: &Configuration3) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Main);
    let lambda = match solve_lambda(&VolumeTable::from_configuration(cfg)) {
        Ok(l) => l,
        Err(e) => return outcome.fail(format!("solve_lambda: {e}")),
    };
    let (p_abc, p_def) = volume_products(&lambda);
    let products_coincide = p_abc == p_def;
    let mut vacuous = Vec::new();
    for aux in admissible_aux_faces() {
        let residual = match check_main_relation(&lambda, &aux) {
            Ok(r) => r,
            Err(e) => return outcome.fail(format!("main relation at {aux}: {e}")),
        };
        outcome.residuals.push(residual.to_string());
        if !residual.is_zero() {
            return outcome.fail(format!("main relation residual nonzero at {aux}"));
        }
        if products_coincide {
            continue;
        }
        // with distinct volume products, a wrong exponent can only keep the
        // residual zero when both Jacobians vanish
        let guard1 = main_relation_residual(&lambda, &aux, 1).expect("same preconditions");
        let guard3 = main_relation_residual(&lambda, &aux, 3).expect("same preconditions");
        match (guard1.is_zero(), guard3.is_zero()) {
            (true, true) => vacuous.push(aux.to_string()),
            (false, false) => {}
            _ => {
                return outcome.fail(format!(
                    "exponent guard inconsistent at {aux}: one of exponents 1/3 vanished"
                ))
            }
        }
    }
    if products_coincide {
        outcome
            .notes
            .push("volume products coincide; exponent guard skipped".to_string());
    } else if !vacuous.is_empty() {
        outcome
            .notes
            .push(format!("zero-Jacobian aux faces: {}", vacuous.join(", ")));
    }
    outcome
}

fn check_euclidean(points: &[Point4; 6], rng: &mut impl Rng) -> CheckOutcome {
    let mut outcome = CheckOutcome::new(CheckKind::Euclidean);
    let report = match check_euclidean_relation(points, EUCLIDEAN_DIRECTIONS, rng) {
        Ok(r) => r,
        Err(e) => return outcome.skip(format!("euclidean relation: {e}")),
    };
    let closure = report.sign_assignments[0]
        .closure_residual
        .max(report.sign_assignments[1].closure_residual);
    outcome.detail = Some(json!({
        "winner": report.winner.map(|v| v.name()),
        "variants": report
            .outcomes
            .iter()
            .map(|o| {
                json!({
                    "variant": o.variant.name(),
                    "max_residual": o.max_residual,
                    "relative_sign": o.relative_sign,
                    "holds": o.holds,
                })
            })
            .collect::<Vec<_>>(),
        "signs_abc": report.sign_assignments[0].signs,
        "signs_def": report.sign_assignments[1].signs,
        "closure_residual": closure,
        "step_stability": report.step_stability,
        "area_abc": report.area_abc,
        "area_def": report.area_def,
    }));
    if closure >= CLOSURE_TOL {
        return outcome.fail(format!("angle-sum closure {closure:e} above tolerance"));
    }
    if report.step_stability >= RELATION_TOL {
        return outcome.fail(format!(
            "gradient step-stability {:e} above tolerance",
            report.step_stability
        ));
    }
    if report.winner.is_none() {
        return outcome.fail("no unique denominator variant holds");
    }
    outcome
}

/// Serializes the report as a single JSON document with floats printed at 17
/// significant digits; byte-identical across runs for identical inputs.
pub fn report_to_json(report: &TrialReport) -> String {
    struct SciFloat;
    impl serde_json::ser::Formatter for SciFloat {
        fn write_f64<W: ?Sized + std::io::Write>(
            &mut self,
            writer: &mut W,
            value: f64,
        ) -> std::io::Result<()> {
            if value.is_finite() {
                write!(writer, "{:.16e}", value)
            } else {
                writer.write_all(b"null")
            }
        }
    }
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFloat);
    report
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serializer emits UTF-8")
}
