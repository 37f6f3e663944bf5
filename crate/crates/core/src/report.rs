//! Fit reports in JSON and plain text.
//!
//! JSON numbers are written with 17 significant digits (`{:.16e}`), which
//! parse back to the identical `f64`. Non-finite values become `null`.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::certificate::{
    extract_certificate, verify_identities, CertificateError, CertificateReport, DualCertificate,
};
use crate::equioscillation::{alternation_pattern, ReferenceSet};
use crate::fit::{FitResult, ProblemInstance};
use crate::oracle::{brute_force_fit, compare_with_fit, OracleComparison, OracleResult};

/// Either a computed block or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Section<T> {
    Available(T),
    Unavailable { unavailable: String },
}

impl<T> Section<T> {
    fn from_result<E: std::fmt::Display>(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Section::Available(v),
            Err(e) => Section::Unavailable {
                unavailable: e.to_string(),
            },
        }
    }

    pub fn available(&self) -> Option<&T> {
        match self {
            Section::Available(v) => Some(v),
            Section::Unavailable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub weighted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledCoefficient {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub value: f64,
    pub fitted: f64,
    pub residual: f64,
    pub weight: f64,
    pub scaled_residual: f64,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub objective: f64,
    pub dual_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateBlock {
    pub dual: DualCertificate,
    #[serde(flatten)]
    pub checks: CertificateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleBlock {
    pub result: OracleResult,
    #[serde(flatten)]
    pub comparison: OracleComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub instance: InstanceSummary,
    pub coefficients: Vec<LabeledCoefficient>,
    pub discrepancy: f64,
    pub exact_interpolation: bool,
    pub low_rank: bool,
    pub active_points: Vec<usize>,
    pub residuals: Vec<ResidualRow>,
    pub solver: SolverSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Section<CertificateBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternation: Option<Section<ReferenceSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Section<OracleBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportOptions {
    /// Dual certificate, identity checks and alternation analysis.
    pub certify: bool,
    /// Brute-force comparison when the instance is small enough.
    pub verify: bool,
}

fn certificate_block(
    fit: &FitResult,
    instance: &ProblemInstance,
) -> Result<CertificateBlock, CertificateError> {
    let dual = extract_certificate(fit, instance)?;
    let checks = verify_identities(&dual, fit, instance)?;
    Ok(CertificateBlock { dual, checks })
}

impl FitReport {
    pub fn build(instance: &ProblemInstance, fit: &FitResult, options: ReportOptions) -> Self {
        let active: std::collections::HashSet<usize> = fit.active_points.iter().copied().collect();
        let residuals = (0..instance.len())
            .map(|i| ResidualRow {
                index: i,
                point: instance.points()[i].coordinates.clone(),
                value: instance.values()[i],
                fitted: instance.values()[i] - fit.residuals[i],
                residual: fit.residuals[i],
                weight: instance.weight(i),
                scaled_residual: fit.scaled_residuals[i],
                active: active.contains(&i),
            })
            .collect();
        let coefficients = instance
            .basis()
            .labels()
            .into_iter()
            .zip(&fit.coefficients)
            .map(|(label, &value)| LabeledCoefficient {
                label: label.to_string(),
                value,
            })
            .collect();
        let certificate = options
            .certify
            .then(|| Section::from_result(certificate_block(fit, instance)));
        let alternation = options
            .certify
            .then(|| Section::from_result(alternation_pattern(fit, instance)));
        let oracle = options.verify.then(|| {
            Section::from_result(brute_force_fit(instance).and_then(|result| {
                let comparison = compare_with_fit(fit, &result, instance)?;
                Ok(OracleBlock { result, comparison })
            }))
        });
        FitReport {
            instance: InstanceSummary {
                n: instance.len(),
                m: instance.num_functions(),
                p: instance.dimension(),
                weighted: instance.is_weighted(),
            },
            coefficients,
            discrepancy: fit.discrepancy,
            exact_interpolation: fit.exact_interpolation,
            low_rank: fit.low_rank,
            active_points: fit.active_points.clone(),
            residuals,
            solver: SolverSummary {
                iterations: fit.solution.iterations,
                objective: fit.solution.objective_value,
                dual_objective: fit.solution.dual_objective,
            },
            certificate,
            alternation,
            oracle,
            timing_ms: None,
        }
    }

    /// `Some(false)` when a brute-force comparison ran and disagreed.
    pub fn oracle_agrees(&self) -> Option<bool> {
        self.oracle
            .as_ref()
            .and_then(Section::available)
            .map(|o| o.comparison.agrees)
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats::default());
        self.serialize(&mut ser).expect("report serializes");
        buf.push(b'\n');
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let i = &self.instance;
        let _ = writeln!(
            s,
            "points {}  functions {}  dimension {}{}",
            i.n,
            i.m,
            i.p,
            if i.weighted { "  weighted" } else { "" }
        );
        let _ = writeln!(s, "discrepancy {:.16e}", self.discrepancy);
        if self.exact_interpolation {
            let _ = writeln!(s, "exact interpolation");
        }
        if self.low_rank {
            let _ = writeln!(
                s,
                "design matrix is rank deficient; coefficients may not be unique"
            );
        }
        let _ = writeln!(s, "coefficients");
        for c in &self.coefficients {
            let _ = writeln!(s, "  {:<24} {:>24.16e}", c.label, c.value);
        }
        let _ = writeln!(s, "residuals");
        for r in &self.residuals {
            let point: Vec<String> = r.point.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(
                s,
                "  {:>4}  ({})  y {:.10e}  r {:+.10e}{}",
                r.index,
                point.join(", "),
                r.value,
                r.residual,
                if r.active { "  *" } else { "" }
            );
        }
        match &self.certificate {
            Some(Section::Available(c)) => {
                let k = &c.checks;
                let _ = writeln!(s, "certificate");
                let _ = writeln!(
                    s,
                    "  duality gap       {:.3e}  {}",
                    k.strong_duality_gap,
                    pass(k.duality_pass)
                );
                let _ = writeln!(
                    s,
                    "  beta sum residual {:.3e}  {}",
                    k.beta_sum_residual,
                    pass(k.beta_sum_pass)
                );
                let worst = k
                    .orthogonality_residuals
                    .iter()
                    .fold(0.0_f64, |a, v| a.max(v.abs()));
                let _ = writeln!(
                    s,
                    "  orthogonality     {:.3e}  {}",
                    worst,
                    pass(k.orthogonality_pass)
                );
                let _ = writeln!(
                    s,
                    "  identity h        {:.3e}  {}",
                    k.identity_h_residual,
                    pass(k.identity_h_pass)
                );
                let _ = writeln!(
                    s,
                    "  active points     {}  {}",
                    k.theorem1_active_count,
                    pass(k.theorem1_pass)
                );
                match k.theorem2_pass {
                    Some(ok) => {
                        let _ = writeln!(
                            s,
                            "  overshoot/undershoot sums {:.12} / {:.12}  {}",
                            c.dual.odd_sum,
                            c.dual.even_sum,
                            pass(ok)
                        );
                    }
                    None => {
                        let _ = writeln!(s, "  overshoot/undershoot balance not applicable (first function is not 1)");
                    }
                }
            }
            Some(Section::Unavailable { unavailable }) => {
                let _ = writeln!(s, "certificate unavailable: {unavailable}");
            }
            None => {}
        }
        match &self.alternation {
            Some(Section::Available(r)) => {
                let signs: String = r
                    .signs
                    .iter()
                    .map(|&v| if v > 0 { '+' } else { '-' })
                    .collect();
                let _ = writeln!(
                    s,
                    "alternation {signs}  ({} points, degree {})  {}",
                    r.len(),
                    r.degree,
                    if r.equioscillates {
                        "equioscillates"
                    } else {
                        "does not equioscillate"
                    }
                );
            }
            Some(Section::Unavailable { unavailable }) => {
                let _ = writeln!(s, "alternation unavailable: {unavailable}");
            }
            None => {}
        }
        match &self.oracle {
            Some(Section::Available(o)) => {
                let _ = writeln!(
                    s,
                    "oracle discrepancy {:.16e}  difference {:.3e}  {}",
                    o.result.discrepancy,
                    o.comparison.discrepancy_difference,
                    if o.comparison.agrees {
                        "agrees"
                    } else {
                        "DISAGREES"
                    }
                );
            }
            Some(Section::Unavailable { unavailable }) => {
                let _ = writeln!(s, "oracle unavailable: {unavailable}");
            }
            None => {}
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "time {t:.3} ms");
        }
        s
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Pretty printer that writes every `f64` with 17 significant digits.
#[derive(Default)]
pub struct ExactFloats {
    inner: PrettyFormatter<'static>,
}

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // Negative zero prints as zero.
        let value = if value == 0.0 { 0.0 } else { value };
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSet;
    use crate::fit::fit;

    fn hat() -> ProblemInstance {
        ProblemInstance::from_xy(
            &[0.0, 1.0, 2.0],
            &[0.0, 1.0, 0.0],
            BasisSet::parse("1,x", 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let i = hat();
        let r = FitReport::build(&i, &fit(&i).unwrap(), ReportOptions::default());
        let json = r.to_json();
        assert!(
            json.contains("\"discrepancy\": 5.0000000000000000e-1"),
            "{json}"
        );
        assert!(!json.contains("certificate"));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["discrepancy"].as_f64(), Some(0.5));
        assert_eq!(v["instance"]["n"].as_u64(), Some(3));
    }

    #[test]
    fn certify_and_verify_blocks() {
        let i = hat();
        let opts = ReportOptions {
            certify: true,
            verify: true,
        };
        let r = FitReport::build(&i, &fit(&i).unwrap(), opts);
        let c = r.certificate.as_ref().unwrap().available().unwrap();
        assert!(
            c.checks.theorem1_pass && c.checks.theorem2_pass == Some(true) && c.checks.all_pass
        );
        assert!(
            r.alternation
                .as_ref()
                .unwrap()
                .available()
                .unwrap()
                .equioscillates
        );
        assert_eq!(r.oracle_agrees(), Some(true));
        let text = r.to_text();
        assert!(text.contains("equioscillates") && text.contains("agrees"));
    }

    #[test]
    fn non_finite_becomes_null() {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats::default());
        vec![f64::NAN, 1.0].serialize(&mut ser).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("null") && s.contains("1.0000000000000000e0"));
    }

    #[test]
    fn unavailable_sections_explain() {
        let b = BasisSet::parse("1, x, y", 2).unwrap();
        let pts = vec![
            [0.0, 0.0].into(),
            [1.0, 0.0].into(),
            [0.0, 1.0].into(),
            [1.0, 1.0].into(),
        ];
        let i = ProblemInstance::new(pts, vec![0.0, 1.0, 1.0, 0.0], b).unwrap();
        let r = FitReport::build(
            &i,
            &fit(&i).unwrap(),
            ReportOptions {
                certify: true,
                verify: false,
            },
        );
        let json = r.to_json();
        assert!(json.contains("\"unavailable\""));
        assert!(r.certificate.unwrap().available().is_some());
    }
}
