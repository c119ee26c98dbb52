//! Detection and tandem metrics: EER, minDCF, actDCF, Cllr, a-DCF, t-DCF and
//! t-EER, plus attack/codec breakdown tables.
//!
//! Rates are fractions in `[0, 1]`; costs are normalized so that the better
//! of the accept-all and reject-all systems scores 1.

mod binary;
mod breakdown;
mod cost;
mod sasv;
mod scores;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{format_real, Real, Report};

pub use binary::{
    act_dcf, bayes_threshold, cllr, det_curve, eer, eer_point, min_dcf, softplus, DcfMinimum, DetPoint, EerPoint,
};
pub use breakdown::{grouped_eval, grouped_eval_sasv, BreakdownRow, BreakdownTable, CmMetric, GroupBy, POOLED};
pub use cost::{CostModel, ProfileSet};
pub use sasv::{a_dcf, default_asv_threshold, t_dcf, t_eer, TandemDcf, TandemEer, TeerGrid};
pub use scores::{BinaryScores, PairedSasvScores, SasvScores, TandemScore};

/// Metric summary for one system. Fields that were not computed are omitted
/// from serialized output.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_dcf: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub act_dcf: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cllr: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eer: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_dcf_threshold: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eer_threshold: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_dcf: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_dcf_threshold: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_dcf: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_dcf_asv_threshold: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_dcf_cm_threshold: Option<Real>,
    /// `Some(NaN)` (serialized as `null`) when no concurrent point exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eer: Option<Real>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl MetricReport {
    /// EER, minDCF, actDCF and Cllr of a two-class score set; the scores
    /// are taken as LLRs for actDCF and Cllr.
    pub fn binary(s: &BinaryScores, cm: &CostModel) -> Result<Self> {
        let e = eer_point(s);
        let m = min_dcf(s, cm)?;
        Ok(Self {
            min_dcf: Some(Real(m.value)),
            act_dcf: Some(Real(act_dcf(s, cm)?)),
            cllr: Some(Real(cllr(s))),
            eer: Some(Real(e.eer)),
            min_dcf_threshold: Some(Real(m.threshold)),
            eer_threshold: Some(Real(e.threshold)),
            ..Self::default()
        })
    }

    /// SASV metrics: min a-DCF on `fused` and, when `paired` is given, min
    /// t-DCF at the default ASV operating point and t-EER.
    pub fn sasv(fused: &SasvScores, paired: Option<&PairedSasvScores>, cm: &CostModel, grid: TeerGrid) -> Result<Self> {
        let a = a_dcf(fused, cm)?;
        let mut report =
            Self { a_dcf: Some(Real(a.value)), a_dcf_threshold: Some(Real(a.threshold)), ..Self::default() };
        if let Some(p) = paired {
            let t = t_dcf(p, default_asv_threshold(p)?, cm)?;
            report.t_dcf = Some(Real(t.value));
            report.t_dcf_asv_threshold = Some(Real(t.asv_threshold));
            report.t_dcf_cm_threshold = Some(Real(t.cm_threshold));
            report.t_eer = Some(Real(match t_eer(p, grid) {
                Ok(r) => r.rate,
                Err(Error::NoConcurrentPoint) => {
                    report.warnings.push("t-EER: no concurrent operating point on the grid".into());
                    f64::NAN
                }
                Err(e) => return Err(e),
            }));
        }
        Ok(report)
    }

    fn fields(&self) -> Vec<(&'static str, Real)> {
        [
            ("min_dcf", self.min_dcf),
            ("act_dcf", self.act_dcf),
            ("cllr", self.cllr),
            ("eer", self.eer),
            ("min_dcf_threshold", self.min_dcf_threshold),
            ("eer_threshold", self.eer_threshold),
            ("a_dcf", self.a_dcf),
            ("a_dcf_threshold", self.a_dcf_threshold),
            ("t_dcf", self.t_dcf),
            ("t_dcf_asv_threshold", self.t_dcf_asv_threshold),
            ("t_dcf_cm_threshold", self.t_dcf_cm_threshold),
            ("t_eer", self.t_eer),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }

    /// One-line human summary; rates in percent.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let mut put = |label: &str, v: Option<Real>, percent: bool| {
            if let Some(Real(x)) = v {
                if !out.is_empty() {
                    out.push_str("  ");
                }
                if !x.is_finite() {
                    let _ = write!(out, "{label} n/a");
                } else if percent {
                    let _ = write!(out, "{label} {:.2}%", 100.0 * x);
                } else {
                    let _ = write!(out, "{label} {x:.4}");
                }
            }
        };
        put("minDCF", self.min_dcf, false);
        put("actDCF", self.act_dcf, false);
        put("Cllr", self.cllr, false);
        put("EER", self.eer, true);
        put("min a-DCF", self.a_dcf, false);
        put("min t-DCF", self.t_dcf, false);
        put("t-EER", self.t_eer, true);
        out
    }
}

impl Report for MetricReport {
    const KIND: &'static str = "metric report";

    fn to_csv(&self) -> Option<String> {
        let fields = self.fields();
        let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let values: Vec<String> = fields.iter().map(|(_, v)| format_real(v.0)).collect();
        Some(format!("{}\n{}\n", header.join(","), values.join(",")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{write_report, ReportFormat};

    #[test]
    fn json_field_order_and_rounding() {
        let r = MetricReport {
            min_dcf: Some(Real(0.1348)),
            act_dcf: Some(Real(0.2170)),
            cllr: Some(Real(0.3096)),
            eer: Some(Real(0.0502)),
            ..MetricReport::default()
        };
        let json = String::from_utf8(write_report(&r, ReportFormat::Json).unwrap()).unwrap();
        assert_eq!(
            json,
            "{\n  \"min_dcf\": 0.1348,\n  \"act_dcf\": 0.217,\n  \"cllr\": 0.3096,\n  \"eer\": 0.0502\n}\n"
        );
        assert_eq!(write_report(&r, ReportFormat::Json).unwrap(), json.as_bytes());
        assert_eq!(r.summary(), "minDCF 0.1348  actDCF 0.2170  Cllr 0.3096  EER 5.02%");
        let csv = String::from_utf8(write_report(&r, ReportFormat::Csv).unwrap()).unwrap();
        assert_eq!(csv, "min_dcf,act_dcf,cllr,eer\n0.1348,0.217,0.3096,0.0502\n");
    }

    #[test]
    fn missing_t_eer_serializes_as_null() {
        let r = MetricReport {
            a_dcf: Some(Real(0.1295)),
            t_dcf: Some(Real(0.4372)),
            t_eer: Some(Real(f64::NAN)),
            ..Default::default()
        };
        let json = String::from_utf8(write_report(&r, ReportFormat::Json).unwrap()).unwrap();
        assert!(json.contains("\"t_eer\": null"));
        assert!(r.summary().contains("t-EER n/a"));
    }

    #[test]
    fn binary_report_orders_min_below_act() {
        let s = BinaryScores::new(vec![0.3, 2.0, -0.5, 1.0], vec![-1.0, 0.4, -2.0]).unwrap();
        let r = MetricReport::binary(&s, &CostModel::uniform()).unwrap();
        assert!(r.min_dcf.unwrap().0 <= r.act_dcf.unwrap().0);
    }
}
