//! Row rendering shared by the subcommands.
//!
//! CSV cells round metric floats to six significant digits for the eye;
//! JSON output keeps every value unrounded. The `k` column is the one
//! exception in CSV: it echoes the requested ring size in shortest
//! round-trip form so a row can be fed back in without drift.

use hypernet::{
    Bottleneck, Count, DemandProfile, Result, ServiceTimes, StructuralMetrics, TopologySpec,
};
use serde::Serialize;

/// Header for `metrics` rows.
pub const METRICS_HEADER: &str =
    "family,v,radius,d,k,n_total,diameter,links,avg_hops,f_link,d_link,d_peer,x_max,x_relative,bottleneck";

/// Header for `simulate` rows.
pub const SIM_HEADER: &str = "family,v,radius,d,k,pairs,seed,rng,mean_hops_estimate,\
standard_error,f_link_mean_estimate,f_link_max_estimate,x_max_uniform_estimate";

/// One topology's structural and demand metrics, ready to print.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub family: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub n_total: Count,
    pub diameter: f64,
    pub links: Count,
    pub avg_hops: f64,
    pub f_link: f64,
    pub d_link: f64,
    pub d_peer: f64,
    pub x_max: f64,
    pub x_relative: f64,
    pub bottleneck: Bottleneck,
}

impl OutputRecord {
    pub fn build(spec: &TopologySpec, times: ServiceTimes) -> Result<Self> {
        let metrics = StructuralMetrics::compute(spec)?;
        let profile = DemandProfile::from_metrics(&metrics, times);
        let params = spec.params();
        Ok(OutputRecord {
            family: spec.family().token(),
            v: params.v,
            radius: params.radius,
            d: params.d,
            k: params.k,
            n_total: metrics.n_total,
            diameter: metrics.diameter,
            links: metrics.links,
            avg_hops: metrics.avg_hops,
            f_link: profile.f_link,
            d_link: profile.d_link,
            d_peer: profile.d_peer,
            x_max: profile.x_max,
            x_relative: profile.x_relative,
            bottleneck: profile.bottleneck,
        })
    }

    pub fn csv_row(&self) -> String {
        let cells = [
            self.family.to_string(),
            opt_cell(self.v),
            opt_cell(self.radius),
            opt_cell(self.d),
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            count_cell(self.n_total),
            sig6(self.diameter),
            count_cell(self.links),
            sig6(self.avg_hops),
            sig6(self.f_link),
            sig6(self.d_link),
            sig6(self.d_peer),
            sig6(self.x_max),
            sig6(self.x_relative),
            self.bottleneck.to_string(),
        ];
        cells.join(",")
    }
}

/// The five spec columns shared by `metrics` and `simulate` rows.
pub fn spec_cells(spec: &TopologySpec) -> [String; 5] {
    let params = spec.params();
    [
        spec.family().token().to_string(),
        opt_cell(params.v),
        opt_cell(params.radius),
        opt_cell(params.d),
        params.k.map(|k| k.to_string()).unwrap_or_default(),
    ]
}

fn opt_cell<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Exact counts print as integers; analytic reals go through [`sig6`].
pub fn count_cell(count: Count) -> String {
    match count.exact() {
        Some(n) => n.to_string(),
        None => sig6(count.get()),
    }
}

/// Six significant digits, plain decimal inside [1e-9, 1e15), exponent
/// notation outside, trailing zeros trimmed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs();
    if (1e-9..1e15).contains(&magnitude) {
        let decimals = 5 - magnitude.log10().floor() as i32;
        if decimals <= 0 {
            let scale = 10f64.powi(-decimals);
            format!("{}", (x / scale).round() * scale)
        } else {
            trim_decimal(format!("{:.*}", decimals as usize, x))
        }
    } else {
        trim_exponent(format!("{x:.5e}"))
    }
}

fn trim_decimal(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn trim_exponent(s: String) -> String {
    match s.split_once('e') {
        Some((mantissa, exponent)) => {
            format!("{}e{exponent}", trim_decimal(mantissa.to_string()))
        }
        None => s,
    }
}

/// Quote a CSV field only when it needs it.
pub fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
