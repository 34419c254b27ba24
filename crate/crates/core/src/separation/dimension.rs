use serde::Serialize;

use crate::ifs::IfsSystem;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionReport {
    pub maps: usize,
    pub ratio_denominator: u32,
    pub value: f64,
    pub decimal: String,
}

/// Similarity dimension `ln n / ln m`, the Hausdorff dimension of the
/// attractor whenever the open set condition holds.
pub fn osc_dimension(sys: &IfsSystem, digits: usize) -> DimensionReport {
    let n = sys.alphabet_size();
    let m = sys.ratio_denominator();
    let value = (n as f64).ln() / f64::from(m).ln();
    DimensionReport {
        maps: n,
        ratio_denominator: m,
        value,
        decimal: format!("{value:.digits$}"),
    }
}
