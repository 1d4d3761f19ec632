use std::io::Write;

use super::PrCurve;
use crate::error::Result;

/// Writes `depth,recall,precision` rows under a header line.
pub fn write_pr_curve_csv<W: Write>(curve: &PrCurve, mut out: W) -> Result<()> {
    writeln!(out, "depth,recall,precision")?;
    for p in curve.points() {
        writeln!(out, "{},{},{}", p.depth, p.recall, p.precision)?;
    }
    Ok(())
}

/// Writes `metric<TAB>value` rows under a header line, in the given order.
pub fn write_metrics_tsv<W: Write>(metrics: &[(String, String)], mut out: W) -> Result<()> {
    writeln!(out, "metric\tvalue")?;
    for (name, value) in metrics {
        writeln!(out, "{name}\t{value}")?;
    }
    Ok(())
}
