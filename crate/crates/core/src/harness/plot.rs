//! Gnuplot script for comparing error curves.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Writes a log-log gnuplot script of `mean_sq_err` against `k` for each CSV.
/// Paths are written as given, so relative paths resolve against the script's directory
/// when gnuplot runs there.
pub fn emit_plot_script(inputs: &[(String, PathBuf)], out: &Path) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("no curves to plot".into()));
    }
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set logscale xy\n");
    s.push_str("set format y '10^{%L}'\n");
    s.push_str("set xlabel 'iteration k'\n");
    s.push_str("set ylabel 'mean squared distance to equilibrium'\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    writeln!(s, "set output '{stem}.png'").unwrap();
    let curves: Vec<String> = inputs
        .iter()
        .map(|(label, path)| {
            format!(
                "'{}' using 1:2 with lines title '{}'",
                path.display().to_string().replace('\'', "''"),
                label.replace('\'', "''")
            )
        })
        .collect();
    writeln!(s, "plot {}", curves.join(", \\\n     ")).unwrap();
    std::fs::write(out, s).map_err(|e| Error::io(out, e))
}
