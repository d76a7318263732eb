//! CSV and plot-script emitters. Floats are written with shortest
//! round-trip formatting, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analysis::BeamMoments;
use crate::driver::{RunOutput, Snapshot};
use crate::ensemble::Representation;
use crate::error::Result;
use crate::field::{DensityTable, FieldTable};

fn representation_name(label: Representation) -> &'static str {
    match label {
        Representation::SlowProfileG => "slow_profile",
        Representation::PhysicalF => "physical",
    }
}

/// Phase-space snapshot: one `#` metadata line, a column header, then
/// `coord,vel,weight` rows.
pub fn snapshot_csv(snapshot: &Snapshot) -> String {
    let ens = &snapshot.ensemble;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# t = {}, tau = {}, representation = {}",
        snapshot.t,
        snapshot.tau,
        representation_name(ens.label)
    );
    out.push_str("coord,vel,weight\n");
    for k in 0..ens.len() {
        let _ = writeln!(out, "{},{},{}", ens.pos[k], ens.vel[k], ens.weight[k]);
    }
    out
}

pub fn moments_csv(series: &[(f64, BeamMoments)]) -> String {
    let mut out = String::from("t,mean_r,mean_v,r2,v2,rv,emittance,second_moment_sum,weight_sum\n");
    for (t, m) in series {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            t, m.mean_r, m.mean_v, m.r2, m.v2, m.rv, m.emittance, m.second_moment_sum, m.weight_sum
        );
    }
    out
}

/// Node table export shared by densities and fields: `q,value` rows.
pub fn density_csv(table: &DensityTable) -> String {
    node_table_csv(table.grid.nodes(), &table.values)
}

pub fn field_csv(table: &FieldTable) -> String {
    node_table_csv(table.grid.nodes(), &table.values)
}

fn node_table_csv(nodes: impl Iterator<Item = f64>, values: &[f64]) -> String {
    let mut out = String::from("q,value\n");
    for (q, v) in nodes.zip(values) {
        let _ = writeln!(out, "{q},{v}");
    }
    out
}

/// Write every output file for one run under `dir`, returning the file names.
pub fn write_run_files(dir: &Path, scenario: &str, out: &RunOutput) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let solver = out.solver.as_str();
    for snapshot in &out.snapshots {
        let name = format!("{scenario}_{solver}_snapshot_t{}.csv", snapshot.t);
        fs::write(dir.join(&name), snapshot_csv(snapshot))?;
        written.push(name);
    }
    let name = format!("{scenario}_{solver}_moments.csv");
    fs::write(dir.join(&name), moments_csv(&out.moments))?;
    written.push(name);
    Ok(written)
}

/// Self-contained matplotlib script reproducing the scatter-plot style of
/// the experiments (horizontal r, vertical v_r), one panel per snapshot CSV
/// passed on its command line.
pub fn plot_script() -> &'static str {
    r##"#!/usr/bin/env python3
"""Scatter-plot phase-space snapshot CSVs: python3 plot_snapshots.py *.csv"""
import csv
import sys

import matplotlib.pyplot as plt

paths = sys.argv[1:]
if not paths:
    sys.exit("usage: plot_snapshots.py snapshot.csv [more.csv ...]")

fig, axes = plt.subplots(1, len(paths), figsize=(4 * len(paths), 4), squeeze=False)
for ax, path in zip(axes[0], paths):
    with open(path) as fh:
        header = fh.readline().strip().lstrip("# ")
        rows = list(csv.DictReader(fh))
    r = [float(row["coord"]) for row in rows]
    v = [float(row["vel"]) for row in rows]
    ax.plot(r, v, ",", markersize=1)
    ax.set_title(header, fontsize=8)
    ax.set_xlabel("r")
    ax.set_ylabel("v_r")
fig.tight_layout()
out = "snapshots.png"
fig.savefig(out, dpi=160)
print(f"wrote {out}")
"##
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::ParticleEnsemble;

    #[test]
    fn snapshot_csv_has_header_and_rows() {
        let ens =
            ParticleEnsemble::from_mirror_pairs(&[(0.5, -0.25, 1.0)], Representation::SlowProfileG);
        let snap = Snapshot {
            t: 1.5,
            tau: 150.0,
            ensemble: ens,
        };
        let text = snapshot_csv(&snap);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "# t = 1.5, tau = 150, representation = slow_profile"
        );
        assert_eq!(lines.next().unwrap(), "coord,vel,weight");
        assert_eq!(lines.next().unwrap(), "0.5,-0.25,1");
        assert_eq!(lines.next().unwrap(), "-0.5,0.25,1");
        assert!(lines.next().is_none());
    }

    #[test]
    fn float_formatting_round_trips() {
        let x = 0.1 + 0.2;
        let text = format!("{x}");
        assert_eq!(text.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn node_tables_export_q_value_rows() {
        use crate::field::{deposit, solve_field, RadialGrid};
        let grid = RadialGrid::new(5, 2.0).unwrap();
        let density = deposit(&[0.0], &[1.0], &grid);
        let text = density_csv(&density);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "q,value");
        assert_eq!(lines.count(), 5);
        assert!(text.lines().nth(1).unwrap().starts_with("-2,"));

        let field = solve_field(&density);
        let text = field_csv(&field);
        assert_eq!(text.lines().next().unwrap(), "q,value");
        assert_eq!(text.lines().count(), 6);
    }
}
