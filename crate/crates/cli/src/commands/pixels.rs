//! `pixvlc pixels`: binary-weighted cluster sizing under a total-area
//! constraint, with an explicit conservation check.

use crate::output::{to_json, OutputOpts};
use crate::CliError;
use pixvlc_core::pixel_array::PixelArray;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Number of binary-weighted clusters
    #[arg(long)]
    pub clusters: u32,
    /// Diameter of the equivalent single pixel, mm
    #[arg(long, value_name = "MM")]
    pub diameter: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Serialize)]
struct ClusterRow {
    cluster: u32,
    weight: u64,
    diameter_mm: f64,
    area_mm2: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    clusters: Vec<ClusterRow>,
    total_area_mm2: f64,
    equivalent_area_mm2: f64,
    area_relative_error: f64,
}

pub fn run(args: &Args) -> Result<(), CliError> {
    let array = PixelArray::binary_weighted(args.clusters, args.diameter)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let rows: Vec<ClusterRow> = array
        .pixel_diameters()
        .iter()
        .enumerate()
        .map(|(k, &d)| ClusterRow {
            cluster: k as u32 + 1,
            weight: 1u64 << k,
            diameter_mm: d,
            area_mm2: PI * (d / 2.0) * (d / 2.0),
        })
        .collect();
    let total_area_mm2: f64 = rows.iter().map(|r| r.area_mm2).sum();
    let equivalent_area_mm2 = PI * (args.diameter / 2.0) * (args.diameter / 2.0);
    let report = Report {
        clusters: rows,
        total_area_mm2,
        equivalent_area_mm2,
        area_relative_error: ((total_area_mm2 - equivalent_area_mm2) / equivalent_area_mm2).abs(),
    };

    let content = match args.output.format {
        crate::output::Format::Json => to_json(&report)?,
        crate::output::Format::Csv => {
            let mut text = String::from("cluster,weight,diameter_mm,area_mm2\n");
            for r in &report.clusters {
                writeln!(text, "{},{},{},{}", r.cluster, r.weight, r.diameter_mm, r.area_mm2)
                    .expect("string write");
            }
            writeln!(
                text,
                "# total_area_mm2={} equivalent_area_mm2={} rel_error={:e}",
                report.total_area_mm2, report.equivalent_area_mm2, report.area_relative_error
            )
            .expect("string write");
            text
        }
    };
    args.output.write(&content)
}
