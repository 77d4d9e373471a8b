//! `gen-data`: generate an FE-labeled dataset of random microstructures.

use std::path::PathBuf;

use checkerboard::dataset::{
    batch_means, generate_with_materials, histogram, summary_stats, write_batch_means_csv,
    write_dataset, write_histogram_csv, write_stats_csv,
};
use checkerboard::grid::Grid;
use checkerboard::properties::PropertyKind;
use clap::Args;

use crate::config::{pick, pick_required, resolve_grid, FileConfig};
use crate::error::{io_error, numeric_error, CliError};

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Composite grid (4x2, 8x4, or 16x8).
    #[arg(long)]
    grid: Option<Grid>,
    /// Number of samples to generate.
    #[arg(long)]
    count: Option<usize>,
    /// Root seed; equal seeds reproduce the dataset bit for bit.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the FE evaluations (0 picks automatically).
    #[arg(long)]
    workers: Option<usize>,
    /// Dataset output file.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Summary-statistics CSV (default: the dataset path with a .stats.csv
    /// extension).
    #[arg(long, value_name = "FILE")]
    stats: Option<PathBuf>,
    /// Also write a batch-means trace CSV here.
    #[arg(long, value_name = "FILE", requires = "batch_size")]
    batch_means: Option<PathBuf>,
    /// Samples per batch for --batch-means; must divide the sample count.
    #[arg(long, requires = "batch_means")]
    batch_size: Option<usize>,
    /// Also write a label histogram CSV here.
    #[arg(long, value_name = "FILE")]
    histogram: Option<PathBuf>,
    /// Bin count for --histogram.
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Property for --histogram.
    #[arg(long, default_value = "modulus")]
    property: PropertyKind,
}

pub fn run(args: GenDataArgs, config: &FileConfig) -> Result<(), CliError> {
    let section = config.dataset_section();
    let grid = resolve_grid(args.grid, section.grid.as_deref())?.ok_or_else(|| {
        CliError::Argument("--grid is required (or set dataset.grid in the config)".into())
    })?;
    let count = pick_required(args.count, section.count, "count", "dataset.count")?
        .check(|&c| c > 0, "sample count must be positive")?;
    let seed = pick(args.seed, section.seed, 0).value;
    let workers = pick(args.workers, section.workers, 0).value;
    let materials = config.material_pair()?;

    let dataset = generate_with_materials(grid, count, seed, workers, materials)
        .map_err(|e| numeric_error("dataset generation failed", e))?;
    write_dataset(&args.out, &dataset).map_err(|e| io_error(args.out.display(), e))?;
    println!(
        "wrote {} samples on grid {} to {}",
        dataset.len(),
        grid,
        args.out.display()
    );

    let stats_path = args
        .stats
        .unwrap_or_else(|| args.out.with_extension("stats.csv"));
    match summary_stats(&dataset) {
        Ok(stats) => {
            write_stats_csv(&stats_path, &stats).map_err(|e| io_error(stats_path.display(), e))?;
            for kind in PropertyKind::ALL {
                let s = stats.get(kind);
                println!(
                    "{kind}: mean {:.6e}, cv {:.4}, skew {:+.4}, excess kurtosis {:+.4}",
                    s.mean, s.coefficient_of_variation, s.skew, s.excess_kurtosis
                );
            }
        }
        Err(e) => println!("note: skipping summary statistics ({e})"),
    }

    if let Some(path) = args.batch_means {
        let batch_size = args.batch_size.expect("clap enforces the pairing");
        let trace = batch_means(&dataset, batch_size)
            .map_err(|e| CliError::Argument(format!("--batch-means: {e}")))?;
        write_batch_means_csv(&path, &trace).map_err(|e| io_error(path.display(), e))?;
        println!("wrote {} batch means to {}", trace.batch_count(), path.display());
    }

    if let Some(path) = args.histogram {
        let values = dataset.labels(args.property);
        let hist = histogram(&values, args.bins)
            .map_err(|e| CliError::Argument(format!("--histogram: {e}")))?;
        write_histogram_csv(&path, &hist).map_err(|e| io_error(path.display(), e))?;
        println!("wrote {}-bin {} histogram to {}", args.bins, args.property, path.display());
    }

    Ok(())
}
