use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ser_segment::evaluation::{evaluate_with_base, DEFAULT_LOG_BASE};
use ser_segment::io::{load_rgb, read_label_map, region_count_log, write_outputs};
use ser_segment::{segment, Error, PipelineConfig, Result};

#[derive(Parser)]
#[command(name = "ser-segment", version, about = "Automatic color image segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment an image and write the label map, overlay and reports.
    Segment {
        input: PathBuf,
        /// File of key=value parameter lines.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write feature images and per-stage overlays.
        #[arg(long)]
        dump_stages: bool,
        /// Parameter override, applied after the config file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Score a label map against the original image.
    Evaluate {
        labels: PathBuf,
        original: PathBuf,
        /// Print JSON instead of key=value lines.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_LOG_BASE)]
        log_base: f64,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Segment {
            input,
            config,
            out,
            dump_stages,
            set,
        } => {
            let mut cfg = PipelineConfig::default();
            if let Some(path) = config {
                let text = fs::read_to_string(&path).map_err(|source| Error::Io { path, source })?;
                cfg.apply_text(&text)?;
            }
            for arg in &set {
                cfg.apply_override(arg)?;
            }
            let image = load_rgb(&input)?;
            let result = segment(&image, &cfg)?;
            write_outputs(&out, &result, &image, &cfg, dump_stages)?;
            print!("{}", region_count_log(&result));
            print!("{}", result.report.to_key_value());
        }
        Command::Evaluate {
            labels,
            original,
            json,
            log_base,
        } => {
            let seg = read_label_map(&labels)?;
            let image = load_rgb(&original)?;
            let report = evaluate_with_base(&seg, &image, log_base)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", report.to_key_value());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
