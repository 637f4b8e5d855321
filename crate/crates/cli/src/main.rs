use std::process::ExitCode;

use clap::Parser;

use nonlocal_lab::{run, Cli, CliError, ExperimentConfig};

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NONLOCAL_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("NONLOCAL_LAB_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(CliError::Config("NONLOCAL_LAB_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_threads()
        .and_then(|_| ExperimentConfig::from_cli(cli))
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(m) => {
            for o in &m.outputs {
                println!("{}", cfg_path(&m, &o.file));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cfg_path(m: &nonlocal_lab::Manifest, file: &str) -> String {
    m.config.output_dir.join(file).display().to_string()
}
