//! Command-line front end for the cavity-QED Grover simulator.

pub mod config;
pub mod execute;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] cavity_grover::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Parses argv, runs the subcommand and writes its records. Returns the
/// process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = config::parse_config(argv).and_then(|parsed| match parsed {
        config::Parsed::Info(text) => {
            print!("{text}");
            Ok(())
        }
        config::Parsed::Run(cfg) => {
            let outcome = execute::execute(&cfg)?;
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            output::write_records(&outcome.records, cfg.format, cfg.out.as_deref())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprint!(
                    "{}",
                    if msg.ends_with('\n') {
                        msg.clone()
                    } else {
                        format!("error: {msg}\n")
                    }
                ),
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}
