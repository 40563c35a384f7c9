use clap::error::ErrorKind;
use clap::Parser;
use kobayashi::cli::{error_record, run, Cli};
use kobayashi::Error;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let msg = e.kind().as_str().map_or_else(|| e.to_string(), str::to_string);
            let detail = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("{}", error_record(&Error::Config(if detail.is_empty() { msg } else { detail })));
            std::process::exit(2);
        }
    };
    std::process::exit(run(&cli));
}
