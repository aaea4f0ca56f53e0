use clap::Parser;
use wavenoise::cli::{error_json, run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(written) => {
            for path in written {
                println!("{}", path.display());
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            std::process::exit(e.exit_code());
        }
    }
}
