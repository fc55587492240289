use clap::Parser;

fn main() {
    let cli = esav_core::cli::Cli::parse();
    if let Err(err) = esav_core::cli::dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(esav_core::cli::exit_code(&err));
    }
}
