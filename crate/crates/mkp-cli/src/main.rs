use clap::Parser;

fn main() {
    let cli = mkp_cli::Cli::parse();
    if let Err(e) = mkp_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
