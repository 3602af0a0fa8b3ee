use clap::Parser;
use hypercube_pst_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = hypercube_pst_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
