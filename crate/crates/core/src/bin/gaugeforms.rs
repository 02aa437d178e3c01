use clap::Parser;
use gaugeforms::cli::{init_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    init_threads();
    let code = run(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
