use clap::Parser;
use heights_cli::{configure_threads, run, Cli, RunConfig, EXIT_VALIDATION};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let mut stderr = std::io::stderr();
    if let Err(e) = configure_threads(std::env::var("HEIGHTS_THREADS").ok().as_deref()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };
    let code = run(&cfg, &mut std::io::stdout().lock(), &mut stderr);
    std::process::exit(code);
}
