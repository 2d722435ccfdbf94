use clap::Parser;
use cmpk_cli::config::Cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CMPK_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Err(e) = cmpk_cli::run(&cli) {
        eprintln!("cmpk: {e}");
        std::process::exit(e.exit_code());
    }
}
