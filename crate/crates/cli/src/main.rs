use clap::Parser;
use cpnsurf_cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    cpnsurf_core::exec::init_thread_pool();
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
