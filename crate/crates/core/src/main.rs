use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = passage_core::cli::Args::parse();
    std::process::exit(passage_core::cli::main_with(&args));
}
