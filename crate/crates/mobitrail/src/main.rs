use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = mobitrail::cli::Cli::parse();
    if let Err(err) = mobitrail::cli::run(cli) {
        if err.is_broken_pipe() {
            return;
        }
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
