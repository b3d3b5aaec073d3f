fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DEPSCOPE_LOG", "warn")).init();
    std::process::exit(depscope::cli::run(std::env::args_os()));
}
