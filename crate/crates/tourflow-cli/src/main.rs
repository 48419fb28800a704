fn main() {
    if let Err(err) = tourflow_cli::run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
