use clap::Parser;

fn main() {
    let cli = fsdr::cli::Cli::parse();
    if let Err(e) = fsdr::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(if e.is_user_error() { 2 } else { 1 });
    }
}
