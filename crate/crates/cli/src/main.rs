use clap::Parser;

fn main() {
    let cli = infcent::Cli::parse();
    if let Err(e) = infcent::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
