use clap::Parser;

fn main() {
    let cli = spikeslab_cli::cli::Cli::parse();
    if let Err(err) = spikeslab_cli::run(cli) {
        // Single-line diagnostics: the alternate form renders the context
        // chain as "outer: inner".
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
