use clap::Parser;

fn main() {
    // Clap reports malformed invocations itself and exits with code 2,
    // matching the usage-error convention of the subcommands.
    let cli = rkhsdiag::Cli::parse();
    std::process::exit(rkhsdiag::run(cli));
}
