use clap::Parser;

fn main() -> std::process::ExitCode {
    let cli = conecert::cli::Cli::parse();
    std::process::ExitCode::from(conecert::cli::run(&cli))
}
