use std::process::ExitCode;

fn main() -> ExitCode {
    pdextremal::cli::run()
}
