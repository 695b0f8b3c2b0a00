use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(perturbreg_cli::run(std::env::args_os()))
}
