use std::process::ExitCode;

fn main() -> ExitCode {
    pd2_cli::run(std::env::args_os())
}
