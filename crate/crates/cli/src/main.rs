use std::process::ExitCode;

fn main() -> ExitCode {
    amplipix::cli::run(std::env::args_os())
}
