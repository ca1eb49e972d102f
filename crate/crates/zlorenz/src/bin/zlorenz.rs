use std::process::ExitCode;

fn main() -> ExitCode {
    zlorenz::cli::main_with(std::env::args_os())
}
