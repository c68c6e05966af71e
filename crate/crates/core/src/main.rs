use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ftqc_scaling::cli::main_with_args(std::env::args_os()))
}
