use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mechbench::commands::main_with(std::env::args_os()))
}
