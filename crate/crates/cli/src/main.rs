use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mtds::cli::run(std::env::args_os()))
}
