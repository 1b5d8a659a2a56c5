use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(netctrl_cli::run(std::env::args().skip(1)))
}
