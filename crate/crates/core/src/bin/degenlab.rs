use std::process::ExitCode;

fn main() -> ExitCode {
    degenlab::cli::main()
}
