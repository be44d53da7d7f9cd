use std::process::ExitCode;

fn main() -> ExitCode {
    nqkr::cli::main()
}
