use std::process::ExitCode;

fn main() -> ExitCode {
    survsig::cli::main()
}
