use std::process::ExitCode;

fn main() -> ExitCode {
    eap::cli::main()
}
