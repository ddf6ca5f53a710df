use std::process::ExitCode;

fn main() -> ExitCode {
    let code = wot1d_cli::run(
        std::env::args(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
