use clap::Parser;
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = seu_cli::Cli::parse();
    match seu_cli::run(&cli) {
        Ok((report, code)) => {
            // Tolerate closed pipes (e.g. `seu ... | head`).
            let stdout = std::io::stdout();
            let _ = writeln!(stdout.lock(), "{report}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(seu_cli::EXIT_INPUT as u8)
        }
    }
}
