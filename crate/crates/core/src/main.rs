use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let report = inqkit::cli::run(std::env::args_os());
    for d in &report.diagnostics {
        eprintln!("inqkit: {d}");
    }
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.stdout().as_bytes());
    ExitCode::from(report.code as u8)
}
