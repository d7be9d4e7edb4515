use std::process::ExitCode;

fn main() -> ExitCode {
    let code = gevrey_wavelet::cli::run_cli(std::env::args_os());
    ExitCode::from(code.clamp(0, 255) as u8)
}
