use std::io::Write;

fn main() {
    let out = dualsteiner_cli::run(std::env::args_os());
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
