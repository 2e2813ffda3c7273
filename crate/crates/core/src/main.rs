use std::io::Write;

fn main() {
    let out = qcprop::cli::run(std::env::args_os());
    // A closed pipe downstream is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{}", out.stdout);
    std::process::exit(out.code);
}
