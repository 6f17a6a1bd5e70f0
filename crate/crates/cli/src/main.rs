use std::io::Write;

fn main() {
    let out = jetcert_cli::run(std::env::args_os().skip(1));
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    std::process::exit(out.code);
}
