use std::io;

fn main() {
    let code = timed_opacity::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
