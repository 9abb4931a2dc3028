use std::io::{stderr, stdout};

fn main() {
    let code = rbn_cli::run_main(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
