use std::panic;

fn main() {
    let code = panic::catch_unwind(|| dupaudit_cli::run(std::env::args_os())).unwrap_or(2);
    std::process::exit(code);
}
