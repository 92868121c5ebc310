use clap::Parser;

use lgcy::cli::{self, Command};

fn main() {
    let cmd = Command::parse();
    match cli::run(&cmd) {
        Ok(out) => {
            print!("{}", out.stdout);
            std::process::exit(out.code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(cli::exit_code_for(&err));
        }
    }
}
