//! Command-line pipeline over `rcsplit-core`, plus the annotation server.

pub mod args;
pub mod commands;
pub mod io;
pub mod server;

use clap::Parser;
use serde_json::json;

pub use args::Cli;
pub use commands::{Ctx, Outcome};

/// Run with the given arguments and return the process exit code: 0 on
/// success, 1 on validation or module errors, 2 on usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = Ctx::new(&cli.global).and_then(|ctx| commands::run(cli.command, &ctx));
    match result {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Invalid) => 1,
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": e.kind(), "message": e.to_string()}})
            );
            1
        }
    }
}
