use std::io::Write;
use std::process::ExitCode;

use bqf_cli::{dispatch, ExitStatus};

fn main() -> ExitCode {
    let result = dispatch(std::env::args());
    let out = result.render();
    // a closed pipe on the reading end is not our failure
    let _ = match result.status {
        ExitStatus::Ok => writeln!(std::io::stdout(), "{out}"),
        _ => writeln!(std::io::stderr(), "{out}"),
    };
    ExitCode::from(result.status.code() as u8)
}
