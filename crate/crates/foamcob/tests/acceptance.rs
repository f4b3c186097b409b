use std::process::ExitCode;

use foamcob::selftest::{run_suite, SUITES};

fn main() -> ExitCode {
    let mut failed = 0;
    for id in 1..=SUITES {
        let r = run_suite(id, 0, None);
        println!("{}", r.line());
        if !r.passed() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", SUITES - failed, SUITES);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
