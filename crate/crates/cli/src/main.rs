use std::io::Write;

use pinfloer_cli::{run, THREADS_ENV};

fn main() {
    let mut err = std::io::stderr();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads = match v.parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                let _ = writeln!(err, "error: {THREADS_ENV} must be a positive integer, got '{v}'");
                std::process::exit(2);
            }
        };
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            let _ = writeln!(err, "error: {e}");
            std::process::exit(2);
        }
    }
    let mut out = std::io::stdout().lock();
    let code = run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
