use std::io;

fn main() {
    if let Some(threads) = std::env::var(mfbc::cli::THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization only fails if something already built the pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let code = mfbc::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    std::process::exit(code);
}
