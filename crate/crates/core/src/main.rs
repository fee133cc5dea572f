use std::io;

fn main() {
    tpds::cli::init_logging();
    let code = tpds::cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
