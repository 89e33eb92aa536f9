use std::io;

fn main() {
    let code = carleman_qr::main_with(std::env::args(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
