fn main() {
    let (code, out) = matgroup_crypto::cli::execute(std::env::args_os().skip(1));
    if code == 0 {
        print!("{out}");
    } else {
        eprint!("{out}");
    }
    std::process::exit(code);
}
