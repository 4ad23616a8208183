fn main() {
    let code = orbitlab::run_cli(std::env::args_os());
    std::process::exit(code as i32);
}
