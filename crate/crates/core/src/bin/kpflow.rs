fn main() {
    std::process::exit(kpflow::report::run_cli(std::env::args_os()));
}
