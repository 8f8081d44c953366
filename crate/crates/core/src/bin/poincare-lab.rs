fn main() {
    std::process::exit(poincare_lab::lab::main_from_args(std::env::args_os()));
}
