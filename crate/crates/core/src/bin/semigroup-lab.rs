fn main() {
    std::process::exit(semigroup_lab::cli::main_with_args(std::env::args_os()));
}
