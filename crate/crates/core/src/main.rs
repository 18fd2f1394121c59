fn main() {
    std::process::exit(scarf_hierarchy::cli::execute(std::env::args_os()));
}
