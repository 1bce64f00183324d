use wulffkit::cli::main_entry;

fn main() {
    std::process::exit(main_entry());
}
