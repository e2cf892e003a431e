use boussinesq_halfline::cli;

fn main() {
    std::process::exit(cli::main_entry());
}
