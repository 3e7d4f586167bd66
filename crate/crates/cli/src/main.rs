fn main() {
    std::process::exit(drr_mdpf_cli::execute(std::env::args_os()));
}
