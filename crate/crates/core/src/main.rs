fn main() {
    let code = relation_rarity::cli_reports::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
