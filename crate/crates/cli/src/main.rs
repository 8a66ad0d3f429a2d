use clap::Parser;

fn main() {
    let cli = a1_cli::Cli::parse();
    match a1_cli::run(&cli) {
        Ok(record) => println!("{}", record.to_json()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
