fn main() -> std::process::ExitCode {
    semrel::cli::main()
}
