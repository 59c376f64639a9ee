fn main() -> std::process::ExitCode {
    bellkit::cli::main()
}
