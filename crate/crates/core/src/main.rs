fn main() -> std::process::ExitCode {
    prymscope::cli::main()
}
