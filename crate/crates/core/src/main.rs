fn main() -> std::process::ExitCode {
    pfp_rindex::cli::main()
}
