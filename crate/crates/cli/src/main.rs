fn main() -> std::process::ExitCode {
    numorph::cli::main()
}
