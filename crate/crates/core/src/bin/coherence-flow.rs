fn main() -> std::process::ExitCode {
    coherence_flow::cli::main()
}
