fn main() -> std::process::ExitCode {
    queuegraph::cli::main()
}
