fn main() -> std::process::ExitCode {
    circumcentered::bench::cli::main()
}
