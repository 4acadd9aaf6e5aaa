fn main() -> std::process::ExitCode {
    phavforge::cli::run()
}
