fn main() -> std::process::ExitCode {
    qccilc::cli::main_entry()
}
