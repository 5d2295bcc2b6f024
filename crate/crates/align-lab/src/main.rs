fn main() {
    std::process::exit(align_lab::run());
}
