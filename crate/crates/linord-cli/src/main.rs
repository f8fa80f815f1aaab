fn main() {
    println!("linord");
}
