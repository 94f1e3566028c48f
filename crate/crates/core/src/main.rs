fn main() {
    println!("scarlab");
}
