fn main() {
    println!("akns");
}
