fn main() {
    println!("kagomesim");
}
