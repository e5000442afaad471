fn main() {
    println!("skymesh");
}
