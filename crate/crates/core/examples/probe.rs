use std::time::Instant;
use voronoi_forms::perfection::enumerate_perfect;

fn main() {
    let t = Instant::now();
    let g5 = enumerate_perfect(5, None).unwrap();
    println!("g=5: {} classes in {:?}", g5.len(), t.elapsed());
    let t = Instant::now();
    let g6 = enumerate_perfect(6, None).unwrap();
    println!("g=6: {} classes in {:?}", g6.len(), t.elapsed());
    for c in &g6 {
        println!(
            "  kissing {:3}  det {}  facets {}",
            c.minvecs.kissing,
            c.form.det(),
            c.cone.facets().len()
        );
    }
}
