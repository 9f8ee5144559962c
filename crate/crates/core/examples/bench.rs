//! Reduced pipeline against the dense oracle, single-threaded.

use stschmidt::bench::benchmark;

fn main() -> stschmidt::Result<()> {
    println!("   n   reduced [s]   dense [s]   speedup   max dev");
    for r in benchmark(&[6, 8, 10, 12], 0.2)? {
        println!("{:4}  {:12.4}  {:10.4}  {:8.1}  {:.1e}", r.n, r.reduced_s, r.oracle_s, r.ratio, r.max_dev);
    }
    Ok(())
}
