//! Times pinned-iteration fits on synthetic data and prints the CSV.
//!
//! cargo run --release --example bench_scaling [km|sk|kd|gmm] [n|m|k] size...

use embtopics::bench::{bench_scaling, ratios, to_csv, BenchAxis, BenchBase};
use embtopics::ClusterKind;

fn main() -> embtopics::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: ClusterKind = args.first().map_or("km", String::as_str).parse()?;
    let axis: BenchAxis = args.get(1).map_or("n", String::as_str).parse()?;
    let sizes: Vec<usize> = if args.len() > 2 {
        args[2..].iter().map(|s| s.parse().expect("size")).collect()
    } else {
        vec![5_000, 10_000, 20_000]
    };
    let base = BenchBase::default();
    let cells = bench_scaling(axis, &sizes, kind, &base)?;
    print!("{}", to_csv(&cells));
    for r in ratios(&cells) {
        println!("# ratio {r:.3}");
    }
    Ok(())
}
