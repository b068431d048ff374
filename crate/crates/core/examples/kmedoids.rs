//! k-medoids keeps exemplars on actual data points, so outliers stay isolated.

use embtopics::clustering::{fit_kmedoids, FitParams};
use embtopics::Matrix;

fn main() -> embtopics::Result<()> {
    let data = Matrix::from_rows(&[[0.0], [1.0], [2.0], [100.0]]);
    let m = fit_kmedoids(&data, None, &FitParams::new(2, 0))?;
    println!("medoid rows {:?}", m.medoids.as_ref().unwrap());
    println!("labels {:?}", m.assignments.labels());
    println!("sum of distances per iteration {:?}", m.trace);
    Ok(())
}
