//! Weighted k-means: heavy points pull their centroid.

use embtopics::clustering::{fit_kmeans, FitParams};
use embtopics::Matrix;

fn main() -> embtopics::Result<()> {
    let data = Matrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [9.0, 9.0], [10.0, 9.0], [9.0, 10.0]]);
    let params = FitParams::new(2, 0);

    let plain = fit_kmeans(&data, None, &params)?;
    let weighted = fit_kmeans(&data, Some(&[1.0, 50.0, 1.0, 1.0, 1.0, 50.0]), &params)?;
    for (name, m) in [("uniform", &plain), ("weighted", &weighted)] {
        println!("{name}: labels {:?}", m.assignments.labels());
        for c in m.centroids.iter_rows() {
            println!("  centroid [{:.3}, {:.3}]", c[0], c[1]);
        }
        println!("  cost trace {:?}", m.trace);
    }
    Ok(())
}
