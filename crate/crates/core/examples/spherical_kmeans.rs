//! Spherical k-means on unit vectors: assignment by cosine.

use embtopics::clustering::{fit_spherical_kmeans, FitParams};
use embtopics::Matrix;

fn main() -> embtopics::Result<()> {
    let rows: Vec<[f64; 2]> = [0.0f64, 10.0, 20.0, 170.0, 180.0, 190.0]
        .iter()
        .map(|d| [d.to_radians().cos(), d.to_radians().sin()])
        .collect();
    let data = Matrix::from_rows(&rows);
    let m = fit_spherical_kmeans(&data, None, &FitParams::new(2, 1))?;
    println!("labels {:?}", m.assignments.labels());
    for c in m.centroids.iter_rows() {
        println!("center at {:.1} degrees", c[1].atan2(c[0]).to_degrees());
    }
    println!("summed cosine per iteration {:?}", m.trace);

    let not_unit = Matrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]);
    println!("{}", fit_spherical_kmeans(&not_unit, None, &FitParams::new(1, 0)).unwrap_err());
    Ok(())
}
