//! Full-covariance Gaussian mixture via weighted EM, saved and reloaded.

use embtopics::bench::synthetic_gaussian;
use embtopics::clustering::{fit_gmm, read_model, write_model, Assignments, FitParams};
use embtopics::ClusterKind;

fn main() -> embtopics::Result<()> {
    let data = synthetic_gaussian(600, 3, 3, 4);
    let model = fit_gmm(&data, None, &FitParams::for_kind(ClusterKind::Gmm, 3, 0))?;
    let gp = model.gmm.as_ref().unwrap();
    println!("{} EM iterations, final NLL {:.3}", model.iterations_run, model.trace.last().unwrap());
    for c in 0..gp.k() {
        let mu = gp.means.row(c);
        println!(
            "component {c}: weight {:.3}, mean [{:.2}, {:.2}, {:.2}], var[0] {:.3}",
            gp.mixture_weights[c],
            mu[0],
            mu[1],
            mu[2],
            gp.covariances[c].row(0)[0]
        );
    }
    if let Assignments::Soft(r) = &model.assignments {
        println!("responsibilities of row 0: {:?}", r.row(0));
    }

    let mut bytes = Vec::new();
    write_model(&model, &mut bytes)?;
    let back = read_model(&mut bytes.as_slice())?;
    println!("{} bytes, round trip exact: {}", bytes.len(), back == model);
    Ok(())
}
