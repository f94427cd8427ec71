//! The Hungarian projection that turns continuous mapping scores into a
//! one-to-one mapping, including rectangular score matrices.
//!
//! ```bash
//! cargo run --example assignment
//! ```

use psi::optim::{assignment_total, hungarian_maximize, project, ContinuousMappingMatrix};

fn main() -> psi::Result<()> {
    let square = ContinuousMappingMatrix::from_rows(&[
        vec![0.004, 0.009, 0.001],
        vec![0.008, 0.002, 0.003],
        vec![0.005, 0.006, 0.007],
    ])?;
    let p = project(&square);
    println!("square 3x3 -> {:?} (total {:.3})", p.pairs().collect::<Vec<_>>(), assignment_total(&square, &p));

    // More schema nodes than exemplar nodes: one row stays unmapped.
    let tall = ContinuousMappingMatrix::from_rows(&[vec![1.0, 0.0], vec![0.9, 0.8], vec![0.1, 1.0]])?;
    let p = hungarian_maximize(&tall);
    for r in 0..tall.rows() {
        match p.col_of(r) {
            Some(c) => println!("row {r} -> column {c}"),
            None => println!("row {r} unmapped"),
        }
    }
    println!("total {:.3}, {} of {} rows mapped", assignment_total(&tall, &p), p.count(), tall.rows());
    Ok(())
}
