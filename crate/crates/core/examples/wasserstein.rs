//! One-dimensional Wasserstein-1 distances between weighted samples.

use opinion_kinetics::metrics::WeightedSample1D;
use opinion_kinetics::w1;

fn main() -> opinion_kinetics::Result<()> {
    let a = WeightedSample1D::new(&[-0.5, 0.0, 0.5], &[0.25, 0.5, 0.25])?;
    let b = WeightedSample1D::uniform(&[0.1, 0.2, 0.9, 0.4])?;
    let c = WeightedSample1D::dirac(-0.18);

    println!("W1(a, b) = {:.6}", w1(&a, &b));
    println!("W1(b, a) = {:.6}", w1(&b, &a));
    println!("W1(a, a) = {:.6}", w1(&a, &a));

    let direct: f64 = a.atoms().iter().map(|(x, w)| w * (x + 0.18).abs()).sum();
    println!(
        "W1(a, delta) = {:.6}, sum w |x - c| = {direct:.6}",
        w1(&a, &c)
    );

    let (ab, bc, ac) = (w1(&a, &b), w1(&b, &c), w1(&a, &c));
    println!(
        "triangle: W1(a,c) = {ac:.4} <= W1(a,b) + W1(b,c) = {:.4}",
        ab + bc
    );
    Ok(())
}
