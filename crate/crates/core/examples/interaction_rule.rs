//! A single encounter, with and without noise, and the admissible noise
//! amplitude for each diffusion kernel.

use opinion_kinetics::{interact, Agent, NoiseKind};

fn main() {
    let listener = Agent::new(0.5, 0.3, 0.8);
    let speaker = Agent::new(-0.4, 0.9, 0.0);
    let gamma = 0.1;

    let (w, w_star) = interact(&listener, &speaker, gamma, 0.0, 0.0, NoiseKind::Quadratic);
    println!(
        "deterministic: {:+.4} -> {w:+.4}, stubborn partner stays at {w_star:+.4}",
        listener.w
    );
    println!(
        "  step = gamma q p* (w* - w) = {:+.4}",
        gamma * listener.q * speaker.p * (speaker.w - listener.w)
    );

    for noise in [NoiseKind::Quadratic, NoiseKind::Linear, NoiseKind::SqrtQuad] {
        let eta = 0.05;
        let (w, _) = interact(&listener, &speaker, gamma, eta, 0.0, noise);
        let bound = match noise.noise_support_bound(gamma) {
            Some(b) => format!("sigma <= {:.4}", b / 3f64.sqrt()),
            None => "rejection only".to_string(),
        };
        println!(
            "{:<9} D({:.1}) = {:.4}, eta = {eta}: w' = {w:+.4}   admissible: {bound}",
            noise.name(),
            listener.w,
            noise.amplitude(listener.w)
        );
    }
}
