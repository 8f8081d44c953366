//! Which `(n, p, q, r)` satisfy the hypotheses, and the derived `t`, `α`, `p′`.

use poincare_lab::inequality::{interpolation_theta, validate_exponents};

fn main() {
    let cases = [
        (2, 2.0, 2.0, 2.0),
        (3, 1.5, 2.0, 2.0),
        (3, 2.0, 2.0, 6.0),
        (3, 2.0, 2.0, 7.0),
        (3, 4.0, 2.0, f64::INFINITY),
        (3, 2.0, 1.5, 2.0),
        (2, 1.5, 2.0, 2.0),
        (1, 2.0, 2.0, 2.0),
    ];
    println!("{:>2} {:>5} {:>5} {:>5}  result", "n", "p", "q", "r");
    for (n, p, q, r) in cases {
        let verdict = match validate_exponents(n, p, q, r) {
            Ok(cfg) => {
                let theta = interpolation_theta(cfg.t, cfg.p, cfg.p_prime)
                    .map(|t| format!("{t:.4}"))
                    .unwrap_or_else(|e| e.to_string());
                format!(
                    "ok  t = {:.4}, alpha = {:.4}, p' = {}, theta = {theta}",
                    cfg.t, cfg.alpha, cfg.p_prime
                )
            }
            Err(e) => format!("rejected ({e})"),
        };
        println!("{n:>2} {p:>5} {q:>5} {r:>5}  {verdict}");
    }
}
