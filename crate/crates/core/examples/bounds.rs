// Worst-case stopping-time bounds for a few problem sizes.
//
// ```bash
// cargo run --example bounds
// ```

use pure_explore::harness::bounds::{theoretical_bound_bpi, theoretical_bound_rf, BPI_BOUND_NOTE};

pub fn run_example() -> pure_explore::Result<()> {
    println!(
        "{:>3} {:>3} {:>3} {:>6} {:>14} {:>14}",
        "S", "A", "H", "eps", "reward-free", "best-policy"
    );
    for (s, a, h) in [(2, 2, 2), (5, 2, 4), (10, 4, 10)] {
        for eps in [1.0, 0.5, 0.1] {
            println!(
                "{s:>3} {a:>3} {h:>3} {eps:>6} {:>14.4e} {:>14.4e}",
                theoretical_bound_rf(s, a, h, eps, 0.1),
                theoretical_bound_bpi(s, a, h, eps, 0.1)
            );
        }
    }
    println!("note: {BPI_BOUND_NOTE}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> pure_explore::Result<()> {
    run_example()
}
