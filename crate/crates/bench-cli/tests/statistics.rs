use wirecut::cutting::CutMethod;
use wirecut_bench::commands::{bench_variance, fit_slope};
use wirecut_bench::instances::sample_instance;

#[test]
fn spread_of_repeated_estimates_scales_as_inverse_root_shots() {
    let inst = sample_instance().unwrap();
    let grid = [1_000, 10_000, 100_000];
    let methods = [CutMethod::Randomized, CutMethod::Pauli];
    let (table, _) = bench_variance(&inst, &methods, &grid, 100, 11, 1).unwrap();
    for m in methods {
        let points: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r.method == m.name())
            .map(|r| ((r.shots as f64).ln(), r.stderr.ln()))
            .collect();
        assert_eq!(points.len(), grid.len());
        let slope = fit_slope(&points);
        assert!((slope + 0.5).abs() <= 0.5 * 0.15, "{}: slope {slope}", m.name());
    }
}
