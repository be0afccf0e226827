#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tailhazard {

// Shared knobs for the fitting routines.
struct FitOptions {
    // Reproduce the exhaustive 1e-6-step parameter grid instead of the
    // golden-section line search. Orders of magnitude slower; the line
    // search is verified to land within 1e-6 of the grid optimum.
    bool exact_grid = false;
    std::size_t min_sample = 10;
    int threads = 0;  // 0 = hardware concurrency
};

// Maximizes f over [lo, hi]: a coarse scan brackets the best point, then
// golden-section refines to x-tolerance `tol`. Returns the argmax. f may
// return -infinity inside the interval (infeasible region).
double line_search_max(const std::function<double(double)>& f, double lo,
                       double hi, double tol = 1e-10, int coarse_points = 257);

// Evaluates f on {lo + k*step : k >= 0, lo + k*step <= hi} and returns the
// argmax (ties break toward the smaller argument). Chunked across threads;
// the reduction is deterministic.
double grid_search_max(const std::function<double(double)>& f, double lo,
                       double hi, double step, int threads = 0);

// Derivative-free 2-D maximizer. Runs Nelder-Mead from each start, keeps the
// best end point, then verifies it against a small neighborhood grid and
// restarts from any improvement found there.
struct NelderMeadResult {
    double x0 = 0, x1 = 0;
    double value = 0;
    bool converged = false;
    int iterations = 0;
};

NelderMeadResult nelder_mead_max_2d(
    const std::function<double(double, double)>& f,
    std::span<const std::pair<double, double>> starts, double tol = 1e-10,
    int max_iter = 500);

}  // namespace tailhazard
