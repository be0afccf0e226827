#include "tailhazard/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace tailhazard {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Golden-section refinement inside a bracket [lo, hi] already known to
// contain the maximum.
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double line_search_max(const std::function<double(double)>& f, double lo,
                       double hi, double tol, int coarse_points) {
    if (!(hi > lo)) throw std::invalid_argument("line_search_max: empty interval");

    // Coarse scan to bracket the peak; the objective may be -inf on part of
    // the interval (shapes whose support excludes the sample).
    const int m = std::max(coarse_points, 5);
    double best_x = kNegInf;
    double best_f = kNegInf;
    int best_i = -1;
    const double step = (hi - lo) / static_cast<double>(m - 1);
    std::vector<double> xs(m), fs(m);
    for (int i = 0; i < m; ++i) {
        xs[i] = i + 1 == m ? hi : lo + step * i;
        fs[i] = f(xs[i]);
        if (fs[i] > best_f) {
            best_f = fs[i];
            best_x = xs[i];
            best_i = i;
        }
    }
    if (best_i < 0 || best_f == kNegInf) {
        throw std::runtime_error("line_search_max: objective is -inf on the whole interval");
    }

    const double blo = xs[std::max(best_i - 1, 0)];
    const double bhi = xs[std::min(best_i + 1, m - 1)];
    if (bhi - blo <= tol) return best_x;
    return golden_section(f, blo, bhi, tol);
}

double grid_search_max(const std::function<double(double)>& f, double lo,
                       double hi, double step, int threads) {
    if (!(step > 0)) throw std::invalid_argument("grid_search_max: step must be positive");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;

    unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, 64);

    struct ChunkBest {
        double value = kNegInf;
        std::size_t index = 0;
    };
    std::vector<ChunkBest> best(n_threads);

    auto worker = [&](unsigned which) {
        ChunkBest local;
        for (std::size_t i = which; i < count; i += n_threads) {
            const double x = lo + step * static_cast<double>(i);
            const double v = f(x);
            // strict > keeps the smallest index on ties, per-stride; the
            // cross-chunk reduction below restores global determinism
            if (v > local.value || (v == local.value && i < local.index)) {
                local.value = v;
                local.index = i;
            }
        }
        best[which] = local;
    };

    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }

    ChunkBest overall;
    for (const ChunkBest& b : best) {
        if (b.value > overall.value ||
            (b.value == overall.value && b.index < overall.index)) {
            overall = b;
        }
    }
    if (overall.value == kNegInf) {
        throw std::runtime_error("grid_search_max: objective is -inf on the whole grid");
    }
    return lo + step * static_cast<double>(overall.index);
}

NelderMeadResult nelder_mead_max_2d(
    const std::function<double(double, double)>& f,
    std::span<const std::pair<double, double>> starts, double tol, int max_iter) {
    if (starts.empty()) throw std::invalid_argument("nelder_mead_max_2d: no starts");

    struct Vertex {
        double x0, x1, value;
    };
    auto eval = [&](double x0, double x1) { return f(x0, x1); };

    NelderMeadResult best;
    best.value = kNegInf;

    auto run_from = [&](double sx0, double sx1) {
        NelderMeadResult r;
        const double d0 = std::max(0.1 * std::fabs(sx0), 0.05);
        const double d1 = std::max(0.1 * std::fabs(sx1), 0.05);
        Vertex simplex[3] = {
            {sx0, sx1, eval(sx0, sx1)},
            {sx0 + d0, sx1, eval(sx0 + d0, sx1)},
            {sx0, sx1 + d1, eval(sx0, sx1 + d1)},
        };
        int iter = 0;
        for (; iter < max_iter; ++iter) {
            std::sort(std::begin(simplex), std::end(simplex),
                      [](const Vertex& a, const Vertex& b) { return a.value > b.value; });
            const Vertex& hi = simplex[0];
            Vertex& lo = simplex[2];
            const double spread = std::fabs(hi.value - lo.value);
            const double size = std::fabs(hi.x0 - lo.x0) + std::fabs(hi.x1 - lo.x1) +
                                std::fabs(simplex[1].x0 - lo.x0) +
                                std::fabs(simplex[1].x1 - lo.x1);
            if (size < tol || spread <= 1e-10 * (1.0 + std::fabs(hi.value))) break;

            const double cx0 = 0.5 * (simplex[0].x0 + simplex[1].x0);
            const double cx1 = 0.5 * (simplex[0].x1 + simplex[1].x1);

            const double rx0 = cx0 + (cx0 - lo.x0);
            const double rx1 = cx1 + (cx1 - lo.x1);
            const double rv = eval(rx0, rx1);
            if (rv > hi.value) {
                const double ex0 = cx0 + 2.0 * (cx0 - lo.x0);
                const double ex1 = cx1 + 2.0 * (cx1 - lo.x1);
                const double ev = eval(ex0, ex1);
                lo = ev > rv ? Vertex{ex0, ex1, ev} : Vertex{rx0, rx1, rv};
            } else if (rv > simplex[1].value) {
                lo = Vertex{rx0, rx1, rv};
            } else {
                const double kx0 = cx0 + 0.5 * (lo.x0 - cx0);
                const double kx1 = cx1 + 0.5 * (lo.x1 - cx1);
                const double kv = eval(kx0, kx1);
                if (kv > lo.value) {
                    lo = Vertex{kx0, kx1, kv};
                } else {
                    // shrink toward the best vertex
                    for (int i = 1; i < 3; ++i) {
                        simplex[i].x0 = simplex[0].x0 + 0.5 * (simplex[i].x0 - simplex[0].x0);
                        simplex[i].x1 = simplex[0].x1 + 0.5 * (simplex[i].x1 - simplex[0].x1);
                        simplex[i].value = eval(simplex[i].x0, simplex[i].x1);
                    }
                }
            }
        }
        std::sort(std::begin(simplex), std::end(simplex),
                  [](const Vertex& a, const Vertex& b) { return a.value > b.value; });
        r.x0 = simplex[0].x0;
        r.x1 = simplex[0].x1;
        r.value = simplex[0].value;
        r.iterations = iter;
        r.converged = iter < max_iter;
        return r;
    };

    for (const auto& [sx0, sx1] : starts) {
        NelderMeadResult r = run_from(sx0, sx1);
        if (r.value > best.value) best = r;
    }

    // Local grid audit: if a neighbor beats the simplex result, polish from
    // there once more.
    for (int attempt = 0; attempt < 3; ++attempt) {
        double improved_x0 = best.x0, improved_x1 = best.x1, improved_v = best.value;
        const double h0 = std::max(1e-4 * std::fabs(best.x0), 1e-6);
        const double h1 = std::max(1e-4 * std::fabs(best.x1), 1e-6);
        for (int i = -2; i <= 2; ++i) {
            for (int j = -2; j <= 2; ++j) {
                if (i == 0 && j == 0) continue;
                const double v = eval(best.x0 + i * h0, best.x1 + j * h1);
                if (v > improved_v) {
                    improved_v = v;
                    improved_x0 = best.x0 + i * h0;
                    improved_x1 = best.x1 + j * h1;
                }
            }
        }
        if (improved_v <= best.value) break;
        NelderMeadResult r = run_from(improved_x0, improved_x1);
        if (r.value <= best.value) {
            best.x0 = improved_x0;
            best.x1 = improved_x1;
            best.value = improved_v;
            break;
        }
        best = r;
    }
    return best;
}

}  // namespace tailhazard
