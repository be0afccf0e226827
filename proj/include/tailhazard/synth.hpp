#pragma once

#include <cstdint>
#include <random>

#include "tailhazard/copula.hpp"
#include "tailhazard/events.hpp"
#include "tailhazard/hazard.hpp"

namespace tailhazard {

// Seeded PRNG with a platform-independent uniform: doubles are built from
// the top 53 bits of the mt19937_64 stream, so identical seeds give
// bit-identical samples everywhere.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64";

    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on (0,1): never returns exactly 0 or 1.
    double uniform() {
        while (true) {
            double x = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
            if (x > 0.0) return x;
        }
    }

private:
    std::mt19937_64 gen_;
};

struct UVSample {
    std::vector<double> u;
    std::vector<double> v;
};

// Inverse-CDF samples from the fitted families. Deterministic given seed.
std::vector<double> sample_ri(const RIFit& fit, std::size_t n, std::uint64_t seed);
std::vector<double> sample_gpd(const GPDFit& fit, std::size_t n, std::uint64_t seed);

// Conditional-distribution method: u uniform, then v from numerically
// inverting dC/du by bisection to 1e-10.
UVSample sample_copula(CopulaFamily family, double theta, std::size_t n,
                       std::uint64_t seed);

// Joint event-process generator used as the parameter-recovery oracle.
struct GeneratorSpec {
    RIFit ri;
    GPDFit gpd;
    CopulaFamily copula_family = CopulaFamily::Frank;
    double theta = 0;
    std::size_t n = 1000;        // number of recurrence intervals
    std::uint64_t seed = 1;
    Pairing pairing = Pairing::End;
    double threshold = 0.01;     // carried into the emitted EventSeries

    void validate() const;
};

// Couples (tau, y) through the copula, then inverts the marginals. tau is
// rounded up to integers >= 1 and indices accumulate from 0. The pairing
// convention decides whether a drawn pair couples an interval with the event
// closing it (End) or the event opening it (Start).
EventSeries sample_event_process(const GeneratorSpec& spec);

// Test-harness embedding of an event series into a dated return series:
// event days carry threshold + y, the remaining days sub-threshold noise.
// Sized so the positive-side quantile matching the event rate sits just
// below the threshold. Not a market simulator.
ReturnSeries embed_in_returns(const EventSeries& events, std::uint64_t seed,
                              std::size_t n_days = 0);

}  // namespace tailhazard
