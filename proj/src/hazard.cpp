#include "tailhazard/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailhazard {

namespace {

constexpr double kDegenerate = 1e-12;

void check_query(const HazardQuery& q) {
    if (!(q.t >= 0.0) || !(q.dt > 0.0) || !(q.y_last >= 0.0)) {
        throw std::invalid_argument("hazard query: need t >= 0, dt > 0, y_last >= 0");
    }
}

}  // namespace

double hazard_ri(const RIFit& ri, const HazardQuery& q, HazardFlags* flags) {
    check_query(q);
    const double p_t = ri_cdf(ri, q.t);
    const double survival = 1.0 - p_t;
    if (survival < kDegenerate) {
        // an event is overdue beyond the model's support
        if (flags) flags->survival_degenerate = true;
        return 1.0;
    }
    const double p_end = ri_cdf(ri, q.t + q.dt);
    return std::clamp((p_end - p_t) / survival, 0.0, 1.0);
}

double hazard_joint(const HazardModel& model, const HazardQuery& q,
                    HazardFlags* flags) {
    check_query(q);
    if (std::fabs(model.cop.theta) < 1e-9) {
        return hazard_ri(model.ri, q, flags);  // independence factorizes exactly
    }
    const double v = gpd_cdf(model.gpd, std::min(q.y_last, model.gpd.support_max()));
    if (v < kDegenerate) {
        if (flags) flags->v_degenerate = true;
        return hazard_ri(model.ri, q, flags);
    }

    const double u1 = ri_cdf(model.ri, q.t);
    const double u2 = ri_cdf(model.ri, q.t + q.dt);
    const double c1 = copula_cdf(model.cop.family, model.cop.theta, u1, v);
    const double denominator = v - c1;
    if (denominator < kDegenerate) {
        if (flags) flags->survival_degenerate = true;
        return 1.0;
    }
    const double c2 = copula_cdf(model.cop.family, model.cop.theta, u2, v);
    return std::clamp((c2 - c1) / denominator, 0.0, 1.0);
}

}  // namespace tailhazard
