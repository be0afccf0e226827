#pragma once

#include "tailhazard/copula.hpp"
#include "tailhazard/marginals.hpp"

namespace tailhazard {

// Full joint model: recurrence-interval marginal, exceedance marginal and
// the copula tying them together.
struct HazardModel {
    RIFit ri;
    GPDFit gpd;
    CopulaFit cop;
};

// A hazard question: the last extreme was t days ago and had exceeding size
// y_last; how likely is the next extreme within the coming dt days?
struct HazardQuery {
    double t = 0;
    double dt = 1;
    double y_last = 0;
};

struct HazardFlags {
    bool survival_degenerate = false;  // 1 - P(t) below 1e-12, returned 1
    bool v_degenerate = false;         // G(y_last) below 1e-12, fell back to W
};

// W(dt|t) = [P(t+dt) - P(t)] / [1 - P(t)], clamped to [0,1].
double hazard_ri(const RIFit& ri, const HazardQuery& q,
                 HazardFlags* flags = nullptr);

// Copula-corrected hazard. With u1 = P(t), u2 = P(t+dt), v = G(y_last):
//
//   W_y(dt|t) = [C(u2,v) - C(u1,v)] / [v - C(u1,v)]
//
// which is the closed form of the conditional double integral over the
// joint density p(tau) g(y) c(u,v); verified against 2-D quadrature in the
// acceptance suite. Degenerate v falls back to hazard_ri.
double hazard_joint(const HazardModel& model, const HazardQuery& q,
                    HazardFlags* flags = nullptr);

}  // namespace tailhazard
