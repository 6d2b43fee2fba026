#pragma once

#include "uld/model.hpp"
#include "uld/rng.hpp"

namespace uld {

// A joint draw from two Gaussians with common diagonal covariance.
// met == true iff y1 and y2 are bitwise identical.
struct CoupledDraw {
    Vec y1;
    Vec y2;
    bool met = false;
};

struct PairedCoupledDraw {
    CoupledDraw fine;
    CoupledDraw coarse;
};

// Reflection maximal coupling of N(mu1, diag(stddev^2)) and
// N(mu2, diag(stddev^2)). Meets with the maximal probability
// integral min(p, q); the accept test runs in log space.
CoupledDraw reflection_max_coupling(const Vec& mu1, const Vec& mu2, const Vec& stddev,
                                    RngStream& rng);

// Reflection coupling applied per level with a single shared (xi, W): each
// level's pair is a maximal coupling of its two Gaussians, and the fine and
// coarse outputs are strongly positively dependent.
PairedCoupledDraw sync_pairwise_reflection_coupling(const Vec& fine_mu1, const Vec& fine_mu2,
                                                    const Vec& coarse_mu1, const Vec& coarse_mu2,
                                                    const Vec& fine_stddev,
                                                    const Vec& coarse_stddev, RngStream& rng);

} // namespace uld
