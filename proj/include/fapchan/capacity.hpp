#pragma once

#include <string>
#include <vector>

#include "fapchan/channel.hpp"

// Capacity bounds for vertical-drift FAP channels under the second-moment
// input constraint E||X||^2 <= P, plus the parameter sweeps behind the
// bound-gap figures. Internal unit is nats; bits only at presentation.

namespace fapchan::capacity {

enum class Units { nats, bits };

struct CapacityQuery {
    int d;
    double u;      // < 0, 1/um
    double lambda; // > 0, um
    double P;      // > 0, um^2

    CapacityQuery(int dim, double drift, double lam, double power);
};

struct CapacityResult {
    double lower; // nats
    double upper; // nats
};

// Closed-form d = 2 lower bound: h0(|u|(lambda + |u|P/2)) - h0(|u| lambda).
double lower_bound_2d(const CapacityQuery& q);

// The equivalent long closed form (expanded Ei arithmetic); used as the
// second route of the dual-path check.
double lower_bound_2d_expanded(const CapacityQuery& q);

// Closed-form d = 2 upper bound.
double upper_bound_2d(const CapacityQuery& q);

// General-d lower bound: sup over lambda' in (0, |u|P/d] of
// h(u, lambda+lambda') - h(u, lambda). d = 2 solves at the boundary by
// monotonicity; d = 1 runs a golden-section search over quadrature entropies.
double lower_bound_general(const CapacityQuery& q);

// General-d upper bound: (d/2) log(2 pi e (P/d + lambda/|u|)) - h(u, lambda).
double upper_bound_general(const CapacityQuery& q);

CapacityResult bounds(const CapacityQuery& q);

enum class SweepVariable { P, lambda, u };

struct SweepRow {
    double x;
    double lower;
    double upper;
    bool valid;
};

// Samples [lo, hi] in `steps` points, varying one parameter of `fixed`.
// A lo at a domain boundary (0 for P or lambda) is nudged in by half a step.
// Rows where the query is out of domain are flagged invalid, not fatal.
std::vector<SweepRow> capacity_sweep(SweepVariable vary, double lo, double hi,
                                     int steps, const CapacityQuery& fixed,
                                     Units units);

double to_bits(double nats);

} // namespace fapchan::capacity
