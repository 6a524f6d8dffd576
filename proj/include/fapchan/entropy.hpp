#pragma once

#include "fapchan/channel.hpp"

// Ancillary functions g and h0 with their derivative identities, the
// closed-form d = 2 differential entropy of the vertical-drift family, the
// tail integral it rests on, and an independent quadrature entropy oracle.
// All entropies are in nats. The dimensionless argument is s = |u| * lambda.

namespace fapchan::entropy {

using channel::VdfapParams;

// g(s) = s e^{s+1} Ei(-(s+1)) - 3 s e^s Ei(-s); bounded above by 2.
double g(double s);

// h0(s) = 2 log s - log(1+s) - g(s); strictly increasing.
double h0(double s);

struct AncillaryDerivatives {
    double g_prime;  // ((s+1)/s) g(s) + s/(s+1) - 3
    double h0_prime; // ((s+1)/s) (2 - g(s)), always > 0
};
AncillaryDerivatives h0_derivatives(double s);

// Closed-form differential entropy of the d = 2 family. Equals
// h0(|u| lambda) + log(2 pi e^3) - 2 log(|u|).
double vdfap_entropy_2d(double u, double lambda);

// Closed form of int_a^inf K_{3/2}(rho)/rho^{1/2} log(K_{3/2}(rho)/rho^{3/2}) drho.
double entropy_tail_integral(double a);

// -int f log f by radial quadrature, d in {1, 2}; independent of the closed
// form above.
double entropy_quadrature(const VdfapParams& params);

} // namespace fapchan::entropy
