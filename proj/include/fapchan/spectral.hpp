#pragma once

#include <span>
#include <vector>

#include "fapchan/channel.hpp"

// Frequency-domain view of the vertical-drift family: characteristic
// function, gradient, Hessian, the moments they imply, and the convolution
// closure rule (lambda adds at fixed u).

namespace fapchan::spectral {

using channel::VdfapParams;

struct MomentSummary {
    std::vector<double> mean;        // d entries, all zero
    std::vector<double> correlation; // d*d, row-major: (lambda/|u|) I
    double second_moment;            // lambda d / |u|
};

// CF is real-valued by radial symmetry: exp(-lambda (sqrt(||w||^2+u^2) - |u|)).
double vdfap_cf(std::span<const double> omega, const VdfapParams& params);

// Analytic gradient; zero vector at omega = 0.
std::vector<double> vdfap_cf_gradient(std::span<const double> omega,
                                      const VdfapParams& params);

// Analytic Hessian (row-major d x d); equals -(lambda/|u|) I at omega = 0.
std::vector<double> vdfap_cf_hessian(std::span<const double> omega,
                                     const VdfapParams& params);

MomentSummary vdfap_moments(const VdfapParams& params);

// Distribution of the sum of independent draws; requires matching u and d.
VdfapParams convolve_params(const VdfapParams& a, const VdfapParams& b);

} // namespace fapchan::spectral
