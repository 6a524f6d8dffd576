#pragma once

#include <span>
#include <vector>

// Closed-form first-arrival-position densities: planar receiver in any
// dimension with arbitrary drift, the vertical-drift specialization, the
// zero-drift Cauchy limit and the spherical-receiver angular kernel.

namespace fapchan::channel {

// Planar receiver of dimension d embedded in ambient dimension D = d+1.
// u is the (d+1)-vector of normalized drift (physical drift / sigma^2,
// units 1/um); the last component is the vertical one. lambda is the
// transmitter-receiver distance in um.
struct PlanarChannelParams {
    int d;
    std::vector<double> u;
    double lambda;

    PlanarChannelParams(int dim, std::vector<double> drift, double lam);
    double u_vertical() const { return u.back(); }
    double u_parallel_norm() const;
    double u_norm() const;
};

// Vertical-drift sub-family: u < 0, lambda > 0.
struct VdfapParams {
    double u;
    double lambda;
    int d;

    VdfapParams(double drift, double lam, int dim);
    PlanarChannelParams as_planar() const;
};

// Source at radius r > R, angles (theta, phi); evaluation point on the
// sphere surface at (theta0, phi0).
struct SphereQuery {
    double R;
    double r;
    double theta, phi;
    double theta0, phi0;

    SphereQuery(double radius, double dist, double th, double ph,
                double th0, double ph0);
};

// Density of the first arrival position offset n (d-vector) on the plane.
// Switches to the Cauchy branch when ||u|| * sqrt(||n||^2 + lambda^2) < 1e-8.
double fap_pdf_plane(std::span<const double> n, const PlanarChannelParams& params);

// d = 1 density in physical units (drift v2 um/s, diffusion D_coef um^2/s,
// sigma^2 = 2 D_coef), evaluated at arrival coordinate xi for source
// coordinate x1.
double fap_pdf_line_physical(double xi, double x1, double v2, double D_coef,
                             double lambda);

// Vertical-drift density; agrees with fap_pdf_plane for u_vec = [0,..,0,u].
double vdfap_pdf(std::span<const double> n, const VdfapParams& params);
double vdfap_pdf_radial(double r, const VdfapParams& params);

// Multivariate Cauchy density with location 0 and scale lambda (the
// zero-drift limit of the planar FAP density).
double cauchy_pdf(std::span<const double> n, double lambda, int d);

// Angular hitting kernel on a sphere of radius R for an exterior source at
// distance r. Unnormalized total mass over the sphere is the hitting
// probability R/r; with normalized=true the conditional-on-hitting density
// (mass 1) is returned.
double sphere_angular_density(const SphereQuery& q, bool normalized);

// Total mass of fap_pdf_plane: exp(-2 max(u_D, 0) lambda). Below 1 only in
// the defective case where the vertical drift points away from the receiver.
double absorption_mass(const PlanarChannelParams& params);

} // namespace fapchan::channel
