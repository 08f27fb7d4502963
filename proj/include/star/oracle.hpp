#pragma once

#include <functional>
#include <vector>

#include "star/vframe.hpp"

namespace star {

enum class QuadScheme { GaussLegendreTensor, TrapezoidPeriodic, GaussHermite };

// Acceptance requires that refinement (doubling) moves the result by less than
// `tol` before a value is trusted.
struct QuadratureSpec {
    QuadScheme scheme = QuadScheme::GaussLegendreTensor;
    int points_per_axis = 32;
    double radius = 0.0;  // 0 = derive from the decay certificate
    double tol = 1e-8;
};

struct GLRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

const GLRule& gauss_legendre(int n);

// Tensor Gauss-Legendre integral of f over [-R, R]^dim.
Cx integrate_box(const std::function<Cx(const std::vector<double>&)>& f, int dim, double R,
                 int points_per_axis);

// Truncation radius for integrands decaying like e^{-c |s|^2 / (4 hbar)}:
// tail below tol/10.
double truncation_radius(double c, double hbar, double tol);

struct OracleValue {
    Cx value;
    double refinement_delta;  // |value - coarser-grid value|
};

// Quadrature evaluation of the V-integral of e^{-(1/4 hbar) <xi(iA), xi>}.
OracleValue oracle_gaussian_integral(const Mat& A, const VFrame& V, const HbarContext& ctx,
                                     const QuadratureSpec& spec);

// hbar-scaled Fourier transform of a sampled function on V (same grid in and out):
// F(f)(xi) = int f(x) e^{<x, xi>/(i hbar) * sign} dbar x.
struct SampledField {
    std::vector<double> grid;  // per-axis nodes (tensor grid), dim = n
    int dim = 1;
    std::vector<Cx> values;  // row-major over the tensor grid

    std::size_t index(const std::vector<int>& idx) const {
        std::size_t r = 0;
        for (int d = 0; d < dim; ++d) r = r * grid.size() + idx[d];
        return r;
    }
};

SampledField make_grid_field(int dim, double R, int npts, const std::function<Cx(const std::vector<double>&)>& f);
SampledField oracle_fourier(const SampledField& f, double hbar, int sign);
double l2_norm(const SampledField& f, double hbar);

// Zeros of an analytic function in a rectangle by argument-principle counting
// on subrectangles plus Newton polish; multiplicity from the winding number.
struct DetZero {
    Cx t;
    int multiplicity;
};
std::vector<DetZero> root_find_det(const std::function<Cx(Cx)>& f, Cx corner_lo, Cx corner_hi,
                                   double newton_tol = 1e-12);

}  // namespace star
