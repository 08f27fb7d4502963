#pragma once

#include "star/vacuum.hpp"

namespace star {

// Direction form on S^2: g t g = [[x+iy, i rho],[i rho, x-iy]], H = <ug,ug>_*/(i hbar).
QuadraticForm su2_direction_form(double x, double y, double rho);

// K' of the SU(2)-vacuum section: [[1, ic'],[ic', 1]] per pair, c' = c + i theta.
ExpressionParameter su2_K_parameter(double c, double theta);

struct Su2QuadratureRule {
    int costheta_nodes = 24;     // Gauss-Legendre in cos(theta)
    int phi_nodes = 48;          // periodic midpoint
    double base_panel = 0.10;    // plain t-panel width away from poles
    int panel_nodes = 16;        // Gauss-Legendre nodes per t-panel
    double ladder_floor = 0.4;   // smallest panel ~ floor * |Im pole|
    double sphere_refine = 0.06; // split sphere cells whose pole distance dips below
    int sphere_split = 3;        // split factor per axis
};

struct Su2Direction {
    double x, y, rho;
    double weight;  // S^2 weight of the cell sample
    double pole_distance;
};

// Quadrature layout over S^3 = directions x angle with the invariant
// axis-angle measure sin^2(2t) dt dS^2; near-pole directions carry refined
// sphere cells and geometrically laddered t-panels. Terms are streamed, not
// stored (the refined rules run to ~10^6 Gaussians).
class Su2Vacuum {
  public:
    Su2Vacuum(const ExpressionParameter& Kp, const HbarContext& ctx, const Su2QuadratureRule& rule);

    // Streams every quadrature term (weight already folded into the amplitude).
    void for_each_term(const std::function<void(const GaussianElement&)>& fn) const;

    Cx value(const Vec& u) const;
    double haar_mass() const { return haar_mass_; }
    int direction_count() const { return static_cast<int>(dirs_.size()); }
    int refined_direction_count() const { return refined_; }
    const ExpressionParameter& K() const { return Kp_; }
    const HbarContext& context() const { return ctx_; }
    const Su2QuadratureRule& rule() const { return rule_; }

  private:
    ExpressionParameter Kp_;
    HbarContext ctx_;
    Su2QuadratureRule rule_;
    std::vector<Su2Direction> dirs_;
    double haar_mass_ = 0.0;
    int refined_ = 0;
};

// Near-axis poles of the boundary-family amplitude determinant in the strip
// Re t in [0, pi), via the trig-polynomial companion problem.
std::vector<Cx> su2_direction_poles(const QuadraticForm& H, const ExpressionParameter& Kp);

// Residual of the annihilation (su(2) J) * Omega = 0 for the three basis
// quadratics, measured on a |u| <= radius grid.
std::array<double, 3> su2_annihilation_residuals(const Su2Vacuum& omega, double radius = 0.25);

// Absorption gamma(s, n) * Omega = Omega for a probe group element.
double su2_absorption_residual(const Su2Vacuum& omega, double s, double x, double y, double rho,
                               double radius = 0.25);

// Reduced circle integral 4 pi int_0^pi gamma(t, n0) w(t) dt for the
// (1, 0, 0) direction; weight flat (the displayed form) or Haar.
GaussianSum su2_reduced_integral(const ExpressionParameter& Kp, const HbarContext& ctx,
                                 bool haar_weight, int t_nodes = 256);

}  // namespace star
