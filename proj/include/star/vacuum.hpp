#pragma once

#include "star/quadexp.hpp"

namespace star {

enum class VacuumKind { Vacuum, BarVacuum, VacuumField, PseudoVacuum, Su2Vacuum };

struct VacuumElement {
    GaussianSum body;  // single term for vacuum/bar/field; quadrature sum otherwise
    VacuumKind kind;
    std::string construction;

    const GaussianElement& gaussian() const {
        if (body.terms.size() != 1)
            throw std::logic_error("vacuum element is a quadrature sum, not a single Gaussian");
        return body.terms.front();
    }
};

// Limit construction of the (bar-)vacuum: m = 1 closed form per pair; m > 1
// requires block-compatible K and takes the star product over pairs.
VacuumElement vacuum_00(const ExpressionParameter& K, const HbarContext& ctx);
VacuumElement bar_vacuum_00(const ExpressionParameter& K, const HbarContext& ctx);

// Partial (bar-)vacuum of the pair k as a 2m-dimensional element.
GaussianElement vacuum_00_pair(int k, const ExpressionParameter& K, const HbarContext& ctx);
GaussianElement bar_vacuum_00_pair(int k, const ExpressionParameter& K, const HbarContext& ctx);

// Total polar element with each pair sheet normalized by vacuum absorption
// eps(k) * vacuum(k) = +i vacuum(k); the remaining two-valuedness of each raw
// pair polar is reported by classify_polar.
PolarElement polar_total_normalized(const ExpressionParameter& K, const HbarContext& ctx);

// Period-integral construction (m = 1): (1/2pi) int e_*^{(s+i sigma) u*v/(i hbar)} dsigma.
// Returns the trapezoid sum; s < a reproduces the vacuum, s > b gives zero.
GaussianSum vacuum_period_integral(const ExpressionParameter& K, const HbarContext& ctx, double s,
                                   int nodes = 512);

// Field of vacuums {y x}_* = delta_*(v - y) * delta_*(u - x); the sign is the
// engine's Lemma-fixed one, which agrees with the vacuum at y = x = 0.
VacuumElement vacuum_field(const Vec& ytilde, const Vec& xtilde, const ExpressionParameter& K,
                           const VFrame& V, const HbarContext& ctx);

// Closed form of delta_*(v-y)*delta_*(u-x) via det(i(K+C)); second return marks
// whether the square root carried an unresolved sign (outside H_+(V) handling).
struct FormvacResult {
    GaussianElement body;
    bool sign_resolved;
};
FormvacResult vacuum_field_closed_form(const Vec& ytilde, const Vec& xtilde,
                                       const ExpressionParameter& K, const VFrame& V,
                                       const HbarContext& ctx);

// delta_*(u - x') * {y x}_* (the 2^m-weighted exponential factor law).
GaussianElement delta_full_on_field(const Vec& xprime, const VacuumElement& field,
                                    const ExpressionParameter& K, const VFrame& V,
                                    const HbarContext& ctx);

// Pseudo-vacuum (m = 1): (1/2pi) int_0^{2pi} e_*^{it u o v/(i hbar)} dt by
// periodic trapezoid on the branch-continued closed form. Requires K in K_0.
VacuumElement pseudo_vacuum(const ExpressionParameter& K, const HbarContext& ctx, int nodes = 512);

// Half-inverses (m = 1). Quadrature-backed series of Gaussian elements.
struct HalfInverse {
    GaussianSum series;       // (v*u)^{-1} or (u*v)^{-1}
    GaussianSum composed;     // u-degree = series * v (left) or v * series (right)
    std::string which;        // "left" (u-circ) or "right" (u-bullet)
};
HalfInverse half_inverse_left(const ExpressionParameter& K, const HbarContext& ctx,
                              int nodes = 64);   // u-circ = (v*u)^{-1} * v
HalfInverse half_inverse_right(const ExpressionParameter& K, const HbarContext& ctx,
                               int nodes = 64);  // u-bullet = v * ((1/i hbar) u*v)^{-1}

// u-bullet * (v^vpow pseudo-vacuum) computed through the exponential law on
// the (s, t) half-cylinder (the ring integral is taken first; the generic
// product order diverges, as the double-integral remark in the source notes).
GaussianSum bullet_action_on_pseudo(const ExpressionParameter& K, const HbarContext& ctx,
                                    int vpow, int t_nodes = 96, int s_nodes = 48,
                                    double s_pad = 10.0);

// Laurent extension: numeric verification of the generating relations plus the
// exact structure-constant algebra up to maxdeg with an associativity check.
struct LaurentReport {
    double rel_z_zinv;        // |z z^{-1} - 1|
    double rel_zinv_z;        // |z^{-1} z - (1 - bar vacuum)|
    double rel_z2inv_z;       // |z^{-2} z - (z^{-1} - u-bullet bar-vacuum)|
    double rel_z2inv_z2;      // |z^{-2} z^2 - (1 - bv - ub bv u)|
    bool associativity_exact; // structure-constant associativity on random triples
};
LaurentReport laurent_extension_table(const ExpressionParameter& K, const HbarContext& ctx,
                                      int maxdeg = 3);

// Minkowski bracket on E_0 coordinates (s, xi1, xi2, t), exact in integers.
struct E0 {
    long long s, x1, x2, t;
};
E0 minkowski_bracket(const E0& a, const E0& b);
long long lorentz_form(const E0& a, const E0& b);
// <[|a,b|], c> + <b, [|a,c|]> (must be 0 identically)
long long lorentz_invariance_defect(const E0& a, const E0& b, const E0& c);

}  // namespace star
