#pragma once

#include <optional>

#include "star/branched.hpp"
#include "star/core_algebra.hpp"
#include "star/poly.hpp"
#include "star/vframe.hpp"

namespace star {

// Where the Fourier-side (hat) data of an element lives:
//   Full  - Gaussian density over all of V,
//   Slots - Gaussian density over the listed coordinate slots only,
//   Point - point mass at `offset` (linear star-exponentials).
enum class HatKind { Full, Slots, Point };

struct HatSupport {
    HatKind kind = HatKind::Full;
    std::vector<int> slots;  // Slots kind
    Vec offset;              // Point kind
};

// Symbolic delta^{(V)}(argument) coefficient; never numeric.
struct DistributionalTag {
    Vec argument;
    bool zero_argument() const { return argument.norm() < 1e-12; }
};

// amplitude * prefactor(u) * exp((1/i hbar)(u^T quad u + lin^T u)), quad symmetric.
class GaussianElement {
  public:
    BranchedScalar amplitude{Cx(1.0), 0};
    Mat quad;
    Vec lin;
    PolyC prefactor;
    HbarContext ctx;
    HatSupport hat;
    // Hat data for Slots kind (over the support slots, in slot order).
    Mat hatP;
    Vec hatp;
    Cx hatc{1.0};
    std::optional<DistributionalTag> dist;

    GaussianElement() = default;
    explicit GaussianElement(const HbarContext& c)
        : quad(Mat::Zero(c.n(), c.n())),
          lin(Vec::Zero(c.n())),
          prefactor(PolyC::one(c.n())),
          ctx(c) {}

    int n() const { return ctx.n(); }
    Cx value(const Vec& u) const;
    Cx value_real(const std::vector<double>& u) const;
    bool has_prefactor() const;

    GaussianElement scaled(Cx c) const {
        GaussianElement g = *this;
        g.amplitude.value *= c;
        return g;
    }
};

GaussianElement gaussian_constant(Cx c, const HbarContext& ctx);

// K-ordered expression of e_*^{<a,u>/(i hbar)}.
GaussianElement k_expression_linear_exp(const Vec& a, const ExpressionParameter& K,
                                        const HbarContext& ctx);

// Full-variable star-delta delta_*^{(V)}(u - x); requires K in H_+(V).
GaussianElement delta_full(const Vec& x, const ExpressionParameter& K, const VFrame& V,
                           const HbarContext& ctx);

enum class HalfBlock { UBlock, VBlock };

// Half-variable star-delta on the u-block or v-block.
GaussianElement delta_half(const Vec& xt, HalfBlock block, const ExpressionParameter& K,
                           const VFrame& V, const HbarContext& ctx);

// Partial star-delta of the generator pair k.
GaussianElement delta_pair(int k, const ExpressionParameter& K, const VFrame& V,
                           const HbarContext& ctx);

// Adjoint action of e_*^{<a,u>/(i hbar)}: argument shift u -> u + aJ.
GaussianElement adjoint_translate(const Vec& a, const GaussianElement& G,
                                  const ExpressionParameter& K, const HbarContext& ctx);

// Pointwise maximum deviation on a deterministic real sample cloud.
double grid_distance(const GaussianElement& a, const GaussianElement& b, double radius = 1.5,
                     int per_axis = 5);
double grid_norm(const GaussianElement& a, double radius = 1.5, int per_axis = 5);

struct StarOptions {
    double margin = 1e-10;        // certificate margin for the certified route
    double det_floor = 1e-12;     // |det| floor along the continuation path
    bool allow_continuation = true;
    std::optional<VFrame> V;      // integration frame for the certified route
};

// Closed-form star product of two K-expressed Gaussian elements.
// Throws std::domain_error("undefined product...") when the product does not
// exist in the Gaussian class; same-slot half-delta collisions return a
// DistributionalTag-carrying element.
GaussianElement star_gaussian_gaussian(const GaussianElement& G1, const GaussianElement& G2,
                                       const ExpressionParameter& K, const HbarContext& ctx,
                                       const StarOptions& opts = {});

// Finite bidifferential products with a polynomial on one side.
GaussianElement star_poly_gaussian(const PolyC& p, const GaussianElement& G,
                                   const ExpressionParameter& K, const HbarContext& ctx);
GaussianElement star_gaussian_poly(const GaussianElement& G, const PolyC& p,
                                   const ExpressionParameter& K, const HbarContext& ctx);

// e_*^{<a,u>/(i hbar)} *_K f and f *_K e_*^{<a,u>/(i hbar)} by the shift rule.
GaussianElement exp_linear_star_function(const Vec& a, const GaussianElement& f,
                                         const ExpressionParameter& K, const HbarContext& ctx);
GaussianElement star_function_exp_linear(const GaussianElement& f, const Vec& a,
                                         const ExpressionParameter& K, const HbarContext& ctx);

// Prop-Fundcal product of two linear star-exponentials.
GaussianElement star_linear_exponentials(const Vec& a, const Vec& b, const ExpressionParameter& K,
                                         const HbarContext& ctx);

// Intertwiner on the Gaussian class, branch tracked by continuation K -> K2.
GaussianElement intertwine_gaussian(const GaussianElement& G, const ExpressionParameter& K,
                                    const ExpressionParameter& K2, const HbarContext& ctx);

// || u_k * G + G * u_k || on a test grid (Prop. anticomgen residual).
double anticommute_check(const GaussianElement& G, int slot, const ExpressionParameter& K,
                         const HbarContext& ctx);

// Linear combinations of Gaussian elements (polar-element algebra, quadrature sums).
struct GaussianSum {
    std::vector<GaussianElement> terms;

    GaussianSum() = default;
    GaussianSum(GaussianElement g) { terms.push_back(std::move(g)); }
    Cx value(const Vec& u) const {
        Cx s = 0.0;
        for (const auto& t : terms) s += t.value(u);
        return s;
    }
    GaussianSum scaled(Cx c) const {
        GaussianSum r = *this;
        for (auto& t : r.terms) t.amplitude.value *= c;
        return r;
    }
    GaussianSum& operator+=(const GaussianSum& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        return *this;
    }
};

GaussianSum star_sum(const GaussianSum& a, const GaussianSum& b, const ExpressionParameter& K,
                     const HbarContext& ctx, const StarOptions& opts = {});
GaussianSum star_sum_poly(const PolyC& p, const GaussianSum& g, const ExpressionParameter& K,
                          const HbarContext& ctx);
GaussianSum star_poly_sum(const GaussianSum& g, const PolyC& p, const ExpressionParameter& K,
                          const HbarContext& ctx);
double sum_grid_distance(const GaussianSum& a, const GaussianSum& b, double radius = 1.5,
                         int per_axis = 5);

}  // namespace star
