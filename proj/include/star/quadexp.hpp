#pragma once

#include "star/gaussian.hpp"

namespace star {

// Quadratic form H = <u g, u g>_*/(i hbar) (symplectic frame g, g J g^T = J)
// or H = <u (alpha J), u>_*/(i hbar) (alpha in sp(m,C)).
// For m = 1 the su-type family is also reachable through (x, y, rho, theta).
class QuadraticForm {
  public:
    enum class Rep { Frame, Algebra };

    static QuadraticForm from_frame(const Mat& g, double tol = 1e-12);
    static QuadraticForm from_algebra(const Mat& alpha, double tol = 1e-12);
    // m = 1: g t g = [[x+iy, i rho],[i rho, x-iy]], x + i y = sqrt(1-rho^2) e^{i theta}.
    static QuadraticForm from_xyrho(double rho, double theta);
    // m = 1: the normalized hyperbolic generator 2 u o v (g = [[1,i],[i,1]]/sqrt 2).
    static QuadraticForm pair_hyperbolic(int k, int m);

    Rep rep() const { return rep_; }
    const Mat& g() const { return g_; }
    const Mat& alpha() const { return alpha_; }
    int n() const { return static_cast<int>(g_.rows()); }
    int m() const { return n() / 2; }

    // Symmetric coefficient matrix A with H = <u A, u>_*/(i hbar); alpha = A J.
    Mat coefficient_matrix() const { return -alpha_ * standard_J(m()); }

    std::optional<std::array<double, 3>> xyrho() const { return xyrho_; }

  private:
    Rep rep_ = Rep::Frame;
    Mat g_;
    Mat alpha_;
    std::optional<std::array<double, 3>> xyrho_;
};

// Polyline in the complex time plane starting at 0.
struct PathSpec {
    std::vector<Cx> vertices;  // starting at 0
    double max_step = 0.05;
    double detour_radius = 0.05;

    static PathSpec straight(Cx end) { return {{Cx(0.0), end}, 0.05, 0.05}; }
};

// K-ordered expression of e_*^{t H} by the closed determinant formula;
// direct evaluation on sheet 0. Throws "singular point" when the determinant
// vanishes at t.
GaussianElement quad_exp(const QuadraticForm& H, Cx t, const ExpressionParameter& K,
                         const HbarContext& ctx);

// Determinant entering the amplitude of quad_exp (frame rep: det(cos t I - sin t g^T K g)).
Cx quad_exp_det(const QuadraticForm& H, Cx t, const ExpressionParameter& K);

// Amplitude square root continued continuously along the path; the sheet index
// is the parity of slit crossings. The endpoint matches quad_exp up to the
// tracked sign.
GaussianElement continue_along_path(const QuadraticForm& H, const PathSpec& path,
                                    const ExpressionParameter& K, const HbarContext& ctx);

// All zeros of the amplitude determinant in the closed window, pi-periodic
// two-line pattern per Lemma-singularpts structure; Newton-polished.
struct SingularPoint {
    Cx t;
    int multiplicity;
};
std::vector<SingularPoint> singular_points(const QuadraticForm& H, const ExpressionParameter& K,
                                           Cx window_lo, Cx window_hi, const HbarContext& ctx);

// m = 1 exchanging interval of e_*^{z u o v/(i hbar)}: the real parts of the two
// singular-line families; degenerate K reports a = b.
struct ExchangingInterval {
    double a;
    double b;
    bool contains_zero() const { return a < 0.0 && 0.0 < b; }
};
ExchangingInterval exchanging_interval(const ExpressionParameter& K, const HbarContext& ctx);

// Periodicity of e_*^{(s + i sigma) u o v /(i hbar)} in sigma (period 2 pi) at
// real part s: +1 periodic, -1 alternating. Evaluated by branch continuation.
int period_flag(const ExpressionParameter& K, double s, const HbarContext& ctx);

// Polar element of pair k: continuation of e_*^{t H_k} with
// H_k = 2 u_k o v_k/(i hbar) along `path` rescaled to end at the polar time.
// The canonical straight path ends at i pi/2 in the parameter of H_k.
struct PolarElement {
    GaussianElement body;
    std::string path_fingerprint;
};
PolarElement polar_element(int k, const ExpressionParameter& K, const HbarContext& ctx,
                           std::optional<PathSpec> path = std::nullopt);
// Total polar element as the star product over all pairs.
PolarElement polar_total(const ExpressionParameter& K, const HbarContext& ctx);

// Classification against +/- 2^{-m} delta_*(u) and +/- i 2^{-m} delta_*(u).
// Returns the matching constant (1, -1, i, -i) and the residual.
struct PolarClassification {
    Cx constant;
    double residual;
};
PolarClassification classify_polar(const GaussianElement& polar, const ExpressionParameter& K,
                                   const VFrame& V, const HbarContext& ctx);

// Straight path from 0 to t_end with deterministic rectangular detours around
// singular points lying within `detour_radius` of the segment.
PathSpec detoured_path(const QuadraticForm& H, const ExpressionParameter& K, Cx t_end,
                       double detour_radius, const HbarContext& ctx);

// Flow square of the polar element: continuation of e_*^{t 2u_k o v_k/(i hbar)}
// to t = i pi along the detoured path (the solution-with-initial-data-1 object).
GaussianElement polar_flow_square(int k, const ExpressionParameter& K, const HbarContext& ctx);

// Continuation of G * e_*^{t H} from t = 0 to `t_end` along a straight segment
// or an explicit path (the path-composed product used for polar-element algebra).
GaussianElement star_exp_action(const GaussianElement& G, const QuadraticForm& H, Cx t_end,
                                const ExpressionParameter& K, const HbarContext& ctx,
                                int steps = 64);
GaussianElement star_exp_action_path(const GaussianElement& G, const QuadraticForm& H,
                                     const PathSpec& path, const ExpressionParameter& K,
                                     const HbarContext& ctx, int steps_per_unit = 48);

// Bumping relations: eps_00(k) * u_l = (-1)^{delta_kl} u_l * eps_00(k), same for v_l.
struct BumpingReport {
    double worst_residual;
    bool passed;
};
BumpingReport bumping_relations_check(int k, const ExpressionParameter& K, const HbarContext& ctx,
                                      double tol = 1e-9);

}  // namespace star
