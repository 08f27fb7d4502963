#include "star/gaussian.hpp"

namespace star {

Cx GaussianElement::value(const Vec& u) const {
    Cx q = (u.transpose() * quad * u)(0);
    for (int i = 0; i < n(); ++i) q += lin(i) * u(i);
    std::vector<Cx> pt(n());
    for (int i = 0; i < n(); ++i) pt[i] = u(i);
    return amplitude.value * prefactor.eval(pt) * std::exp(q / ctx.ihbar());
}

Cx GaussianElement::value_real(const std::vector<double>& u) const {
    Vec v(n());
    for (int i = 0; i < n(); ++i) v(i) = u[i];
    return value(v);
}

bool GaussianElement::has_prefactor() const {
    if (prefactor.size() != 1) return !prefactor.is_zero();
    return std::abs(prefactor.coeff(Multi(n(), 0)) - Cx(1.0)) > 0.0;
}

GaussianElement gaussian_constant(Cx c, const HbarContext& ctx) {
    GaussianElement g(ctx);
    g.amplitude = BranchedScalar(c, 0);
    g.hat.kind = HatKind::Point;
    g.hat.offset = Vec::Zero(ctx.n());
    return g;
}

GaussianElement k_expression_linear_exp(const Vec& a, const ExpressionParameter& K,
                                        const HbarContext& ctx) {
    K.check_dim(static_cast<int>(a.size()));
    GaussianElement g(ctx);
    Cx w = std::exp((a.transpose() * K.K() * a)(0) / (4.0 * ctx.ihbar()));
    g.amplitude = BranchedScalar(w, 0);
    g.lin = a;
    g.hat.kind = HatKind::Point;
    g.hat.offset = a;
    return g;
}

namespace {

// K-expression of the delta with hat data supported on `slots`:
// amplitude (sqrt 2)^d / sqrt(det iK_block) and exponent
// -(1/hbar)(u-x)|_slots (iK_block)^{-1} (u-x)|_slots.
GaussianElement delta_on_slots(const std::vector<int>& slots, const Vec& x_on_slots,
                               const ExpressionParameter& K, const VFrame& V,
                               const HbarContext& ctx) {
    const int d = static_cast<int>(slots.size());
    Mat Kb(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) Kb(a, b) = K.K()(slots[a], slots[b]);
    Cx sd = sqrt_det_iA_on_V(I_UNIT * Kb, V, slots);  // throws when not V-class
    GaussianElement g(ctx);
    Mat Kinv = Kb.inverse();
    // -(1/hbar) w (iK)^{-1} w  ==  (1/i hbar) * (- w K^{-1} w)
    Mat A = -Kinv;
    Cx amp = std::pow(std::sqrt(2.0), d) / sd;
    Vec b = 2.0 * Kinv * x_on_slots;
    Cx cst = -(x_on_slots.transpose() * Kinv * x_on_slots)(0);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) g.quad(slots[a], slots[c]) = A(a, c);
    for (int a = 0; a < d; ++a) g.lin(slots[a]) = b(a);
    g.amplitude = BranchedScalar(amp * std::exp(cst / ctx.ihbar()), 0);
    g.hat.kind = (d == ctx.n()) ? HatKind::Full : HatKind::Slots;
    g.hat.slots = slots;
    g.hatP = Mat::Zero(d, d);
    g.hatp = Vec(d);
    for (int a = 0; a < d; ++a) g.hatp(a) = -x_on_slots(a);
    g.hatc = Cx(1.0);
    return g;
}

}  // namespace

GaussianElement delta_full(const Vec& x, const ExpressionParameter& K, const VFrame& V,
                           const HbarContext& ctx) {
    K.check_dim(ctx.n());
    if (x.size() != ctx.n()) throw std::invalid_argument("dimension mismatch in delta_full");
    return delta_on_slots(all_slots(ctx.n()), x, K, V, ctx);
}

GaussianElement delta_half(const Vec& xt, HalfBlock block, const ExpressionParameter& K,
                           const VFrame& V, const HbarContext& ctx) {
    K.check_dim(ctx.n());
    if (xt.size() != ctx.m) throw std::invalid_argument("dimension mismatch in delta_half");
    std::vector<int> slots(ctx.m);
    for (int k = 0; k < ctx.m; ++k) slots[k] = (block == HalfBlock::UBlock) ? k : ctx.m + k;
    return delta_on_slots(slots, xt, K, V, ctx);
}

GaussianElement delta_pair(int k, const ExpressionParameter& K, const VFrame& V,
                           const HbarContext& ctx) {
    if (k < 0 || k >= ctx.m) throw std::invalid_argument("pair index out of range");
    std::vector<int> slots = {k, ctx.m + k};
    return delta_on_slots(slots, Vec::Zero(2), K, V, ctx);
}

GaussianElement adjoint_translate(const Vec& a, const GaussianElement& G,
                                  const ExpressionParameter& K, const HbarContext& ctx) {
    K.check_dim(ctx.n());
    const int n = ctx.n();
    const int m = ctx.m;
    Vec aJ(n);
    for (int k = 0; k < m; ++k) {
        aJ(k) = a(m + k);
        aJ(m + k) = -a(k);
    }
    GaussianElement g = G;
    // substitute u -> u + aJ
    Cx cst = (aJ.transpose() * G.quad * aJ)(0);
    for (int i = 0; i < n; ++i) cst += G.lin(i) * aJ(i);
    g.lin = G.lin + 2.0 * (G.quad * aJ);
    g.amplitude.value *= std::exp(cst / ctx.ihbar());
    if (G.has_prefactor()) {
        std::vector<Cx> shift(n);
        for (int i = 0; i < n; ++i) shift[i] = aJ(i);
        g.prefactor = G.prefactor.shifted(shift);
    }
    if (g.hat.kind == HatKind::Slots) {
        for (std::size_t idx = 0; idx < g.hat.slots.size(); ++idx)
            g.hatp(idx) += aJ(g.hat.slots[idx]);
    }
    return g;
}

namespace {

std::vector<std::vector<double>> sample_cloud(int n, double radius, int per_axis) {
    std::vector<std::vector<double>> pts;
    std::size_t total = 1;
    for (int d = 0; d < n; ++d) total *= per_axis;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t t = flat;
        std::vector<double> p(n);
        for (int d = 0; d < n; ++d) {
            int i = static_cast<int>(t % per_axis);
            t /= per_axis;
            p[d] = -radius + 2.0 * radius * i / (per_axis - 1.0);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace

double grid_distance(const GaussianElement& a, const GaussianElement& b, double radius,
                     int per_axis) {
    double worst = 0.0;
    for (const auto& p : sample_cloud(a.n(), radius, per_axis))
        worst = std::max(worst, std::abs(a.value_real(p) - b.value_real(p)));
    return worst;
}

double grid_norm(const GaussianElement& a, double radius, int per_axis) {
    double worst = 0.0;
    for (const auto& p : sample_cloud(a.n(), radius, per_axis))
        worst = std::max(worst, std::abs(a.value_real(p)));
    return worst;
}

double sum_grid_distance(const GaussianSum& a, const GaussianSum& b, double radius, int per_axis) {
    if (a.terms.empty() && b.terms.empty()) return 0.0;
    int n = a.terms.empty() ? b.terms.front().n() : a.terms.front().n();
    double worst = 0.0;
    for (const auto& p : sample_cloud(n, radius, per_axis)) {
        Vec u(n);
        for (int i = 0; i < n; ++i) u(i) = p[i];
        worst = std::max(worst, std::abs(a.value(u) - b.value(u)));
    }
    return worst;
}

}  // namespace star
