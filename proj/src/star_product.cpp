#include <map>

#include "star/gaussian.hpp"

namespace star {

namespace {

// ---- small helpers on quadratic exponents represented as Poly over extended vars ----

// Extract exponent data from a polynomial E = (1/i hbar)(u^T A u + b^T u + c)
// restricted to the first n variables (all others already set to zero).
struct QuadData {
    Mat A;
    Vec b;
    Cx c;
};

QuadData extract_quad(const PolyC& E, int n, Cx ihbar) {
    QuadData q{Mat::Zero(n, n), Vec::Zero(n), Cx(0.0)};
    for (const auto& [e, coef] : E.terms()) {
        int deg = 0;
        int vi = -1, vj = -1;
        bool bad = false;
        for (std::size_t v = 0; v < e.size(); ++v) {
            for (int r = 0; r < e[v]; ++r) {
                ++deg;
                if (vi < 0)
                    vi = static_cast<int>(v);
                else if (vj < 0)
                    vj = static_cast<int>(v);
                else
                    bad = true;
            }
        }
        if (bad || deg > 2) throw std::logic_error("exponent not quadratic");
        Cx w = coef * ihbar;
        if (deg == 0)
            q.c += w;
        else if (deg == 1)
            q.b(vi) += w;
        else if (vi == vj)
            q.A(vi, vi) += w;
        else {
            q.A(vi, vj) += 0.5 * w;
            q.A(vj, vi) += 0.5 * w;
        }
    }
    return q;
}

// Keep only sigma-free terms and project down to the first n variables.
PolyC project_to_u(const PolyC& W, int n) {
    PolyC out(n);
    for (const auto& [e, c] : W.terms()) {
        bool pure = true;
        for (std::size_t v = n; v < e.size(); ++v)
            if (e[v] != 0) {
                pure = false;
                break;
            }
        if (!pure) continue;
        Multi en(e.begin(), e.begin() + n);
        out.add_term(en, c);
    }
    return out;
}

// Wick polynomial: apply P1(i hbar d_sigma1) P2(i hbar d_sigma2) to e^E and
// divide by e^E; sigma1 occupies vars [n, 2n), sigma2 [2n, 3n).
PolyC wick_apply(const PolyC& P1, const PolyC& P2, const PolyC& E, int n, Cx ihbar) {
    const int N = E.nvars();
    std::vector<PolyC> dE(N, PolyC(N));
    for (int v = n; v < N; ++v) dE[v] = E.derivative(v);
    PolyC total(N);
    for (const auto& [e2, c2] : P2.terms()) {
        for (const auto& [e1, c1] : P1.terms()) {
            PolyC W = PolyC::one(N);
            auto apply = [&](int var, int count) {
                for (int r = 0; r < count; ++r) W = (W.derivative(var) + W * dE[var]).scaled(ihbar);
            };
            for (int v = 0; v < n; ++v) apply(n + v, e1[v]);
            for (int v = 0; v < n; ++v) apply(2 * n + v, e2[v]);
            total += W.scaled(c1 * c2);
        }
    }
    return total;
}

PolyC affine_poly(int nvars, const Vec& coeffs, const std::vector<int>& vars, Cx constant) {
    PolyC p = PolyC::constant(nvars, constant);
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (coeffs(k) != Cx(0.0)) {
            Multi e(nvars, 0);
            e[vars[k]] = 1;
            p.add_term(e, coeffs(k));
        }
    }
    return p;
}

Cx sqrt_det_with_phases(const Mat& N, const VFrame& V, const std::vector<int>& slots,
                        double margin) {
    const int d = static_cast<int>(N.rows());
    Mat M(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            M(a, b) = V.phase_slot(slots[a]) * V.phase_slot(slots[b]) * N(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M.real() + M.real().transpose()));
    if (es.eigenvalues().minCoeff() <= margin)
        throw std::domain_error("undefined product: convergence certificate failed");
    return sqrt_det_positive(M) * std::conj(V.phase_product(slots));
}

struct HatData {
    std::vector<int> slots;
    Mat P;
    Vec p;     // linear phase, sigma-free part
    Cx c;      // scalar factor excluding the b-quadratic (kept in the exponent)
    Mat dpds;  // d p / d sigma (|slots| x n), zero when prefactors are absent
    Mat Ainv;  // for Full elements: quadratic-in-(b+sigma) weight matrix
    bool full = false;
};

HatData hat_of(const GaussianElement& G, const ExpressionParameter& K, const VFrame& V,
               double margin) {
    HatData h;
    if (G.hat.kind == HatKind::Slots) {
        if (G.has_prefactor())
            throw std::domain_error("undefined product: prefactor on subspace element");
        h.slots = G.hat.slots;
        h.P = G.hatP;
        h.p = G.hatp;
        h.c = G.hatc;
        h.dpds = Mat::Zero(h.slots.size(), G.n());
        // rapid decrease of the K-expression on V (certified at construction,
        // re-checked for the product frame)
        const int d = static_cast<int>(h.slots.size());
        Mat Kb(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) Kb(a, b) = K.K()(h.slots[a], h.slots[b]);
        sqrt_det_with_phases(4.0 * I_UNIT * (h.P + 0.25 * Kb), V, h.slots, margin);
        return h;
    }
    // Full element: requires invertible quad and decay on V.
    const int n = G.n();
    Eigen::FullPivLU<Mat> lu(G.quad);
    if (!lu.isInvertible()) throw std::domain_error("undefined product: singular quadratic form");
    Mat Ainv = lu.inverse();
    Cx sd = sqrt_det_with_phases(4.0 * I_UNIT * G.quad, V, all_slots(n), margin);
    h.slots = all_slots(n);
    h.P = -0.25 * (Ainv + K.K());
    h.p = 0.5 * Ainv * G.lin;
    h.c = G.amplitude.value * std::pow(2.0, n / 2.0) / sd;
    h.dpds = 0.5 * Ainv;
    h.Ainv = Ainv;
    h.full = true;
    return h;
}

GaussianElement star_certified(const GaussianElement& G1, const GaussianElement& G2,
                               const ExpressionParameter& K, const HbarContext& ctx,
                               const VFrame& V, double margin) {
    const int n = ctx.n();
    const Cx ihbar = ctx.ihbar();
    HatData h1 = hat_of(G1, K, V, margin);
    HatData h2 = hat_of(G2, K, V, margin);
    const int d1 = static_cast<int>(h1.slots.size());
    const int d2 = static_cast<int>(h2.slots.size());
    const int d = d1 + d2;

    Mat Mt(d, d);
    Mat Kf = K.K();
    Mat Lf = K.Lambda();
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d1; ++b)
            Mt(a, b) = h1.P(a, b) + 0.25 * Kf(h1.slots[a], h1.slots[b]);
    for (int a = 0; a < d2; ++a)
        for (int b = 0; b < d2; ++b)
            Mt(d1 + a, d1 + b) = h2.P(a, b) + 0.25 * Kf(h2.slots[a], h2.slots[b]);
    for (int a = 0; a < d1; ++a)
        for (int b = 0; b < d2; ++b) {
            Mt(a, d1 + b) = 0.25 * Lf(h1.slots[a], h2.slots[b]);
            Mt(d1 + b, a) = Mt(a, d1 + b);
        }

    std::vector<int> comb = h1.slots;
    comb.insert(comb.end(), h2.slots.begin(), h2.slots.end());
    Cx sd = sqrt_det_with_phases(4.0 * I_UNIT * Mt, V, comb, margin);

    Eigen::FullPivLU<Mat> lu(Mt);
    if (!lu.isInvertible()) throw std::domain_error("undefined product: degenerate phase form");
    Mat Q = lu.inverse();

    if (!G1.has_prefactor() && !G2.has_prefactor()) {
        // Pure-Gaussian fast path: exponent -(1/4 i hbar) L^T Q L with
        // L = p0 + R u, plus the b-quadratics of full elements.
        Vec p0(d);
        for (int a = 0; a < d1; ++a) p0(a) = h1.p(a);
        for (int a = 0; a < d2; ++a) p0(d1 + a) = h2.p(a);
        Mat R = Mat::Zero(d, n);
        for (int a = 0; a < d1; ++a) R(a, h1.slots[a]) = 1.0;
        for (int a = 0; a < d2; ++a) R(d1 + a, h2.slots[a]) = 1.0;
        Mat A_out = -0.25 * (R.transpose() * Q * R);
        Vec b_out = -0.5 * (R.transpose() * Q * p0);
        Cx c_out = -0.25 * (p0.transpose() * Q * p0)(0);
        if (h1.full) c_out += -0.25 * (G1.lin.transpose() * h1.Ainv * G1.lin)(0);
        if (h2.full) c_out += -0.25 * (G2.lin.transpose() * h2.Ainv * G2.lin)(0);
        GaussianElement out(ctx);
        out.quad = symmetrize(A_out);
        out.lin = b_out;
        Cx amp = h1.c * h2.c * std::pow(std::sqrt(2.0), d) / sd * std::exp(c_out / ihbar);
        out.amplitude = BranchedScalar(amp, G1.amplitude.sheet + G2.amplitude.sheet);
        if (G1.dist) out.dist = G1.dist;
        if (G2.dist) out.dist = G2.dist;
        return out;
    }

    // Exponent over variables y = (u, sigma1, sigma2).
    const int N = 3 * n;
    std::vector<PolyC> L(d, PolyC(N));
    for (int a = 0; a < d1; ++a) {
        // p-part + dp/dsigma * sigma1 + u_slot
        PolyC Lp = PolyC::constant(N, h1.p(a));
        for (int v = 0; v < n; ++v)
            if (h1.dpds(a, v) != Cx(0.0)) {
                Multi e(N, 0);
                e[n + v] = 1;
                Lp.add_term(e, h1.dpds(a, v));
            }
        Multi eu(N, 0);
        eu[h1.slots[a]] = 1;
        Lp.add_term(eu, Cx(1.0));
        L[a] = Lp;
    }
    for (int a = 0; a < d2; ++a) {
        PolyC Lp = PolyC::constant(N, h2.p(a));
        for (int v = 0; v < n; ++v)
            if (h2.dpds(a, v) != Cx(0.0)) {
                Multi e(N, 0);
                e[2 * n + v] = 1;
                Lp.add_term(e, h2.dpds(a, v));
            }
        Multi eu(N, 0);
        eu[h2.slots[a]] = 1;
        Lp.add_term(eu, Cx(1.0));
        L[d1 + a] = Lp;
    }

    PolyC E(N);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            if (Q(a, b) != Cx(0.0)) E += (L[a] * L[b]).scaled(-0.25 * Q(a, b) / ihbar);

    // b-quadratics of full elements (their dependence on the sources)
    auto add_b_quad = [&](const HatData& h, const Vec& bvec, int sigma_base) {
        if (!h.full) return;
        std::vector<PolyC> bs(n, PolyC(N));
        for (int v = 0; v < n; ++v) {
            PolyC t = PolyC::constant(N, bvec(v));
            Multi e(N, 0);
            e[sigma_base + v] = 1;
            t.add_term(e, Cx(1.0));
            bs[v] = t;
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (h.Ainv(a, b) != Cx(0.0))
                    E += (bs[a] * bs[b]).scaled(-0.25 * h.Ainv(a, b) / ihbar);
    };
    add_b_quad(h1, G1.lin, n);
    add_b_quad(h2, G2.lin, 2 * n);

    // Assemble the result.
    GaussianElement out(ctx);
    PolyC E0 = project_to_u(E, n);
    QuadData q = extract_quad(E0, n, ihbar);
    out.quad = symmetrize(q.A);
    out.lin = q.b;
    Cx amp = h1.c * h2.c * std::pow(std::sqrt(2.0), d) / sd * std::exp(q.c / ihbar);
    int sheet = G1.amplitude.sheet + G2.amplitude.sheet;
    out.amplitude = BranchedScalar(amp, sheet);

    if (G1.has_prefactor() || G2.has_prefactor()) {
        PolyC P1 = G1.prefactor.embedded(N, all_slots(n));
        PolyC P2 = G2.prefactor.embedded(N, all_slots(n));
        PolyC W = wick_apply(P1, P2, E, n, ihbar);
        out.prefactor = project_to_u(W, n);
    }
    if (G1.dist) out.dist = G1.dist;
    if (G2.dist) out.dist = G2.dist;
    return out;
}

GaussianElement star_continuation(const GaussianElement& G1, const GaussianElement& G2,
                                  const ExpressionParameter& K, const HbarContext& ctx,
                                  const StarOptions& opts) {
    const int n = ctx.n();
    const Cx ihbar = ctx.ihbar();
    Mat Lf = K.Lambda();
    Mat LfT = Lf.transpose();

    auto detfun = [&](Cx tau) {
        Mat T = Mat::Identity(n, n) - (Lf * (tau * G2.quad)) * (LfT * (tau * G1.quad));
        return T.determinant();
    };

    // Continuous square-root branch of det(I - BS) along a tau-path from 0 to 1.
    // Obstructions are detoured through +i (deterministic branch selection).
    std::vector<Cx> tau_path = {Cx(0.0), Cx(1.0)};
    Cx sqrtD;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 6)
            throw std::domain_error("undefined product: cannot continue determinant branch");
        try {
            ArgTracker trk(detfun(Cx(0.0)));
            for (std::size_t v = 1; v < tau_path.size(); ++v) {
                Cx a = tau_path[v - 1], b = tau_path[v];
                double seglen = std::abs(b - a);
                double step = std::min(0.125, seglen);
                double s = 0.0;
                while (s < seglen) {
                    double next = std::min(seglen, s + step);
                    Cx tz = a + (b - a) * (next / seglen);
                    Cx dv = detfun(tz);
                    if (std::abs(dv) < opts.det_floor) throw std::domain_error("det-zero");
                    if (!trk.advance(dv)) {
                        step *= 0.5;
                        if (step < 1e-8) throw std::domain_error("arg-jump");
                        continue;
                    }
                    s = next;
                    step = std::min(0.25, step * 1.6);
                }
            }
            sqrtD = trk.sqrt_value();
            if (std::abs(sqrtD) * std::abs(sqrtD) < opts.det_floor)
                throw std::domain_error("undefined product: determinant vanishes at tau = 1");
            break;
        } catch (const std::domain_error& e) {
            if (std::string(e.what()).rfind("undefined product", 0) == 0) throw;
            // bump the whole interior of the path into the upper half plane
            double lift = 0.2 * (attempt + 1);
            tau_path = {Cx(0.0), Cx(0.15, lift), Cx(0.85, lift), Cx(1.0)};
        }
    }

    // (I - BS)^{-1} B at tau = 1
    Mat B = Mat::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            B(a, n + b) = 0.5 * ihbar * Lf(a, b);
            B(n + a, b) = 0.5 * ihbar * LfT(a, b);
        }
    Mat S = Mat::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            S(a, b) = 2.0 / ihbar * G1.quad(a, b);
            S(n + a, n + b) = 2.0 / ihbar * G2.quad(a, b);
        }
    Mat IBS = Mat::Identity(2 * n, 2 * n) - B * S;
    Mat Ncore = IBS.inverse() * B;

    // Exponent over y = (u, sigma1, sigma2): E = 1/2 v^T N v + 1/2 W^T S W + c^T W
    // with W = (u; u) and v = S W + c(sigma), c = (b1 + sigma1; b2 + sigma2)/(i hbar).
    const int NV = 3 * n;
    std::vector<PolyC> v(2 * n, PolyC(NV)), W(2 * n, PolyC(NV)), cvec(2 * n, PolyC(NV));
    for (int a = 0; a < 2 * n; ++a) {
        Multi eu(NV, 0);
        eu[a % n] = 1;
        PolyC w(NV);
        w.add_term(eu, Cx(1.0));
        W[a] = w;
        PolyC cc = PolyC::constant(NV, (a < n ? G1.lin(a) : G2.lin(a - n)) / ihbar);
        Multi es(NV, 0);
        es[n + a] = 1;  // sigma1 at [n,2n), sigma2 at [2n,3n)
        cc.add_term(es, Cx(1.0) / ihbar);
        cvec[a] = cc;
    }
    for (int a = 0; a < 2 * n; ++a) {
        PolyC acc = cvec[a];
        for (int b = 0; b < 2 * n; ++b)
            if (S(a, b) != Cx(0.0)) acc += W[b].scaled(S(a, b));
        v[a] = acc;
    }
    PolyC E(NV);
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
            if (Ncore(a, b) != Cx(0.0)) E += (v[a] * v[b]).scaled(0.5 * Ncore(a, b));
            if (S(a, b) != Cx(0.0)) E += (W[a] * W[b]).scaled(0.5 * S(a, b));
        }
    for (int a = 0; a < 2 * n; ++a) E += (cvec[a] * W[a]);

    GaussianElement out(ctx);
    PolyC E0 = project_to_u(E, n);
    QuadData q = extract_quad(E0, n, ihbar);
    out.quad = symmetrize(q.A);
    out.lin = q.b;
    Cx amp = G1.amplitude.value * G2.amplitude.value / sqrtD * std::exp(q.c / ihbar);
    Cx principal_root = std::sqrt(sqrtD * sqrtD);
    int cont_sheet = (std::abs(sqrtD - principal_root) <= std::abs(sqrtD + principal_root)) ? 0 : 1;
    out.amplitude = BranchedScalar(amp, G1.amplitude.sheet + G2.amplitude.sheet + cont_sheet);

    if (G1.has_prefactor() || G2.has_prefactor()) {
        PolyC P1 = G1.prefactor.embedded(NV, all_slots(n));
        PolyC P2 = G2.prefactor.embedded(NV, all_slots(n));
        PolyC Wick = wick_apply(P1, P2, E, n, ihbar);
        out.prefactor = project_to_u(Wick, n);
    }
    if (G1.dist) out.dist = G1.dist;
    if (G2.dist) out.dist = G2.dist;
    return out;
}

bool j_null_slots(const std::vector<int>& slots, int m) {
    for (int a : slots)
        for (int b : slots)
            if (std::abs(a - b) == m) return false;
    return true;
}

}  // namespace

GaussianElement exp_linear_star_function(const Vec& a, const GaussianElement& f,
                                         const ExpressionParameter& K, const HbarContext& ctx) {
    K.check_dim(ctx.n());
    const int n = ctx.n();
    Vec s = 0.5 * K.LambdaT() * a;  // components of a(K+J)/2 for row a
    GaussianElement g = f;
    Cx w = std::exp((a.transpose() * K.K() * a)(0) / (4.0 * ctx.ihbar()));
    Cx cst = (s.transpose() * f.quad * s)(0);
    for (int i = 0; i < n; ++i) cst += f.lin(i) * s(i);
    g.lin = f.lin + 2.0 * (f.quad * s) + a;
    g.amplitude.value *= w * std::exp(cst / ctx.ihbar());
    if (f.has_prefactor()) {
        std::vector<Cx> sh(n);
        for (int i = 0; i < n; ++i) sh[i] = s(i);
        g.prefactor = f.prefactor.shifted(sh);
    }
    if (f.hat.kind == HatKind::Point) {
        g.hat.kind = HatKind::Point;
        g.hat.offset = f.hat.offset + a;
    } else {
        g.hat.kind = HatKind::Full;
    }
    return g;
}

GaussianElement star_function_exp_linear(const GaussianElement& f, const Vec& a,
                                         const ExpressionParameter& K, const HbarContext& ctx) {
    K.check_dim(ctx.n());
    const int n = ctx.n();
    Vec s = 0.5 * K.Lambda() * a;  // components of a(K-J)/2 for row a
    GaussianElement g = f;
    Cx w = std::exp((a.transpose() * K.K() * a)(0) / (4.0 * ctx.ihbar()));
    Cx cst = (s.transpose() * f.quad * s)(0);
    for (int i = 0; i < n; ++i) cst += f.lin(i) * s(i);
    g.lin = f.lin + 2.0 * (f.quad * s) + a;
    g.amplitude.value *= w * std::exp(cst / ctx.ihbar());
    if (f.has_prefactor()) {
        std::vector<Cx> sh(n);
        for (int i = 0; i < n; ++i) sh[i] = s(i);
        g.prefactor = f.prefactor.shifted(sh);
    }
    if (f.hat.kind == HatKind::Point) {
        g.hat.kind = HatKind::Point;
        g.hat.offset = f.hat.offset + a;
    } else {
        g.hat.kind = HatKind::Full;
    }
    return g;
}

GaussianElement star_linear_exponentials(const Vec& a, const Vec& b, const ExpressionParameter& K,
                                         const HbarContext& ctx) {
    Cx phase = std::exp(0.5 * pair_J(a, b) / ctx.ihbar());
    GaussianElement g = k_expression_linear_exp(a + b, K, ctx);
    g.amplitude.value *= phase;
    return g;
}

GaussianElement star_gaussian_gaussian(const GaussianElement& G1, const GaussianElement& G2,
                                       const ExpressionParameter& K, const HbarContext& ctx,
                                       const StarOptions& opts) {
    K.check_dim(ctx.n());
    if (G1.dist && G2.dist)
        throw std::domain_error("undefined product: distributional coefficients on both factors");

    // Linear-exponential shortcuts (exact shift rules).
    if (G1.hat.kind == HatKind::Point && !G1.has_prefactor()) {
        Vec a = G1.hat.offset;
        Cx w = std::exp((a.transpose() * K.K() * a)(0) / (4.0 * ctx.ihbar()));
        Cx c1 = G1.amplitude.value / w;
        GaussianElement r = exp_linear_star_function(a, G2, K, ctx);
        r.amplitude.value *= c1;
        r.amplitude.sheet += G1.amplitude.sheet;
        if (G1.dist) r.dist = G1.dist;
        return r;
    }
    if (G2.hat.kind == HatKind::Point && !G2.has_prefactor()) {
        Vec a = G2.hat.offset;
        Cx w = std::exp((a.transpose() * K.K() * a)(0) / (4.0 * ctx.ihbar()));
        Cx c2 = G2.amplitude.value / w;
        GaussianElement r = star_function_exp_linear(G1, a, K, ctx);
        r.amplitude.value *= c2;
        r.amplitude.sheet += G2.amplitude.sheet;
        if (G2.dist) r.dist = G2.dist;
        return r;
    }

    // Same-block half-delta collision: distributional coefficient output
    // delta^{(V)}(x - x') * delta_*(u - x').
    if (G1.hat.kind == HatKind::Slots && G2.hat.kind == HatKind::Slots &&
        G1.hat.slots == G2.hat.slots && j_null_slots(G1.hat.slots, ctx.m)) {
        GaussianElement r = G2;
        Vec arg = G2.hatp - G1.hatp;  // x - x' (hat phase stores -x)
        r.dist = DistributionalTag{arg};
        r.amplitude.value *= G1.hatc;
        return r;
    }

    // Certified route on a V-frame, with the continuation route as fallback.
    std::vector<VFrame> frames;
    if (opts.V) frames.push_back(*opts.V);
    for (const char* nm : {"real", "imag", "sqrt-i"}) frames.push_back(VFrame::preset(nm, ctx.m));
    for (const auto& V : frames) {
        try {
            return star_certified(G1, G2, K, ctx, V, opts.margin);
        } catch (const std::domain_error&) {
            continue;
        }
    }
    if (!opts.allow_continuation)
        throw std::domain_error("undefined product: no certifying frame found");
    // Subspace elements are entire Gaussians, so the continuation route applies
    // to their 2m-dimensional data directly.
    return star_continuation(G1, G2, K, ctx, opts);
}

namespace {

// Derivative polynomials: d^c (pref * e^{Q/(i hbar)}) = D(c) * e^{Q/(i hbar)}.
struct DerivCache {
    const GaussianElement* G;
    Cx ihbar;
    std::map<Multi, PolyC> memo;
    std::vector<PolyC> dQ;  // affine polys (2 A u + b)_j / (i hbar)

    DerivCache(const GaussianElement& g, Cx ih) : G(&g), ihbar(ih) {
        const int n = g.n();
        dQ.resize(n, PolyC(n));
        for (int j = 0; j < n; ++j) {
            PolyC p = PolyC::constant(n, g.lin(j) / ihbar);
            for (int i = 0; i < n; ++i) {
                Cx c = 2.0 * g.quad(j, i) / ihbar;
                if (c != Cx(0.0)) {
                    Multi e(n, 0);
                    e[i] = 1;
                    p.add_term(e, c);
                }
            }
            dQ[j] = p;
        }
        memo[Multi(n, 0)] = g.prefactor;
    }

    const PolyC& get(const Multi& c) {
        auto it = memo.find(c);
        if (it != memo.end()) return it->second;
        int j = 0;
        while (c[j] == 0) ++j;
        Multi cm = c;
        cm[j] -= 1;
        const PolyC& prev = get(cm);
        PolyC d = prev.derivative(j) + prev * dQ[j];
        return memo.emplace(c, std::move(d)).first->second;
    }
};

struct PGCell {
    int i, j;
    Cx lam;
};

void enum_poly_gauss(const std::vector<PGCell>& cells, std::size_t idx, const Multi& alpha,
                     Multi& row, Multi& col, Cx weight, const Cx& step, DerivCache& dc,
                     const Multi& base_mono, Cx base_coef, PolyC& out, bool poly_left) {
    const int n = static_cast<int>(alpha.size());
    if (idx == cells.size()) {
        Cx c = base_coef * weight;
        for (int v = 0; v < n; ++v) {
            int r = row[v];
            int a = alpha[v];
            for (int k = 0; k < r; ++k) c *= double(a - k);
        }
        Multi mono(n);
        for (int v = 0; v < n; ++v) mono[v] = alpha[v] - row[v];
        PolyC term(n);
        term.add_term(mono, c);
        out += term * dc.get(col);
        return;
    }
    const auto& cell = cells[idx];
    enum_poly_gauss(cells, idx + 1, alpha, row, col, weight, step, dc, base_mono, base_coef, out,
                    poly_left);
    int polyvar = poly_left ? cell.i : cell.j;
    int gaussvar = poly_left ? cell.j : cell.i;
    int k = 0;
    Cx w = weight;
    while (row[polyvar] + 1 <= alpha[polyvar]) {
        ++k;
        row[polyvar] += 1;
        col[gaussvar] += 1;
        w = w * cell.lam * step / double(k);
        enum_poly_gauss(cells, idx + 1, alpha, row, col, w, step, dc, base_mono, base_coef, out,
                        poly_left);
    }
    row[polyvar] -= k;
    col[gaussvar] -= k;
}

GaussianElement star_poly_gauss_impl(const PolyC& p, const GaussianElement& G,
                                     const ExpressionParameter& K, const HbarContext& ctx,
                                     bool poly_left) {
    K.check_dim(p.nvars());
    const int n = ctx.n();
    Mat Lf = K.Lambda();
    std::vector<PGCell> cells;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (Lf(i, j) != Cx(0.0)) cells.push_back({i, j, Lf(i, j)});
    Cx step = Cx(0.0, 0.5) * ctx.hbar;
    DerivCache dc(G, ctx.ihbar());
    PolyC pref(n);
    for (const auto& [alpha, coef] : p.terms()) {
        Multi row(n, 0), col(n, 0);
        enum_poly_gauss(cells, 0, alpha, row, col, Cx(1.0), step, dc, alpha, coef, pref,
                        poly_left);
    }
    GaussianElement out = G;
    out.prefactor = pref;
    out.hat.kind = (G.hat.kind == HatKind::Slots) ? HatKind::Slots : HatKind::Full;
    return out;
}

}  // namespace

GaussianElement star_poly_gaussian(const PolyC& p, const GaussianElement& G,
                                   const ExpressionParameter& K, const HbarContext& ctx) {
    return star_poly_gauss_impl(p, G, K, ctx, true);
}

GaussianElement star_gaussian_poly(const GaussianElement& G, const PolyC& p,
                                   const ExpressionParameter& K, const HbarContext& ctx) {
    return star_poly_gauss_impl(p, G, K, ctx, false);
}

GaussianElement intertwine_gaussian(const GaussianElement& G, const ExpressionParameter& K,
                                    const ExpressionParameter& K2, const HbarContext& ctx) {
    const int n = ctx.n();
    const Cx ihbar = ctx.ihbar();
    Mat dK = K2.K() - K.K();
    auto detfun = [&](double tau) {
        return Mat(Mat::Identity(n, n) - tau * dK * G.quad).determinant();
    };
    ArgTracker trk(detfun(0.0));
    double tau = 0.0, step = 0.125;
    while (tau < 1.0) {
        double next = std::min(1.0, tau + step);
        Cx dv = detfun(next);
        if (std::abs(dv) < 1e-12)
            throw std::domain_error("intertwiner undefined: determinant vanishes on path");
        if (!trk.advance(dv)) {
            step *= 0.5;
            if (step < 1e-8) throw std::domain_error("intertwiner: cannot continue branch");
            continue;
        }
        tau = next;
        step = std::min(0.25, step * 1.6);
    }
    Cx sqrtD = trk.sqrt_value();

    Mat Bt = 0.5 * ihbar * dK;
    Mat S = 2.0 / ihbar * G.quad;
    Mat Ncore = (Mat::Identity(n, n) - Bt * S).inverse() * Bt;

    const int NV = 2 * n;  // (u, sigma)
    std::vector<PolyC> v(n, PolyC(NV)), W(n, PolyC(NV)), cvec(n, PolyC(NV));
    for (int a = 0; a < n; ++a) {
        Multi eu(NV, 0);
        eu[a] = 1;
        PolyC w(NV);
        w.add_term(eu, Cx(1.0));
        W[a] = w;
        PolyC cc = PolyC::constant(NV, G.lin(a) / ihbar);
        Multi es(NV, 0);
        es[n + a] = 1;
        cc.add_term(es, Cx(1.0) / ihbar);
        cvec[a] = cc;
    }
    for (int a = 0; a < n; ++a) {
        PolyC acc = cvec[a];
        for (int b = 0; b < n; ++b)
            if (S(a, b) != Cx(0.0)) acc += W[b].scaled(S(a, b));
        v[a] = acc;
    }
    PolyC E(NV);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (Ncore(a, b) != Cx(0.0)) E += (v[a] * v[b]).scaled(0.5 * Ncore(a, b));
            if (S(a, b) != Cx(0.0)) E += (W[a] * W[b]).scaled(0.5 * S(a, b));
        }
    for (int a = 0; a < n; ++a) E += cvec[a] * W[a];

    GaussianElement out(ctx);
    PolyC E0 = project_to_u(E, n);
    QuadData q = extract_quad(E0, n, ihbar);
    out.quad = symmetrize(q.A);
    out.lin = q.b;
    out.amplitude = BranchedScalar(G.amplitude.value / sqrtD * std::exp(q.c / ihbar),
                                   G.amplitude.sheet + trk.sheet());
    if (G.has_prefactor()) {
        PolyC P1 = G.prefactor.embedded(NV, all_slots(n));
        // single-source Wick: the prefactor acts as P1(i hbar d_sigma)
        const int N = NV;
        std::vector<PolyC> dE(N, PolyC(N));
        for (int vv = n; vv < N; ++vv) dE[vv] = E.derivative(vv);
        PolyC total(N);
        for (const auto& [e1, c1] : P1.terms()) {
            PolyC Wk = PolyC::one(N);
            for (int vv = 0; vv < n; ++vv)
                for (int r = 0; r < e1[vv]; ++r)
                    Wk = (Wk.derivative(n + vv) + Wk * dE[n + vv]).scaled(ihbar);
            total += Wk.scaled(c1);
        }
        out.prefactor = project_to_u(total, n);
    }
    out.dist = G.dist;
    return out;
}

double anticommute_check(const GaussianElement& G, int slot, const ExpressionParameter& K,
                         const HbarContext& ctx) {
    PolyC u = PolyC::variable(ctx.n(), slot);
    GaussianElement l = star_poly_gaussian(u, G, K, ctx);
    GaussianElement r = star_gaussian_poly(G, u, K, ctx);
    GaussianElement s = l;
    s.prefactor = l.prefactor + r.prefactor;
    return grid_norm(s);
}

GaussianSum star_sum(const GaussianSum& a, const GaussianSum& b, const ExpressionParameter& K,
                     const HbarContext& ctx, const StarOptions& opts) {
    GaussianSum out;
    for (const auto& x : a.terms)
        for (const auto& y : b.terms) out.terms.push_back(star_gaussian_gaussian(x, y, K, ctx, opts));
    return out;
}

GaussianSum star_sum_poly(const PolyC& p, const GaussianSum& g, const ExpressionParameter& K,
                          const HbarContext& ctx) {
    GaussianSum out;
    for (const auto& t : g.terms) out.terms.push_back(star_poly_gaussian(p, t, K, ctx));
    return out;
}

GaussianSum star_poly_sum(const GaussianSum& g, const PolyC& p, const ExpressionParameter& K,
                          const HbarContext& ctx) {
    GaussianSum out;
    for (const auto& t : g.terms) out.terms.push_back(star_gaussian_poly(t, p, K, ctx));
    return out;
}

}  // namespace star
