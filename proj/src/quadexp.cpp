#include "star/quadexp.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "star/oracle.hpp"

namespace star {

QuadraticForm QuadraticForm::from_frame(const Mat& g, double tol) {
    const int n = static_cast<int>(g.rows());
    Mat J = standard_J(n / 2);
    if ((g * J * g.transpose() - J).norm() > tol)
        throw std::invalid_argument("frame is not symplectic: g J g^T != J");
    QuadraticForm q;
    q.rep_ = Rep::Frame;
    q.g_ = g;
    q.alpha_ = g * g.transpose() * J;  // A J with A = g g^T
    return q;
}

QuadraticForm QuadraticForm::from_algebra(const Mat& alpha, double tol) {
    const int n = static_cast<int>(alpha.rows());
    Mat J = standard_J(n / 2);
    if ((alpha * J + J * alpha.transpose()).norm() > tol)
        throw std::invalid_argument("alpha is not in sp(m,C): alpha J + J alpha^T != 0");
    QuadraticForm q;
    q.rep_ = Rep::Algebra;
    q.alpha_ = alpha;
    q.g_ = Mat::Identity(n, n);  // frame unused
    return q;
}

QuadraticForm QuadraticForm::from_xyrho(double rho, double theta) {
    if (std::abs(rho) >= 1.0) throw std::invalid_argument("|rho| must be < 1 for this chart");
    const Cx xy = std::sqrt(1.0 - rho * rho) * std::exp(Cx(0.0, theta));
    const double x = xy.real(), y = xy.imag();
    // g t g = [[x+iy, i rho],[i rho, x-iy]] via cosh/sinh entries with xi = eta
    double arg = 1.0 / std::sqrt(1.0 - rho * rho);
    double xieta = std::acosh(arg);
    double xi = 0.5 * xieta, eta = 0.5 * xieta;
    if (rho < 0.0) {
        xi = -xi;
        eta = -eta;
    }
    Cx q = std::pow(1.0 - rho * rho, 0.25);
    Mat g(2, 2);
    g(0, 0) = q * std::exp(Cx(0.0, theta / 2.0)) * std::cosh(xi);
    g(0, 1) = q * I_UNIT * std::exp(Cx(0.0, theta / 2.0)) * std::sinh(xi);
    g(1, 0) = q * I_UNIT * std::exp(Cx(0.0, -theta / 2.0)) * std::sinh(eta);
    g(1, 1) = q * std::exp(Cx(0.0, -theta / 2.0)) * std::cosh(eta);
    QuadraticForm out = from_frame(g, 1e-10);
    out.xyrho_ = std::array<double, 3>{x, y, rho};
    return out;
}

QuadraticForm QuadraticForm::pair_hyperbolic(int k, int m) {
    const int n = 2 * m;
    Mat A = Mat::Zero(n, n);
    A(k, m + k) = 1.0;
    A(m + k, k) = 1.0;  // <uA,u> = 2 u_k v_k
    Mat alpha = A * standard_J(m);
    QuadraticForm q;
    q.rep_ = Rep::Algebra;
    q.alpha_ = alpha;
    q.g_ = Mat::Identity(n, n);
    return q;
}

namespace {

// Amplitude determinant and exponent matrix of the K-ordered expression of
// e_*^{t <uA,u>_*/(i hbar)}, from the closed quadratic-exponential formula.
// Conventions fixed against the star-power-series oracle of Eq.-(1.2) powers
// (general complex symmetric A and K, m = 1 and 2):
// kappa = J K, alpha = A J, D = det(I - kappa + e^{2 t alpha}(I + kappa)),
// exponent matrix sym(W (I - e^{2 t alpha}) J), W = (...)^{-1}; amplitude 2^m/sqrt(D).
struct QuadExpCore {
    Cx det;
    Mat expmat;  // defined when det != 0
    bool expmat_valid = false;
};

QuadExpCore quad_core(const QuadraticForm& H, Cx t, const ExpressionParameter& K,
                      bool want_exponent) {
    const int n = H.n();
    const int m = n / 2;
    Mat J = standard_J(m);
    Mat kappa = J * K.K();
    Mat E = Mat(2.0 * t * H.alpha()).exp();
    Mat M = (Mat::Identity(n, n) - kappa) + E * (Mat::Identity(n, n) + kappa);
    QuadExpCore out;
    out.det = M.determinant();
    if (want_exponent && std::abs(out.det) > 1e-300) {
        Mat W = M.inverse();
        out.expmat = symmetrize(W * (Mat::Identity(n, n) - E) * J);
        out.expmat_valid = true;
    }
    return out;
}

}  // namespace

Cx quad_exp_det(const QuadraticForm& H, Cx t, const ExpressionParameter& K) {
    return quad_core(H, t, K, false).det;
}

GaussianElement quad_exp(const QuadraticForm& H, Cx t, const ExpressionParameter& K,
                         const HbarContext& ctx) {
    K.check_dim(H.n());
    auto core = quad_core(H, t, K, true);
    if (std::abs(core.det) < 1e-12) {
        throw std::domain_error("singular point: amplitude determinant " +
                                std::to_string(std::abs(core.det)) + " at the requested time");
    }
    GaussianElement g(ctx);
    g.quad = core.expmat;
    g.amplitude = BranchedScalar(std::pow(2.0, ctx.m) / std::sqrt(core.det), 0);
    return g;
}

GaussianElement continue_along_path(const QuadraticForm& H, const PathSpec& path,
                                    const ExpressionParameter& K, const HbarContext& ctx) {
    K.check_dim(H.n());
    if (path.vertices.size() < 2 || path.vertices.front() != Cx(0.0))
        throw std::invalid_argument("path must start at 0 and contain at least two vertices");
    for (std::size_t v = 1; v < path.vertices.size(); ++v)
        if (path.vertices[v] == path.vertices[v - 1])
            throw std::invalid_argument("consecutive path vertices must be distinct");

    const double scale = std::pow(2.0, 2 * ctx.m);  // det(0)
    ArgTracker trk(quad_core(H, Cx(0.0), K, false).det);
    for (std::size_t v = 1; v < path.vertices.size(); ++v) {
        Cx a = path.vertices[v - 1], b = path.vertices[v];
        double seglen = std::abs(b - a);
        double step = std::min(path.max_step, seglen);
        double s = 0.0;
        while (s < seglen) {
            double next = std::min(seglen, s + step);
            Cx tz = a + (b - a) * (next / seglen);
            Cx d = quad_core(H, tz, K, false).det;
            if (std::abs(d) < 1e-7 * scale)
                throw std::domain_error(
                    "singular point: path passes within resolution of a det zero");
            if (!trk.advance(d)) {
                step *= 0.5;
                if (step < 1e-9) throw std::domain_error("cannot continue: argument jump persists");
                continue;
            }
            s = next;
            step = std::min(path.max_step, step * 1.7);
        }
    }
    Cx tend = path.vertices.back();
    auto core = quad_core(H, tend, K, true);
    GaussianElement g(ctx);
    g.quad = core.expmat;
    Cx amp = std::pow(2.0, ctx.m) / trk.sqrt_value();
    g.amplitude = BranchedScalar(amp, trk.sheet());
    return g;
}

PathSpec detoured_path(const QuadraticForm& H, const ExpressionParameter& K, Cx t_end,
                       double detour_radius, const HbarContext& ctx) {
    PathSpec p = PathSpec::straight(t_end);
    p.detour_radius = detour_radius;
    const double len = std::abs(t_end);
    Cx dir = t_end / len;
    // search window: a tube around the segment
    Cx lo = -0.25 * dir - Cx(0.0, 0.35) * dir + Cx(0.0);
    Cx hi = t_end + 0.25 * dir + Cx(0.0, 0.35) * dir;
    double rlo = std::min({lo.real(), hi.real()}) - 0.35, rhi = std::max({lo.real(), hi.real()}) + 0.35;
    double ilo = std::min({lo.imag(), hi.imag()}) - 0.35, ihi = std::max({lo.imag(), hi.imag()}) + 0.35;
    std::vector<SingularPoint> sing;
    try {
        sing = singular_points(H, K, Cx(rlo, ilo), Cx(rhi, ihi), ctx);
    } catch (const std::exception&) {
        return p;  // no reliable singular data; keep the straight path
    }
    // collect singular points close to the segment, ordered along it
    struct Hit {
        double proj;
        Cx t;
    };
    std::vector<Hit> hits;
    for (const auto& sp : sing) {
        Cx rel = sp.t / dir;  // rotate so the segment is [0, len] on the real axis
        if (sp.multiplicity > 1 && rel.real() > -detour_radius &&
            rel.real() < len + detour_radius && std::abs(rel.imag()) < 2.0 * detour_radius)
            throw std::domain_error("non-generic K: higher-order det zero near the path");
        if (rel.real() > detour_radius && rel.real() < len - detour_radius &&
            std::abs(rel.imag()) < detour_radius)
            hits.push_back({rel.real(), sp.t});
    }
    if (hits.empty()) return p;
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.proj < b.proj; });
    // deterministic bump side: perpendicular with positive real part when
    // possible, else positive imaginary part
    Cx perp = I_UNIT * dir;
    if (perp.real() < -1e-12 || (std::abs(perp.real()) < 1e-12 && perp.imag() < 0.0)) perp = -perp;
    std::vector<Cx> verts = {Cx(0.0)};
    const double r = 2.0 * detour_radius;
    for (const auto& h : hits) {
        Cx c = dir * h.proj;
        verts.push_back(c - r * dir);
        verts.push_back(c - r * dir + r * perp);
        verts.push_back(c + r * dir + r * perp);
        verts.push_back(c + r * dir);
    }
    verts.push_back(t_end);
    p.vertices = verts;
    return p;
}

std::vector<SingularPoint> singular_points(const QuadraticForm& H, const ExpressionParameter& K,
                                           Cx window_lo, Cx window_hi, const HbarContext& ctx) {
    K.check_dim(H.n());
    (void)ctx;
    std::vector<SingularPoint> out;
    if (H.rep() == QuadraticForm::Rep::Frame) {
        // det(cos t I - sin t Theta) = prod (cos t - lambda_k sin t), Theta = g^T K g.
        Mat Theta = H.g().transpose() * K.K() * H.g();
        Eigen::ComplexEigenSolver<Mat> es(Theta);
        auto polish = [&](Cx t0) {
            for (int it = 0; it < 60; ++it) {
                Cx f = quad_exp_det(H, t0, K);
                Cx df = (quad_exp_det(H, t0 + 1e-7, K) - quad_exp_det(H, t0 - 1e-7, K)) / 2e-7;
                if (std::abs(df) == 0.0) break;
                Cx step = f / df;
                t0 -= step;
                if (std::abs(step) < 1e-13) break;
            }
            return t0;
        };
        for (int k = 0; k < H.n(); ++k) {
            Cx lam = es.eigenvalues()(k);
            Cx t0 = (std::abs(lam) < 1e-14) ? Cx(M_PI / 2.0, 0.0) : std::atan(1.0 / lam);
            long k_lo = std::lround(std::floor((window_lo.real() - t0.real()) / M_PI)) - 1;
            long k_hi = std::lround(std::ceil((window_hi.real() - t0.real()) / M_PI)) + 1;
            for (long q = k_lo; q <= k_hi; ++q) {
                Cx t = t0 + Cx(M_PI * q, 0.0);
                if (t.real() < window_lo.real() - 1e-9 || t.real() > window_hi.real() + 1e-9)
                    continue;
                if (t.imag() < window_lo.imag() - 1e-9 || t.imag() > window_hi.imag() + 1e-9)
                    continue;
                out.push_back({polish(t), 1});
            }
        }
    } else {
        auto zeros = root_find_det([&](Cx t) { return quad_exp_det(H, t, K); }, window_lo,
                                   window_hi, 1e-13);
        for (const auto& z : zeros) out.push_back({z.t, z.multiplicity});
    }
    // merge coincident zeros into multiplicities
    std::vector<SingularPoint> merged;
    for (const auto& s : out) {
        bool found = false;
        for (auto& mgd : merged)
            if (std::abs(mgd.t - s.t) < 1e-7) {
                mgd.multiplicity += s.multiplicity;
                found = true;
                break;
            }
        if (!found) merged.push_back(s);
    }
    return merged;
}

namespace {

// e_*^{z u o v/(i hbar)} for m = 1 is the pair-hyperbolic form at parameter z/2.
QuadraticForm uov_form() { return QuadraticForm::pair_hyperbolic(0, 1); }

}  // namespace

ExchangingInterval exchanging_interval(const ExpressionParameter& K, const HbarContext& ctx) {
    if (ctx.m != 1) throw std::invalid_argument("exchanging interval is defined for m = 1");
    // Singular z of e_*^{z u o v/(i hbar)} solve coth(z/2) = c +/- sqrt(d d'),
    // so the two line families have Re z = ln|(q+1)/(q-1)|, spaced 2 pi i.
    const Cx d = K.K()(0, 0), dp = K.K()(1, 1), c = K.K()(0, 1);
    const Cx root = std::sqrt(d * dp);
    double re[2];
    for (int s = 0; s < 2; ++s) {
        Cx q = c + (s == 0 ? root : -root);
        Cx num = q + 1.0, den = q - 1.0;
        if (std::abs(den) < 1e-14 || std::abs(num) < 1e-14)
            throw std::domain_error("degenerate expression parameter: singular line at infinity");
        re[s] = std::log(std::abs(num / den));
    }
    ExchangingInterval iv{};
    iv.a = std::min(re[0], re[1]);
    iv.b = std::max(re[0], re[1]);
    return iv;
}

int period_flag(const ExpressionParameter& K, double s, const HbarContext& ctx) {
    if (ctx.m != 1) throw std::invalid_argument("period flag is defined for m = 1");
    auto H = uov_form();
    // Continue det along t = (s + i sigma)/2, sigma: 0 -> 2 pi; det returns to
    // its start value and the flag is the winding parity.
    Cx start = quad_exp_det(H, Cx(s / 2.0, 0.0), K);
    ArgTracker trk(start);
    const int steps = 512;
    for (int i = 1; i <= steps; ++i) {
        Cx t(s / 2.0, M_PI * i / steps);
        Cx d = quad_exp_det(H, t, K);
        if (std::abs(d) < 1e-9) throw std::domain_error("singular point on the vertical segment");
        if (!trk.advance(d)) throw std::domain_error("cannot continue period tracking");
    }
    long winding = std::lround((trk.arg() - std::arg(start)) / (2.0 * M_PI));
    return (winding % 2 == 0) ? +1 : -1;
}

PolarElement polar_element(int k, const ExpressionParameter& K, const HbarContext& ctx,
                           std::optional<PathSpec> path) {
    auto H = QuadraticForm::pair_hyperbolic(k, ctx.m);
    PathSpec p = path ? *path : detoured_path(H, K, Cx(0.0, M_PI / 2.0), 0.08, ctx);
    GaussianElement body = continue_along_path(H, p, K, ctx);
    PolarElement out;
    out.body = body;
    std::string fp = "k=" + std::to_string(k);
    for (const auto& v : p.vertices)
        fp += ";" + std::to_string(v.real()) + "," + std::to_string(v.imag());
    out.path_fingerprint = fp;
    return out;
}

GaussianElement polar_flow_square(int k, const ExpressionParameter& K, const HbarContext& ctx) {
    auto H = QuadraticForm::pair_hyperbolic(k, ctx.m);
    PathSpec p = detoured_path(H, K, Cx(0.0, M_PI), 0.08, ctx);
    return continue_along_path(H, p, K, ctx);
}

PolarElement polar_total(const ExpressionParameter& K, const HbarContext& ctx) {
    PolarElement acc = polar_element(0, K, ctx);
    for (int k = 1; k < ctx.m; ++k) {
        PolarElement nxt = polar_element(k, K, ctx);
        acc.body = star_gaussian_gaussian(acc.body, nxt.body, K, ctx);
        acc.path_fingerprint += "|" + nxt.path_fingerprint;
    }
    return acc;
}

PolarClassification classify_polar(const GaussianElement& polar, const ExpressionParameter& K,
                                   const VFrame& V, const HbarContext& ctx) {
    GaussianElement d = delta_full(Vec::Zero(ctx.n()), K, V, ctx);
    const Cx candidates[4] = {Cx(1, 0), Cx(-1, 0), Cx(0, 1), Cx(0, -1)};
    PolarClassification best{Cx(0.0), 1e300};
    for (Cx c : candidates) {
        GaussianElement ref = d.scaled(c * std::pow(2.0, -ctx.m));
        double r = grid_distance(polar, ref);
        if (r < best.residual) best = {c, r};
    }
    return best;
}

namespace {

struct ActionObstruction : std::domain_error {
    Cx where;
    ActionObstruction(const std::string& msg, Cx t) : std::domain_error(msg), where(t) {}
};

}  // namespace

GaussianElement star_exp_action_path(const GaussianElement& G, const QuadraticForm& H,
                                     const PathSpec& path, const ExpressionParameter& K,
                                     const HbarContext& ctx, int steps_per_unit) {
    // Continuation of the product branch: G * e_*^{tH} with t walking the path.
    // The exponent data is single-valued in t; only the amplitude is two-valued,
    // and its sign is fixed by matching arguments continuously between steps.
    const double scale = std::pow(2.0, 2 * ctx.m);
    ArgTracker etrk(quad_exp_det(H, Cx(0.0), K));
    Cx prev_amp = G.amplitude.value;
    GaussianElement cur = G;
    for (std::size_t v = 1; v < path.vertices.size(); ++v) {
        Cx a0 = path.vertices[v - 1], b0 = path.vertices[v];
        double seglen = std::abs(b0 - a0);
        double step = std::min(1.0 / steps_per_unit, seglen);
        double s = 0.0;
        while (s < seglen) {
            double next = std::min(seglen, s + step);
            Cx t = a0 + (b0 - a0) * (next / seglen);
            Cx d = quad_exp_det(H, t, K);
            if (std::abs(d) < 1e-7 * scale)
                throw ActionObstruction("singular point: on the action path", t);
            if (!etrk.advance(d)) {
                step *= 0.5;
                if (step < 1e-8) throw ActionObstruction("cannot continue action branch", t);
                continue;
            }
            GaussianElement Et = quad_exp(H, t, K, ctx);
            Et.amplitude = BranchedScalar(std::pow(2.0, ctx.m) / etrk.sqrt_value(), etrk.sheet());
            GaussianElement cand = star_gaussian_gaussian(G, Et, K, ctx);
            Cx a = cand.amplitude.value;
            if (std::abs(a) < 1e-14)
                throw ActionObstruction("undefined product on the action path", t);
            if (std::abs(std::arg(a / prev_amp)) > M_PI / 2.0) {
                Cx af = -a;
                if (std::abs(std::arg(af / prev_amp)) > M_PI / 2.0) {
                    step *= 0.5;
                    if (step < 1e-8)
                        throw ActionObstruction("cannot continue action branch (amplitude jump)",
                                                t);
                    continue;
                }
                cand.amplitude.value = af;
                cand.amplitude.sheet += 1;
                a = af;
            }
            prev_amp = a;
            cur = cand;
            s = next;
            step = std::min(1.0 / steps_per_unit, step * 1.6);
        }
    }
    return cur;
}

GaussianElement star_exp_action(const GaussianElement& G, const QuadraticForm& H, Cx t_end,
                                const ExpressionParameter& K, const HbarContext& ctx, int steps) {
    // Obstructions of the product branch sit where the *product* amplitude
    // degenerates; bump the path around each reported obstruction and retry.
    PathSpec p = detoured_path(H, K, t_end, 0.08, ctx);
    Cx dir = t_end / std::abs(t_end);
    Cx perp = I_UNIT * dir;
    if (perp.real() < -1e-12 || (std::abs(perp.real()) < 1e-12 && perp.imag() < 0.0)) perp = -perp;
    const double r = 0.16;
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            return star_exp_action_path(G, H, p, K, ctx, std::max(8, steps / 4));
        } catch (const ActionObstruction& obs) {
            // insert a rectangular bump around the obstruction
            std::vector<Cx> verts;
            bool inserted = false;
            for (std::size_t v = 1; v < p.vertices.size(); ++v) {
                Cx a = p.vertices[v - 1], b = p.vertices[v];
                verts.push_back(a);
                Cx seg = b - a;
                double len = std::abs(seg);
                double proj = ((obs.where - a) / seg).real() * len;
                double off = std::abs(obs.where - (a + seg * (proj / len)));
                if (!inserted && proj > -r && proj < len + r && off < r / 2.0) {
                    Cx c = a + seg * (std::clamp(proj, 0.0, len) / len);
                    Cx d0 = seg / len;
                    verts.push_back(c - r * d0);
                    verts.push_back(c - r * d0 + r * perp);
                    verts.push_back(c + r * d0 + r * perp);
                    verts.push_back(c + r * d0);
                    inserted = true;
                }
            }
            verts.push_back(p.vertices.back());
            if (!inserted) throw;
            // drop duplicate consecutive vertices
            std::vector<Cx> clean = {verts.front()};
            for (const Cx& v : verts)
                if (std::abs(v - clean.back()) > 1e-12) clean.push_back(v);
            p.vertices = clean;
        }
    }
    throw std::domain_error("cannot continue action branch after repeated detours");
}

BumpingReport bumping_relations_check(int k, const ExpressionParameter& K, const HbarContext& ctx,
                                      double tol) {
    PolarElement eps = polar_element(k, K, ctx);
    double worst = 0.0;
    const int n = ctx.n();
    for (int l = 0; l < n; ++l) {
        PolyC gen = PolyC::variable(n, l);
        GaussianElement lhs = star_gaussian_poly(eps.body, gen, K, ctx);
        GaussianElement rhs = star_poly_gaussian(gen, eps.body, K, ctx);
        double sign = (l % ctx.m == k % ctx.m) ? -1.0 : 1.0;
        GaussianElement diff = lhs;
        diff.prefactor = lhs.prefactor - rhs.prefactor.scaled(Cx(sign));
        worst = std::max(worst, grid_norm(diff));
    }
    return {worst, worst < tol};
}

}  // namespace star
