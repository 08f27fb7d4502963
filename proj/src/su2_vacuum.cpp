#include "star/su2.hpp"

#include "star/oracle.hpp"

namespace star {

QuadraticForm su2_direction_form(double x, double y, double rho) {
    Mat A(2, 2);
    A << Cx(x, y), Cx(0.0, rho), Cx(0.0, rho), Cx(x, -y);
    return QuadraticForm::from_algebra(A * standard_J(1));
}

ExpressionParameter su2_K_parameter(double c, double theta) {
    Mat Km(2, 2);
    Km << Cx(1.0, 0.0), I_UNIT * Cx(c, theta), I_UNIT * Cx(c, theta), Cx(1.0, 0.0);
    return ExpressionParameter(Km, "su2-Kprime");
}

namespace {

// K-expression polynomial of <uA,u>_*/(i hbar).
PolyC form_kpoly(const Mat& A, const ExpressionParameter& K, const HbarContext& ctx) {
    PolyC p(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (A(i, j) != Cx(0.0)) {
                Multi e(2, 0);
                e[i]++;
                e[j]++;
                p.add_term(e, A(i, j) / ctx.ihbar());
            }
    p.add_term(Multi(2, 0), 0.5 * (A * K.K()).trace());
    return p;
}

std::vector<Cx> direction_poles_impl(const QuadraticForm& H, const ExpressionParameter& Kp) {
    Mat I2 = Mat::Identity(2, 2);
    Mat kap = standard_J(1) * Kp.K();
    Mat alpha = H.alpha();
    auto Dof = [&](double tt) {
        Mat E = std::cos(2.0 * tt) * I2 + std::sin(2.0 * tt) * alpha;
        return Mat((I2 - kap) + E * (I2 + kap)).determinant();
    };
    Eigen::MatrixXcd Msys(5, 5);
    Eigen::VectorXcd rhs(5);
    for (int k = 0; k < 5; ++k) {
        double tt = 0.1 + 0.55 * k;
        Msys(k, 0) = 1.0;
        Msys(k, 1) = std::cos(2 * tt);
        Msys(k, 2) = std::sin(2 * tt);
        Msys(k, 3) = std::cos(4 * tt);
        Msys(k, 4) = std::sin(4 * tt);
        rhs(k) = Dof(tt);
    }
    Eigen::VectorXcd cf = Msys.fullPivLu().solve(rhs);
    Cx p = cf(0), q = cf(1), r = cf(2), s = cf(3), w = cf(4);
    Eigen::Matrix<Cx, 5, 1> poly;
    poly(4) = (s - I_UNIT * w) / 2.0;
    poly(3) = (q - I_UNIT * r) / 2.0;
    poly(2) = p;
    poly(1) = (q + I_UNIT * r) / 2.0;
    poly(0) = (s + I_UNIT * w) / 2.0;
    int deg = 4;
    while (deg > 0 && std::abs(poly(deg)) < 1e-13) --deg;
    std::vector<Cx> out;
    if (deg == 0) return out;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int k = 0; k + 1 < deg; ++k) comp(k + 1, k) = 1.0;
    for (int k = 0; k < deg; ++k) comp(k, deg - 1) = -poly(k) / poly(deg);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
    for (int k = 0; k < deg; ++k) {
        Cx z = es.eigenvalues()(k);
        if (std::abs(z) < 1e-12) continue;
        double re = 0.5 * std::arg(z);
        double im = -0.5 * std::log(std::abs(z));
        while (re < 0.0) re += M_PI;
        while (re >= M_PI) re -= M_PI;
        out.push_back(Cx(re, im));
    }
    return out;
}

double min_pole_distance(const std::vector<Cx>& poles) {
    double d = 1e9;
    for (const Cx& p : poles) d = std::min(d, std::abs(p.imag()));
    return d;
}

// Real-axis panels on [0, pi] with geometric ladders toward near-axis poles.
std::vector<std::pair<double, double>> ladder_panels(const std::vector<Cx>& poles, double base_h,
                                                     double floor_fac) {
    std::vector<double> cuts = {0.0, M_PI};
    for (const Cx& p : poles) {
        double d = std::abs(p.imag());
        if (d > 0.3) continue;
        double c = p.real();
        double w = std::max(std::min(0.25, 24.0 * d), 0.02);
        while (w > floor_fac * d) {
            for (double s : {c - w, c + w})
                if (s > 1e-6 && s < M_PI - 1e-6) cuts.push_back(s);
            w *= 0.5;
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-9; }),
               cuts.end());
    std::vector<std::pair<double, double>> panels;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        double lo = cuts[i - 1], hi = cuts[i];
        int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / base_h)));
        for (int p = 0; p < pieces; ++p)
            panels.push_back({lo + (hi - lo) * p / pieces, lo + (hi - lo) * (p + 1) / pieces});
    }
    return panels;
}

// Stream the t-quadrature of one direction: gamma(t) sin^2(2t) weights.
void stream_direction(const Su2Direction& dir, const ExpressionParameter& Kp,
                      const HbarContext& ctx, const Su2QuadratureRule& rule,
                      const std::function<void(const GaussianElement&)>& fn) {
    auto H = su2_direction_form(dir.x, dir.y, dir.rho);
    auto poles = direction_poles_impl(H, Kp);
    for (const Cx& p : poles)
        if (std::abs(p.imag()) < 1e-7)
            throw std::domain_error("singular sample on the SU(2) boundary");
    auto panels = ladder_panels(poles, rule.base_panel, rule.ladder_floor);
    const GLRule& gl = gauss_legendre(rule.panel_nodes);
    ArgTracker trk(quad_exp_det(H, Cx(0.0), Kp));
    double prev = 0.0;
    for (auto [lo, hi] : panels) {
        for (int q = 0; q < rule.panel_nodes; ++q) {
            double t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[q];
            double w = 0.5 * (hi - lo) * gl.w[q];
            double gap = std::max(1e-4, 0.3 * dir.pole_distance);
            int sub = 1 + static_cast<int>((t - prev) / gap);
            for (int s = 1; s <= sub; ++s) {
                Cx dv = quad_exp_det(H, Cx(prev + (t - prev) * s / sub, 0.0), Kp);
                if (std::abs(dv) < 1e-10)
                    throw std::domain_error("singular sample on the SU(2) boundary");
                if (!trk.advance(dv))
                    throw std::domain_error("cannot continue SU(2) boundary branch");
            }
            prev = t;
            GaussianElement g = quad_exp(H, Cx(t, 0.0), Kp, ctx);
            g.amplitude = BranchedScalar(2.0 / trk.sqrt_value(), trk.sheet());
            double s2 = std::sin(2.0 * t);
            g.amplitude.value *= s2 * s2 * w * dir.weight;
            fn(g);
        }
    }
}

}  // namespace

std::vector<Cx> su2_direction_poles(const QuadraticForm& H, const ExpressionParameter& Kp) {
    return direction_poles_impl(H, Kp);
}

Su2Vacuum::Su2Vacuum(const ExpressionParameter& Kp, const HbarContext& ctx,
                     const Su2QuadratureRule& rule)
    : Kp_(Kp), ctx_(ctx), rule_(rule) {
    if (ctx.m != 1) throw std::invalid_argument("SU(2)-vacuum implemented for m = 1");
    const GLRule& cg = gauss_legendre(rule.costheta_nodes);
    auto pole_dist = [&](double x, double y, double rho) {
        return min_pole_distance(direction_poles_impl(su2_direction_form(x, y, rho), Kp));
    };
    for (int ic = 0; ic < rule.costheta_nodes; ++ic) {
        double cth = cg.x[ic], wc = cg.w[ic];
        double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
        double dphi = 2.0 * M_PI / rule.phi_nodes;
        for (int ip = 0; ip < rule.phi_nodes; ++ip) {
            double phi = dphi * (ip + 0.5);
            double x = sth * std::cos(phi), y = sth * std::sin(phi);
            double d = pole_dist(x, y, cth);
            double cell_w = wc * dphi;
            if (d > rule.sphere_refine) {
                dirs_.push_back({x, y, cth, cell_w, d});
                continue;
            }
            ++refined_;
            // split the (costheta, phi)-cell; midpoint subcells
            int S = rule.sphere_split;
            double clo = (ic == 0) ? -1.0 : 0.5 * (cg.x[ic - 1] + cg.x[ic]);
            double chi = (ic + 1 == rule.costheta_nodes) ? 1.0 : 0.5 * (cg.x[ic] + cg.x[ic + 1]);
            // keep the GL weight total: distribute proportionally to subcell area
            double area = (chi - clo) * dphi;
            for (int a = 0; a < S; ++a)
                for (int b = 0; b < S; ++b) {
                    double cc = clo + (chi - clo) * (a + 0.5) / S;
                    double pp = phi - 0.5 * dphi + dphi * (b + 0.5) / S;
                    double ss = std::sqrt(std::max(0.0, 1.0 - cc * cc));
                    double xx = ss * std::cos(pp), yy = ss * std::sin(pp);
                    double dd = pole_dist(xx, yy, cc);
                    double ww = cell_w * ((chi - clo) / S * (dphi / S)) / area * S * S / (S * S);
                    // subcell weight: proportional share of the parent cell weight
                    ww = cell_w / (S * S);
                    dirs_.push_back({xx, yy, cc, ww, dd});
                }
        }
    }
    for (const auto& d : dirs_) haar_mass_ += d.weight * (M_PI / 2.0);  // int sin^2(2t) dt = pi/2
}

void Su2Vacuum::for_each_term(const std::function<void(const GaussianElement&)>& fn) const {
    for (const auto& dir : dirs_) stream_direction(dir, Kp_, ctx_, rule_, fn);
}

Cx Su2Vacuum::value(const Vec& u) const {
    Cx acc = 0.0;
    for_each_term([&](const GaussianElement& g) { acc += g.value(u); });
    return acc;
}

namespace {

std::vector<Vec> residual_grid(double radius, int per_axis) {
    std::vector<Vec> pts;
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j) {
            Vec u(2);
            u << -radius + 2.0 * radius * i / (per_axis - 1.0),
                -radius + 2.0 * radius * j / (per_axis - 1.0);
            pts.push_back(u);
        }
    return pts;
}

}  // namespace

std::array<double, 3> su2_annihilation_residuals(const Su2Vacuum& omega, double radius) {
    const auto& Kp = omega.K();
    const auto& ctx = omega.context();
    Mat A1(2, 2), A2(2, 2), A3(2, 2);
    A1 << 1, 0, 0, 1;
    A2 << I_UNIT, Cx(0.0), Cx(0.0), -I_UNIT;
    A3 << Cx(0.0), I_UNIT, I_UNIT, Cx(0.0);
    PolyC kps[3] = {form_kpoly(A1, Kp, ctx), form_kpoly(A2, Kp, ctx), form_kpoly(A3, Kp, ctx)};
    auto grid = residual_grid(radius, 5);
    std::array<std::vector<Cx>, 3> acc;
    for (auto& a : acc) a.assign(grid.size(), Cx(0.0));
    omega.for_each_term([&](const GaussianElement& g) {
        for (int k = 0; k < 3; ++k) {
            GaussianElement xg = star_poly_gaussian(kps[k], g, Kp, ctx);
            for (std::size_t i = 0; i < grid.size(); ++i) acc[k][i] += xg.value(grid[i]);
        }
    });
    std::array<double, 3> out{};
    for (int k = 0; k < 3; ++k)
        for (const Cx& v : acc[k]) out[k] = std::max(out[k], std::abs(v));
    return out;
}

double su2_absorption_residual(const Su2Vacuum& omega, double s, double x, double y, double rho,
                               double radius) {
    const auto& Kp = omega.K();
    const auto& ctx = omega.context();
    auto H = su2_direction_form(x, y, rho);
    ArgTracker trk(quad_exp_det(H, Cx(0.0), Kp));
    int n = std::max(40, static_cast<int>(s / 0.01));
    for (int q = 1; q <= n; ++q) {
        Cx dv = quad_exp_det(H, Cx(s * q / n, 0.0), Kp);
        if (!trk.advance(dv)) throw std::domain_error("cannot continue absorption element");
    }
    GaussianElement gam = quad_exp(H, Cx(s, 0.0), Kp, ctx);
    gam.amplitude = BranchedScalar(2.0 / trk.sqrt_value(), trk.sheet());
    auto grid = residual_grid(radius, 5);
    std::vector<Cx> acc(grid.size(), Cx(0.0));
    StarOptions opts;
    omega.for_each_term([&](const GaussianElement& g) {
        GaussianElement gg = star_gaussian_gaussian(gam, g, Kp, ctx, opts);
        for (std::size_t i = 0; i < grid.size(); ++i)
            acc[i] += gg.value(grid[i]) - g.value(grid[i]);
    });
    double out = 0.0;
    for (const Cx& v : acc) out = std::max(out, std::abs(v));
    return out;
}

GaussianSum su2_reduced_integral(const ExpressionParameter& Kp, const HbarContext& ctx,
                                 bool haar_weight, int t_nodes) {
    auto H = su2_direction_form(1.0, 0.0, 0.0);
    ArgTracker trk(quad_exp_det(H, Cx(0.0), Kp));
    GaussianSum red;
    double prev = 0.0;
    for (int jt = 0; jt < t_nodes; ++jt) {
        double t = M_PI * (jt + 0.5) / t_nodes;
        int sub = 1 + static_cast<int>((t - prev) / 0.01);
        for (int q = 1; q <= sub; ++q)
            if (!trk.advance(quad_exp_det(H, Cx(prev + (t - prev) * q / sub, 0.0), Kp)))
                throw std::domain_error("cannot continue reduced integral branch");
        prev = t;
        GaussianElement g = quad_exp(H, Cx(t, 0.0), Kp, ctx);
        g.amplitude = BranchedScalar(2.0 / trk.sqrt_value(), trk.sheet());
        double w = haar_weight ? std::sin(2.0 * t) * std::sin(2.0 * t) : 1.0;
        g.amplitude.value *= 4.0 * M_PI * (M_PI / t_nodes) * w;
        red.terms.push_back(g);
    }
    return red;
}

}  // namespace star
