#include "star/oracle.hpp"

#include <map>
#include <mutex>

namespace star {

namespace {

GLRule compute_gauss_legendre(int n) {
    GLRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-like initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

}  // namespace

const GLRule& gauss_legendre(int n) {
    static std::map<int, GLRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lk(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

Cx integrate_box(const std::function<Cx(const std::vector<double>&)>& f, int dim, double R,
                 int points_per_axis) {
    const GLRule& rule = gauss_legendre(points_per_axis);
    std::vector<double> pt(dim);
    Cx acc = 0.0;
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= points_per_axis;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t t = flat;
        double w = 1.0;
        for (int d = 0; d < dim; ++d) {
            int i = static_cast<int>(t % points_per_axis);
            t /= points_per_axis;
            pt[d] = R * rule.x[i];
            w *= R * rule.w[i];
        }
        acc += w * f(pt);
    }
    return acc;
}

double truncation_radius(double c, double hbar, double tol) {
    if (c <= 0.0) throw std::domain_error("nonpositive decay certificate");
    // e^{-c R^2/(4 hbar)} < tol/10
    double R = std::sqrt(4.0 * hbar * std::log(10.0 / tol) / c);
    return R + 1.0;
}

OracleValue oracle_gaussian_integral(const Mat& A, const VFrame& V, const HbarContext& ctx,
                                     const QuadratureSpec& spec) {
    const int n = V.n();
    Mat M(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            M(a, b) = V.phase_slot(a) * V.phase_slot(b) * I_UNIT * A(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M.real() + M.real().transpose()));
    double c = es.eigenvalues().minCoeff();
    if (c <= 0.0) throw std::domain_error("non-V-class matrix in oracle_gaussian_integral");
    double R = spec.radius > 0.0 ? spec.radius : truncation_radius(c, ctx.hbar, spec.tol);
    auto integrand = [&](const std::vector<double>& s) {
        Cx q = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) q += s[a] * M(a, b) * s[b];
        return std::exp(-q / (4.0 * ctx.hbar));
    };
    const double norm = std::pow(2.0 * M_PI * ctx.hbar, -n / 2.0);
    Cx coarse = integrate_box(integrand, n, R, spec.points_per_axis) * norm;
    Cx fine = integrate_box(integrand, n, R, 2 * spec.points_per_axis) * norm;
    Cx phase = V.phase_product_all();
    return {fine * phase, std::abs(fine - coarse)};
}

SampledField make_grid_field(int dim, double R, int npts,
                             const std::function<Cx(const std::vector<double>&)>& f) {
    SampledField out;
    out.dim = dim;
    out.grid.resize(npts);
    for (int i = 0; i < npts; ++i) out.grid[i] = -R + 2.0 * R * (i + 0.5) / npts;
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= npts;
    out.values.resize(total);
    std::vector<double> pt(dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t t = flat;
        for (int d = dim - 1; d >= 0; --d) {
            pt[d] = out.grid[t % npts];
            t /= npts;
        }
        out.values[flat] = f(pt);
    }
    return out;
}

SampledField oracle_fourier(const SampledField& f, double hbar, int sign) {
    const int npts = static_cast<int>(f.grid.size());
    const double h = f.grid[1] - f.grid[0];
    SampledField out = f;
    const double norm = std::pow(2.0 * M_PI * hbar, -f.dim / 2.0) * std::pow(h, f.dim);
    std::size_t total = f.values.size();
    std::vector<double> x(f.dim), xi(f.dim);
    for (std::size_t oflat = 0; oflat < total; ++oflat) {
        std::size_t t = oflat;
        for (int d = f.dim - 1; d >= 0; --d) {
            xi[d] = f.grid[t % npts];
            t /= npts;
        }
        Cx acc = 0.0;
        for (std::size_t iflat = 0; iflat < total; ++iflat) {
            std::size_t s = iflat;
            for (int d = f.dim - 1; d >= 0; --d) {
                x[d] = f.grid[s % npts];
                s /= npts;
            }
            double dot = 0.0;
            for (int d = 0; d < f.dim; ++d) dot += x[d] * xi[d];
            acc += f.values[iflat] * std::exp(Cx(0.0, -sign * dot / hbar));
        }
        out.values[oflat] = acc * norm;
    }
    return out;
}

double l2_norm(const SampledField& f, double /*hbar*/) {
    const double h = f.grid[1] - f.grid[0];
    double acc = 0.0;
    for (const Cx& v : f.values) acc += std::norm(v);
    return std::sqrt(acc * std::pow(h, f.dim));
}

namespace {

// Winding number of f along the rectangle boundary, adaptive in the number of
// samples per edge.
int winding_number(const std::function<Cx(Cx)>& f, Cx lo, Cx hi, int samples, int depth = 0) {
    if (depth > 12) throw std::domain_error("winding number did not converge (zero on boundary?)");
    std::vector<Cx> corners = {lo, Cx(hi.real(), lo.imag()), hi, Cx(lo.real(), hi.imag()), lo};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        Cx a = corners[e], b = corners[e + 1];
        Cx prev = f(a);
        for (int s = 1; s <= samples; ++s) {
            Cx z = a + (b - a) * (double(s) / samples);
            Cx cur = f(z);
            if (cur == Cx(0.0) || std::abs(std::arg(cur / prev)) > 1.0)
                return winding_number(f, lo, hi, samples * 2, depth + 1);
            total += std::arg(cur / prev);
            prev = cur;
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

void subdivide(const std::function<Cx(Cx)>& f, Cx lo, Cx hi, double newton_tol,
               std::vector<DetZero>& out, int depth) {
    int w = winding_number(f, lo, hi, 24);
    if (w == 0) return;
    double dx = hi.real() - lo.real(), dy = hi.imag() - lo.imag();
    if ((dx < 1e-4 && dy < 1e-4) || depth > 40) {
        Cx z = 0.5 * (lo + hi);
        for (int it = 0; it < 80; ++it) {
            Cx fz = f(z);
            Cx df = (f(z + 1e-7) - f(z - 1e-7)) / 2e-7;
            if (std::abs(df) == 0.0) break;
            Cx step = fz / df * double(w);  // multiple-root Newton
            z -= step;
            if (std::abs(step) < newton_tol) break;
        }
        out.push_back({z, w});
        return;
    }
    // Slightly asymmetric split keeps subdivision lines off symmetric zeros.
    if (dx >= dy) {
        double mid = lo.real() + 0.5137 * dx;
        subdivide(f, lo, Cx(mid, hi.imag()), newton_tol, out, depth + 1);
        subdivide(f, Cx(mid, lo.imag()), hi, newton_tol, out, depth + 1);
    } else {
        double mid = lo.imag() + 0.5137 * dy;
        subdivide(f, lo, Cx(hi.real(), mid), newton_tol, out, depth + 1);
        subdivide(f, Cx(lo.real(), mid), hi, newton_tol, out, depth + 1);
    }
}

}  // namespace

std::vector<DetZero> root_find_det(const std::function<Cx(Cx)>& f, Cx corner_lo, Cx corner_hi,
                                   double newton_tol) {
    std::vector<DetZero> out;
    // retry with a slightly wobbled window when a zero sits on the boundary
    for (int attempt = 0; attempt < 4; ++attempt) {
        out.clear();
        double w = 0.0093 * attempt * std::abs(corner_hi - corner_lo);
        try {
            subdivide(f, corner_lo - Cx(w, w), corner_hi + Cx(1.3 * w, 0.7 * w), newton_tol, out,
                      0);
            return out;
        } catch (const std::domain_error&) {
            if (attempt == 3) throw;
        }
    }
    return out;
}

}  // namespace star
