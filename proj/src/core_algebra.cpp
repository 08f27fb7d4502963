#include "star/core_algebra.hpp"

namespace star {

namespace {

template <class T>
struct Cell {
    int i, j;
    T lam;
};

// Falling factorial a(a-1)...(a-r+1) as scalar T.
template <class T>
T falling(int a, int r) {
    T acc = scalar_traits<T>::one();
    for (int k = 0; k < r; ++k) acc *= scalar_traits<T>::from_int(a - k);
    return acc;
}

// Enumerate matrices kappa over the nonzero Lambda cells with row sums <= alpha
// and column sums <= beta, accumulating the contribution of each assignment.
template <class T>
void enumerate_kappa(const std::vector<Cell<T>>& cells, std::size_t idx, const Multi& alpha,
                     const Multi& beta, Multi& row, Multi& col, const T& weight, int order,
                     const T& step_factor, const T& cf_cg, Poly<T>& out, int max_order) {
    if (idx == cells.size()) {
        // weight already contains prod Lambda^kappa / kappa! and (i hbar/2)^order
        Multi e(alpha.size());
        T c = cf_cg * weight;
        for (std::size_t v = 0; v < alpha.size(); ++v) {
            c *= falling<T>(alpha[v], row[v]);
            c *= falling<T>(beta[v], col[v]);
            e[v] = alpha[v] - row[v] + beta[v] - col[v];
        }
        out.add_term(e, c);
        return;
    }
    const auto& cell = cells[idx];
    // kappa value 0 at this cell
    enumerate_kappa(cells, idx + 1, alpha, beta, row, col, weight, order, step_factor, cf_cg, out,
                    max_order);
    T w = weight;
    int k = 0;
    while (order + k < max_order && row[cell.i] + 1 <= alpha[cell.i] &&
           col[cell.j] + 1 <= beta[cell.j]) {
        ++k;
        row[cell.i] += 1;
        col[cell.j] += 1;
        w = w * cell.lam * step_factor;
        // divide by the multiplicity k at this cell (kappa!)
        if constexpr (std::is_same_v<T, RatC>) {
            w = w / RatC(Rat(k));
        } else {
            w /= T(double(k));
        }
        enumerate_kappa(cells, idx + 1, alpha, beta, row, col, w, order + k, step_factor, cf_cg,
                        out, max_order);
    }
    row[cell.i] -= k;
    col[cell.j] -= k;
}

}  // namespace

template <class T>
Poly<T> star_product_poly(const Poly<T>& f, const Poly<T>& g,
                          const std::vector<std::vector<T>>& Lambda, const T& hbar) {
    const int n = f.nvars();
    if (g.nvars() != n || static_cast<int>(Lambda.size()) != n)
        throw std::invalid_argument("dimension mismatch between f, g, K");
    std::vector<Cell<T>> cells;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!scalar_traits<T>::is_zero(Lambda[i][j])) cells.push_back({i, j, Lambda[i][j]});

    // (i hbar / 2) per derivative pair
    T step;
    if constexpr (std::is_same_v<T, RatC>) {
        step = RatC::i() * RatC(Rat(1, 2)) * hbar;
    } else {
        step = T(0.0, 0.5) * hbar;
    }

    Poly<T> out(n);
    for (const auto& [alpha, cf] : f.terms()) {
        for (const auto& [beta, cg] : g.terms()) {
            int da = 0, db = 0;
            for (int v : alpha) da += v;
            for (int v : beta) db += v;
            Multi row(n, 0), col(n, 0);
            enumerate_kappa<T>(cells, 0, alpha, beta, row, col, scalar_traits<T>::one(), 0, step,
                               cf * cg, out, std::min(da, db) + 1);
        }
    }
    return out;
}

template Poly<Cx> star_product_poly<Cx>(const Poly<Cx>&, const Poly<Cx>&,
                                        const std::vector<std::vector<Cx>>&, const Cx&);
template Poly<RatC> star_product_poly<RatC>(const Poly<RatC>&, const Poly<RatC>&,
                                            const std::vector<std::vector<RatC>>&, const RatC&);

namespace {

// Symmetric second-order exponential operator exp(c * sum M_ij d_i d_j) on a polynomial.
template <class T>
Poly<T> second_order_exp(const Poly<T>& f, const std::vector<std::vector<T>>& M, const T& c) {
    const int n = f.nvars();
    std::vector<Cell<T>> cells;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!scalar_traits<T>::is_zero(M[i][j])) cells.push_back({i, j, M[i][j]});
    Poly<T> out(n);
    // exp(L) f = sum_k L^k f / k!; iterate L applications, combining like terms each pass.
    Poly<T> cur = f;
    out += cur;
    int maxk = f.degree() / 2 + 1;
    T invfact = scalar_traits<T>::one();
    for (int k = 1; k <= maxk; ++k) {
        Poly<T> next(n);
        for (const auto& cell : cells) {
            Poly<T> d = cur.derivative(cell.i).derivative(cell.j);
            next += d.scaled(cell.lam);
        }
        if (next.is_zero()) break;
        if constexpr (std::is_same_v<T, RatC>) {
            invfact = invfact / RatC(Rat(k));
        } else {
            invfact /= T(double(k));
        }
        next = next.scaled(c);
        cur = next;
        out += cur.scaled(invfact);
        // fold the 1/k! into cur so the recursion stays simple
        // (we keep cur un-normalized and apply invfact at accumulation time)
    }
    return out;
}

}  // namespace

template <class T>
Poly<T> intertwine(const Poly<T>& f, const std::vector<std::vector<T>>& deltaK, const T& hbar) {
    if (static_cast<int>(deltaK.size()) != f.nvars())
        throw std::invalid_argument("dimension mismatch");
    T c;
    if constexpr (std::is_same_v<T, RatC>) {
        c = RatC::i() * RatC(Rat(1, 4)) * hbar;
    } else {
        c = T(0.0, 0.25) * hbar;
    }
    return second_order_exp(f, deltaK, c);
}

template Poly<Cx> intertwine<Cx>(const Poly<Cx>&, const std::vector<std::vector<Cx>>&, const Cx&);
template Poly<RatC> intertwine<RatC>(const Poly<RatC>&, const std::vector<std::vector<RatC>>&,
                                     const RatC&);

static std::vector<std::vector<Cx>> to_nested(const Mat& M) {
    std::vector<std::vector<Cx>> out(M.rows(), std::vector<Cx>(M.cols()));
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
    return out;
}

PolyC star_product_poly(const PolyC& f, const PolyC& g, const ExpressionParameter& K,
                        const HbarContext& ctx) {
    K.check_dim(f.nvars());
    return star_product_poly<Cx>(f, g, to_nested(K.Lambda()), Cx(ctx.hbar));
}

PolyC intertwine(const PolyC& f, const ExpressionParameter& K, const ExpressionParameter& K2,
                 const HbarContext& ctx) {
    K.check_dim(f.nvars());
    K2.check_dim(f.nvars());
    return intertwine<Cx>(f, to_nested(K2.K() - K.K()), Cx(ctx.hbar));
}

PolyC commutator(const PolyC& f, const PolyC& g, const ExpressionParameter& K,
                 const HbarContext& ctx) {
    return star_product_poly(f, g, K, ctx) - star_product_poly(g, f, K, ctx);
}

PolyC anticommutator(const PolyC& f, const PolyC& g, const ExpressionParameter& K,
                     const HbarContext& ctx) {
    return star_product_poly(f, g, K, ctx) + star_product_poly(g, f, K, ctx);
}

PolyC circ(const PolyC& f, const PolyC& g, const ExpressionParameter& K, const HbarContext& ctx) {
    return anticommutator(f, g, K, ctx).scaled(Cx(0.5));
}

std::vector<std::vector<RatC>> lambda_exact(const std::vector<std::vector<RatC>>& K) {
    const int n = static_cast<int>(K.size());
    const int m = n / 2;
    auto L = K;
    for (int k = 0; k < m; ++k) {
        L[k][m + k] -= RatC(1);
        L[m + k][k] += RatC(1);
    }
    return L;
}

}  // namespace star
