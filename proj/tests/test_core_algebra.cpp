#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "star/core_algebra.hpp"
#include "test_util.hpp"

using namespace star;

namespace {

const std::vector<std::string> kPresets = {"weyl", "normal", "antinormal", "unit"};

PolyQ star_exact(const PolyQ& f, const PolyQ& g, const std::string& preset, int m) {
    auto L = lambda_exact(preset_K_exact(preset, m));
    return star_product_poly<RatC>(f, g, L, RatC(1));
}

}  // namespace

TEST_CASE("m=1 Weyl ordering: u * v and commutator") {
    // Derived by expanding the bidifferential series by hand for degree-1 inputs:
    // u *_0 v = uv - i hbar/2, v *_0 u = uv + i hbar/2, [u,v]_0 = -i hbar.
    HbarContext ctx(1.0, 1);
    auto K = preset_K("weyl", 1);
    PolyC u = PolyC::variable(2, 0), v = PolyC::variable(2, 1);
    PolyC uv = star_product_poly(u, v, K, ctx);
    CHECK(std::abs(uv.coeff({1, 1}) - Cx(1.0)) < 1e-15);
    CHECK(std::abs(uv.coeff({0, 0}) - Cx(0.0, -0.5)) < 1e-15);
    PolyC comm = commutator(u, v, K, ctx);
    CHECK(comm.size() == 1);
    CHECK(std::abs(comm.coeff({0, 0}) - Cx(0.0, -1.0)) < 1e-15);
}

TEST_CASE("normal ordering: u*v = uv and v*u = uv + i hbar") {
    // Lambda = K0 + J has Lambda_12 = 0, Lambda_21 = 2.
    HbarContext ctx(1.0, 1);
    auto K = preset_K("normal", 1);
    PolyC u = PolyC::variable(2, 0), v = PolyC::variable(2, 1);
    PolyC uv = star_product_poly(u, v, K, ctx);
    CHECK(uv.size() == 1);
    CHECK(std::abs(uv.coeff({1, 1}) - Cx(1.0)) < 1e-15);
    PolyC vu = star_product_poly(v, u, K, ctx);
    CHECK(std::abs(vu.coeff({0, 0}) - Cx(0.0, 1.0)) < 1e-15);
    PolyC anti = anticommutator(u, v, K, ctx);
    CHECK(std::abs(anti.coeff({1, 1}) - Cx(2.0)) < 1e-15);
    CHECK(std::abs(anti.coeff({0, 0}) - Cx(0.0, 1.0)) < 1e-15);
}

TEST_CASE("f * 1 = f for any K") {
    std::mt19937 rng(7);
    HbarContext ctx(1.0, 2);
    for (const auto& name : kPresets) {
        auto K = preset_K(name, 2);
        PolyC f = testutil::random_poly(rng, 4, 4, 6);
        PolyC one = PolyC::one(4);
        CHECK(max_abs_coeff(star_product_poly(f, one, K, ctx) - f) == 0.0);
        CHECK(max_abs_coeff(star_product_poly(one, f, K, ctx) - f) == 0.0);
    }
}

TEST_CASE("canonical relations independent of K") {
    for (int m = 1; m <= 3; ++m) {
        HbarContext ctx(1.0, m);
        for (const auto& name : kPresets) {
            auto Kx = preset_K_exact(name, m);
            auto L = lambda_exact(Kx);
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    PolyQ uk = PolyQ::variable(2 * m, k);
                    PolyQ vl = PolyQ::variable(2 * m, m + l);
                    PolyQ c = star_product_poly<RatC>(uk, vl, L, RatC(1)) -
                              star_product_poly<RatC>(vl, uk, L, RatC(1));
                    PolyQ expect(2 * m);
                    if (k == l) expect.add_term(Multi(2 * m, 0), RatC(Rat(0), Rat(-1)));
                    CHECK((c - expect).is_zero());
                    PolyQ cu = star_product_poly<RatC>(uk, PolyQ::variable(2 * m, l), L, RatC(1)) -
                               star_product_poly<RatC>(PolyQ::variable(2 * m, l), uk, L, RatC(1));
                    CHECK(cu.is_zero());
                }
        }
    }
}

TEST_CASE("associativity bit-exact on random triples") {
    std::mt19937 rng(11);
    for (int m = 1; m <= 3; ++m) {
        for (const auto& name : kPresets) {
            for (int rep = 0; rep < 5; ++rep) {
                PolyQ f = testutil::random_poly_exact(rng, 2 * m, 6, 5);
                PolyQ g = testutil::random_poly_exact(rng, 2 * m, 6, 5);
                PolyQ h = testutil::random_poly_exact(rng, 2 * m, 6, 5);
                PolyQ lhs = star_exact(star_exact(f, g, name, m), h, name, m);
                PolyQ rhs = star_exact(f, star_exact(g, h, name, m), name, m);
                CHECK((lhs - rhs).is_zero());
            }
        }
    }
}

TEST_CASE("intertwiner: identity, exponential-weight rule, homomorphism, cocycle") {
    HbarContext ctx(1.0, 1);
    auto K0 = preset_K("weyl", 1);
    auto Kn = preset_K("normal", 1);
    auto Ku = preset_K("unit", 1);

    std::mt19937 rng(3);
    PolyC f = testutil::random_poly(rng, 2, 5, 5);
    CHECK(max_abs_coeff(intertwine(f, Kn, Kn, ctx) - f) == 0.0);

    // I_0^K(u v) with K = diag(d,d') adds (i hbar/2) K_12 = 0.
    {
        Mat K = Mat::Zero(2, 2);
        K(0, 0) = 0.3;
        K(1, 1) = -0.7;
        ExpressionParameter Kd(K);
        PolyC uv = PolyC::variable(2, 0) * PolyC::variable(2, 1);
        CHECK(max_abs_coeff(intertwine(uv, K0, Kd, ctx) - uv) < 1e-15);
    }

    // Order-by-order check of I_K^{K'} e^{<a,u>/i hbar} = e^{a(K'-K)a^T/(4 i hbar)} e^{<a,u>/i hbar}.
    {
        Vec a(2);
        a << Cx(0.2, 0.05), Cx(-0.15, 0.1);
        const int order = 12;
        PolyC truncated(2);
        PolyC lin(2);
        lin.add_term({1, 0}, a(0) / ctx.ihbar());
        lin.add_term({0, 1}, a(1) / ctx.ihbar());
        PolyC pow = PolyC::one(2);
        double fact = 1.0;
        for (int k = 0; k <= order; ++k) {
            truncated += pow.scaled(Cx(1.0 / fact));
            pow *= lin;
            fact *= (k + 1.0);
        }
        PolyC lhs = intertwine(truncated, K0, Kn, ctx);
        Cx w = std::exp((a.transpose() * (Kn.K() - K0.K()) * a)(0) / (4.0 * ctx.ihbar()));
        PolyC rhs = truncated.scaled(w);
        // agreement to the truncation order (lower orders are exact)
        PolyC diff = lhs - rhs;
        double worst = 0.0;
        for (const auto& [e, c] : diff.terms()) {
            int d = 0;
            for (int v : e) d += v;
            if (d <= 4) worst = std::max(worst, std::abs(c));
        }
        CHECK(worst < 1e-10);
    }

    // Homomorphism and cocycle, bit-exact in rationals.
    std::mt19937 rng2(5);
    for (int m = 1; m <= 2; ++m) {
        auto Kw = preset_K_exact("weyl", m);
        auto Kn_ = preset_K_exact("normal", m);
        auto Ku_ = preset_K_exact("unit", m);
        auto dKwn = Kn_;
        auto dKnu = Ku_;
        auto dKwu = Ku_;
        for (int i = 0; i < 2 * m; ++i)
            for (int j = 0; j < 2 * m; ++j) {
                dKwn[i][j] = Kn_[i][j] - Kw[i][j];
                dKnu[i][j] = Ku_[i][j] - Kn_[i][j];
                dKwu[i][j] = Ku_[i][j] - Kw[i][j];
            }
        for (int rep = 0; rep < 4; ++rep) {
            PolyQ f = testutil::random_poly_exact(rng2, 2 * m, 5, 4);
            PolyQ g = testutil::random_poly_exact(rng2, 2 * m, 5, 4);
            PolyQ lhs = intertwine<RatC>(star_product_poly<RatC>(f, g, lambda_exact(Kw), RatC(1)),
                                         dKwn, RatC(1));
            PolyQ rhs = star_product_poly<RatC>(intertwine<RatC>(f, dKwn, RatC(1)),
                                                intertwine<RatC>(g, dKwn, RatC(1)),
                                                lambda_exact(Kn_), RatC(1));
            CHECK((lhs - rhs).is_zero());
            PolyQ coc = intertwine<RatC>(intertwine<RatC>(f, dKwn, RatC(1)), dKnu, RatC(1)) -
                        intertwine<RatC>(f, dKwu, RatC(1));
            CHECK(coc.is_zero());
        }
    }
}

TEST_CASE("circ product is the symmetric part") {
    HbarContext ctx(1.0, 1);
    auto K = preset_K("weyl", 1);
    PolyC u = PolyC::variable(2, 0), v = PolyC::variable(2, 1);
    PolyC c = circ(u, v, K, ctx);
    CHECK(c.size() == 1);
    CHECK(std::abs(c.coeff({1, 1}) - Cx(1.0)) < 1e-15);
}

TEST_CASE("hbar scaling is not hard-coded") {
    HbarContext ctx(0.5, 1);
    auto K = preset_K("weyl", 1);
    PolyC u = PolyC::variable(2, 0), v = PolyC::variable(2, 1);
    PolyC comm = commutator(u, v, K, ctx);
    CHECK(std::abs(comm.coeff({0, 0}) - Cx(0.0, -0.5)) < 1e-15);
}
