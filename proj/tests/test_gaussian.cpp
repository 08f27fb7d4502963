#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "star/gaussian.hpp"
#include "star/oracle.hpp"

using namespace star;

namespace {
Vec vec2(Cx a, Cx b) {
    Vec v(2);
    v << a, b;
    return v;
}
}  // namespace

TEST_CASE("v_class_check examples") {
    HbarContext ctx(1.0, 1);
    VFrame Vr = VFrame::preset("real", 1);
    CHECK(Vr.check_invariants());

    // K = -iI: iK = I, c_K = 1/hbar
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    auto r = v_class_check(K, Vr, ctx);
    CHECK(r.member);
    CHECK(std::abs(*r.c_K - 1.0) < 1e-14);

    // K = 0: form is zero
    auto r0 = v_class_check(preset_K("weyl", 1), Vr, ctx);
    CHECK_FALSE(r0.member);

    // K_s with rho > 0: Re(iK_s) negative definite on the real frame,
    // positive on the imaginary frame.
    auto Ks = ks_parameter(0.4, 0.1, 1);
    CHECK_FALSE(v_class_check(Ks, Vr, ctx).member);
    CHECK(v_class_check(Ks, VFrame::preset("imag", 1), ctx).member);

    // K_re sits in the sqrt-i class.
    auto Kre = kre_parameter(0.3, 0.1, 0.0, 1);
    CHECK_FALSE(v_class_check(Kre, Vr, ctx).member);
    CHECK(v_class_check(Kre, VFrame::preset("sqrt-i", 1), ctx).member);
}

TEST_CASE("gaussian integral closed form: A = -iI gives 2^m") {
    for (int m = 1; m <= 2; ++m) {
        HbarContext ctx(1.0, m);
        VFrame V = VFrame::preset("real", m);
        Mat A = -I_UNIT * Mat::Identity(2 * m, 2 * m);
        auto g = gaussian_integral(A, V, ctx);
        CHECK(std::abs(g.value - std::pow(2.0, m)) < 1e-12);
        CHECK(g.sheet == 0);
    }
}

TEST_CASE("gaussian integral vs quadrature oracle and V-independence") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    for (int m = 1; m <= 2; ++m) {
        HbarContext ctx(1.0, m);
        VFrame Vr = VFrame::preset("real", m);
        int done = 0;
        while (done < (m == 1 ? 8 : 3)) {
            const int n = 2 * m;
            Mat A = -I_UNIT * Mat::Identity(n, n) * (0.9 + 0.5 * std::abs(U(rng)));
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) {
                    Cx p(U(rng) * 0.3, U(rng) * 0.3);
                    A(i, j) += p;
                    A(j, i) = A(i, j);
                }
            ExpressionParameter KA(A);
            auto cls = v_class_check(KA, Vr, ctx);
            if (!cls.member || *cls.c_K < 0.5) continue;
            ++done;
            auto closed = gaussian_integral(A, Vr, ctx);
            QuadratureSpec spec;
            spec.points_per_axis = (m == 1) ? 48 : 32;
            spec.tol = 1e-8;
            auto orac = oracle_gaussian_integral(A, Vr, ctx, spec);
            CHECK(std::abs(closed.value - orac.value) < 1e-8);
            CHECK(orac.refinement_delta < 1e-8);
        }
    }
    // V-independence on overlapping frames: iA = e^{i pi/4} I is in both the
    // real and the sqrt-i class.
    HbarContext ctx(1.0, 1);
    Mat A = std::exp(Cx(0.0, M_PI / 4.0)) * (-I_UNIT) * Mat::Identity(2, 2);
    auto g1 = gaussian_integral(A, VFrame::preset("real", 1), ctx);
    auto g2 = gaussian_integral(A, VFrame::preset("sqrt-i", 1), ctx);
    CHECK(std::abs(g1.value - g2.value) < 1e-12);
}

TEST_CASE("linear star-exponentials: tempexp and Fundcal") {
    HbarContext ctx(1.0, 1);
    auto K = preset_K("unit", 1);
    Vec a = vec2(Cx(0.3, 0.1), Cx(-0.2, 0.4));
    Vec b = vec2(Cx(-0.1, 0.2), Cx(0.5, -0.3));

    // a = 0 -> constant 1
    auto e0 = k_expression_linear_exp(Vec::Zero(2), K, ctx);
    CHECK(std::abs(e0.value(vec2(0.7, -0.3)) - Cx(1.0)) < 1e-14);

    // K = 0 -> plain exponential
    auto ew = k_expression_linear_exp(a, preset_K("weyl", 1), ctx);
    Vec u = vec2(Cx(0.4, 0.0), Cx(-0.6, 0.0));
    CHECK(std::abs(ew.value(u) - std::exp((a(0) * u(0) + a(1) * u(1)) / ctx.ihbar())) < 1e-14);

    // Fundcal phase: e_a * e_b = e^{<aJ,b>/(2 i hbar)} e_{a+b}
    auto ea = k_expression_linear_exp(a, K, ctx);
    auto eb = k_expression_linear_exp(b, K, ctx);
    auto prod = star_gaussian_gaussian(ea, eb, K, ctx);
    auto closed = star_linear_exponentials(a, b, K, ctx);
    CHECK(grid_distance(prod, closed) < 1e-13);

    // b = -a -> identity element
    auto inv = star_gaussian_gaussian(ea, k_expression_linear_exp(Vec(-a), K, ctx), K, ctx);
    CHECK(grid_distance(inv, gaussian_constant(1.0, ctx)) < 1e-13);

    // exchange flips the phase by e^{<aJ,b>/(i hbar)}
    auto ab = star_gaussian_gaussian(ea, eb, K, ctx);
    auto ba = star_gaussian_gaussian(eb, ea, K, ctx);
    Cx flip = std::exp(pair_J(a, b) / ctx.ihbar());
    CHECK(grid_distance(ab, ba.scaled(flip)) < 1e-13);
}

TEST_CASE("delta_full closed form at K = -iI") {
    HbarContext ctx(1.0, 1);
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    VFrame V = VFrame::preset("real", 1);
    auto d = delta_full(Vec::Zero(2), K, V, ctx);
    // 2 e^{-(u^2+v^2)/hbar}
    Vec u = vec2(0.3, -0.4);
    Cx expected = 2.0 * std::exp(-(0.09 + 0.16) / ctx.hbar);
    CHECK(std::abs(d.value(u) - expected) < 1e-13);
}

TEST_CASE("(u_i - x_i) * delta_half = 0 and anticommutation of delta_full") {
    HbarContext ctx(1.0, 1);
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    VFrame V = VFrame::preset("real", 1);
    Vec xt(1);
    xt << Cx(0.3);
    auto dh = delta_half(xt, HalfBlock::UBlock, K, V, ctx);
    PolyC shifted_u = PolyC::variable(2, 0);
    shifted_u.add_term(Multi(2, 0), Cx(-0.3));
    auto l = star_poly_gaussian(shifted_u, dh, K, ctx);
    CHECK(grid_norm(l) < 1e-13);
    auto r = star_gaussian_poly(dh, shifted_u, K, ctx);
    CHECK(grid_norm(r) < 1e-13);

    auto df = delta_full(vec2(0.0, 0.0), K, V, ctx);
    CHECK(anticommute_check(df, 0, K, ctx) < 1e-12);
    CHECK(anticommute_check(df, 1, K, ctx) < 1e-12);
    // generic Gaussian does not anticommute
    auto g = k_expression_linear_exp(vec2(0.3, 0.1), K, ctx);
    GaussianElement gg = df;
    gg.quad *= 0.5;
    CHECK(anticommute_check(gg, 0, K, ctx) > 1e-3);
}

TEST_CASE("delta products: proddelta2 and 2jyou") {
    for (int m = 1; m <= 2; ++m) {
        HbarContext ctx(1.0, m);
        ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2 * m, 2 * m)));
        VFrame V = VFrame::preset("real", m);
        Vec a = Vec::Zero(2 * m), b = Vec::Zero(2 * m);
        for (int i = 0; i < 2 * m; ++i) {
            a(i) = 0.2 * (i + 1);
            b(i) = -0.1 * (i + 2);
        }
        auto da = delta_full(a, K, V, ctx);
        auto db = delta_full(b, K, V, ctx);
        auto sq = star_gaussian_gaussian(da, da, K, ctx);
        CHECK(grid_distance(sq, gaussian_constant(std::pow(2.0, 2 * m), ctx)) < 1e-9);

        // General (a,b) law: delta_a * delta_b = 2^{2m} e^{-2<aJ,b>/(i hbar)}
        // e_*^{2<(a-b)J, u-b>/(i hbar)}, the form derived from Prop. Fundcal
        // and the product formula (the displayed version uses the opposite
        // pairing handedness).
        auto prod = star_gaussian_gaussian(da, db, K, ctx);
        Vec amb = a - b;
        Vec arg(2 * m);
        for (int k = 0; k < m; ++k) {
            arg(k) = 2.0 * amb(m + k);
            arg(m + k) = -2.0 * amb(k);
        }  // +2 (a-b) J as row vector
        auto lin = k_expression_linear_exp(arg, K, ctx);
        // <arg, b> = 2<aJ, b>, so the phase prefactor is e^{-2<aJ,b>/(i hbar)}
        Cx argb = 0.0;
        for (int i = 0; i < 2 * m; ++i) argb += arg(i) * b(i);
        CHECK(std::abs(argb - 2.0 * pair_J(a, b)) < 1e-13);
        auto rhs = lin.scaled(std::pow(2.0, 2 * m) * std::exp(-argb / ctx.ihbar()));
        CHECK(grid_distance(prod, rhs) < 1e-9);
    }
}

TEST_CASE("half-delta collision carries a distributional tag") {
    HbarContext ctx(1.0, 1);
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    VFrame V = VFrame::preset("real", 1);
    Vec x1(1), x2(1);
    x1 << Cx(0.3);
    x2 << Cx(0.3);
    auto d1 = delta_half(x1, HalfBlock::UBlock, K, V, ctx);
    auto d2 = delta_half(x2, HalfBlock::UBlock, K, V, ctx);
    auto p = star_gaussian_gaussian(d1, d2, K, ctx);
    REQUIRE(p.dist.has_value());
    CHECK(p.dist->zero_argument());
    // tags on both sides are rejected
    CHECK_THROWS_AS(star_gaussian_gaussian(p, p, K, ctx), std::domain_error);
}

TEST_CASE("certified route agrees with continuation route") {
    HbarContext ctx(1.0, 1);
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    VFrame V = VFrame::preset("real", 1);
    auto d = delta_full(vec2(0.1, -0.2), K, V, ctx);
    GaussianElement g(ctx);
    g.quad = -0.5 * I_UNIT * Mat::Identity(2, 2);
    g.lin = vec2(Cx(0.2, 0.1), Cx(0.0, -0.3));
    g.amplitude = BranchedScalar(Cx(1.3, -0.2), 0);

    StarOptions certified;
    certified.allow_continuation = false;
    auto p1 = star_gaussian_gaussian(d, g, K, ctx, certified);
    StarOptions contin;
    contin.V = std::nullopt;
    auto frames_disabled = contin;
    // force the continuation route by disabling all frames via a huge margin
    frames_disabled.margin = 1e9;
    auto p2 = star_gaussian_gaussian(d, g, K, ctx, frames_disabled);
    CHECK(grid_distance(p1, p2) < 1e-10);

    // with polynomial prefactors on both sides
    GaussianElement gp = g;
    gp.prefactor = PolyC::variable(2, 0) * PolyC::variable(2, 1);
    gp.prefactor.add_term(Multi{1, 0}, Cx(0.5, 0.0));
    GaussianElement dp = d;
    dp.prefactor = PolyC::variable(2, 1);
    dp.hat.kind = HatKind::Full;
    auto q1 = star_gaussian_gaussian(dp, gp, K, ctx, certified);
    auto q2 = star_gaussian_gaussian(dp, gp, K, ctx, frames_disabled);
    CHECK(grid_distance(q1, q2) < 1e-10);
}

TEST_CASE("poly-gaussian product matches bidifferential series") {
    HbarContext ctx(1.0, 1);
    auto K = preset_K("normal", 1);
    GaussianElement g(ctx);
    g.quad = -0.4 * I_UNIT * Mat::Identity(2, 2);
    g.lin = vec2(Cx(0.1), Cx(-0.2));
    PolyC p = PolyC::variable(2, 0) * PolyC::variable(2, 0) * PolyC::variable(2, 1);
    auto l = star_poly_gaussian(p, g, K, ctx);
    // finite-difference check of Eq.(1.2): f * g = sum (i hbar/2)^k / k! L^k
    auto u = vec2(Cx(0.37, 0.0), Cx(-0.21, 0.0));
    // reference by nested generator products: u*u*v with associativity of
    // poly-side products
    PolyC uu = PolyC::variable(2, 0);
    PolyC vv = PolyC::variable(2, 1);
    auto s1 = star_poly_gaussian(vv, g, K, ctx);
    auto s2 = star_poly_gaussian(uu, s1, K, ctx);
    auto s3 = star_poly_gaussian(uu, s2, K, ctx);
    // u*(u*(v*g)) = (u^2 v)*g  +  correction terms from reordering; instead
    // compare against star_product_poly on the exponent-truncated Gaussian.
    // Simplest faithful check: evaluate both routes for a polynomial Gaussian
    // truncation of e^{Q/(i hbar)}.
    PolyC Q(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (g.quad(i, j) != Cx(0.0)) {
                Multi e(2, 0);
                e[i] += 1;
                e[j] += 1;
                Q.add_term(e, g.quad(i, j) / ctx.ihbar());
            }
    Q.add_term({1, 0}, g.lin(0) / ctx.ihbar());
    Q.add_term({0, 1}, g.lin(1) / ctx.ihbar());
    PolyC expQ = PolyC::one(2);
    PolyC pow = PolyC::one(2);
    double fact = 1.0;
    for (int k = 1; k <= 16; ++k) {
        pow *= Q;
        fact *= k;
        expQ += pow.scaled(Cx(1.0 / fact));
    }
    PolyC ref = star_product_poly(p, expQ, K, ctx);
    std::vector<Cx> pt = {u(0), u(1)};
    Cx lhs = l.value(u);
    Cx rhs = ref.eval(pt);
    CHECK(std::abs(lhs - rhs) < 1e-8);
    (void)s3;
}

TEST_CASE("exp_linear shift rule consistency with Fundcal products") {
    HbarContext ctx(1.0, 1);
    auto K = preset_K("unit", 1);
    Vec a = vec2(Cx(0.2, -0.1), Cx(0.3, 0.2));
    GaussianElement g(ctx);
    g.quad = -0.7 * I_UNIT * Mat::Identity(2, 2);
    g.lin = vec2(Cx(-0.2), Cx(0.1));
    g.prefactor = PolyC::variable(2, 0);
    auto lhs = exp_linear_star_function(a, g, K, ctx);
    auto ea = k_expression_linear_exp(a, K, ctx);
    GaussianElement ea_generic = ea;
    ea_generic.hat.kind = HatKind::Full;  // bypass the shift shortcut
    StarOptions force;
    force.margin = 1e9;  // continuation route
    auto rhs = star_gaussian_gaussian(ea_generic, g, K, ctx, force);
    CHECK(grid_distance(lhs, rhs) < 1e-11);
}

TEST_CASE("adjoint translate matches conjugation oracle") {
    HbarContext ctx(1.0, 1);
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    VFrame V = VFrame::preset("real", 1);
    Vec a = vec2(0.4, -0.3);
    auto d = delta_full(vec2(0.2, 0.1), K, V, ctx);
    auto shifted = adjoint_translate(a, d, K, ctx);
    auto ea = k_expression_linear_exp(a, K, ctx);
    auto eminus = k_expression_linear_exp(Vec(-a), K, ctx);
    auto conj = star_gaussian_gaussian(star_gaussian_gaussian(ea, d, K, ctx), eminus, K, ctx);
    CHECK(grid_distance(shifted, conj) < 1e-11);
    // a = 0 is the identity
    CHECK(grid_distance(adjoint_translate(Vec::Zero(2), d, K, ctx), d) < 1e-14);
}

TEST_CASE("delta * f = f(-u) * delta for Gaussian-class f") {
    HbarContext ctx(1.0, 1);
    ExpressionParameter K(Mat(-I_UNIT * Mat::Identity(2, 2)));
    VFrame V = VFrame::preset("real", 1);
    auto d = delta_full(Vec::Zero(2), K, V, ctx);
    GaussianElement f(ctx);
    f.quad = -0.3 * I_UNIT * Mat::Identity(2, 2);
    f.lin = vec2(Cx(0.2, 0.05), Cx(-0.1, 0.1));
    auto lhs = star_gaussian_gaussian(d, f, K, ctx);
    GaussianElement fneg = f;
    fneg.lin = -f.lin;  // f(-u): quad even
    auto rhs = star_gaussian_gaussian(fneg, d, K, ctx);
    CHECK(grid_distance(lhs, rhs) < 1e-10);
}
