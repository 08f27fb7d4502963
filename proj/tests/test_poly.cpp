#include <catch2/catch_amalgamated.hpp>

#include "star/poly.hpp"

using namespace star;

TEST_CASE("polynomial ring basics") {
    PolyQ x = PolyQ::variable(2, 0);
    PolyQ y = PolyQ::variable(2, 1);
    PolyQ p = (x + y) * (x - y);
    CHECK(p.coeff({2, 0}) == RatC(1));
    CHECK(p.coeff({0, 2}) == RatC(-1));
    CHECK(p.coeff({1, 1}) == RatC(0));
    CHECK((p - p).is_zero());
}

TEST_CASE("derivative and eval") {
    PolyC x = PolyC::variable(2, 0);
    PolyC y = PolyC::variable(2, 1);
    PolyC p = x * x * y + y;
    PolyC dp = p.derivative(0);
    std::vector<Cx> u = {Cx(2.0), Cx(3.0)};
    CHECK(std::abs(p.eval(u) - Cx(15.0)) < 1e-14);
    CHECK(std::abs(dp.eval(u) - Cx(12.0)) < 1e-14);
}

TEST_CASE("shift substitution") {
    PolyC x = PolyC::variable(1, 0);
    PolyC p = x * x;
    PolyC q = p.shifted({Cx(1.0)});  // (x+1)^2
    CHECK(std::abs(q.coeff({0}) - Cx(1.0)) < 1e-15);
    CHECK(std::abs(q.coeff({1}) - Cx(2.0)) < 1e-15);
    CHECK(std::abs(q.coeff({2}) - Cx(1.0)) < 1e-15);
}

TEST_CASE("no zero terms stored") {
    PolyQ p(1);
    p.add_term({1}, RatC(2));
    p.add_term({1}, RatC(-2));
    CHECK(p.is_zero());
    CHECK(p.size() == 0);
}
