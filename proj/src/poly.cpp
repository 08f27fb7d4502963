#include "star/poly.hpp"

namespace star {

PolyC to_complex(const PolyQ& p) {
    PolyC r(p.nvars());
    for (const auto& [e, c] : p.terms())
        r.add_term(e, Cx(static_cast<double>(c.re), static_cast<double>(c.im)));
    return r;
}

double max_abs_coeff(const PolyC& p) {
    double mx = 0.0;
    for (const auto& [e, c] : p.terms()) mx = std::max(mx, std::abs(c));
    return mx;
}

}  // namespace star
