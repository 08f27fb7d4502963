#pragma once

#include <cmath>

#include "star/types.hpp"

namespace star {

// Complex value with an integer sheet index (parity of slit crossings).
// The sign of any square root derived from it is principal * (-1)^sheet.
struct BranchedScalar {
    Cx value{0.0, 0.0};
    int sheet = 0;

    BranchedScalar() = default;
    BranchedScalar(Cx v, int s = 0) : value(v), sheet(s) {}

    static Cx sqrt_on_sheet(Cx before_root, int sheet) {
        Cx r = std::sqrt(before_root);
        return (sheet % 2 == 0) ? r : -r;
    }

    BranchedScalar operator*(const Cx& c) const { return {value * c, sheet}; }
    BranchedScalar operator*(const BranchedScalar& o) const {
        return {value * o.value, sheet + o.sheet};
    }
};

// Continuously tracked argument of a nonvanishing path sample sequence.
// Feed successive values; rejects jumps of more than pi/2 per step so the
// caller can bisect.
class ArgTracker {
  public:
    explicit ArgTracker(Cx start) : arg_(std::arg(start)), last_(start) {
        if (start == Cx(0.0)) throw std::domain_error("singular point: argument of zero");
    }

    // Returns false when the step is too large to track reliably.
    bool advance(Cx next) {
        if (next == Cx(0.0)) throw std::domain_error("singular point: argument of zero");
        double d = std::arg(next / last_);
        if (std::abs(d) > 1.5707963267948966) return false;
        arg_ += d;
        last_ = next;
        return true;
    }

    double arg() const { return arg_; }
    Cx last() const { return last_; }

    // Continued square root of the tracked value.
    Cx sqrt_value() const { return std::sqrt(std::abs(last_)) * std::exp(Cx(0.0, arg_ / 2.0)); }

    // Sheet parity relative to the principal branch at the current point.
    int sheet() const {
        double principal = std::arg(last_);
        long k = std::lround((arg_ - principal) / (2.0 * M_PI));
        return static_cast<int>(((k % 2) + 2) % 2);
    }

  private:
    double arg_;
    Cx last_;
};

}  // namespace star
