#pragma once

#include <optional>
#include <string>
#include <vector>

#include "star/branched.hpp"
#include "star/core_algebra.hpp"
#include "star/types.hpp"

namespace star {

// Real n-dimensional integration subspace V of C^n spanned by an axis-phase
// frame e^{i theta_k} (e_k, e_{m+k}); theta is shared within a conjugate pair
// so that JV = V. Presets: "real" (0), "imag" (pi/2), "sqrt-i" (-pi/4).
class VFrame {
  public:
    VFrame() = default;
    VFrame(std::vector<double> theta, std::string label = {})
        : theta_(std::move(theta)), label_(std::move(label)) {}

    static VFrame preset(const std::string& name, int m);

    int m() const { return static_cast<int>(theta_.size()); }
    int n() const { return 2 * m(); }
    const std::string& label() const { return label_; }

    double theta_pair(int k) const { return theta_.at(k); }
    double theta_slot(int slot) const { return theta_.at(slot % m()); }
    Cx phase_slot(int slot) const { return std::exp(Cx(0.0, theta_slot(slot))); }

    // Product of slot phases over a slot subset (or all slots).
    Cx phase_product(const std::vector<int>& slots) const;
    Cx phase_product_all() const;

    // JV = V and C^n = V + iV (direct sum), per construction; verified numerically.
    bool check_invariants() const;

  private:
    std::vector<double> theta_;
    std::string label_;
};

struct VClassResult {
    bool member = false;
    std::optional<double> c_K;  // smallest eigenvalue of the positive form, when member
};

// Membership in H_+(V): (1/hbar) <xi pi_re(iK), xi> positive definite on V.
VClassResult v_class_check(const ExpressionParameter& K, const VFrame& V, const HbarContext& ctx);

// Lemma-style branch-fixed square root of det(M) for complex symmetric M with
// positive-definite real part: det of the PD square root of Re M times
// prod sqrt(1 + i mu_k), Re sqrt > 0.
Cx sqrt_det_positive(const Mat& M);

// sqrt(det(iA)) fixed by evaluating the V-integral convention on the slot
// subset `slots` (frame-phase conjugation + Lemma branch).
// Throws std::domain_error when the rotated real part is not positive definite.
Cx sqrt_det_iA_on_V(const Mat& iA, const VFrame& V, const std::vector<int>& slots,
                    double margin = 0.0);

// Closed form of the V-integral of e^{-(1/4 hbar) <xi (iA), xi>}: 2^m / sqrt(det iA).
BranchedScalar gaussian_integral(const Mat& A, const VFrame& V, const HbarContext& ctx);

std::vector<int> all_slots(int n);

}  // namespace star
