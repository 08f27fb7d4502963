#pragma once

#include <complex>
#include <stdexcept>
#include <Eigen/Dense>

namespace star {

using Cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr Cx I_UNIT{0.0, 1.0};

// hbar > 0 and the number m of conjugate generator pairs; n = 2m.
struct HbarContext {
    double hbar = 1.0;
    int m = 1;

    HbarContext() = default;
    HbarContext(double h, int m_) : hbar(h), m(m_) {
        if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");
        if (m < 1) throw std::invalid_argument("m must be >= 1");
    }
    int n() const { return 2 * m; }
    Cx ihbar() const { return Cx(0.0, hbar); }
};

// Standard skew matrix J = [0 -I; I 0], n = 2m.
inline Mat standard_J(int m) {
    Mat J = Mat::Zero(2 * m, 2 * m);
    for (int k = 0; k < m; ++k) {
        J(k, m + k) = -1.0;
        J(m + k, k) = 1.0;
    }
    return J;
}

// <a J, b> with row-vector convention a J paired against b.
inline Cx pair_J(const Vec& a, const Vec& b) {
    const int n = static_cast<int>(a.size());
    const int m = n / 2;
    Cx s = 0.0;
    for (int k = 0; k < m; ++k) {
        // (aJ)_k = a_{m+k}, (aJ)_{m+k} = -a_k
        s += a(m + k) * b(k) - a(k) * b(m + k);
    }
    return s;
}

inline Mat symmetrize(const Mat& A) { return 0.5 * (A + A.transpose()); }

}  // namespace star
