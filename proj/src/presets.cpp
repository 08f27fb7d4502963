#include "star/core_algebra.hpp"

namespace star {

ExpressionParameter preset_K(const std::string& name, int m) {
    const int n = 2 * m;
    Mat K = Mat::Zero(n, n);
    if (name == "weyl") {
        // K = 0
    } else if (name == "normal" || name == "antinormal") {
        const double s = (name == "normal") ? 1.0 : -1.0;
        for (int k = 0; k < m; ++k) {
            K(k, m + k) = s;
            K(m + k, k) = s;
        }
    } else if (name == "unit") {
        K = Mat::Identity(n, n);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return ExpressionParameter(K, name);
}

ExpressionParameter kre_parameter(double rho, double c, double theta, int m) {
    const int n = 2 * m;
    const Cx cp(c, theta);  // c' = c + i theta
    Mat K = Mat::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        K(k, k) = rho;
        K(m + k, m + k) = rho;
        K(k, m + k) = I_UNIT * cp;
        K(m + k, k) = I_UNIT * cp;
    }
    return ExpressionParameter(K, "kre");
}

ExpressionParameter ks_parameter(double rho, double c, int m) {
    const int n = 2 * m;
    Mat K = Mat::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        K(k, k) = I_UNIT * rho;
        K(m + k, m + k) = I_UNIT * rho;
    }
    for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
            K(k, m + l) = c;
            K(m + l, k) = c;
        }
    return ExpressionParameter(K, "ks");
}

ExpressionParameter kim_parameter(double rho, double c, double theta, int m) {
    const int n = 2 * m;
    const Cx cp(c, theta);
    Mat K = Mat::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        K(k, k) = I_UNIT * rho;
        K(m + k, m + k) = rho;
        K(k, m + k) = cp;
        K(m + k, k) = cp;
    }
    return ExpressionParameter(K, "kim");
}

std::vector<std::vector<RatC>> preset_K_exact(const std::string& name, int m) {
    const int n = 2 * m;
    std::vector<std::vector<RatC>> K(n, std::vector<RatC>(n, RatC()));
    if (name == "weyl") {
    } else if (name == "normal" || name == "antinormal") {
        const long s = (name == "normal") ? 1 : -1;
        for (int k = 0; k < m; ++k) {
            K[k][m + k] = RatC(s);
            K[m + k][k] = RatC(s);
        }
    } else if (name == "unit") {
        for (int i = 0; i < n; ++i) K[i][i] = RatC(1);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return K;
}

}  // namespace star
