#pragma once

#include <optional>
#include <string>

#include "star/poly.hpp"
#include "star/types.hpp"

namespace star {

// Complex symmetric expression parameter K; K = K^T is enforced at construction.
class ExpressionParameter {
  public:
    ExpressionParameter() = default;
    explicit ExpressionParameter(Mat K, std::string label = {})
        : K_(symmetrize(K)), label_(std::move(label)) {
        if (K_.rows() != K_.cols() || K_.rows() % 2 != 0)
            throw std::invalid_argument("expression parameter must be a 2m x 2m matrix");
    }

    int n() const { return static_cast<int>(K_.rows()); }
    int m() const { return n() / 2; }
    const Mat& K() const { return K_; }
    const std::string& label() const { return label_; }

    Mat Lambda() const { return K_ + standard_J(m()); }        // K + J
    Mat LambdaT() const { return K_ - standard_J(m()); }       // K - J = (K+J)^T
    Mat kappa() const { return standard_J(m()) * K_; }         // JK

    // 2x2 block of K for the generator pair k: rows/cols {k, m+k}.
    Eigen::Matrix2cd pair_block(int k) const {
        Eigen::Matrix2cd B;
        const int m_ = m();
        B << K_(k, k), K_(k, m_ + k), K_(m_ + k, k), K_(m_ + k, m_ + k);
        return B;
    }

    void check_dim(int n) const {
        if (this->n() != n) throw std::invalid_argument("dimension mismatch between K and operands");
    }

  private:
    Mat K_;
    std::string label_;
};

// Named presets of section-1.2 type orderings plus the special classes.
// "weyl"->0, "normal"->K0, "antinormal"->-K0, "unit"->I.
ExpressionParameter preset_K(const std::string& name, int m);
ExpressionParameter kre_parameter(double rho, double c, double theta, int m);  // [[rho, ic'],[ic', rho]] per pair
ExpressionParameter ks_parameter(double rho, double c, int m);                 // [[i rho I, (c)],[(c), i rho I]]
ExpressionParameter kim_parameter(double rho, double c, double theta, int m);  // [[i rho, c'],[c', rho]] per pair

// Exact-rational mirror of a preset (entries of the four named presets are integers).
std::vector<std::vector<RatC>> preset_K_exact(const std::string& name, int m);

// f *_K g by the finite bidifferential expansion with Lambda = K + J.
// Lambda is passed directly so the exact and floating layers share one code path.
template <class T>
Poly<T> star_product_poly(const Poly<T>& f, const Poly<T>& g,
                          const std::vector<std::vector<T>>& Lambda, const T& hbar);

PolyC star_product_poly(const PolyC& f, const PolyC& g, const ExpressionParameter& K,
                        const HbarContext& ctx);

// Intertwiner I_K^{K2}: exp((i hbar/4) sum (K2-K)_ij d_i d_j) as a finite sum.
template <class T>
Poly<T> intertwine(const Poly<T>& f, const std::vector<std::vector<T>>& deltaK, const T& hbar);

PolyC intertwine(const PolyC& f, const ExpressionParameter& K, const ExpressionParameter& K2,
                 const HbarContext& ctx);

PolyC commutator(const PolyC& f, const PolyC& g, const ExpressionParameter& K,
                 const HbarContext& ctx);
PolyC anticommutator(const PolyC& f, const PolyC& g, const ExpressionParameter& K,
                     const HbarContext& ctx);

// a o b = (a*b + b*a)/2
PolyC circ(const PolyC& f, const PolyC& g, const ExpressionParameter& K, const HbarContext& ctx);

std::vector<std::vector<RatC>> lambda_exact(const std::vector<std::vector<RatC>>& K);

}  // namespace star
