#include "star/vframe.hpp"

#include <Eigen/Eigenvalues>

namespace star {

VFrame VFrame::preset(const std::string& name, int m) {
    double th;
    if (name == "real")
        th = 0.0;
    else if (name == "imag")
        th = M_PI / 2.0;
    else if (name == "sqrt-i")
        th = -M_PI / 4.0;
    else
        throw std::invalid_argument("unknown V preset: " + name);
    return VFrame(std::vector<double>(m, th), name);
}

Cx VFrame::phase_product(const std::vector<int>& slots) const {
    double s = 0.0;
    for (int slot : slots) s += theta_slot(slot);
    return std::exp(Cx(0.0, s));
}

Cx VFrame::phase_product_all() const { return phase_product(all_slots(n())); }

bool VFrame::check_invariants() const {
    const int n_ = n();
    Mat F = Mat::Zero(n_, n_);
    for (int s = 0; s < n_; ++s) F(s, s) = phase_slot(s);
    // JV = V: J maps frame vectors to +/- frame vectors.
    Mat J = standard_J(m());
    Mat JF = J * F;
    for (int c = 0; c < n_; ++c) {
        int nz = 0;
        for (int r = 0; r < n_; ++r) {
            if (std::abs(JF(r, c)) > 1e-14) {
                ++nz;
                Cx q = JF(r, c) / F(r, r);
                if (std::abs(q.imag()) > 1e-12) return false;
            }
        }
        if (nz != 1) return false;
    }
    // C^n = V + iV: the 2n real vectors Re/Im of {F, iF} span R^{2n}.
    Eigen::MatrixXd R(2 * n_, 2 * n_);
    for (int c = 0; c < n_; ++c) {
        for (int r = 0; r < n_; ++r) {
            R(r, c) = F(r, c).real();
            R(n_ + r, c) = F(r, c).imag();
            R(r, n_ + c) = (I_UNIT * F(r, c)).real();
            R(n_ + r, n_ + c) = (I_UNIT * F(r, c)).imag();
        }
    }
    return Eigen::FullPivLU<Eigen::MatrixXd>(R).rank() == 2 * n_;
}

std::vector<int> all_slots(int n) {
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = i;
    return s;
}

namespace {

// Frame-conjugated matrix: M_ab = phi_{slots[a]} phi_{slots[b]} (iA)_{ab}.
// iA is already restricted to the slots (d x d); slots fix the frame phases.
Mat rotated_matrix(const Mat& iA, const VFrame& V, const std::vector<int>& slots) {
    const int d = static_cast<int>(slots.size());
    if (iA.rows() != d) throw std::invalid_argument("slot/matrix dimension mismatch");
    Mat M(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            M(a, b) = V.phase_slot(slots[a]) * V.phase_slot(slots[b]) * iA(a, b);
    return M;
}

double min_real_eig(const Mat& M) {
    Eigen::MatrixXd ReM = 0.5 * (M.real() + M.real().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ReM);
    return es.eigenvalues().minCoeff();
}

}  // namespace

VClassResult v_class_check(const ExpressionParameter& K, const VFrame& V, const HbarContext& ctx) {
    K.check_dim(V.n());
    Mat M = rotated_matrix(I_UNIT * K.K(), V, all_slots(V.n()));
    double lmin = min_real_eig(M) / ctx.hbar;
    VClassResult r;
    if (lmin > 0.0) {
        r.member = true;
        r.c_K = lmin;
    }
    return r;
}

Cx sqrt_det_positive(const Mat& M) {
    const int d = static_cast<int>(M.rows());
    Eigen::MatrixXd R2 = 0.5 * (M.real() + M.real().transpose());
    Eigen::MatrixXd S = 0.5 * (M.imag() + M.imag().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R2);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::domain_error("matrix real part is not positive definite");
    Eigen::VectorXd sq = es.eigenvalues().cwiseSqrt();
    Eigen::MatrixXd R = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd Rinv =
        es.eigenvectors() * sq.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd T = Rinv * S * Rinv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(0.5 * (T + T.transpose()));
    Cx acc = 1.0;
    for (int k = 0; k < d; ++k) acc *= std::sqrt(Cx(1.0, et.eigenvalues()(k)));
    double detR = R.determinant();
    return detR * acc;
}

Cx sqrt_det_iA_on_V(const Mat& iA, const VFrame& V, const std::vector<int>& slots, double margin) {
    Mat M = rotated_matrix(iA, V, slots);
    if (min_real_eig(M) <= margin)
        throw std::domain_error("non-V-class matrix: rotated real part not positive definite");
    // Integral convention: int_V = e^{i sum theta} int_{R^d}; the canonical
    // sqrt(det iA) therefore divides out the frame phases.
    return sqrt_det_positive(M) * std::conj(V.phase_product(slots));
}

BranchedScalar gaussian_integral(const Mat& A, const VFrame& V, const HbarContext& ctx) {
    if (A.rows() != V.n()) throw std::invalid_argument("dimension mismatch between A and V");
    Cx sd = sqrt_det_iA_on_V(I_UNIT * A, V, all_slots(V.n()));
    return BranchedScalar(std::pow(2.0, ctx.m) / sd, 0);
}

}  // namespace star
