// SPDX-License-Identifier: Apache-2.0

#include "satrx/preprocessor.hpp"

#include <cmath>
#include <stdexcept>

namespace satrx {

Eigen::MatrixXcd received_covariance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& knn,
                                     double sigma2) {
    if (a.rows() != knn.rows() || knn.rows() != knn.cols())
        throw std::invalid_argument("received_covariance: dimension mismatch between A and K_nn");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("received_covariance: sigma2 must be positive");
    return a * a.adjoint() + sigma2 * knn;
}

Eigen::MatrixXcd mrc_beamformer(const Eigen::MatrixXcd& a) { return a; }

Eigen::MatrixXcd sinr_beamformer(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& r) {
    if (r.rows() != a.rows() || r.rows() != r.cols())
        throw std::invalid_argument("sinr_beamformer: dimension mismatch between A and R");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("sinr_beamformer: eigendecomposition failed");
    const auto& ev = es.eigenvalues();
    double lo = ev(0), hi = ev(ev.size() - 1);
    if (!(lo > 0.0) || hi / lo > 1e12)
        throw std::runtime_error("sinr_beamformer: R is singular or ill-conditioned");
    return r.llt().solve(a);
}

WhiteningResult whitening_filter(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& knn) {
    const auto m = w.rows();
    const auto n = w.cols();
    if (knn.rows() != m || knn.cols() != m)
        throw std::invalid_argument("whitening_filter: K_nn dimension mismatch");

    Eigen::MatrixXcd g = w.adjoint() * knn * w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("whitening_filter: eigendecomposition failed");

    // Reorder eigenpairs descending.
    Eigen::VectorXd lam(n);
    Eigen::MatrixXcd u(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lam(i) = es.eigenvalues()(n - 1 - i);
        u.col(i) = es.eigenvectors().col(n - 1 - i);
    }

    // Deterministic eigenvector phases: largest-magnitude entry real-positive.
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double a = std::abs(u(i, c));
            if (a > best + 1e-15) {
                best = a;
                arg = i;
            }
        }
        if (best > 0.0) u.col(c) *= std::conj(u(arg, c)) / best;
    }

    const double tol = 1e-10 * std::max(lam(0), 0.0);
    const auto keep = std::min(m, n);
    int rank = 0;
    Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lam(i) > tol) {
            inv_sqrt(i) = 1.0 / std::sqrt(lam(i));
            ++rank;
        }
    }
    if (rank < keep)
        throw std::runtime_error("whitening_filter: rank of W^H K_nn W below min(M, N)");

    WhiteningResult out;
    out.f = u * inv_sqrt.asDiagonal();
    out.t = (n > m) ? out.f.leftCols(keep).eval() : out.f;
    out.rank = rank;
    return out;
}

Eigen::VectorXcd PreprocessorState::apply(const Eigen::VectorXcd& rx) const {
    if (rx.size() != w.rows())
        throw std::invalid_argument("apply_preprocessor: received vector length mismatch");
    return t.adjoint() * (w.adjoint() * rx);
}

Eigen::VectorXcd PreprocessorState::apply_full(const Eigen::VectorXcd& rx) const {
    if (rx.size() != w.rows())
        throw std::invalid_argument("apply_preprocessor: received vector length mismatch");
    return f.adjoint() * (w.adjoint() * rx);
}

PreprocessorState build_preprocessor(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& knn,
                                     double sigma2, BeamformerMode mode) {
    PreprocessorState st;
    st.mode = mode;
    st.sigma2 = sigma2;
    st.r = received_covariance(a, knn, sigma2);
    st.w = (mode == BeamformerMode::Mrc) ? mrc_beamformer(a) : sinr_beamformer(a, st.r);
    auto wh = whitening_filter(st.w, knn);
    st.f = std::move(wh.f);
    st.t = std::move(wh.t);
    st.h = st.t.adjoint() * st.w.adjoint() * a;
    st.h_full = st.f.adjoint() * st.w.adjoint() * a;
    return st;
}

}  // namespace satrx
