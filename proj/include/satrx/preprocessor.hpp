// SPDX-License-Identifier: Apache-2.0
//
// Linear preprocessing stage: beamformer (MRC or SINR), noise whitening
// filter with rank truncation, and the detector-facing model y = H s + z.

#ifndef SATRX_PREPROCESSOR_HPP
#define SATRX_PREPROCESSOR_HPP

#include <Eigen/Dense>
#include <complex>

namespace satrx {

enum class BeamformerMode { Mrc, Sinr };

// R = A A^H + sigma2 * K_nn for unit-variance independent symbol streams.
Eigen::MatrixXcd received_covariance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& knn,
                                     double sigma2);

// MRC beamformer: W = A.
Eigen::MatrixXcd mrc_beamformer(const Eigen::MatrixXcd& a);

// Wiener-Hopf SINR beamformer: columns w_m = R^-1 a_m. Throws on
// ill-conditioned R (condition number above 1e12).
Eigen::MatrixXcd sinr_beamformer(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& r);

struct WhiteningResult {
    Eigen::MatrixXcd f;  // N x N, trailing rank-deficient columns zeroed
    Eigen::MatrixXcd t;  // N x min(M, N), the retained columns of F
    int rank = 0;
};

// Builds F = U (L^+)^(1/2) from the eigendecomposition of G = W^H K_nn W
// (eigenvalues descending; eigenvector phases fixed by making the largest
// entry real-positive) and truncates the dropped columns. Throws when
// rank(G) < min(M, N).
WhiteningResult whitening_filter(const Eigen::MatrixXcd& w, const Eigen::MatrixXcd& knn);

struct PreprocessorState {
    BeamformerMode mode;
    Eigen::MatrixXcd w;       // M x N beamformer
    Eigen::MatrixXcd f;       // N x N whitener
    Eigen::MatrixXcd t;       // N x M truncated whitener
    Eigen::MatrixXcd h;       // M x N effective channel T^H W^H A
    Eigen::MatrixXcd h_full;  // N x N untruncated channel F^H W^H A
    Eigen::MatrixXcd r;       // received covariance
    double sigma2 = 0.0;

    // y = T^H W^H r.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& rx) const;
    // Untruncated path, used by the conventional (full-N) detector.
    Eigen::VectorXcd apply_full(const Eigen::VectorXcd& rx) const;
};

PreprocessorState build_preprocessor(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& knn,
                                     double sigma2, BeamformerMode mode);

}  // namespace satrx

#endif
