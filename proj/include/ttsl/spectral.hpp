#pragma once

#include <Eigen/Core>

#include "ttsl/dense_tensor.hpp"
#include "ttsl/models.hpp"
#include "ttsl/tensor_train.hpp"

namespace ttsl {

struct SpectralConfig {
    int rank = -1;           // -1: auto-detect from the spectrum
    double rank_tol = 1e-8;  // relative cutoff for auto detection
    int L = 2;
};

struct SpectralDiagnostics {
    Eigen::VectorXd spectrum;  // singular values across the L/L+1 split
    int effective_rank = 0;
    bool rank_reduced = false;  // requested rank exceeded the effective rank
    bool zero_model = false;
};

/// Recover a linear 2-RNN from the three Hankel tensors H^(L), H^(2L),
/// H^(2L+1): factorize <<H^(2L)>>_{L,L+1} = P S by truncated SVD (P the left
/// singular vectors, the singular values absorbed into S), then
///   h0 = (S+)^T <<H^(L)>>_{L+1},  Omega^T = P+ <<H^(L)>>_{L,1},
///   A  = <<H^(2L+1)>>_{L,1,L+1} x_1 P+ x_3 (S+)^T.
/// With exact Hankels of matching rank the returned network computes the
/// target function exactly (up to a change of basis on the states).
Linear2RNN spectral_learn_dense(const DenseTensor<double>& HL,
                                const DenseTensor<double>& H2L,
                                const DenseTensor<double>& H2L1,
                                const SpectralConfig& config,
                                SpectralDiagnostics* diag = nullptr);

/// Same recovery entirely in the tensor-train format: the split
/// factorization of H^(2L) provides P and S, and all pseudo-inverse
/// applications reduce to small boundary SVDs plus TT contraction sweeps.
/// Nothing of size d^L is ever materialized.
Linear2RNN spectral_learn_tt(const TTTensor<double>& HL,
                             const TTTensor<double>& H2L,
                             const TTTensor<double>& H2L1,
                             const SpectralConfig& config,
                             SpectralDiagnostics* diag = nullptr);

/// Number of singular values of the L/L+1 split of H^(2L) above
/// rank_tol * sigma_1.
int estimate_rank(const DenseTensor<double>& H2L, int L,
                  double rank_tol = 1e-8);
int estimate_rank(const TTTensor<double>& H2L, int L, double rank_tol = 1e-8);

}  // namespace ttsl
