#include "ttsl/spectral.hpp"

#include <Eigen/Dense>

#include "ttsl/linalg.hpp"

namespace ttsl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace {

struct HankelDims {
    Eigen::Index d = 0;
    Eigen::Index p = 0;
};

HankelDims check_dims(const Shape& sL, const Shape& s2L, const Shape& s2L1,
                      int L) {
    if (L < 1) throw ArgumentError("spectral_learn: L must be >= 1");
    if (static_cast<int>(sL.size()) != L + 1 ||
        static_cast<int>(s2L.size()) != 2 * L + 1 ||
        static_cast<int>(s2L1.size()) != 2 * L + 2)
        throw ShapeError("spectral_learn: Hankel orders do not match L");
    HankelDims dims{sL[0], sL.back()};
    auto check = [&](const Shape& s) {
        for (std::size_t k = 0; k + 1 < s.size(); ++k)
            if (s[k] != dims.d) throw ShapeError("spectral_learn: d mismatch");
        if (s.back() != dims.p) throw ShapeError("spectral_learn: p mismatch");
    };
    check(sL);
    check(s2L);
    check(s2L1);
    return dims;
}

/// Shared rank-selection logic; fills diagnostics.
int select_rank(const Vector& sigma, const SpectralConfig& config,
                SpectralDiagnostics* diag) {
    int effective = 0;
    if (sigma.size() > 0 && sigma(0) > 0.0) {
        const double cut = config.rank_tol * sigma(0);
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma(i) > cut) ++effective;
    }
    int r = (config.rank > 0) ? std::min(config.rank, effective) : effective;
    if (diag) {
        diag->spectrum = sigma;
        diag->effective_rank = effective;
        diag->rank_reduced = (config.rank > 0 && effective < config.rank);
        diag->zero_model = (r == 0);
    }
    return r;
}

}  // namespace

Linear2RNN spectral_learn_dense(const DenseTensor<double>& HL,
                                const DenseTensor<double>& H2L,
                                const DenseTensor<double>& H2L1,
                                const SpectralConfig& config,
                                SpectralDiagnostics* diag) {
    const int L = config.L;
    const HankelDims dims =
        check_dims(HL.shape(), H2L.shape(), H2L1.shape(), L);

    // Rank factorization <<H^(2L)>>_{L,L+1} = P S, P = U, S = diag(sigma) V^T.
    auto svd = truncated_svd<double>(H2L.as_matrix(L), kUnboundedRank, 0.0);
    const int r = select_rank(svd.singular_values, config, diag);
    if (r == 0) return zero_2rnn(dims.d, dims.p);

    const Matrix U = svd.left_vectors.leftCols(r);
    const Matrix V = svd.right_vectors.leftCols(r);
    const Vector sigma = svd.singular_values.head(r);
    const Vector sigma_inv = sigma.cwiseInverse();

    Linear2RNN model;
    // h0 = (S+)^T vec(H^(L)) = sigma^-1 V^T vec(H^(L)).
    model.h0 = sigma_inv.asDiagonal() * (V.transpose() * HL.values());
    // Omega^T = P+ <<H^(L)>>_{L,1} = U^T <<H^(L)>>_{L,1}.
    model.omega = (U.transpose() * HL.as_matrix(L)).transpose();

    // A = <<H^(2L+1)>>_{L,1,L+1} x_1 U^T x_3 (sigma^-1 V^T); slice j of the
    // middle mode is U^T M_j V sigma^-1 where M_j is the j-th column block.
    const auto M1 = H2L1.as_matrix(L);  // d^L x (d * d^L * p), j slowest
    const Eigen::Index block = M1.cols() / dims.d;
    const Matrix VSinv = V * sigma_inv.asDiagonal();
    model.transition.reserve(dims.d);
    for (Eigen::Index j = 0; j < dims.d; ++j)
        model.transition.push_back(
            (U.transpose() * M1.middleCols(j * block, block)) * VSinv);
    model.validate();
    return model;
}

namespace {

/// Sweep a left-orthogonal prefix against the leading cores of G:
/// M <- sum_j P_k(j)^T M G_k(j), starting from the 1x1 identity.
Matrix sweep_left(const std::vector<TTTensor<double>::Core>& prefix,
                  const TTTensor<double>& G) {
    Matrix M = Matrix::Ones(1, 1);
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        const auto& pc = prefix[k];
        const auto& gc = G.core(static_cast<int>(k));
        if (pc.dim() != gc.dim())
            throw ShapeError("spectral_learn_tt: mode mismatch in left sweep");
        Matrix next = Matrix::Zero(pc.right_rank(), gc.right_rank());
        for (Eigen::Index j = 0; j < pc.dim(); ++j)
            next.noalias() += pc.slices[j].transpose() * M * gc.slices[j];
        M = std::move(next);
    }
    return M;
}

/// Sweep a right-orthogonal suffix against the trailing cores of G
/// (aligned at the right edge): N <- sum_j S_k(j) N G_k(j)^T.
Matrix sweep_right(const std::vector<TTTensor<double>::Core>& suffix,
                   const TTTensor<double>& G) {
    Matrix N = Matrix::Ones(1, 1);
    const int offset = G.order() - static_cast<int>(suffix.size());
    if (offset < 0)
        throw ShapeError("spectral_learn_tt: suffix longer than tensor");
    for (int k = static_cast<int>(suffix.size()) - 1; k >= 0; --k) {
        const auto& sc = suffix[k];
        const auto& gc = G.core(offset + k);
        if (sc.dim() != gc.dim())
            throw ShapeError("spectral_learn_tt: mode mismatch in right sweep");
        Matrix next = Matrix::Zero(sc.left_rank(), gc.left_rank());
        for (Eigen::Index j = 0; j < sc.dim(); ++j)
            next.noalias() += sc.slices[j] * N * gc.slices[j].transpose();
        N = std::move(next);
    }
    return N;
}

}  // namespace

Linear2RNN spectral_learn_tt(const TTTensor<double>& HL,
                             const TTTensor<double>& H2L,
                             const TTTensor<double>& H2L1,
                             const SpectralConfig& config,
                             SpectralDiagnostics* diag) {
    const int L = config.L;
    const HankelDims dims =
        check_dims(HL.shape(), H2L.shape(), H2L1.shape(), L);

    // P and S come from orthogonalizing H^(2L) around the L-th bond; the
    // gauge sits in a small boundary matrix whose SVD carries the spectrum
    // of the grouped matricization.
    TTSplit<double> split = tt_split_factorize(H2L, L);
    auto bsvd = truncated_svd<double>(split.boundary, kUnboundedRank, 0.0);
    const int r = select_rank(bsvd.singular_values, config, diag);
    if (r == 0) return zero_2rnn(dims.d, dims.p);

    const Matrix U = bsvd.left_vectors.leftCols(r);
    const Matrix V = bsvd.right_vectors.leftCols(r);
    const Vector sigma_inv = bsvd.singular_values.head(r).cwiseInverse();

    Linear2RNN model;

    // h0 = sigma^-1 V^T (Q_S vec(H^(L))): one right sweep over all L+1 modes.
    {
        Matrix N = sweep_right(split.suffix_cores, HL);  // (rS x 1)
        model.h0 = sigma_inv.asDiagonal() * (V.transpose() * N);
    }

    // Omega^T = U^T (Q_P^T <<H^(L)>>_{L,1}): left sweep over the L input
    // modes, then close with the output core of H^(L).
    {
        Matrix M = sweep_left(split.prefix_cores, HL);
        const auto& out_core = HL.core(L);
        Matrix O(out_core.left_rank(), out_core.dim());
        for (Eigen::Index m = 0; m < out_core.dim(); ++m)
            O.col(m) = out_core.slices[m];
        model.omega = (U.transpose() * M * O).transpose();
    }

    // A_j = (U^T M_left) W_j (N_right^T V sigma^-1) where M_left sweeps the
    // prefix against the first L cores of H^(2L+1), W_j is the middle core,
    // and N_right sweeps the suffix against its last L+1 cores.
    {
        Matrix M = sweep_left(split.prefix_cores, H2L1);
        Matrix N = sweep_right(split.suffix_cores, H2L1);
        const Matrix left = U.transpose() * M;                       // r x rho_L
        const Matrix right = N.transpose() * V * sigma_inv.asDiagonal();  // rho_{L+1} x r
        const auto& mid = H2L1.core(L);
        model.transition.reserve(dims.d);
        for (Eigen::Index j = 0; j < dims.d; ++j)
            model.transition.push_back(left * mid.slices[j] * right);
    }
    model.validate();
    return model;
}

int estimate_rank(const DenseTensor<double>& H2L, int L, double rank_tol) {
    if (L < 1 || H2L.order() != 2 * L + 1)
        throw ShapeError("estimate_rank: order does not match L");
    return numerical_rank<double>(H2L.as_matrix(L), rank_tol);
}

int estimate_rank(const TTTensor<double>& H2L, int L, double rank_tol) {
    if (L < 1 || H2L.order() != 2 * L + 1)
        throw ShapeError("estimate_rank: order does not match L");
    return tt_split_factorize(H2L, L).effective_rank(rank_tol);
}

}  // namespace ttsl
