#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <limits>
#include <type_traits>

#include "ttsl/errors.hpp"

namespace ttsl {

/// Default relative cutoff for rank truncation and pseudo-inverse: aggressive
/// enough for double-precision exact-recovery experiments.
inline constexpr double kDefaultRelTol = 1e-10;

/// Sentinel for "no rank cap".
inline constexpr int kUnboundedRank = -1;

template <typename Scalar = double>
struct SVDResult {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix left_vectors;     // m x r, orthonormal columns
    Vector singular_values;  // length r, non-increasing
    Matrix right_vectors;    // n x r, orthonormal columns

    Eigen::Index rank() const { return singular_values.size(); }
};

/// Truncated SVD keeping at most max_rank components and only singular
/// values above rel_tol * sigma_1. A zero (or empty) matrix yields rank 0.
/// Signs are fixed so the largest-magnitude entry of each left vector is
/// positive, for reproducibility.
template <typename Scalar = double>
SVDResult<Scalar> truncated_svd(
    const Eigen::Ref<const typename SVDResult<Scalar>::Matrix>& M,
    int max_rank = kUnboundedRank, double rel_tol = kDefaultRelTol) {
    static_assert(std::is_floating_point_v<Scalar>);
    if (rel_tol < 0) throw ArgumentError("truncated_svd: rel_tol must be >= 0");
    if (max_rank != kUnboundedRank && max_rank < 1)
        throw ArgumentError("truncated_svd: max_rank must be >= 1 or unbounded");

    SVDResult<Scalar> out;
    if (M.rows() == 0 || M.cols() == 0) {
        out.left_vectors.resize(M.rows(), 0);
        out.singular_values.resize(0);
        out.right_vectors.resize(M.cols(), 0);
        return out;
    }

    Eigen::BDCSVD<typename SVDResult<Scalar>::Matrix> svd(
        M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();

    Eigen::Index r = 0;
    if (sigma.size() > 0 && sigma(0) > Scalar(0)) {
        const Scalar cut = rel_tol * sigma(0);
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma(i) > cut) ++r;
        if (max_rank != kUnboundedRank) r = std::min<Eigen::Index>(r, max_rank);
    }

    out.left_vectors = svd.matrixU().leftCols(r);
    out.singular_values = sigma.head(r);
    out.right_vectors = svd.matrixV().leftCols(r);

    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index imax = 0;
        out.left_vectors.col(j).cwiseAbs().maxCoeff(&imax);
        if (out.left_vectors(imax, j) < Scalar(0)) {
            out.left_vectors.col(j) = -out.left_vectors.col(j);
            out.right_vectors.col(j) = -out.right_vectors.col(j);
        }
    }
    return out;
}

/// Moore-Penrose pseudo-inverse with singular values below rel_tol * sigma_1
/// treated as zero.
template <typename Scalar = double>
typename SVDResult<Scalar>::Matrix pinv(
    const Eigen::Ref<const typename SVDResult<Scalar>::Matrix>& M,
    double rel_tol = kDefaultRelTol) {
    SVDResult<Scalar> svd = truncated_svd<Scalar>(M, kUnboundedRank, rel_tol);
    if (svd.rank() == 0) {
        return SVDResult<Scalar>::Matrix::Zero(M.cols(), M.rows());
    }
    return svd.right_vectors *
           svd.singular_values.cwiseInverse().asDiagonal() *
           svd.left_vectors.transpose();
}

/// Count of singular values above rel_tol * sigma_1.
template <typename Scalar = double>
int numerical_rank(
    const Eigen::Ref<const typename SVDResult<Scalar>::Matrix>& M,
    double rel_tol = kDefaultRelTol) {
    return static_cast<int>(
        truncated_svd<Scalar>(M, kUnboundedRank, rel_tol).rank());
}

}  // namespace ttsl
