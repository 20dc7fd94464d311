#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <type_traits>
#include <utility>
#include <vector>

#include "ttsl/dense_tensor.hpp"
#include "ttsl/errors.hpp"
#include "ttsl/linalg.hpp"

namespace ttsl {

/// Entry cap for densification (~0.8 GB of doubles). The tensor-train
/// pipeline exists precisely to avoid crossing this line.
inline constexpr Eigen::Index kDenseEntryCap = 100'000'000;

/// Tensor train: an ordered list of cores, core k holding one r_{k-1} x r_k
/// matrix slice per index of mode k (boundary ranks are 1). The entry at
/// (i_1,...,i_p) is the product of the selected slices.
template <typename Scalar = double>
class TTTensor {
    static_assert(std::is_floating_point_v<Scalar>);

public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// One TT core: slices[j] is the r_prev x r_next matrix for index j.
    struct Core {
        std::vector<Matrix> slices;

        Eigen::Index dim() const { return static_cast<Eigen::Index>(slices.size()); }
        Eigen::Index left_rank() const { return slices.at(0).rows(); }
        Eigen::Index right_rank() const { return slices.at(0).cols(); }
    };

    TTTensor() = default;

    explicit TTTensor(std::vector<Core> cores) : cores_(std::move(cores)) {
        validate();
    }

    /// Zero tensor of the given shape, all bond dimensions 1.
    static TTTensor zeros(const Shape& shape) {
        std::vector<Core> cores;
        cores.reserve(shape.size());
        for (Eigen::Index d : shape) {
            Core c;
            c.slices.assign(d, Matrix::Zero(1, 1));
            cores.push_back(std::move(c));
        }
        return TTTensor(std::move(cores));
    }

    int order() const { return static_cast<int>(cores_.size()); }

    Shape shape() const {
        Shape s;
        s.reserve(cores_.size());
        for (const Core& c : cores_) s.push_back(c.dim());
        return s;
    }

    /// Internal bond dimensions r_1, ..., r_{p-1}.
    Shape ranks() const {
        Shape r;
        for (std::size_t k = 0; k + 1 < cores_.size(); ++k)
            r.push_back(cores_[k].right_rank());
        return r;
    }

    Eigen::Index max_rank() const {
        Eigen::Index m = 0;
        for (Eigen::Index r : ranks()) m = std::max(m, r);
        return m;
    }

    const std::vector<Core>& cores() const { return cores_; }
    std::vector<Core>& cores() { return cores_; }
    const Core& core(int k) const { return cores_.at(k); }
    Core& core(int k) { return cores_.at(k); }

    Scalar entry(const Shape& index) const {
        if (static_cast<int>(index.size()) != order())
            throw ArgumentError("TTTensor::entry: index order mismatch");
        Matrix row = Matrix::Ones(1, 1);
        for (int k = 0; k < order(); ++k) {
            if (index[k] < 0 || index[k] >= cores_[k].dim())
                throw ArgumentError("TTTensor::entry: index out of bounds");
            row = row * cores_[k].slices[index[k]];
        }
        return row(0, 0);
    }

    void validate() const {
        if (cores_.empty()) throw ShapeError("TTTensor: no cores");
        if (cores_.front().left_rank() != 1 || cores_.back().right_rank() != 1)
            throw ShapeError("TTTensor: boundary ranks must be 1");
        for (std::size_t k = 0; k < cores_.size(); ++k) {
            const Core& c = cores_[k];
            if (c.slices.empty()) throw ShapeError("TTTensor: empty core");
            for (const Matrix& s : c.slices)
                if (s.rows() != c.left_rank() || s.cols() != c.right_rank())
                    throw ShapeError("TTTensor: ragged slices within a core");
            if (k + 1 < cores_.size() &&
                c.right_rank() != cores_[k + 1].left_rank())
                throw ShapeError("TTTensor: adjacent core ranks do not match");
        }
    }

private:
    std::vector<Core> cores_;
};

using TTTensorXd = TTTensor<double>;

namespace detail {

/// Left unfolding: (r_prev * d) x r_next, row index q * d + j.
template <typename Scalar>
typename TTTensor<Scalar>::Matrix left_unfold(
    const typename TTTensor<Scalar>::Core& c) {
    typename TTTensor<Scalar>::Matrix M(c.left_rank() * c.dim(), c.right_rank());
    for (Eigen::Index q = 0; q < c.left_rank(); ++q)
        for (Eigen::Index j = 0; j < c.dim(); ++j)
            M.row(q * c.dim() + j) = c.slices[j].row(q);
    return M;
}

template <typename Scalar>
typename TTTensor<Scalar>::Core left_fold(
    const typename TTTensor<Scalar>::Matrix& M, Eigen::Index r_prev,
    Eigen::Index d) {
    typename TTTensor<Scalar>::Core c;
    c.slices.assign(d, TTTensor<Scalar>::Matrix::Zero(r_prev, M.cols()));
    for (Eigen::Index q = 0; q < r_prev; ++q)
        for (Eigen::Index j = 0; j < d; ++j)
            c.slices[j].row(q) = M.row(q * d + j);
    return c;
}

/// Right unfolding: r_prev x (d * r_next), column index j * r_next + s.
template <typename Scalar>
typename TTTensor<Scalar>::Matrix right_unfold(
    const typename TTTensor<Scalar>::Core& c) {
    typename TTTensor<Scalar>::Matrix M(c.left_rank(), c.dim() * c.right_rank());
    for (Eigen::Index j = 0; j < c.dim(); ++j)
        M.middleCols(j * c.right_rank(), c.right_rank()) = c.slices[j];
    return M;
}

template <typename Scalar>
typename TTTensor<Scalar>::Core right_fold(
    const typename TTTensor<Scalar>::Matrix& M, Eigen::Index d,
    Eigen::Index r_next) {
    typename TTTensor<Scalar>::Core c;
    c.slices.reserve(d);
    for (Eigen::Index j = 0; j < d; ++j)
        c.slices.push_back(M.middleCols(j * r_next, r_next));
    return c;
}

/// Thin Householder QR with the gauge fixed to a non-negative diagonal of R.
template <typename Scalar>
void thin_qr(const typename TTTensor<Scalar>::Matrix& M,
             typename TTTensor<Scalar>::Matrix& Q,
             typename TTTensor<Scalar>::Matrix& R) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    const Eigen::Index r = std::min(M.rows(), M.cols());
    Eigen::HouseholderQR<Matrix> qr(M);
    Q = qr.householderQ() * Matrix::Identity(M.rows(), r);
    R = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < r; ++i) {
        if (R(i, i) < Scalar(0)) {
            R.row(i) = -R.row(i);
            Q.col(i) = -Q.col(i);
        }
    }
}

/// Left-orthogonalize core k in place, pushing the triangular factor into
/// core k+1.
template <typename Scalar>
void push_left_orthogonal(TTTensor<Scalar>& T, int k) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    auto& c = T.core(k);
    Matrix Q, R;
    thin_qr<Scalar>(left_unfold<Scalar>(c), Q, R);
    c = left_fold<Scalar>(Q, c.left_rank(), c.dim());
    for (auto& s : T.core(k + 1).slices) s = R * s;
}

/// Right-orthogonalize core k in place, pushing the factor into core k-1.
template <typename Scalar>
void push_right_orthogonal(TTTensor<Scalar>& T, int k) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    auto& c = T.core(k);
    Matrix Q, R;
    thin_qr<Scalar>(Matrix(right_unfold<Scalar>(c).transpose()), Q, R);
    c = right_fold<Scalar>(Matrix(Q.transpose()), c.dim(), c.right_rank());
    Matrix Rt = R.transpose();
    for (auto& s : T.core(k - 1).slices) s = s * Rt;
}

}  // namespace detail

/// Entry of a TT tensor (free-function spelling of Eq.-style evaluation).
template <typename Scalar>
Scalar tt_entry(const TTTensor<Scalar>& T, const Shape& index) {
    return T.entry(index);
}

/// TT-SVD: quasi-optimal sequential-SVD compression of a dense tensor,
/// truncating each sweep step at max_rank and rel_tol * sigma_1.
template <typename Scalar>
TTTensor<Scalar> tt_svd(const DenseTensor<Scalar>& T,
                        int max_rank = kUnboundedRank,
                        double rel_tol = kDefaultRelTol) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    using MatrixRM = typename DenseTensor<Scalar>::MatrixRM;
    const int p = T.order();
    if (p < 1) throw ArgumentError("tt_svd: tensor must have order >= 1");
    const Shape& shape = T.shape();

    if (p == 1) {
        typename TTTensor<Scalar>::Core c;
        c.slices.reserve(shape[0]);
        for (Eigen::Index j = 0; j < shape[0]; ++j) {
            Matrix s(1, 1);
            s(0, 0) = T.values()(j);
            c.slices.push_back(std::move(s));
        }
        return TTTensor<Scalar>({std::move(c)});
    }

    std::vector<typename TTTensor<Scalar>::Core> cores;
    cores.reserve(p);

    // Working matrix, kept row-major so regrouping indices is a remap.
    MatrixRM W = T.as_matrix(1);
    Eigen::Index r_prev = 1;
    for (int k = 0; k < p - 1; ++k) {
        SVDResult<Scalar> svd = truncated_svd<Scalar>(W, max_rank, rel_tol);
        if (svd.rank() == 0) return TTTensor<Scalar>::zeros(shape);
        const Eigen::Index r = svd.rank();
        cores.push_back(detail::left_fold<Scalar>(svd.left_vectors, r_prev, shape[k]));
        MatrixRM B = svd.singular_values.asDiagonal() * svd.right_vectors.transpose();
        if (k < p - 2) {
            const Eigen::Index d_next = shape[k + 1];
            W = Eigen::Map<const MatrixRM>(B.data(), r * d_next,
                                           B.cols() / d_next);
        } else {
            W = B;  // r x d_p
        }
        r_prev = r;
    }
    typename TTTensor<Scalar>::Core last;
    last.slices.reserve(shape[p - 1]);
    for (Eigen::Index j = 0; j < shape[p - 1]; ++j)
        last.slices.push_back(W.col(j));
    cores.push_back(std::move(last));
    return TTTensor<Scalar>(std::move(cores));
}

/// Materialize a TT tensor. Throws ResourceError beyond entry_cap.
template <typename Scalar>
DenseTensor<Scalar> tt_to_dense(const TTTensor<Scalar>& T,
                                Eigen::Index entry_cap = kDenseEntryCap) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    const Shape shape = T.shape();
    double total = 1.0;
    for (Eigen::Index d : shape) total *= static_cast<double>(d);
    if (total > static_cast<double>(entry_cap))
        throw ResourceError("tt_to_dense: dense form exceeds the entry cap");

    // B holds the partial contraction over the leading modes, one row per
    // lexicographic prefix index.
    Matrix B = Matrix::Ones(1, 1);
    for (int k = 0; k < T.order(); ++k) {
        const auto& c = T.core(k);
        Matrix next(B.rows() * c.dim(), c.right_rank());
        for (Eigen::Index j = 0; j < c.dim(); ++j) {
            Matrix block = B * c.slices[j];
            for (Eigen::Index i = 0; i < B.rows(); ++i)
                next.row(i * c.dim() + j) = block.row(i);
        }
        B = std::move(next);
    }
    return DenseTensor<Scalar>(shape, B.col(0));
}

/// Contract input vectors against the leading modes, left to right, in
/// O(sum_k r^2 d_k). With |xs| = order-1 the trailing (output) mode is left
/// open and its fiber is returned; with |xs| = order the result is a scalar
/// returned as a length-1 vector.
template <typename Scalar>
typename TTTensor<Scalar>::Vector tt_contract_sequence(
    const TTTensor<Scalar>& T,
    const std::vector<typename TTTensor<Scalar>::Vector>& xs) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    const int p = T.order();
    const int m = static_cast<int>(xs.size());
    if (m != p && m != p - 1)
        throw ArgumentError("tt_contract_sequence: need order or order-1 vectors");

    Matrix row = Matrix::Ones(1, 1);
    for (int k = 0; k < m; ++k) {
        const auto& c = T.core(k);
        if (xs[k].size() != c.dim())
            throw ArgumentError("tt_contract_sequence: vector length mismatch");
        Matrix S = Matrix::Zero(c.left_rank(), c.right_rank());
        for (Eigen::Index j = 0; j < c.dim(); ++j)
            S.noalias() += xs[k](j) * c.slices[j];
        row = row * S;
    }
    if (m == p) {
        typename TTTensor<Scalar>::Vector out(1);
        out(0) = row(0, 0);
        return out;
    }
    const auto& last = T.core(p - 1);
    typename TTTensor<Scalar>::Vector out(last.dim());
    for (Eigen::Index j = 0; j < last.dim(); ++j)
        out(j) = (row * last.slices[j])(0, 0);
    return out;
}

/// Orthogonalize around a pivot core (0-based): cores left of the pivot
/// become left-orthogonal, cores right of it right-orthogonal. The
/// represented tensor is unchanged.
template <typename Scalar>
TTTensor<Scalar> tt_orthogonalize(const TTTensor<Scalar>& T, int pivot) {
    if (pivot < 0 || pivot >= T.order())
        throw ArgumentError("tt_orthogonalize: pivot out of range");
    TTTensor<Scalar> out = T;
    for (int k = 0; k < pivot; ++k) detail::push_left_orthogonal(out, k);
    for (int k = T.order() - 1; k > pivot; --k)
        detail::push_right_orthogonal(out, k);
    return out;
}

/// Rank truncation: right-orthogonalize, then a left-to-right truncated-SVD
/// sweep. Quasi-optimal (error within sqrt(p-1) of the best per-sweep
/// truncation).
template <typename Scalar>
TTTensor<Scalar> tt_round(const TTTensor<Scalar>& T, int max_rank,
                          double rel_tol = kDefaultRelTol) {
    if (max_rank != kUnboundedRank && max_rank < 1)
        throw ArgumentError("tt_round: max_rank must be >= 1 or unbounded");
    TTTensor<Scalar> out = tt_orthogonalize(T, 0);
    for (int k = 0; k + 1 < out.order(); ++k) {
        auto& c = out.core(k);
        SVDResult<Scalar> svd =
            truncated_svd<Scalar>(detail::left_unfold<Scalar>(c), max_rank, rel_tol);
        if (svd.rank() == 0) return TTTensor<Scalar>::zeros(T.shape());
        c = detail::left_fold<Scalar>(svd.left_vectors, c.left_rank(), c.dim());
        typename TTTensor<Scalar>::Matrix carry =
            svd.singular_values.asDiagonal() * svd.right_vectors.transpose();
        for (auto& s : out.core(k + 1).slices) s = carry * s;
    }
    return out;
}

/// Change of basis: for invertible M and a TT whose internal bonds all have
/// dimension n, transforms the cores (first by M^{-1} on the right, inner by
/// M on the left and M^{-1} on the right, last by M on the left) while
/// leaving every entry unchanged.
template <typename Scalar>
TTTensor<Scalar> tt_change_of_basis(
    const TTTensor<Scalar>& T,
    const Eigen::Ref<const typename TTTensor<Scalar>::Matrix>& M) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    if (M.rows() != M.cols())
        throw ShapeError("tt_change_of_basis: M must be square");
    for (Eigen::Index r : T.ranks())
        if (r != M.rows())
            throw ShapeError("tt_change_of_basis: bond dimensions must equal n");

    SVDResult<Scalar> svd = truncated_svd<Scalar>(M, kUnboundedRank, 0.0);
    if (svd.rank() < M.rows() ||
        svd.singular_values(0) >=
            1e12 * svd.singular_values(svd.rank() - 1))
        throw NumericError("tt_change_of_basis: M is singular or near-singular");
    Matrix Minv = Eigen::FullPivLU<Matrix>(M).inverse();

    TTTensor<Scalar> out = T;
    const int p = out.order();
    for (auto& s : out.core(0).slices) s = s * Minv;
    for (int k = 1; k + 1 < p; ++k)
        for (auto& s : out.core(k).slices) s = M * s * Minv;
    for (auto& s : out.core(p - 1).slices) s = M * s;
    return out;
}

/// Frobenius inner product of two TT tensors with identical shapes.
template <typename Scalar>
Scalar tt_dot(const TTTensor<Scalar>& A, const TTTensor<Scalar>& B) {
    using Matrix = typename TTTensor<Scalar>::Matrix;
    if (A.shape() != B.shape()) throw ShapeError("tt_dot: shape mismatch");
    Matrix M = Matrix::Ones(1, 1);
    for (int k = 0; k < A.order(); ++k) {
        const auto& ca = A.core(k);
        const auto& cb = B.core(k);
        Matrix next = Matrix::Zero(ca.right_rank(), cb.right_rank());
        for (Eigen::Index j = 0; j < ca.dim(); ++j)
            next.noalias() += ca.slices[j].transpose() * M * cb.slices[j];
        M = std::move(next);
    }
    return M(0, 0);
}

template <typename Scalar>
Scalar tt_norm(const TTTensor<Scalar>& A) {
    return std::sqrt(std::max(Scalar(0), tt_dot(A, A)));
}

/// Two-sided factorization of a TT tensor around a bond: the first `split`
/// cores left-orthogonalized, the remaining cores right-orthogonalized, and
/// the gauge absorbed into a small boundary matrix between them. Recombining
/// prefix * boundary * suffix reproduces the tensor. Pseudo-inverting either
/// side then reduces to inverting the boundary (a small dense problem) plus
/// TT contractions.
template <typename Scalar = double>
struct TTSplit {
    using Matrix = typename TTTensor<Scalar>::Matrix;

    std::vector<typename TTTensor<Scalar>::Core> prefix_cores;
    std::vector<typename TTTensor<Scalar>::Core> suffix_cores;
    Matrix boundary;
    bool prefix_left_orthogonal = true;
    bool suffix_right_orthogonal = true;

    /// Numerical rank of the boundary; equals the rank of the grouped
    /// matricization across the split because both sides are orthogonal.
    int effective_rank(double rel_tol = kDefaultRelTol) const {
        return numerical_rank<Scalar>(boundary, rel_tol);
    }

    /// Rebuild the full TT tensor (test oracle).
    TTTensor<Scalar> recombine() const {
        std::vector<typename TTTensor<Scalar>::Core> cores = prefix_cores;
        auto suffix = suffix_cores;
        for (auto& s : suffix.front().slices) s = boundary * s;
        for (auto& c : suffix) cores.push_back(std::move(c));
        return TTTensor<Scalar>(std::move(cores));
    }
};

template <typename Scalar>
TTSplit<Scalar> tt_split_factorize(const TTTensor<Scalar>& H, int split) {
    if (split < 1 || split >= H.order())
        throw ArgumentError("tt_split_factorize: split must be in [1, order)");
    TTTensor<Scalar> work = H;
    for (int k = 0; k < split; ++k) detail::push_left_orthogonal(work, k);
    // After the left sweep the carry sits in core `split`; sweep the suffix
    // right-orthogonal, stopping short of the prefix.
    for (int k = work.order() - 1; k > split; --k)
        detail::push_right_orthogonal(work, k);

    // Peel the boundary off core `split` without touching the prefix.
    using Matrix = typename TTTensor<Scalar>::Matrix;
    auto& c = work.core(split);
    Matrix Q, R;
    detail::thin_qr<Scalar>(Matrix(detail::right_unfold<Scalar>(c).transpose()),
                            Q, R);
    c = detail::right_fold<Scalar>(Matrix(Q.transpose()), c.dim(),
                                   c.right_rank());

    TTSplit<Scalar> out;
    out.boundary = R.transpose();
    for (int k = 0; k < split; ++k)
        out.prefix_cores.push_back(std::move(work.core(k)));
    for (int k = split; k < work.order(); ++k)
        out.suffix_cores.push_back(std::move(work.core(k)));
    return out;
}

}  // namespace ttsl
