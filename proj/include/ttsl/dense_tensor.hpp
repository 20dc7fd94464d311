#pragma once

#include <Eigen/Core>
#include <numeric>
#include <type_traits>
#include <vector>

#include "ttsl/errors.hpp"

namespace ttsl {

using Shape = std::vector<Eigen::Index>;

inline Eigen::Index shape_size(const Shape& shape) {
    Eigen::Index n = 1;
    for (Eigen::Index d : shape) n *= d;
    return n;
}

/// Row-major strides: the first index varies slowest.
inline Shape row_major_strides(const Shape& shape) {
    Shape strides(shape.size());
    Eigen::Index s = 1;
    for (std::size_t k = shape.size(); k-- > 0;) {
        strides[k] = s;
        s *= shape[k];
    }
    return strides;
}

inline Eigen::Index flat_index(const Shape& shape, const Shape& index) {
    if (index.size() != shape.size())
        throw ArgumentError("flat_index: index order does not match tensor order");
    Eigen::Index flat = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (index[k] < 0 || index[k] >= shape[k])
            throw ArgumentError("flat_index: index out of bounds");
        flat = flat * shape[k] + index[k];
    }
    return flat;
}

/// Dense multidimensional array over a real scalar. Values are stored flat
/// in lexicographic order with the first index varying slowest (row-major);
/// every reshape that only regroups consecutive modes is therefore a
/// metadata operation on the same buffer.
template <typename Scalar = double>
class DenseTensor {
    static_assert(std::is_floating_point_v<Scalar>);

public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using MatrixRM =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    DenseTensor() = default;

    DenseTensor(Shape shape, Vector values)
        : shape_(std::move(shape)), values_(std::move(values)) {
        if (values_.size() != shape_size(shape_))
            throw ShapeError("DenseTensor: values length does not match shape");
        check_dims();
    }

    static DenseTensor zeros(Shape shape) {
        Vector v = Vector::Zero(shape_size(shape));
        return DenseTensor(std::move(shape), std::move(v));
    }

    int order() const { return static_cast<int>(shape_.size()); }
    const Shape& shape() const { return shape_; }
    Eigen::Index dim(int mode) const { return shape_.at(mode); }
    Eigen::Index size() const { return values_.size(); }

    const Vector& values() const { return values_; }
    Vector& values() { return values_; }

    Scalar operator()(const Shape& index) const {
        return values_(flat_index(shape_, index));
    }
    Scalar& operator()(const Shape& index) {
        return values_(flat_index(shape_, index));
    }

    /// View of the buffer as a (prod of first `split` dims) x (rest) matrix.
    /// Shares the flattening convention, so rows/cols are lexicographic in
    /// the grouped indices.
    Eigen::Map<const MatrixRM> as_matrix(int split) const {
        auto [rows, cols] = split_dims(split);
        return Eigen::Map<const MatrixRM>(values_.data(), rows, cols);
    }
    Eigen::Map<MatrixRM> as_matrix(int split) {
        auto [rows, cols] = split_dims(split);
        return Eigen::Map<MatrixRM>(values_.data(), rows, cols);
    }

private:
    std::pair<Eigen::Index, Eigen::Index> split_dims(int split) const {
        if (split < 0 || split > order())
            throw ArgumentError("as_matrix: split out of range");
        Eigen::Index rows = 1, cols = 1;
        for (int k = 0; k < split; ++k) rows *= shape_[k];
        for (int k = split; k < order(); ++k) cols *= shape_[k];
        return {rows, cols};
    }

    void check_dims() const {
        for (Eigen::Index d : shape_)
            if (d <= 0) throw ShapeError("DenseTensor: nonpositive dimension");
    }

    Shape shape_;
    Vector values_;
};

/// Regroup consecutive modes: groups must sum to the order of T. The values
/// buffer is untouched; only the shape changes.
template <typename Scalar>
DenseTensor<Scalar> reshape_group(const DenseTensor<Scalar>& T,
                                  const std::vector<int>& groups) {
    int total = 0;
    for (int g : groups) {
        if (g <= 0) throw ShapeError("reshape_group: nonpositive group");
        total += g;
    }
    if (total != T.order())
        throw ShapeError("reshape_group: groups do not sum to tensor order");
    Shape out;
    out.reserve(groups.size());
    int mode = 0;
    for (int g : groups) {
        Eigen::Index d = 1;
        for (int i = 0; i < g; ++i) d *= T.shape()[mode++];
        out.push_back(d);
    }
    return DenseTensor<Scalar>(std::move(out), T.values());
}

/// Mode-n matrix product: replaces mode `mode` (size d_n) by the row space
/// of M (m x d_n), satisfying Y_(n) = M T_(n).
template <typename Scalar>
DenseTensor<Scalar> mode_product(
    const DenseTensor<Scalar>& T,
    const Eigen::Ref<const typename DenseTensor<Scalar>::Matrix>& M, int mode) {
    if (mode < 0 || mode >= T.order())
        throw ArgumentError("mode_product: mode out of range");
    const Eigen::Index dn = T.shape()[mode];
    if (M.cols() != dn)
        throw ShapeError("mode_product: matrix columns do not match mode size");

    Eigen::Index outer = 1, inner = 1;
    for (int k = 0; k < mode; ++k) outer *= T.shape()[k];
    for (int k = mode + 1; k < T.order(); ++k) inner *= T.shape()[k];

    Shape out_shape = T.shape();
    out_shape[mode] = M.rows();
    DenseTensor<Scalar> out = DenseTensor<Scalar>::zeros(std::move(out_shape));

    using MatrixRM = typename DenseTensor<Scalar>::MatrixRM;
    for (Eigen::Index o = 0; o < outer; ++o) {
        Eigen::Map<const MatrixRM> src(T.values().data() + o * dn * inner, dn,
                                       inner);
        Eigen::Map<MatrixRM> dst(out.values().data() + o * M.rows() * inner,
                                 M.rows(), inner);
        dst = M * src;
    }
    return out;
}

/// Mode-n vector product T x_n v^T with the contracted mode squeezed out.
template <typename Scalar>
DenseTensor<Scalar> mode_vector_product(
    const DenseTensor<Scalar>& T,
    const Eigen::Ref<const typename DenseTensor<Scalar>::Vector>& v, int mode) {
    DenseTensor<Scalar> r = mode_product<Scalar>(T, v.transpose(), mode);
    Shape squeezed;
    for (int k = 0; k < r.order(); ++k)
        if (k != mode) squeezed.push_back(r.shape()[k]);
    if (squeezed.empty()) squeezed.push_back(1);
    return DenseTensor<Scalar>(std::move(squeezed), r.values());
}

/// Kronecker product of a chain of vectors, first factor varying slowest;
/// consistent with the DenseTensor flattening, so that
/// <<H>>_{l,1}^T kron_chain(x_1..x_l) = H x._1 x_1 ... x._l x_l.
template <typename Scalar>
typename DenseTensor<Scalar>::Vector kron_chain(
    const std::vector<typename DenseTensor<Scalar>::Vector>& vs) {
    if (vs.empty()) throw ArgumentError("kron_chain: empty vector list");
    typename DenseTensor<Scalar>::Vector out = vs[0];
    for (std::size_t k = 1; k < vs.size(); ++k) {
        typename DenseTensor<Scalar>::Vector next(out.size() * vs[k].size());
        for (Eigen::Index i = 0; i < out.size(); ++i)
            next.segment(i * vs[k].size(), vs[k].size()) = out(i) * vs[k];
        out = std::move(next);
    }
    return out;
}

using DenseTensorXd = DenseTensor<double>;

}  // namespace ttsl
