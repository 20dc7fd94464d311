#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "ttsl/dense_tensor.hpp"

using namespace ttsl;
using namespace ttsl::testing;

TEST_CASE("flattening is bijective and row-major") {
    Shape shape{2, 3, 4};
    Rng rng(7);
    DenseTensor<double> T = random_dense(rng, shape);
    for_each_index(shape, [&](const Shape& idx) {
        CHECK(T(idx) == T.values()(ref_flat(shape, idx)));
    });
    CHECK(T.size() == 24);
    CHECK_THROWS_AS(DenseTensor<double>({2, 3}, Eigen::VectorXd::Zero(5)),
                    ShapeError);
}

TEST_CASE("reshape_group keeps the buffer, regroups the shape") {
    Rng rng(11);
    DenseTensor<double> T = random_dense(rng, {2, 3, 4, 5, 6});

    SUBCASE("2x3x4x5x6 grouped (2,1,2) becomes 6x4x30") {
        auto R = reshape_group(T, {2, 1, 2});
        CHECK(R.shape() == Shape{6, 4, 30});
        CHECK(R.values() == T.values());
    }
    SUBCASE("grouping all modes vectorizes") {
        auto R = reshape_group(T, {5});
        CHECK(R.shape() == Shape{720});
    }
    SUBCASE("groups (1, p-1) is the mode-1 matricization") {
        auto R = reshape_group(T, {1, 4});
        CHECK(R.shape() == Shape{2, 360});
        auto M = T.as_matrix(1);
        CHECK(M.rows() == 2);
        CHECK(M.cols() == 360);
        CHECK(M(1, 17) == R({1, 17}));
    }
    SUBCASE("group sum mismatch throws") {
        CHECK_THROWS_AS(reshape_group(T, {2, 2}), ShapeError);
    }
    SUBCASE("inverse regrouping restores the values for all shapes") {
        auto R = reshape_group(T, {1, 2, 2});
        DenseTensor<double> back(T.shape(), R.values());
        CHECK(max_abs_diff(back, T) == 0.0);
    }
}

TEST_CASE("mode_product matches the naive entrywise definition") {
    Rng rng(13);
    Shape shape{3, 4, 2};
    DenseTensor<double> T = random_dense(rng, shape);

    for (int mode = 0; mode < 3; ++mode) {
        Eigen::MatrixXd M = rng.gaussian_matrix(5, shape[mode]);
        DenseTensor<double> Y = mode_product(T, M, mode);
        Shape out_shape = shape;
        out_shape[mode] = 5;
        CHECK(Y.shape() == out_shape);

        // Naive oracle: loop the defining sum for every output entry.
        for_each_index(out_shape, [&](const Shape& idx) {
            double acc = 0.0;
            Shape src = idx;
            for (Eigen::Index j = 0; j < shape[mode]; ++j) {
                src[mode] = j;
                acc += M(idx[mode], j) * T(src);
            }
            CHECK(Y(idx) == doctest::Approx(acc).epsilon(1e-12));
        });
    }
}

TEST_CASE("mode_product identity and composition") {
    Rng rng(17);
    DenseTensor<double> T = random_dense(rng, {2, 2, 2});
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    CHECK(max_abs_diff(mode_product(T, I, 1), T) == 0.0);

    // (T x_n A) x_n B = T x_n (BA), compared by evaluating both orders.
    Eigen::MatrixXd A = rng.gaussian_matrix(2, 2);
    Eigen::MatrixXd B = rng.gaussian_matrix(3, 2);
    for (int mode = 0; mode < 3; ++mode) {
        auto lhs = mode_product(mode_product(T, A, mode), B, mode);
        auto rhs = mode_product(T, Eigen::MatrixXd(B * A), mode);
        CHECK(max_abs_diff(lhs, rhs) < 1e-10);
    }

    CHECK_THROWS_AS(mode_product(T, rng.gaussian_matrix(2, 3), 0), ShapeError);
}

TEST_CASE("mode_vector_product squeezes the contracted mode") {
    Rng rng(19);
    DenseTensor<double> T = random_dense(rng, {2, 3, 4});
    Eigen::VectorXd v = rng.gaussian_vector(3);
    auto R = mode_vector_product(T, v, 1);
    CHECK(R.shape() == Shape{2, 4});
    auto full = mode_product(T, Eigen::MatrixXd(v.transpose()), 1);
    CHECK(R.values() == full.values());
}

TEST_CASE("kron_chain ordering matches the flattening convention") {
    SUBCASE("canonical basis vectors index lexicographically") {
        Eigen::VectorXd e2 = Eigen::VectorXd::Zero(4);
        e2(1) = 1.0;  // e_2 in 1-based terms
        Eigen::VectorXd e3 = Eigen::VectorXd::Zero(4);
        e3(2) = 1.0;
        Eigen::VectorXd k = kron_chain<double>({e2, e3});
        CHECK(k.size() == 16);
        for (Eigen::Index i = 0; i < 16; ++i)
            CHECK(k(i) == (i == 1 * 4 + 2 ? 1.0 : 0.0));
    }
    SUBCASE("single vector is returned unchanged") {
        Eigen::VectorXd v(3);
        v << 1, 2, 3;
        CHECK(kron_chain<double>({v}) == v);
    }
    SUBCASE("((1,2),(3,4)) -> (3,4,6,8)") {
        Eigen::VectorXd a(2), b(2), want(4);
        a << 1, 2;
        b << 3, 4;
        want << 3, 4, 6, 8;
        CHECK(kron_chain<double>({a, b}) == want);
    }
    SUBCASE("empty list throws") {
        CHECK_THROWS_AS(kron_chain<double>({}), ArgumentError);
    }
}

TEST_CASE("property: kron of basis vectors hits the flattened multi-index") {
    Rng rng(23);
    Shape shape{3, 2, 4};
    for (int trial = 0; trial < 20; ++trial) {
        Shape idx;
        std::vector<Eigen::VectorXd> es;
        for (Eigen::Index d : shape) {
            int i = rng.uniform_int(0, static_cast<int>(d) - 1);
            idx.push_back(i);
            Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
            e(i) = 1.0;
            es.push_back(std::move(e));
        }
        Eigen::VectorXd k = kron_chain<double>(es);
        Eigen::Index hot = 0;
        for (Eigen::Index i = 0; i < k.size(); ++i)
            if (k(i) != 0.0) hot = i;
        CHECK(hot == ref_flat(shape, idx));
    }
}
