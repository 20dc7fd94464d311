#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace ttsl {

/// Deterministic random stream. All randomness in the project flows through
/// this class so that results are reproducible across platforms: gaussians
/// are produced by Box-Muller on top of mt19937_64 rather than relying on
/// the (implementation-defined) std::normal_distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Named substream: mixes a tag into the seed so that e.g. data
    /// generation and core initialization can be varied independently.
    static Rng substream(std::uint64_t seed, std::string_view tag) {
        // FNV-1a over the tag, folded into the seed.
        std::uint64_t h = 14695981039346656037ull;
        for (char c : tag) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return Rng(seed ^ h);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return std::ldexp(static_cast<double>(gen_() >> 11), -53);
    }

    /// Uniform integer in [lo, hi] (inclusive).
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(gen_() % span);
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    Eigen::VectorXd gaussian_vector(Eigen::Index n, double stddev = 1.0) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = stddev * gaussian();
        return v;
    }

    Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                    double stddev = 1.0) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stddev * gaussian();
        return m;
    }

    /// Fisher-Yates permutation of {0, ..., n-1}.
    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(0, i)]);
        return p;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace ttsl
