#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ttsl/dataset.hpp"
#include "ttsl/dense_tensor.hpp"
#include "ttsl/tensor_train.hpp"

namespace ttsl {

enum class RecoveryMethod { LeastSquares, NuclearNorm, IHT, TIHT, ALS, SGD };

std::string to_string(RecoveryMethod m);
RecoveryMethod recovery_method_from_string(const std::string& name);

struct RecoveryConfig {
    RecoveryMethod method = RecoveryMethod::LeastSquares;
    int rank = 5;
    double step = -1.0;      // < 0: use 1 / sigma_max(X)^2 (power iteration)
    double noise_tol = 0.0;  // nuclear-norm residual budget epsilon
    int max_iters = 10000;   // IHT/TIHT gradient iterations
    double conv_tol = 1e-8;
    int batch_size = 0;      // SGD; 0 = full batch
    std::uint64_t seed = 0;
    int als_max_sweeps = 200;
    int sgd_max_epochs = 500;
    double init_std = 0.1;   // TT core initialization
    // Optional shared stopping rule for the iterative methods: stop once the
    // relative training residual ||X <<H>> - Y|| / ||Y|| drops below this
    // (0 disables). Lets runtime comparisons equalize training accuracy.
    double target_residual = 0.0;
};

/// Input/output examples of a fixed length l viewed as linear measurements
/// of the Hankel tensor H^(l): y_i = <<H>>_{l,1}^T (x_1 (x) ... (x) x_l).
/// The design matrix X (one Kronecker row per example) is materialized only
/// on request; the TT methods work from the per-example factor vectors.
struct MeasurementSystem {
    int length = 0;
    Eigen::Index d = 0;
    Eigen::Index p = 0;
    bool materialized = false;

    Eigen::MatrixXd X;  // N x d^l, only when materialized
    Eigen::MatrixXd Y;  // N x p
    std::vector<std::vector<Eigen::VectorXd>> factors;  // per-example inputs

    Eigen::Index size() const { return Y.rows(); }
    Eigen::Index design_cols() const {
        Eigen::Index c = 1;
        for (int k = 0; k < length; ++k) c *= d;
        return c;
    }

    /// Shape of the Hankel tensor being estimated: (d, ..., d, p).
    Shape hankel_shape() const {
        Shape s(length, d);
        s.push_back(p);
        return s;
    }
};

MeasurementSystem build_measurements(const SequenceDataset& data,
                                     bool materialize,
                                     Eigen::Index entry_cap = kDenseEntryCap);

/// Minimum-Frobenius-norm solution of min ||X <<T>>_{l,1} - Y||_F^2.
DenseTensor<double> recover_least_squares(const MeasurementSystem& M);

/// Nuclear-norm surrogate: accelerated proximal gradient on
/// 0.5 ||X <<T>> - Y||^2 + lambda ||<<T>>_{ceil(l/2), .}||_*, with lambda
/// placed by bisection so the residual lands within [0.9 eps, 1.1 eps]
/// (continuation towards lambda -> 0 when eps = 0).
DenseTensor<double> recover_nuclear_norm(const MeasurementSystem& M,
                                         const RecoveryConfig& config,
                                         bool* converged = nullptr);

/// Iterative hard thresholding: gradient steps on the measurement residual,
/// projection by truncated SVD of the balanced matricization (IHT) or by
/// TT-SVD at the target rank (TIHT).
DenseTensor<double> recover_iht(const MeasurementSystem& M,
                                const RecoveryConfig& config);
DenseTensor<double> recover_tiht(const MeasurementSystem& M,
                                 const RecoveryConfig& config);

/// Alternating least squares over the TT cores of the Hankel tensor; each
/// core update solves its exact least-squares subproblem, so the objective
/// never increases. The d^l design is never materialized.
TTTensor<double> recover_tt_als(const MeasurementSystem& M,
                                const RecoveryConfig& config,
                                std::vector<double>* objective_trace = nullptr,
                                bool* rank_deficient = nullptr);

/// Core-wise gradient descent on the same parameterization, with optional
/// mini-batches.
TTTensor<double> recover_tt_sgd(const MeasurementSystem& M,
                                const RecoveryConfig& config);

/// Measurement objective ||X <<TT>>_{l,1} - Y||_F^2 evaluated by per-example
/// TT contraction, and its gradient with respect to one core. Exposed for
/// gradient checking.
double measurement_objective(const TTTensor<double>& H,
                             const MeasurementSystem& M);
TTTensor<double>::Core measurement_core_gradient(const TTTensor<double>& H,
                                                 const MeasurementSystem& M,
                                                 int core_index);

struct HankelEstimate {
    bool is_tt = false;
    DenseTensor<double> dense;
    TTTensor<double> tt;
    bool warning = false;
    std::string note;
};

/// Dispatch on config.method.
HankelEstimate recover_hankel(const MeasurementSystem& M,
                              const RecoveryConfig& config);

}  // namespace ttsl
