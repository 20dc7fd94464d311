#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ttsl/dataset.hpp"
#include "ttsl/models.hpp"

namespace ttsl {

enum class Optimizer { PlainSgd, AdaptiveMoments };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& name);

struct FinetuneConfig {
    double learning_rate = 1e-4;
    int epochs = 200;
    int batch_size = 32;
    Optimizer optimizer = Optimizer::AdaptiveMoments;
    std::uint64_t seed = 0;
};

struct LossAndGrad {
    double loss = 0.0;  // mean over the batch of ||f(seq) - y||^2
    Eigen::VectorXd grad_h0;
    std::vector<Eigen::MatrixXd> grad_transition;
    Eigen::MatrixXd grad_omega;
};

/// Mean squared error over final outputs and its gradient, computed by
/// reverse accumulation through h_t = A x._1 h_{t-1} x._2 x_t.
LossAndGrad loss_and_grad(const Linear2RNN& model,
                          const SequenceDataset& batch);

/// Mini-batch refinement with best-iterate tracking: the returned model's
/// training loss never exceeds the initial one. NaN losses revert to the
/// best iterate. Deterministic per seed and batch order.
Linear2RNN finetune(const Linear2RNN& model, const SequenceDataset& data,
                    const FinetuneConfig& config, bool* reverted = nullptr);

}  // namespace ttsl
