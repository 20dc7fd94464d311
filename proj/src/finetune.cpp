#include "ttsl/finetune.hpp"

#include <cmath>

#include "ttsl/rng.hpp"

namespace ttsl {

std::string to_string(Optimizer o) {
    return o == Optimizer::PlainSgd ? "plain_sgd" : "adaptive_moments";
}

Optimizer optimizer_from_string(const std::string& name) {
    if (name == "plain_sgd") return Optimizer::PlainSgd;
    if (name == "adaptive_moments") return Optimizer::AdaptiveMoments;
    throw ArgumentError("unknown optimizer '" + name + "'");
}

LossAndGrad loss_and_grad(const Linear2RNN& model,
                          const SequenceDataset& batch) {
    const Eigen::Index n = model.num_states();
    const Eigen::Index d = model.input_dim();

    LossAndGrad out;
    out.grad_h0 = Eigen::VectorXd::Zero(n);
    out.grad_transition.assign(d, Eigen::MatrixXd::Zero(n, n));
    out.grad_omega = Eigen::MatrixXd::Zero(model.output_dim(), n);

    const double scale = 1.0 / static_cast<double>(batch.examples.size());
    for (const auto& ex : batch.examples) {
        RnnForwardResult fwd = rnn_forward(model, ex.inputs);
        const Eigen::VectorXd residual = fwd.output - ex.target;
        out.loss += scale * residual.squaredNorm();

        const Eigen::VectorXd& h_final = fwd.states.back();
        out.grad_omega += (2.0 * scale) * residual * h_final.transpose();

        // lambda_t = d loss / d h_t, propagated backwards through the
        // bilinear update: h_t = sum_j x_t(j) A_j^T h_{t-1}.
        Eigen::VectorXd lambda = 2.0 * scale * model.omega.transpose() * residual;
        for (int t = static_cast<int>(ex.inputs.size()) - 1; t >= 0; --t) {
            const Eigen::VectorXd& h_prev = fwd.states[t];
            const Eigen::VectorXd& x = ex.inputs[t];
            Eigen::VectorXd lambda_prev = Eigen::VectorXd::Zero(n);
            for (Eigen::Index j = 0; j < d; ++j) {
                if (x(j) == 0.0) continue;
                out.grad_transition[j].noalias() +=
                    x(j) * h_prev * lambda.transpose();
                lambda_prev.noalias() += x(j) * (model.transition[j] * lambda);
            }
            lambda = std::move(lambda_prev);
        }
        out.grad_h0 += lambda;
    }
    return out;
}

namespace {

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;
    Eigen::VectorXd m_h0, v_h0;
    std::vector<Eigen::MatrixXd> m_tr, v_tr;
    Eigen::MatrixXd m_om, v_om;

    explicit AdamState(const Linear2RNN& model) {
        m_h0 = Eigen::VectorXd::Zero(model.h0.size());
        v_h0 = m_h0;
        m_tr.assign(model.transition.size(),
                    Eigen::MatrixXd::Zero(model.num_states(), model.num_states()));
        v_tr = m_tr;
        m_om = Eigen::MatrixXd::Zero(model.omega.rows(), model.omega.cols());
        v_om = m_om;
    }

    template <typename T>
    void update_one(T& param, const T& grad, T& m, T& v, double lr) {
        m = beta1 * m + (1.0 - beta1) * grad;
        v = (beta2 * v.array() + (1.0 - beta2) * grad.array().square()).matrix();
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        param.array() -=
            lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    }

    void apply(Linear2RNN& model, const LossAndGrad& g, double lr) {
        ++step;
        update_one(model.h0, g.grad_h0, m_h0, v_h0, lr);
        for (std::size_t j = 0; j < model.transition.size(); ++j)
            update_one(model.transition[j], g.grad_transition[j], m_tr[j],
                       v_tr[j], lr);
        update_one(model.omega, g.grad_omega, m_om, v_om, lr);
    }
};

void sgd_apply(Linear2RNN& model, const LossAndGrad& g, double lr) {
    model.h0 -= lr * g.grad_h0;
    for (std::size_t j = 0; j < model.transition.size(); ++j)
        model.transition[j] -= lr * g.grad_transition[j];
    model.omega -= lr * g.grad_omega;
}

double full_loss(const Linear2RNN& model, const SequenceDataset& data) {
    double acc = 0.0;
    for (const auto& ex : data.examples)
        acc += (rnn_forward(model, ex.inputs).output - ex.target).squaredNorm();
    return acc / static_cast<double>(data.examples.size());
}

}  // namespace

Linear2RNN finetune(const Linear2RNN& model, const SequenceDataset& data,
                    const FinetuneConfig& config, bool* reverted) {
    if (config.learning_rate <= 0.0)
        throw ArgumentError("finetune: learning_rate must be > 0");
    if (config.epochs < 1) throw ArgumentError("finetune: epochs must be >= 1");
    data.validate();
    if (data.examples.empty()) return model;
    if (reverted) *reverted = false;

    const Eigen::Index N = data.size();
    const Eigen::Index batch =
        (config.batch_size <= 0)
            ? N
            : std::min<Eigen::Index>(config.batch_size, N);

    Linear2RNN current = model;
    Linear2RNN best = model;
    double best_loss = full_loss(model, data);

    Rng shuffle_rng = Rng::substream(config.seed, "batching");
    AdamState adam(model);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<int> order = shuffle_rng.permutation(static_cast<int>(N));
        for (Eigen::Index start = 0; start < N; start += batch) {
            SequenceDataset slice;
            for (Eigen::Index i = start;
                 i < std::min<Eigen::Index>(start + batch, N); ++i)
                slice.examples.push_back(data.examples[order[i]]);
            LossAndGrad g = loss_and_grad(current, slice);
            if (!std::isfinite(g.loss)) {
                if (reverted) *reverted = true;
                return best;
            }
            if (config.optimizer == Optimizer::AdaptiveMoments)
                adam.apply(current, g, config.learning_rate);
            else
                sgd_apply(current, g, config.learning_rate);
        }
        const double loss = full_loss(current, data);
        if (!std::isfinite(loss)) {
            if (reverted) *reverted = true;
            return best;
        }
        if (loss < best_loss) {
            best_loss = loss;
            best = current;
        }
    }
    return best;
}

}  // namespace ttsl
