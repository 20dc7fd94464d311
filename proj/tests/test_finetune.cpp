#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "ttsl/finetune.hpp"

using namespace ttsl;
using namespace ttsl::testing;

namespace {

SequenceDataset model_data(const Linear2RNN& model, int length,
                           Eigen::Index N, Rng& rng, double noise = 0.0) {
    SequenceDataset data;
    for (Eigen::Index i = 0; i < N; ++i) {
        SequenceExample ex;
        for (int t = 0; t < length; ++t)
            ex.inputs.push_back(rng.gaussian_vector(model.input_dim()));
        ex.target = rnn_forward(model, ex.inputs).output +
                    noise * rng.gaussian_vector(model.output_dim());
        data.examples.push_back(std::move(ex));
    }
    return data;
}

double full_loss(const Linear2RNN& model, const SequenceDataset& data) {
    double acc = 0.0;
    for (const auto& ex : data.examples)
        acc += (rnn_forward(model, ex.inputs).output - ex.target).squaredNorm();
    return acc / static_cast<double>(data.examples.size());
}

}  // namespace

TEST_CASE("loss_and_grad") {
    Rng rng(3);
    SUBCASE("zero-loss batch has zero gradients") {
        Linear2RNN model = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data = model_data(model, 3, 5, rng);
        LossAndGrad g = loss_and_grad(model, data);
        CHECK(g.loss < 1e-24);
        CHECK(g.grad_h0.cwiseAbs().maxCoeff() < 1e-11);
        CHECK(g.grad_omega.cwiseAbs().maxCoeff() < 1e-11);
        for (const auto& G : g.grad_transition)
            CHECK(G.cwiseAbs().maxCoeff() < 1e-11);
    }
    SUBCASE("closed form for a single length-1 sequence") {
        Linear2RNN model = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data;
        SequenceExample ex;
        ex.inputs = {rng.gaussian_vector(2)};
        ex.target = rng.gaussian_vector(1);
        data.examples.push_back(ex);
        LossAndGrad g = loss_and_grad(model, data);
        auto fwd = rnn_forward(model, data.examples[0].inputs);
        Eigen::MatrixXd want = 2.0 * (fwd.output - ex.target) *
                               fwd.states.back().transpose();
        CHECK((g.grad_omega - want).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("gradients match central finite differences (20 instances)") {
        const double h = 1e-5;
        for (int trial = 0; trial < 20; ++trial) {
            Rng r(100 + trial);
            Linear2RNN model = random_2rnn(r, 2, 2, 1);
            SequenceDataset data = model_data(model, 3, 4, r, 0.3);
            LossAndGrad g = loss_and_grad(model, data);

            auto check_fd = [&](double got, double* param) {
                const double saved = *param;
                *param = saved + h;
                const double up = loss_and_grad(model, data).loss;
                *param = saved - h;
                const double down = loss_and_grad(model, data).loss;
                *param = saved;
                const double fd = (up - down) / (2.0 * h);
                CHECK(std::abs(got - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
            };
            for (Eigen::Index i = 0; i < model.h0.size(); ++i)
                check_fd(g.grad_h0(i), &model.h0(i));
            for (Eigen::Index j = 0; j < 2; ++j)
                for (Eigen::Index a = 0; a < 2; ++a)
                    for (Eigen::Index b = 0; b < 2; ++b)
                        check_fd(g.grad_transition[j](a, b),
                                 &model.transition[j](a, b));
            for (Eigen::Index a = 0; a < model.omega.rows(); ++a)
                for (Eigen::Index b = 0; b < model.omega.cols(); ++b)
                    check_fd(g.grad_omega(a, b), &model.omega(a, b));
        }
    }
}

TEST_CASE("finetune") {
    Rng rng(7);
    SUBCASE("vanishing learning rate leaves parameters unchanged") {
        Linear2RNN model = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data = model_data(model, 2, 10, rng, 0.5);
        FinetuneConfig cfg;
        cfg.learning_rate = 1e-300;
        cfg.epochs = 3;
        cfg.optimizer = Optimizer::PlainSgd;
        Linear2RNN out = finetune(model, data, cfg);
        CHECK((out.h0 - model.h0).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((out.omega - model.omega).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("best-iterate tracking never increases the training loss") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            Rng r(seed);
            Linear2RNN target = random_2rnn(r, 3, 2, 1);
            Linear2RNN start = random_2rnn(r, 3, 2, 1);
            SequenceDataset data = model_data(target, 3, 30, r, 0.1);
            FinetuneConfig cfg;
            cfg.learning_rate = 1e-2;  // deliberately aggressive
            cfg.epochs = 40;
            cfg.seed = seed;
            Linear2RNN out = finetune(start, data, cfg);
            CHECK(full_loss(out, data) <= full_loss(start, data) + 1e-12);
        }
    }
    SUBCASE("improves a perturbed model on its training data") {
        Linear2RNN target = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data = model_data(target, 3, 50, rng);
        Linear2RNN start = target;
        start.h0 += 0.1 * rng.gaussian_vector(2);
        start.omega += 0.1 * rng.gaussian_matrix(1, 2);
        FinetuneConfig cfg;
        cfg.learning_rate = 1e-3;
        cfg.epochs = 150;
        cfg.seed = 9;
        Linear2RNN out = finetune(start, data, cfg);
        CHECK(full_loss(out, data) < 0.25 * full_loss(start, data));
    }
    SUBCASE("an already-exact model is not damaged") {
        Linear2RNN target = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data = model_data(target, 3, 40, rng);
        FinetuneConfig cfg;
        cfg.learning_rate = 1e-3;
        cfg.epochs = 30;
        Linear2RNN out = finetune(target, data, cfg);
        CHECK(full_loss(out, data) <= 1e-8);
    }
    SUBCASE("deterministic per seed") {
        Linear2RNN target = random_2rnn(rng, 2, 2, 1);
        Linear2RNN start = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data = model_data(target, 2, 20, rng, 0.2);
        FinetuneConfig cfg;
        cfg.learning_rate = 1e-3;
        cfg.epochs = 10;
        cfg.seed = 21;
        Linear2RNN a = finetune(start, data, cfg);
        Linear2RNN b = finetune(start, data, cfg);
        CHECK(a.h0 == b.h0);
        CHECK(a.omega == b.omega);
        for (int j = 0; j < 2; ++j) CHECK(a.transition[j] == b.transition[j]);
    }
    SUBCASE("invalid config throws") {
        Linear2RNN model = random_2rnn(rng, 2, 2, 1);
        SequenceDataset data = model_data(model, 2, 4, rng);
        FinetuneConfig cfg;
        cfg.learning_rate = 0.0;
        CHECK_THROWS_AS(finetune(model, data, cfg), ArgumentError);
    }
}
