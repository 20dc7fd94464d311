#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "ttsl/spectral.hpp"

using namespace ttsl;
using namespace ttsl::testing;

namespace {

struct HankelTriple {
    DenseTensor<double> dense_L, dense_2L, dense_2L1;
    TTTensor<double> tt_L, tt_2L, tt_2L1;
};

HankelTriple exact_hankels(const Linear2RNN& model, int L) {
    HankelTriple h{exact_hankel_dense(model, L),
                   exact_hankel_dense(model, 2 * L),
                   exact_hankel_dense(model, 2 * L + 1),
                   exact_hankel_tt(model, L),
                   exact_hankel_tt(model, 2 * L),
                   exact_hankel_tt(model, 2 * L + 1)};
    return h;
}

double function_mse(const Linear2RNN& a, const Linear2RNN& b, Rng& rng,
                    int num_seqs, int length) {
    double acc = 0.0;
    Eigen::Index count = 0;
    for (int t = 0; t < num_seqs; ++t) {
        std::vector<Eigen::VectorXd> xs;
        for (int i = 0; i < length; ++i)
            xs.push_back(rng.gaussian_vector(a.input_dim()));
        Eigen::VectorXd da =
            rnn_forward(a, xs).output - rnn_forward(b, xs).output;
        acc += da.squaredNorm();
        count += da.size();
    }
    return acc / static_cast<double>(count);
}

}  // namespace

TEST_CASE("spectral_learn_dense") {
    SUBCASE("zero Hankels give the zero model") {
        SpectralConfig cfg;
        cfg.L = 1;
        SpectralDiagnostics diag;
        Linear2RNN m = spectral_learn_dense(
            DenseTensor<double>::zeros({2, 1}), DenseTensor<double>::zeros({2, 2, 1}),
            DenseTensor<double>::zeros({2, 2, 2, 1}), cfg, &diag);
        CHECK(is_zero_model(m));
        CHECK(diag.zero_model);
        CHECK(diag.effective_rank == 0);
    }
    SUBCASE("recovers a 5-state generator from exact Hankels (paper dims)") {
        Rng rng(3);
        Linear2RNN target = random_2rnn(rng, 5, 3, 2, 0.2);
        HankelTriple h = exact_hankels(target, 2);
        SpectralConfig cfg;
        cfg.L = 2;
        SpectralDiagnostics diag;
        Linear2RNN learned =
            spectral_learn_dense(h.dense_L, h.dense_2L, h.dense_2L1, cfg, &diag);
        CHECK(diag.effective_rank == 5);
        CHECK(learned.num_states() == 5);
        CHECK(function_mse(target, learned, rng, 1000, 6) < 1e-8);
    }
    SUBCASE("parameters differ from the generator only by a change of basis") {
        // Function equality is the assertable invariant; raw parameters are
        // gauge-dependent, so check values rather than parameter closeness.
        Rng rng(5);
        Linear2RNN target = random_2rnn(rng, 3, 2, 1);
        HankelTriple h = exact_hankels(target, 2);
        SpectralConfig cfg;
        cfg.L = 2;
        Linear2RNN learned =
            spectral_learn_dense(h.dense_L, h.dense_2L, h.dense_2L1, cfg);
        bool params_equal = (learned.h0 - target.h0).cwiseAbs().maxCoeff() < 1e-12;
        CHECK_FALSE(params_equal);
        CHECK(function_mse(target, learned, rng, 200, 5) < 1e-10);
    }
    SUBCASE("requested rank above the effective rank is reduced, with warning") {
        Rng rng(7);
        Linear2RNN target = random_2rnn(rng, 2, 2, 1);
        HankelTriple h = exact_hankels(target, 2);
        SpectralConfig cfg;
        cfg.L = 2;
        cfg.rank = 5;
        SpectralDiagnostics diag;
        Linear2RNN learned =
            spectral_learn_dense(h.dense_L, h.dense_2L, h.dense_2L1, cfg, &diag);
        CHECK(diag.rank_reduced);
        CHECK(learned.num_states() == 2);
        CHECK(function_mse(target, learned, rng, 100, 4) < 1e-10);
    }
    SUBCASE("order mismatch throws") {
        SpectralConfig cfg;
        cfg.L = 2;
        CHECK_THROWS_AS(
            spectral_learn_dense(DenseTensor<double>::zeros({2, 1}),
                                 DenseTensor<double>::zeros({2, 2, 1}),
                                 DenseTensor<double>::zeros({2, 2, 2, 1}), cfg),
            ShapeError);
    }
}

TEST_CASE("spectral_learn_tt") {
    SUBCASE("matches the dense path on all words for a 3-state automaton") {
        Rng rng(11);
        VvWFA wfa = random_wfa(rng, 3, 2);
        Linear2RNN target = wfa_to_2rnn(wfa);
        HankelTriple h = exact_hankels(target, 2);
        SpectralConfig cfg;
        cfg.L = 2;
        Linear2RNN dense_model =
            spectral_learn_dense(h.dense_L, h.dense_2L, h.dense_2L1, cfg);
        Linear2RNN tt_model = spectral_learn_tt(h.tt_L, h.tt_2L, h.tt_2L1, cfg);
        for (const auto& w : all_words(2, 6)) {
            Eigen::VectorXd a =
                rnn_forward(dense_model, one_hot_sequence(w, 2)).output;
            Eigen::VectorXd b =
                rnn_forward(tt_model, one_hot_sequence(w, 2)).output;
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("zero TT Hankels give the zero model") {
        SpectralConfig cfg;
        cfg.L = 1;
        Linear2RNN m = spectral_learn_tt(TTTensor<double>::zeros({2, 1}),
                                         TTTensor<double>::zeros({2, 2, 1}),
                                         TTTensor<double>::zeros({2, 2, 2, 1}), cfg);
        CHECK(is_zero_model(m));
    }
    SUBCASE("recovers the generator function (continuous inputs)") {
        Rng rng(13);
        Linear2RNN target = random_2rnn(rng, 4, 3, 2, 0.3);
        HankelTriple h = exact_hankels(target, 2);
        SpectralConfig cfg;
        cfg.L = 2;
        SpectralDiagnostics diag;
        Linear2RNN learned =
            spectral_learn_tt(h.tt_L, h.tt_2L, h.tt_2L1, cfg, &diag);
        CHECK(diag.effective_rank == 4);
        CHECK(function_mse(target, learned, rng, 500, 5) < 1e-8);
    }
    SUBCASE("runs at L = 8 where the dense matricization would be huge") {
        Rng rng(17);
        Linear2RNN target = random_2rnn(rng, 3, 5, 1, 0.3);
        const int L = 8;
        SpectralConfig cfg;
        cfg.L = L;
        Linear2RNN learned = spectral_learn_tt(exact_hankel_tt(target, L),
                                               exact_hankel_tt(target, 2 * L),
                                               exact_hankel_tt(target, 2 * L + 1),
                                               cfg);
        // 5^8 = 390625 rows would be needed densely; the TT path stays small.
        CHECK(function_mse(target, learned, rng, 50, 6) < 1e-6);
    }
}

TEST_CASE("estimate_rank") {
    Rng rng(19);
    SUBCASE("exact 5-state model Hankel has rank 5") {
        Linear2RNN target = random_2rnn(rng, 5, 3, 2, 0.2);
        CHECK(estimate_rank(exact_hankel_dense(target, 4), 2) == 5);
        CHECK(estimate_rank(exact_hankel_tt(target, 4), 2) == 5);
    }
    SUBCASE("zero Hankel has rank 0") {
        CHECK(estimate_rank(DenseTensor<double>::zeros({2, 2, 1}), 1) == 0);
        CHECK(estimate_rank(TTTensor<double>::zeros({2, 2, 1}), 1) == 0);
    }
    SUBCASE("aa-automaton at L = 1 has rank 1") {
        VvWFA A = make_aa_wfa();
        CHECK(estimate_rank(exact_hankel_dense(A, 2), 1) == 1);
        CHECK(estimate_rank(exact_hankel_tt(A, 2), 1) == 1);
    }
}

TEST_CASE("smoke: small Hankel perturbations produce small value changes") {
    Rng rng(23);
    Linear2RNN target = random_2rnn(rng, 3, 2, 1);
    HankelTriple h = exact_hankels(target, 2);
    SpectralConfig cfg;
    cfg.L = 2;
    cfg.rank = 3;
    Linear2RNN base =
        spectral_learn_dense(h.dense_L, h.dense_2L, h.dense_2L1, cfg);

    const double eta = 1e-7;
    DenseTensor<double> pL = h.dense_L;
    DenseTensor<double> p2L = h.dense_2L;
    DenseTensor<double> p2L1 = h.dense_2L1;
    pL.values() += eta * rng.gaussian_vector(pL.size());
    p2L.values() += eta * rng.gaussian_vector(p2L.size());
    p2L1.values() += eta * rng.gaussian_vector(p2L1.size());
    Linear2RNN perturbed = spectral_learn_dense(pL, p2L, p2L1, cfg);

    // Probe-set deviation should scale with the perturbation, not blow up.
    double dev = 0.0;
    for (const auto& w : all_words(2, 4)) {
        auto xs = one_hot_sequence(w, 2);
        dev = std::max(dev, (rnn_forward(base, xs).output -
                             rnn_forward(perturbed, xs).output)
                                .cwiseAbs()
                                .maxCoeff());
    }
    CHECK(dev < 1e-4);
}
