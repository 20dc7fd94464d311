#include "ttsl/models.hpp"

#include <algorithm>
#include <set>

namespace ttsl {

int VvWFA::symbol_index(const std::string& symbol) const {
    auto it = std::find(alphabet.begin(), alphabet.end(), symbol);
    if (it == alphabet.end())
        throw ArgumentError("VvWFA: unknown symbol '" + symbol + "'");
    return static_cast<int>(it - alphabet.begin());
}

void VvWFA::validate() const {
    const Eigen::Index n = num_states();
    if (alphabet.size() != transitions.size())
        throw ShapeError("VvWFA: alphabet/transition count mismatch");
    std::set<std::string> seen(alphabet.begin(), alphabet.end());
    if (seen.size() != alphabet.size())
        throw ArgumentError("VvWFA: duplicate alphabet symbols");
    for (const auto& A : transitions)
        if (A.rows() != n || A.cols() != n)
            throw ShapeError("VvWFA: transition matrix dimension mismatch");
    if (omega.cols() != n) throw ShapeError("VvWFA: omega column mismatch");
}

void Linear2RNN::validate() const {
    const Eigen::Index n = num_states();
    if (transition.empty()) throw ShapeError("Linear2RNN: empty transition");
    for (const auto& A : transition)
        if (A.rows() != n || A.cols() != n)
            throw ShapeError("Linear2RNN: transition slice dimension mismatch");
    if (omega.cols() != n) throw ShapeError("Linear2RNN: omega column mismatch");
}

Linear2RNN zero_2rnn(Eigen::Index d, Eigen::Index p) {
    Linear2RNN m;
    m.h0 = Eigen::VectorXd::Zero(1);
    m.transition.assign(d, Eigen::MatrixXd::Zero(1, 1));
    m.omega = Eigen::MatrixXd::Zero(p, 1);
    return m;
}

bool is_zero_model(const Linear2RNN& model, double tol) {
    auto small = [tol](const Eigen::MatrixXd& M) {
        return M.cwiseAbs().maxCoeff() <= tol;
    };
    if (model.h0.size() == 0) return true;
    if (!small(model.omega)) return false;
    if (!small(model.h0)) return false;
    for (const auto& A : model.transition)
        if (!small(A)) return false;
    return true;
}

Eigen::VectorXd wfa_evaluate(const VvWFA& A, const std::vector<int>& word) {
    Eigen::VectorXd state = A.alpha;
    for (int sigma : word) {
        if (sigma < 0 || sigma >= A.num_symbols())
            throw ArgumentError("wfa_evaluate: symbol index out of range");
        state = A.transitions[sigma].transpose() * state;
    }
    return A.omega * state;
}

Eigen::VectorXd wfa_evaluate(const VvWFA& A,
                             const std::vector<std::string>& word) {
    std::vector<int> idx;
    idx.reserve(word.size());
    for (const auto& s : word) idx.push_back(A.symbol_index(s));
    return wfa_evaluate(A, idx);
}

RnnForwardResult rnn_forward(const Linear2RNN& R,
                             const std::vector<Eigen::VectorXd>& xs) {
    const Eigen::Index d = R.input_dim();
    RnnForwardResult out;
    out.states.reserve(xs.size() + 1);
    out.states.push_back(R.h0);
    Eigen::VectorXd h = R.h0;
    for (const auto& x : xs) {
        if (x.size() != d)
            throw ArgumentError("rnn_forward: input vector dimension mismatch");
        Eigen::VectorXd next = Eigen::VectorXd::Zero(h.size());
        for (Eigen::Index j = 0; j < d; ++j)
            if (x(j) != 0.0) next.noalias() += x(j) * (R.transition[j].transpose() * h);
        h = std::move(next);
        out.states.push_back(h);
    }
    out.output = R.omega * h;
    return out;
}

Linear2RNN wfa_to_2rnn(const VvWFA& A) {
    Linear2RNN R;
    R.h0 = A.alpha;
    R.transition = A.transitions;
    R.omega = A.omega;
    return R;
}

VvWFA rnn_to_wfa(const Linear2RNN& R, const std::vector<std::string>& alphabet) {
    if (static_cast<Eigen::Index>(alphabet.size()) != R.input_dim())
        throw ArgumentError("rnn_to_wfa: alphabet size must equal input dim");
    VvWFA A;
    A.alpha = R.h0;
    A.transitions = R.transition;
    A.omega = R.omega;
    A.alphabet = alphabet;
    A.validate();
    return A;
}

std::vector<Eigen::VectorXd> one_hot_sequence(const std::vector<int>& word,
                                              Eigen::Index d) {
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(word.size());
    for (int s : word) {
        if (s < 0 || s >= d) throw ArgumentError("one_hot_sequence: bad symbol");
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(s) = 1.0;
        xs.push_back(std::move(e));
    }
    return xs;
}

TTTensor<double> exact_hankel_tt(const Linear2RNN& model, int l) {
    if (l < 1) throw ArgumentError("exact_hankel: l must be >= 1");
    model.validate();
    const Eigen::Index n = model.num_states();
    const Eigen::Index d = model.input_dim();
    const Eigen::Index p = model.output_dim();

    using Core = TTTensor<double>::Core;
    std::vector<Core> cores;
    cores.reserve(l + 1);

    // First core: (A x._1 h0), slice j is the row vector h0^T A_j.
    Core first;
    first.slices.reserve(d);
    for (Eigen::Index j = 0; j < d; ++j)
        first.slices.push_back(model.h0.transpose() * model.transition[j]);
    cores.push_back(std::move(first));

    for (int k = 1; k < l; ++k) {
        Core mid;
        mid.slices = model.transition;
        cores.push_back(std::move(mid));
    }

    // Output core: Omega^T, slice m is column vector Omega_{m,:}^T.
    Core last;
    last.slices.reserve(p);
    for (Eigen::Index m = 0; m < p; ++m)
        last.slices.push_back(model.omega.row(m).transpose());
    cores.push_back(std::move(last));

    (void)n;
    return TTTensor<double>(std::move(cores));
}

TTTensor<double> exact_hankel_tt(const VvWFA& model, int l) {
    return exact_hankel_tt(wfa_to_2rnn(model), l);
}

DenseTensor<double> exact_hankel_dense(const Linear2RNN& model, int l,
                                       Eigen::Index entry_cap) {
    return tt_to_dense(exact_hankel_tt(model, l), entry_cap);
}

DenseTensor<double> exact_hankel_dense(const VvWFA& model, int l,
                                       Eigen::Index entry_cap) {
    return exact_hankel_dense(wfa_to_2rnn(model), l, entry_cap);
}

VvWFA augment_alphabet(const VvWFA& A, const std::string& pad_symbol) {
    if (std::find(A.alphabet.begin(), A.alphabet.end(), pad_symbol) !=
        A.alphabet.end())
        throw ArgumentError("augment_alphabet: pad symbol already in alphabet");
    VvWFA out = A;
    out.alphabet.push_back(pad_symbol);
    out.transitions.push_back(
        Eigen::MatrixXd::Identity(A.num_states(), A.num_states()));
    return out;
}

SequenceDataset pad_dataset(const SequenceDataset& data, int target_length) {
    data.validate();
    const Eigen::Index d = data.input_dim();
    SequenceDataset out;
    out.generator = data.generator;
    out.noise_std = data.noise_std;
    out.seed = data.seed;
    out.examples.reserve(data.examples.size());

    Eigen::VectorXd pad = Eigen::VectorXd::Zero(d + 1);
    pad(d) = 1.0;

    for (const auto& ex : data.examples) {
        if (static_cast<int>(ex.inputs.size()) > target_length)
            throw ArgumentError("pad_dataset: sequence longer than target");
        SequenceExample padded;
        padded.target = ex.target;
        const int missing = target_length - static_cast<int>(ex.inputs.size());
        for (int i = 0; i < missing; ++i) padded.inputs.push_back(pad);
        for (const auto& x : ex.inputs) {
            Eigen::VectorXd lifted = Eigen::VectorXd::Zero(d + 1);
            lifted.head(d) = x;
            padded.inputs.push_back(std::move(lifted));
        }
        out.examples.push_back(std::move(padded));
    }
    return out;
}

double transition_identity_deviation(const VvWFA& A, const std::string& symbol) {
    const int idx = A.symbol_index(symbol);
    return (A.transitions[idx] -
            Eigen::MatrixXd::Identity(A.num_states(), A.num_states()))
        .norm();
}

CompletenessResult completeness_check(const Linear2RNN& model, int l,
                                      double rel_tol) {
    TTTensor<double> H = exact_hankel_tt(model, 2 * l);
    TTSplit<double> split = tt_split_factorize(H, l);
    CompletenessResult out;
    out.rank = split.effective_rank(rel_tol);
    out.complete = (out.rank == static_cast<int>(model.num_states()));
    return out;
}

}  // namespace ttsl
