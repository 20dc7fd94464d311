#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ttsl/dataset.hpp"
#include "ttsl/dense_tensor.hpp"
#include "ttsl/linalg.hpp"
#include "ttsl/tensor_train.hpp"

namespace ttsl {

/// Vector-valued weighted finite automaton <alpha, {A^sigma}, Omega>:
/// initial weights, one transition matrix per alphabet symbol, output matrix.
/// Computes f(x) = Omega (A^{x_1} ... A^{x_k})^T alpha.
struct VvWFA {
    Eigen::VectorXd alpha;                    // n
    std::vector<Eigen::MatrixXd> transitions; // one n x n matrix per symbol
    Eigen::MatrixXd omega;                    // p x n
    std::vector<std::string> alphabet;

    Eigen::Index num_states() const { return alpha.size(); }
    Eigen::Index num_symbols() const {
        return static_cast<Eigen::Index>(transitions.size());
    }
    Eigen::Index output_dim() const { return omega.rows(); }

    int symbol_index(const std::string& symbol) const;
    void validate() const;
};

/// Linear second-order RNN (h0, A, Omega): bilinear state update
/// h_t = A x._1 h_{t-1} x._2 x_t with identity activations, output Omega h.
/// The transition tensor A (n x d x n) is stored as its d mode-2 slices
/// A_j = A[:, j, :], so that the update is h_t = sum_j (x_t)_j A_j^T h_{t-1}.
struct Linear2RNN {
    Eigen::VectorXd h0;                      // n
    std::vector<Eigen::MatrixXd> transition; // d slices, each n x n
    Eigen::MatrixXd omega;                   // p x n

    Eigen::Index num_states() const { return h0.size(); }
    Eigen::Index input_dim() const {
        return static_cast<Eigen::Index>(transition.size());
    }
    Eigen::Index output_dim() const { return omega.rows(); }

    void validate() const;
};

/// The zero function as a representable model (one state, all parameters 0).
Linear2RNN zero_2rnn(Eigen::Index d, Eigen::Index p);

bool is_zero_model(const Linear2RNN& model, double tol = 0.0);

struct RnnForwardResult {
    Eigen::VectorXd output;
    std::vector<Eigen::VectorXd> states;  // h_0, h_1, ..., h_k
};

Eigen::VectorXd wfa_evaluate(const VvWFA& A, const std::vector<int>& word);
Eigen::VectorXd wfa_evaluate(const VvWFA& A,
                             const std::vector<std::string>& word);

RnnForwardResult rnn_forward(const Linear2RNN& R,
                             const std::vector<Eigen::VectorXd>& xs);

/// The two models are one and the same on one-hot inputs; conversion is a
/// reinterpretation of the parameters.
Linear2RNN wfa_to_2rnn(const VvWFA& A);
VvWFA rnn_to_wfa(const Linear2RNN& R, const std::vector<std::string>& alphabet);

/// One-hot encoding of a word with respect to an alphabet of size d.
std::vector<Eigen::VectorXd> one_hot_sequence(const std::vector<int>& word,
                                              Eigen::Index d);

/// Exact Hankel tensor H^(l) of the model, of order l+1 with the output mode
/// last: H[i_1,...,i_l,:] = f(e_{i_1},...,e_{i_l}). Built directly from the
/// model parameters as a tensor train with every bond dimension <= n.
TTTensor<double> exact_hankel_tt(const Linear2RNN& model, int l);
TTTensor<double> exact_hankel_tt(const VvWFA& model, int l);

/// Dense counterpart; throws ResourceError beyond the entry cap.
DenseTensor<double> exact_hankel_dense(const Linear2RNN& model, int l,
                                       Eigen::Index entry_cap = kDenseEntryCap);
DenseTensor<double> exact_hankel_dense(const VvWFA& model, int l,
                                       Eigen::Index entry_cap = kDenseEntryCap);

/// Alphabet augmentation with an empty-string symbol whose transition is the
/// identity, so the augmented function ignores the new symbol.
VvWFA augment_alphabet(const VvWFA& A, const std::string& pad_symbol);

/// Pad every sequence shorter than target_length up to it by prepending the
/// reserved pad slot (a one-hot coordinate appended at position d).
SequenceDataset pad_dataset(const SequenceDataset& data, int target_length);

/// Frobenius distance of a symbol's transition matrix from the identity;
/// diagnostic for learned empty-symbol transitions.
double transition_identity_deviation(const VvWFA& A, const std::string& symbol);

struct CompletenessResult {
    int rank = 0;
    bool complete = false;
};

/// Numerical rank of <<H^(2l)>>_{l,l+1} against the model's state count.
CompletenessResult completeness_check(const Linear2RNN& model, int l,
                                      double rel_tol = kDefaultRelTol);

}  // namespace ttsl
