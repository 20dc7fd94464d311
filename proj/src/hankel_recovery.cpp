#include "ttsl/hankel_recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ttsl/linalg.hpp"
#include "ttsl/rng.hpp"

namespace ttsl {

using Matrix = Eigen::MatrixXd;
using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

std::string to_string(RecoveryMethod m) {
    switch (m) {
        case RecoveryMethod::LeastSquares: return "LeastSquares";
        case RecoveryMethod::NuclearNorm: return "NuclearNorm";
        case RecoveryMethod::IHT: return "IHT";
        case RecoveryMethod::TIHT: return "TIHT";
        case RecoveryMethod::ALS: return "ALS";
        case RecoveryMethod::SGD: return "SGD";
    }
    throw ArgumentError("unknown recovery method");
}

RecoveryMethod recovery_method_from_string(const std::string& name) {
    if (name == "LeastSquares") return RecoveryMethod::LeastSquares;
    if (name == "NuclearNorm") return RecoveryMethod::NuclearNorm;
    if (name == "IHT") return RecoveryMethod::IHT;
    if (name == "TIHT") return RecoveryMethod::TIHT;
    if (name == "ALS") return RecoveryMethod::ALS;
    if (name == "SGD") return RecoveryMethod::SGD;
    throw ArgumentError("unknown recovery method '" + name + "'");
}

MeasurementSystem build_measurements(const SequenceDataset& data,
                                     bool materialize,
                                     Eigen::Index entry_cap) {
    data.validate();
    if (data.examples.empty())
        throw ArgumentError("build_measurements: empty dataset");

    MeasurementSystem M;
    M.length = static_cast<int>(data.examples.front().inputs.size());
    if (M.length < 1)
        throw ArgumentError("build_measurements: sequences must be nonempty");
    M.d = data.input_dim();
    M.p = data.output_dim();

    const Eigen::Index N = data.size();
    M.Y.resize(N, M.p);
    M.factors.reserve(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const auto& ex = data.examples[i];
        if (static_cast<int>(ex.inputs.size()) != M.length)
            throw ArgumentError("build_measurements: mixed sequence lengths");
        M.Y.row(i) = ex.target.transpose();
        M.factors.push_back(ex.inputs);
    }

    if (materialize) {
        double cols = 1.0;
        for (int k = 0; k < M.length; ++k) cols *= static_cast<double>(M.d);
        if (cols * static_cast<double>(N) > static_cast<double>(entry_cap))
            throw ResourceError("build_measurements: design matrix exceeds cap");
        M.X.resize(N, static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < N; ++i)
            M.X.row(i) = kron_chain<double>(M.factors[i]).transpose();
        M.materialized = true;
    }
    return M;
}

namespace {

void require_materialized(const MeasurementSystem& M, const char* who) {
    if (!M.materialized)
        throw ArgumentError(std::string(who) + ": needs a materialized design");
}

/// Largest eigenvalue of X^T X by 20 power iterations from a fixed start.
double design_gram_norm(const Matrix& X) {
    Vector v = Vector::Ones(X.cols());
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 20; ++it) {
        Vector w = X.transpose() * (X * v);
        lambda = w.norm();
        if (lambda <= 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

double resolve_step(const MeasurementSystem& M, const RecoveryConfig& config) {
    if (config.step >= 0.0) return config.step;  // 0 is a documented no-op
    const double lambda = design_gram_norm(M.X);
    if (lambda <= 0.0) return 1.0;
    return 1.0 / lambda;
}

DenseTensor<double> tensor_from_unfolding(const MeasurementSystem& M,
                                          const MatrixRM& W) {
    return DenseTensor<double>(
        M.hankel_shape(),
        Eigen::Map<const Vector>(W.data(), W.size()));
}

/// Balanced matricization used by IHT and the nuclear norm: the first
/// ceil(l/2) input modes against the rest (remaining inputs plus output).
std::pair<Eigen::Index, Eigen::Index> balanced_split(
    const MeasurementSystem& M) {
    const int a = (M.length + 1) / 2;
    Eigen::Index rows = 1, cols = M.p;
    for (int k = 0; k < a; ++k) rows *= M.d;
    for (int k = a; k < M.length; ++k) cols *= M.d;
    return {rows, cols};
}

}  // namespace

DenseTensor<double> recover_least_squares(const MeasurementSystem& M) {
    require_materialized(M, "recover_least_squares");
    MatrixRM W = pinv<double>(M.X) * M.Y;
    return tensor_from_unfolding(M, W);
}

DenseTensor<double> recover_iht(const MeasurementSystem& M,
                                const RecoveryConfig& config) {
    require_materialized(M, "recover_iht");
    if (config.rank < 1) throw ArgumentError("recover_iht: rank must be >= 1");
    const double gamma = resolve_step(M, config);
    auto [rows, cols] = balanced_split(M);

    MatrixRM W = MatrixRM::Zero(M.design_cols(), M.p);
    const double res0 = M.Y.norm();
    for (int it = 0; it < config.max_iters; ++it) {
        Matrix R = M.Y - M.X * W;
        if (R.norm() > 10.0 * res0 + 1e-12)
            throw NumericError(
                "recover_iht: residual diverged; use a smaller step");
        if (config.target_residual > 0.0 &&
            R.norm() <= config.target_residual * std::max(res0, 1e-300))
            break;
        MatrixRM prev = W;
        W += gamma * (M.X.transpose() * R);
        if (gamma > 0.0) {
            Eigen::Map<MatrixRM> proj(W.data(), rows, cols);
            auto svd = truncated_svd<double>(proj, config.rank, 0.0);
            proj = svd.left_vectors * svd.singular_values.asDiagonal() *
                   svd.right_vectors.transpose();
        }
        const double denom = std::max(prev.norm(), 1e-300);
        if ((W - prev).norm() / denom < config.conv_tol) break;
    }
    return tensor_from_unfolding(M, W);
}

DenseTensor<double> recover_tiht(const MeasurementSystem& M,
                                 const RecoveryConfig& config) {
    require_materialized(M, "recover_tiht");
    if (config.rank < 1) throw ArgumentError("recover_tiht: rank must be >= 1");
    const double gamma = resolve_step(M, config);

    MatrixRM W = MatrixRM::Zero(M.design_cols(), M.p);
    const double res0 = M.Y.norm();
    for (int it = 0; it < config.max_iters; ++it) {
        Matrix R = M.Y - M.X * W;
        if (R.norm() > 10.0 * res0 + 1e-12)
            throw NumericError(
                "recover_tiht: residual diverged; use a smaller step");
        if (config.target_residual > 0.0 &&
            R.norm() <= config.target_residual * std::max(res0, 1e-300))
            break;
        MatrixRM prev = W;
        W += gamma * (M.X.transpose() * R);
        if (gamma > 0.0) {
            DenseTensor<double> H(
                M.hankel_shape(), Eigen::Map<const Vector>(W.data(), W.size()));
            TTTensor<double> T = tt_svd(H, config.rank, 1e-14);
            DenseTensor<double> back = tt_to_dense(T);
            W = Eigen::Map<const MatrixRM>(back.values().data(),
                                           M.design_cols(), M.p);
        }
        const double denom = std::max(prev.norm(), 1e-300);
        if ((W - prev).norm() / denom < config.conv_tol) break;
    }
    return tensor_from_unfolding(M, W);
}

namespace {

/// Singular-value soft thresholding on the balanced matricization.
void soft_threshold(MatrixRM& W, Eigen::Index rows, Eigen::Index cols,
                    double threshold) {
    Eigen::Map<MatrixRM> proj(W.data(), rows, cols);
    Eigen::BDCSVD<Matrix> svd(proj,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sigma =
        (svd.singularValues().array() - threshold).cwiseMax(0.0).matrix();
    proj = svd.matrixU() * sigma.asDiagonal() * svd.matrixV().transpose();
}

double nuclear_norm_of(const MatrixRM& W, Eigen::Index rows,
                       Eigen::Index cols) {
    Eigen::Map<const MatrixRM> proj(W.data(), rows, cols);
    return Eigen::BDCSVD<Matrix>(proj).singularValues().sum();
}

struct FistaResult {
    MatrixRM W;
    double residual = 0.0;
};

/// Accelerated proximal gradient for
/// 0.5 ||X W - Y||_F^2 + lambda ||reshape(W)||_*.
FistaResult fista_nuclear(const MeasurementSystem& M, double lambda,
                          const MatrixRM& W0, double lipschitz,
                          int max_inner, double tol) {
    auto [rows, cols] = balanced_split(M);
    const double t = 1.0 / lipschitz;

    MatrixRM W = W0, Z = W0, W_prev = W0;
    double theta = 1.0;
    double obj_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_inner; ++it) {
        Matrix R = M.X * Z - M.Y;
        W = Z - t * (M.X.transpose() * R);
        soft_threshold(W, rows, cols, t * lambda);

        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        Z = W + ((theta - 1.0) / theta_next) * (W - W_prev);
        theta = theta_next;
        W_prev = W;

        if ((it + 1) % 10 == 0) {
            const double obj = 0.5 * (M.X * W - M.Y).squaredNorm() +
                               lambda * nuclear_norm_of(W, rows, cols);
            if (std::isfinite(obj_prev) &&
                std::abs(obj_prev - obj) <= tol * std::max(obj_prev, 1e-300))
                break;
            obj_prev = obj;
        }
    }
    FistaResult out;
    out.residual = (M.X * W - M.Y).norm();
    out.W = std::move(W);
    return out;
}

}  // namespace

DenseTensor<double> recover_nuclear_norm(const MeasurementSystem& M,
                                         const RecoveryConfig& config,
                                         bool* converged) {
    require_materialized(M, "recover_nuclear_norm");
    if (config.noise_tol < 0)
        throw ArgumentError("recover_nuclear_norm: noise_tol must be >= 0");
    if (converged) *converged = true;

    const double eps = config.noise_tol;
    const double normY = M.Y.norm();
    // The zero tensor is feasible with zero nuclear norm.
    if (normY <= eps || normY == 0.0)
        return DenseTensor<double>::zeros(M.hankel_shape());

    const double lipschitz = std::max(design_gram_norm(M.X), 1e-30);
    auto [rows, cols] = balanced_split(M);
    // Above lambda_zero the penalized solution collapses to zero.
    const double lambda_zero = std::max(
        nuclear_norm_of(MatrixRM(M.X.transpose() * M.Y), rows, cols), 1e-30);
    const int inner = std::max(200, config.max_iters / 20);
    const double tol = config.conv_tol;

    MatrixRM W = MatrixRM::Zero(M.design_cols(), M.p);

    if (eps == 0.0) {
        // Continuation toward the lambda -> 0 interpolation limit.
        double lambda = 0.1 * lambda_zero;
        FistaResult res;
        for (int stage = 0; stage < 24; ++stage) {
            res = fista_nuclear(M, lambda, W, lipschitz, inner, tol);
            W = res.W;
            if (res.residual <= 1e-10 * normY) break;
            lambda *= 0.25;
        }
        return tensor_from_unfolding(M, W);
    }

    // Residual is monotone increasing in lambda; bisect on a log scale to
    // land within [0.9 eps, 1.1 eps].
    if (1.1 * eps >= normY) {
        FistaResult res = fista_nuclear(M, lambda_zero, W, lipschitz, inner, tol);
        return tensor_from_unfolding(M, res.W);
    }
    double lo = 1e-10 * lambda_zero;
    double hi = lambda_zero;
    FistaResult at_lo = fista_nuclear(M, lo, W, lipschitz, inner, tol);
    if (at_lo.residual > 1.1 * eps) {
        // Even the near-interpolating solution cannot meet the budget.
        if (converged) *converged = false;
        return tensor_from_unfolding(M, at_lo.W);
    }
    if (at_lo.residual >= 0.9 * eps) return tensor_from_unfolding(M, at_lo.W);

    FistaResult best = at_lo;
    for (int it = 0; it < 60; ++it) {
        const double mid = std::sqrt(lo * hi);
        FistaResult res = fista_nuclear(M, mid, best.W, lipschitz, inner, tol);
        if (res.residual >= 0.9 * eps && res.residual <= 1.1 * eps) {
            return tensor_from_unfolding(M, res.W);
        }
        if (res.residual > 1.1 * eps)
            hi = mid;
        else {
            lo = mid;
            best = res;
        }
    }
    if (converged) *converged = false;
    return tensor_from_unfolding(M, best.W);
}

// ---------------------------------------------------------------------------
// TT-format recovery (ALS / SGD): the Hankel tensor is parameterized by its
// cores and never materialized.
// ---------------------------------------------------------------------------

namespace {

using Core = TTTensor<double>::Core;

/// Contract core k with one input vector: sum_j x(j) * slices[j].
Matrix contract_core(const Core& c, const Vector& x) {
    Matrix S = Matrix::Zero(c.left_rank(), c.right_rank());
    for (Eigen::Index j = 0; j < c.dim(); ++j)
        if (x(j) != 0.0) S.noalias() += x(j) * c.slices[j];
    return S;
}

/// Output core as a (rank x p) matrix.
Matrix output_core_matrix(const Core& c) {
    Matrix O(c.left_rank(), c.dim());
    for (Eigen::Index m = 0; m < c.dim(); ++m) O.col(m) = c.slices[m];
    return O;
}

void set_output_core(Core& c, const Matrix& O) {
    for (Eigen::Index m = 0; m < c.dim(); ++m) c.slices[m] = O.col(m);
}

TTTensor<double> init_tt_hankel(const MeasurementSystem& M, int rank,
                                double init_std, std::uint64_t seed) {
    Rng rng = Rng::substream(seed, "tt-init");
    std::vector<Core> cores;
    const int l = M.length;
    for (int k = 0; k <= l; ++k) {
        const Eigen::Index dim = (k < l) ? M.d : M.p;
        const Eigen::Index rl = (k == 0) ? 1 : rank;
        const Eigen::Index rr = (k == l) ? 1 : rank;
        Core c;
        for (Eigen::Index j = 0; j < dim; ++j)
            c.slices.push_back(rng.gaussian_matrix(rl, rr, init_std));
        cores.push_back(std::move(c));
    }
    return TTTensor<double>(std::move(cores));
}

Vector predict_example(const TTTensor<double>& H,
                       const std::vector<Vector>& factors) {
    return tt_contract_sequence(H, factors);
}

double objective_on(const TTTensor<double>& H, const MeasurementSystem& M,
                    const std::vector<int>& idx) {
    double obj = 0.0;
    for (int i : idx) {
        Vector r = predict_example(H, M.factors[i]) - M.Y.row(i).transpose();
        obj += r.squaredNorm();
    }
    return obj;
}

Core core_gradient_on(const TTTensor<double>& H, const MeasurementSystem& M,
                      int core_index, const std::vector<int>& idx) {
    const int l = M.length;
    if (core_index < 0 || core_index > l)
        throw ArgumentError("core gradient: core index out of range");
    const auto& c = H.core(core_index);
    Core grad;
    grad.slices.assign(c.dim(), Matrix::Zero(c.left_rank(), c.right_rank()));

    const Matrix O = output_core_matrix(H.core(l));
    for (int i : idx) {
        const auto& xs = M.factors[i];
        Matrix a = Matrix::Ones(1, 1);
        for (int k = 0; k < std::min(core_index, l); ++k)
            a = a * contract_core(H.core(k), xs[k]);
        Matrix B = O;  // suffix product down to core_index+1
        for (int k = l - 1; k > core_index; --k)
            B = contract_core(H.core(k), xs[k]) * B;

        if (core_index < l) {
            const Matrix S = contract_core(c, xs[core_index]);
            Vector yhat = (a * S * B).transpose();
            Vector r = yhat - M.Y.row(i).transpose();
            Vector br = B * r;  // rank x 1
            for (Eigen::Index j = 0; j < c.dim(); ++j) {
                const double xj = xs[core_index](j);
                if (xj != 0.0)
                    grad.slices[j].noalias() += 2.0 * xj * (a.transpose() * br.transpose());
            }
        } else {
            Vector yhat = (a * O).transpose();
            Vector r = yhat - M.Y.row(i).transpose();
            for (Eigen::Index m = 0; m < c.dim(); ++m)
                grad.slices[m].noalias() += 2.0 * r(m) * a.transpose();
        }
    }
    return grad;
}

std::vector<int> all_indices(const MeasurementSystem& M) {
    std::vector<int> idx(M.size());
    for (Eigen::Index i = 0; i < M.size(); ++i) idx[i] = static_cast<int>(i);
    return idx;
}

}  // namespace

double measurement_objective(const TTTensor<double>& H,
                             const MeasurementSystem& M) {
    return objective_on(H, M, all_indices(M));
}

TTTensor<double>::Core measurement_core_gradient(const TTTensor<double>& H,
                                                 const MeasurementSystem& M,
                                                 int core_index) {
    return core_gradient_on(H, M, core_index, all_indices(M));
}

TTTensor<double> recover_tt_als(const MeasurementSystem& M,
                                const RecoveryConfig& config,
                                std::vector<double>* objective_trace,
                                bool* rank_deficient) {
    if (config.rank < 1) throw ArgumentError("recover_tt_als: rank must be >= 1");
    if (rank_deficient) *rank_deficient = false;
    const int l = M.length;
    const Eigen::Index N = M.size();
    TTTensor<double> H = init_tt_hankel(M, config.rank, config.init_std,
                                        config.seed);

    double obj_prev = measurement_objective(H, M);
    if (objective_trace) objective_trace->push_back(obj_prev);

    for (int sweep = 0; sweep < config.als_max_sweeps; ++sweep) {
        const double sweep_start = obj_prev;

        // Suffix products per example with the sweep-start cores: suffix[i][k]
        // is the contraction of cores k+1..l (valid while we update cores
        // left to right).
        const Matrix O0 = output_core_matrix(H.core(l));
        std::vector<std::vector<Matrix>> suffix(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            suffix[i].assign(l, Matrix());
            Matrix B = O0;
            for (int k = l - 1; k >= 0; --k) {
                suffix[i][k] = B;
                if (k > 0) B = contract_core(H.core(k), M.factors[i][k]) * B;
            }
        }

        std::vector<Matrix> prefix(N, Matrix::Ones(1, 1));
        double obj = obj_prev;

        for (int k = 0; k <= l; ++k) {
            if (k < l) {
                const auto& c = H.core(k);
                const Eigen::Index rl = c.left_rank(), rr = c.right_rank();
                const Eigen::Index unknowns = rl * M.d * rr;
                Matrix D(N * M.p, unknowns);
                Vector y(N * M.p);
                for (Eigen::Index i = 0; i < N; ++i) {
                    const Vector& x = M.factors[i][k];
                    const Matrix& a = prefix[i];
                    const Matrix& B = suffix[i][k];
                    for (Eigen::Index m = 0; m < M.p; ++m) {
                        const Eigen::Index row = i * M.p + m;
                        y(row) = M.Y(i, m);
                        for (Eigen::Index q = 0; q < rl; ++q)
                            for (Eigen::Index j = 0; j < M.d; ++j)
                                for (Eigen::Index s = 0; s < rr; ++s)
                                    D(row, (q * M.d + j) * rr + s) =
                                        a(0, q) * x(j) * B(s, m);
                    }
                }
                Eigen::ColPivHouseholderQR<Matrix> qr(D);
                Vector w;
                if (qr.rank() < unknowns) {
                    if (rank_deficient) *rank_deficient = true;
                    w = Eigen::BDCSVD<Matrix>(
                            D, Eigen::ComputeThinU | Eigen::ComputeThinV)
                            .solve(y);
                } else {
                    w = qr.solve(y);
                }
                Core updated;
                updated.slices.assign(M.d, Matrix::Zero(rl, rr));
                for (Eigen::Index q = 0; q < rl; ++q)
                    for (Eigen::Index j = 0; j < M.d; ++j)
                        for (Eigen::Index s = 0; s < rr; ++s)
                            updated.slices[j](q, s) = w((q * M.d + j) * rr + s);
                H.core(k) = std::move(updated);
                obj = (D * w - y).squaredNorm();
                for (Eigen::Index i = 0; i < N; ++i)
                    prefix[i] = prefix[i] * contract_core(H.core(k), M.factors[i][k]);
            } else {
                // Output core: independent least squares per output column.
                Matrix G(N, H.core(l).left_rank());
                for (Eigen::Index i = 0; i < N; ++i) G.row(i) = prefix[i];
                Eigen::ColPivHouseholderQR<Matrix> qr(G);
                Matrix O(H.core(l).left_rank(), M.p);
                if (qr.rank() < G.cols()) {
                    if (rank_deficient) *rank_deficient = true;
                    O = Eigen::BDCSVD<Matrix>(
                            G, Eigen::ComputeThinU | Eigen::ComputeThinV)
                            .solve(M.Y);
                } else {
                    O = qr.solve(M.Y);
                }
                set_output_core(H.core(l), O);
                obj = (G * O - M.Y).squaredNorm();
            }
            if (objective_trace) objective_trace->push_back(obj);
        }

        obj_prev = obj;
        if (config.target_residual > 0.0 &&
            std::sqrt(obj) <=
                config.target_residual * std::max(M.Y.norm(), 1e-300))
            break;
        if (std::abs(sweep_start - obj) <=
                config.conv_tol * std::max(sweep_start, 1e-300) ||
            obj <= 1e-26)
            break;
    }
    return H;
}

TTTensor<double> recover_tt_sgd(const MeasurementSystem& M,
                                const RecoveryConfig& config) {
    if (config.rank < 1) throw ArgumentError("recover_tt_sgd: rank must be >= 1");
    if (config.step <= 0.0)
        throw ArgumentError("recover_tt_sgd: step must be > 0");
    const int l = M.length;
    const Eigen::Index N = M.size();
    TTTensor<double> H = init_tt_hankel(M, config.rank, config.init_std,
                                        config.seed);
    Rng batch_rng = Rng::substream(config.seed, "batching");
    const Eigen::Index batch =
        (config.batch_size <= 0)
            ? N
            : std::min<Eigen::Index>(config.batch_size, N);

    double obj_prev = measurement_objective(H, M);
    for (int epoch = 0; epoch < config.sgd_max_epochs; ++epoch) {
        std::vector<int> order = (batch == N)
                                     ? all_indices(M)
                                     : batch_rng.permutation(static_cast<int>(N));
        for (Eigen::Index start = 0; start < N; start += batch) {
            std::vector<int> idx(order.begin() + start,
                                 order.begin() +
                                     std::min<Eigen::Index>(start + batch, N));
            for (int k = 0; k <= l; ++k) {
                Core grad = core_gradient_on(H, M, k, idx);
                auto& c = H.core(k);
                for (Eigen::Index j = 0; j < c.dim(); ++j)
                    c.slices[j] -= config.step * grad.slices[j];
            }
        }
        for (int k = 0; k <= l; ++k)
            for (const auto& s : H.core(k).slices)
                if (!s.allFinite())
                    throw NumericError(
                        "recover_tt_sgd: NaN/inf iterate; use a smaller step");
        const double obj = measurement_objective(H, M);
        if (config.target_residual > 0.0 &&
            std::sqrt(obj) <=
                config.target_residual * std::max(M.Y.norm(), 1e-300))
            break;
        if (std::abs(obj_prev - obj) <=
                config.conv_tol * std::max(obj_prev, 1e-300) ||
            obj <= 1e-26)
            break;
        obj_prev = obj;
    }
    return H;
}

HankelEstimate recover_hankel(const MeasurementSystem& M,
                              const RecoveryConfig& config) {
    HankelEstimate out;
    switch (config.method) {
        case RecoveryMethod::LeastSquares:
            out.dense = recover_least_squares(M);
            break;
        case RecoveryMethod::NuclearNorm: {
            bool ok = true;
            out.dense = recover_nuclear_norm(M, config, &ok);
            if (!ok) {
                out.warning = true;
                out.note = "nuclear norm: residual band not reached";
            }
            break;
        }
        case RecoveryMethod::IHT:
            out.dense = recover_iht(M, config);
            break;
        case RecoveryMethod::TIHT:
            out.dense = recover_tiht(M, config);
            break;
        case RecoveryMethod::ALS: {
            bool deficient = false;
            out.tt = recover_tt_als(M, config, nullptr, &deficient);
            out.is_tt = true;
            if (deficient) {
                out.warning = true;
                out.note = "ALS: rank-deficient subproblem solved by pseudo-inverse";
            }
            break;
        }
        case RecoveryMethod::SGD:
            out.tt = recover_tt_sgd(M, config);
            out.is_tt = true;
            break;
    }
    return out;
}

}  // namespace ttsl
