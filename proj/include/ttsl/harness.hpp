#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttsl/dataset.hpp"
#include "ttsl/finetune.hpp"
#include "ttsl/hankel_recovery.hpp"
#include "ttsl/models.hpp"
#include "ttsl/spectral.hpp"

namespace ttsl {

// ---------------------------------------------------------------------------
// Synthetic generators
// ---------------------------------------------------------------------------

/// Network with all parameters drawn i.i.d. from N(0, param_std^2).
Linear2RNN gen_random_2rnn(int n, int d, int p, double param_std,
                           std::uint64_t seed);

/// N sequences of the given length with i.i.d. standard normal inputs;
/// targets are the model outputs plus N(0, noise_std^2) noise.
SequenceDataset gen_sequences(const Linear2RNN& model, int length,
                              Eigen::Index N, double noise_std, Rng& rng);

/// The three training sets of lengths L, 2L, 2L+1.
std::array<SequenceDataset, 3> gen_datasets(const Linear2RNN& model, int L,
                                            std::array<Eigen::Index, 3> sizes,
                                            double noise_std,
                                            std::uint64_t seed);

/// The 2-hidden-unit network computing the sum of running differences
/// (-1 1) . x_t over a sequence, on inputs lifted with a constant bias slot.
Linear2RNN addition_reference_model();

struct AdditionData {
    std::array<SequenceDataset, 3> train;
    Linear2RNN reference;
};

/// Addition task: raw inputs are 2-dimensional standard normal vectors,
/// lifted to 3 dimensions by a constant entry equal to one; the target is
/// the sum of per-step differences of the two raw components.
AdditionData gen_addition_dataset(std::array<Eigen::Index, 3> sizes, int L,
                                  double noise_std, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metrics and guards
// ---------------------------------------------------------------------------

struct Metrics {
    double mse = 0.0;
    double rmse = 0.0;
    double mape = 0.0;  // percent; entries with zero targets are excluded
    double mae = 0.0;
    Eigen::Index mape_excluded = 0;
};

Metrics compute_metrics(const std::vector<Eigen::VectorXd>& predictions,
                        const std::vector<Eigen::VectorXd>& targets);

/// Mean over the dataset of ||f(x) - y||^2 / p (per-component MSE).
double dataset_mse(const Linear2RNN& model, const SequenceDataset& data);

/// Returns the zero model iff the candidate's training MSE is strictly
/// greater than the zero predictor's.
Linear2RNN zero_fallback_guard(const Linear2RNN& candidate,
                               const std::vector<const SequenceDataset*>& train,
                               bool* fell_back = nullptr);

// ---------------------------------------------------------------------------
// Forecasting
// ---------------------------------------------------------------------------

/// Mean of consecutive groups of `group` samples; a trailing partial group
/// is dropped.
std::vector<double> hourly_average(const std::vector<double>& series,
                                   int group);

/// Synthetic surrogate series: a seasonal AR(1) with seeded innovations,
/// standing in for the wind-speed data when the real CSV is absent.
std::vector<double> synthetic_series(Eigen::Index length, std::uint64_t seed);

/// Sliding windows of `length` consecutive values, each value encoded as
/// the 2-vector (value, 1); the target is the next value.
SequenceDataset windows_to_dataset(const std::vector<double>& series,
                                   int length);

/// One prediction per admissible window position, `horizon` steps ahead;
/// beyond one step the model's own forecasts are fed back autoregressively.
std::vector<double> forecast_series(const std::vector<double>& series,
                                    int window, int horizon,
                                    const Linear2RNN& model);

struct ForecastOutcome {
    std::vector<int> horizons;
    std::vector<Metrics> metrics;  // aligned with horizons
};

struct ForecastConfig {
    int L = 3;
    int window = 6;
    std::vector<int> horizons = {1, 3, 6};
    int states = 10;
    double train_fraction = 0.7;  // chronological split
    RecoveryConfig recovery;
    std::optional<FinetuneConfig> finetune;
};

/// Full pipeline on a preprocessed (e.g. hourly averaged) series: windowed
/// training sets of lengths L, 2L, 2L+1, Hankel recovery, spectral learning,
/// optional refinement, then multi-horizon evaluation on the held-out part.
ForecastOutcome run_forecast(const std::vector<double>& series,
                             const ForecastConfig& config);

/// Reference numbers from the wind-speed study, for side-by-side printing
/// when the real dataset is supplied. Never asserted.
struct ForecastReferenceRow {
    std::string method;
    double rmse[3];  // one-, three-, six-hour-ahead
    double mape[3];
    double mae[3];
};
const std::vector<ForecastReferenceRow>& forecast_reference_table();

// ---------------------------------------------------------------------------
// Experiment cells and runtime benchmarking
// ---------------------------------------------------------------------------

struct CellSpec {
    std::string task = "random2rnn";  // random2rnn | addition
    int L = 2;
    Eigen::Index N = 1000;
    double noise_std = 0.0;
    std::uint64_t seed = 1;
    int gen_states = 5, gen_inputs = 3, gen_outputs = 2;
    double param_std = 0.2;
    Eigen::Index test_size = 1000;
    int test_length = 6;
};

struct ExperimentResult {
    std::string method;
    Eigen::Index N = 0;
    std::uint64_t seed = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    double recovery_seconds = 0.0;
    double spectral_seconds = 0.0;
    double finetune_seconds = 0.0;
    int effective_rank = 0;
    bool fallback = false;
    bool warning = false;
    std::string note;
};

/// One (task, method, N, seed) cell: generate data, recover the Hankels,
/// run spectral learning (TT path for TT estimates), optionally fine-tune,
/// apply the zero-function guard, and measure train/test error. Numeric
/// failures inside recovery fall back to the zero model with a note.
ExperimentResult run_cell(const CellSpec& spec, const RecoveryConfig& recovery,
                          const SpectralConfig& spectral,
                          const std::optional<FinetuneConfig>& finetune_cfg,
                          Linear2RNN* learned_out = nullptr);

struct BenchRow {
    std::string method;
    int length = 0;
    double seconds = 0.0;
    bool capped = false;
    std::string note;
};

/// Wall-clock of Hankel recovery per (method, L) on the addition task with a
/// fixed sample budget; iterative methods stop at a shared training
/// accuracy. Cells that exceed the time budget or the memory cap are marked.
std::vector<BenchRow> bench_recovery_runtime(
    const std::vector<RecoveryMethod>& methods, const std::vector<int>& lengths,
    Eigen::Index N, double budget_seconds, std::uint64_t seed);

/// Wall-clock of the spectral-learning step alone, TT format vs dense, from
/// exact Hankels of a small network.
std::vector<BenchRow> bench_spectral_runtime(const std::vector<int>& lengths,
                                             int states, int inputs,
                                             double budget_seconds,
                                             std::uint64_t seed,
                                             int repetitions = 5);

}  // namespace ttsl
