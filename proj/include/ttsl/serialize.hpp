#pragma once

#include <json.hpp>
#include <string>

#include "ttsl/dataset.hpp"
#include "ttsl/dense_tensor.hpp"
#include "ttsl/models.hpp"
#include "ttsl/tensor_train.hpp"

namespace ttsl {

// JSON containers. All parameter blocks are stored as flat arrays in the
// row-major flattening convention (first index slowest), next to explicit
// shape metadata. Doubles survive a dump/parse round trip bit-exactly.

nlohmann::json to_json(const DenseTensor<double>& T);
DenseTensor<double> dense_tensor_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TTTensor<double>& T);
TTTensor<double> tt_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Linear2RNN& model);
Linear2RNN rnn_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VvWFA& model);
VvWFA wfa_from_json(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

/// JSON-lines dataset format: a header line with provenance and dimensions,
/// then one example per line ({"inputs": [[...], ...], "target": [...]}).
void write_dataset_jsonl(const std::string& path, const SequenceDataset& data);
SequenceDataset read_dataset_jsonl(const std::string& path);

}  // namespace ttsl
