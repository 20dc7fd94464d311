#include "ttsl/serialize.hpp"

#include <fstream>
#include <sstream>

namespace ttsl {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vector_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
    return v;
}

// Matrices are flattened row-major to match the tensor convention.
json matrix_to_json(const Eigen::MatrixXd& M) {
    json a = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) a.push_back(M(i, j));
    return a;
}

Eigen::MatrixXd matrix_from_json(const json& a, Eigen::Index rows,
                                 Eigen::Index cols) {
    if (static_cast<Eigen::Index>(a.size()) != rows * cols)
        throw ArgumentError("matrix_from_json: length does not match shape");
    Eigen::MatrixXd M(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = a[k++].get<double>();
    return M;
}

void expect_type(const json& j, const std::string& type) {
    if (!j.is_object() || j.value("type", "") != type)
        throw ArgumentError("expected a '" + type + "' JSON object");
}

}  // namespace

json to_json(const DenseTensor<double>& T) {
    json j;
    j["type"] = "dense_tensor";
    j["shape"] = T.shape();
    j["values"] = vector_to_json(T.values());
    return j;
}

DenseTensor<double> dense_tensor_from_json(const json& j) {
    expect_type(j, "dense_tensor");
    Shape shape = j.at("shape").get<Shape>();
    return DenseTensor<double>(shape, vector_from_json(j.at("values")));
}

json to_json(const TTTensor<double>& T) {
    json j;
    j["type"] = "tt_tensor";
    j["order"] = T.order();
    j["shape"] = T.shape();
    j["ranks"] = T.ranks();
    json cores = json::array();
    for (int k = 0; k < T.order(); ++k) {
        const auto& c = T.core(k);
        json jc;
        jc["left_rank"] = c.left_rank();
        jc["dim"] = c.dim();
        jc["right_rank"] = c.right_rank();
        // Row-major flattening of the (left_rank, dim, right_rank) core.
        json vals = json::array();
        for (Eigen::Index q = 0; q < c.left_rank(); ++q)
            for (Eigen::Index d = 0; d < c.dim(); ++d)
                for (Eigen::Index s = 0; s < c.right_rank(); ++s)
                    vals.push_back(c.slices[d](q, s));
        jc["values"] = std::move(vals);
        cores.push_back(std::move(jc));
    }
    j["cores"] = std::move(cores);
    return j;
}

TTTensor<double> tt_from_json(const json& j) {
    expect_type(j, "tt_tensor");
    std::vector<TTTensor<double>::Core> cores;
    for (const auto& jc : j.at("cores")) {
        const Eigen::Index rl = jc.at("left_rank").get<Eigen::Index>();
        const Eigen::Index d = jc.at("dim").get<Eigen::Index>();
        const Eigen::Index rr = jc.at("right_rank").get<Eigen::Index>();
        const auto& vals = jc.at("values");
        if (static_cast<Eigen::Index>(vals.size()) != rl * d * rr)
            throw ArgumentError("tt_from_json: core length mismatch");
        TTTensor<double>::Core c;
        c.slices.assign(d, Eigen::MatrixXd::Zero(rl, rr));
        std::size_t k = 0;
        for (Eigen::Index q = 0; q < rl; ++q)
            for (Eigen::Index jj = 0; jj < d; ++jj)
                for (Eigen::Index s = 0; s < rr; ++s)
                    c.slices[jj](q, s) = vals[k++].get<double>();
        cores.push_back(std::move(c));
    }
    return TTTensor<double>(std::move(cores));
}

json to_json(const Linear2RNN& model) {
    json j;
    j["type"] = "linear_2rnn";
    j["n"] = model.num_states();
    j["d"] = model.input_dim();
    j["p"] = model.output_dim();
    j["h0"] = vector_to_json(model.h0);
    json slices = json::array();
    for (const auto& A : model.transition) slices.push_back(matrix_to_json(A));
    j["transition"] = std::move(slices);
    j["omega"] = matrix_to_json(model.omega);
    return j;
}

Linear2RNN rnn_from_json(const json& j) {
    expect_type(j, "linear_2rnn");
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    const Eigen::Index d = j.at("d").get<Eigen::Index>();
    const Eigen::Index p = j.at("p").get<Eigen::Index>();
    Linear2RNN model;
    model.h0 = vector_from_json(j.at("h0"));
    for (const auto& s : j.at("transition"))
        model.transition.push_back(matrix_from_json(s, n, n));
    if (static_cast<Eigen::Index>(model.transition.size()) != d)
        throw ArgumentError("rnn_from_json: transition slice count mismatch");
    model.omega = matrix_from_json(j.at("omega"), p, n);
    model.validate();
    return model;
}

json to_json(const VvWFA& model) {
    json j;
    j["type"] = "vv_wfa";
    j["n"] = model.num_states();
    j["p"] = model.output_dim();
    j["alphabet"] = model.alphabet;
    j["alpha"] = vector_to_json(model.alpha);
    json slices = json::array();
    for (const auto& A : model.transitions) slices.push_back(matrix_to_json(A));
    j["transitions"] = std::move(slices);
    j["omega"] = matrix_to_json(model.omega);
    return j;
}

VvWFA wfa_from_json(const json& j) {
    expect_type(j, "vv_wfa");
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    const Eigen::Index p = j.at("p").get<Eigen::Index>();
    VvWFA model;
    model.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    model.alpha = vector_from_json(j.at("alpha"));
    for (const auto& s : j.at("transitions"))
        model.transitions.push_back(matrix_from_json(s, n, n));
    model.omega = matrix_from_json(j.at("omega"), p, n);
    model.validate();
    return model;
}

void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("save_json: cannot open '" + path + "'");
    out << j.dump(2) << '\n';
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("load_json: cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

void write_dataset_jsonl(const std::string& path, const SequenceDataset& data) {
    data.validate();
    std::ofstream out(path);
    if (!out) throw ArgumentError("write_dataset_jsonl: cannot open '" + path + "'");
    json header;
    header["type"] = "dataset_header";
    header["generator"] = data.generator;
    header["noise_std"] = data.noise_std;
    header["seed"] = data.seed;
    header["d"] = data.input_dim();
    header["p"] = data.output_dim();
    header["count"] = data.examples.size();
    out << header.dump() << '\n';
    for (const auto& ex : data.examples) {
        json je;
        json inputs = json::array();
        for (const auto& x : ex.inputs) inputs.push_back(vector_to_json(x));
        je["inputs"] = std::move(inputs);
        je["target"] = vector_to_json(ex.target);
        out << je.dump() << '\n';
    }
}

SequenceDataset read_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("read_dataset_jsonl: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw ArgumentError("read_dataset_jsonl: empty file '" + path + "'");
    json header = json::parse(line);
    if (header.value("type", "") != "dataset_header")
        throw ArgumentError("read_dataset_jsonl: missing header line");
    SequenceDataset data;
    data.generator = header.value("generator", "");
    data.noise_std = header.value("noise_std", 0.0);
    data.seed = header.value("seed", std::uint64_t{0});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json je = json::parse(line);
        SequenceExample ex;
        for (const auto& x : je.at("inputs"))
            ex.inputs.push_back(vector_from_json(x));
        ex.target = vector_from_json(je.at("target"));
        data.examples.push_back(std::move(ex));
    }
    data.validate();
    return data;
}

}  // namespace ttsl
