#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ttsl/errors.hpp"

namespace ttsl {

/// One training example: a sequence of d-dimensional input vectors and the
/// p-dimensional target output.
struct SequenceExample {
    std::vector<Eigen::VectorXd> inputs;
    Eigen::VectorXd target;
};

/// A list of (input sequence, output) pairs with uniform dimensions.
struct SequenceDataset {
    std::vector<SequenceExample> examples;

    // Provenance, carried through serialization.
    std::string generator;
    double noise_std = 0.0;
    std::uint64_t seed = 0;

    Eigen::Index size() const {
        return static_cast<Eigen::Index>(examples.size());
    }

    Eigen::Index input_dim() const {
        for (const auto& ex : examples)
            if (!ex.inputs.empty()) return ex.inputs.front().size();
        return 0;
    }

    Eigen::Index output_dim() const {
        return examples.empty() ? 0 : examples.front().target.size();
    }

    /// All sequences share the input/output dimensions; throws otherwise.
    void validate() const {
        const Eigen::Index d = input_dim();
        const Eigen::Index p = output_dim();
        for (const auto& ex : examples) {
            for (const auto& x : ex.inputs)
                if (x.size() != d)
                    throw ShapeError("SequenceDataset: ragged input dimension");
            if (ex.target.size() != p)
                throw ShapeError("SequenceDataset: ragged output dimension");
        }
    }
};

}  // namespace ttsl
