#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semsense/semantic_codec.hpp"

namespace semsense {

// Point in the 3D semantic space: x = mean frequency per basis, y = mean
// log-amplitude per basis, z = basis count. Initial phase is excluded.
struct SemanticPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct LabeledPoint {
    SemanticPoint point;
    std::string label;
};

struct TrainingSet {
    std::vector<LabeledPoint> points;
    std::array<double, 3> axis_scales{1.0, 1.0, 1.0};
    std::vector<std::string> labels;
};

struct KnnConfig {
    int k = 3;
    std::uint64_t tie_break_seed = 0;
};

SemanticPoint to_point(const SemanticCode& code);

TrainingSet build_training_set(const std::vector<std::pair<SemanticCode, std::string>>& codes);

// kNN under Euclidean distance on axis-standardized coordinates; label ties
// are broken uniformly at random with the configured seed.
std::string classify(const SemanticPoint& test, const TrainingSet& ts, const KnnConfig& cfg);

// Majority vote across link results. Ties prefer the previous recognition
// result when it is among the tied labels, otherwise a seeded uniform pick.
std::string vote(const std::vector<std::string>& link_results,
                 const std::optional<std::string>& previous, std::uint64_t seed);

std::string training_set_to_json(const TrainingSet& ts);
TrainingSet training_set_from_json(const std::string& text);

} // namespace semsense
