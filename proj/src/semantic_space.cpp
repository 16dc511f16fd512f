#include "semsense/semantic_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "semsense/errors.hpp"

namespace semsense {

namespace {

using nlohmann::json;

std::array<double, 3> standardized_coords(const SemanticPoint& p, const TrainingSet& ts) {
    return {p.x / ts.axis_scales[0], p.y / ts.axis_scales[1], p.z / ts.axis_scales[2]};
}

double squared_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

std::string pick_among(std::vector<std::string> tied, std::uint64_t seed) {
    std::sort(tied.begin(), tied.end());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    return tied[pick(rng)];
}

} // namespace

SemanticPoint to_point(const SemanticCode& code) {
    if (code.order < 1 || code.bases.empty()) {
        throw Error(Errc::invalid_argument, "code has no bases");
    }
    const double b = static_cast<double>(code.bases.size());
    double freq_sum = 0.0;
    double log_sum = 0.0;
    for (const auto& basis : code.bases) {
        if (!(basis.amplitude > 0.0)) {
            throw Error(Errc::invalid_argument, "zero-amplitude basis; drop it before mapping");
        }
        freq_sum += basis.frequency_hz / b;
        log_sum += std::log(basis.amplitude / b);
    }
    return {freq_sum / b, log_sum / b, b};
}

TrainingSet build_training_set(const std::vector<std::pair<SemanticCode, std::string>>& codes) {
    if (codes.empty()) {
        throw Error(Errc::empty_class, "no training codes");
    }
    TrainingSet ts;
    std::map<std::string, int> counts;
    for (const auto& [code, label] : codes) {
        ts.points.push_back({to_point(code), label});
        counts[label] += 1;
    }
    for (const auto& [label, count] : counts) {
        if (count < 1) {
            throw Error(Errc::empty_class, "label '" + label + "' has no codes");
        }
        ts.labels.push_back(label);
    }

    const double n = static_cast<double>(ts.points.size());
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    for (const auto& lp : ts.points) {
        mean[0] += lp.point.x;
        mean[1] += lp.point.y;
        mean[2] += lp.point.z;
    }
    for (double& m : mean) m /= n;

    std::array<double, 3> var{0.0, 0.0, 0.0};
    for (const auto& lp : ts.points) {
        var[0] += (lp.point.x - mean[0]) * (lp.point.x - mean[0]);
        var[1] += (lp.point.y - mean[1]) * (lp.point.y - mean[1]);
        var[2] += (lp.point.z - mean[2]) * (lp.point.z - mean[2]);
    }
    for (int i = 0; i < 3; ++i) {
        // Sample std; degenerate axes get scale 1.
        const double scale = n > 1.0 ? std::sqrt(var[i] / (n - 1.0)) : 0.0;
        ts.axis_scales[i] = scale > 1e-12 ? scale : 1.0;
    }
    return ts;
}

std::string classify(const SemanticPoint& test, const TrainingSet& ts, const KnnConfig& cfg) {
    if (cfg.k < 1 || cfg.k > static_cast<int>(ts.points.size())) {
        throw Error(Errc::invalid_argument, "k must be in [1, #training points]");
    }
    const auto probe = standardized_coords(test, ts);
    std::vector<std::pair<double, std::size_t>> distances;
    distances.reserve(ts.points.size());
    for (std::size_t i = 0; i < ts.points.size(); ++i) {
        distances.emplace_back(squared_distance(probe, standardized_coords(ts.points[i].point, ts)), i);
    }
    std::partial_sort(distances.begin(), distances.begin() + cfg.k, distances.end());

    std::map<std::string, int> votes;
    for (int i = 0; i < cfg.k; ++i) {
        votes[ts.points[distances[i].second].label] += 1;
    }
    int best = 0;
    for (const auto& [label, count] : votes) best = std::max(best, count);
    std::vector<std::string> tied;
    for (const auto& [label, count] : votes) {
        if (count == best) tied.push_back(label);
    }
    if (tied.size() == 1) return tied.front();
    return pick_among(std::move(tied), cfg.tie_break_seed);
}

std::string vote(const std::vector<std::string>& link_results,
                 const std::optional<std::string>& previous, std::uint64_t seed) {
    if (link_results.empty()) {
        throw Error(Errc::invalid_argument, "vote needs at least one link result");
    }
    std::map<std::string, int> counts;
    for (const auto& label : link_results) counts[label] += 1;
    int best = 0;
    for (const auto& [label, count] : counts) best = std::max(best, count);
    std::vector<std::string> tied;
    for (const auto& [label, count] : counts) {
        if (count == best) tied.push_back(label);
    }
    if (tied.size() == 1) return tied.front();
    if (previous && std::find(tied.begin(), tied.end(), *previous) != tied.end()) {
        return *previous;
    }
    return pick_among(std::move(tied), seed);
}

std::string training_set_to_json(const TrainingSet& ts) {
    json doc;
    doc["labels"] = ts.labels;
    doc["axis_scales"] = ts.axis_scales;
    doc["points"] = json::array();
    for (const auto& lp : ts.points) {
        doc["points"].push_back({{"x", lp.point.x},
                                 {"y", lp.point.y},
                                 {"z", lp.point.z},
                                 {"label", lp.label}});
    }
    return doc.dump(2);
}

TrainingSet training_set_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::schema_mismatch, std::string("training set JSON: ") + e.what());
    }
    TrainingSet ts;
    try {
        ts.labels = doc.at("labels").get<std::vector<std::string>>();
        const auto scales = doc.at("axis_scales").get<std::vector<double>>();
        if (scales.size() != 3) {
            throw Error(Errc::schema_mismatch, "axis_scales must have 3 entries");
        }
        std::copy(scales.begin(), scales.end(), ts.axis_scales.begin());
        for (const auto& item : doc.at("points")) {
            LabeledPoint lp;
            lp.point.x = item.at("x").get<double>();
            lp.point.y = item.at("y").get<double>();
            lp.point.z = item.at("z").get<double>();
            lp.label = item.at("label").get<std::string>();
            ts.points.push_back(std::move(lp));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::schema_mismatch, std::string("training set JSON: ") + e.what());
    }
    return ts;
}

} // namespace semsense
