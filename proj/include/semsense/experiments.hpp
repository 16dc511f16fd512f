#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semsense/semantic_codec.hpp"
#include "semsense/semantic_space.hpp"
#include "semsense/signal_model.hpp"

namespace semsense {

struct RunReport {
    std::string experiment_id;
    std::map<std::string, double> metrics;
    std::vector<std::string> artifacts;
    std::string config_fingerprint;
};

// Executes one of the experiment recipes E1..E5 described in the README.
// config_json may override any recipe default; the effective config (with
// the seed applied) is what gets fingerprinted. Reports and artifact CSVs
// are written under out_dir; reruns with the same config are byte-identical.
RunReport run_experiment(const std::string& config_json, const std::filesystem::path& out_dir,
                         std::optional<std::uint64_t> seed_override = std::nullopt);

RunReport run_experiment_file(const std::filesystem::path& config_path,
                              std::optional<std::filesystem::path> out_dir_override = std::nullopt,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

// Labeled semantic codes for a preset dataset, split train/test per class.
struct EncodedDataset {
    std::vector<std::pair<SemanticCode, std::string>> train;
    std::vector<std::pair<SemanticCode, std::string>> test;
};

EncodedDataset encode_split_dataset(const DatasetConfig& config, int train_per_class,
                                    int test_per_class, const CodecConfig& codec);

// One test capture through the channel: serialize, corrupt each link at the
// given BEP, decode with repair, classify per link, vote. nullopt when every
// link abstains.
std::optional<std::string> classify_through_channel(const SemanticCode& code, double bep,
                                                    int links, std::uint64_t seed,
                                                    const TrainingSet& ts, const KnnConfig& knn,
                                                    const CodecConfig& codec);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

} // namespace semsense
