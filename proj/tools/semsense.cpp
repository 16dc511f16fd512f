#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semsense/channel.hpp"
#include "semsense/contest.hpp"
#include "semsense/errors.hpp"
#include "semsense/experiments.hpp"
#include "semsense/payload.hpp"
#include "semsense/semantic_codec.hpp"
#include "semsense/semantic_space.hpp"
#include "semsense/signal_model.hpp"
#include "semsense/trace_io.hpp"

namespace {

using nlohmann::json;
using namespace semsense;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::invalid_argument:
        case Errc::invalid_scene:
        case Errc::empty_scene:
        case Errc::invalid_config:
        case Errc::invalid_index:
        case Errc::empty_class:
        case Errc::schema_mismatch:
            return 2;
        default:
            return 3;
    }
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed) {
    std::optional<std::filesystem::path> out;
    if (out_dir) out = *out_dir;
    const RunReport report = run_experiment_file(config_path, out, seed);
    std::cout << "experiment " << report.experiment_id << " fingerprint "
              << report.config_fingerprint << "\n";
    for (const auto& [name, value] : report.metrics) {
        std::cout << "  " << name << " = " << value << "\n";
    }
    for (const auto& artifact : report.artifacts) {
        std::cout << "  wrote " << artifact << "\n";
    }
    return 0;
}

int cmd_synth(const std::vector<std::string>& classes, int per_class, std::uint64_t seed,
              const std::string& out_dir, double sample_rate, double duration) {
    DatasetConfig config = default_dataset_config(classes, per_class, seed);
    config.sample_rate_hz = sample_rate;
    config.duration_s = duration;
    const auto traces = make_activity_dataset(config);
    write_dataset(traces, out_dir, seed);
    std::cout << "wrote " << traces.size() << " traces to " << out_dir << "\n";
    return 0;
}

int cmd_encode(const std::string& trace_path, const std::optional<std::string>& json_out,
               bool show_bits) {
    const CfrPowerTrace trace = read_trace_csv(trace_path);
    const CodecConfig codec;
    const SemanticCode code = encode(trace, codec);
    const std::string doc = code_to_json(code);
    if (json_out) {
        std::ofstream file(*json_out);
        file << doc << "\n";
        std::cout << "wrote " << *json_out << "\n";
    } else {
        std::cout << doc << "\n";
    }
    if (show_bits) {
        std::cout << "payload_bits " << payload_bits(code, codec) << "\n";
    }
    return 0;
}

int cmd_classify(const std::string& train_manifest, const std::string& test_manifest, int k,
                 std::uint64_t seed, const std::string& out_csv) {
    const CodecConfig codec;
    std::vector<std::pair<SemanticCode, std::string>> train;
    for (const auto& trace : read_dataset(train_manifest)) {
        if (!trace.label) {
            throw Error(Errc::schema_mismatch, "training trace without a label");
        }
        train.emplace_back(encode(trace, codec), *trace.label);
    }
    const TrainingSet ts = build_training_set(train);
    const KnnConfig knn{k, seed};

    std::ofstream out(out_csv);
    if (!out) {
        throw Error(Errc::invalid_argument, "cannot open " + out_csv);
    }
    out << "trace_id,true_label,predicted_label,link_count\n";
    int correct = 0;
    int total = 0;
    const auto test = read_dataset(test_manifest);
    for (std::size_t i = 0; i < test.size(); ++i) {
        const SemanticCode code = encode(test[i], codec);
        const std::string predicted = classify(to_point(code), ts, knn);
        const std::string truth = test[i].label.value_or("");
        out << i << "," << truth << "," << predicted << ",1\n";
        if (!truth.empty()) {
            ++total;
            correct += predicted == truth;
        }
    }
    if (total > 0) {
        std::cout << "accuracy " << static_cast<double>(correct) / total << " over " << total
                  << " labeled traces\n";
    }
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

int cmd_contest(double total_award, int n_awards, bool averse, bool raw,
                const std::optional<std::string>& sweep_csv,
                const std::optional<std::string>& report_path) {
    const auto profiles = table_profiles();
    MarketConfig cfg = table_market();
    cfg.n_awards = n_awards;
    cfg.total_award = total_award;
    cfg.risk = averse ? RiskPreference::averse : RiskPreference::neutral;
    cfg.use_semantic = !raw;

    const AwardScheme scheme = optimal_awards(profiles, cfg);
    const EffortResult result = market_summary(profiles, cfg, scheme);

    json doc;
    doc["scheme"] = scheme.prizes;
    doc["total_effort"] = result.total_effort;
    doc["per_transmitter"] = json::array();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        doc["per_transmitter"].push_back({{"capability", result.capabilities[i]},
                                          {"effort", result.efforts[i]},
                                          {"expected_award", result.expected_awards[i]}});
    }
    if (report_path) {
        std::ofstream file(*report_path);
        file << doc.dump(2) << "\n";
        std::cout << "wrote " << *report_path << "\n";
    } else {
        std::cout << doc.dump(2) << "\n";
    }

    if (sweep_csv) {
        std::ofstream file(*sweep_csv);
        file << "first_prize_share,total_effort\n";
        MarketConfig sweep_cfg = cfg;
        sweep_cfg.n_awards = 2;
        for (double share : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
            AwardScheme s{{share * total_award, (1.0 - share) * total_award}};
            file << share << "," << market_summary(profiles, sweep_cfg, s).total_effort << "\n";
        }
        std::cout << "wrote " << *sweep_csv << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic-aware sensing pipeline and contest market toolkit"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment recipe from a JSON config");
    std::string run_config;
    std::optional<std::string> run_out;
    std::optional<std::uint64_t> run_seed;
    run->add_option("config", run_config, "experiment config JSON")->required();
    run->add_option("--out", run_out, "output directory");
    run->add_option("--seed", run_seed, "override the config seed");

    auto* synth = app.add_subcommand("synth", "generate a preset activity dataset");
    std::vector<std::string> synth_classes{"sitting", "walking", "falling", "waving"};
    int synth_per_class = 10;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "dataset";
    double synth_rate = 600.0;
    double synth_duration = 2.0;
    synth->add_option("--classes", synth_classes, "activity presets");
    synth->add_option("--per-class", synth_per_class, "traces per class");
    synth->add_option("--seed", synth_seed, "dataset seed");
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--rate", synth_rate, "sample rate in Hz");
    synth->add_option("--duration", synth_duration, "trace duration in seconds");

    auto* enc = app.add_subcommand("encode", "encode a trace CSV into a semantic code");
    std::string enc_trace;
    std::optional<std::string> enc_json;
    bool enc_bits = false;
    enc->add_option("trace", enc_trace, "trace CSV path")->required();
    enc->add_option("--json", enc_json, "write the code JSON here instead of stdout");
    enc->add_flag("--bits", enc_bits, "print the packed payload size in bits");

    auto* cls = app.add_subcommand("classify", "train on one dataset manifest, classify another");
    std::string cls_train;
    std::string cls_test;
    int cls_k = 3;
    std::uint64_t cls_seed = 0;
    std::string cls_out = "classification.csv";
    cls->add_option("--train", cls_train, "training dataset manifest")->required();
    cls->add_option("--test", cls_test, "test dataset manifest")->required();
    cls->add_option("--k", cls_k, "number of neighbors");
    cls->add_option("--seed", cls_seed, "tie-break seed");
    cls->add_option("--out", cls_out, "report CSV path");

    auto* con = app.add_subcommand("contest", "optimal awards and efforts for the default market");
    double con_award = 100.0;
    int con_n_awards = 2;
    bool con_averse = false;
    bool con_raw = false;
    std::optional<std::string> con_sweep;
    std::optional<std::string> con_report;
    con->add_option("--total-award", con_award, "prize budget");
    con->add_option("--awards", con_n_awards, "number of award ranks");
    con->add_flag("--averse", con_averse, "risk-averse transmitters");
    con->add_flag("--raw", con_raw, "disable semantic encoding in the capability model");
    con->add_option("--sweep-shares", con_sweep, "write a first-prize-share sweep CSV here");
    con->add_option("--report", con_report, "write the market report JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config, run_out, run_seed);
        if (synth->parsed())
            return cmd_synth(synth_classes, synth_per_class, synth_seed, synth_out, synth_rate,
                             synth_duration);
        if (enc->parsed()) return cmd_encode(enc_trace, enc_json, enc_bits);
        if (cls->parsed()) return cmd_classify(cls_train, cls_test, cls_k, cls_seed, cls_out);
        if (con->parsed())
            return cmd_contest(con_award, con_n_awards, con_averse, con_raw, con_sweep, con_report);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
