#include "semsense/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semsense/errors.hpp"

namespace semsense {

namespace {

using nlohmann::json;

double parse_number(const std::string& token, int line_no) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw Error(Errc::schema_mismatch,
                    "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
    }
    if (!std::isfinite(value)) {
        throw Error(Errc::schema_mismatch,
                    "line " + std::to_string(line_no) + ": non-finite value rejected");
    }
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

} // namespace

void write_trace_csv(const CfrPowerTrace& trace, const std::filesystem::path& path) {
    std::ofstream file(path);
    if (!file) {
        throw Error(Errc::invalid_argument, "cannot open " + path.string() + " for writing");
    }
    file.precision(17);
    file << "sample_rate_hz," << trace.sample_rate_hz << "\n";
    if (trace.label) {
        file << "label," << *trace.label << "\n";
    }
    const std::size_t n = trace.length();
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = 0; s < trace.n_subcarriers; ++s) {
            if (s) file << ",";
            file << trace.samples[i * trace.n_subcarriers + s];
        }
        file << "\n";
    }
}

CfrPowerTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) {
        throw Error(Errc::schema_mismatch, "cannot open " + path.string());
    }
    CfrPowerTrace trace;
    std::string line;
    int line_no = 0;

    if (!std::getline(file, line)) {
        throw Error(Errc::schema_mismatch, "empty trace file " + path.string());
    }
    ++line_no;
    auto header = split_csv(line);
    if (header.size() != 2 || header[0] != "sample_rate_hz") {
        throw Error(Errc::schema_mismatch, "line 1: expected 'sample_rate_hz,<value>'");
    }
    trace.sample_rate_hz = parse_number(header[1], line_no);

    bool saw_data = false;
    int n_columns = 0;
    while (std::getline(file, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (!saw_data && cells.size() == 2 && cells[0] == "label") {
            trace.label = cells[1];
            continue;
        }
        if (!saw_data) {
            n_columns = static_cast<int>(cells.size());
            trace.n_subcarriers = n_columns;
            saw_data = true;
        } else if (static_cast<int>(cells.size()) != n_columns) {
            throw Error(Errc::schema_mismatch,
                        "line " + std::to_string(line_no) + ": inconsistent column count");
        }
        for (const auto& cell : cells) {
            trace.samples.push_back(parse_number(cell, line_no));
        }
    }
    if (!saw_data) {
        throw Error(Errc::schema_mismatch, "trace file has no sample rows");
    }
    return trace;
}

void write_dataset(const std::vector<CfrPowerTrace>& traces, const std::filesystem::path& dir,
                   std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["seed"] = seed;
    manifest["traces"] = json::array();
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const std::string name = "trace_" + std::to_string(i) + ".csv";
        write_trace_csv(traces[i], dir / name);
        manifest["traces"].push_back(
            {{"file", name}, {"label", traces[i].label.value_or("")}});
    }
    std::ofstream file(dir / "manifest.json");
    file << manifest.dump(2) << "\n";
}

std::vector<CfrPowerTrace> read_dataset(const std::filesystem::path& manifest_path) {
    std::ifstream file(manifest_path);
    if (!file) {
        throw Error(Errc::schema_mismatch, "cannot open " + manifest_path.string());
    }
    json manifest;
    try {
        file >> manifest;
    } catch (const json::exception& e) {
        throw Error(Errc::schema_mismatch, std::string("manifest: ") + e.what());
    }
    std::vector<CfrPowerTrace> traces;
    const auto dir = manifest_path.parent_path();
    try {
        for (const auto& item : manifest.at("traces")) {
            CfrPowerTrace trace = read_trace_csv(dir / item.at("file").get<std::string>());
            const std::string label = item.at("label").get<std::string>();
            if (!label.empty()) trace.label = label;
            traces.push_back(std::move(trace));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::schema_mismatch, std::string("manifest: ") + e.what());
    }
    return traces;
}

} // namespace semsense
