#pragma once

#include <filesystem>
#include <vector>

#include "semsense/signal_model.hpp"

namespace semsense {

// CSV layout: `sample_rate_hz,<value>`, optional `label,<name>`, then one
// line per time sample with one column per subcarrier.
void write_trace_csv(const CfrPowerTrace& trace, const std::filesystem::path& path);
CfrPowerTrace read_trace_csv(const std::filesystem::path& path);

// A dataset is one CSV per trace plus a JSON manifest listing file, label
// and the generating seed.
void write_dataset(const std::vector<CfrPowerTrace>& traces, const std::filesystem::path& dir,
                   std::uint64_t seed);
std::vector<CfrPowerTrace> read_dataset(const std::filesystem::path& manifest_path);

} // namespace semsense
