#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace semsense {

inline constexpr double kSpeedOfLight = 3.0e8; // m/s, free-space propagation

// One propagation path. Static paths have velocity_mps == 0 exactly; the
// path length of a dynamic path evolves as d(t) = initial_distance_m + v t.
struct PathComponent {
    double amplitude = 0.0;
    double initial_distance_m = 0.0;
    double velocity_mps = 0.0;
    double initial_phase_rad = 0.0;
};

struct SceneSpec {
    double carrier_freq_hz = 5.805e9;
    std::vector<PathComponent> static_paths;
    std::vector<PathComponent> dynamic_paths;
    double sample_rate_hz = 600.0;
    double duration_s = 2.0;
    double noise_std = 0.0; // AWGN std on the power series
    std::uint64_t rng_seed = 0;
    int n_subcarriers = 1;
    double subcarrier_spacing_hz = 312.5e3;
};

// Sampled CFR power. Multi-subcarrier traces are stored row-major:
// samples[i * n_subcarriers + s] is time index i, subcarrier s.
struct CfrPowerTrace {
    std::vector<double> samples;
    double sample_rate_hz = 0.0;
    int n_subcarriers = 1;
    std::optional<std::string> label;

    std::size_t length() const { return samples.size() / static_cast<std::size_t>(n_subcarriers); }
};

struct PowerDecomposition {
    double dc = 0.0;
    CfrPowerTrace cross;
    CfrPowerTrace self;
};

CfrPowerTrace synthesize_power(const SceneSpec& scene);

// Splits the noiseless power series into its constant, static-dynamic and
// dynamic-dynamic parts; dc + cross(t) + self(t) reconstructs the trace.
// Defined for single-subcarrier scenes with noise_std == 0.
PowerDecomposition decompose_power(const SceneSpec& scene);

struct ActivityClassSpec {
    std::string label;
    int min_dynamic_paths = 1;
    int max_dynamic_paths = 1;
    double velocity_min_mps = 0.1;
    double velocity_max_mps = 1.0;
    double amplitude_min = 0.1;
    double amplitude_max = 0.5;
    double static_amplitude = 1.0;
    double noise_std = 0.02;
};

struct DatasetConfig {
    std::vector<ActivityClassSpec> classes;
    int traces_per_class = 10;
    double carrier_freq_hz = 5.805e9;
    double sample_rate_hz = 600.0;
    double duration_s = 2.0;
    int n_subcarriers = 1;
    std::uint64_t rng_seed = 0;
};

// Class presets: "falling", "walking", "sitting", "waving". Walking uses
// more and faster dynamic paths than sitting, so it needs more bases.
ActivityClassSpec preset_class(const std::string& name);

DatasetConfig default_dataset_config(const std::vector<std::string>& class_names,
                                     int traces_per_class, std::uint64_t seed);

// Labeled traces, class-major, deterministic given rng_seed.
std::vector<CfrPowerTrace> make_activity_dataset(const DatasetConfig& config);

} // namespace semsense
