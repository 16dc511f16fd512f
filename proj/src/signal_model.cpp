#include "semsense/signal_model.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "semsense/errors.hpp"
#include "semsense/rng.hpp"

namespace semsense {

namespace {

std::size_t trace_length(const SceneSpec& scene) {
    return static_cast<std::size_t>(std::llround(scene.duration_s * scene.sample_rate_hz));
}

double max_doppler_hz(const SceneSpec& scene) {
    double doppler = 0.0;
    for (const auto& p : scene.dynamic_paths) {
        doppler = std::max(doppler, scene.carrier_freq_hz * std::abs(p.velocity_mps) / kSpeedOfLight);
    }
    return doppler;
}

void validate_scene(const SceneSpec& scene) {
    if (scene.static_paths.empty() && scene.dynamic_paths.empty()) {
        throw Error(Errc::empty_scene, "scene has no propagation paths");
    }
    if (!(scene.carrier_freq_hz > 0.0) || !(scene.sample_rate_hz > 0.0)) {
        throw Error(Errc::invalid_scene, "carrier and sample rate must be positive");
    }
    if (scene.n_subcarriers < 1) {
        throw Error(Errc::invalid_scene, "n_subcarriers must be >= 1");
    }
    if (scene.noise_std < 0.0) {
        throw Error(Errc::invalid_scene, "noise_std must be non-negative");
    }
    for (const auto& p : scene.static_paths) {
        if (p.amplitude < 0.0) throw Error(Errc::invalid_scene, "path amplitude must be >= 0");
        if (p.velocity_mps != 0.0) throw Error(Errc::invalid_scene, "static path has nonzero velocity");
    }
    for (const auto& p : scene.dynamic_paths) {
        if (p.amplitude < 0.0) throw Error(Errc::invalid_scene, "path amplitude must be >= 0");
    }
    if (trace_length(scene) < 2) {
        throw Error(Errc::invalid_scene, "duration_s * sample_rate_hz must be >= 2");
    }
    if (scene.sample_rate_hz <= 2.0 * max_doppler_hz(scene)) {
        throw Error(Errc::invalid_scene, "sample rate violates the Nyquist bound for the fastest path");
    }
}

std::complex<double> path_gain(const PathComponent& p, double freq_hz, double t) {
    const double phase =
        -2.0 * M_PI * freq_hz * (p.initial_distance_m + p.velocity_mps * t) / kSpeedOfLight +
        p.initial_phase_rad;
    return std::polar(p.amplitude, phase);
}

} // namespace

CfrPowerTrace synthesize_power(const SceneSpec& scene) {
    validate_scene(scene);
    const std::size_t n = trace_length(scene);
    const int n_sub = scene.n_subcarriers;

    CfrPowerTrace trace;
    trace.sample_rate_hz = scene.sample_rate_hz;
    trace.n_subcarriers = n_sub;
    trace.samples.assign(n * static_cast<std::size_t>(n_sub), 0.0);

    std::mt19937_64 rng(scene.rng_seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    for (int s = 0; s < n_sub; ++s) {
        const double freq = scene.carrier_freq_hz + s * scene.subcarrier_spacing_hz;
        std::complex<double> h_static(0.0, 0.0);
        for (const auto& p : scene.static_paths) {
            h_static += path_gain(p, freq, 0.0);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / scene.sample_rate_hz;
            std::complex<double> h = h_static;
            for (const auto& p : scene.dynamic_paths) {
                h += path_gain(p, freq, t);
            }
            double power = std::norm(h);
            if (scene.noise_std > 0.0) {
                power += scene.noise_std * noise(rng);
            }
            trace.samples[i * n_sub + s] = power;
        }
    }
    return trace;
}

PowerDecomposition decompose_power(const SceneSpec& scene) {
    validate_scene(scene);
    if (scene.noise_std != 0.0) {
        throw Error(Errc::invalid_scene, "decompose_power requires noise_std == 0");
    }
    if (scene.n_subcarriers != 1) {
        throw Error(Errc::invalid_scene, "decompose_power is defined for single-subcarrier scenes");
    }
    const std::size_t n = trace_length(scene);
    const double freq = scene.carrier_freq_hz;

    std::complex<double> h_static(0.0, 0.0);
    for (const auto& p : scene.static_paths) {
        h_static += path_gain(p, freq, 0.0);
    }

    PowerDecomposition out;
    out.dc = std::norm(h_static);
    for (const auto& p : scene.dynamic_paths) {
        out.dc += p.amplitude * p.amplitude;
    }

    out.cross.sample_rate_hz = out.self.sample_rate_hz = scene.sample_rate_hz;
    out.cross.samples.resize(n);
    out.self.samples.resize(n);

    std::vector<std::complex<double>> gains(scene.dynamic_paths.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / scene.sample_rate_hz;
        for (std::size_t k = 0; k < scene.dynamic_paths.size(); ++k) {
            gains[k] = path_gain(scene.dynamic_paths[k], freq, t);
        }
        double cross = 0.0;
        for (const auto& g : gains) {
            cross += 2.0 * std::real(std::conj(h_static) * g);
        }
        double self = 0.0;
        for (std::size_t k = 0; k + 1 < gains.size(); ++k) {
            for (std::size_t l = k + 1; l < gains.size(); ++l) {
                self += 2.0 * std::real(gains[k] * std::conj(gains[l]));
            }
        }
        out.cross.samples[i] = cross;
        out.self.samples[i] = self;
    }
    return out;
}

ActivityClassSpec preset_class(const std::string& name) {
    ActivityClassSpec spec;
    spec.label = name;
    if (name == "sitting") {
        spec.min_dynamic_paths = 3;
        spec.max_dynamic_paths = 3;
        spec.velocity_min_mps = 0.25;
        spec.velocity_max_mps = 0.55;
        spec.amplitude_min = 0.25;
        spec.amplitude_max = 0.45;
    } else if (name == "walking") {
        spec.min_dynamic_paths = 4;
        spec.max_dynamic_paths = 4;
        spec.velocity_min_mps = 0.9;
        spec.velocity_max_mps = 1.6;
        spec.amplitude_min = 0.22;
        spec.amplitude_max = 0.38;
    } else if (name == "falling") {
        spec.min_dynamic_paths = 3;
        spec.max_dynamic_paths = 3;
        spec.velocity_min_mps = 2.2;
        spec.velocity_max_mps = 3.2;
        spec.amplitude_min = 0.30;
        spec.amplitude_max = 0.50;
    } else if (name == "waving") {
        spec.min_dynamic_paths = 2;
        spec.max_dynamic_paths = 2;
        spec.velocity_min_mps = 0.55;
        spec.velocity_max_mps = 0.95;
        spec.amplitude_min = 0.12;
        spec.amplitude_max = 0.22;
    } else {
        throw Error(Errc::invalid_config, "unknown activity preset '" + name + "'");
    }
    return spec;
}

DatasetConfig default_dataset_config(const std::vector<std::string>& class_names,
                                     int traces_per_class, std::uint64_t seed) {
    DatasetConfig config;
    config.traces_per_class = traces_per_class;
    config.rng_seed = seed;
    for (const auto& name : class_names) {
        config.classes.push_back(preset_class(name));
    }
    return config;
}

std::vector<CfrPowerTrace> make_activity_dataset(const DatasetConfig& config) {
    if (config.classes.empty()) {
        throw Error(Errc::invalid_config, "dataset needs a non-empty class list");
    }
    if (config.traces_per_class < 1) {
        throw Error(Errc::invalid_config, "traces_per_class must be >= 1");
    }
    std::vector<CfrPowerTrace> dataset;
    dataset.reserve(config.classes.size() * static_cast<std::size_t>(config.traces_per_class));

    std::uint64_t index = 0;
    for (const auto& cls : config.classes) {
        if (cls.min_dynamic_paths < 1 || cls.max_dynamic_paths < cls.min_dynamic_paths) {
            throw Error(Errc::invalid_config, "class '" + cls.label + "' has an invalid path count range");
        }
        for (int i = 0; i < config.traces_per_class; ++i, ++index) {
            std::mt19937_64 rng(derive_seed(config.rng_seed, index));
            std::uniform_int_distribution<int> path_count(cls.min_dynamic_paths, cls.max_dynamic_paths);
            std::uniform_real_distribution<double> velocity(cls.velocity_min_mps, cls.velocity_max_mps);
            std::uniform_real_distribution<double> amplitude(cls.amplitude_min, cls.amplitude_max);
            std::uniform_real_distribution<double> distance(2.0, 8.0);
            std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

            SceneSpec scene;
            scene.carrier_freq_hz = config.carrier_freq_hz;
            scene.sample_rate_hz = config.sample_rate_hz;
            scene.duration_s = config.duration_s;
            scene.noise_std = cls.noise_std;
            scene.n_subcarriers = config.n_subcarriers;
            scene.rng_seed = derive_seed(config.rng_seed, index ^ 0x5a5a5a5a5a5a5a5aULL);
            scene.static_paths.push_back({cls.static_amplitude, distance(rng), 0.0, phase(rng)});
            const int n_paths = path_count(rng);
            for (int p = 0; p < n_paths; ++p) {
                scene.dynamic_paths.push_back({amplitude(rng), distance(rng), velocity(rng), phase(rng)});
            }
            CfrPowerTrace trace = synthesize_power(scene);
            trace.label = cls.label;
            dataset.push_back(std::move(trace));
        }
    }
    return dataset;
}

} // namespace semsense
