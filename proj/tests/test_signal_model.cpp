#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "semsense/errors.hpp"
#include "semsense/signal_model.hpp"

using namespace semsense;

namespace {

// Independent spectral oracle: direct DFT magnitude at bin k.
double dft_magnitude(const std::vector<double>& x, std::size_t k) {
    std::complex<double> acc(0.0, 0.0);
    const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * std::polar(1.0, w * static_cast<double>(i));
    }
    return std::abs(acc);
}

std::size_t dominant_ac_bin(const std::vector<double>& x) {
    std::size_t best = 1;
    double best_mag = -1.0;
    for (std::size_t k = 1; k <= x.size() / 2; ++k) {
        const double mag = dft_magnitude(x, k);
        if (mag > best_mag) {
            best_mag = mag;
            best = k;
        }
    }
    return best;
}

std::vector<double> centered_copy(const std::vector<double>& samples) {
    std::vector<double> out = samples;
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / out.size();
    for (double& v : out) v -= mean;
    return out;
}

SceneSpec base_scene() {
    SceneSpec scene;
    scene.carrier_freq_hz = 5.805e9;
    scene.sample_rate_hz = 600.0;
    scene.duration_s = 2.0;
    scene.noise_std = 0.0;
    return scene;
}

} // namespace

TEST_CASE("single static path gives a constant trace at amplitude squared") {
    SceneSpec scene = base_scene();
    scene.static_paths.push_back({1.7, 4.0, 0.0, 0.3});
    const CfrPowerTrace trace = synthesize_power(scene);
    REQUIRE(trace.samples.size() == 1200);
    for (double v : trace.samples) {
        CHECK(v == doctest::Approx(1.7 * 1.7).epsilon(1e-12));
    }
}

TEST_CASE("dominant AC component sits at the cross-term Doppler frequency") {
    SceneSpec scene = base_scene();
    scene.static_paths.push_back({1.0, 4.0, 0.0, 0.0});
    scene.dynamic_paths.push_back({0.2, 3.0, 0.5, 1.1});
    const CfrPowerTrace trace = synthesize_power(scene);
    const auto centered = centered_copy(trace.samples);

    const double predicted = scene.carrier_freq_hz * 0.5 / kSpeedOfLight; // 9.675 Hz
    const double bin = scene.sample_rate_hz / static_cast<double>(centered.size());
    const double peak_freq = dominant_ac_bin(centered) * bin;
    CHECK(std::abs(peak_freq - predicted) <= bin);
}

TEST_CASE("two dynamic paths produce the self-term difference frequency") {
    SceneSpec scene = base_scene();
    scene.dynamic_paths.push_back({0.5, 3.0, 1.0, 0.4});
    scene.dynamic_paths.push_back({0.5, 5.0, 0.5, 2.0});
    const CfrPowerTrace trace = synthesize_power(scene);
    const auto centered = centered_copy(trace.samples);

    const double predicted = scene.carrier_freq_hz * std::abs(1.0 - 0.5) / kSpeedOfLight;
    const double bin = scene.sample_rate_hz / static_cast<double>(centered.size());
    const double peak_freq = dominant_ac_bin(centered) * bin;
    CHECK(std::abs(peak_freq - predicted) <= bin);
}

TEST_CASE("decompose_power of a single static path is pure DC") {
    SceneSpec scene = base_scene();
    scene.static_paths.push_back({2.0, 6.0, 0.0, 0.9});
    const PowerDecomposition parts = decompose_power(scene);
    CHECK(parts.dc == doctest::Approx(4.0).epsilon(1e-12));
    for (double v : parts.cross.samples) CHECK(v == 0.0);
    for (double v : parts.self.samples) CHECK(v == 0.0);
}

TEST_CASE("self term needs at least two dynamic paths") {
    SceneSpec scene = base_scene();
    scene.static_paths.push_back({1.0, 6.0, 0.0, 0.0});
    scene.dynamic_paths.push_back({0.3, 3.0, 0.8, 0.2});
    const PowerDecomposition parts = decompose_power(scene);
    for (double v : parts.self.samples) CHECK(v == 0.0);
}

TEST_CASE("dc + cross + self reconstructs the synthesized power") {
    SceneSpec scene = base_scene();
    scene.static_paths.push_back({1.0, 6.0, 0.0, 0.0});
    scene.dynamic_paths.push_back({0.3, 3.0, 0.8, 0.2});
    scene.dynamic_paths.push_back({0.2, 5.0, 1.3, 1.7});
    const CfrPowerTrace trace = synthesize_power(scene);
    const PowerDecomposition parts = decompose_power(scene);
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const double sum = parts.dc + parts.cross.samples[i] + parts.self.samples[i];
        CHECK(std::abs(sum - trace.samples[i]) <= 1e-9 * std::abs(trace.samples[i]));
    }
}

TEST_CASE("mean power matches the DC term over whole periods") {
    // Velocities chosen so every cross and self term covers whole periods.
    SceneSpec scene = base_scene();
    const double v = 10.0 * kSpeedOfLight / scene.carrier_freq_hz;
    scene.static_paths.push_back({1.0, 6.0, 0.0, 0.0});
    scene.dynamic_paths.push_back({0.3, 3.0, v, 0.2});
    scene.dynamic_paths.push_back({0.2, 5.0, 2.0 * v, 1.7});
    const CfrPowerTrace trace = synthesize_power(scene);
    const PowerDecomposition parts = decompose_power(scene);
    const double mean =
        std::accumulate(trace.samples.begin(), trace.samples.end(), 0.0) / trace.samples.size();
    CHECK(mean == doctest::Approx(parts.dc).epsilon(1e-6));
}

TEST_CASE("every spectral peak lies on a predicted cross or self frequency") {
    SceneSpec scene = base_scene();
    scene.static_paths.push_back({1.0, 6.0, 0.0, 0.0});
    scene.dynamic_paths.push_back({0.4, 3.0, 0.6, 0.2});
    scene.dynamic_paths.push_back({0.3, 5.0, 1.1, 1.7});
    scene.dynamic_paths.push_back({0.25, 4.0, 1.5, 0.9});
    const CfrPowerTrace trace = synthesize_power(scene);

    std::vector<double> predicted;
    for (const auto& p : scene.dynamic_paths) {
        predicted.push_back(scene.carrier_freq_hz * p.velocity_mps / kSpeedOfLight);
    }
    for (std::size_t i = 0; i < scene.dynamic_paths.size(); ++i) {
        for (std::size_t j = i + 1; j < scene.dynamic_paths.size(); ++j) {
            predicted.push_back(scene.carrier_freq_hz *
                                std::abs(scene.dynamic_paths[i].velocity_mps -
                                         scene.dynamic_paths[j].velocity_mps) /
                                kSpeedOfLight);
        }
    }

    const auto centered = centered_copy(trace.samples);
    const std::size_t n = centered.size();
    const double bin = scene.sample_rate_hz / static_cast<double>(n);
    std::vector<double> mags(n / 2 + 1, 0.0);
    for (std::size_t k = 1; k <= n / 2; ++k) mags[k] = dft_magnitude(centered, k);
    const double peak_floor = 0.05 * *std::max_element(mags.begin(), mags.end());
    for (std::size_t k = 2; k < n / 2; ++k) {
        const bool is_peak = mags[k] > mags[k - 1] && mags[k] > mags[k + 1] && mags[k] > peak_floor;
        if (!is_peak) continue;
        const double freq = k * bin;
        double best = 1e300;
        for (double p : predicted) best = std::min(best, std::abs(freq - p));
        CHECK(best <= bin);
    }
}

TEST_CASE("synthesis is deterministic in the seed") {
    SceneSpec scene = base_scene();
    scene.noise_std = 0.05;
    scene.rng_seed = 42;
    scene.static_paths.push_back({1.0, 6.0, 0.0, 0.0});
    scene.dynamic_paths.push_back({0.3, 3.0, 0.8, 0.2});
    const CfrPowerTrace a = synthesize_power(scene);
    const CfrPowerTrace b = synthesize_power(scene);
    CHECK(a.samples == b.samples);

    scene.rng_seed = 43;
    const CfrPowerTrace c = synthesize_power(scene);
    CHECK(a.samples != c.samples);
}

TEST_CASE("scene validation errors") {
    SceneSpec scene = base_scene();
    CHECK_THROWS_AS(synthesize_power(scene), Error); // empty

    scene.dynamic_paths.push_back({0.3, 3.0, 200.0, 0.0}); // Doppler 3870 Hz at 600 Hz rate
    CHECK_THROWS_AS(synthesize_power(scene), Error);

    SceneSpec tiny = base_scene();
    tiny.duration_s = 0.001;
    tiny.static_paths.push_back({1.0, 3.0, 0.0, 0.0});
    CHECK_THROWS_AS(synthesize_power(tiny), Error);

    SceneSpec noisy = base_scene();
    noisy.noise_std = 0.1;
    noisy.static_paths.push_back({1.0, 3.0, 0.0, 0.0});
    CHECK_THROWS_AS(decompose_power(noisy), Error);
}

TEST_CASE("activity dataset has the requested shape and is seed-deterministic") {
    DatasetConfig config = default_dataset_config({"walking", "sitting"}, 10, 99);
    const auto dataset = make_activity_dataset(config);
    REQUIRE(dataset.size() == 20);
    int walking = 0;
    for (const auto& trace : dataset) {
        REQUIRE(trace.label.has_value());
        walking += *trace.label == "walking";
    }
    CHECK(walking == 10);

    const auto again = make_activity_dataset(config);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        CHECK(dataset[i].samples == again[i].samples);
    }

    DatasetConfig empty;
    CHECK_THROWS_AS(make_activity_dataset(empty), Error);
    CHECK_THROWS_AS(preset_class("jogging"), Error);
}

TEST_CASE("walking traces occupy more bandwidth than sitting traces") {
    DatasetConfig config = default_dataset_config({"walking", "sitting"}, 8, 7);
    const auto dataset = make_activity_dataset(config);

    auto bandwidth95 = [](const CfrPowerTrace& trace) {
        const auto centered = centered_copy(trace.samples);
        const std::size_t n = centered.size();
        std::vector<double> energy(n / 2 + 1, 0.0);
        double total = 0.0;
        for (std::size_t k = 1; k <= n / 2; ++k) {
            const double m = dft_magnitude(centered, k);
            energy[k] = m * m;
            total += energy[k];
        }
        double acc = 0.0;
        for (std::size_t k = 1; k <= n / 2; ++k) {
            acc += energy[k];
            if (acc >= 0.95 * total) {
                return k * trace.sample_rate_hz / static_cast<double>(n);
            }
        }
        return trace.sample_rate_hz / 2.0;
    };

    double walking = 0.0;
    double sitting = 0.0;
    for (const auto& trace : dataset) {
        (*trace.label == "walking" ? walking : sitting) += bandwidth95(trace);
    }
    CHECK(walking / 8.0 > sitting / 8.0);
}
