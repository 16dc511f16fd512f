#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "semsense/channel.hpp"
#include "semsense/errors.hpp"
#include "semsense/quadrature.hpp"

using namespace semsense;

namespace {

FadingSpec rayleigh(double snr_db, int branches = 1) {
    FadingSpec spec;
    spec.model = FadingModel::rayleigh;
    spec.n_branches = branches;
    spec.mean_snr_db = snr_db;
    return spec;
}

FadingSpec nakagami(double m, double snr_db, int branches = 1) {
    FadingSpec spec;
    spec.model = FadingModel::nakagami;
    spec.nakagami_m = m;
    spec.n_branches = branches;
    spec.mean_snr_db = snr_db;
    return spec;
}

// Textbook Rayleigh/BPSK closed form, used as the independent oracle.
double rayleigh_bpsk_bep(double mean_snr) {
    return 0.5 * (1.0 - std::sqrt(mean_snr / (1.0 + mean_snr)));
}

} // namespace

TEST_CASE("snr_pdf special values and Rayleigh-Nakagami equivalence") {
    CHECK(snr_pdf(rayleigh(0.0), 0.0) == doctest::Approx(1.0)); // exp(1) density at 0
    CHECK(snr_pdf(rayleigh(0.0), 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(snr_pdf(rayleigh(0.0), -1.0) == 0.0);

    for (int branches : {1, 2, 4}) {
        for (double snr_db : {-3.0, 0.0, 7.0}) {
            for (double g : {0.1, 0.5, 1.0, 3.0, 10.0}) {
                const double a = snr_pdf(nakagami(1.0, snr_db, branches), g);
                const double b = snr_pdf(rayleigh(snr_db, branches), g);
                CHECK(a == doctest::Approx(b).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("snr_pdf integrates to one") {
    // Integrate in u = sqrt(gamma), which keeps the shape-1/2 density
    // regular, over a moment-based upper bound (mean + 60 sigma).
    for (const FadingSpec& spec :
         {rayleigh(0.0), rayleigh(10.0, 3), nakagami(2.0, 5.0, 2), nakagami(0.5, -2.0)}) {
        const double mean = spec.mean_snr_linear() * spec.n_branches;
        const double hi = std::sqrt(mean + 60.0 * std::sqrt(mean) + 60.0);
        const double mass = integrate(
            [&](double u) { return snr_pdf(spec, u * u) * 2.0 * u; }, 0.0, hi, 1e-8, 20);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("snr_pdf rejects invalid specs") {
    CHECK_THROWS_AS(snr_pdf(nakagami(0.4, 0.0), 1.0), Error);
    FadingSpec neither;
    CHECK_THROWS_AS(snr_pdf(neither, 1.0), Error);
    FadingSpec both = rayleigh(0.0);
    both.budget = LinkBudget{};
    CHECK_THROWS_AS(snr_pdf(both, 1.0), Error);
}

TEST_CASE("link budget composes into the mean SNR in dB") {
    FadingSpec spec;
    spec.budget = LinkBudget{20.0, 100.0, 2.5, -60.0}; // 20 - 50 + 60 = 30 dB
    CHECK(spec.mean_snr_linear() == doctest::Approx(1000.0).epsilon(1e-12));
}

TEST_CASE("capacity vanishes at very low SNR") {
    const double c = ergodic_capacity(rayleigh(-60.0), 1.0);
    CHECK(c < 1e-4);
}

TEST_CASE("Rayleigh capacity matches the exponential-integral closed form") {
    for (double snr_db : {-10.0, 0.0, 10.0, 20.0, 30.0}) {
        const double mean_snr = std::pow(10.0, snr_db / 10.0);
        const double closed =
            std::log2(std::exp(1.0)) * std::exp(1.0 / mean_snr) * boost::math::expint(1, 1.0 / mean_snr);
        const double numeric = ergodic_capacity(rayleigh(snr_db), 1.0);
        CHECK(numeric == doctest::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("capacity agrees with a seeded Monte Carlo oracle") {
    const FadingSpec spec = nakagami(3.0, 8.0, 2);
    const double numeric = ergodic_capacity(spec, 1.0);

    std::mt19937_64 rng(2024);
    const double mean_snr = std::pow(10.0, 0.8);
    std::gamma_distribution<double> draw(2.0 * 3.0, mean_snr / 3.0);
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = std::log2(1.0 + draw(rng));
        sum += v;
        sum_sq += v * v;
    }
    const double mc = sum / n;
    const double se = std::sqrt((sum_sq / n - mc * mc) / n);
    CHECK(std::abs(numeric - mc) <= 3.0 * se);
}

TEST_CASE("capacity is linear in bandwidth and increasing in SNR") {
    const double base = ergodic_capacity(rayleigh(10.0), 1.0);
    CHECK(ergodic_capacity(rayleigh(10.0), 5e6) == doctest::Approx(5e6 * base).epsilon(1e-12));
    double previous = 0.0;
    for (double snr_db = -10.0; snr_db <= 30.0; snr_db += 2.0) {
        const double c = ergodic_capacity(rayleigh(snr_db), 1.0);
        CHECK(c > previous);
        previous = c;
    }
    CHECK_THROWS_AS(ergodic_capacity(rayleigh(0.0), 0.0), Error);
}

TEST_CASE("average BEP approaches one half at vanishing SNR") {
    const double bep = average_bep(rayleigh(-90.0), ModulationScheme::preset("bpsk"));
    CHECK(bep == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("Rayleigh BPSK BEP matches the closed form across the SNR grid") {
    for (double snr_db = -10.0; snr_db <= 30.0; snr_db += 5.0) {
        const double mean_snr = std::pow(10.0, snr_db / 10.0);
        const double numeric = average_bep(rayleigh(snr_db), ModulationScheme::preset("bpsk"));
        CHECK(std::abs(numeric - rayleigh_bpsk_bep(mean_snr)) <= 1e-8);
    }
}

TEST_CASE("modulation ordering at 10 dB matches the modulation table") {
    const FadingSpec spec = rayleigh(10.0);
    const double bpsk = average_bep(spec, ModulationScheme::preset("bpsk"));
    const double bfsk = average_bep(spec, ModulationScheme::preset("bfsk"));
    const double dpsk = average_bep(spec, ModulationScheme::preset("dpsk"));
    const double on_bfsk = average_bep(spec, ModulationScheme::preset("on-bfsk"));
    CHECK(bpsk < bfsk);
    CHECK(bfsk < dpsk);
    CHECK(dpsk < on_bfsk);

    // DPSK over Rayleigh N=1 has the closed form 1/(2 (1 + snr)).
    CHECK(dpsk == doctest::Approx(1.0 / 22.0).epsilon(1e-8));
    CHECK_THROWS_AS(ModulationScheme::preset("qam"), Error);
}

TEST_CASE("BEP decreases with SNR and with the Nakagami order") {
    for (const std::string& mod : {"bpsk", "dpsk", "on-bfsk", "bfsk"}) {
        const ModulationScheme scheme = ModulationScheme::preset(mod);
        double previous = 0.51;
        for (double snr_db = -10.0; snr_db <= 28.0; snr_db += 2.0) {
            const double bep = average_bep(rayleigh(snr_db), scheme);
            CHECK(bep < previous);
            previous = bep;
        }
    }
    const ModulationScheme bpsk = ModulationScheme::preset("bpsk");
    for (double snr_db : {0.0, 10.0, 20.0}) {
        const double ray = average_bep(rayleigh(snr_db), bpsk);
        const double n2 = average_bep(nakagami(2.0, snr_db), bpsk);
        const double n5 = average_bep(nakagami(5.0, snr_db), bpsk);
        const double n10 = average_bep(nakagami(10.0, snr_db), bpsk);
        CHECK(n10 <= n5);
        CHECK(n5 <= n2);
        CHECK(n2 <= ray);
    }
}

TEST_CASE("MRC branches reduce the average BEP") {
    const ModulationScheme bpsk = ModulationScheme::preset("bpsk");
    CHECK(average_bep(rayleigh(5.0, 2), bpsk) < average_bep(rayleigh(5.0, 1), bpsk));
    CHECK(average_bep(rayleigh(5.0, 4), bpsk) < average_bep(rayleigh(5.0, 2), bpsk));
}

TEST_CASE("corrupt_payload honors the flip probability and the seed") {
    std::vector<std::uint8_t> payload(125000, 0x5a); // 1e6 bits
    const auto untouched = corrupt_payload(payload, 0.0, 9);
    CHECK(untouched == payload);

    const auto flipped = corrupt_payload(payload, 0.5, 9);
    std::size_t flips = 0;
    for (std::size_t i = 0; i < payload.size(); ++i) {
        flips += static_cast<std::size_t>(std::popcount(
            static_cast<unsigned>(payload[i] ^ flipped[i])));
    }
    const double fraction = static_cast<double>(flips) / 1e6;
    CHECK(fraction > 0.498);
    CHECK(fraction < 0.502);

    CHECK(corrupt_payload(payload, 0.03, 11) == corrupt_payload(payload, 0.03, 11));
    CHECK(corrupt_payload(payload, 0.03, 11) != corrupt_payload(payload, 0.03, 12));
    CHECK_THROWS_AS(corrupt_payload(payload, 0.6, 0), Error);
    CHECK_THROWS_AS(corrupt_payload(payload, -0.1, 0), Error);
}

TEST_CASE("transmission_time divides bits by capacity") {
    CHECK(transmission_time(7200, 7e6) == doctest::Approx(7200.0 / 7e6).epsilon(1e-12));
    CHECK(transmission_time(96000, 5e6) == doctest::Approx(19.2e-3).epsilon(1e-12));
    CHECK(transmission_time(0, 1e6) == 0.0);
    CHECK_THROWS_AS(transmission_time(100, 0.0), Error);
}

TEST_CASE("evaluate_link bundles capacity and BEP") {
    const LinkReport report = evaluate_link(rayleigh(10.0), ModulationScheme::preset("bpsk"), 2e6);
    CHECK(report.bandwidth_hz == 2e6);
    CHECK(report.capacity_bps == doctest::Approx(2e6 * ergodic_capacity(rayleigh(10.0), 1.0)));
    CHECK(report.avg_bep >= 0.0);
    CHECK(report.avg_bep <= 0.5);
}
