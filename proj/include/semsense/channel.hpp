#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace semsense {

enum class FadingModel { rayleigh, nakagami };

// gamma_bar = P_tx - 10 * alpha * log10(D) - N0, all in dB terms.
struct LinkBudget {
    double transmit_power_dbw = 0.0;
    double distance_m = 1.0;
    double path_loss_exp = 2.0;
    double noise_power_dbw = -90.0;
};

struct FadingSpec {
    FadingModel model = FadingModel::rayleigh;
    double nakagami_m = 1.0; // used when model == nakagami
    int n_branches = 1;      // MRC branches, i.i.d.
    std::optional<double> mean_snr_db;
    std::optional<LinkBudget> budget;

    double mean_snr_linear() const; // validates that exactly one source is set
};

// (tau1, tau2) pairs: (0.5,0.5) coherent BFSK, (1,0.5) BPSK,
// (0.5,1) non-coherent BFSK, (1,1) DPSK.
struct ModulationScheme {
    double tau1 = 1.0;
    double tau2 = 0.5;
    std::string name = "bpsk";

    static ModulationScheme preset(const std::string& name);
};

struct LinkReport {
    double capacity_bps = 0.0;
    double avg_bep = 0.0;
    double bandwidth_hz = 0.0;
};

// Density of the combined (post-MRC) SNR. Rayleigh branches give
// Gamma(N_R, gamma_bar); Nakagami-m branches give Gamma(N_R m, gamma_bar/m).
double snr_pdf(const FadingSpec& spec, double gamma);

double ergodic_capacity(const FadingSpec& spec, double bandwidth_hz);

double average_bep(const FadingSpec& spec, const ModulationScheme& mod);

// Flips every bit of the payload independently with probability bep.
std::vector<std::uint8_t> corrupt_payload(std::span<const std::uint8_t> payload, double bep,
                                          std::uint64_t seed);

double transmission_time(std::int64_t payload_bits, double capacity_bps);

LinkReport evaluate_link(const FadingSpec& spec, const ModulationScheme& mod, double bandwidth_hz);

} // namespace semsense
