#include "semsense/channel.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "semsense/errors.hpp"
#include "semsense/quadrature.hpp"

namespace semsense {

namespace {

struct GammaLaw {
    double shape = 1.0;
    double scale = 1.0;
};

GammaLaw combined_snr_law(const FadingSpec& spec) {
    if (spec.n_branches < 1) {
        throw Error(Errc::invalid_config, "n_branches must be >= 1");
    }
    const double mean = spec.mean_snr_linear();
    if (spec.model == FadingModel::rayleigh) {
        return {static_cast<double>(spec.n_branches), mean};
    }
    if (spec.nakagami_m < 0.5) {
        throw Error(Errc::invalid_config, "Nakagami m must be >= 0.5");
    }
    return {static_cast<double>(spec.n_branches) * spec.nakagami_m, mean / spec.nakagami_m};
}

double gamma_pdf(const GammaLaw& law, double x) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) {
        if (law.shape > 1.0) return 0.0;
        if (law.shape == 1.0) return 1.0 / law.scale;
        return std::numeric_limits<double>::infinity();
    }
    const double log_pdf = (law.shape - 1.0) * std::log(x) - x / law.scale -
                           std::lgamma(law.shape) - law.shape * std::log(law.scale);
    return std::exp(log_pdf);
}

// Upper integration limit with Gamma tail mass below 1e-12.
double upper_limit(const GammaLaw& law) {
    return law.scale * boost::math::gamma_q_inv(law.shape, 1e-12);
}

} // namespace

double FadingSpec::mean_snr_linear() const {
    if (mean_snr_db.has_value() == budget.has_value()) {
        throw Error(Errc::invalid_config, "set exactly one of mean_snr_db and the link budget");
    }
    double snr_db = 0.0;
    if (mean_snr_db) {
        snr_db = *mean_snr_db;
    } else {
        const LinkBudget& b = *budget;
        if (!(b.distance_m > 0.0)) {
            throw Error(Errc::invalid_config, "link budget distance must be positive");
        }
        snr_db = b.transmit_power_dbw - 10.0 * b.path_loss_exp * std::log10(b.distance_m) -
                 b.noise_power_dbw;
    }
    const double linear = std::pow(10.0, snr_db / 10.0);
    if (!std::isfinite(linear) || !(linear > 0.0)) {
        throw Error(Errc::invalid_config, "derived mean SNR is not finite");
    }
    return linear;
}

ModulationScheme ModulationScheme::preset(const std::string& name) {
    if (name == "bfsk" || name == "bfsk-coherent") return {0.5, 0.5, "bfsk-coherent"};
    if (name == "bpsk") return {1.0, 0.5, "bpsk"};
    if (name == "on-bfsk" || name == "bfsk-noncoherent") return {0.5, 1.0, "on-bfsk"};
    if (name == "dpsk") return {1.0, 1.0, "dpsk"};
    throw Error(Errc::invalid_config, "unknown modulation preset '" + name + "'");
}

double snr_pdf(const FadingSpec& spec, double gamma) {
    return gamma_pdf(combined_snr_law(spec), gamma);
}

// Averages h(gamma) against the SNR density with the substitution
// gamma = u^2, which removes the endpoint singularities of the Gamma pdf
// (shape < 1) and of Gamma(1/2, tau1 gamma) so the quadrature error
// estimate is trustworthy.
template <typename H>
static double fading_average(const GammaLaw& law, H&& h, double abs_tol) {
    const double hi = std::sqrt(upper_limit(law));
    return integrate(
        [&](double u) {
            const double g = u * u;
            const double pdf = gamma_pdf(law, g);
            if (!std::isfinite(pdf)) return 0.0;
            return h(g) * pdf * 2.0 * u;
        },
        0.0, hi, abs_tol);
}

double ergodic_capacity(const FadingSpec& spec, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) {
        throw Error(Errc::invalid_argument, "bandwidth must be positive");
    }
    const GammaLaw law = combined_snr_law(spec);
    const double log2e = 1.0 / std::log(2.0);
    const double spectral_efficiency =
        fading_average(law, [&](double g) { return std::log1p(g) * log2e; }, 1e-9);
    return bandwidth_hz * spectral_efficiency;
}

double average_bep(const FadingSpec& spec, const ModulationScheme& mod) {
    if (!(mod.tau1 > 0.0) || !(mod.tau2 > 0.0)) {
        throw Error(Errc::invalid_config, "modulation parameters must be positive");
    }
    const GammaLaw law = combined_snr_law(spec);
    // Conditional BEP Gamma(tau2, tau1 g) / (2 Gamma(tau2)) == gamma_q / 2.
    return fading_average(
        law, [&](double g) { return 0.5 * boost::math::gamma_q(mod.tau2, mod.tau1 * g); }, 1e-10);
}

std::vector<std::uint8_t> corrupt_payload(std::span<const std::uint8_t> payload, double bep,
                                          std::uint64_t seed) {
    if (!(bep >= 0.0) || bep > 0.5) {
        throw Error(Errc::invalid_argument, "bep must lie in [0, 0.5]");
    }
    std::vector<std::uint8_t> out(payload.begin(), payload.end());
    if (bep == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (auto& byte : out) {
        for (int bit = 0; bit < 8; ++bit) {
            if (uniform(rng) < bep) {
                byte ^= static_cast<std::uint8_t>(1u << bit);
            }
        }
    }
    return out;
}

double transmission_time(std::int64_t payload_bits, double capacity_bps) {
    if (!(capacity_bps > 0.0)) {
        throw Error(Errc::invalid_argument, "capacity must be positive");
    }
    if (payload_bits < 0) {
        throw Error(Errc::invalid_argument, "payload size must be non-negative");
    }
    return static_cast<double>(payload_bits) / capacity_bps;
}

LinkReport evaluate_link(const FadingSpec& spec, const ModulationScheme& mod, double bandwidth_hz) {
    LinkReport report;
    report.bandwidth_hz = bandwidth_hz;
    report.capacity_bps = ergodic_capacity(spec, bandwidth_hz);
    report.avg_bep = average_bep(spec, mod);
    return report;
}

} // namespace semsense
