#include "semsense/contest.hpp"

#include <algorithm>
#include <cmath>

#include "semsense/errors.hpp"
#include "semsense/quadrature.hpp"

namespace semsense {

namespace {

void validate_market(const MarketConfig& cfg) {
    if (cfg.n_transmitters < 1 || cfg.n_awards < 1 || cfg.n_awards > cfg.n_transmitters) {
        throw Error(Errc::invalid_config, "need 1 <= n_awards <= n_transmitters");
    }
    if (!(cfg.total_award > 0.0) || !(cfg.delta_bps > 0.0)) {
        throw Error(Errc::invalid_config, "total_award and delta must be positive");
    }
}

void validate_scheme(const AwardScheme& scheme, const MarketConfig& cfg) {
    if (scheme.prizes.empty() || static_cast<int>(scheme.prizes.size()) > cfg.n_transmitters) {
        throw Error(Errc::invalid_config, "prize vector size must be in [1, n_transmitters]");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < scheme.prizes.size(); ++i) {
        if (scheme.prizes[i] < 0.0) {
            throw Error(Errc::invalid_config, "prizes must be non-negative");
        }
        if (i > 0 && scheme.prizes[i] > scheme.prizes[i - 1] + 1e-12) {
            throw Error(Errc::invalid_config, "prizes must be non-increasing");
        }
        sum += scheme.prizes[i];
    }
    if (sum > cfg.total_award + 1e-12) {
        throw Error(Errc::invalid_config, "prizes exceed the total award");
    }
}

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) {
        out *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return out;
}

double prize_utility(double prize, RiskPreference risk) {
    if (prize <= 0.0) return 0.0; // zero prizes are excluded from the sum
    return risk == RiskPreference::averse ? std::log(prize) : prize;
}

// Probability that a capability-a transmitter ranks m-th among n_t contestants.
double rank_weight(double g, int m, int n_t) {
    return binomial(n_t - 1, m - 1) * std::pow(g, n_t - m) * std::pow(1.0 - g, m - 1);
}

double belief_cycle_time(const BeliefParams& belief) {
    return belief.encode_time_s + belief.recog_time_s;
}

double award_sum(double a, const AwardScheme& scheme, const MarketConfig& cfg,
                 const BeliefParams& belief, RiskPreference risk) {
    const double g = capability_cdf(a, belief);
    double out = 0.0;
    for (std::size_t m = 0; m < scheme.prizes.size(); ++m) {
        const double u = prize_utility(scheme.prizes[m], risk);
        if (u == 0.0) continue;
        out += u * rank_weight(g, static_cast<int>(m) + 1, cfg.n_transmitters);
    }
    return out;
}

double effort_from_belief(double a, const AwardScheme& scheme, const MarketConfig& cfg,
                          const BeliefParams& belief, bool* clamped) {
    const double at_a = a * award_sum(a, scheme, cfg, belief, cfg.risk);
    const double tol = 1e-9 * std::max(std::abs(at_a), 1.0);
    const double integral = integrate(
        [&](double y) { return award_sum(y, scheme, cfg, belief, cfg.risk); }, 0.0, a, tol);
    const double effort = at_a - integral;
    if (effort < 0.0) {
        if (clamped) *clamped = true;
        return 0.0;
    }
    return effort;
}

std::vector<double> coefficients_for(double a, const MarketConfig& cfg,
                                     const BeliefParams& belief) {
    std::vector<double> out(cfg.n_awards, 0.0);
    for (int m = 1; m <= cfg.n_awards; ++m) {
        const double at_a = a * rank_weight(capability_cdf(a, belief), m, cfg.n_transmitters);
        const double tol = 1e-9 * std::max(std::abs(at_a), 1.0);
        const double integral = integrate(
            [&](double y) {
                return rank_weight(capability_cdf(y, belief), m, cfg.n_transmitters);
            },
            0.0, a, tol);
        out[m - 1] = at_a - integral;
    }
    return out;
}

} // namespace

double capability(const TransmitterProfile& profile, const MarketConfig& cfg) {
    if (!(profile.data_rate_bps > 0.0)) {
        throw Error(Errc::invalid_argument, "data rate must be positive");
    }
    double cycle = 0.0;
    if (cfg.use_semantic) {
        if (!(profile.semantic_bits > 0.0) || !(profile.semantic_encode_time_s > 0.0) ||
            !(profile.recog_time_semantic_s > 0.0)) {
            throw Error(Errc::invalid_argument, "semantic profile fields must be positive");
        }
        cycle = profile.semantic_bits / profile.data_rate_bps + profile.semantic_encode_time_s +
                profile.recog_time_semantic_s;
    } else {
        if (!(profile.raw_bits > 0.0) || !(profile.recog_time_raw_s > 0.0)) {
            throw Error(Errc::invalid_argument, "raw profile fields must be positive");
        }
        cycle = profile.raw_bits / profile.data_rate_bps + profile.recog_time_raw_s;
    }
    return 1.0 / cycle;
}

BeliefParams belief_from(const TransmitterProfile& profile, const MarketConfig& cfg) {
    BeliefParams belief;
    belief.delta_bps = cfg.delta_bps;
    if (cfg.use_semantic) {
        belief.payload_bits = profile.semantic_bits;
        belief.encode_time_s = profile.semantic_encode_time_s;
        belief.recog_time_s = profile.recog_time_semantic_s;
    } else {
        belief.payload_bits = profile.raw_bits;
        belief.encode_time_s = 0.0;
        belief.recog_time_s = profile.recog_time_raw_s;
    }
    return belief;
}

double capability_cdf(double a, const BeliefParams& belief) {
    if (!(belief.payload_bits > 0.0) || !(belief.delta_bps > 0.0)) {
        throw Error(Errc::invalid_argument, "belief parameters must be positive");
    }
    if (a <= 0.0) return 0.0;
    const double cycle = belief_cycle_time(belief);
    const double sup = 1.0 / (belief.payload_bits / belief.delta_bps + cycle);
    if (a >= sup) return 1.0;
    return (a * belief.payload_bits) / (belief.delta_bps * (1.0 - a * cycle));
}

double expected_award(double a, const AwardScheme& scheme, const MarketConfig& cfg,
                      const BeliefParams& belief) {
    validate_market(cfg);
    validate_scheme(scheme, cfg);
    return award_sum(a, scheme, cfg, belief, cfg.risk);
}

double optimal_effort(const TransmitterProfile& profile, const AwardScheme& scheme,
                      const MarketConfig& cfg) {
    validate_market(cfg);
    validate_scheme(scheme, cfg);
    const double a = capability(profile, cfg);
    return effort_from_belief(a, scheme, cfg, belief_from(profile, cfg), nullptr);
}

std::vector<double> prize_coefficients(const TransmitterProfile& profile, const MarketConfig& cfg) {
    validate_market(cfg);
    return coefficients_for(capability(profile, cfg), cfg, belief_from(profile, cfg));
}

AwardScheme optimal_awards(const std::vector<TransmitterProfile>& profiles,
                           const MarketConfig& cfg) {
    validate_market(cfg);
    if (static_cast<int>(profiles.size()) != cfg.n_transmitters) {
        throw Error(Errc::invalid_config, "profile count must equal n_transmitters");
    }
    AwardScheme scheme;
    scheme.prizes.assign(cfg.n_awards, 0.0);
    if (cfg.risk == RiskPreference::neutral) {
        scheme.prizes[0] = cfg.total_award;
        return scheme;
    }

    // Risk-averse: rank-sum coefficients. Ranks whose coefficient sum is not
    // positive stay unfunded (a zero prize contributes zero utility).
    std::vector<double> sums(cfg.n_awards, 0.0);
    for (const auto& profile : profiles) {
        const auto coeffs = coefficients_for(capability(profile, cfg), cfg,
                                             belief_from(profile, cfg));
        for (int m = 0; m < cfg.n_awards; ++m) sums[m] += coeffs[m];
    }
    double funded_total = 0.0;
    for (double s : sums) {
        if (s > 0.0) funded_total += s;
    }
    if (!(funded_total > 0.0)) {
        throw Error(Errc::degenerate_coefficients, "no award rank has a positive coefficient sum");
    }
    for (int m = 0; m < cfg.n_awards; ++m) {
        scheme.prizes[m] = sums[m] > 0.0 ? cfg.total_award * sums[m] / funded_total : 0.0;
    }
    for (std::size_t i = 1; i < scheme.prizes.size(); ++i) {
        if (scheme.prizes[i] > scheme.prizes[i - 1] + 1e-12) {
            throw Error(Errc::degenerate_coefficients, "coefficient sums produce increasing prizes");
        }
    }
    return scheme;
}

EffortResult market_summary(const std::vector<TransmitterProfile>& profiles,
                            const MarketConfig& cfg, const AwardScheme& scheme) {
    validate_market(cfg);
    validate_scheme(scheme, cfg);
    EffortResult result;
    for (const auto& profile : profiles) {
        const double a = capability(profile, cfg);
        const BeliefParams belief = belief_from(profile, cfg);
        result.capabilities.push_back(a);
        result.efforts.push_back(effort_from_belief(a, scheme, cfg, belief, &result.clamped_any));
        result.expected_awards.push_back(award_sum(a, scheme, cfg, belief, cfg.risk));
        result.expected_award_values.push_back(
            award_sum(a, scheme, cfg, belief, RiskPreference::neutral));
        result.total_effort += result.efforts.back();
    }
    return result;
}

std::vector<AwardCountResult> sweep_award_counts(const std::vector<TransmitterProfile>& profiles,
                                                 const MarketConfig& cfg) {
    validate_market(cfg);
    std::vector<AwardCountResult> out;
    for (int n_awards = 1; n_awards <= cfg.n_transmitters; ++n_awards) {
        MarketConfig local = cfg;
        local.n_awards = n_awards;
        AwardCountResult row;
        row.n_awards = n_awards;
        row.scheme = optimal_awards(profiles, local);
        row.total_effort = market_summary(profiles, local, row.scheme).total_effort;
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<TransmitterProfile> table_profiles() {
    std::vector<TransmitterProfile> profiles;
    for (double rate : {7e6, 6e6, 5e6}) {
        TransmitterProfile p;
        p.data_rate_bps = rate;
        p.semantic_encode_time_s = 9.797e-3;
        p.recog_time_semantic_s = 5e-3;
        p.recog_time_raw_s = 5e-3;
        p.raw_bits = 96000.0;
        p.semantic_bits = 7200.0;
        profiles.push_back(p);
    }
    return profiles;
}

MarketConfig table_market() {
    MarketConfig cfg;
    cfg.n_transmitters = 3;
    cfg.n_awards = 2;
    cfg.total_award = 100.0;
    cfg.delta_bps = 8e6;
    cfg.risk = RiskPreference::neutral;
    cfg.use_semantic = true;
    return cfg;
}

} // namespace semsense
