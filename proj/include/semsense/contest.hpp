#pragma once

#include <string>
#include <vector>

namespace semsense {

// Per-transmitter timing and payload description. Capability is the inverse
// of one full sense-encode-transmit-recognize cycle.
struct TransmitterProfile {
    double data_rate_bps = 0.0;        // C_n
    double semantic_encode_time_s = 0.0; // T_S
    double recog_time_semantic_s = 0.0;  // recognition time on semantic bases
    double recog_time_raw_s = 0.0;       // recognition time on raw sensing data
    double raw_bits = 0.0;               // D
    double semantic_bits = 0.0;          // D_S
};

enum class RiskPreference { neutral, averse };

struct MarketConfig {
    int n_transmitters = 3;
    int n_awards = 2;
    double total_award = 100.0;
    double delta_bps = 8e6; // estimated maximum data rate
    RiskPreference risk = RiskPreference::neutral;
    bool use_semantic = true;
};

// Population-belief parameters shared by all rivals: rival data rate is
// uniform on (0, delta) and the remaining cycle terms are common.
struct BeliefParams {
    double payload_bits = 0.0;
    double encode_time_s = 0.0;
    double recog_time_s = 0.0;
    double delta_bps = 0.0;
};

struct AwardScheme {
    std::vector<double> prizes; // non-increasing, sum <= total award
};

struct EffortResult {
    std::vector<double> capabilities;
    std::vector<double> efforts;
    std::vector<double> expected_awards;       // R(a_n), utility-weighted
    std::vector<double> expected_award_values; // monetary expectation
    double total_effort = 0.0;
    bool clamped_any = false; // some raw effort was negative and clamped to 0
};

double capability(const TransmitterProfile& profile, const MarketConfig& cfg);

BeliefParams belief_from(const TransmitterProfile& profile, const MarketConfig& cfg);

// CDF of rival capability implied by the uniform data-rate belief;
// G(capability(C)) == C / delta on 0 < C < delta.
double capability_cdf(double a, const BeliefParams& belief);

// Expected award of a transmitter with capability a (rank-order contest
// with N_T - 1 rivals); u(r) = r when neutral, ln(r) when averse, and a
// zero prize contributes zero.
double expected_award(double a, const AwardScheme& scheme, const MarketConfig& cfg,
                      const BeliefParams& belief);

// a R(a) - int_0^a R(y) dy by adaptive quadrature, clamped at zero.
double optimal_effort(const TransmitterProfile& profile, const AwardScheme& scheme,
                      const MarketConfig& cfg);

// Utility-independent coefficients F(a, m), m = 1..n_awards, such that the
// optimal effort is sum_m u(r_m) F(a, m).
std::vector<double> prize_coefficients(const TransmitterProfile& profile, const MarketConfig& cfg);

// Risk-neutral: winner-take-all. Risk-averse: prizes proportional to the
// per-rank coefficient sums over the ranks where those sums are positive.
AwardScheme optimal_awards(const std::vector<TransmitterProfile>& profiles,
                           const MarketConfig& cfg);

EffortResult market_summary(const std::vector<TransmitterProfile>& profiles,
                            const MarketConfig& cfg, const AwardScheme& scheme);

struct AwardCountResult {
    int n_awards = 0;
    AwardScheme scheme;
    double total_effort = 0.0;
};

// Evaluates the risk-appropriate optimal scheme for every award count
// 1..n_transmitters.
std::vector<AwardCountResult> sweep_award_counts(const std::vector<TransmitterProfile>& profiles,
                                                 const MarketConfig& cfg);

// Table II defaults: T_S = 9.797 ms, recognition 5 ms, D = 96000,
// D_S = 7200, delta = 8 Mbps, rates 7/6/5 Mbps.
std::vector<TransmitterProfile> table_profiles();
MarketConfig table_market();

} // namespace semsense
