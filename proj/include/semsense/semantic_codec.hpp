#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "semsense/signal_model.hpp"

namespace semsense {

// One sinusoidal semantic base: A sin(2 pi F t + theta). Canonical form has
// amplitude >= 0, frequency_hz >= 0 and phase_rad in [0, 2 pi).
struct SemanticBasis {
    double amplitude = 0.0;
    double frequency_hz = 0.0;
    double phase_rad = 0.0;
};

struct SemanticCode {
    std::vector<SemanticBasis> bases; // sorted by descending amplitude
    int order = 0;                    // == bases.size()
    double mean_power = 0.0;          // removed DC level
    double fit_nrmse = 0.0;           // normalized RMSE at termination
    double sample_rate_hz = 0.0;
    std::uint32_t trace_len = 0;
};

struct CodecConfig {
    double fit_error_threshold = 0.10; // T1, normalized RMSE
    int max_outer_iterations = 20;     // T2
    int max_order = 16;
    int pca_component_index = 1; // 1-based; which PC score series to fit
    int lm_max_inner_iterations = 200;
    double lm_initial_damping = 1e-3;
    double lm_damping_factor = 10.0;
    int feature_bits_per_value = 32;
};

struct OrderEstimate {
    int order = 0;
    std::vector<SemanticBasis> seeds;
};

struct FitResult {
    std::vector<SemanticBasis> bases;
    double fit_nrmse = 0.0;
};

// PCA view of a (time x subcarrier) trace: subtract per-subcarrier means and
// return the requested principal-component score series. No-op on vectors.
CfrPowerTrace pca_denoise(const CfrPowerTrace& trace, const CodecConfig& config);

std::pair<CfrPowerTrace, double> remove_dc(const CfrPowerTrace& trace);

// FFT-based order estimation: components are extracted from the residual
// spectrum while the strongest peak clears a robust noise threshold.
OrderEstimate estimate_order(const CfrPowerTrace& centered, const CodecConfig& config);

// Damped least squares on the sinusoid-sum model with the analytic Jacobian.
FitResult lm_fit(const CfrPowerTrace& centered, const std::vector<SemanticBasis>& seeds,
                 const CodecConfig& config);

SemanticCode encode(const CfrPowerTrace& trace, const CodecConfig& config = {});

CfrPowerTrace reconstruct(const SemanticCode& code);

std::int64_t payload_bits(const SemanticCode& code, const CodecConfig& config = {});

} // namespace semsense
