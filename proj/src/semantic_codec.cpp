#include "semsense/semantic_codec.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "semsense/errors.hpp"

namespace semsense {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_phase(double phase) {
    phase = std::fmod(phase, kTwoPi);
    if (phase < 0.0) phase += kTwoPi;
    return phase;
}

double rms(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

void require_vector_trace(const CfrPowerTrace& trace) {
    if (trace.samples.empty()) {
        throw Error(Errc::invalid_argument, "trace is empty");
    }
    if (trace.n_subcarriers != 1) {
        throw Error(Errc::invalid_argument, "operation expects a single-subcarrier trace");
    }
}

std::vector<std::complex<double>> fft_forward(const std::vector<double>& x) {
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, x);
    return spectrum;
}

// Seed read off the plain spectrum at bin k: amplitude 2|X|/N, frequency at
// the bin center, phase arg(X) + pi/2 (sine convention), wrapped.
SemanticBasis seed_from_bin(const std::vector<std::complex<double>>& spectrum, std::size_t k,
                            double sample_rate_hz, std::size_t n) {
    SemanticBasis seed;
    seed.amplitude = 2.0 * std::abs(spectrum[k]) / static_cast<double>(n);
    seed.frequency_hz = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n);
    seed.phase_rad = wrap_phase(std::arg(spectrum[k]) + M_PI / 2.0);
    return seed;
}

std::vector<double> model_series(const std::vector<SemanticBasis>& bases, double sample_rate_hz,
                                 std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (const auto& b : bases) {
        const double w = kTwoPi * b.frequency_hz / sample_rate_hz;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += b.amplitude * std::sin(w * static_cast<double>(i) + b.phase_rad);
        }
    }
    return out;
}

struct LmCore {
    std::vector<SemanticBasis> bases;
    double cost = 0.0; // sum of squared residuals
};

LmCore run_lm(const std::vector<double>& y, double sample_rate_hz,
              const std::vector<SemanticBasis>& seeds, const CodecConfig& config,
              int max_iterations) {
    const std::size_t n = y.size();
    const std::size_t m = seeds.size();
    Eigen::VectorXd params(3 * m);
    for (std::size_t i = 0; i < m; ++i) {
        params[3 * i] = seeds[i].amplitude;
        params[3 * i + 1] = seeds[i].frequency_hz;
        params[3 * i + 2] = seeds[i].phase_rad;
    }

    auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = y[i];
        for (std::size_t j = 0; j < m; ++j) {
            const double a = p[3 * j];
            const double w = kTwoPi * p[3 * j + 1] / sample_rate_hz;
            const double th = p[3 * j + 2];
            for (std::size_t i = 0; i < n; ++i) {
                r[i] -= a * std::sin(w * static_cast<double>(i) + th);
            }
        }
    };

    Eigen::VectorXd r;
    residual(params, r);
    double cost = r.squaredNorm();
    if (!std::isfinite(cost)) {
        throw Error(Errc::degenerate_fit, "initial residual is not finite");
    }

    double lambda = config.lm_initial_damping;
    const double factor = config.lm_damping_factor;
    Eigen::MatrixXd jac(n, 3 * m);

    for (int iter = 0; iter < max_iterations; ++iter) {
        for (std::size_t j = 0; j < m; ++j) {
            const double a = params[3 * j];
            const double freq = params[3 * j + 1];
            const double th = params[3 * j + 2];
            const double w = kTwoPi * freq / sample_rate_hz;
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) / sample_rate_hz;
                const double phase = kTwoPi * freq * t + th;
                const double s = std::sin(phase);
                const double c = std::cos(phase);
                jac(i, 3 * j) = s;
                jac(i, 3 * j + 1) = kTwoPi * t * a * c;
                jac(i, 3 * j + 2) = a * c;
            }
            (void)w;
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

        Eigen::MatrixXd damped = jtj;
        damped.diagonal() += lambda * diag;
        Eigen::VectorXd step = damped.ldlt().solve(grad);
        if (!step.allFinite()) {
            lambda *= factor;
            if (lambda > 1e12) {
                throw Error(Errc::degenerate_fit,
                            "normal equations singular beyond damping recovery");
            }
            continue;
        }
        Eigen::VectorXd trial = params + step;
        Eigen::VectorXd r_trial;
        residual(trial, r_trial);
        const double cost_trial = r_trial.squaredNorm();
        if (std::isfinite(cost_trial) && cost_trial < cost) {
            const double rel_change = (cost - cost_trial) / std::max(cost, 1e-300);
            params = trial;
            r = r_trial;
            cost = cost_trial;
            lambda = std::max(lambda / factor, 1e-12);
            if (rel_change < 1e-10) break;
        } else {
            lambda *= factor;
            if (lambda > 1e12) break;
        }
    }

    LmCore out;
    out.cost = cost;
    out.bases.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        double a = params[3 * j];
        double freq = params[3 * j + 1];
        double th = params[3 * j + 2];
        if (freq < 0.0) {
            freq = -freq;
            th = M_PI - th;
        }
        if (a < 0.0) {
            a = -a;
            th += M_PI;
        }
        out.bases[j] = {a, freq, wrap_phase(th)};
    }
    return out;
}

void sort_by_amplitude(std::vector<SemanticBasis>& bases) {
    std::stable_sort(bases.begin(), bases.end(),
                     [](const SemanticBasis& a, const SemanticBasis& b) {
                         return a.amplitude > b.amplitude;
                     });
}

// Drops all but the strongest of any group of bases closer than one FFT bin.
std::vector<SemanticBasis> drop_duplicate_frequencies(std::vector<SemanticBasis> bases,
                                                      double bin_width_hz) {
    sort_by_amplitude(bases);
    std::vector<SemanticBasis> kept;
    for (const auto& b : bases) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const SemanticBasis& k) {
            return std::abs(k.frequency_hz - b.frequency_hz) <= bin_width_hz;
        });
        if (!dup) kept.push_back(b);
    }
    return kept;
}

} // namespace

CfrPowerTrace pca_denoise(const CfrPowerTrace& trace, const CodecConfig& config) {
    if (trace.samples.empty()) {
        throw Error(Errc::invalid_argument, "trace is empty");
    }
    if (trace.n_subcarriers == 1) {
        return trace;
    }
    if (config.pca_component_index < 1 || config.pca_component_index > trace.n_subcarriers) {
        throw Error(Errc::invalid_index, "pca_component_index out of range");
    }
    const std::size_t n = trace.length();
    const int n_sub = trace.n_subcarriers;

    Eigen::MatrixXd data(n, n_sub);
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = 0; s < n_sub; ++s) {
            data(i, s) = trace.samples[i * n_sub + s];
        }
    }
    const Eigen::RowVectorXd means = data.colwise().mean();
    data.rowwise() -= means;

    const Eigen::MatrixXd cov = data.transpose() * data / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    // SelfAdjointEigenSolver sorts eigenvalues ascending; component 1 is last.
    const int col = n_sub - config.pca_component_index;
    Eigen::VectorXd axis = solver.eigenvectors().col(col);
    int strongest = 0;
    axis.cwiseAbs().maxCoeff(&strongest);
    if (axis[strongest] < 0.0) axis = -axis;

    CfrPowerTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.n_subcarriers = 1;
    out.label = trace.label;
    out.samples.resize(n);
    Eigen::VectorXd scores = data * axis;
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = scores[i];
    return out;
}

std::pair<CfrPowerTrace, double> remove_dc(const CfrPowerTrace& trace) {
    require_vector_trace(trace);
    const double mean = std::accumulate(trace.samples.begin(), trace.samples.end(), 0.0) /
                        static_cast<double>(trace.samples.size());
    CfrPowerTrace centered = trace;
    for (double& v : centered.samples) v -= mean;
    return {std::move(centered), mean};
}

OrderEstimate estimate_order(const CfrPowerTrace& centered, const CodecConfig& config) {
    require_vector_trace(centered);
    const std::size_t n = centered.samples.size();
    const std::size_t half = n / 2;
    if (half < 2) {
        throw Error(Errc::invalid_argument, "trace too short for order estimation");
    }

    std::vector<double> window(n);
    for (std::size_t i = 0; i < n; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
    }

    std::vector<double> residual = centered.samples;
    std::vector<double> windowed(n);
    std::vector<double> magnitudes;
    OrderEstimate estimate;
    double initial_peak = -1.0;

    while (estimate.order < config.max_order) {
        for (std::size_t i = 0; i < n; ++i) windowed[i] = residual[i] * window[i];
        const auto spectrum_w = fft_forward(windowed);

        std::size_t peak_bin = 1;
        double peak_mag = 0.0;
        magnitudes.assign(half, 0.0);
        for (std::size_t k = 1; k <= half; ++k) {
            const double mag = std::abs(spectrum_w[k]);
            magnitudes[k - 1] = mag;
            if (mag > peak_mag) {
                peak_mag = mag;
                peak_bin = k;
            }
        }
        if (initial_peak < 0.0) initial_peak = peak_mag;

        // Robust threshold on the windowed magnitude spectrum: median plus
        // four MAD-estimated sigmas (1.4826 consistency factor).
        std::vector<double> sorted = magnitudes;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double median = sorted[sorted.size() / 2];
        for (double& v : sorted) v = std::abs(v - median);
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double mad = sorted[sorted.size() / 2];
        const double threshold = median + 4.0 * 1.4826 * mad;

        const bool significant = peak_mag > threshold && peak_mag > 1e-9 * initial_peak;
        if (!significant && estimate.order > 0) break;

        const auto spectrum = fft_forward(residual);
        SemanticBasis seed = seed_from_bin(spectrum, peak_bin, centered.sample_rate_hz, n);
        // Refine the single component so its subtraction does not leave
        // leakage behind for the next extraction round.
        CodecConfig single = config;
        LmCore refined = run_lm(residual, centered.sample_rate_hz, {seed}, single, 60);
        const SemanticBasis b = refined.bases.front();
        const double w = kTwoPi * b.frequency_hz / centered.sample_rate_hz;
        for (std::size_t i = 0; i < n; ++i) {
            residual[i] -= b.amplitude * std::sin(w * static_cast<double>(i) + b.phase_rad);
        }
        estimate.seeds.push_back(b);
        estimate.order += 1;
        if (!significant) break; // fallback: keep the global maximum only
    }

    if (estimate.seeds.empty()) {
        // Zero trace: spectrum is empty of structure, seed the first bin.
        const auto spectrum = fft_forward(residual);
        estimate.seeds.push_back(seed_from_bin(spectrum, 1, centered.sample_rate_hz, n));
        estimate.order = 1;
    }
    return estimate;
}

FitResult lm_fit(const CfrPowerTrace& centered, const std::vector<SemanticBasis>& seeds,
                 const CodecConfig& config) {
    require_vector_trace(centered);
    if (seeds.empty()) {
        throw Error(Errc::invalid_argument, "lm_fit needs at least one seed");
    }
    if (centered.samples.size() <= 3 * seeds.size()) {
        throw Error(Errc::invalid_argument, "trace length must exceed 3x the seed count");
    }
    LmCore core = run_lm(centered.samples, centered.sample_rate_hz, seeds, config,
                         config.lm_max_inner_iterations);
    FitResult out;
    out.bases = std::move(core.bases);
    sort_by_amplitude(out.bases);
    const double denom = rms(centered.samples);
    out.fit_nrmse =
        denom > 0.0 ? std::sqrt(core.cost / static_cast<double>(centered.samples.size())) / denom : 0.0;
    return out;
}

namespace {

// Fit + frequency dedupe + significance prune. A basis buried below the fit
// residual is noise bookkeeping, not signal content.
FitResult clean_fit(const CfrPowerTrace& centered, std::vector<SemanticBasis> seeds,
                    const CodecConfig& config) {
    const double bin_width = centered.sample_rate_hz / static_cast<double>(centered.samples.size());
    FitResult fit = lm_fit(centered, seeds, config);

    auto deduped = drop_duplicate_frequencies(fit.bases, bin_width);
    if (deduped.size() < fit.bases.size()) {
        fit = lm_fit(centered, deduped, config);
    }

    const auto model = model_series(fit.bases, centered.sample_rate_hz, centered.samples.size());
    std::vector<double> residual(centered.samples.size());
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = centered.samples[i] - model[i];
    const double resid_rms = rms(residual);
    const double top = fit.bases.front().amplitude;
    const double floor = std::max(1e-7 * top, 0.25 * resid_rms);

    std::vector<SemanticBasis> kept;
    for (const auto& b : fit.bases) {
        if (b.amplitude >= floor) kept.push_back(b);
    }
    if (kept.empty()) kept.push_back(fit.bases.front());
    if (kept.size() < fit.bases.size()) {
        fit = lm_fit(centered, kept, config);
    }
    return fit;
}

} // namespace

SemanticCode encode(const CfrPowerTrace& trace, const CodecConfig& config) {
    if (trace.samples.empty()) {
        throw Error(Errc::invalid_argument, "trace is empty");
    }
    if (config.fit_error_threshold <= 0.0 || config.fit_error_threshold >= 1.0 ||
        config.max_order < 1) {
        throw Error(Errc::invalid_config, "codec config out of range");
    }

    const CfrPowerTrace denoised = pca_denoise(trace, config);
    auto [centered, mean_power] = remove_dc(denoised);
    const std::size_t n = centered.samples.size();
    const double bin_width = centered.sample_rate_hz / static_cast<double>(n);

    SemanticCode code;
    code.mean_power = mean_power;
    code.sample_rate_hz = centered.sample_rate_hz;
    code.trace_len = static_cast<std::uint32_t>(n);

    if (rms(centered.samples) <= 1e-12 * std::max(1.0, std::abs(mean_power))) {
        code.bases.push_back({0.0, bin_width, 0.0});
        code.order = 1;
        code.fit_nrmse = 0.0;
        return code;
    }

    OrderEstimate estimate = estimate_order(centered, config);
    FitResult fit = clean_fit(centered, estimate.seeds, config);
    FitResult best = fit;

    int outer = 0;
    while (fit.fit_nrmse > config.fit_error_threshold && outer < config.max_outer_iterations &&
           static_cast<int>(fit.bases.size()) < config.max_order) {
        ++outer;
        // order = order + 1: seed the strongest unexplained residual peak.
        const auto model = model_series(fit.bases, centered.sample_rate_hz, n);
        std::vector<double> residual(n);
        for (std::size_t i = 0; i < n; ++i) residual[i] = centered.samples[i] - model[i];
        const auto spectrum = fft_forward(residual);

        std::size_t best_bin = 0;
        double best_mag = -1.0;
        for (std::size_t k = 1; k <= n / 2; ++k) {
            const double freq = static_cast<double>(k) * centered.sample_rate_hz / static_cast<double>(n);
            const bool taken = std::any_of(fit.bases.begin(), fit.bases.end(),
                                           [&](const SemanticBasis& b) {
                                               return std::abs(b.frequency_hz - freq) <= bin_width;
                                           });
            if (taken) continue;
            const double mag = std::abs(spectrum[k]);
            if (mag > best_mag) {
                best_mag = mag;
                best_bin = k;
            }
        }
        if (best_bin == 0) break;

        auto seeds = fit.bases;
        seeds.push_back(seed_from_bin(spectrum, best_bin, centered.sample_rate_hz, n));
        FitResult next = clean_fit(centered, seeds, config);
        if (next.fit_nrmse < best.fit_nrmse) {
            best = next;
        }
        if (next.bases.size() <= fit.bases.size() && next.fit_nrmse >= fit.fit_nrmse) {
            break; // refinement stalled
        }
        fit = std::move(next);
    }

    code.bases = best.bases;
    sort_by_amplitude(code.bases);
    code.order = static_cast<int>(code.bases.size());
    code.fit_nrmse = best.fit_nrmse;
    return code;
}

CfrPowerTrace reconstruct(const SemanticCode& code) {
    if (code.trace_len == 0 || !(code.sample_rate_hz > 0.0)) {
        throw Error(Errc::invalid_argument, "code has no sampling geometry");
    }
    CfrPowerTrace out;
    out.sample_rate_hz = code.sample_rate_hz;
    out.n_subcarriers = 1;
    out.samples = model_series(code.bases, code.sample_rate_hz, code.trace_len);
    for (double& v : out.samples) v += code.mean_power;
    return out;
}

std::int64_t payload_bits(const SemanticCode& code, const CodecConfig& config) {
    const std::int64_t value_bits = config.feature_bits_per_value;
    return static_cast<std::int64_t>(code.order) * 3 * value_bits // bases
           + 8                                                    // order
           + value_bits                                           // mean_power
           + 16                                                   // trace_len
           + value_bits;                                          // sample_rate
}

} // namespace semsense
