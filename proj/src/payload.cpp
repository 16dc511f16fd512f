#include "semsense/payload.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "semsense/errors.hpp"

namespace semsense {

namespace {

using nlohmann::json;

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

void append_value(std::vector<std::uint8_t>& out, double v, int bits) {
    if (bits == 32) {
        const float f = static_cast<float>(v);
        const auto raw = std::bit_cast<std::uint32_t>(f);
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((raw >> (8 * i)) & 0xff));
    } else {
        const auto raw = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((raw >> (8 * i)) & 0xff));
    }
}

std::uint16_t read_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

double read_value(std::span<const std::uint8_t> in, std::size_t at, int bits) {
    if (bits == 32) {
        std::uint32_t raw = 0;
        for (int i = 0; i < 4; ++i) raw |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
        return static_cast<double>(std::bit_cast<float>(raw));
    }
    std::uint64_t raw = 0;
    for (int i = 0; i < 8; ++i) raw |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    return std::bit_cast<double>(raw);
}

int checked_value_bits(const CodecConfig& config) {
    if (config.feature_bits_per_value != 32 && config.feature_bits_per_value != 64) {
        throw Error(Errc::invalid_config, "feature_bits_per_value must be 32 or 64");
    }
    return config.feature_bits_per_value;
}

double wrap_phase(double phase) {
    phase = std::fmod(phase, 2.0 * M_PI);
    if (phase < 0.0) phase += 2.0 * M_PI;
    return phase;
}

} // namespace

std::string code_to_json(const SemanticCode& code) {
    json doc;
    doc["order"] = code.order;
    doc["mean_power"] = code.mean_power;
    doc["sample_rate_hz"] = code.sample_rate_hz;
    doc["trace_len"] = code.trace_len;
    doc["fit_nrmse"] = code.fit_nrmse;
    doc["bases"] = json::array();
    for (const auto& b : code.bases) {
        doc["bases"].push_back({{"a", b.amplitude}, {"f", b.frequency_hz}, {"theta", b.phase_rad}});
    }
    return doc.dump(2);
}

SemanticCode code_from_json(const std::string& text) {
    SemanticCode code;
    try {
        const json doc = json::parse(text);
        code.order = doc.at("order").get<int>();
        code.mean_power = doc.at("mean_power").get<double>();
        code.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
        code.trace_len = doc.at("trace_len").get<std::uint32_t>();
        code.fit_nrmse = doc.at("fit_nrmse").get<double>();
        for (const auto& item : doc.at("bases")) {
            code.bases.push_back({item.at("a").get<double>(), item.at("f").get<double>(),
                                  item.at("theta").get<double>()});
        }
    } catch (const json::exception& e) {
        throw Error(Errc::schema_mismatch, std::string("semantic code JSON: ") + e.what());
    }
    if (code.order != static_cast<int>(code.bases.size())) {
        throw Error(Errc::schema_mismatch, "order does not match the basis count");
    }
    return code;
}

std::vector<std::uint8_t> pack_code(const SemanticCode& code, const CodecConfig& config) {
    const int bits = checked_value_bits(config);
    if (code.order < 0 || code.order > 255 || code.order != static_cast<int>(code.bases.size())) {
        throw Error(Errc::invalid_argument, "code order must fit one byte and match the bases");
    }
    if (code.trace_len > 0xffff) {
        throw Error(Errc::invalid_argument, "trace_len does not fit the 16-bit header field");
    }
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(payload_bits(code, config)) / 8);
    out.push_back(static_cast<std::uint8_t>(code.order));
    append_value(out, code.mean_power, bits);
    append_u16(out, static_cast<std::uint16_t>(code.trace_len));
    append_value(out, code.sample_rate_hz, bits);
    for (const auto& b : code.bases) {
        append_value(out, b.amplitude, bits);
        append_value(out, b.frequency_hz, bits);
        append_value(out, b.phase_rad, bits);
    }
    return out;
}

DecodedCode unpack_code(std::span<const std::uint8_t> payload, const CodecConfig& config) {
    const int bits = checked_value_bits(config);
    const std::size_t value_bytes = static_cast<std::size_t>(bits) / 8;
    const std::size_t header_bytes = 1 + value_bytes + 2 + value_bytes;
    const std::size_t basis_bytes = 3 * value_bytes;

    DecodedCode out;
    if (payload.size() < header_bytes ||
        (payload.size() - header_bytes) % basis_bytes != 0) {
        throw Error(Errc::schema_mismatch, "payload size does not match the packed layout");
    }
    // Bit flips preserve length, so the basis count comes from the byte count;
    // the order byte is advisory once the payload has crossed the channel.
    const std::size_t count = (payload.size() - header_bytes) / basis_bytes;

    SemanticCode code;
    code.mean_power = read_value(payload, 1, bits);
    code.trace_len = read_u16(payload, 1 + value_bytes);
    code.sample_rate_hz = read_value(payload, 1 + value_bytes + 2, bits);
    code.fit_nrmse = 0.0; // not transmitted

    if (!std::isfinite(code.mean_power) || !std::isfinite(code.sample_rate_hz) ||
        !(code.sample_rate_hz > 0.0) || code.trace_len == 0) {
        out.dropped_bases = static_cast<int>(count);
        return out;
    }

    const double nyquist = code.sample_rate_hz / 2.0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t at = header_bytes + i * basis_bytes;
        SemanticBasis b;
        b.amplitude = read_value(payload, at, bits);
        b.frequency_hz = read_value(payload, at + value_bytes, bits);
        b.phase_rad = read_value(payload, at + 2 * value_bytes, bits);
        const bool finite = std::isfinite(b.amplitude) && std::isfinite(b.frequency_hz) &&
                            std::isfinite(b.phase_rad);
        if (!finite || b.amplitude < 0.0 || b.amplitude > 1e6 || b.frequency_hz < 0.0 ||
            b.frequency_hz > nyquist) {
            out.dropped_bases += 1;
            continue;
        }
        b.phase_rad = wrap_phase(b.phase_rad);
        code.bases.push_back(b);
    }
    if (code.bases.empty()) {
        return out;
    }
    code.order = static_cast<int>(code.bases.size());
    out.code = std::move(code);
    return out;
}

} // namespace semsense
