#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semsense/semantic_codec.hpp"

namespace semsense {

std::string code_to_json(const SemanticCode& code);
SemanticCode code_from_json(const std::string& text);

// Packed little-endian layout matching payload_bits: header (order u8,
// mean_power, trace_len u16, sample_rate) then (a, f, theta) per basis.
// Values use float32 or float64 per feature_bits_per_value.
std::vector<std::uint8_t> pack_code(const SemanticCode& code, const CodecConfig& config = {});

struct DecodedCode {
    std::optional<SemanticCode> code; // nullopt: the link abstains
    int dropped_bases = 0;
};

// Decode with repair: bases with non-finite fields, amplitude outside
// [0, 1e6] or frequency outside [0, sample_rate/2] are dropped. A corrupted
// header or an empty surviving basis set yields an abstain.
DecodedCode unpack_code(std::span<const std::uint8_t> payload, const CodecConfig& config = {});

} // namespace semsense
