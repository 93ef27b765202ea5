#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecgc/conditional_codec.hpp"
#include "ecgc/diff_codec.hpp"
#include "ecgc/predictors.hpp"

namespace ecgc {

enum class CodecKind : std::uint8_t { diff = 0, olp = 1, dpcm = 2, lms = 3, cond = 4 };

const char* codec_name(CodecKind kind);
CodecKind codec_from_name(const std::string& name);

/// Container shared by every codec: a header carrying the uncompressed seed
/// samples, codec parameters and the codebook, followed by fixed-width
/// indices packed big-endian within bytes. payload_bits() is exactly
/// index count x bits-per-index; header bits are accounted separately
/// (64 per warmup sample).
struct EncodedStream {
    CodecKind codec = CodecKind::diff;
    std::uint32_t k = 1;      // downsampling factor of the encoded samples
    double t0_s = 1.0 / 360.0;
    std::vector<double> warmup;        // initial/warmup samples
    std::vector<double> coefficients;  // predictor coefficients (olp/dpcm/lms)
    double lms_step = 0.0;
    std::string codebook_json;         // Codebook or ConditionalCodebook JSON
    std::vector<std::uint32_t> indices;
    std::vector<std::uint8_t> embedded; // cond: serialized primary stream

    int w_bits = 0; // bits per index, ceil(log2 L)

    std::uint64_t payload_bits() const {
        return static_cast<std::uint64_t>(indices.size()) * static_cast<std::uint64_t>(w_bits);
    }
    std::uint64_t header_bits() const { return 64ull * warmup.size(); }
};

std::vector<std::uint8_t> serialize(const EncodedStream& stream);
EncodedStream deserialize(std::span<const std::uint8_t> bytes);

EncodedStream to_stream(const DiffEncoded& enc, double t0_s, std::uint32_t k = 1);
EncodedStream to_stream(const PredictiveEncoded& enc, const FirPredictor& predictor, double t0_s,
                        std::uint32_t k = 1, double lms_step = 0.0);

DiffEncoded diff_from_stream(const EncodedStream& stream);
PredictiveEncoded predictive_from_stream(const EncodedStream& stream, FirPredictor& predictor_out);

/// Two-sensor pipeline: differential primary stream embedded next to the
/// conditionally quantized secondary indices (n2 bits per sample).
EncodedStream encode_cond_pair(std::span<const double> primary, std::span<const double> secondary,
                               const Codebook& primary_codebook, const ConditionalCodebook& cond_cb,
                               double t0_s, std::uint32_t k = 1);

/// Decode any stream to the reconstructed samples at the transmitted period.
/// A cond stream decodes its embedded primary stream first and returns
/// {primary, secondary}; everything else returns one channel.
std::vector<std::vector<double>> decode_stream(const EncodedStream& stream);

// fixed-width big-endian-within-byte index packing
std::vector<std::uint8_t> pack_indices(std::span<const std::uint32_t> indices, int width_bits);
std::vector<std::uint32_t> unpack_indices(std::span<const std::uint8_t> bytes, std::size_t count,
                                          int width_bits);

} // namespace ecgc
