#include "ecgc/encoded_stream.hpp"

#include <cstring>

#include "ecgc/errors.hpp"

namespace ecgc {

namespace {

constexpr char kMagic[4] = {'E', 'C', 'S', '1'};
constexpr std::uint8_t kVersion = 1;

struct Writer {
    std::vector<std::uint8_t> bytes;

    void u8(std::uint8_t v) { bytes.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    void blob(std::span<const std::uint8_t> v) { bytes.insert(bytes.end(), v.begin(), v.end()); }
};

struct Reader {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;

    void need(std::size_t n) {
        if (pos + n > bytes.size()) throw CorruptStreamError("stream truncated");
    }
    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::vector<std::uint8_t> blob(std::size_t n) {
        need(n);
        std::vector<std::uint8_t> out(bytes.begin() + pos, bytes.begin() + pos + n);
        pos += n;
        return out;
    }
};

} // namespace

const char* codec_name(CodecKind kind) {
    switch (kind) {
        case CodecKind::diff: return "diff";
        case CodecKind::olp: return "olp";
        case CodecKind::dpcm: return "dpcm";
        case CodecKind::lms: return "lms";
        case CodecKind::cond: return "cond";
    }
    return "?";
}

CodecKind codec_from_name(const std::string& name) {
    if (name == "diff") return CodecKind::diff;
    if (name == "olp") return CodecKind::olp;
    if (name == "dpcm") return CodecKind::dpcm;
    if (name == "lms") return CodecKind::lms;
    if (name == "cond") return CodecKind::cond;
    throw ValidationError("unknown codec '" + name + "'");
}

std::vector<std::uint8_t> pack_indices(std::span<const std::uint32_t> indices, int width_bits) {
    if (width_bits < 1 || width_bits > 32) throw ValidationError("index width must be in [1, 32]");
    const std::uint64_t total_bits = static_cast<std::uint64_t>(indices.size()) * width_bits;
    std::vector<std::uint8_t> bytes((total_bits + 7) / 8, 0);
    std::uint64_t pos = 0;
    for (std::uint32_t value : indices) {
        for (int b = width_bits - 1; b >= 0; --b) {
            const std::uint32_t bit = (value >> b) & 1u;
            bytes[pos >> 3] |= static_cast<std::uint8_t>(bit << (7 - (pos & 7)));
            ++pos;
        }
    }
    return bytes;
}

std::vector<std::uint32_t> unpack_indices(std::span<const std::uint8_t> bytes, std::size_t count,
                                          int width_bits) {
    if (width_bits < 1 || width_bits > 32) throw ValidationError("index width must be in [1, 32]");
    const std::uint64_t total_bits = static_cast<std::uint64_t>(count) * width_bits;
    if (total_bits > static_cast<std::uint64_t>(bytes.size()) * 8) {
        throw CorruptStreamError("index payload shorter than the declared bit count");
    }
    std::vector<std::uint32_t> indices(count, 0);
    std::uint64_t pos = 0;
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t value = 0;
        for (int b = 0; b < width_bits; ++b) {
            const std::uint32_t bit = (bytes[pos >> 3] >> (7 - (pos & 7))) & 1u;
            value = (value << 1) | bit;
            ++pos;
        }
        indices[i] = value;
    }
    return indices;
}

std::vector<std::uint8_t> serialize(const EncodedStream& stream) {
    Writer w;
    w.blob(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(stream.codec));
    w.u16(static_cast<std::uint16_t>(stream.w_bits));
    w.u32(stream.k);
    w.f64(stream.t0_s);
    w.u32(static_cast<std::uint32_t>(stream.warmup.size()));
    for (double v : stream.warmup) w.f64(v);
    w.u32(static_cast<std::uint32_t>(stream.coefficients.size()));
    for (double v : stream.coefficients) w.f64(v);
    w.f64(stream.lms_step);
    w.u32(static_cast<std::uint32_t>(stream.codebook_json.size()));
    w.blob(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(stream.codebook_json.data()),
        stream.codebook_json.size()));
    w.u32(static_cast<std::uint32_t>(stream.embedded.size()));
    w.blob(stream.embedded);
    w.u64(stream.indices.size());
    const auto payload = pack_indices(stream.indices, stream.w_bits);
    w.blob(payload);
    return std::move(w.bytes);
}

EncodedStream deserialize(std::span<const std::uint8_t> bytes) {
    Reader r{bytes};
    const auto magic = r.blob(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw CorruptStreamError("bad stream magic, expected ECS1");
    }
    if (r.u8() != kVersion) throw CorruptStreamError("unsupported stream version");

    EncodedStream s;
    const std::uint8_t codec = r.u8();
    if (codec > static_cast<std::uint8_t>(CodecKind::cond)) {
        throw CorruptStreamError("unknown codec tag in stream");
    }
    s.codec = static_cast<CodecKind>(codec);
    s.w_bits = r.u16();
    s.k = r.u32();
    s.t0_s = r.f64();
    const std::uint32_t warmup_count = r.u32();
    s.warmup.reserve(warmup_count);
    for (std::uint32_t i = 0; i < warmup_count; ++i) s.warmup.push_back(r.f64());
    const std::uint32_t coeff_count = r.u32();
    s.coefficients.reserve(coeff_count);
    for (std::uint32_t i = 0; i < coeff_count; ++i) s.coefficients.push_back(r.f64());
    s.lms_step = r.f64();
    const std::uint32_t json_len = r.u32();
    const auto json_bytes = r.blob(json_len);
    s.codebook_json.assign(json_bytes.begin(), json_bytes.end());
    const std::uint32_t embedded_len = r.u32();
    s.embedded = r.blob(embedded_len);
    const std::uint64_t index_count = r.u64();
    const std::uint64_t payload_bits = index_count * static_cast<std::uint64_t>(s.w_bits);
    const auto payload = r.blob((payload_bits + 7) / 8);
    s.indices = unpack_indices(payload, index_count, s.w_bits);
    if (r.pos != bytes.size()) throw CorruptStreamError("trailing bytes after the index payload");
    return s;
}

EncodedStream to_stream(const DiffEncoded& enc, double t0_s, std::uint32_t k) {
    EncodedStream s;
    s.codec = CodecKind::diff;
    s.k = k;
    s.t0_s = t0_s;
    s.warmup = {enc.initial};
    s.codebook_json = enc.codebook.to_json();
    s.indices = enc.indices;
    s.w_bits = enc.codebook.bits_per_index();
    return s;
}

EncodedStream to_stream(const PredictiveEncoded& enc, const FirPredictor& predictor, double t0_s,
                        std::uint32_t k, double lms_step) {
    EncodedStream s;
    if (enc.loop_mode == LoopMode::open) {
        s.codec = CodecKind::olp;
    } else {
        s.codec = lms_step > 0.0 ? CodecKind::lms : CodecKind::dpcm;
    }
    s.k = k;
    s.t0_s = t0_s;
    s.warmup = enc.warmup;
    s.coefficients = predictor.coefficients; // initial coefficients for lms
    s.lms_step = lms_step;
    s.codebook_json = enc.codebook.to_json();
    s.indices = enc.indices;
    s.w_bits = enc.codebook.bits_per_index();
    return s;
}

DiffEncoded diff_from_stream(const EncodedStream& stream) {
    if (stream.codec != CodecKind::diff) throw ValidationError("stream does not hold a diff codec");
    if (stream.warmup.size() != 1) throw CorruptStreamError("diff stream needs one seed sample");
    DiffEncoded enc;
    enc.initial = stream.warmup[0];
    enc.indices = stream.indices;
    enc.codebook = Codebook::from_json(stream.codebook_json);
    return enc;
}

PredictiveEncoded predictive_from_stream(const EncodedStream& stream, FirPredictor& predictor_out) {
    if (stream.codec != CodecKind::olp && stream.codec != CodecKind::dpcm &&
        stream.codec != CodecKind::lms) {
        throw ValidationError("stream does not hold a predictive codec");
    }
    PredictiveEncoded enc;
    enc.loop_mode = stream.codec == CodecKind::olp ? LoopMode::open : LoopMode::closed;
    enc.warmup = stream.warmup;
    enc.indices = stream.indices;
    enc.codebook = Codebook::from_json(stream.codebook_json);
    predictor_out.coefficients = stream.coefficients;
    return enc;
}

EncodedStream encode_cond_pair(std::span<const double> primary, std::span<const double> secondary,
                               const Codebook& primary_codebook, const ConditionalCodebook& cond_cb,
                               double t0_s, std::uint32_t k) {
    if (primary.size() != secondary.size()) {
        throw ValidationError("primary and secondary channels must have equal length");
    }
    const DiffEncoded primary_enc = diff_encode(primary, primary_codebook);
    EncodedStream s;
    s.codec = CodecKind::cond;
    s.k = k;
    s.t0_s = t0_s;
    s.codebook_json = cond_cb.to_json();
    s.embedded = serialize(to_stream(primary_enc, t0_s, k));
    s.indices.reserve(secondary.size());
    for (double v : secondary) s.indices.push_back(cond_encode(v, cond_cb));
    s.w_bits = cond_cb.n2;
    return s;
}

std::vector<std::vector<double>> decode_stream(const EncodedStream& stream) {
    switch (stream.codec) {
        case CodecKind::diff:
            return {diff_decode(diff_from_stream(stream))};
        case CodecKind::olp: {
            FirPredictor predictor;
            const auto enc = predictive_from_stream(stream, predictor);
            return {decode_open_loop(enc, predictor)};
        }
        case CodecKind::dpcm: {
            FirPredictor predictor;
            const auto enc = predictive_from_stream(stream, predictor);
            return {decode_closed_loop(enc, predictor)};
        }
        case CodecKind::lms: {
            FirPredictor predictor;
            const auto enc = predictive_from_stream(stream, predictor);
            LmsOptions options;
            options.step = stream.lms_step;
            options.initial = predictor.coefficients;
            return {decode_lms(enc, static_cast<int>(predictor.coefficients.size()), options)};
        }
        case CodecKind::cond: {
            const EncodedStream primary_stream = deserialize(stream.embedded);
            auto channels = decode_stream(primary_stream);
            if (channels.size() != 1) throw CorruptStreamError("cond stream must embed one channel");
            const auto cond_cb = ConditionalCodebook::from_json(stream.codebook_json);
            const auto& primary_rec = channels[0];
            if (primary_rec.size() != stream.indices.size()) {
                throw CorruptStreamError("secondary index count does not match the primary length");
            }
            std::vector<double> secondary;
            secondary.reserve(stream.indices.size());
            for (std::size_t i = 0; i < stream.indices.size(); ++i) {
                secondary.push_back(cond_decode(stream.indices[i], primary_rec[i], cond_cb));
            }
            channels.push_back(std::move(secondary));
            return channels;
        }
    }
    throw ValidationError("unknown codec kind");
}

} // namespace ecgc
