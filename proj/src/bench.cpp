#include "ecgc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "ecgc/detail/counted.hpp"
#include "ecgc/detail/kernels.hpp"
#include "ecgc/errors.hpp"
#include "ecgc/metrics.hpp"
#include "ecgc/signal_io.hpp"

namespace ecgc {

namespace {

std::vector<double> complexity_probe_signal(std::size_t n) {
    SyntheticEcgSpec spec;
    spec.beats = static_cast<int>(n / 288 + 2);
    spec.noise_std_mv = 0.02;
    const EcgRecord record = synthesize_ecg(spec, 7u);
    std::vector<double> out(record.channels[0].samples.begin(),
                            record.channels[0].samples.begin() + n);
    return out;
}

} // namespace

ComplexityCounts count_complexity(CodecKind codec, int order) {
    using detail::Counted;
    constexpr std::size_t kSamples = 10000;
    const std::vector<double> signal = complexity_probe_signal(kSamples);
    const Codebook cb = uniform_codebook(-0.5, 0.5, 8);

    auto& counters = detail::op_counters();
    counters.reset();
    int memory_units = 0;

    switch (codec) {
        case CodecKind::diff: {
            detail::DiffKernel<Counted> kernel;
            kernel.init(cb, ModificationPolicy::table_gap, Counted(signal[0]));
            for (std::size_t i = 1; i < kSamples; ++i) kernel.step(Counted(signal[i]));
            memory_units = detail::DiffKernel<Counted>::memory_units;
            break;
        }
        case CodecKind::dpcm: {
            detail::ClosedLoopKernel<Counted> kernel;
            kernel.init(cb, {1.0}, {Counted(signal[0])});
            for (std::size_t i = 1; i < kSamples; ++i) kernel.step(Counted(signal[i]));
            memory_units = kernel.memory_units();
            break;
        }
        case CodecKind::lms: {
            detail::LmsKernel<Counted> kernel;
            std::vector<Counted> coeffs(static_cast<std::size_t>(order), Counted(0.0));
            std::vector<Counted> past;
            for (int p = 0; p < order; ++p) past.emplace_back(signal[order - 1 - p]);
            kernel.init(cb, 0.05, std::move(coeffs), std::move(past));
            for (std::size_t i = static_cast<std::size_t>(order); i < kSamples; ++i) {
                kernel.step(Counted(signal[i]));
            }
            memory_units = kernel.memory_units();
            break;
        }
        case CodecKind::olp: {
            // open loop: prediction over true past samples, residual against the input
            std::vector<Counted> window;
            for (int p = 0; p < order; ++p) window.emplace_back(signal[order - 1 - p]);
            const std::vector<double> coeffs(static_cast<std::size_t>(order),
                                             1.0 / static_cast<double>(order));
            for (std::size_t i = static_cast<std::size_t>(order); i < kSamples; ++i) {
                Counted pred = Counted(coeffs[0]) * window[0];
                for (int m = 1; m < order; ++m) pred = pred + Counted(coeffs[m]) * window[m];
                Counted e = pred - Counted(signal[i]);
                detail::quantize_value(cb, e);
                for (std::size_t m = window.size(); m-- > 1;) window[m] = window[m - 1];
                window[0] = Counted(signal[i]);
            }
            memory_units = order;
            break;
        }
        case CodecKind::cond: {
            // stateless per-sample bin search plus sub-codebook lookup
            memory_units = 0;
            break;
        }
    }

    ComplexityCounts counts;
    counts.adds = static_cast<int>(
        std::llround(static_cast<double>(counters.adds) / static_cast<double>(kSamples)));
    counts.muls = static_cast<int>(
        std::llround(static_cast<double>(counters.muls) / static_cast<double>(kSamples)));
    counts.memory_units = memory_units;
    return counts;
}

namespace {

struct CodecRun {
    EncodedStream stream;
    std::vector<double> reconstructed; // same grid as the evaluation slice
    std::uint64_t extra_bits = 0;      // e.g. periodic LMS coefficient refresh
};

// Baseline residual quantizer: uniform over the training prefix's amplitude
// range. The trained differential codebook is the proposed pipeline's own
// design; the baselines get the generic range-sized quantizer.
Codebook range_codebook(std::span<const double> train, int levels) {
    auto [mn, mx] = std::minmax_element(train.begin(), train.end());
    double lo = *mn, hi = *mx;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    return uniform_codebook(lo, hi, levels);
}

CodecRun run_codec(CodecKind codec, const EcgRecord& record, int w, const BenchOptions& options) {
    const auto& primary = record.channels[0].samples;
    const std::size_t half = primary.size() / 2;
    if (half < 16) throw ValidationError("record too short for a train/evaluate split");
    const std::span<const double> train(primary.data(), half);
    const std::span<const double> eval(primary.data() + half, primary.size() - half);
    const int levels = 1 << w;
    const double t0 = record.sample_period_s;

    CodecRun run;
    switch (codec) {
        case CodecKind::diff: {
            const Codebook cb = train_differential_codebook(train, levels, options.histogram_bins);
            const DiffEncoded enc = diff_encode(eval, cb);
            run.stream = to_stream(enc, t0);
            run.reconstructed = diff_decode(enc);
            break;
        }
        case CodecKind::dpcm: {
            const Codebook cb = range_codebook(train, levels);
            FirPredictor delta{{1.0}};
            const PredictiveEncoded enc = encode_closed_loop(eval, delta, cb);
            run.stream = to_stream(enc, delta, t0);
            run.reconstructed = decode_closed_loop(enc, delta);
            break;
        }
        case CodecKind::lms: {
            const Codebook cb = range_codebook(train, levels);
            LmsOptions lms;
            lms.step = options.lms_step;
            const LmsResult result = encode_lms(eval, options.lms_order, cb, lms);
            FirPredictor initial{std::vector<double>(static_cast<std::size_t>(options.lms_order), 0.0)};
            run.stream = to_stream(result.encoded, initial, t0, 1, options.lms_step);
            run.reconstructed = result.trace.reconstruction;
            if (options.lms_transmit_coeffs_every > 0) {
                const std::uint64_t refreshes =
                    (result.encoded.indices.size() +
                     static_cast<std::uint64_t>(options.lms_transmit_coeffs_every) - 1) /
                    static_cast<std::uint64_t>(options.lms_transmit_coeffs_every);
                run.extra_bits = refreshes * 64ull * static_cast<std::uint64_t>(options.lms_order);
            }
            break;
        }
        case CodecKind::olp: {
            const FirPredictor predictor = fit_fir_mmse(train, options.olp_order);
            const Codebook cb = range_codebook(train, levels);
            const PredictiveEncoded enc = encode_open_loop(eval, predictor, cb);
            run.stream = to_stream(enc, predictor, t0);
            run.reconstructed = decode_open_loop(enc, predictor);
            break;
        }
        case CodecKind::cond: {
            if (record.channels.size() < 2) {
                throw ValidationError("cond codec needs a two-channel record");
            }
            const auto& secondary_full = record.channels[1].samples;
            const std::span<const double> strain(secondary_full.data(), half);
            const std::span<const double> seval(secondary_full.data() + half,
                                                secondary_full.size() - half);
            const int n1 = 2;
            const auto pdf_p = fit_clipped_exponential(histogram(train, options.histogram_bins));
            const auto pdf_s = fit_clipped_exponential(histogram(strain, options.histogram_bins));
            const AffineMap affine = fit_affine(DensityView::of(pdf_p), DensityView::of(pdf_s));
            const ConditionalCodebook cond_cb = build_conditional_codebook(pdf_s, affine, n1, w);
            const Codebook primary_cb = train_differential_codebook(train, 1 << 8,
                                                                    options.histogram_bins);
            run.stream = encode_cond_pair(eval, seval, primary_cb, cond_cb, t0);
            const auto channels = decode_stream(run.stream);
            run.reconstructed = channels[1]; // the secondary channel is the scored one
            break;
        }
    }
    return run;
}

} // namespace

BenchReport run_benchmark(const std::vector<NamedRecord>& corpus,
                          const std::vector<CodecKind>& codecs, const std::vector<int>& widths,
                          const BenchOptions& options) {
    if (corpus.empty()) throw ValidationError("benchmark corpus is empty");
    std::map<CodecKind, ComplexityCounts> complexity;
    for (CodecKind codec : codecs) {
        complexity[codec] = count_complexity(codec, codec == CodecKind::lms ? options.lms_order
                                                                            : options.olp_order);
    }

    BenchReport report;
    for (const auto& named : corpus) {
        named.record.validate();
        for (CodecKind codec : codecs) {
            for (int w : widths) {
                BenchRow row;
                row.record = named.name;
                row.codec = codec_name(codec);
                row.w = w;
                row.complexity = complexity[codec];
                try {
                    const CodecRun run = run_codec(codec, named.record, w, options);
                    const auto& samples = codec == CodecKind::cond
                                              ? named.record.channels[1].samples
                                              : named.record.channels[0].samples;
                    const std::size_t half = samples.size() / 2;
                    const std::span<const double> eval(samples.data() + half,
                                                       samples.size() - half);
                    row.mse = mse(eval, run.reconstructed);
                    row.nmse = nmse(eval, run.reconstructed);
                    row.prd = prd(eval, run.reconstructed);
                    const std::uint64_t total_bits =
                        run.stream.payload_bits() + run.stream.header_bits() + run.extra_bits;
                    row.bits_per_sample =
                        static_cast<double>(total_bits) / static_cast<double>(eval.size());
                    row.rate_bps = row.bits_per_sample / named.record.sample_period_s;
                } catch (const std::exception& e) {
                    row.failed = true;
                    row.error = e.what();
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

std::string BenchReport::to_csv() const {
    std::string out =
        "record,codec,W,bits_per_sample,rate_bps,mse,nmse,prd,adds,muls,memory,status,error\n";
    char line[512];
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%s,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%s,%s\n",
                      row.record.c_str(), row.codec.c_str(), row.w, row.bits_per_sample,
                      row.rate_bps, row.mse, row.nmse, row.prd, row.complexity.adds,
                      row.complexity.muls, row.complexity.memory_units,
                      row.failed ? "failed" : "ok", row.error.c_str());
        out += line;
    }
    return out;
}

} // namespace ecgc
