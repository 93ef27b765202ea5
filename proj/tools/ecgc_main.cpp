#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ecgc/bench.hpp"
#include "ecgc/encoded_stream.hpp"
#include "ecgc/errors.hpp"
#include "ecgc/metrics.hpp"
#include "ecgc/rate_optimizer.hpp"
#include "ecgc/signal_io.hpp"
#include "ecgc/stability.hpp"

namespace {

using namespace ecgc;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

SyntheticEcgSpec spec_from_json(const std::string& text) {
    SyntheticEcgSpec spec;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.contains("beats")) spec.beats = j["beats"].get<int>();
        if (j.contains("beat_period_s")) spec.beat_period_s = j["beat_period_s"].get<double>();
        if (j.contains("sample_period_s")) spec.sample_period_s = j["sample_period_s"].get<double>();
        if (j.contains("noise_std_mv")) spec.noise_std_mv = j["noise_std_mv"].get<double>();
        if (j.contains("amplitudes_mv")) {
            const auto& a = j["amplitudes_mv"];
            if (a.contains("p")) spec.p_mv = a["p"].get<double>();
            if (a.contains("q")) spec.q_mv = a["q"].get<double>();
            if (a.contains("r")) spec.r_mv = a["r"].get<double>();
            if (a.contains("s")) spec.s_mv = a["s"].get<double>();
            if (a.contains("t")) spec.t_mv = a["t"].get<double>();
        }
        if (j.contains("durations_s")) {
            const auto& d = j["durations_s"];
            if (d.contains("p")) spec.p_dur_s = d["p"].get<double>();
            if (d.contains("q")) spec.q_dur_s = d["q"].get<double>();
            if (d.contains("r")) spec.r_dur_s = d["r"].get<double>();
            if (d.contains("s")) spec.s_dur_s = d["s"].get<double>();
            if (d.contains("t")) spec.t_dur_s = d["t"].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("synthesis spec json: ") + e.what());
    }
    return spec;
}

void normalize_record(EcgRecord& record) {
    for (auto& ch : record.channels) {
        double peak = 0.0;
        for (double v : ch.samples) peak = std::max(peak, std::abs(v));
        if (peak > 0.0) {
            for (auto& v : ch.samples) v /= peak;
        }
    }
}

std::vector<double> parse_coeff_list(const std::string& text) {
    std::vector<double> coeffs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            coeffs.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ValidationError("cannot parse coefficient '" + item + "'");
        }
    }
    if (coeffs.empty()) throw ValidationError("empty coefficient list");
    return coeffs;
}

std::vector<int> parse_widths(const std::string& text) {
    std::vector<int> widths;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo < 1 || hi < lo) throw ValidationError("bad width range '" + text + "'");
        for (int w = lo; w <= hi; ++w) widths.push_back(w);
        return widths;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) widths.push_back(std::stoi(item));
    if (widths.empty()) throw ValidationError("empty width list");
    return widths;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"ecgc: low-complexity multi-sensor ECG compression toolkit"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a synthetic ECG record");
    std::string synth_spec_path, synth_out;
    std::uint64_t synth_seed = 0;
    synth->add_option("--spec", synth_spec_path, "Synthesis spec JSON")->required();
    synth->add_option("--seed", synth_seed, "RNG seed")->required();
    synth->add_option("--out", synth_out, "Output record (.csv or .ecg1)")->required();
    synth->callback([&]() {
        const auto spec = spec_from_json(read_text_file(synth_spec_path));
        const EcgRecord record = synthesize_ecg(spec, synth_seed);
        save_record(record, synth_out, format_from_extension(synth_out));
    });

    // ---- fit-codebook ----
    auto* fit = app.add_subcommand("fit-codebook",
                                   "Train a quantization codebook from a record's differences");
    std::string fit_in, fit_out, fit_pdf = "clipped-exp", fit_coarse = "lloyd";
    int fit_levels = 0, fit_bins = 200, fit_channel = 0, fit_n1 = 2, fit_n2 = 3;
    double fit_lambda = -1.0, fit_t0 = 1.0 / 360.0;
    bool fit_normalize = false, fit_conditional = false;
    fit->add_option("--in", fit_in, "Input record")->required();
    fit->add_option("--levels", fit_levels, "Number of quantization levels");
    fit->add_option("--pdf", fit_pdf, "Density family (clipped-exp)")
        ->check(CLI::IsMember({"clipped-exp"}));
    fit->add_option("--lambda", fit_lambda, "Override the fitted exponential rate (default 50)");
    fit->add_option("--bins", fit_bins, "Histogram bins");
    fit->add_option("--channel", fit_channel, "Channel index to train on");
    fit->add_option("--t0", fit_t0, "Sample period for csv inputs without a t column");
    fit->add_flag("--normalize", fit_normalize, "Scale channel amplitudes to peak 1 first");
    fit->add_flag("--conditional", fit_conditional,
                  "Build a two-tier conditional codebook from a two-channel record");
    fit->add_option("--n1", fit_n1, "Coarse bits (conditional)");
    fit->add_option("--n2", fit_n2, "Sub-codebook bits (conditional)");
    fit->add_option("--coarse", fit_coarse, "Coarse partition rule")
        ->check(CLI::IsMember({"lloyd", "uniform"}));
    fit->add_option("--out", fit_out, "Output codebook JSON")->required();
    fit->callback([&]() {
        EcgRecord record = load_record(fit_in, format_from_extension(fit_in), fit_t0);
        if (fit_normalize) normalize_record(record);
        if (fit_conditional) {
            if (record.channels.size() < 2) {
                throw ValidationError("--conditional needs a two-channel record");
            }
            const auto pdf_p =
                fit_clipped_exponential(histogram(record.channels[0].samples, fit_bins));
            const auto pdf_s =
                fit_clipped_exponential(histogram(record.channels[1].samples, fit_bins));
            const AffineMap affine = fit_affine(DensityView::of(pdf_p), DensityView::of(pdf_s));
            const auto partition =
                fit_coarse == "lloyd" ? CoarsePartition::lloyd : CoarsePartition::uniform;
            const auto cb = build_conditional_codebook(pdf_s, affine, fit_n1, fit_n2, partition);
            write_text_file(fit_out, cb.to_json());
            return;
        }
        if (fit_levels < 2) throw ValidationError("--levels must be >= 2");
        if (static_cast<std::size_t>(fit_channel) >= record.channels.size()) {
            throw ValidationError("--channel out of range");
        }
        const auto diffs = adjacent_differences(record.channels[fit_channel].samples);
        auto pdf = fit_clipped_exponential(histogram(diffs, fit_bins));
        if (fit_lambda >= 0.0) {
            pdf.rate_lambda = fit_lambda;
            pdf = pdf.restrict_to(pdf.lo, pdf.hi); // renormalize under the forced rate
        }
        write_text_file(fit_out, lloyd_max(pdf, fit_levels).to_json());
    });

    // ---- encode ----
    auto* encode = app.add_subcommand("encode", "Compress a record into a stream file");
    std::string enc_codec, enc_in, enc_codebook, enc_primary_codebook, enc_out;
    int enc_order = 4, enc_k = 1;
    double enc_mu = 0.05, enc_t0 = 1.0 / 360.0;
    bool enc_normalize = false;
    encode->add_option("--codec", enc_codec, "diff|olp|dpcm|lms|cond")->required();
    encode->add_option("--in", enc_in, "Input record")->required();
    encode->add_option("--codebook", enc_codebook, "Codebook JSON (conditional JSON for cond)")
        ->required();
    encode->add_option("--primary-codebook", enc_primary_codebook,
                       "Primary-channel codebook JSON (cond only)");
    encode->add_option("--order", enc_order, "Predictor order for olp/lms");
    encode->add_option("--mu", enc_mu, "LMS step size");
    encode->add_option("--k", enc_k, "Transmit every k-th sample");
    encode->add_option("--t0", enc_t0, "Sample period for csv inputs without a t column");
    encode->add_flag("--normalize", enc_normalize, "Scale channel amplitudes to peak 1 first");
    encode->add_option("--out", enc_out, "Output stream file")->required();
    encode->callback([&]() {
        EcgRecord record = load_record(enc_in, format_from_extension(enc_in), enc_t0);
        if (enc_normalize) normalize_record(record);
        const CodecKind codec = codec_from_name(enc_codec);
        const double t0 = record.sample_period_s;
        const auto primary = decimate(record.channels[0].samples, enc_k);

        EncodedStream stream;
        switch (codec) {
            case CodecKind::diff: {
                const Codebook cb = Codebook::from_json(read_text_file(enc_codebook));
                stream = to_stream(diff_encode(primary, cb), t0, static_cast<std::uint32_t>(enc_k));
                break;
            }
            case CodecKind::dpcm: {
                const Codebook cb = Codebook::from_json(read_text_file(enc_codebook));
                FirPredictor delta{{1.0}};
                stream = to_stream(encode_closed_loop(primary, delta, cb), delta, t0,
                                   static_cast<std::uint32_t>(enc_k));
                break;
            }
            case CodecKind::olp: {
                const Codebook cb = Codebook::from_json(read_text_file(enc_codebook));
                const FirPredictor predictor = fit_fir_mmse(primary, enc_order);
                stream = to_stream(encode_open_loop(primary, predictor, cb), predictor, t0,
                                   static_cast<std::uint32_t>(enc_k));
                break;
            }
            case CodecKind::lms: {
                const Codebook cb = Codebook::from_json(read_text_file(enc_codebook));
                LmsOptions options;
                options.step = enc_mu;
                const LmsResult result = encode_lms(primary, enc_order, cb, options);
                FirPredictor initial{std::vector<double>(static_cast<std::size_t>(enc_order), 0.0)};
                stream = to_stream(result.encoded, initial, t0, static_cast<std::uint32_t>(enc_k),
                                   enc_mu);
                break;
            }
            case CodecKind::cond: {
                if (record.channels.size() < 2) {
                    throw ValidationError("cond codec needs a two-channel record");
                }
                if (enc_primary_codebook.empty()) {
                    throw ValidationError("cond codec needs --primary-codebook");
                }
                const auto cond_cb =
                    ConditionalCodebook::from_json(read_text_file(enc_codebook));
                const Codebook primary_cb =
                    Codebook::from_json(read_text_file(enc_primary_codebook));
                const auto secondary = decimate(record.channels[1].samples, enc_k);
                stream = encode_cond_pair(primary, secondary, primary_cb, cond_cb, t0,
                                          static_cast<std::uint32_t>(enc_k));
                break;
            }
        }
        write_binary_file(enc_out, serialize(stream));
    });

    // ---- decode ----
    auto* decode = app.add_subcommand("decode", "Reconstruct a record from a stream file");
    std::string dec_in, dec_out;
    decode->add_option("--in", dec_in, "Input stream file")->required();
    decode->add_option("--out", dec_out, "Output record (.csv or .ecg1)")->required();
    decode->callback([&]() {
        const EncodedStream stream = deserialize(read_binary_file(dec_in));
        const auto channels = decode_stream(stream);
        EcgRecord record;
        record.sample_period_s = stream.t0_s * stream.k; // transmitted grid
        for (std::size_t c = 0; c < channels.size(); ++c) {
            record.channels.push_back({"ch" + std::to_string(c + 1), channels[c]});
        }
        save_record(record, dec_out, format_from_extension(dec_out));
    });

    // ---- stability ----
    auto* stability = app.add_subcommand("stability", "Pole analysis of a predictor coefficient set");
    std::string stab_coeffs;
    bool stab_json = false;
    stability->add_option("--coeffs", stab_coeffs, "Comma-separated a_1,...,a_M")->required();
    stability->add_flag("--json", stab_json, "Emit the JSON report");
    stability->callback([&]() {
        const auto coeffs = parse_coeff_list(stab_coeffs);
        const StabilityReport report = poles_of(open_loop_tf(coeffs));
        if (stab_json) {
            std::cout << report.to_json() << "\n";
            return;
        }
        std::printf("poles:\n");
        for (const auto& p : report.poles) std::printf("  %+.6f %+.6fi\n", p.real(), p.imag());
        std::printf("max modulus: %.6f\nstable: %s\nmargin: %.6f\n", report.max_modulus,
                    report.stable ? "yes" : "no", report.margin);
    });

    // ---- optimize-rate ----
    auto* opt = app.add_subcommand("optimize-rate",
                                   "Joint (W, K) search under a bit-rate budget");
    std::string opt_in, opt_bounds, opt_grid, opt_codec = "uniform";
    double opt_budget = 0.0, opt_t0 = 1.0 / 360.0;
    bool opt_json = false;
    opt->add_option("--in", opt_in, "Input record")->required();
    opt->add_option("--budget", opt_budget, "Bit-rate budget in bits/second")->required();
    opt->add_option("--t0", opt_t0, "Base sample period in seconds")->required();
    opt->add_option("--bounds", opt_bounds, "Bounds JSON (defaults when omitted)");
    opt->add_option("--grid", opt_grid, "Write the full (W, K, ase) grid CSV here");
    opt->add_option("--codec", opt_codec, "uniform|diff grid codec")
        ->check(CLI::IsMember({"uniform", "diff"}));
    opt->add_flag("--json", opt_json, "Emit the optimum as JSON");
    opt->callback([&]() {
        const EcgRecord record = load_record(opt_in, format_from_extension(opt_in), opt_t0);
        RateBounds bounds;
        if (!opt_bounds.empty()) bounds = RateBounds::from_json(read_text_file(opt_bounds));
        const GridCodec codec =
            opt_codec == "uniform" ? GridCodec::uniform_direct : GridCodec::proposed_diff;
        const auto grid = evaluate_grid(record.channels[0].samples, opt_t0, codec, bounds);
        if (!opt_grid.empty()) write_text_file(opt_grid, grid_to_csv(grid));
        const RateOperatingPoint best = optimize_rate(grid, opt_budget);
        if (opt_json) {
            std::cout << optimum_to_json(best, opt_budget) << "\n";
        } else {
            std::printf("W=%d K=%d rate=%.6g b/s ase=%.6g\n", best.w, best.k, best.rate_bps,
                        best.ase);
        }
    });

    // ---- bench ----
    auto* bench = app.add_subcommand("bench", "Corpus benchmark across codecs and bit widths");
    std::string bench_corpus, bench_codecs = "diff,dpcm,lms", bench_widths = "4..12", bench_out;
    double bench_t0 = 1.0 / 360.0, bench_mu = 0.05;
    int bench_transmit = 0;
    bench->add_option("--corpus", bench_corpus, "Directory of .csv / .ecg1 records")->required();
    bench->add_option("--codecs", bench_codecs, "Comma-separated codec list");
    bench->add_option("--widths", bench_widths, "Width list: 4..12 or 4,8,12");
    bench->add_option("--t0", bench_t0, "Sample period for csv inputs without a t column");
    bench->add_option("--mu", bench_mu, "LMS step size");
    bench->add_option("--lms-transmit-every", bench_transmit,
                      "Account LMS coefficient retransmission every N samples");
    bench->add_option("--out", bench_out, "Output report CSV")->required();
    bench->callback([&]() {
        std::vector<NamedRecord> corpus;
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(bench_corpus)) {
            if (!entry.is_regular_file()) continue;
            const auto ext = entry.path().extension();
            if (ext == ".csv" || ext == ".ecg1") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& path : files) {
            corpus.push_back(
                {path.filename().string(), load_record(path, format_from_extension(path), bench_t0)});
        }
        std::vector<CodecKind> codecs;
        std::stringstream ss(bench_codecs);
        std::string item;
        while (std::getline(ss, item, ',')) codecs.push_back(codec_from_name(item));
        BenchOptions options;
        options.lms_step = bench_mu;
        options.lms_transmit_coeffs_every = bench_transmit;
        const BenchReport report = run_benchmark(corpus, codecs, parse_widths(bench_widths), options);
        write_text_file(bench_out, report.to_csv());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ecgc::InfeasibleBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ecgc::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ecgc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const ecgc::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
