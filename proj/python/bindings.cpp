#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ecgc/bench.hpp"
#include "ecgc/encoded_stream.hpp"
#include "ecgc/errors.hpp"
#include "ecgc/metrics.hpp"
#include "ecgc/rate_optimizer.hpp"
#include "ecgc/signal_io.hpp"
#include "ecgc/stability.hpp"

namespace py = pybind11;
using namespace ecgc;

namespace {

std::vector<double> to_vec(const py::sequence& seq) {
    std::vector<double> out;
    out.reserve(py::len(seq));
    for (const auto& item : seq) out.push_back(item.cast<double>());
    return out;
}

} // namespace

PYBIND11_MODULE(_ecgc, m) {
    m.doc() = "Low-complexity multi-sensor ECG compression toolkit";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<InfeasibleBudgetError>(m, "InfeasibleBudgetError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // ---- records ----
    py::class_<Annotations>(m, "Annotations")
        .def(py::init<>())
        .def_readwrite("p", &Annotations::p)
        .def_readwrite("q", &Annotations::q)
        .def_readwrite("r", &Annotations::r)
        .def_readwrite("s", &Annotations::s)
        .def_readwrite("t", &Annotations::t);

    py::class_<Channel>(m, "Channel")
        .def(py::init<>())
        .def_readwrite("name", &Channel::name)
        .def_readwrite("samples", &Channel::samples);

    py::class_<EcgRecord>(m, "EcgRecord")
        .def(py::init<>())
        .def_readwrite("sample_period_s", &EcgRecord::sample_period_s)
        .def_readwrite("channels", &EcgRecord::channels)
        .def_readwrite("annotations", &EcgRecord::annotations)
        .def("length", &EcgRecord::length)
        .def("validate", &EcgRecord::validate);

    py::class_<SyntheticEcgSpec>(m, "SyntheticEcgSpec")
        .def(py::init<>())
        .def_readwrite("beats", &SyntheticEcgSpec::beats)
        .def_readwrite("beat_period_s", &SyntheticEcgSpec::beat_period_s)
        .def_readwrite("p_mv", &SyntheticEcgSpec::p_mv)
        .def_readwrite("q_mv", &SyntheticEcgSpec::q_mv)
        .def_readwrite("r_mv", &SyntheticEcgSpec::r_mv)
        .def_readwrite("s_mv", &SyntheticEcgSpec::s_mv)
        .def_readwrite("t_mv", &SyntheticEcgSpec::t_mv)
        .def_readwrite("p_dur_s", &SyntheticEcgSpec::p_dur_s)
        .def_readwrite("q_dur_s", &SyntheticEcgSpec::q_dur_s)
        .def_readwrite("r_dur_s", &SyntheticEcgSpec::r_dur_s)
        .def_readwrite("s_dur_s", &SyntheticEcgSpec::s_dur_s)
        .def_readwrite("t_dur_s", &SyntheticEcgSpec::t_dur_s)
        .def_readwrite("noise_std_mv", &SyntheticEcgSpec::noise_std_mv)
        .def_readwrite("sample_period_s", &SyntheticEcgSpec::sample_period_s);

    m.def("synthesize_ecg", &synthesize_ecg, py::arg("spec"), py::arg("seed"));
    m.def(
        "load_record",
        [](const std::string& path, double default_period_s) {
            return load_record(path, format_from_extension(path), default_period_s);
        },
        py::arg("path"), py::arg("default_period_s") = 1.0 / 360.0);
    m.def(
        "save_record",
        [](const EcgRecord& record, const std::string& path) {
            save_record(record, path, format_from_extension(path));
        },
        py::arg("record"), py::arg("path"));
    m.def(
        "downsample_hold",
        [](const py::sequence& samples, int k) {
            return downsample_hold(std::span<const double>(to_vec(samples)), k);
        },
        py::arg("samples"), py::arg("k"));
    m.def(
        "adjacent_differences",
        [](const py::sequence& samples) {
            return adjacent_differences(std::span<const double>(to_vec(samples)));
        },
        py::arg("samples"));

    // ---- quantizer design ----
    py::class_<Codebook>(m, "Codebook")
        .def(py::init<>())
        .def_readwrite("levels", &Codebook::levels)
        .def_readwrite("boundaries", &Codebook::boundaries)
        .def_readonly("esq_q", &Codebook::esq_q)
        .def("bits_per_index", &Codebook::bits_per_index)
        .def("span", &Codebook::span)
        .def("quantize", &Codebook::quantize)
        .def("to_json", &Codebook::to_json)
        .def_static("from_json", &Codebook::from_json);

    py::class_<HistogramModel>(m, "HistogramModel")
        .def_readonly("edges", &HistogramModel::edges)
        .def_readonly("probabilities", &HistogramModel::probabilities)
        .def_readonly("observed_min", &HistogramModel::observed_min)
        .def_readonly("observed_max", &HistogramModel::observed_max)
        .def("density_at", &HistogramModel::density_at);

    py::class_<FittedPdf>(m, "FittedPdf")
        .def_readonly("rate_lambda", &FittedPdf::rate_lambda)
        .def_readonly("clip_level", &FittedPdf::clip_level)
        .def_readonly("amplitude", &FittedPdf::amplitude)
        .def_readonly("lo", &FittedPdf::lo)
        .def_readonly("hi", &FittedPdf::hi)
        .def("density", &FittedPdf::density)
        .def("restrict_to", &FittedPdf::restrict_to)
        .def_static("uniform", &FittedPdf::uniform);

    m.def(
        "histogram",
        [](const py::sequence& values, int bins) {
            return histogram(std::span<const double>(to_vec(values)), bins);
        },
        py::arg("values"), py::arg("bins"));
    m.def("fit_clipped_exponential", &fit_clipped_exponential);
    m.def(
        "lloyd_max", [](const FittedPdf& pdf, int levels) { return lloyd_max(pdf, levels); },
        py::arg("pdf"), py::arg("levels"));
    m.def("uniform_codebook", &uniform_codebook, py::arg("lo"), py::arg("hi"), py::arg("levels"));
    m.def("quantization_mse", &quantization_mse);
    m.def(
        "train_differential_codebook",
        [](const py::sequence& samples, int levels, int bins) {
            return train_differential_codebook(std::span<const double>(to_vec(samples)), levels,
                                               bins);
        },
        py::arg("samples"), py::arg("levels"), py::arg("bins") = 200);
    m.def("dynamic_range", &dynamic_range, py::arg("records"), py::arg("differenced"));

    // ---- stability ----
    py::class_<ErrorTransferFunction>(m, "ErrorTransferFunction")
        .def_readonly("denominator", &ErrorTransferFunction::denominator)
        .def_readonly("tag", &ErrorTransferFunction::tag);
    py::class_<StabilityReport>(m, "StabilityReport")
        .def_readonly("poles", &StabilityReport::poles)
        .def_readonly("max_modulus", &StabilityReport::max_modulus)
        .def_readonly("stable", &StabilityReport::stable)
        .def_readonly("margin", &StabilityReport::margin)
        .def_readonly("marginal", &StabilityReport::marginal)
        .def("to_json", &StabilityReport::to_json);
    m.def(
        "open_loop_tf",
        [](const py::sequence& coeffs) {
            const auto v = to_vec(coeffs);
            return open_loop_tf(std::span<const double>(v));
        },
        py::arg("coefficients"));
    m.def("proposed_scheme_tf", &proposed_scheme_tf, py::arg("beta_abs"));
    m.def("poles_of", &poles_of);

    // ---- predictors ----
    py::class_<FirPredictor>(m, "FirPredictor")
        .def(py::init([](std::vector<double> coeffs) {
                 FirPredictor p{std::move(coeffs)};
                 p.validate();
                 return p;
             }),
             py::arg("coefficients"))
        .def_readwrite("coefficients", &FirPredictor::coefficients)
        .def("order", &FirPredictor::order);

    py::enum_<LoopMode>(m, "LoopMode").value("open", LoopMode::open).value("closed", LoopMode::closed);

    py::class_<PredictiveEncoded>(m, "PredictiveEncoded")
        .def_readonly("loop_mode", &PredictiveEncoded::loop_mode)
        .def_readonly("warmup", &PredictiveEncoded::warmup)
        .def_readonly("indices", &PredictiveEncoded::indices)
        .def_readonly("codebook", &PredictiveEncoded::codebook);

    m.def(
        "fit_fir_mmse",
        [](const py::sequence& signal, int order) {
            return fit_fir_mmse(std::span<const double>(to_vec(signal)), order);
        },
        py::arg("signal"), py::arg("order"));
    m.def(
        "encode_open_loop",
        [](const py::sequence& signal, const FirPredictor& p, const Codebook& cb) {
            return encode_open_loop(std::span<const double>(to_vec(signal)), p, cb);
        },
        py::arg("signal"), py::arg("predictor"), py::arg("codebook"));
    m.def("decode_open_loop", &decode_open_loop);
    m.def(
        "encode_closed_loop",
        [](const py::sequence& signal, const FirPredictor& p, const Codebook& cb) {
            return encode_closed_loop(std::span<const double>(to_vec(signal)), p, cb);
        },
        py::arg("signal"), py::arg("predictor"), py::arg("codebook"));
    m.def("decode_closed_loop", &decode_closed_loop);

    // ---- diff codec ----
    py::enum_<ModificationPolicy>(m, "ModificationPolicy")
        .value("table_gap", ModificationPolicy::table_gap)
        .value("none", ModificationPolicy::none)
        .value("full", ModificationPolicy::full);

    py::class_<DiffEncoded>(m, "DiffEncoded")
        .def_readonly("initial", &DiffEncoded::initial)
        .def_readonly("indices", &DiffEncoded::indices)
        .def_readonly("codebook", &DiffEncoded::codebook);

    m.def(
        "diff_encode",
        [](const py::sequence& signal, const Codebook& cb, ModificationPolicy policy) {
            return diff_encode(std::span<const double>(to_vec(signal)), cb, policy);
        },
        py::arg("signal"), py::arg("codebook"),
        py::arg("policy") = ModificationPolicy::table_gap);
    m.def("diff_decode", &diff_decode);

    // ---- conditional codec ----
    py::class_<AffineMap>(m, "AffineMap")
        .def(py::init<>())
        .def_readwrite("a", &AffineMap::a)
        .def_readwrite("b", &AffineMap::b);

    py::class_<ConditionalCodebook>(m, "ConditionalCodebook")
        .def_readonly("n1", &ConditionalCodebook::n1)
        .def_readonly("n2", &ConditionalCodebook::n2)
        .def_readonly("coarse_s", &ConditionalCodebook::coarse_s)
        .def_readonly("coarse_p", &ConditionalCodebook::coarse_p)
        .def_readonly("subcodebooks", &ConditionalCodebook::subcodebooks)
        .def("to_json", &ConditionalCodebook::to_json)
        .def_static("from_json", &ConditionalCodebook::from_json);

    m.def(
        "fit_affine",
        [](const FittedPdf& p, const FittedPdf& s) {
            return fit_affine(DensityView::of(p), DensityView::of(s));
        },
        py::arg("pdf_p"), py::arg("pdf_s"));
    py::enum_<CoarsePartition>(m, "CoarsePartition")
        .value("lloyd", CoarsePartition::lloyd)
        .value("uniform", CoarsePartition::uniform);
    m.def("build_conditional_codebook", &build_conditional_codebook, py::arg("pdf_s"),
          py::arg("affine"), py::arg("n1"), py::arg("n2"),
          py::arg("partition") = CoarsePartition::lloyd);
    m.def("cond_encode", &cond_encode, py::arg("x_s"), py::arg("codebook"));
    m.def("cond_decode", &cond_decode, py::arg("index"), py::arg("x_p_hat"), py::arg("codebook"));

    // ---- rate optimization ----
    py::class_<RateBounds>(m, "RateBounds")
        .def(py::init<>())
        .def_readwrite("t_t_upper_s", &RateBounds::t_t_upper_s)
        .def_readwrite("t_t_lower_s", &RateBounds::t_t_lower_s)
        .def_readwrite("w_upper", &RateBounds::w_upper)
        .def_readwrite("w_lower", &RateBounds::w_lower);

    py::class_<RateOperatingPoint>(m, "RateOperatingPoint")
        .def_readonly("w", &RateOperatingPoint::w)
        .def_readonly("k", &RateOperatingPoint::k)
        .def_readonly("t_t_s", &RateOperatingPoint::t_t_s)
        .def_readonly("rate_bps", &RateOperatingPoint::rate_bps)
        .def_readonly("ase", &RateOperatingPoint::ase);

    py::enum_<GridCodec>(m, "GridCodec")
        .value("uniform_direct", GridCodec::uniform_direct)
        .value("proposed_diff", GridCodec::proposed_diff);

    m.def("qrs_period_bound", &qrs_period_bound);
    m.def(
        "word_length_bound",
        [](const py::sequence& g, const py::sequence& eta) {
            const auto gv = to_vec(g);
            const auto ev = to_vec(eta);
            return word_length_bound(std::span<const double>(gv), std::span<const double>(ev));
        },
        py::arg("summit_distances"), py::arg("envelope_amplitudes"));
    m.def(
        "ase",
        [](const py::sequence& a, const py::sequence& b) {
            const auto av = to_vec(a);
            const auto bv = to_vec(b);
            return ase(std::span<const double>(av), std::span<const double>(bv));
        },
        py::arg("original"), py::arg("reconstructed"));
    m.def(
        "evaluate_grid",
        [](const py::sequence& samples, double t0_s, GridCodec codec, const RateBounds& bounds) {
            return evaluate_grid(std::span<const double>(to_vec(samples)), t0_s, codec, bounds);
        },
        py::arg("samples"), py::arg("t0_s"), py::arg("codec"), py::arg("bounds") = RateBounds{});
    m.def(
        "optimize_rate",
        [](const std::vector<RateOperatingPoint>& grid, double budget) {
            return optimize_rate(std::span<const RateOperatingPoint>(grid), budget);
        },
        py::arg("grid"), py::arg("budget_bps"));

    // ---- metrics and streams ----
    m.def(
        "mse",
        [](const py::sequence& a, const py::sequence& b) {
            const auto av = to_vec(a);
            const auto bv = to_vec(b);
            return mse(std::span<const double>(av), std::span<const double>(bv));
        },
        py::arg("original"), py::arg("reconstructed"));
    m.def(
        "nmse",
        [](const py::sequence& a, const py::sequence& b) {
            const auto av = to_vec(a);
            const auto bv = to_vec(b);
            return nmse(std::span<const double>(av), std::span<const double>(bv));
        },
        py::arg("original"), py::arg("reconstructed"));
    m.def(
        "prd",
        [](const py::sequence& a, const py::sequence& b) {
            const auto av = to_vec(a);
            const auto bv = to_vec(b);
            return prd(std::span<const double>(av), std::span<const double>(bv));
        },
        py::arg("original"), py::arg("reconstructed"));

    py::enum_<CodecKind>(m, "CodecKind")
        .value("diff", CodecKind::diff)
        .value("olp", CodecKind::olp)
        .value("dpcm", CodecKind::dpcm)
        .value("lms", CodecKind::lms)
        .value("cond", CodecKind::cond);

    py::class_<ComplexityCounts>(m, "ComplexityCounts")
        .def_readonly("adds", &ComplexityCounts::adds)
        .def_readonly("muls", &ComplexityCounts::muls)
        .def_readonly("memory_units", &ComplexityCounts::memory_units);
    m.def("count_complexity", &count_complexity, py::arg("codec"), py::arg("order") = 4);

    py::class_<EncodedStream>(m, "EncodedStream")
        .def_readonly("codec", &EncodedStream::codec)
        .def_readonly("k", &EncodedStream::k)
        .def_readonly("t0_s", &EncodedStream::t0_s)
        .def_readonly("warmup", &EncodedStream::warmup)
        .def_readonly("indices", &EncodedStream::indices)
        .def_readonly("w_bits", &EncodedStream::w_bits)
        .def("payload_bits", &EncodedStream::payload_bits)
        .def("header_bits", &EncodedStream::header_bits);

    m.def(
        "serialize",
        [](const EncodedStream& s) {
            const auto bytes = serialize(s);
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        },
        py::arg("stream"));
    m.def(
        "deserialize",
        [](const py::bytes& data) {
            const std::string view = data;
            return deserialize(std::span<const std::uint8_t>(
                reinterpret_cast<const std::uint8_t*>(view.data()), view.size()));
        },
        py::arg("data"));
    m.def(
        "to_stream",
        [](const DiffEncoded& enc, double t0_s, std::uint32_t k) { return to_stream(enc, t0_s, k); },
        py::arg("encoded"), py::arg("t0_s"), py::arg("k") = 1u);
    m.def("decode_stream", &decode_stream);
}
