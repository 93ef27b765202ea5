#include "ecgc/predictors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ecgc/detail/kernels.hpp"
#include "ecgc/errors.hpp"

namespace ecgc {

void FirPredictor::validate() const {
    if (coefficients.empty()) throw ValidationError("predictor order must be >= 1");
    for (double a : coefficients) {
        if (!std::isfinite(a)) throw ValidationError("non-finite predictor coefficient");
    }
}

FirPredictor fit_fir_mmse(std::span<const double> signal, int order) {
    if (order < 1) throw ValidationError("predictor order must be >= 1");
    const std::size_t n = signal.size();
    if (n <= static_cast<std::size_t>(10 * order)) {
        throw ValidationError("fit_fir_mmse needs more than 10*order samples");
    }
    const auto [mn, mx] = std::minmax_element(signal.begin(), signal.end());
    if (*mn == *mx) throw DegenerateInputError("fit_fir_mmse: constant signal is rank deficient");

    const std::size_t m = static_cast<std::size_t>(order);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(order, order);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(order);
    for (std::size_t i = m; i < n; ++i) {
        for (std::size_t p = 0; p < m; ++p) {
            rhs(static_cast<int>(p)) += signal[i] * signal[i - 1 - p];
            for (std::size_t q = p; q < m; ++q) {
                gram(static_cast<int>(p), static_cast<int>(q)) +=
                    signal[i - 1 - p] * signal[i - 1 - q];
            }
        }
    }
    for (int p = 0; p < order; ++p) {
        for (int q = 0; q < p; ++q) gram(p, q) = gram(q, p);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw DegenerateInputError("fit_fir_mmse: singular normal equations");
    }
    const Eigen::VectorXd a = lu.solve(rhs);

    FirPredictor predictor;
    predictor.coefficients.assign(a.data(), a.data() + order);
    predictor.validate();
    return predictor;
}

namespace {

void check_encode_inputs(std::span<const double> signal, const FirPredictor& predictor,
                         const Codebook& codebook) {
    predictor.validate();
    codebook.validate();
    if (signal.size() <= static_cast<std::size_t>(predictor.order())) {
        throw ValidationError("signal must be longer than the predictor order");
    }
    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (!std::isfinite(signal[i])) {
            throw NumericError("non-finite input sample at index " + std::to_string(i));
        }
    }
}

std::vector<double> recent_first_warmup(std::span<const double> signal, int order) {
    std::vector<double> past(static_cast<std::size_t>(order));
    for (int p = 0; p < order; ++p) past[static_cast<std::size_t>(p)] = signal[order - 1 - p];
    return past;
}

} // namespace

PredictiveEncoded encode_open_loop(std::span<const double> signal, const FirPredictor& predictor,
                                   const Codebook& codebook, PredictiveTrace* trace) {
    check_encode_inputs(signal, predictor, codebook);
    const int order = predictor.order();
    const std::size_t n = signal.size();

    PredictiveEncoded enc;
    enc.loop_mode = LoopMode::open;
    enc.warmup.assign(signal.begin(), signal.begin() + order);
    enc.codebook = codebook;
    enc.indices.reserve(n - order);

    if (trace) {
        trace->residuals.clear();
        trace->quantized_residuals.clear();
        trace->reconstruction.assign(signal.begin(), signal.begin() + order);
    }

    for (std::size_t i = static_cast<std::size_t>(order); i < n; ++i) {
        double prediction = 0.0;
        for (int m = 1; m <= order; ++m) prediction += predictor.coefficients[m - 1] * signal[i - m];
        const double residual = prediction - signal[i];
        const std::uint32_t idx = codebook.quantize(residual);
        enc.indices.push_back(idx);
        if (trace) {
            trace->residuals.push_back(residual);
            trace->quantized_residuals.push_back(codebook.levels[idx]);
        }
    }
    if (trace) {
        const auto decoded = decode_open_loop(enc, predictor);
        trace->reconstruction = decoded;
    }
    return enc;
}

std::vector<double> decode_open_loop(const PredictiveEncoded& enc, const FirPredictor& predictor) {
    if (enc.loop_mode != LoopMode::open) throw ValidationError("stream is not open-loop encoded");
    predictor.validate();
    enc.codebook.validate();
    const int order = predictor.order();
    if (enc.warmup.size() != static_cast<std::size_t>(order)) {
        throw ValidationError("warmup length does not match the predictor order");
    }
    std::vector<double> out(enc.warmup);
    out.reserve(enc.warmup.size() + enc.indices.size());
    for (const std::uint32_t idx : enc.indices) {
        if (idx >= enc.codebook.levels.size()) throw CorruptStreamError("codebook index out of range");
        const std::size_t i = out.size();
        double prediction = 0.0;
        for (int m = 1; m <= order; ++m) prediction += predictor.coefficients[m - 1] * out[i - m];
        out.push_back(prediction - enc.codebook.levels[idx]);
    }
    return out;
}

PredictiveEncoded encode_closed_loop(std::span<const double> signal, const FirPredictor& predictor,
                                     const Codebook& codebook, PredictiveTrace* trace) {
    check_encode_inputs(signal, predictor, codebook);
    const int order = predictor.order();
    const std::size_t n = signal.size();

    PredictiveEncoded enc;
    enc.loop_mode = LoopMode::closed;
    enc.warmup.assign(signal.begin(), signal.begin() + order);
    enc.codebook = codebook;
    enc.indices.reserve(n - order);

    detail::ClosedLoopKernel<double> kernel;
    kernel.init(codebook, predictor.coefficients, recent_first_warmup(signal, order));

    if (trace) {
        trace->residuals.clear();
        trace->quantized_residuals.clear();
        trace->reconstruction.assign(signal.begin(), signal.begin() + order);
    }

    for (std::size_t i = static_cast<std::size_t>(order); i < n; ++i) {
        const auto step = kernel.step(signal[i]);
        enc.indices.push_back(step.index);
        if (trace) {
            trace->residuals.push_back(step.residual);
            trace->quantized_residuals.push_back(codebook.levels[step.index]);
            trace->reconstruction.push_back(step.recon);
        }
    }
    return enc;
}

std::vector<double> decode_closed_loop(const PredictiveEncoded& enc, const FirPredictor& predictor) {
    if (enc.loop_mode != LoopMode::closed) throw ValidationError("stream is not closed-loop encoded");
    predictor.validate();
    enc.codebook.validate();
    const int order = predictor.order();
    if (enc.warmup.size() != static_cast<std::size_t>(order)) {
        throw ValidationError("warmup length does not match the predictor order");
    }
    std::vector<double> out(enc.warmup);
    out.reserve(enc.warmup.size() + enc.indices.size());
    for (const std::uint32_t idx : enc.indices) {
        if (idx >= enc.codebook.levels.size()) throw CorruptStreamError("codebook index out of range");
        const std::size_t i = out.size();
        double prediction = 0.0;
        for (int m = 1; m <= order; ++m) prediction += predictor.coefficients[m - 1] * out[i - m];
        out.push_back(prediction + enc.codebook.levels[idx]);
    }
    return out;
}

LmsResult encode_lms(std::span<const double> signal, int order, const Codebook& codebook,
                     const LmsOptions& options) {
    if (order < 1) throw ValidationError("predictor order must be >= 1");
    // step 0 is allowed: it degenerates to the fixed closed-loop codec
    if (!(options.step >= 0.0) || !std::isfinite(options.step)) {
        throw ValidationError("LMS step must be non-negative and finite");
    }
    codebook.validate();
    if (signal.size() <= static_cast<std::size_t>(order)) {
        throw ValidationError("signal must be longer than the predictor order");
    }
    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (!std::isfinite(signal[i])) {
            throw NumericError("non-finite input sample at index " + std::to_string(i));
        }
    }
    std::vector<double> initial = options.initial;
    if (initial.empty()) {
        initial.assign(static_cast<std::size_t>(order), 0.0);
    } else if (initial.size() != static_cast<std::size_t>(order)) {
        throw ValidationError("LMS initial coefficient count must equal the order");
    }

    LmsResult result;
    result.encoded.loop_mode = LoopMode::closed;
    result.encoded.warmup.assign(signal.begin(), signal.begin() + order);
    result.encoded.codebook = codebook;

    detail::LmsKernel<double> kernel;
    kernel.init(codebook, options.step, initial, recent_first_warmup(signal, order));

    result.trace.reconstruction.assign(signal.begin(), signal.begin() + order);

    for (std::size_t i = static_cast<std::size_t>(order); i < signal.size(); ++i) {
        const auto step = kernel.step(signal[i]);
        result.encoded.indices.push_back(step.index);
        result.trace.residuals.push_back(step.residual);
        result.trace.quantized_residuals.push_back(codebook.levels[step.index]);
        result.trace.reconstruction.push_back(step.recon);
        result.coefficient_trace.push_back(kernel.coeffs);
        for (double a : kernel.coeffs) {
            if (!std::isfinite(a)) {
                throw NumericError("LMS coefficient diverged at sample " + std::to_string(i));
            }
        }
    }
    return result;
}

std::vector<double> decode_lms(const PredictiveEncoded& enc, int order, const LmsOptions& options) {
    if (enc.loop_mode != LoopMode::closed) throw ValidationError("stream is not closed-loop encoded");
    enc.codebook.validate();
    if (enc.warmup.size() != static_cast<std::size_t>(order)) {
        throw ValidationError("warmup length does not match the predictor order");
    }
    std::vector<double> initial = options.initial;
    if (initial.empty()) initial.assign(static_cast<std::size_t>(order), 0.0);

    std::vector<double> out(enc.warmup);
    std::vector<double> coeffs = initial;
    std::vector<double> past(static_cast<std::size_t>(order));
    for (int p = 0; p < order; ++p) past[static_cast<std::size_t>(p)] = enc.warmup[order - 1 - p];

    for (const std::uint32_t idx : enc.indices) {
        if (idx >= enc.codebook.levels.size()) throw CorruptStreamError("codebook index out of range");
        double prediction = coeffs[0] * past[0];
        for (int m = 1; m < order; ++m) prediction += coeffs[m] * past[m];
        const double ehat = enc.codebook.levels[idx];
        const double rec = prediction + ehat;
        for (int m = 0; m < order; ++m) coeffs[m] += options.step * ehat * past[m];
        for (std::size_t m = past.size(); m-- > 1;) past[m] = past[m - 1];
        past[0] = rec;
        out.push_back(rec);
    }
    return out;
}

} // namespace ecgc
