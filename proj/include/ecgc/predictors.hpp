#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ecgc/quantizer_design.hpp"

namespace ecgc {

/// Order-M FIR predictor coefficients a_1..a_M (a_1 multiplies the most
/// recent sample).
struct FirPredictor {
    std::vector<double> coefficients;

    int order() const { return static_cast<int>(coefficients.size()); }
    void validate() const;
};

enum class LoopMode { open, closed };

/// Output of the predictive codecs: the first M samples uncompressed plus
/// one codebook index per remaining sample.
struct PredictiveEncoded {
    LoopMode loop_mode = LoopMode::open;
    std::vector<double> warmup;
    std::vector<std::uint32_t> indices;
    Codebook codebook;
};

/// Per-sample encoder internals, kept for analysis and tests.
struct PredictiveTrace {
    std::vector<double> residuals;           // e_i
    std::vector<double> quantized_residuals; // decoded codebook level for e_i
    std::vector<double> reconstruction;      // full-length x-hat (open loop:
                                             // the decoder-side recursion)
};

/// Least-squares minimizer of the one-step prediction error, solved through
/// the normal equations. Requires length > 10*order and a non-constant
/// signal.
FirPredictor fit_fir_mmse(std::span<const double> signal, int order);

/// Open loop: predictions use true past samples; the residual is
/// prediction - sample. The matching decoder recursion (reconstructed past
/// samples) is what the trace's `reconstruction` holds.
PredictiveEncoded encode_open_loop(std::span<const double> signal, const FirPredictor& predictor,
                                   const Codebook& codebook, PredictiveTrace* trace = nullptr);
std::vector<double> decode_open_loop(const PredictiveEncoded& enc, const FirPredictor& predictor);

/// Closed loop: the encoder runs the decoder recursion itself and predicts
/// from its own reconstructions, so decoder output is bit-identical to the
/// encoder trace. M = 1 with a_1 = 1 is the delta modulator / DPCM baseline.
PredictiveEncoded encode_closed_loop(std::span<const double> signal, const FirPredictor& predictor,
                                     const Codebook& codebook, PredictiveTrace* trace = nullptr);
std::vector<double> decode_closed_loop(const PredictiveEncoded& enc, const FirPredictor& predictor);

struct LmsOptions {
    double step = 0.05;                  // mu
    std::vector<double> initial;         // empty = all zero
};

struct LmsResult {
    PredictiveEncoded encoded;
    PredictiveTrace trace;
    std::vector<std::vector<double>> coefficient_trace; // one row per encoded sample
};

/// Closed-loop codec with per-sample coefficient adaptation
/// a <- a + mu * e-hat_i * x-hat_{i-m}. The update uses only quantities the
/// decoder also reconstructs, so decode_lms replays it exactly. Throws
/// NumericError naming the sample index when a coefficient leaves the finite
/// range.
LmsResult encode_lms(std::span<const double> signal, int order, const Codebook& codebook,
                     const LmsOptions& options = {});
std::vector<double> decode_lms(const PredictiveEncoded& enc, int order,
                               const LmsOptions& options = {});

} // namespace ecgc
