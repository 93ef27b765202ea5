#include "ecgc/diff_codec.hpp"

#include <cmath>
#include <string>

#include "ecgc/detail/kernels.hpp"
#include "ecgc/errors.hpp"

namespace ecgc {

DiffEncoded diff_encode(std::span<const double> signal, const Codebook& codebook,
                        ModificationPolicy policy, DiffTrace* trace) {
    codebook.validate();
    if (signal.size() < 2) throw ValidationError("diff_encode needs at least 2 samples");
    for (std::size_t i = 0; i < signal.size(); ++i) {
        if (!std::isfinite(signal[i])) {
            throw NumericError("non-finite input sample at index " + std::to_string(i));
        }
    }

    DiffEncoded enc;
    enc.initial = signal[0];
    enc.codebook = codebook;
    enc.indices.reserve(signal.size() - 1);

    detail::DiffKernel<double> kernel;
    kernel.init(codebook, policy, signal[0]);

    if (trace) {
        trace->reconstruction.assign(1, signal[0]);
        trace->a_factors.assign(1, 0.0);
        trace->s_values.assign(1, 0.0);
        trace->modified_diffs.assign(1, 0.0);
    }

    for (std::size_t i = 1; i < signal.size(); ++i) {
        const double s = kernel.prev_true - kernel.prev_recon;
        const auto step = kernel.step(signal[i]);
        enc.indices.push_back(step.index);
        if (trace) {
            trace->reconstruction.push_back(kernel.prev_recon);
            trace->a_factors.push_back(step.a);
            trace->s_values.push_back(s);
            trace->modified_diffs.push_back(step.modified_diff);
        }
    }
    return enc;
}

std::vector<double> diff_decode(const DiffEncoded& enc) {
    enc.codebook.validate();
    std::vector<double> out;
    out.reserve(enc.indices.size() + 1);
    out.push_back(enc.initial);
    double recon = enc.initial;
    for (const std::uint32_t idx : enc.indices) {
        if (idx >= enc.codebook.levels.size()) {
            throw CorruptStreamError("codebook index out of range");
        }
        recon += enc.codebook.levels[idx];
        out.push_back(recon);
    }
    return out;
}

std::vector<BetaSample> empirical_beta_trace(std::span<const double> signal,
                                             const Codebook& codebook) {
    DiffTrace trace;
    diff_encode(signal, codebook, ModificationPolicy::table_gap, &trace);
    std::vector<BetaSample> betas(trace.a_factors.size());
    for (std::size_t i = 1; i < trace.a_factors.size(); ++i) {
        if (std::abs(trace.s_values[i]) > 1e-12) {
            betas[i].beta = trace.a_factors[i] / trace.s_values[i];
            betas[i].defined = true;
        }
    }
    return betas;
}

} // namespace ecgc
