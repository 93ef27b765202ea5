#pragma once

#include <cstdint>
#include <vector>

#include "ecgc/detail/counted.hpp"
#include "ecgc/diff_codec.hpp"
#include "ecgc/quantizer_design.hpp"

namespace ecgc::detail {

/// Cell lookup: index of the first boundary >= v, so a value exactly on a
/// boundary resolves to the lower level and out-of-range values clamp to the
/// extremes. Comparisons only.
template <class S>
std::uint32_t quantize_value(const Codebook& cb, S v) {
    const auto& b = cb.boundaries;
    std::size_t lo = 0, hi = b.size();
    const double x = value_of(v);
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (x <= b[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return static_cast<std::uint32_t>(lo);
}

/// Per-sample loop of the differential codec. State is two sample-valued
/// registers (previous true sample and previous reconstruction); the
/// modification factor comes from sign comparison plus a gap-table lookup,
/// so the loop performs exactly three additions/subtractions and no
/// multiplication.
template <class S>
struct DiffKernel {
    const Codebook* cb = nullptr;
    ModificationPolicy policy = ModificationPolicy::table_gap;
    std::vector<double> a_up;   // A when s > 0: +(level[l] - level[l-1]), 0 at the first level
    std::vector<double> a_down; // A when s < 0: -(level[l+1] - level[l]), 0 at the last level

    S prev_true{};
    S prev_recon{};
    std::uint32_t prev_index = 0;
    bool have_index = false;

    static constexpr int memory_units = 2;

    void init(const Codebook& codebook, ModificationPolicy p, S x0) {
        cb = &codebook;
        policy = p;
        const auto& lv = codebook.levels;
        a_up.assign(lv.size(), 0.0);
        a_down.assign(lv.size(), 0.0);
        for (std::size_t l = 1; l < lv.size(); ++l) a_up[l] = lv[l] - lv[l - 1];
        for (std::size_t l = 0; l + 1 < lv.size(); ++l) a_down[l] = -(lv[l + 1] - lv[l]);
        prev_true = x0;
        prev_recon = x0;
        prev_index = 0;
        have_index = false;
    }

    struct StepOut {
        std::uint32_t index;
        S a;
        S modified_diff;
    };

    StepOut step(S x) {
        S a(0.0);
        if (policy == ModificationPolicy::full) {
            a = prev_true - prev_recon;
        } else if (policy == ModificationPolicy::table_gap && have_index) {
            if (value_of(prev_true) > value_of(prev_recon)) {
                a = S(a_up[prev_index]);
            } else if (value_of(prev_true) < value_of(prev_recon)) {
                a = S(a_down[prev_index]);
            }
        }
        S dx = x - prev_true;
        S dxp = dx + a;
        const std::uint32_t l = quantize_value(*cb, dxp);
        S rec = prev_recon + S(cb->levels[l]);
        prev_true = x;
        prev_recon = rec;
        prev_index = l;
        have_index = true;
        return {l, a, dxp};
    }
};

/// Per-sample loop of the closed-loop predictive codec: prediction from the
/// codec's own reconstructions, quantized residual fed back. Coefficients are
/// constants; state is the M past reconstructions.
template <class S>
struct ClosedLoopKernel {
    const Codebook* cb = nullptr;
    std::vector<double> coeffs; // a_1..a_M
    std::vector<S> past;        // x-hat_{i-1} .. x-hat_{i-M}

    void init(const Codebook& codebook, std::vector<double> coefficients,
              std::vector<S> warmup_recent_first) {
        cb = &codebook;
        coeffs = std::move(coefficients);
        past = std::move(warmup_recent_first);
    }

    int memory_units() const { return static_cast<int>(past.size()); }

    struct StepOut {
        std::uint32_t index;
        S prediction;
        S residual;
        S recon;
    };

    StepOut step(S x) {
        S pred = S(coeffs[0]) * past[0];
        for (std::size_t m = 1; m < coeffs.size(); ++m) {
            pred = pred + S(coeffs[m]) * past[m];
        }
        S e = x - pred;
        const std::uint32_t l = quantize_value(*cb, e);
        S rec = pred + S(cb->levels[l]);
        for (std::size_t m = past.size(); m-- > 1;) past[m] = past[m - 1];
        past[0] = rec;
        return {l, pred, e, rec};
    }
};

/// Closed-loop kernel with per-sample stochastic-gradient coefficient
/// adaptation. The update is excluded from the operation counters; it is the
/// adaptation cost, not the filter cost. State is M coefficients plus M past
/// reconstructions.
template <class S>
struct LmsKernel {
    const Codebook* cb = nullptr;
    double mu = 0.0;
    std::vector<S> coeffs;
    std::vector<S> past;

    void init(const Codebook& codebook, double step, std::vector<S> initial_coeffs,
              std::vector<S> warmup_recent_first) {
        cb = &codebook;
        mu = step;
        coeffs = std::move(initial_coeffs);
        past = std::move(warmup_recent_first);
    }

    int memory_units() const { return static_cast<int>(coeffs.size() + past.size()); }

    struct StepOut {
        std::uint32_t index;
        S prediction;
        S residual;
        S recon;
    };

    StepOut step(S x) {
        S pred = coeffs[0] * past[0];
        for (std::size_t m = 1; m < coeffs.size(); ++m) {
            pred = pred + coeffs[m] * past[m];
        }
        S e = x - pred;
        const std::uint32_t l = quantize_value(*cb, e);
        S ehat = S(cb->levels[l]);
        S rec = pred + ehat;
        {
            PauseCounting pause;
            for (std::size_t m = 0; m < coeffs.size(); ++m) {
                coeffs[m] = coeffs[m] + S(mu) * ehat * past[m];
            }
        }
        for (std::size_t m = past.size(); m-- > 1;) past[m] = past[m - 1];
        past[0] = rec;
        return {l, pred, e, rec};
    }
};

} // namespace ecgc::detail
