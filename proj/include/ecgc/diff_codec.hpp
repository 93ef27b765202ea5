#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ecgc/quantizer_design.hpp"

namespace ecgc {

/// Output of the differential codec: one uncompressed seed sample plus one
/// codebook index per remaining sample.
struct DiffEncoded {
    double initial = 0.0;
    std::vector<std::uint32_t> indices;
    Codebook codebook;
};

/// How the modification factor A is produced.
///   table_gap  - codebook-gap lookup keyed on the previous index, sign
///                matching the previous reconstruction error (the codec's
///                own rule; multiplication-free)
///   none       - A = 0 (plain difference quantization)
///   full       - A = previous reconstruction error itself (equivalent to
///                the closed-loop M=1, a1=1 codec; used for cross checks)
enum class ModificationPolicy { table_gap, none, full };

/// Per-sample encoder internals for analysis and tests.
struct DiffTrace {
    std::vector<double> reconstruction;    // x-hat, full length
    std::vector<double> a_factors;         // A_i, index 0 unused
    std::vector<double> s_values;          // previous-sample error s_i
    std::vector<double> modified_diffs;    // delta-x'_i
};

/// Encode adjacent differences with an additive correction A that counteracts
/// accumulated quantization error. The per-sample loop uses three
/// additions/subtractions plus comparisons and table lookups; it contains no
/// multiplication.
DiffEncoded diff_encode(std::span<const double> signal, const Codebook& codebook,
                        ModificationPolicy policy = ModificationPolicy::table_gap,
                        DiffTrace* trace = nullptr);

/// Cumulative lookup decoder: x-hat_i = x-hat_{i-1} + level(l_i). Output is
/// bit-identical to the encoder's internal reconstruction.
std::vector<double> diff_decode(const DiffEncoded& enc);

struct BetaSample {
    double beta = 0.0; // A_i / s_i
    bool defined = false;
};

/// Realized contraction factors beta_i = A_i / s_i for samples where
/// |s_i| > 1e-12; validates the first-order stability abstraction of the
/// modification factor.
std::vector<BetaSample> empirical_beta_trace(std::span<const double> signal,
                                             const Codebook& codebook);

} // namespace ecgc
