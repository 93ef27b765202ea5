#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ecgc/quantizer_design.hpp"

namespace ecgc {

/// Affine relation fitted between two density curves.
struct AffineMap {
    double a = 1.0;
    double b = 0.0;
};

/// Density evaluated on a support interval; adapter for both FittedPdf and
/// HistogramModel inputs.
struct DensityView {
    double lo = 0.0;
    double hi = 1.0;
    std::function<double(double)> eval;

    static DensityView of(const FittedPdf& pdf);
    static DensityView of(const HistogramModel& h);
};

/// Two-tier secondary-sensor codebook: a coarse 2^n1-bin partition of the
/// secondary support, the same boundaries mapped into primary coordinates,
/// and one 2^n2-level sub-codebook per coarse bin.
struct ConditionalCodebook {
    AffineMap affine;
    int n1 = 1;
    int n2 = 1;
    std::vector<double> coarse_s;        // 2^n1 + 1 boundaries, increasing
    std::vector<double> coarse_p;        // affine image of coarse_s
    std::vector<Codebook> subcodebooks;  // 2^n1 entries of 2^n2 levels

    std::size_t bins() const { return subcodebooks.size(); }
    void validate() const;

    std::string to_json() const;
    static ConditionalCodebook from_json(const std::string& text);
};

/// Least squares of f_P against (f_S, 1) on a shared 1024-point grid spanning
/// the union support. Throws DegenerateInputError when f_S is constant on the
/// grid.
AffineMap fit_affine(const DensityView& pdf_p, const DensityView& pdf_s);

enum class CoarsePartition { lloyd, uniform };

/// Build the two-tier codebook from the secondary density: coarse boundaries
/// from a 2^n1-level Lloyd-Max design (or equal-width bins), mapped through
/// the affine pair, then per-bin Lloyd-Max sub-codebooks on the restricted
/// renormalized density.
ConditionalCodebook build_conditional_codebook(const FittedPdf& pdf_s, const AffineMap& affine,
                                               int n1, int n2,
                                               CoarsePartition partition = CoarsePartition::lloyd);

/// Index of the half-open coarse bin [x_k, x_{k+1}) containing the value,
/// clamped at the support edges.
std::size_t coarse_bin_of_sample(const ConditionalCodebook& cb, double x_s);
/// Same lookup in primary coordinates against the mapped boundaries.
std::size_t coarse_bin_from_primary(const ConditionalCodebook& cb, double x_p_hat);

/// Quantize a secondary sample inside its own coarse bin; only the n2-bit
/// sub-index is emitted.
std::uint32_t cond_encode(double x_s, const ConditionalCodebook& cb);

/// Decode a sub-index by keying the coarse bin off the reconstructed primary
/// sample.
double cond_decode(std::uint32_t index, double x_p_hat, const ConditionalCodebook& cb);

} // namespace ecgc
