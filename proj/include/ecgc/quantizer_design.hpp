#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ecgc/record.hpp"

namespace ecgc {

/// Scalar codebook: strictly increasing output levels plus the decision
/// boundaries between them. quantize() returns the level whose cell contains
/// the input; a value sitting exactly on a boundary resolves to the lower
/// index, and out-of-range inputs clamp to the extreme levels.
struct Codebook {
    std::vector<double> levels;     // size L
    std::vector<double> boundaries; // size L - 1, interleaving the levels

    // mean squared quantization error per level, attached by lloyd_max
    double esq_q = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const { return levels.size(); }
    int bits_per_index() const;
    double span() const { return levels.back() - levels.front(); }
    std::uint32_t quantize(double v) const;
    double value(std::uint32_t index) const { return levels.at(index); }

    void validate() const;

    std::string to_json() const; // {"levels":[...],"boundaries":[...]}
    static Codebook from_json(const std::string& text);
};

/// Equal-width histogram over [min, max] with probabilities normalized by
/// the sample count. A constant input occupies one bin of a unit-width
/// fallback span.
struct HistogramModel {
    std::vector<double> edges;         // size bins + 1, strictly increasing
    std::vector<double> probabilities; // size bins, sums to 1
    double observed_min = 0.0;
    double observed_max = 0.0;

    std::size_t bins() const { return probabilities.size(); }
    double density_at(double x) const; // probability / bin width, 0 outside
};

/// Peak-clipped exponential density model min(clip, amplitude * e^(-rate|x|))
/// on [lo, hi], divided by `normalization` so it integrates to one. rate = 0
/// degenerates to the uniform density.
struct FittedPdf {
    double rate_lambda = 0.0;
    double clip_level = 1.0;
    double amplitude = 1.0;
    double lo = 0.0;
    double hi = 1.0;
    double normalization = 1.0;

    double density(double x) const;
    /// |x| below which the density sits on the clipped plateau (0 when the
    /// exponential never reaches the clip level).
    double clip_radius() const;
    /// Same family restricted to [new_lo, new_hi] and renormalized.
    FittedPdf restrict_to(double new_lo, double new_hi) const;

    static FittedPdf uniform(double lo, double hi);
};

HistogramModel histogram(std::span<const double> values, int bins);

/// Extreme observed bounds over a record set: min of per-record minima and
/// max of per-record maxima, over all channels; `differenced` switches to
/// adjacent differences.
std::pair<double, double> dynamic_range(const std::vector<EcgRecord>& records, bool differenced);

/// Least-squares fit of log-density over the bins below the clipped plateau;
/// the clip level is the maximum observed bin density and the result is
/// renormalized to integrate to one.
FittedPdf fit_clipped_exponential(const HistogramModel& h);

/// Lloyd-Max training: alternate mass-centroid levels and midpoint boundaries
/// until the relative change of the quantization MSE drops below 1e-9 (500
/// iteration cap). Zero-mass cells are contracted toward the distribution
/// centroid, 10% per retry, at most 50 retries. The returned codebook carries
/// esq_q and satisfies both fixed-point conditions within 1e-6. esq_trace,
/// when given, receives the per-iteration objective values.
Codebook lloyd_max(const FittedPdf& pdf, int levels, std::vector<double>* esq_trace = nullptr);

/// L equal cells over [lo, hi], levels at the cell midpoints.
Codebook uniform_codebook(double lo, double hi, int levels);

/// Quantization MSE of a codebook under a density (the Lloyd-Max objective),
/// reported per level like Codebook::esq_q.
double quantization_mse(const FittedPdf& pdf, const Codebook& cb);

/// Standard differential-codebook training pipeline: histogram the adjacent
/// differences, fit the clipped exponential, run Lloyd-Max. Falls back to a
/// uniform codebook over the difference range when the data cannot support
/// the fit.
Codebook train_differential_codebook(std::span<const double> samples, int levels, int bins = 200);

} // namespace ecgc
