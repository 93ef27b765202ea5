#pragma once

#include <span>
#include <string>
#include <vector>

#include "ecgc/record.hpp"

namespace ecgc {

/// Feasible box for the (W, K) search. Defaults are the time-resolution and
/// amplitude-resolution bounds derived from large annotated corpora.
struct RateBounds {
    double t_t_upper_s = 0.1138;
    double t_t_lower_s = 1.0 / 360.0;
    int w_upper = 12;
    int w_lower = 4;

    void validate() const;
    std::string to_json() const;
    static RateBounds from_json(const std::string& text);
};

struct RateOperatingPoint {
    int w = 0;            // bits per transmitted sample
    int k = 1;            // downsampling factor
    double t_t_s = 0.0;   // transmission period k * t0
    double rate_bps = 0.0;
    double ase = 0.0;     // average square error on the original grid
};

/// Transmission-period upper bound from annotated beats: twice the smallest
/// Q-R / R-S duration (a period T yields time resolution T/2).
double qrs_period_bound(const std::vector<EcgRecord>& records);

/// Smallest integer W with 1 / 2^(W+1) <= min |g/eta| over the paired wave
/// summit-to-average distances and envelope amplitudes.
int word_length_bound(std::span<const double> summit_distances,
                      std::span<const double> envelope_amplitudes);

/// Average square error: mean of squared differences over the full grid.
double ase(std::span<const double> original, std::span<const double> reconstructed);

enum class GridCodec { uniform_direct, proposed_diff };

/// Evaluate every feasible integer (W, K) cell: quantize the K-downsampled
/// signal with a 2^W-level codebook (uniform over the record's measured
/// extremes, or a Lloyd-trained differential codebook), reconstruct by
/// zero-order hold, and score ase against the original grid.
std::vector<RateOperatingPoint> evaluate_grid(std::span<const double> samples, double t0_s,
                                              GridCodec codec, const RateBounds& bounds);

/// Feasible point (rate <= budget) with minimal ase; ties break toward lower
/// rate, then lower W. Throws InfeasibleBudgetError carrying the minimum
/// achievable rate when nothing fits.
RateOperatingPoint optimize_rate(std::span<const RateOperatingPoint> grid, double budget_bps);

std::string grid_to_csv(std::span<const RateOperatingPoint> grid); // "W,K,Tt_s,rate_bps,ase"
std::string optimum_to_json(const RateOperatingPoint& point, double budget_bps);

} // namespace ecgc
