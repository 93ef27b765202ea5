#include "ecgc/rate_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "ecgc/diff_codec.hpp"
#include "ecgc/errors.hpp"
#include "ecgc/quantizer_design.hpp"
#include "ecgc/signal_io.hpp"

namespace ecgc {

void RateBounds::validate() const {
    if (!(t_t_lower_s > 0.0) || !(t_t_lower_s < t_t_upper_s)) {
        throw ValidationError("rate bounds need 0 < t_t_lower_s < t_t_upper_s");
    }
    if (w_lower < 1 || w_lower >= w_upper) {
        throw ValidationError("rate bounds need 1 <= w_lower < w_upper");
    }
}

std::string RateBounds::to_json() const {
    nlohmann::json j;
    j["t_t_upper_s"] = t_t_upper_s;
    j["t_t_lower_s"] = t_t_lower_s;
    j["w_upper"] = w_upper;
    j["w_lower"] = w_lower;
    return j.dump();
}

RateBounds RateBounds::from_json(const std::string& text) {
    RateBounds bounds;
    try {
        auto j = nlohmann::json::parse(text);
        if (j.contains("t_t_upper_s")) bounds.t_t_upper_s = j["t_t_upper_s"].get<double>();
        if (j.contains("t_t_lower_s")) bounds.t_t_lower_s = j["t_t_lower_s"].get<double>();
        if (j.contains("w_upper")) bounds.w_upper = j["w_upper"].get<int>();
        if (j.contains("w_lower")) bounds.w_lower = j["w_lower"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("rate bounds json: ") + e.what());
    }
    bounds.validate();
    return bounds;
}

double qrs_period_bound(const std::vector<EcgRecord>& records) {
    if (records.empty()) throw ValidationError("qrs_period_bound over an empty record set");
    double min_gap_s = std::numeric_limits<double>::infinity();
    for (const auto& record : records) {
        record.validate();
        if (!record.annotations) {
            throw ValidationError("qrs_period_bound needs Q/R/S annotations on every record");
        }
        const auto& ann = *record.annotations;
        if (ann.q.empty() || ann.q.size() != ann.r.size() || ann.r.size() != ann.s.size()) {
            throw ValidationError("qrs_period_bound needs matching Q/R/S annotation counts");
        }
        for (std::size_t b = 0; b < ann.r.size(); ++b) {
            if (!(ann.q[b] < ann.r[b] && ann.r[b] < ann.s[b])) {
                throw ValidationError("annotations must satisfy Q < R < S within each beat");
            }
            const double t_qr =
                static_cast<double>(ann.r[b] - ann.q[b]) * record.sample_period_s;
            const double t_rs =
                static_cast<double>(ann.s[b] - ann.r[b]) * record.sample_period_s;
            min_gap_s = std::min(min_gap_s, std::min(t_qr, t_rs));
        }
    }
    // a period T resolves events down to T/2, so the finest gap allows 2x itself
    return 2.0 * min_gap_s;
}

int word_length_bound(std::span<const double> summit_distances,
                      std::span<const double> envelope_amplitudes) {
    if (summit_distances.empty() || summit_distances.size() != envelope_amplitudes.size()) {
        throw ValidationError("word_length_bound needs matching non-empty measurement arrays");
    }
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < summit_distances.size(); ++i) {
        if (envelope_amplitudes[i] == 0.0) {
            throw ValidationError("zero envelope amplitude at index " + std::to_string(i));
        }
        min_ratio = std::min(min_ratio, std::abs(summit_distances[i] / envelope_amplitudes[i]));
    }
    if (!(min_ratio > 0.0)) throw ValidationError("zero summit-to-average ratio has no finite bound");
    int w = 0;
    while (w < 64 && std::ldexp(1.0, -(w + 1)) > min_ratio) ++w;
    return w;
}

double ase(std::span<const double> original, std::span<const double> reconstructed) {
    if (original.size() != reconstructed.size()) {
        throw ValidationError("ase needs equal-length inputs");
    }
    if (original.empty()) throw ValidationError("ase over empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double d = original[i] - reconstructed[i];
        sum += d * d;
    }
    return sum / static_cast<double>(original.size());
}

std::vector<RateOperatingPoint> evaluate_grid(std::span<const double> samples, double t0_s,
                                              GridCodec codec, const RateBounds& bounds) {
    bounds.validate();
    if (!(t0_s > 0.0)) throw ValidationError("t0_s must be positive");
    if (samples.size() < 4) throw ValidationError("record too short for grid evaluation");

    constexpr double kEps = 1e-9;
    const int k_min = std::max(1, static_cast<int>(std::ceil(bounds.t_t_lower_s / t0_s - kEps)));
    const int k_max = static_cast<int>(std::floor(bounds.t_t_upper_s / t0_s + kEps));
    if (k_max < k_min || bounds.w_lower > bounds.w_upper) {
        throw ValidationError("empty feasible (W, K) grid");
    }

    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    if (*mn == *mx) throw ValidationError("constant record has no dynamic range to quantize");

    std::vector<RateOperatingPoint> grid;
    grid.reserve(static_cast<std::size_t>(bounds.w_upper - bounds.w_lower + 1) *
                 static_cast<std::size_t>(k_max - k_min + 1));

    for (int k = k_min; k <= k_max; ++k) {
        const auto decimated = decimate(samples, k);
        if (decimated.size() < 2) continue;
        for (int w = bounds.w_lower; w <= bounds.w_upper; ++w) {
            const int levels = 1 << w;
            std::vector<double> recon_decimated;
            if (codec == GridCodec::uniform_direct) {
                const Codebook cb = uniform_codebook(*mn, *mx, levels);
                recon_decimated.reserve(decimated.size());
                for (double v : decimated) recon_decimated.push_back(cb.levels[cb.quantize(v)]);
            } else {
                const Codebook cb = train_differential_codebook(decimated, levels);
                recon_decimated = diff_decode(diff_encode(decimated, cb));
            }
            std::vector<double> held(samples.size());
            for (std::size_t m = 0; m < samples.size(); ++m) {
                held[m] = recon_decimated[m / static_cast<std::size_t>(k)];
            }
            RateOperatingPoint point;
            point.w = w;
            point.k = k;
            point.t_t_s = k * t0_s;
            point.rate_bps = static_cast<double>(w) / point.t_t_s;
            point.ase = ase(samples, held);
            grid.push_back(point);
        }
    }
    if (grid.empty()) throw ValidationError("empty feasible (W, K) grid");
    return grid;
}

RateOperatingPoint optimize_rate(std::span<const RateOperatingPoint> grid, double budget_bps) {
    if (grid.empty()) throw ValidationError("optimize_rate over an empty grid");
    const RateOperatingPoint* best = nullptr;
    double min_rate = std::numeric_limits<double>::infinity();
    for (const auto& point : grid) {
        min_rate = std::min(min_rate, point.rate_bps);
        if (point.rate_bps > budget_bps) continue;
        if (best == nullptr || point.ase < best->ase ||
            (point.ase == best->ase && (point.rate_bps < best->rate_bps ||
                                        (point.rate_bps == best->rate_bps && point.w < best->w)))) {
            best = &point;
        }
    }
    if (best == nullptr) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "budget %.17g b/s below the minimum achievable rate %.17g b/s", budget_bps,
                      min_rate);
        throw InfeasibleBudgetError(msg, min_rate);
    }
    return *best;
}

std::string grid_to_csv(std::span<const RateOperatingPoint> grid) {
    std::string out = "W,K,Tt_s,rate_bps,ase\n";
    char line[256];
    for (const auto& p : grid) {
        std::snprintf(line, sizeof(line), "%d,%d,%.17g,%.17g,%.17g\n", p.w, p.k, p.t_t_s,
                      p.rate_bps, p.ase);
        out += line;
    }
    return out;
}

std::string optimum_to_json(const RateOperatingPoint& point, double budget_bps) {
    nlohmann::json j;
    j["W"] = point.w;
    j["K"] = point.k;
    j["rate_bps"] = point.rate_bps;
    j["ase"] = point.ase;
    j["budget_bps"] = budget_bps;
    return j.dump();
}

} // namespace ecgc
