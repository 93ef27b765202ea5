#include "ecgc/quantizer_design.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ecgc/detail/kernels.hpp"
#include "ecgc/detail/quadrature.hpp"
#include "ecgc/errors.hpp"
#include "ecgc/signal_io.hpp"

namespace ecgc {

using detail::integrate_split;

// ---------------------------------------------------------------------------
// Codebook

int Codebook::bits_per_index() const {
    int bits = 1;
    while ((std::size_t{1} << bits) < levels.size()) ++bits;
    return bits;
}

std::uint32_t Codebook::quantize(double v) const { return detail::quantize_value(*this, v); }

void Codebook::validate() const {
    if (levels.size() < 2) throw ValidationError("codebook needs at least 2 levels");
    if (boundaries.size() != levels.size() - 1) {
        throw ValidationError("codebook boundary count must be level count - 1");
    }
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
        if (!(levels[l] < boundaries[l] && boundaries[l] < levels[l + 1])) {
            throw ValidationError("codebook boundaries must interleave the levels");
        }
    }
    for (double v : levels) {
        if (!std::isfinite(v)) throw ValidationError("codebook level not finite");
    }
}

std::string Codebook::to_json() const {
    nlohmann::json j;
    j["levels"] = levels;
    j["boundaries"] = boundaries;
    return j.dump();
}

Codebook Codebook::from_json(const std::string& text) {
    Codebook cb;
    try {
        auto j = nlohmann::json::parse(text);
        cb.levels = j.at("levels").get<std::vector<double>>();
        cb.boundaries = j.at("boundaries").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("codebook json: ") + e.what());
    }
    cb.validate();
    return cb;
}

// ---------------------------------------------------------------------------
// Histogram

HistogramModel histogram(std::span<const double> values, int bins) {
    if (values.empty()) throw ValidationError("histogram input is empty");
    if (bins < 2) throw ValidationError("histogram needs at least 2 bins");
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double lo = *mn_it, hi = *mx_it;
    HistogramModel h;
    h.observed_min = lo;
    h.observed_max = hi;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / bins;
    h.edges.resize(bins + 1);
    for (int j = 0; j <= bins; ++j) h.edges[j] = lo + j * width;
    h.edges.back() = hi;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        auto idx = static_cast<long>(std::floor((v - lo) / width));
        idx = std::clamp(idx, 0l, static_cast<long>(bins) - 1);
        ++counts[static_cast<std::size_t>(idx)];
    }
    h.probabilities.resize(bins);
    for (int j = 0; j < bins; ++j) {
        h.probabilities[j] = static_cast<double>(counts[j]) / static_cast<double>(values.size());
    }
    return h;
}

double HistogramModel::density_at(double x) const {
    if (edges.empty() || x < edges.front() || x > edges.back()) return 0.0;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t j = it == edges.begin() ? 0 : static_cast<std::size_t>(it - edges.begin()) - 1;
    j = std::min(j, probabilities.size() - 1);
    const double w = edges[j + 1] - edges[j];
    return probabilities[j] / w;
}

std::pair<double, double> dynamic_range(const std::vector<EcgRecord>& records, bool differenced) {
    if (records.empty()) throw ValidationError("dynamic_range over an empty record set");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& record : records) {
        record.validate();
        for (const auto& ch : record.channels) {
            if (differenced) {
                for (std::size_t i = 1; i < ch.samples.size(); ++i) {
                    const double d = ch.samples[i] - ch.samples[i - 1];
                    lo = std::min(lo, d);
                    hi = std::max(hi, d);
                }
            } else {
                for (double v : ch.samples) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Clipped-exponential density

double FittedPdf::clip_radius() const {
    if (rate_lambda <= 0.0 || amplitude <= clip_level) return 0.0;
    return std::log(amplitude / clip_level) / rate_lambda;
}

double FittedPdf::density(double x) const {
    if (x < lo || x > hi) return 0.0;
    const double raw = std::min(clip_level, amplitude * std::exp(-rate_lambda * std::abs(x)));
    return raw / normalization;
}

namespace {

std::vector<double> pdf_breakpoints(const FittedPdf& pdf) {
    const double r = pdf.clip_radius();
    return {-r, 0.0, r};
}

double raw_density(const FittedPdf& pdf, double x) {
    return std::min(pdf.clip_level, pdf.amplitude * std::exp(-pdf.rate_lambda * std::abs(x)));
}

double raw_mass(const FittedPdf& pdf, double a, double b) {
    const auto bp = pdf_breakpoints(pdf);
    return integrate_split([&](double x) { return raw_density(pdf, x); }, a, b, bp);
}

} // namespace

FittedPdf FittedPdf::restrict_to(double new_lo, double new_hi) const {
    FittedPdf out = *this;
    out.lo = std::max(lo, new_lo);
    out.hi = std::min(hi, new_hi);
    if (!(out.lo < out.hi)) throw DegenerateInputError("pdf restriction to an empty interval");
    out.normalization = raw_mass(out, out.lo, out.hi);
    if (!(out.normalization > 1e-300) || !std::isfinite(out.normalization)) {
        throw DegenerateInputError("pdf restriction has no probability mass");
    }
    return out;
}

FittedPdf FittedPdf::uniform(double lo, double hi) {
    if (!(lo < hi)) throw ValidationError("uniform pdf requires lo < hi");
    FittedPdf pdf;
    pdf.rate_lambda = 0.0;
    pdf.clip_level = 1.0;
    pdf.amplitude = 1.0;
    pdf.lo = lo;
    pdf.hi = hi;
    pdf.normalization = hi - lo;
    return pdf;
}

FittedPdf fit_clipped_exponential(const HistogramModel& h) {
    std::size_t occupied = 0;
    for (double p : h.probabilities) {
        if (p > 0.0) ++occupied;
    }
    if (occupied < 5) {
        throw ValidationError("clipped-exponential fit needs at least 5 occupied bins");
    }

    double clip = 0.0;
    for (std::size_t j = 0; j < h.probabilities.size(); ++j) {
        clip = std::max(clip, h.probabilities[j] / (h.edges[j + 1] - h.edges[j]));
    }

    // Regress log density on |bin center| over the bins clearly below the
    // clipped plateau.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t npts = 0;
    for (std::size_t j = 0; j < h.probabilities.size(); ++j) {
        const double w = h.edges[j + 1] - h.edges[j];
        const double d = h.probabilities[j] / w;
        if (d <= 0.0 || d >= 0.95 * clip) continue;
        const double cx = std::abs(0.5 * (h.edges[j] + h.edges[j + 1]));
        const double cy = std::log(d);
        sx += cx;
        sy += cy;
        sxx += cx * cx;
        sxy += cx * cy;
        ++npts;
    }

    FittedPdf pdf;
    pdf.lo = h.edges.front();
    pdf.hi = h.edges.back();
    pdf.clip_level = clip;
    if (npts >= 2) {
        const double det = npts * sxx - sx * sx;
        if (std::abs(det) < 1e-30) throw DegenerateInputError("clipped-exponential fit is singular");
        const double slope = (npts * sxy - sx * sy) / det;
        const double intercept = (sy - slope * sx) / npts;
        if (!std::isfinite(slope) || !std::isfinite(intercept)) {
            throw DegenerateInputError("clipped-exponential fit produced non-finite coefficients");
        }
        pdf.rate_lambda = std::max(0.0, -slope);
        pdf.amplitude = std::exp(intercept);
    } else {
        // Everything sits on the plateau: flat density.
        pdf.rate_lambda = 0.0;
        pdf.amplitude = clip;
    }
    pdf.normalization = raw_mass(pdf, pdf.lo, pdf.hi);
    if (!(pdf.normalization > 0.0) || !std::isfinite(pdf.normalization)) {
        throw DegenerateInputError("clipped-exponential fit does not normalize");
    }
    return pdf;
}

// ---------------------------------------------------------------------------
// Lloyd-Max

namespace {

struct CellMoments {
    double mass = 0.0;
    double first = 0.0;
};

CellMoments cell_moments(const FittedPdf& pdf, double a, double b) {
    const auto bp = pdf_breakpoints(pdf);
    CellMoments m;
    m.mass = integrate_split([&](double x) { return pdf.density(x); }, a, b, bp);
    m.first = integrate_split([&](double x) { return x * pdf.density(x); }, a, b, bp);
    return m;
}

double cell_sq_error(const FittedPdf& pdf, double a, double b, double center) {
    const auto bp = pdf_breakpoints(pdf);
    return integrate_split(
        [&](double x) {
            const double d = x - center;
            return d * d * pdf.density(x);
        },
        a, b, bp);
}

/// Boundaries at equal-probability quantiles, from a piecewise-linear inverse
/// CDF sampled on a fine grid.
std::vector<double> equal_mass_boundaries(const FittedPdf& pdf, int levels) {
    constexpr int kGrid = 2048;
    std::vector<double> xs(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) {
        xs[i] = pdf.lo + (pdf.hi - pdf.lo) * static_cast<double>(i) / kGrid;
    }
    std::vector<double> cdf(kGrid + 1, 0.0);
    for (int i = 1; i <= kGrid; ++i) {
        cdf[i] = cdf[i - 1] + cell_moments(pdf, xs[i - 1], xs[i]).mass;
    }
    const double total = cdf.back();
    if (!(total > 0.0)) throw DegenerateInputError("density has no mass on its support");
    std::vector<double> bounds(levels - 1);
    int cursor = 1;
    for (int l = 1; l < levels; ++l) {
        const double target = total * static_cast<double>(l) / levels;
        while (cursor < kGrid && cdf[cursor] < target) ++cursor;
        const double c0 = cdf[cursor - 1], c1 = cdf[cursor];
        const double f = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
        bounds[l - 1] = xs[cursor - 1] + f * (xs[cursor] - xs[cursor - 1]);
    }
    return bounds;
}

} // namespace

double quantization_mse(const FittedPdf& pdf, const Codebook& cb) {
    const std::size_t L = cb.levels.size();
    double total = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const double a = std::max(pdf.lo, l == 0 ? pdf.lo : cb.boundaries[l - 1]);
        const double b = std::min(pdf.hi, l + 1 == L ? pdf.hi : cb.boundaries[l]);
        if (b > a) total += cell_sq_error(pdf, a, b, cb.levels[l]);
    }
    return total / static_cast<double>(L);
}

Codebook lloyd_max(const FittedPdf& pdf, int levels, std::vector<double>* esq_trace) {
    if (levels < 2) throw ValidationError("lloyd_max needs at least 2 levels");
    if (!(pdf.lo < pdf.hi)) throw ValidationError("pdf support is empty");
    if (esq_trace) esq_trace->clear();

    constexpr int kMaxIterations = 500;
    constexpr int kMaxRetries = 50;
    constexpr double kRelTol = 1e-9;

    std::vector<double> bounds = equal_mass_boundaries(pdf, levels);
    std::vector<double> lv(levels, 0.0);

    const CellMoments overall = cell_moments(pdf, pdf.lo, pdf.hi);
    const double centroid = overall.first / overall.mass;
    const double mass_eps = overall.mass * 1e-13 / levels;

    int retries = 0;
    double prev_esq = std::numeric_limits<double>::infinity();
    double esq = prev_esq;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // centroid step; contract any zero-mass cell toward the distribution
        // centroid and redo the level placement
        bool redo = true;
        while (redo) {
            redo = false;
            for (int l = 0; l < levels; ++l) {
                const double a = l == 0 ? pdf.lo : bounds[l - 1];
                const double b = l + 1 == levels ? pdf.hi : bounds[l];
                const CellMoments m = cell_moments(pdf, a, b);
                if (!(m.mass > mass_eps)) {
                    if (++retries > kMaxRetries) {
                        throw DegenerateInputError(
                            "lloyd_max: zero-mass cell persists after contraction retries");
                    }
                    if (l > 0) bounds[l - 1] += 0.1 * (centroid - bounds[l - 1]);
                    if (l + 1 < levels) bounds[l] += 0.1 * (centroid - bounds[l]);
                    redo = true;
                    break;
                }
                lv[l] = m.first / m.mass;
            }
        }

        // boundary step: midpoints of adjacent levels
        for (int l = 0; l + 1 < levels; ++l) bounds[l] = 0.5 * (lv[l] + lv[l + 1]);

        // objective, reported per level
        double total = 0.0;
        for (int l = 0; l < levels; ++l) {
            const double a = l == 0 ? pdf.lo : bounds[l - 1];
            const double b = l + 1 == levels ? pdf.hi : bounds[l];
            total += cell_sq_error(pdf, a, b, lv[l]);
        }
        esq = total / levels;
        if (esq_trace) esq_trace->push_back(esq);

        if (std::isfinite(prev_esq)) {
            const double rel = std::abs(prev_esq - esq) / std::max(esq, 1e-300);
            if (rel < kRelTol) break;
        }
        prev_esq = esq;
    }

    Codebook cb;
    cb.levels = std::move(lv);
    cb.boundaries = std::move(bounds);
    cb.esq_q = esq;
    cb.validate();
    return cb;
}

Codebook train_differential_codebook(std::span<const double> samples, int levels, int bins) {
    const auto diffs = adjacent_differences(samples);
    if (diffs.empty()) throw ValidationError("need at least 2 samples to train on differences");
    try {
        const auto h = histogram(diffs, bins);
        const auto pdf = fit_clipped_exponential(h);
        return lloyd_max(pdf, levels);
    } catch (const ValidationError&) {
        auto [mn, mx] = std::minmax_element(diffs.begin(), diffs.end());
        double lo = *mn, hi = *mx;
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        return uniform_codebook(lo, hi, levels);
    }
}

Codebook uniform_codebook(double lo, double hi, int levels) {
    if (!(lo < hi)) throw ValidationError("uniform_codebook requires lo < hi");
    if (levels < 2) throw ValidationError("uniform_codebook needs at least 2 levels");
    Codebook cb;
    const double width = (hi - lo) / levels;
    cb.levels.resize(levels);
    cb.boundaries.resize(levels - 1);
    for (int l = 0; l < levels; ++l) cb.levels[l] = lo + (l + 0.5) * width;
    for (int l = 0; l + 1 < levels; ++l) cb.boundaries[l] = lo + (l + 1) * width;
    cb.validate();
    return cb;
}

} // namespace ecgc
