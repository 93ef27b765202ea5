#include "ecgc/conditional_codec.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "ecgc/errors.hpp"

namespace ecgc {

DensityView DensityView::of(const FittedPdf& pdf) {
    DensityView view;
    view.lo = pdf.lo;
    view.hi = pdf.hi;
    view.eval = [pdf](double x) { return pdf.density(x); };
    return view;
}

DensityView DensityView::of(const HistogramModel& h) {
    DensityView view;
    view.lo = h.edges.front();
    view.hi = h.edges.back();
    view.eval = [h](double x) { return h.density_at(x); };
    return view;
}

AffineMap fit_affine(const DensityView& pdf_p, const DensityView& pdf_s) {
    constexpr int kGridPoints = 1024;
    const double lo = std::min(pdf_p.lo, pdf_s.lo);
    const double hi = std::max(pdf_p.hi, pdf_s.hi);
    if (!(lo < hi)) throw ValidationError("fit_affine: degenerate union support");

    double sum_s = 0, sum_p = 0, sum_ss = 0, sum_sp = 0;
    for (int i = 0; i < kGridPoints; ++i) {
        const double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / kGridPoints;
        const double fs = pdf_s.eval(x);
        const double fp = pdf_p.eval(x);
        sum_s += fs;
        sum_p += fp;
        sum_ss += fs * fs;
        sum_sp += fs * fp;
    }
    const double n = kGridPoints;
    const double var_s = sum_ss - sum_s * sum_s / n;
    if (!(var_s > 1e-12 * std::max(1.0, sum_ss))) {
        throw DegenerateInputError("fit_affine: secondary density is constant on the grid");
    }
    AffineMap map;
    map.a = (sum_sp - sum_s * sum_p / n) / var_s;
    map.b = (sum_p - map.a * sum_s) / n;
    if (!std::isfinite(map.a) || !std::isfinite(map.b) || map.a == 0.0) {
        throw DegenerateInputError("fit_affine: degenerate affine fit");
    }
    return map;
}

void ConditionalCodebook::validate() const {
    if (n1 < 1 || n2 < 1) throw ValidationError("conditional codebook needs n1 >= 1 and n2 >= 1");
    const std::size_t bins_count = std::size_t{1} << n1;
    if (coarse_s.size() != bins_count + 1 || coarse_p.size() != bins_count + 1) {
        throw ValidationError("conditional codebook boundary count must be 2^n1 + 1");
    }
    for (std::size_t i = 0; i + 1 < coarse_s.size(); ++i) {
        if (!(coarse_s[i] < coarse_s[i + 1])) {
            throw ValidationError("coarse boundaries must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < coarse_s.size(); ++i) {
        const double mapped = affine.a * coarse_s[i] + affine.b;
        if (mapped != coarse_p[i]) {
            throw ValidationError("mapped primary boundaries must equal a*x + b exactly");
        }
    }
    if (subcodebooks.size() != bins_count) {
        throw ValidationError("sub-codebook count must be 2^n1");
    }
    const std::size_t sub_levels = std::size_t{1} << n2;
    for (std::size_t k = 0; k < subcodebooks.size(); ++k) {
        subcodebooks[k].validate();
        if (subcodebooks[k].levels.size() != sub_levels) {
            throw ValidationError("sub-codebooks must hold 2^n2 levels");
        }
        for (double lv : subcodebooks[k].levels) {
            if (lv < coarse_s[k] || lv > coarse_s[k + 1]) {
                throw ValidationError("sub-codebook level escapes its coarse bin");
            }
        }
    }
}

ConditionalCodebook build_conditional_codebook(const FittedPdf& pdf_s, const AffineMap& affine,
                                               int n1, int n2, CoarsePartition partition) {
    if (n1 < 1 || n2 < 1) throw ValidationError("build_conditional_codebook needs n1, n2 >= 1");
    if (!std::isfinite(affine.a) || affine.a == 0.0 || !std::isfinite(affine.b)) {
        throw ValidationError("affine map must have finite a != 0 and finite b");
    }
    const int bins_count = 1 << n1;
    const int sub_levels = 1 << n2;

    ConditionalCodebook cb;
    cb.affine = affine;
    cb.n1 = n1;
    cb.n2 = n2;

    cb.coarse_s.resize(static_cast<std::size_t>(bins_count) + 1);
    cb.coarse_s.front() = pdf_s.lo;
    cb.coarse_s.back() = pdf_s.hi;
    if (partition == CoarsePartition::lloyd) {
        // levels of the coarse design are discarded; only the partition is kept
        const Codebook coarse = lloyd_max(pdf_s, bins_count);
        for (int k = 0; k + 1 < bins_count; ++k) {
            cb.coarse_s[static_cast<std::size_t>(k) + 1] = coarse.boundaries[static_cast<std::size_t>(k)];
        }
    } else {
        for (int k = 1; k < bins_count; ++k) {
            cb.coarse_s[static_cast<std::size_t>(k)] =
                pdf_s.lo + (pdf_s.hi - pdf_s.lo) * static_cast<double>(k) / bins_count;
        }
    }

    cb.coarse_p.resize(cb.coarse_s.size());
    for (std::size_t i = 0; i < cb.coarse_s.size(); ++i) {
        cb.coarse_p[i] = affine.a * cb.coarse_s[i] + affine.b;
    }

    cb.subcodebooks.reserve(static_cast<std::size_t>(bins_count));
    for (int k = 0; k < bins_count; ++k) {
        const FittedPdf bin_pdf =
            pdf_s.restrict_to(cb.coarse_s[static_cast<std::size_t>(k)],
                              cb.coarse_s[static_cast<std::size_t>(k) + 1]);
        cb.subcodebooks.push_back(lloyd_max(bin_pdf, sub_levels));
    }
    cb.validate();
    return cb;
}

namespace {

std::size_t half_open_bin(const std::vector<double>& bounds, double x, bool increasing) {
    const std::size_t bins = bounds.size() - 1;
    if (increasing) {
        // k with bounds[k] <= x < bounds[k+1], clamped at the edges
        auto it = std::upper_bound(bounds.begin(), bounds.end(), x);
        if (it == bounds.begin()) return 0;
        std::size_t k = static_cast<std::size_t>(it - bounds.begin()) - 1;
        return std::min(k, bins - 1);
    }
    // decreasing boundary sequence (negative affine scale)
    for (std::size_t k = 0; k < bins; ++k) {
        if (x <= bounds[k] && x > bounds[k + 1]) return k;
    }
    return x > bounds.front() ? 0 : bins - 1;
}

} // namespace

std::size_t coarse_bin_of_sample(const ConditionalCodebook& cb, double x_s) {
    return half_open_bin(cb.coarse_s, x_s, true);
}

std::size_t coarse_bin_from_primary(const ConditionalCodebook& cb, double x_p_hat) {
    return half_open_bin(cb.coarse_p, x_p_hat, cb.affine.a > 0.0);
}

std::uint32_t cond_encode(double x_s, const ConditionalCodebook& cb) {
    if (!std::isfinite(x_s)) throw NumericError("non-finite secondary sample");
    const std::size_t k = coarse_bin_of_sample(cb, x_s);
    return cb.subcodebooks[k].quantize(x_s);
}

double cond_decode(std::uint32_t index, double x_p_hat, const ConditionalCodebook& cb) {
    if (index >= (std::uint32_t{1} << cb.n2)) {
        throw CorruptStreamError("conditional sub-index out of range");
    }
    const std::size_t k = coarse_bin_from_primary(cb, x_p_hat);
    return cb.subcodebooks[k].levels[index];
}

std::string ConditionalCodebook::to_json() const {
    nlohmann::json j;
    j["a"] = affine.a;
    j["b"] = affine.b;
    j["n1"] = n1;
    j["n2"] = n2;
    j["coarse_s"] = coarse_s;
    j["coarse_p"] = coarse_p;
    auto& subs = j["subcodebooks"] = nlohmann::json::array();
    for (const auto& sub : subcodebooks) subs.push_back(sub.levels);
    return j.dump();
}

ConditionalCodebook ConditionalCodebook::from_json(const std::string& text) {
    ConditionalCodebook cb;
    try {
        auto j = nlohmann::json::parse(text);
        cb.affine.a = j.at("a").get<double>();
        cb.affine.b = j.at("b").get<double>();
        cb.n1 = j.at("n1").get<int>();
        cb.n2 = j.at("n2").get<int>();
        cb.coarse_s = j.at("coarse_s").get<std::vector<double>>();
        cb.coarse_p = j.at("coarse_p").get<std::vector<double>>();
        for (const auto& levels : j.at("subcodebooks")) {
            Codebook sub;
            sub.levels = levels.get<std::vector<double>>();
            sub.boundaries.resize(sub.levels.size() - 1);
            for (std::size_t l = 0; l + 1 < sub.levels.size(); ++l) {
                sub.boundaries[l] = 0.5 * (sub.levels[l] + sub.levels[l + 1]);
            }
            cb.subcodebooks.push_back(std::move(sub));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("conditional codebook json: ") + e.what());
    }
    cb.validate();
    return cb;
}

} // namespace ecgc
