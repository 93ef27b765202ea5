#pragma once

#include <cstdint>

namespace ecgc::detail {

struct OpCounters {
    std::uint64_t adds = 0;
    std::uint64_t muls = 0;
    int paused = 0;

    void reset() {
        adds = 0;
        muls = 0;
        paused = 0;
    }
};

inline OpCounters& op_counters() {
    thread_local OpCounters counters;
    return counters;
}

/// Drop-in scalar that tallies additions/subtractions and multiplications in
/// the thread-local counters. Comparisons, copies and sign flips are free;
/// plain double arithmetic is never counted, so setup code outside a kernel's
/// per-sample loop stays invisible.
struct Counted {
    double v = 0.0;

    Counted() = default;
    Counted(double x) : v(x) {}

    friend Counted operator+(Counted a, Counted b) {
        auto& c = op_counters();
        if (c.paused == 0) ++c.adds;
        return Counted(a.v + b.v);
    }
    friend Counted operator-(Counted a, Counted b) {
        auto& c = op_counters();
        if (c.paused == 0) ++c.adds;
        return Counted(a.v - b.v);
    }
    friend Counted operator*(Counted a, Counted b) {
        auto& c = op_counters();
        if (c.paused == 0) ++c.muls;
        return Counted(a.v * b.v);
    }
    friend Counted operator-(Counted a) { return Counted(-a.v); }
};

inline double value_of(double x) { return x; }
inline double value_of(Counted x) { return x.v; }

struct PauseCounting {
    PauseCounting() { ++op_counters().paused; }
    ~PauseCounting() { --op_counters().paused; }
    PauseCounting(const PauseCounting&) = delete;
    PauseCounting& operator=(const PauseCounting&) = delete;
};

} // namespace ecgc::detail
