#ifndef CVSENSE_EXEC_HPP
#define CVSENSE_EXEC_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "cvsense/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cvsense {

// Every Monte Carlo loop and grid transform runs through one of these two
// modes. The serial mode is the reference implementation used by tests; the
// parallel mode must produce bit-identical results (work is split into chunks
// whose layout does not depend on the thread count, and chunk results are
// merged in a fixed order).
enum class ExecPolicy { serial, parallel };

inline int max_threads(ExecPolicy policy) {
#ifdef _OPENMP
    return policy == ExecPolicy::parallel ? omp_get_max_threads() : 1;
#else
    (void)policy;
    return 1;
#endif
}

// Streaming mean/variance accumulator with 4th moment for rms error bars.
struct MomentAccum {
    double count = 0.0;
    double sum = 0.0;
    double sum2 = 0.0;
    double sum4 = 0.0;

    void add(double x) {
        count += 1.0;
        sum += x;
        sum2 += x * x;
        sum4 += x * x * x * x;
    }
    void merge(const MomentAccum& o) {
        count += o.count;
        sum += o.sum;
        sum2 += o.sum2;
        sum4 += o.sum4;
    }
    double mean() const { return sum / count; }
    double raw2() const { return sum2 / count; }
    double rms() const;
    // standard error of rms(), from the sampling variance of the 2nd moment
    double rms_stderr() const;
};

inline double MomentAccum::rms() const {
    double m2 = sum2 / count;
    return m2 > 0.0 ? std::sqrt(m2) : 0.0;
}

inline double MomentAccum::rms_stderr() const {
    double m2 = sum2 / count;
    double m4 = sum4 / count;
    double var_m2 = (m4 - m2 * m2) / count;
    if (var_m2 <= 0.0 || m2 <= 0.0) return 0.0;
    return 0.5 * std::sqrt(var_m2) / std::sqrt(m2);
}

inline constexpr int kMcChunks = 256;

// Runs `shots` trials split into kMcChunks fixed chunks. per_chunk receives a
// dedicated RngStream and the number of trials; states are returned in chunk
// order so the caller's merge is deterministic under any thread count.
template <class State, class Fn>
std::vector<State> mc_chunks(long shots, const RngStream& base, ExecPolicy policy, Fn per_chunk) {
    int n_chunks = static_cast<int>(shots < kMcChunks ? shots : kMcChunks);
    if (n_chunks < 1) n_chunks = 1;
    std::vector<State> states(static_cast<std::size_t>(n_chunks));
    long lo = shots / n_chunks;
    long rem = shots % n_chunks;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (policy == ExecPolicy::parallel)
#endif
    for (int c = 0; c < n_chunks; ++c) {
        long count = lo + (c < rem ? 1 : 0);
        RngStream rng = base.substream(static_cast<std::uint64_t>(c));
        states[static_cast<std::size_t>(c)] = per_chunk(rng, count);
    }
    return states;
}

template <class State>
State merge_states(const std::vector<State>& states) {
    State total;
    for (const auto& s : states) total.merge(s);
    return total;
}

}  // namespace cvsense

#endif
