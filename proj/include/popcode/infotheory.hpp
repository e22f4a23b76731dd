// Mutual information between a continuous amplitude and discrete windowed
// spike patterns, window-length extrapolation, and the two-source partial
// information atoms.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "popcode/patterns.hpp"

namespace popcode {

namespace detail {

// Digamma at positive integer arguments: psi(1) = -gamma, psi(n+1) = psi(n) + 1/n.
inline std::vector<double> digamma_table(std::size_t max_arg) {
    std::vector<double> psi(max_arg + 1, 0.0);
    if (max_arg >= 1) psi[1] = -0.57721566490153286060651209008240243;
    for (std::size_t n = 1; n < max_arg; ++n) {
        psi[n + 1] = psi[n] + 1.0 / static_cast<double>(n);
    }
    return psi;
}

// Groups samples whose joint pattern rows are identical. Returns one class id
// per sample; ids depend only on the partition, which is all the estimator
// needs.
inline std::vector<std::uint32_t> pattern_classes(const PairSet& pairs,
                                                  std::uint32_t* class_count) {
    const std::size_t n = pairs.sample_count();
    const std::size_t m = pairs.neuron_count;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    const auto* rows = pairs.patterns.data();
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const auto* ra = rows + static_cast<std::size_t>(a) * m;
        const auto* rb = rows + static_cast<std::size_t>(b) * m;
        return std::lexicographical_compare(ra, ra + m, rb, rb + m);
    });
    std::vector<std::uint32_t> cls(n, 0);
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const auto* prev = rows + static_cast<std::size_t>(order[i - 1]) * m;
            const auto* cur = rows + static_cast<std::size_t>(order[i]) * m;
            if (!std::equal(prev, prev + m, cur)) ++next;
        }
        cls[order[i]] = next;
    }
    *class_count = next + 1;
    return cls;
}

}  // namespace detail

// Nearest-neighbour estimator for the mutual information, in bits, between a
// continuous amplitude and the discrete pattern symbol.
//
// For each sample i whose pattern class holds more than one member:
//   k_i = min(k, class size - 1)
//   d_i = distance to the k_i-th nearest amplitude within the class
//   m_i = number of samples overall strictly within d_i of x_i (sample i
//         itself included)
// When d_i = 0 (exactly tied amplitudes) both count arguments fall back to
// the multiplicity of the tied value (within class / overall), keeping the
// digamma arguments positive; on fully discrete amplitudes this reduces the
// estimator to its plug-in analogue. Samples in singleton classes are
// excluded from all averages and from the sample count N. The estimate may be
// slightly negative (estimator noise) and is not clipped.
inline double mi_mixed(const PairSet& pairs, int k) {
    if (k < 1) throw std::invalid_argument("mi_mixed: k must be at least 1");
    const std::size_t n = pairs.sample_count();
    if (n < static_cast<std::size_t>(k) + 1) {
        throw std::invalid_argument("mi_mixed: needs at least k+1 samples");
    }

    std::uint32_t class_count = 0;
    const std::vector<std::uint32_t> cls = detail::pattern_classes(pairs, &class_count);
    if (class_count == 1) return 0.0;  // constant pattern carries no information

    std::vector<double> all_sorted = pairs.amplitudes;
    std::sort(all_sorted.begin(), all_sorted.end());
    if (all_sorted.front() == all_sorted.back()) return 0.0;  // constant amplitude

    std::vector<std::vector<std::uint32_t>> members(class_count);
    for (std::size_t i = 0; i < n; ++i) members[cls[i]].push_back(static_cast<std::uint32_t>(i));

    std::vector<std::uint32_t> k_term(n, 0), m_ball(n, 0), class_size(n, 0);
    std::vector<std::uint8_t> included(n, 0);

    std::vector<double> class_sorted;
    for (const auto& group : members) {
        const std::size_t sz = group.size();
        if (sz < 2) continue;
        class_sorted.resize(sz);
        std::vector<std::uint32_t> by_amp(group);
        std::sort(by_amp.begin(), by_amp.end(), [&](std::uint32_t a, std::uint32_t b) {
            return pairs.amplitudes[a] < pairs.amplitudes[b];
        });
        for (std::size_t p = 0; p < sz; ++p) class_sorted[p] = pairs.amplitudes[by_amp[p]];
        const int ki = std::min<std::size_t>(static_cast<std::size_t>(k), sz - 1);
        for (std::size_t p = 0; p < sz; ++p) {
            const double x = class_sorted[p];
            // k-th nearest within the class via an expanding window
            std::size_t lo = p, hi = p;
            double d = 0.0;
            for (int step = 0; step < ki; ++step) {
                const double left =
                    lo > 0 ? x - class_sorted[lo - 1] : std::numeric_limits<double>::infinity();
                const double right =
                    hi + 1 < sz ? class_sorted[hi + 1] - x : std::numeric_limits<double>::infinity();
                if (left <= right) {
                    --lo;
                    d = left;
                } else {
                    ++hi;
                    d = right;
                }
            }
            const std::uint32_t i = by_amp[p];
            if (d == 0.0) {
                const auto in_class = std::equal_range(class_sorted.begin(), class_sorted.end(), x);
                const auto overall = std::equal_range(all_sorted.begin(), all_sorted.end(), x);
                k_term[i] = static_cast<std::uint32_t>(in_class.second - in_class.first);
                m_ball[i] = static_cast<std::uint32_t>(overall.second - overall.first);
            } else {
                k_term[i] = static_cast<std::uint32_t>(ki);
                const auto below = std::lower_bound(all_sorted.begin(), all_sorted.end(), x + d);
                const auto at_or_under = std::upper_bound(all_sorted.begin(), all_sorted.end(), x - d);
                m_ball[i] = static_cast<std::uint32_t>(below - at_or_under);
            }
            class_size[i] = static_cast<std::uint32_t>(sz);
            included[i] = 1;
        }
    }

    std::size_t n_eff = 0;
    for (std::size_t i = 0; i < n; ++i) n_eff += included[i];
    if (n_eff == 0) throw std::invalid_argument("mi_mixed: all samples in singleton classes");

    const std::vector<double> psi = detail::digamma_table(n);
    double sum_k = 0.0, sum_class = 0.0, sum_m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!included[i]) continue;
        sum_k += psi[k_term[i]];
        sum_class += psi[class_size[i]];
        sum_m += psi[m_ball[i]];
    }
    const double inv = 1.0 / static_cast<double>(n_eff);
    const double nats = psi[n_eff] + inv * sum_k - inv * sum_class - inv * sum_m;
    return nats / std::log(2.0);
}

struct QuadFit {
    double a = 0.0;  // extrapolated value, the 1/T -> 0 intercept
    double b = 0.0;
    double c = 0.0;
};

inline double quad_eval(const QuadFit& fit, double window_length) {
    return fit.a + fit.b / window_length + fit.c / (window_length * window_length);
}

namespace detail {

// Least squares via Householder QR in extended precision; exact solve for
// three points.
inline QuadFit fit_inverse_quadratic(const std::vector<std::pair<int, double>>& points) {
    const std::size_t n = points.size();
    std::vector<long double> a(n * 3);
    std::vector<long double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const long double invt = 1.0L / static_cast<long double>(points[i].first);
        a[i * 3 + 0] = 1.0L;
        a[i * 3 + 1] = invt;
        a[i * 3 + 2] = invt * invt;
        y[i] = static_cast<long double>(points[i].second);
    }
    for (std::size_t col = 0; col < 3; ++col) {
        long double norm = 0.0L;
        for (std::size_t r = col; r < n; ++r) norm += a[r * 3 + col] * a[r * 3 + col];
        norm = std::sqrt(norm);
        if (norm == 0.0L) throw std::invalid_argument("extrapolate_mi: singular design matrix");
        long double alpha = a[col * 3 + col] > 0.0L ? -norm : norm;
        std::vector<long double> v(n - col);
        v[0] = a[col * 3 + col] - alpha;
        for (std::size_t r = col + 1; r < n; ++r) v[r - col] = a[r * 3 + col];
        long double vv = 0.0L;
        for (long double x : v) vv += x * x;
        if (vv > 0.0L) {
            for (std::size_t j = col; j < 3; ++j) {
                long double dot = 0.0L;
                for (std::size_t r = col; r < n; ++r) dot += v[r - col] * a[r * 3 + j];
                const long double f = 2.0L * dot / vv;
                for (std::size_t r = col; r < n; ++r) a[r * 3 + j] -= f * v[r - col];
            }
            long double dot = 0.0L;
            for (std::size_t r = col; r < n; ++r) dot += v[r - col] * y[r];
            const long double f = 2.0L * dot / vv;
            for (std::size_t r = col; r < n; ++r) y[r] -= f * v[r - col];
        } else {
            a[col * 3 + col] = alpha;
        }
    }
    long double beta[3];
    for (int i = 2; i >= 0; --i) {
        long double s = y[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < 3; ++j) s -= a[static_cast<std::size_t>(i) * 3 + j] * beta[j];
        const long double diag = a[static_cast<std::size_t>(i) * 3 + static_cast<std::size_t>(i)];
        if (std::abs(diag) < 1e-30L) {
            throw std::invalid_argument("extrapolate_mi: singular design matrix");
        }
        beta[i] = s / diag;
    }
    return {static_cast<double>(beta[0]), static_cast<double>(beta[1]),
            static_cast<double>(beta[2])};
}

}  // namespace detail

// Fits value(T) = a + b/T + c/T^2 over the given (window length, bits)
// points; a is the bias-corrected estimate at unbounded window length.
inline QuadFit extrapolate_mi(const std::vector<std::pair<int, double>>& points) {
    std::vector<int> lengths;
    for (const auto& [t, bits] : points) {
        if (t < 1) throw std::invalid_argument("extrapolate_mi: window lengths must be positive");
        lengths.push_back(t);
    }
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
    if (lengths.size() < 3) {
        throw std::invalid_argument(
            "extrapolate_mi: insufficient points (need 3 distinct window lengths)");
    }
    return detail::fit_inverse_quadratic(points);
}

// An extrapolated MI value plus the per-window evidence behind it.
struct MiEstimate {
    double bits = 0.0;  // equals fit.a
    std::vector<int> window_lengths;
    std::vector<double> per_window_bits;
    QuadFit fit;
    std::size_t sample_count = 0;  // smallest per-window pair count
    int k = 0;
};

inline MiEstimate mi_windowed(const Dataset& stimuli,
                              const std::vector<std::vector<SpikeTrain>>& trains,
                              const std::vector<int>& window_set,
                              const std::vector<int>& shifts, int k,
                              std::size_t stride = 1,
                              std::size_t sample_cap = kDefaultSampleCap) {
    MiEstimate estimate;
    estimate.k = k;
    estimate.window_lengths = window_set;
    std::vector<std::pair<int, double>> points;
    std::size_t min_pairs = 0;
    for (int window_length : window_set) {
        const PairSet pairs =
            extract_pairs(stimuli, trains, window_length, shifts, stride, sample_cap);
        const double bits = mi_mixed(pairs, k);
        estimate.per_window_bits.push_back(bits);
        points.emplace_back(window_length, bits);
        min_pairs = points.size() == 1 ? pairs.sample_count()
                                       : std::min(min_pairs, pairs.sample_count());
    }
    estimate.fit = extrapolate_mi(points);
    estimate.bits = estimate.fit.a;
    estimate.sample_count = min_pairs;
    return estimate;
}

enum class RedundancyRule {
    kMinMarginal,  // redundant = min(i1, i2)
};

// Two-source decomposition around a chosen redundancy value; the unique and
// synergistic atoms follow from the marginal and joint informations by
// construction.
struct PidAtoms {
    double redundant = 0.0;
    double unique_1 = 0.0;
    double unique_2 = 0.0;
    double synergy = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double joint = 0.0;
};

inline PidAtoms pid_two(double i1, double i2, double joint,
                        RedundancyRule rule = RedundancyRule::kMinMarginal) {
    if (!std::isfinite(i1) || !std::isfinite(i2) || !std::isfinite(joint)) {
        throw std::invalid_argument("pid_two: inputs must be finite");
    }
    PidAtoms atoms;
    atoms.i1 = i1;
    atoms.i2 = i2;
    atoms.joint = joint;
    switch (rule) {
        case RedundancyRule::kMinMarginal:
            atoms.redundant = std::min(i1, i2);
            break;
    }
    atoms.unique_1 = i1 - atoms.redundant;
    atoms.unique_2 = i2 - atoms.redundant;
    atoms.synergy = joint - atoms.unique_1 - atoms.unique_2 - atoms.redundant;
    return atoms;
}

}  // namespace popcode
