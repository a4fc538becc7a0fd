#pragma once

#include "fdlbp/descriptor.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fdlbp {

enum class Measure { Euclidean, Cosine, Emd, L1, D1, ChiSquare };

inline constexpr Measure kAllMeasures[] = {Measure::Euclidean, Measure::Cosine, Measure::Emd,
                                           Measure::L1,        Measure::D1,     Measure::ChiSquare};

/// CLI token: euclidean|cosine|emd|l1|d1|chisq.
std::string_view to_string(Measure m) noexcept;
Measure parse_measure(std::string_view token);

struct DistanceOptions {
    /// When non-zero, the EMD cumulative sums restart every `emd_block` bins
    /// (one histogram block). Zero runs one CDF over the whole vector.
    std::size_t emd_block = 0;
};

namespace detail {

template <typename T>
double distance_impl(std::span<const T> a, std::span<const T> b, Measure m, const DistanceOptions& opt) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: vectors differ in length");
    }
    const std::size_t n = a.size();
    double acc = 0.0;
    switch (m) {
        case Measure::Euclidean:
            for (std::size_t i = 0; i < n; ++i) {
                const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
                acc += d * d;
            }
            return std::sqrt(acc);
        case Measure::Cosine: {
            double dot = 0.0;
            double na = 0.0;
            double nb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = a[i];
                const double y = b[i];
                dot += x * y;
                na += x * x;
                nb += y * y;
            }
            if (na == 0.0 || nb == 0.0) {
                return na == nb ? 0.0 : 1.0;
            }
            const double d = 1.0 - dot / std::sqrt(na * nb);
            return d < 0.0 ? 0.0 : d;
        }
        case Measure::Emd: {
            double ca = 0.0;
            double cb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (opt.emd_block != 0 && i % opt.emd_block == 0) {
                    ca = 0.0;
                    cb = 0.0;
                }
                ca += a[i];
                cb += b[i];
                acc += std::abs(ca - cb);
            }
            return acc;
        }
        case Measure::L1:
            for (std::size_t i = 0; i < n; ++i) {
                acc += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
            }
            return acc;
        case Measure::D1:
            for (std::size_t i = 0; i < n; ++i) {
                const double x = a[i];
                const double y = b[i];
                acc += std::abs(x - y) / (1.0 + (x + y));
            }
            return acc;
        case Measure::ChiSquare:
            for (std::size_t i = 0; i < n; ++i) {
                const double x = a[i];
                const double y = b[i];
                const double s = x + y;
                if (s != 0.0) {
                    const double d = x - y;
                    acc += d * d / s;
                }
            }
            return acc;
    }
    return acc;
}

}  // namespace detail

/// Raw distance between two equally long non-negative vectors.
inline double distance(std::span<const double> a, std::span<const double> b, Measure m,
                       const DistanceOptions& opt = {}) {
    return detail::distance_impl(a, b, m, opt);
}

inline double distance(std::span<const float> a, std::span<const float> b, Measure m,
                       const DistanceOptions& opt = {}) {
    return detail::distance_impl(a, b, m, opt);
}

/// Checked variant: lengths and descriptor fingerprints must agree.
double distance(const FeatureVector& a, const FeatureVector& b, Measure m, const DistanceOptions& opt = {});

}  // namespace fdlbp
