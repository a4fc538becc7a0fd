#include "fdlbp/similarity.hpp"

#include <string>

namespace fdlbp {

std::string_view to_string(Measure m) noexcept {
    switch (m) {
        case Measure::Euclidean: return "euclidean";
        case Measure::Cosine: return "cosine";
        case Measure::Emd: return "emd";
        case Measure::L1: return "l1";
        case Measure::D1: return "d1";
        case Measure::ChiSquare: return "chisq";
    }
    return "?";
}

Measure parse_measure(std::string_view token) {
    for (Measure m : kAllMeasures) {
        if (token == to_string(m)) {
            return m;
        }
    }
    throw std::invalid_argument("unknown distance measure '" + std::string(token) +
                                "' (expected euclidean|cosine|emd|l1|d1|chisq)");
}

double distance(const FeatureVector& a, const FeatureVector& b, Measure m, const DistanceOptions& opt) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: descriptors differ in length (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    if (a.fingerprint != b.fingerprint) {
        throw std::invalid_argument("distance: descriptors were computed with different configurations");
    }
    return distance(std::span<const double>(a.values), std::span<const double>(b.values), m, opt);
}

}  // namespace fdlbp
