#include "fdlbp/lbp.hpp"

#include "fdlbp/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdlbp {

std::string_view to_string(Sampling sampling) noexcept {
    return sampling == Sampling::Grid ? "grid" : "bilinear";
}

Sampling parse_sampling(std::string_view token) {
    if (token == "grid") {
        return Sampling::Grid;
    }
    if (token == "bilinear") {
        return Sampling::Bilinear;
    }
    throw std::invalid_argument("unknown sampling mode '" + std::string(token) + "' (expected grid|bilinear)");
}

void LbpConfig::validate() const {
    if (neighbors < 1 || neighbors > kMaxNeighbors) {
        throw std::invalid_argument("LBP neighbours must be in [1, " + std::to_string(kMaxNeighbors) + "], got " +
                                    std::to_string(neighbors));
    }
    if (radius < 1) {
        throw std::invalid_argument("LBP radius must be >= 1, got " + std::to_string(radius));
    }
}

namespace {

struct SinCos {
    double sin;
    double cos;
};

SinCos sincos_degrees(double degrees) {
    const double quarter = degrees / 90.0;
    if (quarter == std::floor(quarter)) {
        switch (static_cast<long>(quarter) % 4) {
            case 0: return {0.0, 1.0};
            case 1: return {1.0, 0.0};
            case 2: return {0.0, -1.0};
            default: return {-1.0, 0.0};
        }
    }
    const double rad = degrees * std::numbers::pi / 180.0;
    return {std::sin(rad), std::cos(rad)};
}

// R*sin(theta_t), R*cos(theta_t) for t = 1..N.
std::vector<SinCos> ring_offsets(const LbpConfig& config) {
    std::vector<SinCos> ring(static_cast<std::size_t>(config.neighbors));
    const double step = config.angular_step();
    for (int t = 1; t <= config.neighbors; ++t) {
        const auto sc = sincos_degrees((t - 1) * step);
        ring[static_cast<std::size_t>(t - 1)] = {config.radius * sc.sin, config.radius * sc.cos};
    }
    return ring;
}

constexpr double kSnapTolerance = 1e-9;

double snap(double v) {
    const double nearest = std::round(v);
    return std::abs(v - nearest) <= kSnapTolerance ? nearest : v;
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

std::vector<Point> neighbor_coords(double row, double col, const LbpConfig& config) {
    config.validate();
    std::vector<Point> points;
    points.reserve(static_cast<std::size_t>(config.neighbors));
    for (const auto& off : ring_offsets(config)) {
        points.push_back({row - off.sin, col - off.cos});
    }
    return points;
}

double sample(const Image& image, Point p) {
    const double r = snap(p.row);
    const double c = snap(p.col);
    if (!(r >= 0.0 && c >= 0.0 && r <= image.height() - 1 && c <= image.width() - 1)) {
        throw ContractViolation("sample position (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                                ") lies outside the image");
    }
    const int r0 = static_cast<int>(std::floor(r));
    const int c0 = static_cast<int>(std::floor(c));
    const double fr = r - r0;
    const double fc = c - c0;
    if (fr == 0.0 && fc == 0.0) {
        return image.at(r0, c0);
    }
    const int r1 = fr == 0.0 ? r0 : r0 + 1;
    const int c1 = fc == 0.0 ? c0 : c0 + 1;
    const double upper = lerp(image.at(r0, c0), image.at(r0, c1), fc);
    const double lower = lerp(image.at(r1, c0), image.at(r1, c1), fc);
    return lerp(upper, lower, fr);
}

BitPlanes::BitPlanes(LbpConfig config, int width, int height)
    : config_(config), width_(width), height_(height),
      codes_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0U) {}

std::vector<std::uint8_t> BitPlanes::plane(int t) const {
    if (t < 1 || t > config_.neighbors) {
        throw std::out_of_range("bit plane index out of range");
    }
    std::vector<std::uint8_t> out(codes_.size());
    for (std::size_t i = 0; i < codes_.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((codes_[i] >> (t - 1)) & 1U);
    }
    return out;
}

BitPlanes lbp_bitplanes(const Image& image, const LbpConfig& config) {
    config.validate();
    const int r = config.radius;
    if (image.width() <= 2 * r || image.height() <= 2 * r) {
        throw std::invalid_argument("image " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                                    " has no interior pixels at radius " + std::to_string(r));
    }
    BitPlanes planes(config, image.width(), image.height());
    const auto ring = ring_offsets(config);
    const int n = config.neighbors;

    if (config.sampling == Sampling::Grid) {
        std::vector<std::ptrdiff_t> offsets(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) {
            const auto& off = ring[static_cast<std::size_t>(t)];
            const auto dr = static_cast<std::ptrdiff_t>(std::round(-off.sin));
            const auto dc = static_cast<std::ptrdiff_t>(std::round(-off.cos));
            offsets[static_cast<std::size_t>(t)] = dr * image.width() + dc;
        }
        const double* base = image.data().data();
        for (int i = r; i < image.height() - r; ++i) {
            for (int j = r; j < image.width() - r; ++j) {
                const std::ptrdiff_t centre = static_cast<std::ptrdiff_t>(i) * image.width() + j;
                const double value = base[centre];
                std::uint32_t code = 0;
                for (int t = 0; t < n; ++t) {
                    code |= static_cast<std::uint32_t>(base[centre + offsets[static_cast<std::size_t>(t)]] >= value) << t;
                }
                planes.code(i, j) = code;
            }
        }
        return planes;
    }

    for (int i = r; i < image.height() - r; ++i) {
        for (int j = r; j < image.width() - r; ++j) {
            const double value = image.at(i, j);
            std::uint32_t code = 0;
            for (int t = 0; t < n; ++t) {
                const auto& off = ring[static_cast<std::size_t>(t)];
                const double neighbour = sample(image, {i - off.sin, j - off.cos});
                code |= static_cast<std::uint32_t>(neighbour >= value) << t;
            }
            planes.code(i, j) = code;
        }
    }
    return planes;
}

CodeMap lbp_code_map(const BitPlanes& planes) {
    CodeMap map{planes.width(), planes.height(), planes.config().radius, {}};
    auto packed = planes.packed();
    map.codes.assign(packed.begin(), packed.end());
    return map;
}

}  // namespace fdlbp
