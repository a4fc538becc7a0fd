#pragma once

#include "fdlbp/image.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fdlbp {

/// How neighbours that fall between pixels are read.
enum class Sampling {
    /// Offsets rounded to the nearest pixel; at N=8, R=1 this is the 3x3 ring.
    Grid,
    /// Bilinear interpolation of the four surrounding pixels.
    Bilinear,
};

std::string_view to_string(Sampling sampling) noexcept;
Sampling parse_sampling(std::string_view token);

inline constexpr int kMaxNeighbors = 16;

struct LbpConfig {
    int neighbors = 8;
    int radius = 1;
    Sampling sampling = Sampling::Grid;

    /// Degrees between adjacent neighbours.
    double angular_step() const { return 360.0 / neighbors; }
    /// Histogram bins per code map: 2^N.
    std::size_t bins() const { return std::size_t{1} << neighbors; }
    std::uint32_t code_mask() const { return static_cast<std::uint32_t>(bins() - 1); }

    /// Throws std::invalid_argument unless 1 <= N <= 16 and R >= 1.
    void validate() const;

    friend bool operator==(const LbpConfig&, const LbpConfig&) = default;
};

struct Point {
    double row;
    double col;
};

/// Ring positions for centre (row, col): neighbour t (1-based) sits at
/// (row - R sin(theta_t), col - R cos(theta_t)) with theta_t = (t-1) * 360/N
/// degrees. Multiples of 90 degrees are evaluated exactly.
std::vector<Point> neighbor_coords(double row, double col, const LbpConfig& config);

/// Bilinear read of `image` at a real position. Coordinates within 1e-9 of
/// an integer snap to it, so grid positions return the stored value exactly.
/// Throws ContractViolation when the position lies outside the image.
double sample(const Image& image, Point p);

/// Per-pixel N-bit LBP codes of one image, packed so bit (t-1) is the t-th
/// bit plane. Only interior pixels (R <= row < height-R, same for columns)
/// carry codes; border entries are zero.
class BitPlanes {
public:
    BitPlanes() = default;
    BitPlanes(LbpConfig config, int width, int height);

    const LbpConfig& config() const noexcept { return config_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int planes() const noexcept { return config_.neighbors; }

    bool is_interior(int row, int col) const noexcept {
        const int r = config_.radius;
        return row >= r && row < height_ - r && col >= r && col < width_ - r;
    }

    /// Bit for neighbour t in [1, N].
    int bit(int t, int row, int col) const {
        return static_cast<int>((code(row, col) >> (t - 1)) & 1U);
    }

    std::uint32_t code(int row, int col) const { return codes_[index(row, col)]; }
    std::uint32_t& code(int row, int col) { return codes_[index(row, col)]; }

    /// One bit plane as a 0/1 grid (border zero).
    std::vector<std::uint8_t> plane(int t) const;

    std::span<const std::uint32_t> packed() const noexcept { return codes_; }

    friend bool operator==(const BitPlanes&, const BitPlanes&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    LbpConfig config_;
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint32_t> codes_;
};

/// Integer code grid: one decoder output channel, or a classical LBP code map.
/// Only interior pixels are meaningful.
struct CodeMap {
    int width = 0;
    int height = 0;
    int radius = 1;
    std::vector<std::uint32_t> codes;

    std::uint32_t at(int row, int col) const {
        return codes[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
    }

    friend bool operator==(const CodeMap&, const CodeMap&) = default;
};

/// bit = 1 iff neighbour >= centre. Throws std::invalid_argument when either
/// dimension is not larger than 2R.
BitPlanes lbp_bitplanes(const Image& image, const LbpConfig& config);

/// Classical LBP code: sum over t of bit_t * 2^(t-1).
CodeMap lbp_code_map(const BitPlanes& planes);

}  // namespace fdlbp
