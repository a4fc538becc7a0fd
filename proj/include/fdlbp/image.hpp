#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace fdlbp {

/// Single-channel image of real intensities, stored row-major.
/// Rows run top to bottom, columns left to right; values are never clamped.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);
    Image(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return data_.empty(); }

    double& at(int row, int col) { return data_[index(row, col)]; }
    double at(int row, int col) const { return data_[index(row, col)]; }

    std::span<double> row(int r) {
        return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Three equally sized planes in R, G, B order.
class ColorImage {
public:
    ColorImage() = default;
    ColorImage(Image red, Image green, Image blue);

    int width() const noexcept { return planes_[0].width(); }
    int height() const noexcept { return planes_[0].height(); }

    const Image& red() const noexcept { return planes_[0]; }
    const Image& green() const noexcept { return planes_[1]; }
    const Image& blue() const noexcept { return planes_[2]; }
    const Image& plane(int c) const { return planes_.at(static_cast<std::size_t>(c)); }

    friend bool operator==(const ColorImage&, const ColorImage&) = default;

private:
    std::vector<Image> planes_{3};
};

using AnyImage = std::variant<Image, ColorImage>;

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
Image to_grayscale(const ColorImage& image);

/// Bilinear resampling with pixel centres aligned (align-corners = false).
/// Throws std::invalid_argument for a zero target dimension.
Image resize(const Image& image, int target_width, int target_height);
ColorImage resize(const ColorImage& image, int target_width, int target_height);

/// Grows the image by `margin` on every side, replicating the nearest edge pixel.
Image pad_replicate(const Image& image, int margin);

// PNM I/O. Binary 8-bit P5 (gray) and P6 (colour); samples map to 0..255 unscaled.
Image read_pgm(std::istream& in);
ColorImage read_ppm(std::istream& in);
AnyImage read_pnm(std::istream& in);
AnyImage load_image(const std::filesystem::path& path);

void write_pgm(std::ostream& out, const Image& image);
void write_ppm(std::ostream& out, const ColorImage& image);
void save_pgm(const std::filesystem::path& path, const Image& image);
void save_ppm(const std::filesystem::path& path, const ColorImage& image);

}  // namespace fdlbp
