#pragma once

#include "fdlbp/image.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace fdlbp {

/// The five bank filters, in canonical order.
enum class FilterId { A = 0, HV = 1, D = 2, SV = 3, SH = 4 };

inline constexpr std::array<FilterId, 5> kAllFilters = {FilterId::A, FilterId::HV, FilterId::D, FilterId::SV,
                                                         FilterId::SH};

/// Short token: "a", "hv", "d", "sv", "sh".
std::string_view to_string(FilterId id) noexcept;
std::optional<FilterId> parse_filter_id(std::string_view token);

/// 3x3 kernel kept as weights over a positive divisor so the average filter
/// stays exact on integer images: coefficient(r, c) = weights[r*3+c] / divisor.
struct FilterKernel {
    FilterId id = FilterId::A;
    std::array<double, 9> weights{};
    double divisor = 1.0;

    double coefficient(int row, int col) const { return weights[static_cast<std::size_t>(row * 3 + col)] / divisor; }
    double coefficient_sum() const;

    friend bool operator==(const FilterKernel&, const FilterKernel&) = default;
};

/// Kernels indexed by FilterId.
class KernelSet {
public:
    /// Average, horizontal-vertical difference, diagonal difference, Sobel vertical, Sobel horizontal.
    static KernelSet standard();

    const FilterKernel& operator[](FilterId id) const { return kernels_[static_cast<std::size_t>(id)]; }
    void set(const FilterKernel& kernel) { kernels_[static_cast<std::size_t>(kernel.id)] = kernel; }

    friend bool operator==(const KernelSet&, const KernelSet&) = default;

private:
    std::array<FilterKernel, 5> kernels_{};
};

/// Kernel override file: for each of the five filters, the id token, an
/// optional "/ divisor" (or "/divisor"), then nine whitespace-separated
/// coefficients in row-major order. '#' starts a comment.
///
///     a / 9
///     1 1 1  1 1 1  1 1 1
///     hv  0 -1 0  -1 4 -1  0 -1 0
///     ...
KernelSet parse_kernel_file(std::istream& in);
KernelSet load_kernel_file(const std::filesystem::path& path);
std::string format_kernel_file(const KernelSet& kernels);

struct FilteredImage {
    FilterId source = FilterId::A;
    Image image;
};

/// True 2-D convolution (kernel flipped) over a replicate-padded copy; the
/// output has the input's dimensions. Requires an image of at least 3x3.
FilteredImage convolve3x3(const Image& image, const FilterKernel& kernel);

/// Applies all five kernels; result is ordered a, hv, d, sv, sh.
std::array<FilteredImage, 5> filter_bank(const Image& image, const KernelSet& kernels = KernelSet::standard());

}  // namespace fdlbp
