#pragma once

#include "fdlbp/decoder.hpp"
#include "fdlbp/filters.hpp"
#include "fdlbp/image.hpp"
#include "fdlbp/lbp.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fdlbp {

enum class Variant { Lbp, SobelLbp, BofLbp, Fdlbp, MdLbp, CFdlbp, FmdLbp };

std::string_view to_string(Variant v) noexcept;
/// Case-insensitive; accepts "lbp", "sobel_lbp", "bof_lbp", "fdlbp", "mdlbp", "cfdlbp", "fmdlbp".
Variant parse_variant(std::string_view token);
/// mdLBP, cFDLBP and FmdLBP read the three colour planes.
bool is_color_variant(Variant v) noexcept;

/// Everything that determines a descriptor's values.
struct DescriptorConfig {
    Variant variant = Variant::Fdlbp;
    LbpConfig lbp;
    DecoderSpec spec = DecoderSpec::standard();
    KernelSet kernels = KernelSet::standard();

    /// Number of histogram blocks of 2^N bins each.
    std::size_t blocks() const;
    std::size_t dimension() const { return blocks() * lbp.bins(); }

    /// Canonical text listing only the fields that affect this variant's output.
    std::string canonical() const;
    /// FNV-1a 64 of canonical(); stable across platforms.
    std::uint64_t fingerprint() const;
};

struct FeatureVector {
    std::vector<double> values;
    Variant variant = Variant::Fdlbp;
    std::uint64_t fingerprint = 0;

    std::size_t size() const noexcept { return values.size(); }
};

/// Interior-pixel occurrence counts of each code, bin b for code b.
/// Throws ContractViolation on a code >= bins.
std::vector<std::uint64_t> histogram(const CodeMap& codes, std::size_t bins);

/// Divides by the total. Throws std::invalid_argument when the sum is not positive.
FeatureVector normalize(FeatureVector v);

/// Concatenated unnormalized histogram blocks for the configured variant.
/// Colour variants need a ColorImage; the others convert colour to gray.
std::vector<std::uint64_t> descriptor_counts(const Image& image, const DescriptorConfig& config);
std::vector<std::uint64_t> descriptor_counts(const ColorImage& image, const DescriptorConfig& config);

/// Normalized descriptor (sums to 1).
FeatureVector variant_descriptor(const Image& image, const DescriptorConfig& config);
FeatureVector variant_descriptor(const ColorImage& image, const DescriptorConfig& config);
FeatureVector variant_descriptor(const AnyImage& image, const DescriptorConfig& config);

/// Grayscale FDLBP: filter bank, LBP bits per filtered image, one decoder per
/// spec group, one histogram per channel, concatenated and normalized.
FeatureVector fdlbp(const Image& image, const LbpConfig& lbp = {}, const DecoderSpec& spec = DecoderSpec::standard(),
                    const KernelSet& kernels = KernelSet::standard());

}  // namespace fdlbp
