#include "fdlbp/descriptor.hpp"

#include "fdlbp/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <optional>
#include <stdexcept>

namespace fdlbp {

std::string_view to_string(Variant v) noexcept {
    switch (v) {
        case Variant::Lbp: return "lbp";
        case Variant::SobelLbp: return "sobel_lbp";
        case Variant::BofLbp: return "bof_lbp";
        case Variant::Fdlbp: return "fdlbp";
        case Variant::MdLbp: return "mdlbp";
        case Variant::CFdlbp: return "cfdlbp";
        case Variant::FmdLbp: return "fmdlbp";
    }
    return "?";
}

Variant parse_variant(std::string_view token) {
    std::string lower;
    for (char ch : token) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    for (Variant v : {Variant::Lbp, Variant::SobelLbp, Variant::BofLbp, Variant::Fdlbp, Variant::MdLbp,
                      Variant::CFdlbp, Variant::FmdLbp}) {
        if (lower == to_string(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown descriptor variant '" + std::string(token) + "'");
}

bool is_color_variant(Variant v) noexcept {
    return v == Variant::MdLbp || v == Variant::CFdlbp || v == Variant::FmdLbp;
}

namespace {

constexpr std::array<FilterId, 2> kSobelFilters = {FilterId::SV, FilterId::SH};

std::vector<FilterId> filters_used(const DescriptorConfig& config) {
    switch (config.variant) {
        case Variant::Lbp:
        case Variant::MdLbp:
            return {};
        case Variant::SobelLbp:
            return {kSobelFilters.begin(), kSobelFilters.end()};
        case Variant::BofLbp:
        case Variant::FmdLbp:
            return {kAllFilters.begin(), kAllFilters.end()};
        case Variant::Fdlbp:
        case Variant::CFdlbp: {
            std::vector<FilterId> used;
            for (FilterId id : kAllFilters) {
                for (const auto& g : config.spec.groups()) {
                    if (std::find(g.begin(), g.end(), id) != g.end()) {
                        used.push_back(id);
                        break;
                    }
                }
            }
            return used;
        }
    }
    return {};
}

bool uses_spec(Variant v) { return v == Variant::Fdlbp || v == Variant::CFdlbp; }

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace

std::size_t DescriptorConfig::blocks() const {
    switch (variant) {
        case Variant::Lbp: return 1;
        case Variant::SobelLbp: return 2;
        case Variant::BofLbp: return 5;
        case Variant::Fdlbp: return spec.decoders() * spec.channels_per_decoder();
        case Variant::MdLbp: return 8;
        case Variant::CFdlbp: return 3 * spec.decoders() * spec.channels_per_decoder();
        case Variant::FmdLbp: return 5 * 8;
    }
    return 0;
}

std::string DescriptorConfig::canonical() const {
    std::string text = "fdlbp-descriptor/1;variant=";
    text += to_string(variant);
    text += ";neighbors=" + std::to_string(lbp.neighbors);
    text += ";radius=" + std::to_string(lbp.radius);
    text += ";sampling=";
    text += to_string(lbp.sampling);
    if (uses_spec(variant)) {
        text += ";spec=" + spec.to_string();
    }
    char buf[40];
    for (FilterId id : filters_used(*this)) {
        const auto& k = kernels[id];
        text += ";kernel.";
        text += to_string(id);
        text += '=';
        for (double w : k.weights) {
            std::snprintf(buf, sizeof buf, "%.17g,", w);
            text += buf;
        }
        std::snprintf(buf, sizeof buf, "/%.17g", k.divisor);
        text += buf;
    }
    return text;
}

std::uint64_t DescriptorConfig::fingerprint() const { return fnv1a64(canonical()); }

namespace {

void accumulate(const CodeMap& codes, std::span<std::uint64_t> bins) {
    const int r = codes.radius;
    for (int i = r; i < codes.height - r; ++i) {
        const std::uint32_t* row = codes.codes.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(codes.width);
        for (int j = r; j < codes.width - r; ++j) {
            const std::uint32_t code = row[j];
            if (code >= bins.size()) {
                throw ContractViolation("histogram: code " + std::to_string(code) + " exceeds bin count " +
                                        std::to_string(bins.size()));
            }
            ++bins[code];
        }
    }
}

// Appends histograms block by block into `out`.
class BlockWriter {
public:
    BlockWriter(std::vector<std::uint64_t>& out, std::size_t bins) : out_(out), bins_(bins) {}

    void add(const CodeMap& codes) {
        const std::size_t offset = out_.size();
        out_.resize(offset + bins_, 0);
        accumulate(codes, std::span<std::uint64_t>(out_).subspan(offset, bins_));
    }

    void add_all(const std::vector<CodeMap>& maps) {
        for (const auto& m : maps) {
            add(m);
        }
    }

private:
    std::vector<std::uint64_t>& out_;
    std::size_t bins_;
};

void require_interior(const Image& image, const LbpConfig& lbp) {
    if (image.width() < 3 || image.height() < 3) {
        throw std::invalid_argument("descriptor requires an image of at least 3x3");
    }
    if (image.width() <= 2 * lbp.radius || image.height() <= 2 * lbp.radius) {
        throw std::invalid_argument("image too small for LBP radius " + std::to_string(lbp.radius));
    }
}

// LBP bit planes of the filtered images named by `used` (others left empty).
std::array<std::optional<BitPlanes>, 5> filtered_bitplanes(const Image& image, const DescriptorConfig& config,
                                                           const std::vector<FilterId>& used) {
    const auto bank = filter_bank(image, config.kernels);
    std::array<std::optional<BitPlanes>, 5> planes;
    for (FilterId id : used) {
        const auto k = static_cast<std::size_t>(id);
        planes[k] = lbp_bitplanes(bank[k].image, config.lbp);
    }
    return planes;
}

void append_fdlbp(const Image& image, const DescriptorConfig& config, BlockWriter& writer) {
    const auto planes = filtered_bitplanes(image, config, filters_used(config));
    std::vector<const BitPlanes*> inputs;
    for (const auto& group : config.spec.groups()) {
        inputs.clear();
        for (FilterId id : group) {
            inputs.push_back(&*planes[static_cast<std::size_t>(id)]);
        }
        writer.add_all(decode(inputs));
    }
}

void append_color_decoder(const Image& red, const Image& green, const Image& blue, const LbpConfig& lbp,
                          BlockWriter& writer) {
    const BitPlanes r = lbp_bitplanes(red, lbp);
    const BitPlanes g = lbp_bitplanes(green, lbp);
    const BitPlanes b = lbp_bitplanes(blue, lbp);
    const BitPlanes* inputs[3] = {&r, &g, &b};
    writer.add_all(decode(inputs));
}

}  // namespace

std::vector<std::uint64_t> histogram(const CodeMap& codes, std::size_t bins) {
    std::vector<std::uint64_t> counts(bins, 0);
    accumulate(codes, counts);
    return counts;
}

FeatureVector normalize(FeatureVector v) {
    double total = 0.0;
    for (double x : v.values) {
        total += x;
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("cannot normalize a vector whose sum is not positive");
    }
    for (double& x : v.values) {
        x /= total;
    }
    return v;
}

std::vector<std::uint64_t> descriptor_counts(const Image& image, const DescriptorConfig& config) {
    config.lbp.validate();
    if (is_color_variant(config.variant)) {
        throw std::invalid_argument("variant " + std::string(to_string(config.variant)) + " requires a colour image");
    }
    require_interior(image, config.lbp);
    std::vector<std::uint64_t> counts;
    counts.reserve(config.dimension());
    BlockWriter writer(counts, config.lbp.bins());

    switch (config.variant) {
        case Variant::Lbp:
            writer.add(lbp_code_map(lbp_bitplanes(image, config.lbp)));
            break;
        case Variant::SobelLbp:
        case Variant::BofLbp: {
            const auto used = filters_used(config);
            const auto planes = filtered_bitplanes(image, config, used);
            for (FilterId id : used) {
                writer.add(lbp_code_map(*planes[static_cast<std::size_t>(id)]));
            }
            break;
        }
        case Variant::Fdlbp:
            append_fdlbp(image, config, writer);
            break;
        default:
            break;
    }
    return counts;
}

std::vector<std::uint64_t> descriptor_counts(const ColorImage& image, const DescriptorConfig& config) {
    if (!is_color_variant(config.variant)) {
        return descriptor_counts(to_grayscale(image), config);
    }
    config.lbp.validate();
    require_interior(image.red(), config.lbp);
    std::vector<std::uint64_t> counts;
    counts.reserve(config.dimension());
    BlockWriter writer(counts, config.lbp.bins());

    switch (config.variant) {
        case Variant::MdLbp:
            append_color_decoder(image.red(), image.green(), image.blue(), config.lbp, writer);
            break;
        case Variant::CFdlbp:
            for (int c = 0; c < 3; ++c) {
                append_fdlbp(image.plane(c), config, writer);
            }
            break;
        case Variant::FmdLbp: {
            const auto red = filter_bank(image.red(), config.kernels);
            const auto green = filter_bank(image.green(), config.kernels);
            const auto blue = filter_bank(image.blue(), config.kernels);
            for (FilterId id : kAllFilters) {
                const auto k = static_cast<std::size_t>(id);
                append_color_decoder(red[k].image, green[k].image, blue[k].image, config.lbp, writer);
            }
            break;
        }
        default:
            break;
    }
    return counts;
}

namespace {

FeatureVector from_counts(const std::vector<std::uint64_t>& counts, const DescriptorConfig& config) {
    std::uint64_t total = 0;
    for (auto c : counts) {
        total += c;
    }
    if (total == 0) {
        throw std::invalid_argument("descriptor histogram is empty");
    }
    FeatureVector v{std::vector<double>(counts.size()), config.variant, config.fingerprint()};
    const double denom = static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        v.values[i] = static_cast<double>(counts[i]) / denom;
    }
    return v;
}

}  // namespace

FeatureVector variant_descriptor(const Image& image, const DescriptorConfig& config) {
    return from_counts(descriptor_counts(image, config), config);
}

FeatureVector variant_descriptor(const ColorImage& image, const DescriptorConfig& config) {
    return from_counts(descriptor_counts(image, config), config);
}

FeatureVector variant_descriptor(const AnyImage& image, const DescriptorConfig& config) {
    return std::visit([&](const auto& img) { return variant_descriptor(img, config); }, image);
}

FeatureVector fdlbp(const Image& image, const LbpConfig& lbp, const DecoderSpec& spec, const KernelSet& kernels) {
    return variant_descriptor(image, DescriptorConfig{Variant::Fdlbp, lbp, spec, kernels});
}

}  // namespace fdlbp
