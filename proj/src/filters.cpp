#include "fdlbp/filters.hpp"

#include "fdlbp/errors.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fdlbp {

std::string_view to_string(FilterId id) noexcept {
    switch (id) {
        case FilterId::A: return "a";
        case FilterId::HV: return "hv";
        case FilterId::D: return "d";
        case FilterId::SV: return "sv";
        case FilterId::SH: return "sh";
    }
    return "?";
}

std::optional<FilterId> parse_filter_id(std::string_view token) {
    std::string lower;
    for (char ch : token) {
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    for (FilterId id : kAllFilters) {
        if (lower == to_string(id)) {
            return id;
        }
    }
    return std::nullopt;
}

double FilterKernel::coefficient_sum() const {
    double sum = 0.0;
    for (double w : weights) {
        sum += w;
    }
    return sum / divisor;
}

KernelSet KernelSet::standard() {
    KernelSet set;
    set.set({FilterId::A, {1, 1, 1, 1, 1, 1, 1, 1, 1}, 9.0});
    set.set({FilterId::HV, {0, -1, 0, -1, 4, -1, 0, -1, 0}, 1.0});
    set.set({FilterId::D, {-1, 0, -1, 0, 4, 0, -1, 0, -1}, 1.0});
    set.set({FilterId::SV, {-1, 0, 1, -2, 0, 2, -1, 0, 1}, 1.0});
    set.set({FilterId::SH, {-1, -2, -1, 0, 0, 0, 1, 2, 1}, 1.0});
    return set;
}

namespace {

std::vector<std::string> tokenize(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream words(line);
        std::string word;
        while (words >> word) {
            // "/9" is shorthand for "/ 9".
            if (word.size() > 1 && word.front() == '/') {
                tokens.emplace_back("/");
                tokens.push_back(word.substr(1));
            } else {
                tokens.push_back(word);
            }
        }
    }
    return tokens;
}

double parse_number(const std::string& token) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size()) {
        throw std::invalid_argument("kernel file: expected a number, got '" + token + "'");
    }
    return value;
}

}  // namespace

KernelSet parse_kernel_file(std::istream& in) {
    const auto tokens = tokenize(in);
    KernelSet set = KernelSet::standard();
    bool seen[5] = {false, false, false, false, false};
    std::size_t pos = 0;
    while (pos < tokens.size()) {
        const auto id = parse_filter_id(tokens[pos]);
        if (!id) {
            throw std::invalid_argument("kernel file: expected a filter id, got '" + tokens[pos] + "'");
        }
        ++pos;
        FilterKernel kernel{*id, {}, 1.0};
        if (pos < tokens.size() && tokens[pos] == "/") {
            if (pos + 1 >= tokens.size()) {
                throw std::invalid_argument("kernel file: missing divisor");
            }
            kernel.divisor = parse_number(tokens[pos + 1]);
            if (!(kernel.divisor > 0.0)) {
                throw std::invalid_argument("kernel file: divisor must be positive");
            }
            pos += 2;
        }
        for (auto& w : kernel.weights) {
            if (pos >= tokens.size()) {
                throw std::invalid_argument("kernel file: kernel '" + std::string(to_string(*id)) +
                                            "' needs nine coefficients");
            }
            w = parse_number(tokens[pos++]);
        }
        auto& flag = seen[static_cast<std::size_t>(*id)];
        if (flag) {
            throw std::invalid_argument("kernel file: duplicate kernel '" + std::string(to_string(*id)) + "'");
        }
        flag = true;
        set.set(kernel);
    }
    for (FilterId id : kAllFilters) {
        if (!seen[static_cast<std::size_t>(id)]) {
            throw std::invalid_argument("kernel file: missing kernel '" + std::string(to_string(id)) + "'");
        }
    }
    return set;
}

KernelSet load_kernel_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open kernel file: " + path.string());
    }
    return parse_kernel_file(in);
}

std::string format_kernel_file(const KernelSet& kernels) {
    std::string text;
    char buf[64];
    for (FilterId id : kAllFilters) {
        const auto& k = kernels[id];
        text += to_string(id);
        if (k.divisor != 1.0) {
            std::snprintf(buf, sizeof buf, " / %.17g", k.divisor);
            text += buf;
        }
        text += '\n';
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                std::snprintf(buf, sizeof buf, "%s%.17g", c ? " " : "", k.weights[static_cast<std::size_t>(r * 3 + c)]);
                text += buf;
            }
            text += '\n';
        }
    }
    return text;
}

namespace {

// out(i, j) = sum_{a,b} w[a][b] * padded(i + 2 - a, j + 2 - b), summed with a
// outer and b inner, then divided by the kernel divisor.
Image convolve_padded(const Image& padded, const FilterKernel& kernel, int width, int height) {
    Image out(width, height);
    const auto& w = kernel.weights;
    for (int i = 0; i < height; ++i) {
        auto r0 = padded.row(i + 2);
        auto r1 = padded.row(i + 1);
        auto r2 = padded.row(i);
        auto dst = out.row(i);
        for (int j = 0; j < width; ++j) {
            double acc = 0.0;
            acc += w[0] * r0[j + 2];
            acc += w[1] * r0[j + 1];
            acc += w[2] * r0[j];
            acc += w[3] * r1[j + 2];
            acc += w[4] * r1[j + 1];
            acc += w[5] * r1[j];
            acc += w[6] * r2[j + 2];
            acc += w[7] * r2[j + 1];
            acc += w[8] * r2[j];
            dst[j] = acc / kernel.divisor;
        }
    }
    return out;
}

void require_min_size(const Image& image) {
    if (image.width() < 3 || image.height() < 3) {
        throw std::invalid_argument("filtering requires an image of at least 3x3");
    }
}

}  // namespace

FilteredImage convolve3x3(const Image& image, const FilterKernel& kernel) {
    require_min_size(image);
    const Image padded = pad_replicate(image, 1);
    return {kernel.id, convolve_padded(padded, kernel, image.width(), image.height())};
}

std::array<FilteredImage, 5> filter_bank(const Image& image, const KernelSet& kernels) {
    require_min_size(image);
    const Image padded = pad_replicate(image, 1);
    std::array<FilteredImage, 5> out;
    for (FilterId id : kAllFilters) {
        out[static_cast<std::size_t>(id)] = {id, convolve_padded(padded, kernels[id], image.width(), image.height())};
    }
    return out;
}

}  // namespace fdlbp
