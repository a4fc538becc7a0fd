#include "fdlbp/decoder.hpp"

#include "fdlbp/errors.hpp"

#include <cctype>
#include <stdexcept>

namespace fdlbp {

DecoderSpec::DecoderSpec(std::vector<Group> groups) : groups_(std::move(groups)) {
    if (groups_.empty()) {
        throw std::invalid_argument("decoder spec needs at least one decoder");
    }
    const std::size_t gamma = groups_.front().size();
    if (gamma < 1 || gamma > kMaxDecoderInputs) {
        throw std::invalid_argument("decoder inputs must be in [1, " + std::to_string(kMaxDecoderInputs) + "]");
    }
    for (const auto& g : groups_) {
        if (g.size() != gamma) {
            throw std::invalid_argument("all decoders in a spec must have the same number of inputs");
        }
    }
}

DecoderSpec DecoderSpec::standard() {
    return DecoderSpec({{FilterId::A, FilterId::HV, FilterId::D}, {FilterId::A, FilterId::SV, FilterId::SH}});
}

namespace {

// Reduces "F_{hv}" / "F_hv" / "hv" to "hv".
std::string normalise_id(std::string token) {
    std::string out;
    for (char ch : token) {
        if (ch != '{' && ch != '}') {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (out.size() > 2 && out[0] == 'f' && out[1] == '_') {
        out.erase(0, 2);
    }
    return out;
}

}  // namespace

DecoderSpec DecoderSpec::parse(std::string_view text) {
    std::string s;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '$') {
            s.push_back(ch);
        }
    }
    if (!s.empty() && s.front() == '<') {
        if (s.back() != '>') {
            throw std::invalid_argument("decoder spec: unbalanced '<'");
        }
        s = s.substr(1, s.size() - 2);
    }
    std::vector<Group> groups;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (s[pos] == ',' && !groups.empty()) {
            ++pos;
            continue;
        }
        if (s[pos] != '(') {
            throw std::invalid_argument("decoder spec: expected '(' at position " + std::to_string(pos) + " in '" +
                                        std::string(text) + "'");
        }
        const auto close = s.find(')', pos);
        if (close == std::string::npos) {
            throw std::invalid_argument("decoder spec: missing ')' in '" + std::string(text) + "'");
        }
        Group group;
        std::string body = s.substr(pos + 1, close - pos - 1);
        std::size_t start = 0;
        for (;;) {
            const auto comma = body.find(',', start);
            const std::string token = normalise_id(body.substr(start, comma - start));
            const auto id = parse_filter_id(token);
            if (!id) {
                throw std::invalid_argument("decoder spec: unknown filter id '" + token + "'");
            }
            group.push_back(*id);
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        groups.push_back(std::move(group));
        pos = close + 1;
    }
    return DecoderSpec(std::move(groups));
}

std::string DecoderSpec::to_string() const {
    std::string out;
    for (const auto& g : groups_) {
        out += '(';
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += fdlbp::to_string(g[i]);
        }
        out += ')';
    }
    return out;
}

int omega(std::span<const int> bits) {
    int value = 0;
    for (int b : bits) {
        if (b != 0 && b != 1) {
            throw ContractViolation("omega: decoder input bit must be 0 or 1, got " + std::to_string(b));
        }
        value = (value << 1) | b;
    }
    return value + 1;
}

std::vector<CodeMap> decode(std::span<const BitPlanes* const> inputs) {
    if (inputs.empty() || inputs.size() > kMaxDecoderInputs) {
        throw std::invalid_argument("decode: expected 1.." + std::to_string(kMaxDecoderInputs) + " inputs");
    }
    const BitPlanes& first = *inputs.front();
    for (const BitPlanes* in : inputs) {
        if (in->width() != first.width() || in->height() != first.height()) {
            throw std::invalid_argument("decode: inputs have mismatched dimensions");
        }
        if (!(in->config() == first.config())) {
            throw std::invalid_argument("decode: inputs have mismatched LBP configurations");
        }
    }
    const std::size_t gamma = inputs.size();
    const std::size_t channels = std::size_t{1} << gamma;
    const std::uint32_t mask = first.config().code_mask();
    const int radius = first.config().radius;
    const int w = first.width();
    const int h = first.height();

    std::vector<CodeMap> out(channels);
    for (auto& m : out) {
        m = CodeMap{w, h, radius, std::vector<std::uint32_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0U)};
    }

    // Channel z (0-based) collects the bits t where input m's bit equals bit
    // (gamma-1-m) of z, for every m: an AND of each input code or its complement.
    std::uint32_t codes[kMaxDecoderInputs];
    for (int i = radius; i < h - radius; ++i) {
        for (int j = radius; j < w - radius; ++j) {
            for (std::size_t m = 0; m < gamma; ++m) {
                codes[m] = inputs[m]->code(i, j);
            }
            const std::size_t idx = static_cast<std::size_t>(i) * static_cast<std::size_t>(w) + static_cast<std::size_t>(j);
            for (std::size_t z = 0; z < channels; ++z) {
                std::uint32_t selected = mask;
                for (std::size_t m = 0; m < gamma; ++m) {
                    const bool want_one = (z >> (gamma - 1 - m)) & 1U;
                    selected &= want_one ? codes[m] : ~codes[m];
                }
                out[z].codes[idx] = selected;
            }
        }
    }
    return out;
}

}  // namespace fdlbp
