#pragma once

#include "fdlbp/filters.hpp"
#include "fdlbp/lbp.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fdlbp {

inline constexpr int kMaxDecoderInputs = 8;

/// A list of decoders, each an ordered tuple of filter ids. Every decoder
/// has the same number of inputs (gamma).
class DecoderSpec {
public:
    using Group = std::vector<FilterId>;

    DecoderSpec() = default;
    explicit DecoderSpec(std::vector<Group> groups);

    /// (a,hv,d)(a,sv,sh)
    static DecoderSpec standard();

    /// Accepts the compact form "(a,hv,d)(a,sv,sh)" as well as the table
    /// notation "<(F_a,F_{hv},F_{d}),(F_a,F_{sv},F_{sh})>". Whitespace, '$',
    /// commas between groups and a surrounding <...> are ignored.
    static DecoderSpec parse(std::string_view text);

    const std::vector<Group>& groups() const noexcept { return groups_; }
    std::size_t decoders() const noexcept { return groups_.size(); }
    std::size_t inputs_per_decoder() const noexcept { return groups_.empty() ? 0 : groups_.front().size(); }
    std::size_t channels_per_decoder() const noexcept { return std::size_t{1} << inputs_per_decoder(); }

    /// Canonical compact form.
    std::string to_string() const;

    friend bool operator==(const DecoderSpec&, const DecoderSpec&) = default;

private:
    std::vector<Group> groups_;
};

/// Channel index in [1, 2^gamma] for one bit per input, first input most
/// significant. Throws ContractViolation on a value other than 0 or 1.
int omega(std::span<const int> bits);

/// Splits gamma aligned bit-plane sets into 2^gamma channel code maps.
/// For every interior pixel and bit t, the bit lands in exactly one channel:
/// the one selected by omega over the inputs' t-th bits. Element k of the
/// result is channel k+1. Throws std::invalid_argument when the inputs
/// disagree on size or LBP configuration.
std::vector<CodeMap> decode(std::span<const BitPlanes* const> inputs);

}  // namespace fdlbp
