// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// gating criterion fails.

#include "fdlbp/decoder.hpp"
#include "fdlbp/descriptor.hpp"
#include "fdlbp/errors.hpp"
#include "fdlbp/evaluation.hpp"
#include "fdlbp/filters.hpp"
#include "fdlbp/lbp.hpp"
#include "fdlbp/parallel.hpp"
#include "fdlbp/retrieval.hpp"
#include "fdlbp/similarity.hpp"

#include "naive.hpp"
#include "random_images.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace fdlbp;
using fdlbp::testing::random_color_image;
using fdlbp::testing::random_image;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

DescriptorConfig config_for(Variant v) {
    DescriptorConfig c;
    c.variant = v;
    return c;
}

// 1. Dimensions.
Outcome dimensions() {
    const std::map<Variant, std::size_t> table = {
        {Variant::Lbp, 256},     {Variant::SobelLbp, 512}, {Variant::BofLbp, 1280}, {Variant::MdLbp, 2048},
        {Variant::Fdlbp, 4096},  {Variant::FmdLbp, 10240}, {Variant::CFdlbp, 12288},
    };
    const Image gray = random_image(64, 64, 1);
    const ColorImage color = random_color_image(64, 64, 1);
    for (const auto& [variant, dim] : table) {
        const DescriptorConfig c = config_for(variant);
        const std::size_t got = is_color_variant(variant) ? variant_descriptor(color, c).size()
                                                          : variant_descriptor(gray, c).size();
        if (got != dim || c.dimension() != dim) {
            return {false, std::string(to_string(variant)) + " has " + std::to_string(got)};
        }
    }
    return {true, "fdlbp 4096, all 7 variants match the table"};
}

// 2. Normalization.
Outcome normalization() {
    double worst = 0.0;
    for (std::uint32_t seed = 0; seed < 100; ++seed) {
        const FeatureVector v = variant_descriptor(random_image(32 + seed % 17, 24 + seed % 13, seed), DescriptorConfig{});
        double total = 0.0;
        for (double x : v.values) {
            total += x;
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return {worst <= 1e-9, "max |sum - 1| = " + fmt("%.3g", worst) + " over 100 images"};
}

// 3. Decoder partition and block sums.
Outcome partition() {
    const DescriptorConfig cfg;
    for (std::uint32_t seed = 0; seed < 100; ++seed) {
        const int w = 16 + static_cast<int>(seed % 20);
        const int h = 12 + static_cast<int>(seed % 23);
        const Image img = random_image(w, h, 1000 + seed);
        const auto bank = filter_bank(img);
        std::map<FilterId, BitPlanes> planes;
        for (const auto& f : bank) {
            planes.emplace(f.source, lbp_bitplanes(f.image, cfg.lbp));
        }
        for (const auto& group : cfg.spec.groups()) {
            std::vector<const BitPlanes*> inputs;
            for (FilterId id : group) {
                inputs.push_back(&planes.at(id));
            }
            const auto channels = decode(inputs);
            for (int r = 1; r < h - 1; ++r) {
                for (int c = 1; c < w - 1; ++c) {
                    std::uint32_t sum = 0;
                    for (const auto& ch : channels) {
                        sum += ch.at(r, c);
                    }
                    if (sum != 255) {
                        return {false, "pixel sum " + std::to_string(sum) + " on image " + std::to_string(seed)};
                    }
                }
            }
        }
        const auto counts = descriptor_counts(img, cfg);
        const std::uint64_t interior = static_cast<std::uint64_t>(w - 2) * static_cast<std::uint64_t>(h - 2);
        const std::size_t bins = cfg.lbp.bins();
        for (std::size_t b = 0; b < cfg.blocks(); ++b) {
            std::uint64_t total = 0;
            for (std::size_t k = 0; k < bins; ++k) {
                total += counts[b * bins + k];
            }
            if (total != interior) {
                return {false, "block " + std::to_string(b) + " sums to " + std::to_string(total)};
            }
        }
    }
    return {true, "channel sums 255 and 16 block sums exact on 100 images"};
}

// 4. Naive reference equivalence.
Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    const std::vector<std::pair<std::string, Variant>> variants = {{"lbp", Variant::Lbp},
                                                                   {"sobel_lbp", Variant::SobelLbp},
                                                                   {"bof_lbp", Variant::BofLbp},
                                                                   {"fdlbp", Variant::Fdlbp},
                                                                   {"mdlbp", Variant::MdLbp}};
    int checked = 0;
    for (std::uint32_t seed = 0; seed < 200; ++seed) {
        for (const auto& [name, variant] : variants) {
            const DescriptorConfig cfg = config_for(variant);
            std::vector<std::uint64_t> expected;
            FeatureVector got;
            if (is_color_variant(variant)) {
                const ColorImage img = random_color_image(16, 16, 5000 + seed);
                expected = naive::counts(name, img);
                if (descriptor_counts(img, cfg) != expected) {
                    return {false, name + " counts differ on image " + std::to_string(seed)};
                }
                got = variant_descriptor(img, cfg);
            } else {
                const Image img = random_image(16, 16, 5000 + seed);
                expected = naive::counts(name, img);
                if (descriptor_counts(img, cfg) != expected) {
                    return {false, name + " counts differ on image " + std::to_string(seed)};
                }
                got = variant_descriptor(img, cfg);
            }
            if (got.values != naive::normalized(expected)) {
                return {false, name + " normalized values differ on image " + std::to_string(seed)};
            }
            ++checked;
        }
    }
    const double secs = seconds_since(t0);
    return {secs < 60.0, std::to_string(checked) + " image/variant pairs bit-exact in " + fmt("%.2f", secs) + " s"};
}

// 5. Affine intensity invariance.
Outcome affine_invariance() {
    for (std::uint32_t seed = 0; seed < 50; ++seed) {
        const Image img = random_image(40, 40, 9000 + seed);
        const FeatureVector a = variant_descriptor(img, DescriptorConfig{});
        const FeatureVector b = variant_descriptor(fdlbp::testing::affine(img, 2.0, 10.0), DescriptorConfig{});
        if (a.values != b.values) {
            return {false, "image " + std::to_string(seed) + " differs"};
        }
    }
    return {true, "fdlbp(2I+10) == fdlbp(I) on 50 images"};
}

// 6. Fixture metrics against committed golden values.
Outcome fixture_metrics() {
    const std::filesystem::path dir = std::filesystem::path(FDLBP_TEST_DATA) / "synthetic";
    const FeatureStore store = build_store(read_manifest(dir / "manifest.csv", dir), DescriptorConfig{});
    if (store.size() != 40 || store.category_sizes().size() != 4) {
        return {false, "fixture is not 4 x 10"};
    }
    std::ifstream golden(dir / "golden_n5.csv");
    std::string line;
    std::getline(golden, line);
    int rows = 0;
    while (std::getline(golden, line)) {
        std::istringstream fields(line);
        std::vector<std::string> f;
        for (std::string cell; std::getline(fields, cell, ',');) {
            f.push_back(cell);
        }
        if (f.size() != 6) {
            return {false, "malformed golden row: " + line};
        }
        const RetrievalRun run = RetrievalRun::compute(store, parse_measure(f[0]));
        const MetricsRow at1 = evaluate(run, 1);
        const MetricsRow at5 = evaluate(run, 5);
        const std::vector<std::string> got = {format_percent(at1.arp), format_percent(at5.arp),
                                              format_percent(at5.arr), format_percent(at5.fscore),
                                              format_percent(at5.anmrr)};
        if (f[1] != "100.00" || got[0] != "100.00" ||
            !std::equal(got.begin(), got.end(), f.begin() + 1)) {
            return {false, f[0] + " metrics " + got[1] + "/" + got[2] + "/" + got[3] + "/" + got[4] +
                               " vs golden " + line};
        }
        ++rows;
    }
    return {rows == 6, "ARP@1 100.00 and n=5 metrics match golden for " + std::to_string(rows) + " measures"};
}

FeatureStore labelled_store(const std::vector<std::pair<std::string, std::vector<float>>>& items) {
    FeatureStore store(0, static_cast<std::uint32_t>(items.front().second.size()));
    int k = 0;
    for (const auto& [subject, values] : items) {
        store.add("item" + std::to_string(k++), subject, values);
    }
    return store;
}

// Literal MPEG-7 NMRR for one query given the 1-based ranks of its ground truth.
double nmrr_literal(const std::vector<std::size_t>& ranks, double gtm) {
    const double ng = static_cast<double>(ranks.size());
    const double k = std::min(4.0 * ng, 2.0 * gtm);
    double sum = 0.0;
    for (std::size_t r : ranks) {
        sum += static_cast<double>(r) > k ? 1.25 * k : static_cast<double>(r);
    }
    return (sum / ng - 0.5 - ng / 2.0) / (1.25 * k - 0.5 - ng / 2.0);
}

// 7. ANMRR bounds.
Outcome anmrr_bounds() {
    // Perfect: three subjects on orthogonal axes, four copies each.
    std::vector<std::pair<std::string, std::vector<float>>> perfect;
    for (int s = 0; s < 3; ++s) {
        for (int k = 0; k < 4; ++k) {
            std::vector<float> v(3, 0.0F);
            v[static_cast<std::size_t>(s)] = 1.0F;
            perfect.emplace_back(std::string(1, static_cast<char>('A' + s)), v);
        }
    }
    const RetrievalRun good = RetrievalRun::compute(labelled_store(perfect), Measure::ChiSquare);
    double worst_perfect = std::abs(anmrr_full(good));
    for (std::size_t n = 1; n <= 12; ++n) {
        worst_perfect = std::max(worst_perfect, std::abs(anmrr(good, n)));
    }

    // Adversarial: on a line, each item's two nearest neighbours belong to
    // other subjects while its partner sits at the far end.
    const FeatureStore bad_store = labelled_store({{"A", {0.0F, 1.0F}},
                                                   {"B", {0.1F, 0.9F}},
                                                   {"C", {0.2F, 0.8F}},
                                                   {"C", {0.8F, 0.2F}},
                                                   {"B", {0.9F, 0.1F}},
                                                   {"A", {1.0F, 0.0F}}});
    RankOptions exclude;
    exclude.exclude_query = true;
    const RetrievalRun bad = RetrievalRun::compute(bad_store, Measure::L1, exclude);
    double worst_adversarial = 0.0;
    for (const auto& q : bad.queries()) {
        worst_adversarial = std::max(worst_adversarial, std::abs(nmrr(q.relevant_ranks, 1, 2.0) - 1.0));
        worst_adversarial = std::max(worst_adversarial, std::abs(nmrr_literal(q.relevant_ranks, 1.0) - 1.0));
    }
    worst_adversarial = std::max(worst_adversarial, std::abs(anmrr_full(bad) - 1.0));
    const bool pass = worst_perfect <= 1e-9 && worst_adversarial <= 1e-9;
    return {pass, "perfect ANMRR error " + fmt("%.3g", worst_perfect) + ", adversarial NMRR error " +
                      fmt("%.3g", worst_adversarial)};
}

// 8. Distance identities.
Outcome distance_identities() {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_normalized = [&](std::size_t n, bool even_zero, bool odd_zero) {
        std::vector<double> v(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = ((i % 2 == 0 && even_zero) || (i % 2 == 1 && odd_zero)) ? 0.0 : u(rng);
            total += v[i];
        }
        for (double& x : v) {
            x /= total;
        }
        return v;
    };
    double worst_identity = 0.0;
    double worst_chi = 0.0;
    double worst_symmetry = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_normalized(4096, false, false);
        const auto b = random_normalized(4096, false, false);
        for (Measure m : kAllMeasures) {
            worst_identity = std::max(worst_identity, std::abs(distance(std::span<const double>(a),
                                                                        std::span<const double>(a), m)));
            worst_symmetry = std::max(worst_symmetry,
                                      std::abs(distance(std::span<const double>(a), std::span<const double>(b), m) -
                                               distance(std::span<const double>(b), std::span<const double>(a), m)));
        }
        const auto e = random_normalized(512, false, true);
        const auto o = random_normalized(512, true, false);
        worst_chi = std::max(worst_chi, std::abs(distance(std::span<const double>(e), std::span<const double>(o),
                                                          Measure::ChiSquare) -
                                                 2.0));
    }
    const bool pass = worst_identity == 0.0 && worst_symmetry <= 1e-12 && worst_chi <= 1e-12;
    return {pass, "d(v,v) max " + fmt("%.3g", worst_identity) + ", symmetry max " + fmt("%.3g", worst_symmetry) +
                      ", disjoint chisq error " + fmt("%.3g", worst_chi)};
}

StoreErrorKind load_kind(const std::string& bytes, const StoreExpectation& expect = {}) {
    std::istringstream in(bytes);
    try {
        read_store(in, expect);
    } catch (const StoreError& e) {
        return e.kind();
    }
    throw std::runtime_error("load succeeded");
}

// 9. Persistence.
Outcome persistence() {
    FeatureStore store(config_for(Variant::Fdlbp).fingerprint(), 4096);
    for (std::uint32_t k = 0; k < 6; ++k) {
        const FeatureVector v = variant_descriptor(random_image(24, 24, 300 + k), DescriptorConfig{});
        store.add("img" + std::to_string(k), "s" + std::to_string(k % 2), v);
    }
    std::ostringstream first;
    write_store(first, store);
    const std::string bytes = first.str();
    std::istringstream in(bytes);
    const FeatureStore loaded = read_store(in);
    std::ostringstream second;
    write_store(second, loaded);
    if (!(loaded == store) || second.str() != bytes) {
        return {false, "round trip not bit-identical"};
    }
    try {
        // Every strict prefix must be rejected; past the magic it is Truncated.
        for (std::size_t len = 0; len < bytes.size(); len += (len < 200 ? 1 : 97)) {
            const StoreErrorKind kind = load_kind(bytes.substr(0, len));
            if (len >= 4 && kind != StoreErrorKind::Truncated) {
                return {false, "prefix " + std::to_string(len) + " gave " + std::string(to_string(kind))};
            }
        }
        std::string magic = bytes;
        magic[0] = 'X';
        std::string version = bytes;
        version[4] = 2;
        std::string nan = bytes;
        const float bad = std::nanf("");
        std::memcpy(&nan[bytes.size() - 4], &bad, 4);
        std::string negative = bytes;
        const float minus = -0.5F;
        std::memcpy(&negative[bytes.size() - 8], &minus, 4);
        const std::vector<std::pair<StoreErrorKind, StoreErrorKind>> cases = {
            {load_kind(magic), StoreErrorKind::BadMagic},
            {load_kind(version), StoreErrorKind::UnsupportedVersion},
            {load_kind(bytes + "!"), StoreErrorKind::Corrupt},
            {load_kind(nan), StoreErrorKind::Corrupt},
            {load_kind(negative), StoreErrorKind::Corrupt},
            {load_kind(bytes, {config_for(Variant::Lbp).fingerprint(), std::nullopt}),
             StoreErrorKind::FingerprintMismatch},
            {load_kind(bytes, {std::nullopt, 256}), StoreErrorKind::DimensionMismatch},
        };
        for (const auto& [got, want] : cases) {
            if (got != want) {
                return {false, "expected " + std::string(to_string(want)) + ", got " + std::string(to_string(got))};
            }
        }
        load_store("/nonexistent/dir/store.fdlb");
        return {false, "missing file loaded"};
    } catch (const StoreError& e) {
        if (e.kind() != StoreErrorKind::Io) {
            return {false, std::string("missing file gave ") + std::string(to_string(e.kind()))};
        }
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
    return {true, "round trip bit-identical; truncation, magic, version, corrupt, mismatch and io errors raised"};
}

// 10. Throughput.
Outcome throughput() {
    constexpr std::size_t kImages = 600;
    std::vector<Image> images;
    images.reserve(kImages);
    for (std::uint32_t k = 0; k < kImages; ++k) {
        images.push_back(random_image(64, 64, 20000 + k));
    }
    const DescriptorConfig cfg;
    std::vector<FeatureVector> out(kImages);
    auto rate = [&](unsigned threads) {
        double best = 0.0;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = Clock::now();
            parallel_for(kImages, threads, [&](std::size_t i) { out[i] = variant_descriptor(images[i], cfg); });
            best = std::max(best, static_cast<double>(kImages) / seconds_since(t0));
        }
        return best;
    };
    const double single = rate(1);
    const double four = rate(4);
    const double speedup = four / single;
    const bool pass = single >= 150.0 && speedup >= 3.0;
    return {pass, fmt("%.0f", single) + " img/s single-threaded, " + fmt("%.0f", four) + " img/s with 4 threads (" +
                      fmt("%.2f", speedup) + "x) on " + std::to_string(std::thread::hardware_concurrency()) +
                      " hardware thread(s)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"dimensionality", dimensions},
        {"normalization", normalization},
        {"decoder partition", partition},
        {"naive oracle equivalence", oracle_equivalence},
        {"affine intensity invariance", affine_invariance},
        {"fixture metrics", fixture_metrics},
        {"anmrr bounds", anmrr_bounds},
        {"distance identities", distance_identities},
        {"persistence", persistence},
        {"throughput", throughput},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str());
    }
    std::printf("[SKIP] 11 lfw ranking: optional, needs a user-supplied face subset\n");
    std::printf("%d of %zu gating criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
