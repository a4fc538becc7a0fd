#include "fdlbp/retrieval.hpp"

#include "fdlbp/errors.hpp"
#include "fdlbp/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

namespace fdlbp {

const char* to_string(StoreErrorKind kind) noexcept {
    switch (kind) {
        case StoreErrorKind::Io: return "io";
        case StoreErrorKind::BadMagic: return "bad-magic";
        case StoreErrorKind::UnsupportedVersion: return "unsupported-version";
        case StoreErrorKind::FingerprintMismatch: return "fingerprint-mismatch";
        case StoreErrorKind::DimensionMismatch: return "dimension-mismatch";
        case StoreErrorKind::Truncated: return "truncated";
        case StoreErrorKind::Corrupt: return "corrupt";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) {
        throw ManifestError("manifest: unterminated quote in line: " + line);
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

std::filesystem::path Manifest::resolve(const ManifestEntry& e) const {
    const std::filesystem::path p(e.path);
    return p.is_absolute() ? p : root / p;
}

Manifest parse_manifest(std::istream& in, const std::filesystem::path& root) {
    Manifest manifest{root, {}};
    std::string line;
    if (!std::getline(in, line)) {
        throw ManifestError("manifest is empty");
    }
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
        line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "path,subject_id") {
        throw ManifestError("manifest header must be 'path,subject_id', got '" + line + "'");
    }
    std::set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": expected 2 fields");
        }
        if (fields[0].empty()) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": empty path");
        }
        if (fields[1].empty()) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": empty subject_id");
        }
        if (!seen.insert(fields[0]).second) {
            throw ManifestError("manifest line " + std::to_string(line_no) + ": duplicate path '" + fields[0] + "'");
        }
        manifest.entries.push_back({std::move(fields[0]), std::move(fields[1])});
    }
    return manifest;
}

Manifest read_manifest(const std::filesystem::path& path, const std::filesystem::path& root) {
    std::ifstream in(path);
    if (!in) {
        throw ManifestError("cannot open manifest: " + path.string());
    }
    return parse_manifest(in, root);
}

// ---------------------------------------------------------------------------
// FeatureStore

FeatureStore::FeatureStore(std::uint64_t fingerprint, std::uint32_t dimension)
    : fingerprint_(fingerprint), dimension_(dimension) {}

void FeatureStore::add(std::string id, std::string subject, std::vector<float> values) {
    if (values.size() != dimension_) {
        throw std::invalid_argument("store: item '" + id + "' has " + std::to_string(values.size()) +
                                    " values, store dimension is " + std::to_string(dimension_));
    }
    if (subject.empty()) {
        throw std::invalid_argument("store: item '" + id + "' has an empty subject");
    }
    if (index_.contains(id)) {
        throw std::invalid_argument("store: duplicate item id '" + id + "'");
    }
    index_.emplace(id, items_.size());
    items_.push_back({std::move(id), std::move(subject), std::move(values)});
}

void FeatureStore::add(std::string id, std::string subject, const FeatureVector& v) {
    if (v.fingerprint != fingerprint_) {
        throw std::invalid_argument("store: descriptor fingerprint does not match the store");
    }
    add(std::move(id), std::move(subject), std::vector<float>(v.values.begin(), v.values.end()));
}

std::optional<std::size_t> FeatureStore::find(const std::string& id) const {
    if (auto it = index_.find(id); it != index_.end()) {
        return it->second;
    }
    return std::nullopt;
}

std::size_t FeatureStore::index_of(const std::string& id) const {
    if (auto idx = find(id)) {
        return *idx;
    }
    throw NotFoundError("no item '" + id + "' in store");
}

std::map<std::string, std::size_t> FeatureStore::category_sizes() const {
    std::map<std::string, std::size_t> sizes;
    for (const auto& item : items_) {
        ++sizes[item.subject];
    }
    return sizes;
}

FeatureStore build_store(const Manifest& manifest, const DescriptorConfig& config, unsigned threads) {
    if (manifest.entries.empty()) {
        throw ManifestError("manifest has no entries");
    }
    const std::size_t count = manifest.entries.size();
    std::vector<std::vector<float>> vectors(count);
    std::vector<std::string> failures(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const auto& entry = manifest.entries[i];
        try {
            const auto image = load_image(manifest.resolve(entry));
            const auto v = variant_descriptor(image, config);
            vectors[i].assign(v.values.begin(), v.values.end());
        } catch (const std::exception& e) {
            failures[i] = entry.path + ": " + e.what();
        }
    });
    std::vector<std::string> offenders;
    for (auto& f : failures) {
        if (!f.empty()) {
            offenders.push_back(std::move(f));
        }
    }
    if (!offenders.empty()) {
        std::string what = std::to_string(offenders.size()) + " of " + std::to_string(count) + " images failed";
        throw BuildError(what, std::move(offenders));
    }
    FeatureStore store(config.fingerprint(), static_cast<std::uint32_t>(config.dimension()));
    for (std::size_t i = 0; i < count; ++i) {
        store.add(manifest.entries[i].path, manifest.entries[i].subject, std::move(vectors[i]));
    }
    return store;
}

// ---------------------------------------------------------------------------
// Ranking

namespace {

RankedList rank_impl(const FeatureStore& store, std::span<const float> query, std::optional<std::size_t> self,
                     Measure m, const RankOptions& opt) {
    if (query.size() != store.dimension()) {
        throw std::invalid_argument("rank: query dimension " + std::to_string(query.size()) +
                                    " does not match store dimension " + std::to_string(store.dimension()));
    }
    RankedList list;
    list.query = self;
    list.query_included = self.has_value() && !opt.exclude_query;
    list.entries.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        if (opt.exclude_query && self && *self == i) {
            continue;
        }
        list.entries.push_back({i, distance(query, std::span<const float>(store.item(i).values), m, opt.distance)});
    }
    const auto& items = store.items();
    std::sort(list.entries.begin(), list.entries.end(), [&](const RankedEntry& a, const RankedEntry& b) {
        if (a.distance != b.distance) {
            return a.distance < b.distance;
        }
        return items[a.index].id < items[b.index].id;
    });
    return list;
}

}  // namespace

RankedList rank(const FeatureStore& store, std::size_t query_index, Measure m, const RankOptions& opt) {
    if (query_index >= store.size()) {
        throw NotFoundError("query index " + std::to_string(query_index) + " is outside the store");
    }
    return rank_impl(store, store.item(query_index).values, query_index, m, opt);
}

RankedList rank(const FeatureStore& store, const std::string& query_id, Measure m, const RankOptions& opt) {
    return rank(store, store.index_of(query_id), m, opt);
}

RankedList rank(const FeatureStore& store, std::span<const float> query, Measure m, const RankOptions& opt) {
    RankOptions external = opt;
    external.exclude_query = false;
    return rank_impl(store, query, std::nullopt, m, external);
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
    }
}

void put_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
    }
}

void put_string(std::string& buf, const std::string& s) {
    put_u32(buf, static_cast<std::uint32_t>(s.size()));
    buf += s;
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    std::string_view take(std::size_t n, const char* what) {
        if (remaining() < n) {
            throw StoreError(StoreErrorKind::Truncated, std::string("store truncated while reading ") + what);
        }
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint32_t u32(const char* what) {
        const auto b = take(4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) {
            v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        }
        return v;
    }

    std::uint64_t u64(const char* what) {
        const auto b = take(8, what);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) {
            v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        }
        return v;
    }

    std::string string(const char* what) {
        const std::uint32_t len = u32(what);
        return std::string(take(len, what));
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_store(std::ostream& out, const FeatureStore& store) {
    std::string buf = "FDLB";
    put_u32(buf, kStoreVersion);
    put_u64(buf, store.fingerprint());
    put_u32(buf, static_cast<std::uint32_t>(store.size()));
    put_u32(buf, store.dimension());
    for (const auto& item : store.items()) {
        put_string(buf, item.id);
        put_string(buf, item.subject);
        for (float v : item.values) {
            put_u32(buf, std::bit_cast<std::uint32_t>(v));
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw StoreError(StoreErrorKind::Io, "failed writing store");
    }
}

void save_store(const FeatureStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw StoreError(StoreErrorKind::Io, "cannot create store file: " + path.string());
    }
    write_store(out, store);
}

FeatureStore read_store(std::istream& in, const StoreExpectation& expect) {
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw StoreError(StoreErrorKind::Io, "failed reading store");
    }
    Reader r(bytes);
    if (r.remaining() < 4 || r.take(4, "magic") != "FDLB") {
        throw StoreError(StoreErrorKind::BadMagic, "not a feature store (bad magic bytes)");
    }
    const std::uint32_t version = r.u32("version");
    if (version != kStoreVersion) {
        throw StoreError(StoreErrorKind::UnsupportedVersion,
                         "unsupported store version " + std::to_string(version));
    }
    const std::uint64_t fingerprint = r.u64("fingerprint");
    const std::uint32_t count = r.u32("item count");
    const std::uint32_t dimension = r.u32("dimension");
    if (expect.fingerprint && *expect.fingerprint != fingerprint) {
        throw StoreError(StoreErrorKind::FingerprintMismatch,
                         "store was built with a different descriptor configuration");
    }
    if (expect.dimension && *expect.dimension != dimension) {
        throw StoreError(StoreErrorKind::DimensionMismatch,
                         "store dimension " + std::to_string(dimension) + " differs from expected " +
                             std::to_string(*expect.dimension));
    }
    if (dimension == 0 && count > 0) {
        throw StoreError(StoreErrorKind::DimensionMismatch, "store declares zero-length vectors");
    }
    // Every item needs at least its two length prefixes and its values.
    const std::uint64_t min_item = 8ULL + 4ULL * dimension;
    if (static_cast<std::uint64_t>(count) * min_item > r.remaining()) {
        throw StoreError(StoreErrorKind::Truncated, "store payload shorter than its declared " +
                                                        std::to_string(count) + " items");
    }
    FeatureStore store(fingerprint, dimension);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string id = r.string("item id");
        std::string subject = r.string("item subject");
        const auto raw = r.take(4ULL * dimension, "item values");
        std::vector<float> values(dimension);
        for (std::uint32_t k = 0; k < dimension; ++k) {
            std::uint32_t bits = 0;
            for (int b = 3; b >= 0; --b) {
                bits = (bits << 8) | static_cast<unsigned char>(raw[4 * k + static_cast<std::size_t>(b)]);
            }
            values[k] = std::bit_cast<float>(bits);
            if (!std::isfinite(values[k]) || values[k] < 0.0F) {
                throw StoreError(StoreErrorKind::Corrupt, "store item " + std::to_string(i) + " value " +
                                                              std::to_string(k) + " is negative or not finite");
            }
        }
        try {
            store.add(std::move(id), std::move(subject), std::move(values));
        } catch (const std::invalid_argument& e) {
            throw StoreError(StoreErrorKind::Corrupt, std::string("store item ") + std::to_string(i) + ": " + e.what());
        }
    }
    if (r.remaining() != 0) {
        throw StoreError(StoreErrorKind::Corrupt,
                         std::to_string(r.remaining()) + " unexpected trailing bytes after the last item");
    }
    return store;
}

FeatureStore load_store(const std::filesystem::path& path, const StoreExpectation& expect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StoreError(StoreErrorKind::Io, "cannot open store file: " + path.string());
    }
    return read_store(in, expect);
}

}  // namespace fdlbp
