#pragma once

#include "fdlbp/descriptor.hpp"
#include "fdlbp/similarity.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdlbp {

struct ManifestEntry {
    std::string path;
    std::string subject;
};

/// Images to index. CSV with header "path,subject_id"; relative paths are
/// resolved against `root`.
struct Manifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> entries;

    std::filesystem::path resolve(const ManifestEntry& e) const;
};

/// Throws ManifestError on a bad header, empty subject or duplicate path.
Manifest parse_manifest(std::istream& in, const std::filesystem::path& root);
Manifest read_manifest(const std::filesystem::path& path, const std::filesystem::path& root);

struct StoreItem {
    std::string id;
    std::string subject;
    std::vector<float> values;

    friend bool operator==(const StoreItem&, const StoreItem&) = default;
};

/// Gallery of descriptors sharing one configuration. Values are held as
/// float32, the on-disk precision, so a loaded store ranks exactly like the
/// one that was saved.
class FeatureStore {
public:
    FeatureStore() = default;
    FeatureStore(std::uint64_t fingerprint, std::uint32_t dimension);

    std::uint64_t fingerprint() const noexcept { return fingerprint_; }
    std::uint32_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    /// Throws std::invalid_argument on a duplicate id, empty subject or wrong length.
    void add(std::string id, std::string subject, std::vector<float> values);
    void add(std::string id, std::string subject, const FeatureVector& v);

    const StoreItem& item(std::size_t index) const { return items_.at(index); }
    const std::vector<StoreItem>& items() const noexcept { return items_; }
    std::optional<std::size_t> find(const std::string& id) const;
    /// Throws NotFoundError.
    std::size_t index_of(const std::string& id) const;

    /// Number of items per subject.
    std::map<std::string, std::size_t> category_sizes() const;

    friend bool operator==(const FeatureStore&, const FeatureStore&) = default;

private:
    std::uint64_t fingerprint_ = 0;
    std::uint32_t dimension_ = 0;
    std::vector<StoreItem> items_;
    std::map<std::string, std::size_t> index_;
};

/// Extracts one descriptor per manifest entry, in manifest order. Images that
/// fail to load or describe are all collected and reported in a BuildError.
FeatureStore build_store(const Manifest& manifest, const DescriptorConfig& config, unsigned threads = 1);

struct RankOptions {
    /// Drop the query item from its own ranking.
    bool exclude_query = false;
    DistanceOptions distance;
};

struct RankedEntry {
    std::size_t index;
    double distance;
};

/// Items ordered by ascending distance, ties by ascending item id.
struct RankedList {
    std::optional<std::size_t> query;
    bool query_included = true;
    std::vector<RankedEntry> entries;
};

/// Ranks every store item against stored item `query_id`. Throws NotFoundError.
RankedList rank(const FeatureStore& store, const std::string& query_id, Measure m, const RankOptions& opt = {});
RankedList rank(const FeatureStore& store, std::size_t query_index, Measure m, const RankOptions& opt = {});
/// Ranks against an external descriptor (not a store member).
RankedList rank(const FeatureStore& store, std::span<const float> query, Measure m, const RankOptions& opt = {});

// Binary store file, all integers little-endian:
//   "FDLB" | u32 version | u64 fingerprint | u32 count | u32 dimension
//   count x { u32 id_len, id bytes, u32 subject_len, subject bytes, dimension x f32 }
inline constexpr std::uint32_t kStoreVersion = 1;

void write_store(std::ostream& out, const FeatureStore& store);
void save_store(const FeatureStore& store, const std::filesystem::path& path);

struct StoreExpectation {
    std::optional<std::uint64_t> fingerprint;
    std::optional<std::uint32_t> dimension;
};

/// Throws StoreError whose kind names the failure.
FeatureStore read_store(std::istream& in, const StoreExpectation& expect = {});
FeatureStore load_store(const std::filesystem::path& path, const StoreExpectation& expect = {});

}  // namespace fdlbp
