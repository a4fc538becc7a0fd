#pragma once

#include "fdlbp/retrieval.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fdlbp {

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// Precision and recall of the top n of a ranking of a stored query. An item
/// is correct when it shares the query's subject; the query itself counts when
/// it was kept in the ranking. Throws std::invalid_argument unless
/// 1 <= n <= ranking length.
PrecisionRecall precision_recall(const RankedList& ranked, const FeatureStore& store, std::size_t n);

/// Rankings of every store item used as a query, reduced to what the metrics
/// need: the 1-based positions of the query's relevant items.
class RetrievalRun {
public:
    struct Query {
        std::size_t index;
        std::string subject;
        /// Ascending 1-based ranks of same-subject items.
        std::vector<std::size_t> relevant_ranks;
    };

    static RetrievalRun compute(const FeatureStore& store, Measure measure, const RankOptions& options = {},
                                unsigned threads = 1);

    const std::vector<Query>& queries() const noexcept { return queries_; }
    /// Items in each ranking (store size, or one less with the query excluded).
    std::size_t ranking_length() const noexcept { return ranking_length_; }
    Measure measure() const noexcept { return measure_; }
    bool query_included() const noexcept { return query_included_; }

private:
    std::vector<Query> queries_;
    std::size_t ranking_length_ = 0;
    Measure measure_ = Measure::ChiSquare;
    bool query_included_ = true;
};

struct CategoryMeans {
    std::string subject;
    std::size_t queries = 0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
};

/// Per-subject mean precision / recall at n, ordered by subject.
std::vector<CategoryMeans> category_means(const RetrievalRun& run, std::size_t n);

struct ArpArr {
    double arp = 0.0;
    double arr = 0.0;
};

/// Unweighted means of the per-category MP and MR.
ArpArr arp_arr(const RetrievalRun& run, std::size_t n);

/// 2*ARP*ARR/(ARP+ARR), or 0 when both are 0.
double f_score(double arp, double arr);

/// NMRR of one query. `ranks` are the 1-based ranks of its ground-truth
/// items (ascending), `ground_truth` their count and `window` the rank
/// cut-off K; ranks beyond K cost 1.25 K.
double nmrr(std::span<const std::size_t> ranks, std::size_t ground_truth, double window);

/// ANMRR at n: each query's ground truth is cut to its min(NG, n) best-ranked
/// relevant items, and K = min(4 NG', 2 GTM') over the cut sizes.
/// Queries without ground truth are skipped.
double anmrr(const RetrievalRun& run, std::size_t n);

/// Standard ANMRR over the full ground truth (no n cut).
double anmrr_full(const RetrievalRun& run);

/// Metrics as fractions in [0, 1].
struct MetricsRow {
    std::size_t n = 0;
    double arp = 0.0;
    double arr = 0.0;
    double fscore = 0.0;
    double anmrr = 0.0;
};

MetricsRow evaluate(const RetrievalRun& run, std::size_t n);
std::vector<MetricsRow> sweep(const RetrievalRun& run, std::size_t n_max);

/// Convenience wrappers that rank the whole store first.
std::vector<CategoryMeans> category_means(const FeatureStore& store, Measure m, std::size_t n,
                                          const RankOptions& options = {});
ArpArr arp_arr(const FeatureStore& store, Measure m, std::size_t n, const RankOptions& options = {});
double anmrr(const FeatureStore& store, Measure m, std::size_t n, const RankOptions& options = {});

/// Percent with two decimals, e.g. 0.12345 -> "12.35".
std::string format_percent(double fraction);

/// "n,arp,arr,fscore,anmrr" rows in percent. `header_comments` lines are
/// written first, each prefixed with "# ".
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows,
                       std::span<const std::string> header_comments = {});

/// "n,subject,queries,mp,mr" rows in percent.
void write_category_csv(std::ostream& out, std::size_t n, std::span<const CategoryMeans> categories,
                        std::span<const std::string> header_comments = {});

}  // namespace fdlbp
