#include "fdlbp/evaluation.hpp"

#include "fdlbp/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace fdlbp {

PrecisionRecall precision_recall(const RankedList& ranked, const FeatureStore& store, std::size_t n) {
    if (!ranked.query) {
        throw std::invalid_argument("precision_recall needs a ranking of a stored query");
    }
    if (n < 1 || n > ranked.entries.size()) {
        throw std::invalid_argument("n must be in [1, " + std::to_string(ranked.entries.size()) + "], got " +
                                    std::to_string(n));
    }
    const std::string& subject = store.item(*ranked.query).subject;
    std::size_t similar = 0;
    for (const auto& item : store.items()) {
        similar += item.subject == subject ? 1 : 0;
    }
    if (!ranked.query_included) {
        --similar;
    }
    std::size_t correct = 0;
    for (std::size_t k = 0; k < n; ++k) {
        correct += store.item(ranked.entries[k].index).subject == subject ? 1 : 0;
    }
    PrecisionRecall pr;
    pr.precision = static_cast<double>(correct) / static_cast<double>(n);
    pr.recall = similar == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(similar);
    return pr;
}

RetrievalRun RetrievalRun::compute(const FeatureStore& store, Measure measure, const RankOptions& options,
                                   unsigned threads) {
    if (store.empty()) {
        throw std::invalid_argument("cannot evaluate an empty store");
    }
    RetrievalRun run;
    run.measure_ = measure;
    run.query_included_ = !options.exclude_query;
    run.ranking_length_ = options.exclude_query ? store.size() - 1 : store.size();
    run.queries_.resize(store.size());
    parallel_for(store.size(), threads, [&](std::size_t q) {
        const RankedList ranked = rank(store, q, measure, options);
        Query& out = run.queries_[q];
        out.index = q;
        out.subject = store.item(q).subject;
        for (std::size_t k = 0; k < ranked.entries.size(); ++k) {
            if (store.item(ranked.entries[k].index).subject == out.subject) {
                out.relevant_ranks.push_back(k + 1);
            }
        }
    });
    return run;
}

namespace {

void check_n(const RetrievalRun& run, std::size_t n) {
    if (n < 1 || n > run.ranking_length()) {
        throw std::invalid_argument("n must be in [1, " + std::to_string(run.ranking_length()) + "], got " +
                                    std::to_string(n));
    }
}

std::size_t hits_within(const std::vector<std::size_t>& ranks, std::size_t n) {
    return static_cast<std::size_t>(std::upper_bound(ranks.begin(), ranks.end(), n) - ranks.begin());
}

}  // namespace

std::vector<CategoryMeans> category_means(const RetrievalRun& run, std::size_t n) {
    check_n(run, n);
    std::map<std::string, CategoryMeans> by_subject;
    for (const auto& q : run.queries()) {
        auto& c = by_subject[q.subject];
        c.subject = q.subject;
        const std::size_t hits = hits_within(q.relevant_ranks, n);
        const std::size_t similar = q.relevant_ranks.size();
        c.mean_precision += static_cast<double>(hits) / static_cast<double>(n);
        c.mean_recall += similar == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(similar);
        ++c.queries;
    }
    std::vector<CategoryMeans> out;
    out.reserve(by_subject.size());
    for (auto& [subject, c] : by_subject) {
        c.mean_precision /= static_cast<double>(c.queries);
        c.mean_recall /= static_cast<double>(c.queries);
        out.push_back(std::move(c));
    }
    return out;
}

ArpArr arp_arr(const RetrievalRun& run, std::size_t n) {
    const auto categories = category_means(run, n);
    ArpArr result;
    for (const auto& c : categories) {
        result.arp += c.mean_precision;
        result.arr += c.mean_recall;
    }
    result.arp /= static_cast<double>(categories.size());
    result.arr /= static_cast<double>(categories.size());
    return result;
}

double f_score(double arp, double arr) {
    const double sum = arp + arr;
    return sum > 0.0 ? 2.0 * arp * arr / sum : 0.0;
}

double nmrr(std::span<const std::size_t> ranks, std::size_t ground_truth, double window) {
    if (ground_truth == 0) {
        throw std::invalid_argument("nmrr needs at least one ground-truth item");
    }
    if (ranks.size() != ground_truth) {
        throw std::invalid_argument("nmrr: rank count differs from ground-truth size");
    }
    const double ng = static_cast<double>(ground_truth);
    double total = 0.0;
    for (std::size_t r : ranks) {
        const double rank = static_cast<double>(r);
        total += rank <= window ? rank : 1.25 * window;
    }
    const double avr = total / ng;
    const double mrr = avr - 0.5 - ng / 2.0;
    return mrr / (1.25 * window - 0.5 - ng / 2.0);
}

namespace {

// cut == 0 keeps every relevant item.
double anmrr_with_cut(const RetrievalRun& run, std::size_t cut) {
    auto ground_truth = [cut](const RetrievalRun::Query& q) {
        const std::size_t ng = q.relevant_ranks.size();
        return cut == 0 ? ng : std::min(ng, cut);
    };
    std::size_t gtm = 0;
    for (const auto& q : run.queries()) {
        gtm = std::max(gtm, ground_truth(q));
    }
    double total = 0.0;
    std::size_t counted = 0;
    for (const auto& q : run.queries()) {
        const std::size_t ng = ground_truth(q);
        if (ng == 0) {
            continue;
        }
        const double window = static_cast<double>(std::min(4 * ng, 2 * gtm));
        total += nmrr(std::span<const std::size_t>(q.relevant_ranks).first(ng), ng, window);
        ++counted;
    }
    return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

}  // namespace

double anmrr(const RetrievalRun& run, std::size_t n) {
    check_n(run, n);
    return anmrr_with_cut(run, n);
}

double anmrr_full(const RetrievalRun& run) { return anmrr_with_cut(run, 0); }

MetricsRow evaluate(const RetrievalRun& run, std::size_t n) {
    const ArpArr aa = arp_arr(run, n);
    return {n, aa.arp, aa.arr, f_score(aa.arp, aa.arr), anmrr(run, n)};
}

std::vector<MetricsRow> sweep(const RetrievalRun& run, std::size_t n_max) {
    check_n(run, n_max);
    std::vector<MetricsRow> rows;
    rows.reserve(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        rows.push_back(evaluate(run, n));
    }
    return rows;
}

std::vector<CategoryMeans> category_means(const FeatureStore& store, Measure m, std::size_t n,
                                          const RankOptions& options) {
    return category_means(RetrievalRun::compute(store, m, options), n);
}

ArpArr arp_arr(const FeatureStore& store, Measure m, std::size_t n, const RankOptions& options) {
    return arp_arr(RetrievalRun::compute(store, m, options), n);
}

double anmrr(const FeatureStore& store, Measure m, std::size_t n, const RankOptions& options) {
    return anmrr(RetrievalRun::compute(store, m, options), n);
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

namespace {

void write_comments(std::ostream& out, std::span<const std::string> lines) {
    for (const auto& line : lines) {
        out << "# " << line << '\n';
    }
}

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows, std::span<const std::string> header_comments) {
    write_comments(out, header_comments);
    out << "n,arp,arr,fscore,anmrr\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_percent(r.arp) << ',' << format_percent(r.arr) << ',' << format_percent(r.fscore)
            << ',' << format_percent(r.anmrr) << '\n';
    }
}

void write_category_csv(std::ostream& out, std::size_t n, std::span<const CategoryMeans> categories,
                        std::span<const std::string> header_comments) {
    write_comments(out, header_comments);
    out << "n,subject,queries,mp,mr\n";
    for (const auto& c : categories) {
        out << n << ',' << c.subject << ',' << c.queries << ',' << format_percent(c.mean_precision) << ','
            << format_percent(c.mean_recall) << '\n';
    }
}

}  // namespace fdlbp
