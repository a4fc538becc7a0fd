#include "commands.hpp"

#include "fdlbp/errors.hpp"
#include "fdlbp/evaluation.hpp"
#include "fdlbp/retrieval.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fdlbp::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config text

std::string to_config_text(const RunConfig& c) {
    std::ostringstream os;
    os << "variant=" << c.variant << '\n'
       << "neighbors=" << c.neighbors << '\n'
       << "radius=" << c.radius << '\n'
       << "sampling=" << c.sampling << '\n';
    for (const auto& s : c.specs) {
        os << "spec=" << s << '\n';
    }
    os << "measure=" << c.measure << '\n'
       << "n=" << c.n << '\n'
       << "n_max=" << c.n_max << '\n'
       << "manifest=" << c.manifest << '\n'
       << "root=" << c.root << '\n'
       << "store=" << c.store << '\n'
       << "out=" << c.out << '\n'
       << "categories_out=" << c.categories_out << '\n'
       << "kernels=" << c.kernels << '\n'
       << "query=" << c.query << '\n'
       << "image=" << c.image << '\n'
       << "exclude_query=" << (c.exclude_query ? "true" : "false") << '\n'
       << "emd_per_block=" << (c.emd_per_block ? "true" : "false") << '\n'
       << "threads=" << c.threads << '\n';
    return os.str();
}

namespace {

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (!value.empty() && value[0] == '-') {
            throw std::invalid_argument("negative");
        }
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) {
        throw std::invalid_argument("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
    }
    return static_cast<T>(v);
}

int parse_int(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) {
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw std::invalid_argument("config: '" + key + "' expects true|false, got '" + value + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, RunConfig c) {
    std::istringstream in(text);
    std::string line;
    bool specs_reset = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: expected key=value, got '" + line + "'");
        }
        const std::string key = line.substr(first, eq - first);
        const std::string value = line.substr(eq + 1);
        if (key == "variant") c.variant = value;
        else if (key == "neighbors") c.neighbors = parse_int(key, value);
        else if (key == "radius") c.radius = parse_int(key, value);
        else if (key == "sampling") c.sampling = value;
        else if (key == "spec") {
            if (!specs_reset) {
                c.specs.clear();
                specs_reset = true;
            }
            c.specs.push_back(value);
        }
        else if (key == "measure") c.measure = value;
        else if (key == "n") c.n = parse_unsigned<std::size_t>(key, value);
        else if (key == "n_max") c.n_max = parse_unsigned<std::size_t>(key, value);
        else if (key == "manifest") c.manifest = value;
        else if (key == "root") c.root = value;
        else if (key == "store") c.store = value;
        else if (key == "out") c.out = value;
        else if (key == "categories_out") c.categories_out = value;
        else if (key == "kernels") c.kernels = value;
        else if (key == "query") c.query = value;
        else if (key == "image") c.image = value;
        else if (key == "exclude_query") c.exclude_query = parse_bool(key, value);
        else if (key == "emd_per_block") c.emd_per_block = parse_bool(key, value);
        else if (key == "threads") c.threads = parse_unsigned<unsigned>(key, value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// Helpers

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string current;
    for (char ch : text) {
        if (ch == ',') {
            if (!current.empty()) {
                items.push_back(current);
            }
            current.clear();
        } else if (ch != ' ') {
            current.push_back(ch);
        }
    }
    if (!current.empty()) {
        items.push_back(current);
    }
    return items;
}

DescriptorConfig descriptor_config(const RunConfig& c, const std::string& variant, const std::string& spec) {
    DescriptorConfig d;
    d.variant = parse_variant(variant);
    d.lbp.neighbors = c.neighbors;
    d.lbp.radius = c.radius;
    d.lbp.sampling = parse_sampling(c.sampling);
    d.lbp.validate();
    d.spec = DecoderSpec::parse(spec);
    if (!c.kernels.empty()) {
        d.kernels = load_kernel_file(c.kernels);
    }
    return d;
}

namespace {

const std::string& primary_spec(const RunConfig& c) {
    if (c.specs.empty()) {
        throw std::invalid_argument("no decoder spec given");
    }
    return c.specs.front();
}

DescriptorConfig single_descriptor(const RunConfig& c) {
    const auto variants = split_list(c.variant);
    if (variants.size() != 1) {
        throw std::invalid_argument("this command takes exactly one --variant");
    }
    return descriptor_config(c, variants.front(), primary_spec(c));
}

RankOptions rank_options(const RunConfig& c, std::uint32_t dimension, int neighbors) {
    RankOptions opt;
    opt.exclude_query = c.exclude_query;
    if (c.emd_per_block) {
        const std::size_t block = std::size_t{1} << neighbors;
        opt.distance.emd_block = dimension % block == 0 ? block : 0;
    }
    return opt;
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) {
        throw std::invalid_argument(std::string("missing required option ") + flag);
    }
}

std::vector<std::string> provenance(const RunConfig& c, const std::string& command) {
    std::vector<std::string> lines{"command=" + command};
    std::istringstream in(to_config_text(c));
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

// Writes to --out when set, else to the given stream.
void emit(const RunConfig& c, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
    if (c.out.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw DataError("cannot write output file: " + c.out);
    }
    write(file);
}

std::size_t clamp_n(std::size_t n, std::size_t limit, const char* what, std::ostream& err) {
    if (n < 1) {
        throw std::invalid_argument(std::string(what) + " must be at least 1");
    }
    if (n > limit) {
        err << "warning: " << what << "=" << n << " exceeds the " << limit << " ranked items; using " << limit
            << '\n';
        return limit;
    }
    return n;
}

Manifest manifest_from(const RunConfig& c) {
    require(c.manifest, "--manifest");
    const fs::path root = c.root.empty() ? fs::path(c.manifest).parent_path() : fs::path(c.root);
    return read_manifest(c.manifest, root);
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_distance(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", d);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

int cmd_extract(const RunConfig& c, std::ostream& out, std::ostream&) {
    require(c.store, "--store");
    const DescriptorConfig d = single_descriptor(c);
    const Manifest manifest = manifest_from(c);
    const FeatureStore store = build_store(manifest, d, c.threads);
    save_store(store, c.store);
    out << "extracted " << store.size() << " items, variant " << to_string(d.variant) << ", dimension "
        << store.dimension() << ", fingerprint " << hex64(store.fingerprint()) << " -> " << c.store << '\n';
    return kOk;
}

int cmd_query(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require(c.store, "--store");
    const Measure measure = parse_measure(c.measure);
    if (c.query.empty() == c.image.empty()) {
        throw std::invalid_argument("query needs exactly one of --query <item id> or --image <path>");
    }
    const FeatureStore store = load_store(c.store);
    RankedList ranked;
    if (!c.query.empty()) {
        const auto opt = rank_options(c, store.dimension(), c.neighbors);
        ranked = rank(store, c.query, measure, opt);
    } else {
        const DescriptorConfig d = single_descriptor(c);
        if (d.fingerprint() != store.fingerprint()) {
            throw DataError("store was built with a different descriptor configuration than the given flags");
        }
        const FeatureVector v = variant_descriptor(load_image(c.image), d);
        const std::vector<float> q(v.values.begin(), v.values.end());
        ranked = rank(store, std::span<const float>(q), measure, rank_options(c, store.dimension(), c.neighbors));
    }
    const std::size_t n = clamp_n(c.n, ranked.entries.size(), "n", err);
    emit(c, out, [&](std::ostream& os) {
        os << "rank,item,subject,distance\n";
        for (std::size_t k = 0; k < n; ++k) {
            const auto& e = ranked.entries[k];
            const auto& item = store.item(e.index);
            os << (k + 1) << ',' << item.id << ',' << item.subject << ',' << format_distance(e.distance) << '\n';
        }
    });
    return kOk;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require(c.store, "--store");
    const Measure measure = parse_measure(c.measure);
    const FeatureStore store = load_store(c.store);
    const auto run = RetrievalRun::compute(store, measure, rank_options(c, store.dimension(), c.neighbors), c.threads);
    const std::size_t n = clamp_n(c.n, run.ranking_length(), "n", err);
    const MetricsRow row = evaluate(run, n);
    const auto echo = provenance(c, "evaluate");
    emit(c, out, [&](std::ostream& os) { write_metrics_csv(os, std::span<const MetricsRow>(&row, 1), echo); });

    const auto categories = category_means(run, n);
    std::string categories_path = c.categories_out;
    if (categories_path.empty() && !c.out.empty()) {
        categories_path = (fs::path(c.out).parent_path() / (fs::path(c.out).stem().string() + "_categories.csv")).string();
    }
    if (!categories_path.empty()) {
        std::ofstream file(categories_path, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw DataError("cannot write output file: " + categories_path);
        }
        write_category_csv(file, n, categories, echo);
    } else {
        out << '\n';
        write_category_csv(out, n, categories);
    }
    return kOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    require(c.store, "--store");
    const Measure measure = parse_measure(c.measure);
    const FeatureStore store = load_store(c.store);
    const auto run = RetrievalRun::compute(store, measure, rank_options(c, store.dimension(), c.neighbors), c.threads);
    const std::size_t n_max = clamp_n(c.n_max, run.ranking_length(), "n-max", err);
    const auto rows = sweep(run, n_max);
    const auto echo = provenance(c, "sweep");
    emit(c, out, [&](std::ostream& os) { write_metrics_csv(os, rows, echo); });
    return kOk;
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Measure measure = parse_measure(c.measure);
    const Manifest manifest = manifest_from(c);
    const auto variants = split_list(c.variant);
    if (variants.empty()) {
        throw std::invalid_argument("compare needs at least one --variant");
    }
    struct Row {
        std::string variant;
        std::string spec;
        std::size_t dimension;
        MetricsRow metrics;
    };
    std::vector<Row> rows;
    for (const auto& variant : variants) {
        const bool spec_variant = parse_variant(variant) == Variant::Fdlbp || parse_variant(variant) == Variant::CFdlbp;
        const std::vector<std::string> specs =
            spec_variant ? c.specs : std::vector<std::string>{primary_spec(c)};
        for (const auto& spec : specs) {
            const DescriptorConfig d = descriptor_config(c, variant, spec);
            const FeatureStore store = build_store(manifest, d, c.threads);
            err << "compare: " << to_string(d.variant);
            if (spec_variant) {
                err << ' ' << d.spec.to_string();
            }
            err << " dimension " << store.dimension() << '\n';
            const auto run =
                RetrievalRun::compute(store, measure, rank_options(c, store.dimension(), c.neighbors), c.threads);
            const std::size_t n = clamp_n(c.n, run.ranking_length(), "n", err);
            rows.push_back({std::string(to_string(d.variant)), spec_variant ? d.spec.to_string() : "", store.dimension(),
                            evaluate(run, n)});
        }
    }
    const auto echo = provenance(c, "compare");
    emit(c, out, [&](std::ostream& os) {
        for (const auto& line : echo) {
            os << "# " << line << '\n';
        }
        os << "variant,spec,dimension,n,arp,arr,fscore,anmrr\n";
        for (const auto& r : rows) {
            os << r.variant << ',' << r.spec << ',' << r.dimension << ',' << r.metrics.n << ','
               << format_percent(r.metrics.arp) << ',' << format_percent(r.metrics.arr) << ','
               << format_percent(r.metrics.fscore) << ',' << format_percent(r.metrics.anmrr) << '\n';
        }
    });
    return kOk;
}

int cmd_bench(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Manifest manifest = manifest_from(c);
    const auto variants = split_list(c.variant);
    if (variants.empty()) {
        throw std::invalid_argument("bench needs at least one --variant");
    }
    struct Row {
        std::string variant;
        std::size_t images;
        std::size_t dimension;
        double seconds;
        std::uintmax_t bytes;
    };
    std::vector<Row> rows;
    const fs::path scratch = fs::temp_directory_path();
    for (const auto& variant : variants) {
        const DescriptorConfig d = descriptor_config(c, variant, primary_spec(c));
        const auto start = std::chrono::steady_clock::now();
        const FeatureStore store = build_store(manifest, d, c.threads);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path file = scratch / ("fdlbp-bench-" + std::string(to_string(d.variant)) + "-" +
                                         std::to_string(::getpid()) + ".store");
        save_store(store, file);
        const auto bytes = fs::file_size(file);
        fs::remove(file);
        err << "bench: " << to_string(d.variant) << " " << store.size() << " images in " << seconds << " s\n";
        rows.push_back({std::string(to_string(d.variant)), store.size(), store.dimension(), seconds, bytes});
    }
    emit(c, out, [&](std::ostream& os) {
        os << "variant,images,dimension,seconds,images_per_second,store_bytes,store_mb\n";
        char buf[160];
        for (const auto& r : rows) {
            const double rate = r.seconds > 0.0 ? static_cast<double>(r.images) / r.seconds : 0.0;
            std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.4f,%.1f,%ju,%.3f\n", r.variant.c_str(), r.images, r.dimension,
                          r.seconds, rate, r.bytes, static_cast<double>(r.bytes) / (1024.0 * 1024.0));
            os << buf;
        }
    });
    return kOk;
}

// ---------------------------------------------------------------------------
// Dispatch

int run_guarded(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (command == "extract") return cmd_extract(config, out, err);
        if (command == "query") return cmd_query(config, out, err);
        if (command == "evaluate") return cmd_evaluate(config, out, err);
        if (command == "sweep") return cmd_sweep(config, out, err);
        if (command == "compare") return cmd_compare(config, out, err);
        if (command == "bench") return cmd_bench(config, out, err);
        err << "error: unknown command '" << command << "'\n";
        return kUsageError;
    } catch (const BuildError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& offender : e.offenders()) {
            err << "  " << offender << '\n';
        }
        return kDataError;
    } catch (const StoreError& e) {
        err << "error: store " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kDataError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const ContractViolation& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    // --config is applied first so explicit flags override its values.
    RunConfig config;
    try {
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") {
                config = load_config_file(argv[i + 1], config);
            }
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    CLI::App app{"Frequency decoded LBP descriptors and retrieval evaluation"};
    app.require_subcommand(1);
    std::string config_path;

    const auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file (flags override it)");
        sub->add_option("--manifest", config.manifest, "CSV manifest with header path,subject_id");
        sub->add_option("--root", config.root, "directory relative manifest paths resolve against");
        sub->add_option("--store", config.store, "feature store file");
        sub->add_option("--variant", config.variant,
                        "lbp|sobel_lbp|bof_lbp|fdlbp|mdlbp|cfdlbp|fmdlbp (comma list for compare/bench)");
        sub->add_option("--neighbors", config.neighbors, "LBP neighbours N");
        sub->add_option("--radius", config.radius, "LBP radius R");
        sub->add_option("--sampling", config.sampling, "neighbour sampling: grid|bilinear");
        sub->add_option("--spec", config.specs, "decoder spec, e.g. (a,hv,d)(a,sv,sh); repeatable for compare");
        sub->add_option("--measure", config.measure, "euclidean|cosine|emd|l1|d1|chisq");
        sub->add_option("--n", config.n, "number of retrieved images");
        sub->add_option("--n-max", config.n_max, "largest n for sweep");
        sub->add_option("--kernels", config.kernels, "kernel override file");
        sub->add_flag("--exclude-query", config.exclude_query, "drop the query from its own ranking");
        sub->add_flag("--emd-per-block", config.emd_per_block, "restart EMD cumulative sums per histogram block");
        sub->add_option("--threads", config.threads, "worker threads");
        sub->add_option("--out", config.out, "output file (default stdout)");
    };

    auto* extract = app.add_subcommand("extract", "build a feature store from a manifest");
    auto* query = app.add_subcommand("query", "rank a store against an item or an image");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "ARP/ARR/F-score/ANMRR at one n");
    auto* sweep_cmd = app.add_subcommand("sweep", "metrics for n = 1..n-max");
    auto* compare = app.add_subcommand("compare", "metrics per descriptor variant on one manifest");
    auto* bench = app.add_subcommand("bench", "extraction time and store size per variant");
    for (auto* sub : {extract, query, evaluate_cmd, sweep_cmd, compare, bench}) {
        add_shared(sub);
    }
    query->add_option("--query", config.query, "stored item id to query with");
    query->add_option("--image", config.image, "external PGM/PPM image to query with");
    evaluate_cmd->add_option("--categories-out", config.categories_out, "per-category CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }
    for (auto* sub : app.get_subcommands()) {
        return run_guarded(sub->get_name(), config, out, err);
    }
    return kUsageError;
}

}  // namespace fdlbp::cli
