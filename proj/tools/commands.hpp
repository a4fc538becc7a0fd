#pragma once

#include "fdlbp/descriptor.hpp"
#include "fdlbp/similarity.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fdlbp::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kDataError = 2,
    kInternalError = 3,
};

/// Every option a subcommand can read. Defaults reproduce the reference
/// setup: N=8, R=1, two 3-input decoders, chi-square, n=5.
struct RunConfig {
    std::string variant = "fdlbp";  // comma-separated list for compare/bench
    int neighbors = 8;
    int radius = 1;
    std::string sampling = "grid";
    std::vector<std::string> specs = {"(a,hv,d)(a,sv,sh)"};
    std::string measure = "chisq";
    std::size_t n = 5;
    std::size_t n_max = 20;
    std::string manifest;
    std::string root;
    std::string store;
    std::string out;
    std::string categories_out;
    std::string kernels;
    std::string query;
    std::string image;
    bool exclude_query = false;
    bool emd_per_block = false;
    unsigned threads = 1;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat key=value text, one key per line; "spec" may repeat.
std::string to_config_text(const RunConfig& config);
/// Unknown keys and malformed values raise std::invalid_argument. Keys not
/// present keep the values already in `base`.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Descriptor configuration for one variant/spec pair of the run.
DescriptorConfig descriptor_config(const RunConfig& config, const std::string& variant, const std::string& spec);
std::vector<std::string> split_list(const std::string& text);

// Each command writes its primary output to `out` (or the --out file),
// diagnostics to `err`, and returns an ExitCode. Exceptions propagate;
// run_guarded maps them onto exit codes.
int cmd_extract(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_query(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Runs `command` by name, translating exceptions into exit codes:
/// bad options -> 1, data problems -> 2, broken invariants -> 3.
int run_guarded(const std::string& command, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[1] is the subcommand).
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fdlbp::cli
