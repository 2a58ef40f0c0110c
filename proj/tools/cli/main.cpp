// Command-line frontend: `test` runs the correlation constancy test on a
// delimited file, `rolling` emits rolling pairwise correlations, `critical`
// prints limit-law critical values, `study` runs Monte Carlo rejection
// studies from a config file.
//
// Exit codes: 0 = ran (whatever the statistical decision), 2 = input error,
// 3 = numerical degeneracy.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "corrchange/errors.hpp"
#include "corrchange/limit.hpp"
#include "corrchange/rng.hpp"
#include "corrchange/test_runner.hpp"
#include "ingest.hpp"
#include "report_json.hpp"
#include "study_config.hpp"

namespace {

using namespace corrchange;

struct IngestFlags {
    std::string path;
    std::string mode = "returns";
    std::string delimiter = ",";
    bool no_header = false;
    std::string columns;
};

void add_ingest_flags(CLI::App* cmd, IngestFlags& flags) {
    cmd->add_option("input", flags.path, "Delimited input file")->required();
    cmd->add_option("--mode", flags.mode, "Input mode: returns | prices")
        ->check(CLI::IsMember({"returns", "prices"}))
        ->capture_default_str();
    cmd->add_option("--delimiter", flags.delimiter, "Field delimiter")
        ->capture_default_str();
    cmd->add_flag("--no-header", flags.no_header, "Input has no header row");
    cmd->add_option("--columns", flags.columns,
                    "Comma-separated column labels or 1-based indices");
}

cli::InputSpec to_input_spec(const IngestFlags& flags) {
    cli::InputSpec spec;
    spec.path = flags.path;
    spec.mode = flags.mode == "prices" ? cli::IngestMode::prices
                                       : cli::IngestMode::returns;
    if (flags.delimiter.size() != 1) {
        throw InputError("delimiter must be a single character");
    }
    spec.delimiter = flags.delimiter[0];
    spec.has_header = !flags.no_header;
    if (!flags.columns.empty()) {
        std::stringstream ss(flags.columns);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (!token.empty()) spec.columns.push_back(token);
        }
    }
    return spec;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw InputError("cannot open output file: " + path);
    return file;
}

std::optional<std::filesystem::path> to_cache_dir(const std::string& dir) {
    if (dir.empty()) return std::nullopt;
    return std::filesystem::path(dir);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tests for a constant correlation matrix in multivariate time series"};
    app.require_subcommand(1);

    // --- test ---------------------------------------------------------
    IngestFlags test_input;
    TestOptions test_options;
    int test_block = 0;
    std::string test_cache, test_output;
    CLI::App* cmd_test = app.add_subcommand(
        "test", "Run the correlation constancy test, print a JSON report");
    add_ingest_flags(cmd_test, test_input);
    cmd_test->add_option("--block-length", test_block,
                         "Bootstrap block length (default floor(T^(1/4)))");
    cmd_test->add_option("--bootstrap", test_options.bootstrap_B,
                         "Bootstrap replications B")
        ->capture_default_str();
    cmd_test->add_option("--seed", test_options.seed, "RNG seed")
        ->capture_default_str();
    cmd_test->add_option("--alpha", test_options.alpha, "Significance level")
        ->capture_default_str();
    cmd_test->add_option("--grid", test_options.grid_n,
                         "Brownian bridge grid size")
        ->capture_default_str();
    cmd_test->add_option("--paths", test_options.paths,
                         "Brownian bridge Monte Carlo paths")
        ->capture_default_str();
    cmd_test->add_option("--cache-dir", test_cache,
                         "Directory for cached quantile tables")
        ->envname("CORRCHANGE_CACHE_DIR");
    cmd_test->add_option("-o,--output", test_output, "Write the report here");

    // --- rolling ------------------------------------------------------
    IngestFlags rolling_input;
    int window = 120;
    std::string rolling_output;
    CLI::App* cmd_rolling = app.add_subcommand(
        "rolling", "Rolling pairwise correlations as CSV");
    add_ingest_flags(cmd_rolling, rolling_input);
    cmd_rolling->add_option("--window", window, "Window length")
        ->capture_default_str();
    cmd_rolling->add_option("-o,--output", rolling_output, "Write the CSV here");

    // --- critical -----------------------------------------------------
    int crit_d = 1;
    double crit_alpha = 0.05;
    int crit_grid = 1000;
    std::int64_t crit_paths = 100000;
    std::uint64_t crit_seed = 0;
    std::string crit_cache;
    CLI::App* cmd_critical = app.add_subcommand(
        "critical", "Critical value of sup ||B^d(s)||_1");
    cmd_critical->add_option("-d,--dimension", crit_d, "Number of bridges d")
        ->required();
    cmd_critical->add_option("--alpha", crit_alpha, "Significance level")
        ->capture_default_str();
    cmd_critical->add_option("--grid", crit_grid, "Grid size")
        ->capture_default_str();
    cmd_critical->add_option("--paths", crit_paths, "Monte Carlo paths")
        ->capture_default_str();
    cmd_critical->add_option("--seed", crit_seed, "RNG seed")
        ->capture_default_str();
    cmd_critical->add_option("--cache-dir", crit_cache,
                             "Directory for cached quantile tables")
        ->envname("CORRCHANGE_CACHE_DIR");

    // --- study --------------------------------------------------------
    std::string study_path, study_cache, study_output;
    CLI::App* cmd_study = app.add_subcommand(
        "study", "Monte Carlo size/power study from a config file");
    cmd_study->add_option("config", study_path, "Study config file")->required();
    cmd_study->add_option("--cache-dir", study_cache,
                          "Directory for cached quantile tables")
        ->envname("CORRCHANGE_CACHE_DIR");
    cmd_study->add_option("-o,--output", study_output, "Write the CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_test->parsed()) {
            if (test_block > 0) test_options.block_length = test_block;
            test_options.cache_dir = to_cache_dir(test_cache);
            const Panel panel = cli::ingest(to_input_spec(test_input));
            const TestReport report = run_correlation_test(panel, test_options);
            std::ofstream file;
            open_output(test_output, file) << cli::report_to_string(report);
        } else if (cmd_rolling->parsed()) {
            const Panel panel = cli::ingest(to_input_spec(rolling_input));
            const auto rolling = cli::rolling_correlations(panel, window);
            std::ofstream file;
            cli::write_rolling_csv(open_output(rolling_output, file), rolling);
        } else if (cmd_critical->parsed()) {
            const QuantileTable table = cached_sup_l1_bridges(
                crit_d, crit_grid, crit_paths, crit_seed, to_cache_dir(crit_cache));
            std::printf("%.6f\n", critical_value(table, crit_alpha));
        } else if (cmd_study->parsed()) {
            const auto config = cli::parse_study_config_file(study_path);
            std::ofstream file;
            cli::run_study(config, open_output(study_output, file),
                           to_cache_dir(study_cache));
        }
    } catch (const DegenerateDataError& e) {
        std::cerr << "error (degenerate data): " << e.what() << '\n';
        return 3;
    } catch (const NotPositiveDefiniteError& e) {
        std::cerr << "error (not positive definite): " << e.what() << '\n';
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error (input): " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
