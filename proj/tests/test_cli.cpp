#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "corrchange/errors.hpp"
#include "corrchange/sim.hpp"
#include "corrchange/test_runner.hpp"
#include "ingest.hpp"
#include "report_json.hpp"
#include "study_config.hpp"

using namespace corrchange;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("ingest: returns mode pass-through") {
    const auto path = write_temp("cc_returns.csv",
                                 "a,b\n"
                                 "0.1,0.2\n0.3,-0.1\n-0.2,0.4\n0.0,0.1\n"
                                 "0.2,-0.3\n-0.1,0.2\n0.4,0.0\n-0.3,0.1\n"
                                 "0.1,-0.2\n0.2,0.3\n");
    cli::InputSpec spec;
    spec.path = path;
    Panel panel = cli::ingest(spec);
    REQUIRE(panel.rows() == 10);
    REQUIRE(panel.cols() == 2);
    REQUIRE(panel.labels == std::vector<std::string>{"a", "b"});
    REQUIRE(panel.data(0, 1) == 0.2);
}

TEST_CASE("ingest: prices mode takes log returns") {
    const double e = std::exp(1.0);
    std::ostringstream csv;
    csv << "p,q\n";
    csv << 1.0 << ',' << 2.0 << '\n';
    csv << e << ',' << 2.0 * e << '\n';
    csv << e * e << ',' << 2.0 * e * e << '\n';
    csv << e * e * e << ',' << 2.0 * e * e * e << '\n';
    const auto path = write_temp("cc_prices.csv", csv.str());

    cli::InputSpec spec;
    spec.path = path;
    spec.mode = cli::IngestMode::prices;
    Panel panel = cli::ingest(spec);
    REQUIRE(panel.rows() == 3);
    for (int r = 0; r < 3; ++r) {
        REQUIRE(panel.data(r, 0) == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(panel.data(r, 1) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("ingest: column selection by label and index") {
    const auto path = write_temp("cc_cols.csv",
                                 "Total,Sanofi,Siemens,BASF\n"
                                 "1,2,3,4\n5,6,7,8\n9,10,11,12\n13,14,15,16\n");
    cli::InputSpec spec;
    spec.path = path;
    spec.columns = {"Sanofi", "BASF"};
    Panel panel = cli::ingest(spec);
    REQUIRE(panel.labels == std::vector<std::string>{"Sanofi", "BASF"});
    REQUIRE(panel.data(1, 0) == 6.0);
    REQUIRE(panel.data(1, 1) == 8.0);

    cli::InputSpec by_index;
    by_index.path = path;
    by_index.columns = {"3", "1"};
    Panel swapped = cli::ingest(by_index);
    REQUIRE(swapped.labels == std::vector<std::string>{"Siemens", "Total"});
    REQUIRE(swapped.data(0, 0) == 3.0);
    REQUIRE(swapped.data(0, 1) == 1.0);

    cli::InputSpec unknown;
    unknown.path = path;
    unknown.columns = {"Nokia", "BASF"};
    REQUIRE_THROWS_AS(cli::ingest(unknown), InputError);

    cli::InputSpec too_few;
    too_few.path = path;
    too_few.columns = {"BASF"};
    REQUIRE_THROWS_AS(cli::ingest(too_few), InputError);
}

TEST_CASE("ingest: date column passes through as row labels") {
    const auto path = write_temp("cc_dates.csv",
                                 "date,a,b\n"
                                 "2008-01-02,0.1,0.4\n"
                                 "2008-01-03,0.2,0.3\n"
                                 "2008-01-04,-0.1,0.2\n"
                                 "2008-01-07,0.3,-0.2\n");
    cli::InputSpec spec;
    spec.path = path;
    Panel panel = cli::ingest(spec);
    REQUIRE(panel.cols() == 2);
    REQUIRE(panel.labels == std::vector<std::string>{"a", "b"});
    REQUIRE(panel.row_labels.size() == 4);
    REQUIRE(panel.row_labels[0] == "2008-01-02");
    REQUIRE(panel.data(0, 0) == 0.1);

    // dates flow into the rolling output's first column
    const auto rolling = cli::rolling_correlations(panel, 3);
    REQUIRE(rolling.starts.size() == 2);
    REQUIRE(rolling.starts[0] == "2008-01-02");
    REQUIRE(rolling.starts[1] == "2008-01-03");
}

TEST_CASE("ingest: errors carry row numbers") {
    const auto ragged = write_temp("cc_ragged.csv", "a,b\n1,2\n3\n4,5\n6,7\n");
    cli::InputSpec spec;
    spec.path = ragged;
    REQUIRE_THROWS_WITH(cli::ingest(spec), Catch::Matchers::ContainsSubstring("row 3"));

    const auto bad_cell = write_temp("cc_badcell.csv", "a,b\n1,2\n3,x\n4,5\n5,6\n");
    spec.path = bad_cell;
    REQUIRE_THROWS_WITH(cli::ingest(spec), Catch::Matchers::ContainsSubstring("row 3"));

    const auto neg_price = write_temp("cc_negprice.csv", "a,b\n1,2\n3,-4\n4,5\n5,6\n");
    spec.path = neg_price;
    spec.mode = cli::IngestMode::prices;
    REQUIRE_THROWS_WITH(cli::ingest(spec), Catch::Matchers::ContainsSubstring("row 3"));

    cli::InputSpec missing;
    missing.path = "/nonexistent/file.csv";
    REQUIRE_THROWS_AS(cli::ingest(missing), InputError);

    const auto tiny = write_temp("cc_tiny.csv", "a,b\n1,2\n3,4\n");
    cli::InputSpec small;
    small.path = tiny;
    REQUIRE_THROWS_AS(cli::ingest(small), InputError);
}

TEST_CASE("rolling correlations: boundary and row count") {
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    const int T = 60;
    Eigen::MatrixXd data(T, 2);
    for (int t = 0; t < T; ++t) {
        data(t, 0) = dist(rng);
        data(t, 1) = 0.6 * data(t, 0) + 0.8 * dist(rng);
    }
    Panel panel = make_panel(data);

    const auto full = cli::rolling_correlations(panel, T);
    REQUIRE(full.values.rows() == 1);
    const Eigen::VectorXd ref = full_correlations(panel);
    REQUIRE(full.values(0, 0) == Catch::Approx(ref[0]).margin(1e-12));

    const auto windows = cli::rolling_correlations(panel, 20);
    REQUIRE(windows.values.rows() == T - 20 + 1);
    REQUIRE(windows.starts.front() == "1");
    REQUIRE_THROWS_AS(cli::rolling_correlations(panel, T + 1), InputError);
}

TEST_CASE("rolling correlations: level shift is visible across a break") {
    DgpSpec dgp;
    dgp.p = 2;
    dgp.T = 1200;
    BreakSpec brk;
    brk.delta_rho = Eigen::VectorXd::Constant(1, 0.7);
    Rng rng = make_stream(77, 0);
    Panel panel = generate(dgp, brk, rng);

    const auto rolling = cli::rolling_correlations(panel, 120);
    const double before = rolling.values.col(0).head(200).mean();
    const double after = rolling.values.col(0).tail(200).mean();
    REQUIRE(before == Catch::Approx(0.0).margin(0.15));
    REQUIRE(after == Catch::Approx(0.7).margin(0.15));
}

TEST_CASE("report JSON: schema and determinism") {
    DgpSpec dgp;
    dgp.p = 2;
    dgp.T = 60;
    Rng rng = make_stream(123, 0);
    Panel panel = generate(dgp, std::nullopt, rng);

    TestOptions options;
    options.bootstrap_B = 49;
    options.seed = 7;
    options.grid_n = 200;
    options.paths = 2000;

    const TestReport report = run_correlation_test(panel, options);
    const auto j = cli::report_to_json(report);

    const std::vector<std::string> keys = {"q_raw",   "q_std",        "d",
                                           "critical_value", "p_value", "reject",
                                           "changepoint_k",  "process", "e_hat",
                                           "config"};
    REQUIRE(j.size() == keys.size());
    for (const auto& key : keys) REQUIRE(j.contains(key));
    REQUIRE(j["d"] == 1);
    REQUIRE(j["process"]["k"].size() == 59);
    REQUIRE(j["process"]["raw"].size() == 59);
    REQUIRE(j["process"]["standardized"].size() == 59);
    REQUIRE(j["process"]["per_pair"].size() == 1);
    REQUIRE(j["e_hat"]["matrix"].size() == 1);
    REQUIRE(j["config"]["bootstrap_B"] == 49);

    const TestReport again = run_correlation_test(panel, options);
    REQUIRE(cli::report_to_string(report) == cli::report_to_string(again));

    REQUIRE(report.reject == (report.q_std > report.critical_value));
}

TEST_CASE("report JSON: golden file") {
    // a fully pinned configuration; any change to the pipeline's numbers or
    // the report layout must be deliberate
    DgpSpec dgp;
    dgp.p = 3;
    dgp.T = 24;
    Rng rng = make_stream(2024, 0);
    Panel panel = generate(dgp, std::nullopt, rng);

    TestOptions options;
    options.bootstrap_B = 19;
    options.seed = 11;
    options.grid_n = 100;
    options.paths = 500;

    const std::string produced =
        cli::report_to_string(run_correlation_test(panel, options));

    const fs::path golden_path = fs::path(CORRCHANGE_TEST_DATA_DIR) / "golden_report.json";
    if (const char* update = std::getenv("CORRCHANGE_UPDATE_GOLDEN");
        update && std::string(update) == "1") {
        std::ofstream out(golden_path);
        out << produced;
    }
    std::ifstream in(golden_path);
    REQUIRE(in);
    std::stringstream buffer;
    buffer << in.rdbuf();
    REQUIRE(produced == buffer.str());
}

TEST_CASE("pipeline rejects on a clear mid-sample break") {
    DgpSpec dgp;
    dgp.p = 4;
    dgp.T = 1414;
    BreakSpec brk;
    brk.delta_rho = Eigen::VectorXd::Constant(6, 0.35);
    brk.location = 0.42;  // break near t = 600
    Rng rng = make_stream(606, 0);
    Panel panel = generate(dgp, brk, rng);

    TestOptions options;
    options.seed = 607;
    options.grid_n = 300;
    options.paths = 2000;
    const TestReport report = run_correlation_test(panel, options);
    REQUIRE(report.reject);
    REQUIRE(report.p_value < 0.01);
    REQUIRE(report.changepoint_k > 400);
    REQUIRE(report.changepoint_k < 800);
}

TEST_CASE("pipeline surfaces degeneracy with the failing stage") {
    std::mt19937 rng(8);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd data(40, 2);
    for (int t = 0; t < 40; ++t) {
        data(t, 0) = dist(rng);
        data(t, 1) = data(t, 0);  // duplicated column: zero bootstrap variance
    }
    TestOptions options;
    options.bootstrap_B = 19;
    options.grid_n = 100;
    options.paths = 500;
    try {
        run_correlation_test(make_panel(data), options);
        FAIL("expected NotPositiveDefiniteError");
    } catch (const NotPositiveDefiniteError& e) {
        REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("standardization"));
    }
}

TEST_CASE("study config parsing") {
    std::istringstream good(
        "# comment\n"
        "p = 2\n"
        "distribution = normal\n"
        "ma = 0.1\n"
        "T = 100, 200\n"
        "delta_rho = 0, 0.4\n"
        "break_pairs = first\n"
        "mc_reps = 10\n"
        "B = 49\n"
        "alpha = 0.05\n"
        "seed = 9\n"
        "grid = 200\n"
        "paths = 2000\n");
    const auto config = cli::parse_study_config(good);
    REQUIRE(config.p == 2);
    REQUIRE(config.ma == 0.1);
    REQUIRE(config.T_list == std::vector<int>{100, 200});
    REQUIRE(config.delta_list == std::vector<double>{0.0, 0.4});
    REQUIRE(config.mc_reps == 10);

    std::istringstream unknown("p = 2\nT = 100\nmc_reps = 5\nbogus = 1\n");
    REQUIRE_THROWS_AS(cli::parse_study_config(unknown), InputError);

    std::istringstream no_reps("p = 2\nT = 100\n");
    REQUIRE_THROWS_AS(cli::parse_study_config(no_reps), InputError);

    std::istringstream zero_reps("p = 2\nT = 100\nmc_reps = 0\n");
    REQUIRE_THROWS_AS(cli::parse_study_config(zero_reps), InputError);
}

TEST_CASE("study run emits rows, with * for non-PD breaks") {
    std::istringstream config_text(
        "p = 4\n"
        "T = 60\n"
        "delta_rho = -0.4\n"
        "break_pairs = all\n"
        "mc_reps = 2\n"
        "B = 19\n"
        "grid = 100\n"
        "paths = 500\n"
        "seed = 3\n");
    const auto config = cli::parse_study_config(config_text);
    std::ostringstream out;
    cli::run_study(config, out, std::nullopt);

    std::istringstream lines(out.str());
    std::string header, row;
    REQUIRE(std::getline(lines, header));
    REQUIRE(header == "ma,distribution,delta_rho,pairs,T,rate,mc_se");
    REQUIRE(std::getline(lines, row));
    REQUIRE_THAT(row, Catch::Matchers::ContainsSubstring("*"));

    std::istringstream null_config(
        "p = 2\nT = 60\ndelta_rho = 0\nmc_reps = 3\nB = 19\ngrid = 100\n"
        "paths = 500\nseed = 4\n");
    std::ostringstream out2;
    cli::run_study(cli::parse_study_config(null_config), out2, std::nullopt);
    std::istringstream lines2(out2.str());
    std::getline(lines2, header);
    REQUIRE(std::getline(lines2, row));
    REQUIRE_THAT(row, Catch::Matchers::StartsWith("0,N,0,first,60,"));
}
