#include "report_json.hpp"

namespace corrchange::cli {

namespace {

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::ordered_json report_to_json(const TestReport& report) {
    nlohmann::ordered_json j;
    j["q_raw"] = report.q_raw;
    j["q_std"] = report.q_std;
    j["d"] = report.d;
    j["critical_value"] = report.critical_value;
    j["p_value"] = report.p_value;
    j["reject"] = report.reject;
    j["changepoint_k"] = report.changepoint_k;

    nlohmann::ordered_json process;
    nlohmann::ordered_json ks = nlohmann::ordered_json::array();
    for (int k = 2; k <= report.T; ++k) ks.push_back(k);
    process["k"] = std::move(ks);
    process["raw"] = vector_to_json(report.raw_process);
    process["standardized"] = vector_to_json(report.process.values);
    process["pairs"] = report.pair_names;
    process["per_pair"] = matrix_to_json(report.per_pair.transpose());
    j["process"] = std::move(process);

    nlohmann::ordered_json e_hat;
    e_hat["d"] = report.e_hat.d;
    e_hat["block_length"] = report.e_hat.meta.block_length;
    e_hat["replications"] = report.e_hat.meta.replications;
    e_hat["matrix"] = matrix_to_json(report.e_hat.m);
    j["e_hat"] = std::move(e_hat);

    nlohmann::ordered_json config;
    config["T"] = report.T;
    config["block_length"] = report.block_length;
    config["bootstrap_B"] = report.config.bootstrap_B;
    config["seed"] = report.config.seed;
    config["alpha"] = report.config.alpha;
    config["grid_n"] = report.config.grid_n;
    config["paths"] = report.config.paths;
    j["config"] = std::move(config);

    return j;
}

std::string report_to_string(const TestReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

}  // namespace corrchange::cli
