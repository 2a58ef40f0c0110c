#include "study_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "corrchange/errors.hpp"

namespace corrchange::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

template <typename T>
T parse_number(const std::string& token, const std::string& key) {
    T value{};
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw InputError("study config: cannot parse '" + token + "' for key '" +
                         key + "'");
    }
    return value;
}

}  // namespace

StudyConfig parse_study_config(std::istream& in) {
    StudyConfig config;
    bool saw_mc_reps = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InputError("study config line " + std::to_string(line_no) +
                             ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "p") {
            config.p = parse_number<int>(value, key);
        } else if (key == "distribution") {
            if (value == "normal" || value == "N") {
                config.distribution = Distribution::normal;
            } else if (value == "t3" || value == "t") {
                config.distribution = Distribution::student_t3;
            } else {
                throw InputError("study config: unknown distribution '" + value + "'");
            }
        } else if (key == "ma") {
            config.ma = parse_number<double>(value, key);
        } else if (key == "T") {
            config.T_list.clear();
            for (const auto& item : split_list(value)) {
                config.T_list.push_back(parse_number<int>(item, key));
            }
        } else if (key == "delta_rho") {
            config.delta_list.clear();
            for (const auto& item : split_list(value)) {
                config.delta_list.push_back(parse_number<double>(item, key));
            }
        } else if (key == "break_pairs") {
            if (value == "first") {
                config.scope = BreakScope::first_pair;
            } else if (value == "all") {
                config.scope = BreakScope::all_pairs;
            } else {
                throw InputError("study config: break_pairs must be 'first' or 'all'");
            }
        } else if (key == "z0") {
            config.z0 = parse_number<double>(value, key);
        } else if (key == "mc_reps") {
            config.mc_reps = parse_number<int>(value, key);
            saw_mc_reps = true;
        } else if (key == "B") {
            config.bootstrap_B = parse_number<int>(value, key);
        } else if (key == "block_length") {
            if (!value.empty()) config.block_length = parse_number<int>(value, key);
        } else if (key == "alpha") {
            config.alpha = parse_number<double>(value, key);
        } else if (key == "seed") {
            config.seed = parse_number<std::uint64_t>(value, key);
        } else if (key == "grid") {
            config.grid_n = parse_number<int>(value, key);
        } else if (key == "paths") {
            config.paths = parse_number<std::int64_t>(value, key);
        } else {
            throw InputError("study config: unknown key '" + key + "'");
        }
    }

    if (config.T_list.empty()) throw InputError("study config: T list is required");
    if (config.delta_list.empty()) config.delta_list.push_back(0.0);
    if (!saw_mc_reps || config.mc_reps < 1) {
        throw InputError("study config: mc_reps >= 1 is required");
    }
    if (config.p < 2) throw InputError("study config: p must be >= 2");
    if (!(config.z0 > 0.0) || !(config.z0 < 1.0)) {
        throw InputError("study config: z0 must lie in (0, 1)");
    }
    return config;
}

StudyConfig parse_study_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open study config: " + path.string());
    return parse_study_config(in);
}

void run_study(const StudyConfig& config, std::ostream& out,
               const std::optional<std::filesystem::path>& cache_dir) {
    const int d = config.p * (config.p - 1) / 2;
    const QuantileTable table =
        cached_sup_l1_bridges(d, config.grid_n, config.paths,
                              mix_seed(config.seed, kDomainBridges), cache_dir);

    out << "ma,distribution,delta_rho,pairs,T,rate,mc_se\n";
    std::uint64_t row = 0;
    for (const double delta : config.delta_list) {
        for (const int T : config.T_list) {
            DgpSpec dgp;
            dgp.p = config.p;
            dgp.distribution = config.distribution;
            dgp.ma_coefficient = config.ma;
            dgp.T = T;
            dgp.seed = mix_seed(config.seed, 2 * row);

            std::optional<BreakSpec> brk;
            if (delta != 0.0) {
                BreakSpec spec;
                spec.location = config.z0;
                spec.delta_rho = Eigen::VectorXd::Zero(d);
                if (config.scope == BreakScope::all_pairs) {
                    spec.delta_rho.setConstant(delta);
                } else {
                    spec.delta_rho[0] = delta;
                }
                brk = std::move(spec);
            }

            BootstrapConfig boot;
            boot.block_length = config.block_length.value_or(default_block_length(T));
            boot.replications = config.bootstrap_B;
            boot.seed = mix_seed(config.seed, 2 * row + 1);

            out << config.ma << ','
                << (config.distribution == Distribution::normal ? "N" : "t") << ','
                << delta << ','
                << (config.scope == BreakScope::all_pairs ? "all" : "first") << ','
                << T << ',';
            try {
                const double rate = rejection_study(dgp, brk, config.mc_reps, boot,
                                                    table, config.alpha);
                const double se =
                    std::sqrt(rate * (1.0 - rate) / config.mc_reps);
                char cell[64];
                std::snprintf(cell, sizeof(cell), "%.4f,%.4f", rate, se);
                out << cell << '\n';
            } catch (const NotPositiveDefiniteError&) {
                // the shifted correlation matrix is invalid for this row only
                out << "*,*\n";
            }
            ++row;
        }
    }
}

}  // namespace corrchange::cli
