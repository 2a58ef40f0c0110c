#include "ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "corrchange/errors.hpp"

namespace corrchange::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

bool parse_double(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !field.empty();
}

[[noreturn]] void fail_row(std::size_t line_no, const std::string& what) {
    throw InputError("row " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Panel ingest(const InputSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) {
        throw InputError("cannot open input file: " + spec.path.string());
    }

    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = spec.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line, spec.delimiter);
        if (header_pending) {
            header = std::move(fields);
            header_pending = false;
            continue;
        }
        rows.push_back(std::move(fields));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw InputError("no data rows in " + spec.path.string());

    const std::size_t width = rows.front().size();
    // a non-numeric leading field on the first data row marks a date column
    double probe = 0.0;
    const bool has_dates = !parse_double(rows.front().front(), probe);
    const std::size_t data_cols = width - (has_dates ? 1 : 0);
    if (data_cols < 1) fail_row(line_numbers.front(), "no numeric columns");

    std::vector<std::string> labels;
    if (!header.empty()) {
        if (header.size() != width) {
            throw InputError("header has " + std::to_string(header.size()) +
                             " fields but data rows have " + std::to_string(width));
        }
        labels.assign(header.begin() + (has_dates ? 1 : 0), header.end());
    } else {
        for (std::size_t j = 0; j < data_cols; ++j) {
            labels.push_back("X" + std::to_string(j + 1));
        }
    }

    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(data_cols));
    std::vector<std::string> dates;
    if (has_dates) dates.reserve(rows.size());

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& fields = rows[r];
        if (fields.size() != width) {
            fail_row(line_numbers[r], "expected " + std::to_string(width) +
                                          " fields, got " + std::to_string(fields.size()));
        }
        if (has_dates) dates.push_back(fields.front());
        for (std::size_t j = 0; j < data_cols; ++j) {
            double value = 0.0;
            const auto& field = fields[j + (has_dates ? 1 : 0)];
            if (!parse_double(field, value)) {
                fail_row(line_numbers[r], "cannot parse '" + field + "' as a number");
            }
            if (!std::isfinite(value)) {
                fail_row(line_numbers[r], "non-finite value '" + field + "'");
            }
            data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = value;
        }
    }

    // column selection: header labels first, then 1-based indices
    std::vector<Eigen::Index> selected;
    if (spec.columns.empty()) {
        for (std::size_t j = 0; j < data_cols; ++j) {
            selected.push_back(static_cast<Eigen::Index>(j));
        }
    } else {
        for (const auto& token : spec.columns) {
            const auto by_label = std::find(labels.begin(), labels.end(), token);
            if (by_label != labels.end()) {
                selected.push_back(by_label - labels.begin());
                continue;
            }
            int index = 0;
            const auto [ptr, ec] =
                std::from_chars(token.data(), token.data() + token.size(), index);
            if (ec != std::errc() || ptr != token.data() + token.size()) {
                throw InputError("unknown column '" + token + "'");
            }
            if (index < 1 || static_cast<std::size_t>(index) > data_cols) {
                throw InputError("column index " + token + " out of range [1, " +
                                 std::to_string(data_cols) + "]");
            }
            selected.push_back(index - 1);
        }
    }
    if (selected.size() < 2) {
        throw InputError("need at least 2 selected columns, got " +
                         std::to_string(selected.size()));
    }

    Eigen::MatrixXd picked(data.rows(), static_cast<Eigen::Index>(selected.size()));
    std::vector<std::string> picked_labels;
    for (std::size_t j = 0; j < selected.size(); ++j) {
        picked.col(static_cast<Eigen::Index>(j)) = data.col(selected[j]);
        picked_labels.push_back(labels[static_cast<std::size_t>(selected[j])]);
    }

    if (spec.mode == IngestMode::prices) {
        for (Eigen::Index r = 0; r < picked.rows(); ++r) {
            for (Eigen::Index j = 0; j < picked.cols(); ++j) {
                if (!(picked(r, j) > 0.0)) {
                    fail_row(line_numbers[static_cast<std::size_t>(r)],
                             "price must be positive in prices mode");
                }
            }
        }
        if (picked.rows() < 4) {
            throw InputError("prices mode needs at least 4 rows for 3 returns");
        }
        Eigen::MatrixXd returns(picked.rows() - 1, picked.cols());
        for (Eigen::Index r = 1; r < picked.rows(); ++r) {
            returns.row(r - 1) =
                (picked.row(r).array() / picked.row(r - 1).array()).log();
        }
        picked = std::move(returns);
        if (has_dates) dates.erase(dates.begin());
    }

    if (picked.rows() < 3) {
        throw InputError("fewer than 3 usable rows");
    }

    Panel panel = make_panel(std::move(picked), std::move(picked_labels));
    panel.row_labels = std::move(dates);
    return panel;
}

RollingCorrelations rolling_correlations(const Panel& panel, int window) {
    check_panel(panel);
    const int T = static_cast<int>(panel.rows());
    if (window < 3) throw InputError("window must be >= 3");
    if (window > T) {
        throw InputError("window " + std::to_string(window) + " exceeds T = " +
                         std::to_string(T));
    }

    const PairIndex pairs(static_cast<int>(panel.cols()));
    const int n_windows = T - window + 1;

    RollingCorrelations out;
    out.pair_names = pair_labels(panel);
    out.values.resize(n_windows, pairs.d());
    out.starts.reserve(static_cast<std::size_t>(n_windows));

    for (int start = 0; start < n_windows; ++start) {
        out.starts.push_back(panel.row_labels.empty()
                                 ? std::to_string(start + 1)
                                 : panel.row_labels[static_cast<std::size_t>(start)]);
        const auto block = panel.data.middleRows(start, window);
        const Eigen::RowVectorXd mean = block.colwise().mean();
        for (int c = 0; c < pairs.d(); ++c) {
            const auto& [i, j] = pairs.pairs()[c];
            const Eigen::ArrayXd di = block.col(i).array() - mean[i];
            const Eigen::ArrayXd dj = block.col(j).array() - mean[j];
            const double denom = std::sqrt(di.square().sum() * dj.square().sum());
            out.values(start, c) =
                denom > 0.0 ? (di * dj).sum() / denom
                            : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

void write_rolling_csv(std::ostream& out, const RollingCorrelations& rolling) {
    out << "start";
    for (const auto& name : rolling.pair_names) out << ',' << name;
    out << '\n';
    out.precision(10);
    for (Eigen::Index r = 0; r < rolling.values.rows(); ++r) {
        out << rolling.starts[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < rolling.values.cols(); ++c) {
            out << ',' << rolling.values(r, c);
        }
        out << '\n';
    }
}

}  // namespace corrchange::cli
