#include "taustar/dataio.hpp"

#include <charconv>
#include <string>

#include "taustar/errors.hpp"

namespace taustar {

namespace {

struct Token {
    std::string text;
    std::size_t line;
};

// std::from_chars is locale-independent: the decimal separator is always '.'
bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !s.empty();
}

bool parse_int(const std::string& s, std::int64_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !s.empty();
}

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// nonempty lines with their 1-based numbers
std::vector<std::pair<std::vector<std::string>, std::size_t>> tokenized_lines(
    std::string_view text) {
    std::vector<std::pair<std::vector<std::string>, std::size_t>> out;
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t stop = text.find('\n', start);
        const std::string_view line =
            text.substr(start, stop == std::string_view::npos ? std::string_view::npos
                                                              : stop - start);
        ++lineno;
        auto tokens = split_line(line);
        if (!tokens.empty()) out.emplace_back(std::move(tokens), lineno);
        if (stop == std::string_view::npos) break;
        start = stop + 1;
    }
    return out;
}

std::vector<Token> flatten(
    const std::vector<std::pair<std::vector<std::string>, std::size_t>>& lines,
    std::size_t first_line_index) {
    std::vector<Token> out;
    for (std::size_t li = first_line_index; li < lines.size(); ++li) {
        for (const auto& t : lines[li].first) out.push_back({t, lines[li].second});
    }
    return out;
}

}  // namespace

PairedSample parse_pairs(std::string_view text) {
    const auto lines = tokenized_lines(text);
    if (lines.empty()) throw parse_error("no data rows", 1);
    std::size_t first = 0;
    {
        // a non-numeric first row is a header
        double ignored;
        bool numeric = true;
        for (const auto& tok : lines[0].first) {
            if (!parse_double(tok, ignored)) {
                numeric = false;
                break;
            }
        }
        if (!numeric) first = 1;
    }
    if (first >= lines.size()) throw parse_error("no data rows", lines[0].second);
    PairedSample sample;
    for (std::size_t li = first; li < lines.size(); ++li) {
        const auto& [tokens, lineno] = lines[li];
        if (tokens.size() != 2) {
            throw parse_error("expected two columns, got " + std::to_string(tokens.size()),
                              lineno);
        }
        double x, y;
        if (!parse_double(tokens[0], x) || !parse_double(tokens[1], y)) {
            throw parse_error("non-numeric cell", lineno);
        }
        sample.xs.push_back(x);
        sample.ys.push_back(y);
    }
    validate_sample(sample);
    return sample;
}

ContingencyTable parse_table(std::string_view text) {
    const auto lines = tokenized_lines(text);
    std::vector<double> row_scores, col_scores;
    std::size_t row_scores_line = 0, col_scores_line = 0;
    std::size_t first = 0;
    for (; first < lines.size(); ++first) {
        const auto& [tokens, lineno] = lines[first];
        const bool is_rows = tokens[0] == "rowscores:";
        const bool is_cols = tokens[0] == "colscores:";
        if (!is_rows && !is_cols) break;
        auto& dst = is_rows ? row_scores : col_scores;
        (is_rows ? row_scores_line : col_scores_line) = lineno;
        if (!dst.empty()) throw parse_error("duplicate score line", lineno);
        for (std::size_t t = 1; t < tokens.size(); ++t) {
            double v;
            if (!parse_double(tokens[t], v)) throw parse_error("non-numeric score", lineno);
            dst.push_back(v);
        }
        if (dst.empty()) throw parse_error("empty score line", lineno);
        for (std::size_t t = 1; t < dst.size(); ++t) {
            if (dst[t] <= dst[t - 1]) {
                throw parse_error("scores must be strictly increasing", lineno);
            }
        }
    }
    if (first >= lines.size()) {
        throw parse_error("no count rows", lines.empty() ? 1 : lines.back().second);
    }
    std::vector<std::int64_t> counts;
    std::size_t cols = 0, rows = 0;
    for (std::size_t li = first; li < lines.size(); ++li) {
        const auto& [tokens, lineno] = lines[li];
        if (cols == 0) {
            cols = tokens.size();
        } else if (tokens.size() != cols) {
            throw parse_error("ragged row: expected " + std::to_string(cols) + " counts",
                              lineno);
        }
        for (const auto& tok : tokens) {
            std::int64_t v;
            if (!parse_int(tok, v)) throw parse_error("non-integer count", lineno);
            if (v < 0) throw parse_error("negative count", lineno);
            counts.push_back(v);
        }
        ++rows;
    }
    if (!row_scores.empty() && row_scores.size() != rows) {
        throw parse_error("rowscores: expected " + std::to_string(rows) + " values",
                          row_scores_line);
    }
    if (!col_scores.empty() && col_scores.size() != cols) {
        throw parse_error("colscores: expected " + std::to_string(cols) + " values",
                          col_scores_line);
    }
    return make_table(rows, cols, std::move(counts), std::move(row_scores),
                      std::move(col_scores));
}

JointDistribution parse_joint(std::string_view text) {
    const auto lines = tokenized_lines(text);
    if (lines.empty()) throw parse_error("empty joint file", 1);
    const auto& [header, header_line] = lines[0];
    if (header.size() < 4 || header[0] != "joint") {
        throw parse_error("expected header: joint r c [real|metric m]", header_line);
    }
    std::int64_t r64, c64;
    if (!parse_int(header[1], r64) || !parse_int(header[2], c64) || r64 < 1 || c64 < 1) {
        throw parse_error("invalid joint dimensions", header_line);
    }
    const auto r = static_cast<std::size_t>(r64);
    const auto c = static_cast<std::size_t>(c64);
    std::size_t dim = 1;
    bool metric = false;
    if (header[3] == "real") {
        if (header.size() != 4) throw parse_error("trailing tokens in header", header_line);
    } else if (header[3] == "metric") {
        std::int64_t m64;
        if (header.size() != 5 || !parse_int(header[4], m64) || m64 < 1) {
            throw parse_error("metric header requires a dimension", header_line);
        }
        metric = true;
        dim = static_cast<std::size_t>(m64);
    } else {
        throw parse_error("value kind must be 'real' or 'metric m'", header_line);
    }

    const auto tokens = flatten(lines, 1);
    const std::size_t need = r * c + (metric ? r * dim : r) + c;
    if (tokens.size() != need) {
        throw parse_error("expected " + std::to_string(need) + " values after the header, got " +
                              std::to_string(tokens.size()),
                          tokens.empty() ? header_line : tokens.back().line);
    }
    std::size_t pos = 0;
    auto next_double = [&](const char* what) {
        double v;
        if (!parse_double(tokens[pos].text, v)) {
            throw parse_error(std::string("non-numeric ") + what, tokens[pos].line);
        }
        ++pos;
        return v;
    };
    std::vector<double> probs(r * c);
    for (auto& p : probs) p = next_double("probability");
    if (metric) {
        std::vector<std::vector<double>> points(r, std::vector<double>(dim));
        for (auto& pt : points) {
            for (auto& v : pt) v = next_double("row value");
        }
        std::vector<double> col_scores(c);
        for (auto& v : col_scores) v = next_double("column value");
        return make_joint_metric_rows(r, c, std::move(probs), std::move(points),
                                      std::move(col_scores));
    }
    std::vector<double> row_scores(r);
    for (auto& v : row_scores) v = next_double("row value");
    std::vector<double> col_scores(c);
    for (auto& v : col_scores) v = next_double("column value");
    return make_joint(r, c, std::move(probs), std::move(row_scores), std::move(col_scores));
}

PairedSample expand_table(const ContingencyTable& table) {
    validate_table(table, true);
    if (table.total() < 1) throw std::invalid_argument("expand_table: empty table");
    PairedSample sample;
    sample.xs.reserve(static_cast<std::size_t>(table.total()));
    sample.ys.reserve(static_cast<std::size_t>(table.total()));
    for (std::size_t i = 0; i < table.rows; ++i) {
        for (std::size_t j = 0; j < table.cols; ++j) {
            for (std::int64_t k = 0; k < table.at(i, j); ++k) {
                sample.xs.push_back(table.row_scores[i]);
                sample.ys.push_back(table.col_scores[j]);
            }
        }
    }
    return sample;
}

ContingencyTable tabulate_sample(const PairedSample& sample) {
    return detail::tabulate(sample);
}

Fixture fixture(std::string_view name) {
    if (name == "table1") {
        return Fixture{"table1",
                       make_table(5, 7,
                                  {2, 1, 0, 0, 0, 1, 2,  //
                                   1, 2, 0, 0, 0, 2, 1,  //
                                   0, 0, 2, 1, 2, 0, 0,  //
                                   0, 0, 1, 1, 1, 0, 0,  //
                                   0, 0, 1, 2, 1, 0, 0})};
    }
    if (name == "table2") {
        return Fixture{"table2", make_table(2, 4,
                                            {6, 4, 10, 12,  //
                                             11, 8, 8, 5})};
    }
    if (name == "counterexample_r8") {
        return Fixture{"counterexample_r8", counterexample_r8()};
    }
    throw std::invalid_argument("unknown fixture: " + std::string(name));
}

std::vector<std::string> fixture_names() {
    return {"table1", "table2", "counterexample_r8"};
}

}  // namespace taustar
