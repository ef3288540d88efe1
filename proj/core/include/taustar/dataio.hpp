#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "taustar/estimators.hpp"
#include "taustar/population.hpp"

namespace taustar {

/// Two numeric columns, comma or whitespace separated, optional single header
/// line (detected by a non-numeric first row).
PairedSample parse_pairs(std::string_view text);

/// r lines of c nonnegative integer counts, optionally preceded by
/// "rowscores: ..." / "colscores: ..." lines (default scores 1..r, 1..c).
ContingencyTable parse_table(std::string_view text);

/// Header "joint r c real" or "joint r c metric m", then r*c probabilities in
/// row-major order, then the r row values (m reals per point in the metric
/// case) and the c column values (always reals).
JointDistribution parse_joint(std::string_view text);

/// Sample with count_ij copies of (row_score_i, col_score_j), row-major order.
PairedSample expand_table(const ContingencyTable& table);

/// Distinct sorted values as scores, counts by co-occurrence.
ContingencyTable tabulate_sample(const PairedSample& sample);

/// Built-in datasets addressable by name.
struct Fixture {
    std::string name;
    std::variant<ContingencyTable, JointDistribution> payload;
};

Fixture fixture(std::string_view name);  // table1 | table2 | counterexample_r8
std::vector<std::string> fixture_names();

}  // namespace taustar
