#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "ppp/bracket_eval.hpp"
#include "ppp/regression.hpp"
#include "ppp/treebank.hpp"
#include "ppp/tsv.hpp"

namespace ppp::cli {

// Creates the parent directory first.
void write_output(const std::filesystem::path& path, std::string_view content);

std::string fixed(double value, int decimals);
// Left-aligned columns separated by two spaces.
std::string align(const std::vector<std::vector<std::string>>& rows);

// Trees of one file, lowercased when asked.
std::vector<Tree> load_trees(const std::filesystem::path& path, Casing casing);

ScoringOptions scoring_options(const Config& config);

// "key: value" comments written next to the provenance line of a TSV.
std::string comment_value(const TsvTable& table, std::string_view key);

// One result row in the layout "Setting Parser #dimI Model #dim r RMSE MAE RAE".
std::vector<std::string> result_header();
std::vector<std::string> result_row(const std::string& setting, const std::string& parser, std::size_t dim_initial,
                                    const std::string& model, std::size_t dim, const EvalReport& report, bool exact);

}  // namespace ppp::cli
