#include "cli.hpp"
#include "common.hpp"
#include "ppp/errors.hpp"
#include "ppp/statbound.hpp"

namespace ppp::cli {

namespace {

SampleSizeRule parse_rule(const std::string& text) {
  if (text == "substitution") return SampleSizeRule::kSubstitution;
  if (text == "smallest") return SampleSizeRule::kSmallestInteger;
  throw ArgumentError("unknown rule '" + text + "' (expected substitution or smallest)");
}

// "1:0.0013,5:0.0067" with RAE in percent.
std::vector<std::pair<double, double>> parse_published(const Config& config) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : config.list("published")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ArgumentError("published entries look like rae:d_hat, got '" + item + "'");
    try {
      out.emplace_back(parse_number(item.substr(0, colon), 1, 1) / 100, parse_number(item.substr(colon + 1), 1, 1));
    } catch (const ParseError&) {
      throw ArgumentError("published entry '" + item + "' is not numeric");
    }
  }
  if (out.empty()) throw ArgumentError("config key 'published' is empty");
  return out;
}

std::vector<double> read_targets(const Config& config) {
  const auto path = config.path("targets");
  const std::string column = config.get("target_column", "target");
  const TsvTable t = parse_tsv(read_file(path));
  const long c = t.column(column);
  if (c < 0) throw DataError(path.string() + " has no column '" + column + "'");
  std::vector<double> y;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    y.push_back(parse_number(t.rows[i][static_cast<std::size_t>(c)], t.comments.size() + 2 + i,
                             static_cast<std::size_t>(c) + 1));
  }
  return y;
}

}  // namespace

void cmd_plan(Config& config, std::ostream& out) {
  SampleStats stats;
  const long n = config.integer("n");
  if (n < 2) throw ArgumentError("n must be >= 2");
  stats.n = static_cast<std::size_t>(n);
  stats.mean = config.number("mu");
  stats.sd = config.number("s");
  stats.alpha = config.number("alpha", 0.05);
  stats.validate();
  const auto percents = config.numbers("rae", {1, 5, 10, 20, 30, 40, 50, 75, 80, 85});
  const SampleSizeRule rule = parse_rule(config.get("rule", "substitution"));

  double mad = 0;
  std::string mad_source;
  if (config.has("mad")) {
    mad = config.number("mad");
    mad_source = "given";
  } else if (config.has("targets")) {
    mad = mad_from_targets(read_targets(config));
    mad_source = "targets";
  } else if (config.has("published")) {
    mad = mad_from_published(parse_published(config), config.number("precision", 1e-4));
    mad_source = "published";
  } else {
    throw ArgumentError("plan needs one of the keys mad, targets or published");
  }
  const auto out_path = config.has("out") ? std::optional(config.output_path("out")) : std::nullopt;
  const std::string prov = provenance("plan", config.hash());

  std::vector<double> levels;
  for (double p : percents) levels.push_back(p / 100);
  const BoundTable table = bound_table(stats, mad, levels, rule);
  const double ratio = snr(stats);

  TsvTable t;
  t.comments = {prov,
                "n: " + std::to_string(stats.n),
                "mean: " + format_number(stats.mean),
                "s: " + format_number(stats.sd),
                "alpha: " + format_number(stats.alpha),
                "d: " + format_number(table.d),
                "mad: " + format_number(mad) + " (" + mad_source + ")",
                "snr: " + format_number(ratio)};
  t.header = {"rae_percent", "d_hat", "n_hat", "n_exact", "decades_per_point"};
  std::vector<std::vector<std::string>> text{{"RAE", "d_hat", "n_hat"}};
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const BoundRow& r = table.rows[i];
    t.rows.push_back({format_number(percents[i]), format_number(r.d_hat), std::to_string(r.n_hat),
                      format_number(r.n_exact),
                      i < table.decades_per_point.size() ? format_number(table.decades_per_point[i]) : "NA"});
    text.push_back({format_number(percents[i]) + "%", fixed(r.d_hat, 4), std::to_string(r.n_hat)});
  }
  if (out_path) write_output(*out_path, write_tsv(t));
  out << "n " << stats.n << "  mean " << format_number(stats.mean) << "  s " << format_number(stats.sd) << "  alpha "
      << format_number(stats.alpha) << "\n"
      << "d " << fixed(table.d, 4) << "  MAD " << fixed(mad, 4) << "  SNR " << fixed(ratio, 3) << "\n"
      << align(text);
}

}  // namespace ppp::cli
