#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>

#include "cli.hpp"
#include "ppp/errors.hpp"

namespace ppp::cli {

namespace {

struct Command {
  const char* name;
  const char* help;
  std::vector<const char*> keys;  // exposed as --key-with-dashes
  std::function<void(Config&, std::ostream&)> body;
};

const std::vector<Command>& commands() {
  static const std::vector<Command> all = {
      {"synth", "Generate a synthetic treebank with three parsers and a matching config",
       {"out_dir", "seed", "corpus_size", "train_size", "test_size", "noise", "noise_b"}, cmd_synth},
      {"extract", "Extract per-sentence feature tables for every set and parser",
       {"out_dir", "setting", "casing", "workers"}, cmd_extract},
      {"score", "Per-sentence and corpus bracketing F1", {"gold", "test", "out", "casing", "labeled"}, cmd_score},
      {"cf1", "Comparative F1 of each parser against the others", {"parsers", "out", "casing", "labeled"}, cmd_cf1},
      {"train", "Select and fit a performance predictor",
       {"features", "model", "kinds", "preprocessing", "threads", "report"}, cmd_train},
      {"predict", "Predict scores for a feature table", {"features", "model", "out"}, cmd_predict},
      {"evaluate", "Score a model on a feature table with targets", {"features", "model", "out"}, cmd_evaluate},
      {"plan", "Confidence half-width and required sample sizes per RAE level",
       {"n", "mu", "s", "alpha", "rae", "mad", "targets", "published", "rule", "out"}, cmd_plan},
      {"treestats", "Corpus means of the bracketing tree statistics", {"trees", "name", "out", "casing"}, cmd_treestats},
  };
  return all;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int report(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << "error: " << kind << ": " << one_line(message) << "\n";
  return code;
}

int exit_code(const Error& e) {
  const std::string k = e.kind();
  if (k == "argument") return kArgument;
  if (k == "io") return kIo;
  if (k == "parse") return kParse;
  if (k == "yield-mismatch") return kYieldMismatch;
  if (k == "data") return kData;
  if (k == "convergence") return kConvergence;
  return kOther;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parser performance prediction"};
  app.name("ppp");
  app.require_subcommand(1);

  struct Parsed {
    std::string config;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, Parsed> parsed;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    Parsed& p = parsed[c.name];
    sub->add_option("-c,--config", p.config, "key = value config file");
    sub->add_option("--set", p.sets, "Override a config entry, key=value")->allow_extra_args(false);
    for (const char* key : c.keys) {
      std::string flag = std::string("--") + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      p.options[key] = sub->add_option(flag, p.values[key], std::string("Sets config key ") + key);
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report(err, "argument", e.what(), kArgument);
  }

  for (const auto& c : commands()) {
    auto* sub = app.get_subcommand(c.name);
    if (!sub->parsed()) continue;
    try {
      Parsed& p = parsed[c.name];
      Config config;
      if (!p.config.empty()) config.load_file(p.config);
      for (const auto& s : p.sets) config.set_assignment(s);
      for (const auto& [key, opt] : p.options) {
        if (opt->count() > 0) config.set(key, p.values[key]);
      }
      c.body(config, out);
      return kOk;
    } catch (const Error& e) {
      return report(err, e.kind(), e.what(), exit_code(e));
    } catch (const std::filesystem::filesystem_error& e) {
      return report(err, "io", e.what(), kIo);
    } catch (const std::exception& e) {
      return report(err, "error", e.what(), kOther);
    }
  }
  return report(err, "argument", "no subcommand given", kArgument);
}

}  // namespace ppp::cli
