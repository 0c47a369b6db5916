#include <cmath>

#include "cli.hpp"
#include "common.hpp"
#include "ppp/errors.hpp"
#include "ppp/extraction.hpp"

namespace ppp::cli {

namespace fs = std::filesystem;

namespace {

struct FeatureFile {
  Dataset data;
  std::string setting, set, parser;
};

FeatureFile load_features(const fs::path& path) {
  const TsvTable t = parse_tsv(read_file(path));
  FeatureFile f;
  f.setting = comment_value(t, "setting");
  f.set = comment_value(t, "set");
  f.parser = comment_value(t, "parser");
  f.data = dataset_from_tsv(t, f.set.empty() ? path.stem().string() : f.set + ":" + f.parser);
  return f;
}

void require_targets(const Dataset& d, const fs::path& path) {
  for (Eigen::Index i = 0; i < d.y.size(); ++i) {
    if (!std::isfinite(d.y(i))) {
      throw DataError(path.string() + ": row " + std::to_string(i + 1) + " has no finite target");
    }
  }
}

RegressionModel load_model(const fs::path& path) { return model_from_json(read_file(path)); }

}  // namespace

void cmd_train(Config& config, std::ostream& out) {
  config.ignore_in_hash("threads");
  const fs::path features = config.path("features");
  FeatureFile f = load_features(features);
  require_targets(f.data, features);

  PipelineOptions po;
  po.kinds.clear();
  for (const auto& k : config.list("kinds", {"ridge", "tree", "svr"})) po.kinds.push_back(parse_model_kind(k));
  po.preprocessing.clear();
  for (const auto& p : config.list("preprocessing", {"none", "fs", "pls"})) {
    po.preprocessing.push_back(parse_preprocessing(p));
  }
  po.fs.cap = static_cast<std::size_t>(config.integer("fs_cap", static_cast<long>(po.fs.cap)));
  po.max_pls_components = static_cast<int>(config.integer("pls_max", po.max_pls_components));
  po.cv.folds = static_cast<int>(config.integer("folds", po.cv.folds));
  po.fs.cv = po.cv;
  po.svr.tolerance = config.number("svr_tolerance", po.svr.tolerance);
  po.threads = static_cast<unsigned>(config.integer("threads", 0));
  po.setting = config.get("setting", f.setting);
  const std::string parser = config.get("parser", f.parser);
  const fs::path model_path = config.output_path("model");
  const auto report_path = config.has("report") ? std::optional(config.output_path("report")) : std::nullopt;
  const std::string prov = provenance("train", config.hash());

  PipelineResult res = train_pipeline(f.data, po);
  res.model.metadata.provenance = prov;

  TsvTable report;
  report.comments.push_back(prov);
  report.header = {"candidate", "validation_rmse", "selected"};
  std::vector<std::vector<std::string>> rows{{"candidate", "validation RMSE", ""}};
  for (const auto& c : res.candidates) {
    const bool chosen = c.name == res.model.name();
    report.rows.push_back({c.name, format_number(c.validation_rmse), chosen ? "1" : "0"});
    rows.push_back({c.name, fixed(c.validation_rmse, 4), chosen ? "*" : ""});
  }

  write_output(model_path, model_to_json(res.model));
  if (report_path) write_output(*report_path, write_tsv(report));
  out << align(rows);
  const EvalReport fit = evaluate(res.model, f.data);
  out << "training fit\n"
      << align({result_header(),
                result_row(po.setting, parser, f.data.cols(), res.model.name(), res.model.dim(), fit, false)});
  for (const auto& note : res.model.metadata.notes) out << "note: " << note << "\n";
}

void cmd_predict(Config& config, std::ostream& out) {
  const FeatureFile f = load_features(config.path("features"));
  const RegressionModel model = load_model(config.path("model"));
  const fs::path out_path = config.output_path("out");
  const std::string prov = provenance("predict", config.hash());

  const Eigen::VectorXd p = model.predict(f.data);
  TsvTable t;
  t.comments.push_back(prov);
  t.comments.push_back("model: " + model.name());
  t.header = {"sentence", "prediction"};
  for (Eigen::Index i = 0; i < p.size(); ++i) t.rows.push_back({std::to_string(i + 1), format_number(p(i))});
  write_output(out_path, write_tsv(t));
  out << "wrote " << p.size() << " predictions to " << out_path.string() << "\n";
}

void cmd_evaluate(Config& config, std::ostream& out) {
  const fs::path features = config.path("features");
  const FeatureFile f = load_features(features);
  require_targets(f.data, features);
  const RegressionModel model = load_model(config.path("model"));
  const std::string setting = config.get("setting", f.setting.empty() ? model.metadata.setting : f.setting);
  const std::string parser = config.get("parser", f.parser);
  const auto out_path = config.has("out") ? std::optional(config.output_path("out")) : std::nullopt;
  const std::string prov = provenance("evaluate", config.hash());

  const EvalReport rep = evaluate(model, f.data);
  // Reference row: the mean of the evaluated targets, RAE 1 by construction.
  const Eigen::VectorXd mean = Eigen::VectorXd::Constant(f.data.y.size(), f.data.y.mean());
  const EvalReport base = evaluate(mean, f.data.y);
  const std::size_t dim_initial = static_cast<std::size_t>(f.data.cols());

  TsvTable t;
  t.comments.push_back(prov);
  t.header = result_header();
  t.rows.push_back(result_row(setting, parser, dim_initial, model.name(), model.dim(), rep, true));
  t.rows.push_back(result_row(setting, parser, dim_initial, "MEAN", 0, base, true));
  if (out_path) write_output(*out_path, write_tsv(t));
  out << align({result_header(), result_row(setting, parser, dim_initial, model.name(), model.dim(), rep, false),
                result_row(setting, parser, dim_initial, "MEAN", 0, base, false)});
}

}  // namespace ppp::cli
