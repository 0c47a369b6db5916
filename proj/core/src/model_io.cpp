#include <json.hpp>

#include "ppp/errors.hpp"
#include "ppp/regression.hpp"

namespace ppp {

namespace {

using nlohmann::ordered_json;

constexpr const char* kFormat = "ppp-model";
constexpr int kVersion = 1;

ordered_json vec(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json row(const Eigen::RowVectorXd& v) { return vec(v.transpose()); }

ordered_json mat(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(row(m.row(i)));
  return a;
}

Eigen::VectorXd to_vec(const ordered_json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

Eigen::RowVectorXd to_row(const ordered_json& a) { return to_vec(a).transpose(); }

Eigen::MatrixXd to_mat(const ordered_json& a, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()), cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<Eigen::Index>(a[i].size()) != cols) throw DataError("model file: ragged matrix");
    m.row(static_cast<Eigen::Index>(i)) = to_row(a[i]);
  }
  return m;
}

ordered_json scaler_json(const Standardizer& s) { return {{"mean", row(s.mean)}, {"scale", row(s.scale)}}; }

Standardizer scaler_from(const ordered_json& j) {
  Standardizer s;
  s.mean = to_row(j.at("mean"));
  s.scale = to_row(j.at("scale"));
  if (s.mean.size() != s.scale.size()) throw DataError("model file: scaler size mismatch");
  return s;
}

}  // namespace

std::string model_to_json(const RegressionModel& m) {
  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["name"] = m.name();
  j["kind"] = std::string(to_string(m.kind));
  j["preprocessing"] = std::string(to_string(m.preprocessing));
  j["features"] = m.feature_names;
  j["scaler"] = scaler_json(m.scaler);

  if (m.preprocessing == Preprocessing::kForwardSelection) {
    ordered_json mask = ordered_json::array();
    for (auto c : m.mask) mask.push_back(c);
    j["mask"] = mask;
  } else if (m.preprocessing == Preprocessing::kPls) {
    j["pls"] = {{"components", m.pls.components},
                {"requested", m.pls.requested},
                {"x_mean", row(m.pls.x_mean)},
                {"y_mean", m.pls.y_mean},
                {"rotation", mat(m.pls.rotation)},
                {"y_loadings", vec(m.pls.y_loadings)},
                {"score_scaler", scaler_json(m.score_scaler)}};
  }

  switch (m.kind) {
    case ModelKind::kRidge:
      j["ridge"] = {{"intercept", m.ridge.intercept},
                    {"coef", vec(m.ridge.coef)},
                    {"lambda", m.ridge.lambda},
                    {"intercept_only", m.ridge.intercept_only}};
      break;
    case ModelKind::kTree: {
      ordered_json nodes = ordered_json::array();
      for (const auto& n : m.tree.nodes) nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right});
      j["tree"] = {{"max_depth", m.tree.max_depth}, {"min_leaf", m.tree.min_leaf}, {"nodes", nodes}};
      break;
    }
    case ModelKind::kSvr:
      j["svr"] = {{"C", m.svr.C},
                  {"epsilon", m.svr.epsilon},
                  {"gamma", m.svr.gamma},
                  {"rho", m.svr.rho},
                  {"iterations", m.svr.iterations},
                  {"kkt_violation", m.svr.kkt_violation},
                  {"primal", m.svr.primal},
                  {"dual", m.svr.dual},
                  {"coef", vec(m.svr.coef)},
                  {"support", mat(m.svr.support)}};
      break;
  }

  ordered_json hp = ordered_json::object();
  for (const auto& [k, v] : m.metadata.hyperparameters) hp[k] = v;
  j["metadata"] = {{"provenance", m.metadata.provenance},
                   {"training_set", m.metadata.training_set},
                   {"setting", m.metadata.setting},
                   {"dim_initial", m.metadata.dim_initial},
                   {"dim", m.metadata.dim},
                   {"hyperparameters", hp},
                   {"notes", m.metadata.notes},
                   {"fs_ranking", m.metadata.fs_ranking}};
  return j.dump(1) + "\n";
}

RegressionModel model_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != kFormat) throw DataError("not a ppp model file");
    if (j.at("version").get<int>() != kVersion) {
      throw DataError("unsupported model file version " + j.at("version").dump());
    }
    RegressionModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.preprocessing = parse_preprocessing(j.at("preprocessing").get<std::string>());
    m.feature_names = j.at("features").get<std::vector<std::string>>();
    m.scaler = scaler_from(j.at("scaler"));
    const auto d = static_cast<Eigen::Index>(m.feature_names.size());
    if (m.scaler.mean.size() != d) throw DataError("model file: scaler does not match the feature list");

    Eigen::Index model_dim = d;
    if (m.preprocessing == Preprocessing::kForwardSelection) {
      for (const auto& c : j.at("mask")) {
        const auto idx = c.get<Eigen::Index>();
        if (idx < 0 || idx >= d) throw DataError("model file: mask index out of range");
        m.mask.push_back(idx);
      }
      model_dim = static_cast<Eigen::Index>(m.mask.size());
    } else if (m.preprocessing == Preprocessing::kPls) {
      const auto& p = j.at("pls");
      m.pls.components = p.at("components").get<int>();
      m.pls.requested = p.at("requested").get<int>();
      m.pls.x_mean = to_row(p.at("x_mean"));
      m.pls.y_mean = p.at("y_mean").get<double>();
      m.pls.rotation = to_mat(p.at("rotation"), m.pls.components);
      m.pls.y_loadings = to_vec(p.at("y_loadings"));
      m.score_scaler = scaler_from(p.at("score_scaler"));
      if (m.pls.rotation.rows() != d || m.pls.x_mean.size() != d || m.score_scaler.mean.size() != m.pls.components) {
        throw DataError("model file: PLS block does not match the feature list");
      }
      model_dim = m.pls.components;
    }

    switch (m.kind) {
      case ModelKind::kRidge: {
        const auto& r = j.at("ridge");
        m.ridge.intercept = r.at("intercept").get<double>();
        m.ridge.coef = to_vec(r.at("coef"));
        m.ridge.lambda = r.at("lambda").get<double>();
        m.ridge.intercept_only = r.at("intercept_only").get<bool>();
        if (m.ridge.coef.size() != model_dim) throw DataError("model file: ridge coefficient count mismatch");
        break;
      }
      case ModelKind::kTree: {
        const auto& t = j.at("tree");
        m.tree.max_depth = t.at("max_depth").get<int>();
        m.tree.min_leaf = t.at("min_leaf").get<int>();
        for (const auto& n : t.at("nodes")) {
          m.tree.nodes.push_back(
              {n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<double>(), n.at(3).get<int>(), n.at(4).get<int>()});
        }
        const auto count = static_cast<int>(m.tree.nodes.size());
        if (count == 0) throw DataError("model file: empty tree");
        for (const auto& n : m.tree.nodes) {
          if (n.feature >= model_dim || (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 ||
                                                            n.right >= count))) {
            throw DataError("model file: malformed tree node");
          }
        }
        break;
      }
      case ModelKind::kSvr: {
        const auto& s = j.at("svr");
        m.svr.C = s.at("C").get<double>();
        m.svr.epsilon = s.at("epsilon").get<double>();
        m.svr.gamma = s.at("gamma").get<double>();
        m.svr.rho = s.at("rho").get<double>();
        m.svr.iterations = s.at("iterations").get<long>();
        m.svr.kkt_violation = s.at("kkt_violation").get<double>();
        m.svr.primal = s.at("primal").get<double>();
        m.svr.dual = s.at("dual").get<double>();
        m.svr.coef = to_vec(s.at("coef"));
        m.svr.support = to_mat(s.at("support"), model_dim);
        if (m.svr.support.rows() != m.svr.coef.size()) throw DataError("model file: support vector count mismatch");
        break;
      }
    }

    const auto& md = j.at("metadata");
    m.metadata.provenance = md.value("provenance", "");
    m.metadata.training_set = md.at("training_set").get<std::string>();
    m.metadata.setting = md.at("setting").get<std::string>();
    m.metadata.dim_initial = md.at("dim_initial").get<std::size_t>();
    m.metadata.dim = md.at("dim").get<std::size_t>();
    for (const auto& [k, v] : md.at("hyperparameters").items()) m.metadata.hyperparameters[k] = v.get<double>();
    m.metadata.notes = md.at("notes").get<std::vector<std::string>>();
    m.metadata.fs_ranking = md.at("fs_ranking").get<std::vector<std::string>>();
    return m;
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace ppp
