#include "xover/jsonio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xover {

std::string format_sig10(double x) {
  if (x == 0.0) x = 0.0; // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

nlohmann::json sig10(double x) {
  if (!std::isfinite(x)) return nullptr;
  return nlohmann::json::parse(format_sig10(x));
}

nlohmann::json cov_spec_to_json(const CovarianceSpec& spec) {
  nlohmann::json j;
  j["type"] = cov_kind_name(spec.kind);
  switch (spec.kind) {
    case CovKind::Ar1:
    case CovKind::EquiCorr:
      j["r"] = sig10(spec.r);
      break;
    case CovKind::Identity:
      break;
    case CovKind::Custom: {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index i = 0; i < spec.custom.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < spec.custom.cols(); ++c)
          row.push_back(sig10(spec.custom(i, c)));
        rows.push_back(std::move(row));
      }
      j["matrix"] = std::move(rows);
      break;
    }
  }
  return j;
}

CovarianceSpec cov_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("config: cov must be an object with a 'type' string");
  const std::string type = j["type"].get<std::string>();
  if (type == "identity") return CovarianceSpec::identity();
  if (type == "ar1" || type == "equicorr") {
    if (!j.contains("r") || !j["r"].is_number())
      throw ValidationError("config: cov type '" + type + "' needs numeric 'r'");
    const double r = j["r"].get<double>();
    return type == "ar1" ? CovarianceSpec::ar1(r) : CovarianceSpec::equicorr(r);
  }
  if (type == "custom") {
    if (!j.contains("matrix") || !j["matrix"].is_array() || j["matrix"].empty())
      throw ValidationError("config: cov type 'custom' needs 'matrix'");
    const auto& rows = j["matrix"];
    const std::size_t p = rows.size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      if (!rows[i].is_array() || rows[i].size() != p)
        throw ValidationError("config: custom matrix must be square");
      for (std::size_t c = 0; c < p; ++c) {
        if (!rows[i][c].is_number())
          throw ValidationError("config: custom matrix entries must be numbers");
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            rows[i][c].get<double>();
      }
    }
    return CovarianceSpec::custom_matrix(std::move(m));
  }
  throw ValidationError("config: unknown cov type '" + type +
                        "' (expected ar1, equicorr, identity or custom)");
}

nlohmann::json study_config_to_json(const StudyConfig& cfg) {
  nlohmann::json responses = nlohmann::json::array();
  for (const ResponseConfig& r : cfg.responses)
    responses.push_back({{"sigma2", sig10(r.sigma2)},
                         {"cov", cov_spec_to_json(r.cov)}});
  return {{"responses", std::move(responses)}};
}

StudyConfig study_config_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("responses") || !j["responses"].is_array())
    throw ValidationError("config: expected {\"responses\": [...]}");
  StudyConfig cfg;
  for (const auto& rj : j["responses"]) {
    ResponseConfig response;
    if (!rj.contains("sigma2") || !rj["sigma2"].is_number())
      throw ValidationError("config: each response needs numeric 'sigma2'");
    response.sigma2 = rj["sigma2"].get<double>();
    if (!rj.contains("cov"))
      throw ValidationError("config: each response needs 'cov'");
    response.cov = cov_spec_from_json(rj["cov"]);
    cfg.responses.push_back(std::move(response));
  }
  cfg.validate();
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: " + path + ": " + e.what());
  }
  return study_config_from_json(j);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

} // namespace xover
