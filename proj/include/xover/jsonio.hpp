#ifndef XOVER_JSONIO_HPP
#define XOVER_JSONIO_HPP

// JSON config parsing and deterministic number formatting for all file /
// stdout artifacts. Floating-point payload values are rounded to 10
// significant digits ("%.10g": scientific notation kicks in below 1e-4)
// before serialization so identical invocations emit identical bytes.

#include <string>

#include "json.hpp"

#include "xover/covariance.hpp"
#include "xover/types.hpp"

namespace xover {

inline constexpr const char* kVersion = "0.1.0";

// "%.10g" with negative zero normalized away.
std::string format_sig10(double x);

// JSON number carrying exactly the %.10g value; null for non-finite input.
nlohmann::json sig10(double x);

nlohmann::json cov_spec_to_json(const CovarianceSpec& spec);
CovarianceSpec cov_spec_from_json(const nlohmann::json& j);

// Schema: {"responses": [{"sigma2": <float>, "cov": {"type": "ar1" |
// "equicorr" | "identity" | "custom", "r": <float>, "matrix": [[...]]}}]}
nlohmann::json study_config_to_json(const StudyConfig& cfg);
StudyConfig study_config_from_json(const nlohmann::json& j);

StudyConfig load_study_config(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace xover

#endif
