#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entrokit/experiments.hpp"

namespace entrokit::cli {

struct ConfigResult {
    nlohmann::json normalized;        // every key present, defaults filled in
    std::vector<std::string> errors;  // "<json path>: <constraint>"
    bool ok() const { return errors.empty(); }
};

/// Schema check for the experiment commands "clt", "concentration" and
/// "example1". Unknown keys are errors.
ConfigResult validate_config(const std::string& command, const nlohmann::json& doc);

CltParams clt_params(const nlohmann::json& normalized);
ConcentrationParams concentration_params(const nlohmann::json& normalized);
Example1Params example1_params(const nlohmann::json& normalized);

}  // namespace entrokit::cli
