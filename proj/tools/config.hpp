#pragma once

// Flat key=value model files and the JSON emitter shared by the subcommands.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "jtel/pricer.hpp"
#include "jtel/regime.hpp"

namespace jtel::cli {

struct ModelConfig {
    ModelParams params;
    SeriesControls controls;
};

/// Keys: c_plus c_minus lambda_plus lambda_minus h_plus h_minus r_plus r_minus
/// s0 sigma0 (+1 or -1), optionally tail_epsilon and max_terms. '#' starts a
/// comment. Missing, duplicate or unknown keys throw std::invalid_argument.
/// Parameter invariants are checked by the consumer, not here.
ModelConfig parse_config(std::istream& in);
ModelConfig load_config(const std::string& path);

/// Serializes with every number at 17 significant digits; NaN and infinities
/// become null. Object keys keep insertion order.
std::string dump_json(const nlohmann::ordered_json& value);

}  // namespace jtel::cli
