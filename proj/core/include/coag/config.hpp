#ifndef COAG_CONFIG_HPP
#define COAG_CONFIG_HPP

#include <stdexcept>
#include <string>

#include "coag/solver.hpp"

namespace coag {

// Raised for malformed or inconsistent configuration; `what` carries the file
// name and, for JSON syntax errors, the byte position reported by the parser.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Loads a run configuration from a JSON file (schema documented in the
// README) and stamps config_hash with the FNV-1a hash of the canonical
// re-serialization, so reruns of the same semantic config match byte-wise.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& origin);

// 16 hex digits, FNV-1a 64 of the canonical serialized form
std::string config_fingerprint(const RunConfig& config);

}  // namespace coag

#endif
