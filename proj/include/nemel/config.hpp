#pragma once

#include <string>

#include "nemel/material.hpp"
#include "nemel/sim.hpp"

namespace nemel {

struct ParsedConfig {
  RunConfig run;
  ValidityReport validity;
};

/// Parse and validate a TOML run configuration with sections [grid], [leslie],
/// [species.k], [permittivity], [time], [initial], [output], [tolerances].
/// Unknown keys and sections are hard errors; physically invalid values are
/// rejected naming the violated condition. The Leslie validity gate can be
/// bypassed with allow_invalid_leslie (the CLI --override-validity flag); the
/// verdict is embedded either way.
ParsedConfig parse_config(const std::string& path, bool allow_invalid_leslie = false);

/// Same, from an in-memory document (used by tests and the verify suites).
ParsedConfig parse_config_text(const std::string& text, bool allow_invalid_leslie = false);

}  // namespace nemel
