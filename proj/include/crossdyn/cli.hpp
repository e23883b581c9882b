#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crossdyn/io.hpp"

namespace crossdyn::cli {

/// Standardize, fit the KDE, fit sigma and locate features. The result is in
/// standardized units; `transform` maps back to the data's units.
ModelFile fit_model(const CrossSection& data, const RunConfig& config);

/// Command-line entry point. Returns the process exit code.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace crossdyn::cli
