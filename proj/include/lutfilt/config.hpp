#pragma once

#include <string>

#include "lutfilt/pipeline.hpp"

namespace lutfilt {

// Loads a pipeline description from JSON and materializes every referenced
// table (paths are resolved relative to the config file). Unknown keys are
// rejected everywhere; invalid patterns are errors, never repaired. See
// README for the schema.
Pipeline load_pipeline_config(const std::string& path);

// Same, but with the JSON text and a base directory supplied directly
// (easier to drive from tests).
Pipeline parse_pipeline_config(const std::string& json_text, const std::string& base_dir);

}  // namespace lutfilt
