#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lexdiv/core.hpp"

namespace lexdiv {

// Error-matrix interchange format.
//
// One individual per line, comma-separated decimal cells. An optional first
// line of non-numeric column names is taken as case labels. The loss kind
// comes from (in order): the explicit override, a sidecar descriptor
// {"kind": "discrete"|"real"}, or inference (discrete iff every cell is an
// integer). Parse failures throw InputError whose message names the line.

ErrorMatrix parse_matrix_csv(std::string_view text, std::optional<LossKind> kind = std::nullopt,
                             std::string_view source_name = "<input>");

/// Reads `path`. If no kind is given, the sidecar `<stem>.json` next to it is consulted.
ErrorMatrix read_matrix_csv(const std::filesystem::path& path, std::optional<LossKind> kind = std::nullopt);

/// Reads {"kind": ...} from a descriptor file. Missing file yields nullopt.
std::optional<LossKind> read_descriptor(const std::filesystem::path& path);

std::filesystem::path sidecar_descriptor_path(const std::filesystem::path& matrix_path);

/// Writes the header line (case labels or case_<j>) followed by one row per individual.
/// Discrete cells print as integers; real cells use the shortest round-trip form.
std::string write_matrix_csv(const ErrorMatrix& matrix);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace lexdiv
