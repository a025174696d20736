#pragma once

#include "ftc/fields.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace ftc {

/// FTCGRID payload encodings.
///
///   FTCGRID 1
///   <nx> <ny>
///   <x_min> <x_max> <y_min> <y_max>
///   key=value            (metadata, sorted by key)
///   payload=<csv|binary|int>
///   <payload>
///
/// csv: ny lines of nx comma-separated values with 17 significant digits.
/// int: the same layout with integer values. binary: nx*ny little-endian float64.
/// Masked cells are written as `nan` (NaN in binary).
enum class Payload { csv, binary, integer };

std::string_view to_string(Payload p);
Payload parse_payload(std::string_view name);

void write_grid(std::ostream& out, const FieldGrid& field, Payload payload = Payload::csv);
void write_grid(const std::filesystem::path& path, const FieldGrid& field,
                Payload payload = Payload::csv);

/// The returned metadata includes the `payload` key.
FieldGrid read_grid(std::istream& in);
FieldGrid read_grid(const std::filesystem::path& path);

}  // namespace ftc
