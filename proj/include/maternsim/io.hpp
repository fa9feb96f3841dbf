#pragma once

#include <filesystem>
#include <string>

#include "maternsim/pattern.hpp"

#include <nlohmann/json_fwd.hpp>

namespace maternsim {

using json = nlohmann::json;

/// Write `content` to `path` atomically (temp file + rename).
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

/// SHA-256 of a file, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

/// Point patterns are stored as CSV (header x1..xd plus mark columns) with a
/// sidecar JSON file `<path>.meta.json` carrying window, dimension, mark kind
/// and any extra metadata (seeds, config echo). Doubles round-trip bit-exactly.
void write_pattern_csv(const std::filesystem::path& path, const PointPattern& pat,
                       const json& extra_meta);
void write_pattern_csv(const std::filesystem::path& path, const MarkedPointPattern& pat,
                       const json& extra_meta);

PointPattern read_pattern_csv(const std::filesystem::path& path);
MarkedPointPattern read_marked_pattern_csv(const std::filesystem::path& path);

/// Grid fields: CSV of cell-centre coordinates plus a value column, one row
/// per cell in flat cell order, with the same sidecar convention.
void write_field_csv(const std::filesystem::path& path, const GridField& field,
                     const json& extra_meta);
GridField read_field_csv(const std::filesystem::path& path);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace maternsim
