#pragma once

// File formats.
//
// Grids are binary PGM (P5, maxval 255, one byte per cell: 0 occupied,
// 255 free, 128 unknown). The first image row is the top of the map
// (largest y). Resolution and origin live in a JSON sidecar.
//
// Everything else is JSON with a {"schema", "schema_version"} header. Masks
// are run-length encoded as [start, length] pairs over row-major indices.

#include <filesystem>
#include <string>
#include <string_view>

#include "semlife/bench.hpp"
#include "semlife/lifecycle.hpp"
#include "semlife/simulator.hpp"

namespace semlife {

std::string encode_pgm(const OccupancyGrid& grid);
/// Throws Error naming the byte offset of the first bad header token or
/// pixel value.
OccupancyGrid decode_pgm(std::string_view bytes, double resolution, Point origin);

std::string grid_sidecar_json(const GridFrame& frame);
/// Resolution and origin from a sidecar; width and height are checked when
/// present.
GridFrame grid_sidecar_from_json(std::string_view text, int width, int height);

/// Reads `pgm` and its sidecar; the sidecar defaults to the same path with
/// a .json extension.
OccupancyGrid read_grid(const std::filesystem::path& pgm, std::filesystem::path sidecar = {});
void write_grid(const OccupancyGrid& grid, const std::filesystem::path& pgm, std::filesystem::path sidecar = {});

std::string read_text(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

std::string config_to_json(const Config& cfg);
Config config_from_json(std::string_view text);

/// Rooms, dividers, obstacle labels, version and a config snapshot. The grid
/// and meta layer are stored separately.
std::string semantics_to_json(const SemanticMap& map, const Config& cfg);
/// Rebuilds a map on `grid`. Labels default to "every occupied cell is wall"
/// when absent.
SemanticMap semantics_from_json(std::string_view text, const OccupancyGrid& grid, const MetaLayer& meta);

/// Loads grid.pgm, grid.json, meta.json and semantics.json from a version
/// directory, without validating. The config snapshot goes to `cfg` when
/// given.
SemanticMap read_version_dir(const std::filesystem::path& dir, Config* cfg = nullptr);

std::string meta_to_json(const MetaLayer& meta);
MetaLayer meta_from_json(std::string_view text, const GridFrame& frame);

std::string to_json(const ConflictReport& report);
ConflictReport conflict_report_from_json(std::string_view text);
std::string to_json(const DiscoveryReport& report);
DiscoveryReport discovery_report_from_json(std::string_view text);
std::string to_json(const MissionRecord& record);
MissionRecord mission_record_from_json(std::string_view text);
std::string to_json(const AnnotationFile& file);
AnnotationFile annotations_from_json(std::string_view text);
std::string to_json(const MotionEstimate& motion);
MotionEstimate motion_from_json(std::string_view text);
std::string to_json(const MissionScript& script);
MissionScript mission_script_from_json(std::string_view text);
std::string to_json(const ValidationReport& report);
std::string to_json(const BenchReport& report, bool include_timing = true);
BenchReport bench_report_from_json(std::string_view text);

/// Corpus directory: manifest.json plus missions/home_HH_mission_MM.json.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
/// Throws Error when the manifest is missing or malformed.
Corpus read_corpus(const std::filesystem::path& dir);
std::string corpus_manifest_json(const Corpus& corpus);

}  // namespace semlife
