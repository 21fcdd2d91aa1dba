#pragma once

// nlohmann::json conversions for the library types. Private to the library;
// the public API exchanges JSON as strings (see io.hpp).

#include <json.hpp>
#include <string>
#include <string_view>

#include "semlife/bench.hpp"
#include "semlife/lifecycle.hpp"
#include "semlife/simulator.hpp"

namespace semlife {

using json = nlohmann::json;

// Top-level documents carry {"schema": "semlife/<kind>", "schema_version": N}.
inline constexpr int kSchemaVersion = 1;

json document(const std::string& kind);
/// Parses text and checks the schema header; throws Error on any problem.
json parse_document(std::string_view text, const std::string& kind);
std::string dump(const json& j);

/// Wraps nlohmann exceptions thrown by `fn` into Error with a context prefix.
template <typename Fn>
auto guarded(const std::string& what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("invalid " + what + ": " + e.what());
  }
}

void to_json(json& j, const Point& p);
void from_json(const json& j, Point& p);
void to_json(json& j, const Cell& c);
void from_json(const json& j, Cell& c);
void to_json(json& j, const Polygon& p);
void from_json(const json& j, Polygon& p);
/// {"width", "height", "runs": [[start, length], ...]} over row-major indices.
void to_json(json& j, const Mask& m);
void from_json(const json& j, Mask& m);
void to_json(json& j, const GridFrame& f);
void from_json(const json& j, GridFrame& f);

void to_json(json& j, const Divider& d);
void from_json(const json& j, Divider& d);
void to_json(json& j, const Room& r);
void from_json(const json& j, Room& r);
void to_json(json& j, const MetaLayer& m);
void from_json(const json& j, MetaLayer& m);
void to_json(json& j, const Config& c);
/// Missing fields keep their defaults; unknown fields are an error.
void from_json(const json& j, Config& c);
void to_json(json& j, const Violation& v);
void from_json(const json& j, Violation& v);

void to_json(json& j, const RegionMotion& m);
void from_json(const json& j, RegionMotion& m);
void to_json(json& j, const MotionEstimate& m);
void from_json(const json& j, MotionEstimate& m);

void to_json(json& j, const RoomPR& r);
void from_json(const json& j, RoomPR& r);
void to_json(json& j, const Resolution& r);
void from_json(const json& j, Resolution& r);
void to_json(json& j, const AdjacencyChange& a);
void from_json(const json& j, AdjacencyChange& a);
void to_json(json& j, const ConflictReport& r);
void from_json(const json& j, ConflictReport& r);

void to_json(json& j, const GrownRegion& g);
void from_json(const json& j, GrownRegion& g);
void to_json(json& j, const DiscoveryReport& r);
void from_json(const json& j, DiscoveryReport& r);

void to_json(json& j, const Annotation& a);
void from_json(const json& j, Annotation& a);
void to_json(json& j, const AnnotationResult& r);
void from_json(const json& j, AnnotationResult& r);
void to_json(json& j, const Timings& t);
void from_json(const json& j, Timings& t);
void to_json(json& j, const MissionRecord& r);
void from_json(const json& j, MissionRecord& r);

void to_json(json& j, const Rect& r);
void from_json(const json& j, Rect& r);
void to_json(json& j, const ClutterBlob& b);
void from_json(const json& j, ClutterBlob& b);
void to_json(json& j, const MissionStep& s);
void from_json(const json& j, MissionStep& s);
void to_json(json& j, const MissionScript& s);
void from_json(const json& j, MissionScript& s);
void to_json(json& j, const HomeSpec& s);
void from_json(const json& j, HomeSpec& s);
void to_json(json& j, const CorpusSpec& s);
void from_json(const json& j, CorpusSpec& s);

void to_json(json& j, const MissionResult& r);
void from_json(const json& j, MissionResult& r);
void to_json(json& j, const ArmSummary& a);
void from_json(const json& j, ArmSummary& a);

}  // namespace semlife
