#include "json_codec.hpp"

namespace semlife {

json document(const std::string& kind) {
  json j = json::object();
  j["schema"] = "semlife/" + kind;
  j["schema_version"] = kSchemaVersion;
  return j;
}

json parse_document(std::string_view text, const std::string& kind) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error("invalid " + kind + " JSON: " + e.what());
  }
  if (!j.is_object()) throw Error("invalid " + kind + " JSON: not an object");
  const auto schema = j.find("schema");
  if (schema == j.end() || !schema->is_string() || schema->get<std::string>() != "semlife/" + kind)
    throw Error("invalid " + kind + " JSON: expected schema \"semlife/" + kind + "\"");
  const auto version = j.find("schema_version");
  if (version == j.end() || !version->is_number_integer())
    throw Error("invalid " + kind + " JSON: missing schema_version");
  if (version->get<int>() != kSchemaVersion)
    throw Error("unsupported " + kind + " schema_version " + std::to_string(version->get<int>()));
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

template <typename T>
void opt(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it != j.end() && !it->is_null()) out = it->get<T>();
}

DividerKind parse_kind(const std::string& s) {
  if (s == "user") return DividerKind::User;
  if (s == "meta") return DividerKind::Meta;
  throw Error("unknown divider kind '" + s + "'");
}

RoomStatus parse_status(const std::string& s) {
  for (RoomStatus v : {RoomStatus::Transferred, RoomStatus::LowPrecision, RoomStatus::LowRecall, RoomStatus::Lost})
    if (to_string(v) == s) return v;
  throw Error("unknown room status '" + s + "'");
}

ResolutionKind parse_resolution(const std::string& s) {
  for (ResolutionKind v : {ResolutionKind::WallDiff, ResolutionKind::FreeDiff, ResolutionKind::MetaDivider})
    if (to_string(v) == s) return v;
  throw Error("unknown resolution kind '" + s + "'");
}

Outcome parse_outcome(const std::string& s) {
  if (s == "Accepted") return Outcome::Accepted;
  if (s == "Rejected") return Outcome::Rejected;
  throw Error("unknown outcome '" + s + "'");
}

}  // namespace

void to_json(json& j, const Point& p) { j = json::array({p.x, p.y}); }
void from_json(const json& j, Point& p) {
  if (!j.is_array() || j.size() != 2) throw Error("point must be [x, y]");
  p = {j[0].get<double>(), j[1].get<double>()};
}
void to_json(json& j, const Cell& c) { j = json::array({c.x, c.y}); }
void from_json(const json& j, Cell& c) {
  if (!j.is_array() || j.size() != 2) throw Error("cell must be [x, y]");
  c = {j[0].get<int>(), j[1].get<int>()};
}
void to_json(json& j, const Polygon& p) { j = p.vertices; }
void from_json(const json& j, Polygon& p) { p.vertices = j.get<std::vector<Point>>(); }

void to_json(json& j, const Mask& m) {
  json runs = json::array();
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n;) {
    if (!m[i]) {
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k < n && m[k]) ++k;
    runs.push_back(json::array({i, k - i}));
    i = k;
  }
  j = json{{"width", m.width()}, {"height", m.height()}, {"runs", std::move(runs)}};
}
void from_json(const json& j, Mask& m) {
  const int w = j.at("width").get<int>();
  const int h = j.at("height").get<int>();
  if (w < 0 || h < 0) throw Error("mask dimensions must be non-negative");
  m = Mask(w, h);
  for (const auto& r : j.at("runs")) {
    if (!r.is_array() || r.size() != 2) throw Error("mask run must be [start, length]");
    const auto start = r[0].get<std::size_t>();
    const auto len = r[1].get<std::size_t>();
    if (start > m.size() || len > m.size() - start) throw Error("mask run out of range");
    for (std::size_t i = start; i < start + len; ++i) m.set_index(i);
  }
}

void to_json(json& j, const GridFrame& f) {
  j = json{{"width", f.width}, {"height", f.height}, {"resolution", f.resolution}, {"origin", f.origin}};
}
void from_json(const json& j, GridFrame& f) {
  f.width = j.at("width").get<int>();
  f.height = j.at("height").get<int>();
  f.resolution = j.at("resolution").get<double>();
  f.origin = j.at("origin").get<Point>();
}

void to_json(json& j, const Divider& d) {
  j = json{{"id", d.id}, {"a", d.a}, {"b", d.b}, {"kind", d.kind == DividerKind::User ? "user" : "meta"}};
}
void from_json(const json& j, Divider& d) {
  d.id = j.at("id").get<int>();
  d.a = j.at("a").get<Point>();
  d.b = j.at("b").get<Point>();
  d.kind = DividerKind::User;
  if (j.contains("kind")) d.kind = parse_kind(j.at("kind").get<std::string>());
}

void to_json(json& j, const Room& r) { j = json{{"id", r.id}, {"label", r.label}, {"boundary", r.boundary}}; }
void from_json(const json& j, Room& r) {
  r.id = j.at("id").get<int>();
  r.label = default_room_label(r.id);
  opt(j, "label", r.label);
  r.boundary = j.at("boundary").get<Polygon>();
}

void to_json(json& j, const MetaLayer& m) {
  j = json{{"occupancy_wall", m.occupancy_wall}, {"occupancy_free", m.occupancy_free}, {"dividers", m.dividers}};
}
void from_json(const json& j, MetaLayer& m) {
  m.occupancy_wall = j.at("occupancy_wall").get<Mask>();
  m.occupancy_free = j.at("occupancy_free").get<Mask>();
  m.dividers = j.at("dividers").get<std::vector<Divider>>();
  for (auto& d : m.dividers) d.kind = DividerKind::Meta;
}

void to_json(json& j, const Config& c) {
  j = json{{"wall_distance", c.wall_distance},   {"snap_distance", c.snap_distance},
           {"max_diff_cells", c.max_diff_cells}, {"growth_ratio", c.growth_ratio},
           {"pr_threshold", c.pr_threshold},     {"door_width", c.door_width},
           {"min_room_cells", c.min_room_cells}};
}
void from_json(const json& j, Config& c) {
  if (!j.is_object()) throw Error("config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "schema" || key == "schema_version") continue;
    if (key == "wall_distance") c.wall_distance = value.get<double>();
    else if (key == "snap_distance") c.snap_distance = value.get<double>();
    else if (key == "max_diff_cells") c.max_diff_cells = value.get<std::size_t>();
    else if (key == "growth_ratio") c.growth_ratio = value.get<double>();
    else if (key == "pr_threshold") c.pr_threshold = value.get<double>();
    else if (key == "door_width") c.door_width = value.get<double>();
    else if (key == "min_room_cells") c.min_room_cells = value.get<std::size_t>();
    else throw Error("unknown config field '" + key + "'");
  }
}

void to_json(json& j, const Violation& v) {
  j = json{{"semantic", v.semantic}, {"constraint", v.constraint}, {"location", v.location}, {"id", v.id}};
}
void from_json(const json& j, Violation& v) {
  v.semantic = j.at("semantic").get<std::string>();
  v.constraint = j.at("constraint").get<std::string>();
  opt(j, "location", v.location);
  opt(j, "id", v.id);
}

void to_json(json& j, const RegionMotion& m) {
  j = json{{"rotation", m.rotation}, {"translation", m.translation}, {"pivot", m.pivot}, {"region", m.region}};
}
void from_json(const json& j, RegionMotion& m) {
  m.rotation = j.at("rotation").get<double>();
  m.translation = j.at("translation").get<Point>();
  opt(j, "pivot", m.pivot);
  m.region = j.at("region").get<Polygon>();
  if (is_degenerate(m.region)) throw Error("motion region must have at least 3 distinct vertices");
}
void to_json(json& j, const MotionEstimate& m) { j = json{{"regions", m.regions}}; }
void from_json(const json& j, MotionEstimate& m) { m.regions = j.at("regions").get<std::vector<RegionMotion>>(); }

void to_json(json& j, const RoomPR& r) {
  j = json{{"room", r.room_id}, {"precision", r.precision}, {"recall", r.recall}, {"status", to_string(r.status)}};
}
void from_json(const json& j, RoomPR& r) {
  r.room_id = j.at("room").get<int>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.status = parse_status(j.at("status").get<std::string>());
}
void to_json(json& j, const Resolution& r) {
  j = json{{"kind", to_string(r.kind)}, {"pass", r.pass}, {"cells", r.cells}, {"segments", r.segments}};
}
void from_json(const json& j, Resolution& r) {
  r.kind = parse_resolution(j.at("kind").get<std::string>());
  r.pass = j.at("pass").get<int>();
  r.cells = j.at("cells").get<std::size_t>();
  r.segments = j.at("segments").get<std::vector<Divider>>();
}
void to_json(json& j, const AdjacencyChange& a) { j = json{{"a", a.a}, {"b", a.b}, {"gained", a.gained}}; }
void from_json(const json& j, AdjacencyChange& a) {
  a.a = j.at("a").get<int>();
  a.b = j.at("b").get<int>();
  a.gained = j.at("gained").get<bool>();
}
void to_json(json& j, const ConflictReport& r) {
  j = json{{"arm", r.arm},
           {"passes", r.passes},
           {"pr_threshold", r.pr_threshold},
           {"success", r.success()},
           {"rooms", r.rooms},
           {"unplaced_dividers", r.unplaced_dividers},
           {"connectivity", r.connectivity},
           {"resolutions", r.resolutions}};
}
void from_json(const json& j, ConflictReport& r) {
  r.arm = j.at("arm").get<std::string>();
  r.passes = j.at("passes").get<int>();
  r.pr_threshold = j.at("pr_threshold").get<double>();
  r.rooms = j.at("rooms").get<std::vector<RoomPR>>();
  r.unplaced_dividers = j.at("unplaced_dividers").get<std::vector<int>>();
  r.connectivity = j.at("connectivity").get<std::vector<AdjacencyChange>>();
  r.resolutions = j.at("resolutions").get<std::vector<Resolution>>();
}

void to_json(json& j, const GrownRegion& g) { j = json{{"room", g.room_id}, {"whole", g.whole}, {"mask", g.mask}}; }
void from_json(const json& j, GrownRegion& g) {
  g.room_id = j.at("room").get<int>();
  g.whole = j.at("whole").get<bool>();
  g.mask = j.at("mask").get<Mask>();
}
void to_json(json& j, const DiscoveryReport& r) {
  j = json{{"grown", r.grown},
           {"proposals", r.proposals},
           {"accepted", r.accepted},
           {"rejected", r.rejected},
           {"new_rooms", r.new_rooms}};
}
void from_json(const json& j, DiscoveryReport& r) {
  r.grown = j.at("grown").get<std::vector<GrownRegion>>();
  r.proposals = j.at("proposals").get<std::vector<Divider>>();
  r.accepted = j.at("accepted").get<std::vector<int>>();
  r.rejected = j.at("rejected").get<std::vector<int>>();
  r.new_rooms = j.at("new_rooms").get<std::vector<int>>();
}

void to_json(json& j, const Annotation& a) {
  j = json{{"op", a.op}};
  if (a.op == "rename_room") {
    j["id"] = a.id;
    j["label"] = a.label;
  } else if (a.op == "add_divider") {
    j["a"] = a.a;
    j["b"] = a.b;
  } else if (a.op == "remove_divider") {
    j["id"] = a.id;
  }
}
void from_json(const json& j, Annotation& a) {
  a = Annotation{};
  a.op = j.at("op").get<std::string>();
  opt(j, "id", a.id);
  opt(j, "label", a.label);
  opt(j, "a", a.a);
  opt(j, "b", a.b);
}
void to_json(json& j, const AnnotationResult& r) {
  json invalid = json::array();
  for (const auto& [idx, why] : r.invalid) invalid.push_back(json{{"index", idx}, {"reason", why}});
  j = json{{"applied", r.applied}, {"invalid", std::move(invalid)}, {"reject_update", r.reject_update}};
}
void from_json(const json& j, AnnotationResult& r) {
  r.applied = j.at("applied").get<std::vector<int>>();
  r.invalid.clear();
  for (const auto& e : j.at("invalid"))
    r.invalid.emplace_back(e.at("index").get<int>(), e.at("reason").get<std::string>());
  r.reject_update = j.at("reject_update").get<bool>();
}
void to_json(json& j, const Timings& t) {
  j = json{{"resolve_ms", t.resolve_ms}, {"discover_ms", t.discover_ms}, {"total_ms", t.total_ms}};
}
void from_json(const json& j, Timings& t) {
  opt(j, "resolve_ms", t.resolve_ms);
  opt(j, "discover_ms", t.discover_ms);
  opt(j, "total_ms", t.total_ms);
}
void to_json(json& j, const MissionRecord& r) {
  j = json{{"mission", r.mission},
           {"outcome", to_string(r.outcome)},
           {"reason", r.reason},
           {"version_before", r.version_before},
           {"version_after", r.version_after},
           {"conflicts", r.conflicts},
           {"discovery", r.discovery},
           {"violations", r.violations},
           {"annotations", r.annotations},
           {"timing", r.timings}};
}
void from_json(const json& j, MissionRecord& r) {
  r.mission = j.at("mission").get<int>();
  r.outcome = parse_outcome(j.at("outcome").get<std::string>());
  r.reason = j.at("reason").get<std::string>();
  r.version_before = j.at("version_before").get<int>();
  r.version_after = j.at("version_after").get<int>();
  r.conflicts = j.at("conflicts").get<ConflictReport>();
  r.discovery = j.at("discovery").get<DiscoveryReport>();
  r.violations = j.at("violations").get<std::vector<Violation>>();
  r.annotations = j.at("annotations").get<AnnotationResult>();
  opt(j, "timing", r.timings);
}

void to_json(json& j, const Rect& r) { j = json::array({r.x0, r.y0, r.x1, r.y1}); }
void from_json(const json& j, Rect& r) {
  if (!j.is_array() || j.size() != 4) throw Error("rect must be [x0, y0, x1, y1]");
  r = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}
void to_json(json& j, const ClutterBlob& b) { j = json{{"id", b.id}, {"center", b.center}, {"radius", b.radius}}; }
void from_json(const json& j, ClutterBlob& b) {
  b.id = j.at("id").get<int>();
  b.center = j.at("center").get<Cell>();
  b.radius = j.at("radius").get<int>();
}

void to_json(json& j, const MissionStep& s) {
  j = json{{"kind", step_kind(s)}};
  if (const auto* x = std::get_if<JitterStep>(&s)) {
    j["region"] = x->region;
    j["rotation"] = x->rotation;
    j["translation"] = x->translation;
    j["noise_sigma"] = x->noise_sigma;
  } else if (const auto* x = std::get_if<RemoveWallStep>(&s)) {
    j["cells"] = x->cells;
  } else if (const auto* x = std::get_if<AddWallStep>(&s)) {
    j["cells"] = x->cells;
  } else if (const auto* x = std::get_if<ToggleDoorStep>(&s)) {
    j["door"] = x->door;
    j["open"] = x->open;
  } else if (const auto* x = std::get_if<AddClutterStep>(&s)) {
    j["blob"] = x->blob;
  } else if (const auto* x = std::get_if<RemoveClutterStep>(&s)) {
    j["id"] = x->id;
  } else if (const auto* x = std::get_if<ExploreStep>(&s)) {
    j["region"] = x->region;
  }
}
void from_json(const json& j, MissionStep& s) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "jitter") {
    JitterStep x;
    opt(j, "region", x.region);
    opt(j, "rotation", x.rotation);
    opt(j, "translation", x.translation);
    opt(j, "noise_sigma", x.noise_sigma);
    s = x;
  } else if (kind == "remove_wall") {
    s = RemoveWallStep{j.at("cells").get<Rect>()};
  } else if (kind == "add_wall") {
    s = AddWallStep{j.at("cells").get<Rect>()};
  } else if (kind == "toggle_door") {
    s = ToggleDoorStep{j.at("door").get<int>(), j.at("open").get<bool>()};
  } else if (kind == "add_clutter") {
    s = AddClutterStep{j.at("blob").get<ClutterBlob>()};
  } else if (kind == "remove_clutter") {
    s = RemoveClutterStep{j.at("id").get<int>()};
  } else if (kind == "explore") {
    s = ExploreStep{j.at("region").get<Mask>()};
  } else {
    throw Error("unknown mission step kind '" + kind + "'");
  }
}
void to_json(json& j, const MissionScript& s) {
  j = json{{"seed", s.seed}, {"class", s.mission_class}, {"dropout", s.dropout}, {"steps", s.steps}};
}
void from_json(const json& j, MissionScript& s) {
  s = MissionScript{};
  opt(j, "seed", s.seed);
  opt(j, "class", s.mission_class);
  opt(j, "dropout", s.dropout);
  opt(j, "steps", s.steps);
}

void to_json(json& j, const HomeSpec& s) {
  j = json{{"seed", s.seed},
           {"width", s.width},
           {"height", s.height},
           {"chambers", s.chambers},
           {"min_chamber", s.min_chamber},
           {"door_width", json::array({s.door_min, s.door_max})},
           {"corridor_width", json::array({s.corridor_min, s.corridor_max})},
           {"opening_width", json::array({s.opening_min, s.opening_max})},
           {"hallway", s.hallway},
           {"hidden_corridor", s.hidden_corridor},
           {"resolution", s.resolution}};
}
void from_json(const json& j, HomeSpec& s) {
  s = HomeSpec{};
  opt(j, "seed", s.seed);
  opt(j, "width", s.width);
  opt(j, "height", s.height);
  opt(j, "chambers", s.chambers);
  opt(j, "min_chamber", s.min_chamber);
  auto range = [&](const char* key, int& lo, int& hi) {
    if (!j.contains(key)) return;
    const auto& r = j.at(key);
    if (!r.is_array() || r.size() != 2) throw Error(std::string(key) + " must be [min, max]");
    lo = r[0].get<int>();
    hi = r[1].get<int>();
  };
  range("door_width", s.door_min, s.door_max);
  range("corridor_width", s.corridor_min, s.corridor_max);
  range("opening_width", s.opening_min, s.opening_max);
  opt(j, "hallway", s.hallway);
  opt(j, "hidden_corridor", s.hidden_corridor);
  opt(j, "resolution", s.resolution);
}
void to_json(json& j, const CorpusSpec& s) {
  j = json{{"seed", s.seed},
           {"homes", s.homes},
           {"missions_per_home", s.missions_per_home},
           {"mix",
            {{"jitter", s.jitter},
             {"disconnection", s.disconnection},
             {"connection", s.connection},
             {"exploration", s.exploration}}},
           {"home", s.home}};
}
void from_json(const json& j, CorpusSpec& s) {
  s = CorpusSpec{};
  opt(j, "seed", s.seed);
  opt(j, "homes", s.homes);
  opt(j, "missions_per_home", s.missions_per_home);
  if (j.contains("mix")) {
    const auto& m = j.at("mix");
    opt(m, "jitter", s.jitter);
    opt(m, "disconnection", s.disconnection);
    opt(m, "connection", s.connection);
    opt(m, "exploration", s.exploration);
  }
  opt(j, "home", s.home);
}

void to_json(json& j, const MissionResult& r) {
  j = json{{"home", r.home},
           {"index", r.index},
           {"class", r.mission_class},
           {"outcome", to_string(r.outcome)},
           {"reason", r.reason},
           {"failed_rooms", r.failed_rooms},
           {"passes", r.passes}};
}
void from_json(const json& j, MissionResult& r) {
  r.home = j.at("home").get<int>();
  r.index = j.at("index").get<int>();
  r.mission_class = j.at("class").get<std::string>();
  r.outcome = parse_outcome(j.at("outcome").get<std::string>());
  r.reason = j.at("reason").get<std::string>();
  r.failed_rooms = j.at("failed_rooms").get<std::vector<int>>();
  r.passes = j.at("passes").get<int>();
}
void to_json(json& j, const ArmSummary& a) {
  json classes = json::array();
  for (const auto& c : a.by_class)
    classes.push_back(json{{"class", c.mission_class}, {"missions", c.missions}, {"failed", c.failed}});
  j = json{{"arm", a.arm},
           {"missions", a.missions},
           {"failed", a.failed},
           {"error_rate", a.error_rate},
           {"by_class", std::move(classes)},
           {"results", a.results}};
}
void from_json(const json& j, ArmSummary& a) {
  a.arm = j.at("arm").get<std::string>();
  a.missions = j.at("missions").get<int>();
  a.failed = j.at("failed").get<int>();
  a.error_rate = j.at("error_rate").get<double>();
  a.by_class.clear();
  for (const auto& c : j.at("by_class"))
    a.by_class.push_back({c.at("class").get<std::string>(), c.at("missions").get<int>(), c.at("failed").get<int>()});
  a.results = j.at("results").get<std::vector<MissionResult>>();
}

}  // namespace semlife
