#include "semlife/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json_codec.hpp"

namespace semlife {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PGM

std::string encode_pgm(const OccupancyGrid& grid) {
  std::ostringstream os;
  os << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
  std::string out = os.str();
  out.reserve(out.size() + grid.frame().cell_count());
  for (int y = grid.height() - 1; y >= 0; --y)
    for (int x = 0; x < grid.width(); ++x) {
      switch (grid(x, y)) {
        case CellState::Occupied: out.push_back(static_cast<char>(0)); break;
        case CellState::Free: out.push_back(static_cast<char>(255)); break;
        case CellState::Unknown: out.push_back(static_cast<char>(128)); break;
      }
    }
  return out;
}

namespace {

class PgmHeader {
 public:
  explicit PgmHeader(std::string_view bytes) : b_(bytes) {}

  [[noreturn]] void fail(std::size_t at, const std::string& what) const {
    throw Error("bad PGM at byte offset " + std::to_string(at) + ": " + what);
  }

  void skip_space() {
    while (pos_ < b_.size()) {
      const char c = b_[pos_];
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000) fail(start, std::string(what) + " too large");
      ++pos_;
    }
    if (pos_ == start) fail(start, std::string("expected ") + what);
    return v;
  }

  std::size_t pos_ = 0;
  std::string_view b_;
};

}  // namespace

OccupancyGrid decode_pgm(std::string_view bytes, double resolution, Point origin) {
  PgmHeader h(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') h.fail(0, "expected magic 'P5'");
  h.pos_ = 2;
  const long width = h.number("width");
  const long height = h.number("height");
  const std::size_t maxval_at = h.pos_;
  const long maxval = h.number("maxval");
  if (width < 1 || height < 1) h.fail(maxval_at, "width and height must be positive");
  if (maxval != 255) h.fail(maxval_at, "maxval must be 255");
  if (h.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[h.pos_])))
    h.fail(h.pos_, "expected one whitespace byte after maxval");
  const std::size_t data = h.pos_ + 1;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - data < n)
    h.fail(bytes.size(), "pixel data truncated: expected " + std::to_string(n) + " bytes, found " +
                             std::to_string(bytes.size() - data));
  if (bytes.size() - data > n) h.fail(data + n, "trailing bytes after pixel data");
  if (!(resolution > 0)) throw Error("grid resolution must be > 0");

  const GridFrame frame{static_cast<int>(width), static_cast<int>(height), resolution, origin};
  std::vector<CellState> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<unsigned char>(bytes[data + i]);
    CellState s;
    if (v == 0) s = CellState::Occupied;
    else if (v == 255) s = CellState::Free;
    else if (v == 128) s = CellState::Unknown;
    else h.fail(data + i, "cell value " + std::to_string(v) + " is not 0, 128 or 255");
    const std::size_t row = i / static_cast<std::size_t>(width);
    const std::size_t col = i % static_cast<std::size_t>(width);
    const std::size_t y = static_cast<std::size_t>(height) - 1 - row;
    cells[y * static_cast<std::size_t>(width) + col] = s;
  }
  return OccupancyGrid(frame, std::move(cells));
}

std::string grid_sidecar_json(const GridFrame& frame) {
  json j = document("grid");
  j["width"] = frame.width;
  j["height"] = frame.height;
  j["resolution"] = frame.resolution;
  j["origin"] = frame.origin;
  return dump(j);
}

GridFrame grid_sidecar_from_json(std::string_view text, int width, int height) {
  return guarded("grid sidecar", [&] {
    const json j = parse_document(text, "grid");
    GridFrame f{width, height, j.at("resolution").get<double>(), j.at("origin").get<Point>()};
    if (j.contains("width") && j.at("width").get<int>() != width)
      throw Error("grid sidecar width does not match the PGM");
    if (j.contains("height") && j.at("height").get<int>() != height)
      throw Error("grid sidecar height does not match the PGM");
    if (!(f.resolution > 0)) throw Error("grid resolution must be > 0");
    return f;
  });
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error("error reading " + path.string());
  return os.str();
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error("error writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename into " + path.string());
  }
}

OccupancyGrid read_grid(const fs::path& pgm, fs::path sidecar) {
  if (sidecar.empty()) sidecar = fs::path(pgm).replace_extension(".json");
  const std::string bytes = read_text(pgm);
  OccupancyGrid probe = decode_pgm(bytes, 1.0, {});
  const GridFrame f = grid_sidecar_from_json(read_text(sidecar), probe.width(), probe.height());
  return OccupancyGrid(f, std::vector<CellState>(probe.cells().begin(), probe.cells().end()));
}

void write_grid(const OccupancyGrid& grid, const fs::path& pgm, fs::path sidecar) {
  if (sidecar.empty()) sidecar = fs::path(pgm).replace_extension(".json");
  write_text_atomic(pgm, encode_pgm(grid));
  write_text_atomic(sidecar, grid_sidecar_json(grid.frame()));
}

// ---------------------------------------------------------------------------
// JSON documents

std::string config_to_json(const Config& cfg) {
  json j = document("config");
  json body = cfg;
  j.update(body);
  return dump(j);
}

Config config_from_json(std::string_view text) {
  return guarded("config", [&] {
    json j;
    try {
      j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw Error(std::string("invalid config JSON: ") + e.what());
    }
    // A bare object of fields is accepted as well as a full document.
    if (j.is_object() && j.contains("schema")) j = parse_document(text, "config");
    Config cfg = j.get<Config>();
    cfg.validate();
    return cfg;
  });
}

std::string semantics_to_json(const SemanticMap& map, const Config& cfg) {
  json j = document("semantics");
  j["version"] = map.version;
  j["config"] = cfg;
  j["rooms"] = map.rooms;
  j["dividers"] = map.dividers;
  j["labels"] = json{{"wall", map.labels.wall}, {"clutter", map.labels.clutter}};
  return dump(j);
}

SemanticMap semantics_from_json(std::string_view text, const OccupancyGrid& grid, const MetaLayer& meta) {
  return guarded("semantics", [&] {
    const json j = parse_document(text, "semantics");
    SemanticMap map;
    map.version = j.value("version", 0);
    map.grid = grid;
    map.meta = meta;
    map.rooms = j.at("rooms").get<std::vector<Room>>();
    map.dividers = j.at("dividers").get<std::vector<Divider>>();
    const GridFrame& f = grid.frame();
    if (j.contains("labels")) {
      map.labels.wall = j.at("labels").at("wall").get<Mask>();
      map.labels.clutter = j.at("labels").at("clutter").get<Mask>();
      for (const Mask* m : {&map.labels.wall, &map.labels.clutter})
        if (m->width() != f.width || m->height() != f.height)
          throw Error("label mask size does not match the grid");
    } else {
      map.labels = {grid.occupied(), Mask(f.width, f.height)};
    }
    return map;
  });
}

SemanticMap read_version_dir(const fs::path& dir, Config* cfg) {
  if (!fs::is_directory(dir)) throw Error("not a version directory: " + dir.string());
  const OccupancyGrid grid = read_grid(dir / "grid.pgm", dir / "grid.json");
  const MetaLayer meta = meta_from_json(read_text(dir / "meta.json"), grid.frame());
  const std::string text = read_text(dir / "semantics.json");
  SemanticMap map = semantics_from_json(text, grid, meta);
  if (cfg != nullptr) {
    *cfg = guarded("semantics", [&] {
      const json j = parse_document(text, "semantics");
      return j.contains("config") ? j.at("config").get<Config>() : Config{};
    });
    cfg->validate();
  }
  return map;
}

std::string meta_to_json(const MetaLayer& meta) {
  json j = document("meta");
  json body = meta;
  j.update(body);
  return dump(j);
}

MetaLayer meta_from_json(std::string_view text, const GridFrame& frame) {
  return guarded("meta layer", [&] {
    const json j = parse_document(text, "meta");
    MetaLayer m = j.get<MetaLayer>();
    for (const Mask* x : {&m.occupancy_wall, &m.occupancy_free})
      if (x->width() != frame.width || x->height() != frame.height)
        throw Error("meta mask size does not match the grid");
    return m;
  });
}

namespace {

template <typename T>
std::string doc_of(const std::string& kind, const T& value) {
  json j = document(kind);
  json body = value;
  j.update(body);
  return dump(j);
}

template <typename T>
T parse_of(std::string_view text, const std::string& kind) {
  return guarded(kind, [&] { return parse_document(text, kind).get<T>(); });
}

std::string script_name(int home, int index) {
  std::ostringstream os;
  os << "home_" << std::setw(2) << std::setfill('0') << home << "_mission_" << std::setw(2) << std::setfill('0')
     << index << ".json";
  return os.str();
}

}  // namespace

std::string to_json(const ConflictReport& report) { return doc_of("conflict_report", report); }
ConflictReport conflict_report_from_json(std::string_view text) {
  return parse_of<ConflictReport>(text, "conflict_report");
}
std::string to_json(const DiscoveryReport& report) { return doc_of("discovery_report", report); }
DiscoveryReport discovery_report_from_json(std::string_view text) {
  return parse_of<DiscoveryReport>(text, "discovery_report");
}
std::string to_json(const MissionRecord& record) { return doc_of("mission_record", record); }
MissionRecord mission_record_from_json(std::string_view text) {
  return parse_of<MissionRecord>(text, "mission_record");
}
std::string to_json(const MotionEstimate& motion) { return doc_of("motion", motion); }
MotionEstimate motion_from_json(std::string_view text) { return parse_of<MotionEstimate>(text, "motion"); }
std::string to_json(const MissionScript& script) { return doc_of("mission_script", script); }
MissionScript mission_script_from_json(std::string_view text) {
  return parse_of<MissionScript>(text, "mission_script");
}

std::string to_json(const AnnotationFile& file) {
  json j = document("annotations");
  j["actions"] = file.actions;
  return dump(j);
}
AnnotationFile annotations_from_json(std::string_view text) {
  return guarded("annotations", [&] {
    const json j = parse_document(text, "annotations");
    return AnnotationFile{j.at("actions").get<std::vector<Annotation>>()};
  });
}

std::string to_json(const ValidationReport& report) {
  json j = document("validation");
  j["ok"] = report.ok();
  j["violations"] = report.violations;
  return dump(j);
}

std::string to_json(const BenchReport& report, bool include_timing) {
  json j = document("bench_report");
  j["corpus"] = report.spec;
  j["config"] = report.config;
  j["arms"] = report.arms;
  if (include_timing) {
    json timing = json::object();
    for (const auto& a : report.arms) {
      json ms = json::array();
      for (const auto& r : a.results) ms.push_back(r.elapsed_ms);
      timing[a.arm] = json{{"elapsed_s", a.elapsed_s}, {"mission_ms", std::move(ms)}};
    }
    j["timing"] = std::move(timing);
  }
  return dump(j);
}

BenchReport bench_report_from_json(std::string_view text) {
  return guarded("bench report", [&] {
    const json j = parse_document(text, "bench_report");
    BenchReport r;
    r.spec = j.at("corpus").get<CorpusSpec>();
    r.config = j.at("config").get<Config>();
    r.arms = j.at("arms").get<std::vector<ArmSummary>>();
    if (j.contains("timing")) {
      for (auto& a : r.arms) {
        const auto it = j["timing"].find(a.arm);
        if (it == j["timing"].end()) continue;
        a.elapsed_s = it->value("elapsed_s", 0.0);
        const auto& ms = it->at("mission_ms");
        for (std::size_t i = 0; i < a.results.size() && i < ms.size(); ++i) a.results[i].elapsed_ms = ms[i].get<double>();
      }
    }
    return r;
  });
}

std::string corpus_manifest_json(const Corpus& corpus) {
  json j = document("corpus");
  j["spec"] = corpus.spec;
  j["homes"] = corpus.homes;
  json missions = json::array();
  std::map<std::string, int> counts;
  for (const auto& m : corpus.missions) {
    missions.push_back(json{{"home", m.home},
                            {"index", m.index},
                            {"class", m.script.mission_class},
                            {"script", "missions/" + script_name(m.home, m.index)}});
    ++counts[m.script.mission_class];
  }
  j["class_counts"] = counts;
  j["missions"] = std::move(missions);
  return dump(j);
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "missions", ec);
  if (ec) throw Error("cannot create " + (dir / "missions").string() + ": " + ec.message());
  for (const auto& m : corpus.missions)
    write_text_atomic(dir / "missions" / script_name(m.home, m.index), to_json(m.script));
  write_text_atomic(dir / "manifest.json", corpus_manifest_json(corpus));
}

Corpus read_corpus(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.json";
  if (!fs::exists(manifest)) throw Error("corpus manifest not found: " + manifest.string());
  return guarded("corpus manifest", [&] {
    const json j = parse_document(read_text(manifest), "corpus");
    Corpus c;
    c.spec = j.at("spec").get<CorpusSpec>();
    c.homes = j.at("homes").get<std::vector<HomeSpec>>();
    for (const auto& e : j.at("missions")) {
      CorpusMission m;
      m.home = e.at("home").get<int>();
      m.index = e.at("index").get<int>();
      if (m.home < 0 || m.home >= static_cast<int>(c.homes.size()))
        throw Error("mission refers to unknown home " + std::to_string(m.home));
      m.script = mission_script_from_json(read_text(dir / e.at("script").get<std::string>()));
      c.missions.push_back(std::move(m));
    }
    return c;
  });
}

}  // namespace semlife
