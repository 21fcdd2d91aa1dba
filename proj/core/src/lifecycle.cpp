#include "semlife/lifecycle.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace semlife {

std::string to_string(Outcome o) { return o == Outcome::Accepted ? "Accepted" : "Rejected"; }

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void rebuild(SemanticMap& map, const Config& cfg) {
  std::vector<TrackedRoom> current;
  for (const auto& r : map.rooms) current.push_back({r.id, r.label, r.boundary});
  map.rooms = reconstruct_rooms(wall_mask(map.labels, map.meta), map.dividers, map.grid, map.meta, current, cfg,
                                map.next_room_id());
}

std::string describe(const Violation& v) {
  std::ostringstream os;
  os << v.semantic << " " << v.constraint;
  if (!v.location.empty()) os << " at " << v.location;
  return os.str();
}

SemanticMap settle(SemanticMap map, const Config& cfg) {
  for (int round = 0; round < 3; ++round) {
    TransferResult t = transfer_semantics(map, map.grid, MotionEstimate::identity(), cfg, map.meta);
    SemanticMap next = std::move(t.candidate);
    next.version = map.version;
    if (next.rooms == map.rooms && next.dividers == map.dividers && next.labels == map.labels) break;
    if (next.rooms.size() != map.rooms.size() || !validate_constraints(next, cfg).ok()) break;
    map = std::move(next);
  }
  return map;
}

}  // namespace

AnnotationResult apply_annotations(SemanticMap& map, const AnnotationFile& file, const Config& cfg) {
  AnnotationResult out;
  for (std::size_t i = 0; i < file.actions.size(); ++i) {
    const Annotation& a = file.actions[i];
    const int idx = static_cast<int>(i);
    auto reject = [&](std::string why) { out.invalid.emplace_back(idx, std::move(why)); };

    if (a.op == "rename_room") {
      auto it = std::find_if(map.rooms.begin(), map.rooms.end(), [&](const Room& r) { return r.id == a.id; });
      if (it == map.rooms.end()) {
        reject("unknown room " + std::to_string(a.id));
        continue;
      }
      it->label = a.label;
      out.applied.push_back(idx);
    } else if (a.op == "add_divider" || a.op == "remove_divider") {
      SemanticMap trial = map;
      if (a.op == "add_divider") {
        trial.dividers.push_back({map.next_divider_id(), a.a, a.b, DividerKind::User});
      } else {
        auto it = std::find_if(trial.dividers.begin(), trial.dividers.end(),
                               [&](const Divider& d) { return d.id == a.id; });
        if (it == trial.dividers.end()) {
          reject("unknown divider " + std::to_string(a.id));
          continue;
        }
        trial.dividers.erase(it);
      }
      rebuild(trial, cfg);
      const ValidationReport v = validate_constraints(trial, cfg);
      if (!v.ok()) {
        reject("breaks constraint: " + describe(v.violations.front()));
        continue;
      }
      map = std::move(trial);
      out.applied.push_back(idx);
    } else if (a.op == "reject_update") {
      out.reject_update = true;
      out.applied.push_back(idx);
    } else if (a.op == "accept_update") {
      out.applied.push_back(idx);
    } else {
      reject("unknown op '" + a.op + "'");
    }
  }
  return out;
}

MissionOutcome process_mission(const SemanticMap& current, const OccupancyGrid& grid, const MotionEstimate& motion,
                               const AnnotationFile* annotations, const Config& cfg, Arm arm) {
  const auto t0 = Clock::now();
  MissionOutcome out;
  MissionRecord& rec = out.record;
  rec.version_before = current.version;
  rec.version_after = current.version;

  Resolved resolved;
  try {
    resolved = resolve_conflicts(current, grid, motion, cfg, arm);
  } catch (const Error& e) {
    rec.reason = std::string("transfer failed: ") + e.what();
    rec.conflicts.arm = to_string(arm);
    rec.timings.total_ms = ms_since(t0);
    return out;
  }
  rec.timings.resolve_ms = ms_since(t0);

  const auto t1 = Clock::now();
  Discovered found = discover(current, resolved.candidate, cfg, &resolved.trace.tracked);
  rec.timings.discover_ms = ms_since(t1);
  rec.conflicts = std::move(resolved.report);
  rec.discovery = std::move(found.report);
  rec.violations = validate_constraints(found.map, cfg).violations;

  if (!rec.conflicts.success()) {
    std::ostringstream os;
    os << "conflicts unresolved:";
    for (const auto& r : rec.conflicts.rooms)
      if (r.status != RoomStatus::Transferred) os << " room " << r.room_id << " " << to_string(r.status) << ";";
    for (int id : rec.conflicts.unplaced_dividers) os << " divider " << id << " unplaced;";
    rec.reason = os.str();
    rec.reason.pop_back();
  } else if (!rec.violations.empty()) {
    rec.reason = "constraint violations: " + std::to_string(rec.violations.size());
  } else {
    SemanticMap next = std::move(found.map);
    next.version = current.version + 1;
    if (annotations != nullptr) rec.annotations = apply_annotations(next, *annotations, cfg);
    if (rec.annotations.reject_update) {
      rec.reason = "update rejected by user";
    } else {
      rec.outcome = Outcome::Accepted;
      rec.version_after = next.version;
      out.map = std::move(next);
    }
  }
  rec.timings.total_ms = ms_since(t0);
  return out;
}

SemanticMap bootstrap_map(const OccupancyGrid& grid, const std::optional<SemanticMap>& seed, const Config& cfg) {
  cfg.validate();
  const GridFrame& frame = grid.frame();
  SemanticMap map;
  if (seed) {
    map = *seed;
    map.version = 0;
    if (!(map.grid == grid)) throw Error("seed semantics belong to a different grid");
    if (map.labels.wall.width() != frame.width || map.labels.wall.height() != frame.height)
      map.labels = {grid.occupied(), Mask(frame.width, frame.height)};
    if (map.meta.occupancy_wall.width() != frame.width || map.meta.occupancy_wall.height() != frame.height)
      map.meta = MetaLayer::empty_for(frame);
  } else {
    map.grid = grid;
    map.labels = {grid.occupied(), Mask(frame.width, frame.height)};
    map.meta = MetaLayer::empty_for(frame);
    const Mask walls = wall_mask(map.labels, map.meta);
    const Mask region = grid.free() - walls;
    if (region.none()) throw Error("no enclosed free space");
    map.dividers = estimate_dividers(region, walls, cfg, frame, 1);
    map.rooms = reconstruct_rooms(walls, map.dividers, grid, map.meta, {}, cfg, 1);
    map = settle(std::move(map), cfg);
  }
  if (map.rooms.empty()) throw Error("no enclosed free space");
  const ValidationReport v = validate_constraints(map, cfg);
  if (!v.ok())
    throw Error("version-0 map breaks " + std::to_string(v.violations.size()) +
                " constraint(s), first: " + describe(v.violations.front()));
  return map;
}

}  // namespace semlife
