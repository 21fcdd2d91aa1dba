#pragma once

// SVG rendering of semantic maps and transfer traces.
//
// Layers, bottom to top: unknown space, rooms (one filled path each, with a
// data-room-id), tracked boundaries (red, trace only), clutter, walls
// (black), meta occupancy, dividers, meta dividers (dashed, class "meta"),
// room labels. Output bytes depend only on the inputs.

#include <string>

#include "semlife/transfer.hpp"

namespace semlife {

struct RenderOptions {
  double pixels_per_cell = 4.0;
  bool labels = true;
};

std::string render_svg(const SemanticMap& map, const TransferTrace* trace = nullptr, const RenderOptions& opt = {});

}  // namespace semlife
