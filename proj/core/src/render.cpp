#include "semlife/render.hpp"

#include <cstdio>
#include <sstream>

namespace semlife {

namespace {

const char* const kPalette[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
                                "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(const GridFrame& f, double scale) : f_(f), s_(scale) {}

  double px(Point world) const { return f_.to_cell_units(world).x * s_; }
  double py(Point world) const { return (f_.height - f_.to_cell_units(world).y) * s_; }

  std::string path(const Polygon& poly) const {
    std::string d;
    for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
      d += i == 0 ? "M" : " L";
      d += num(px(poly.vertices[i])) + " " + num(py(poly.vertices[i]));
    }
    return d + " Z";
  }

  // Row runs of set cells as rectangles.
  void cells(std::ostringstream& os, const Mask& m, const char* cls, const char* fill) const {
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width();) {
        if (!m(x, y)) {
          ++x;
          continue;
        }
        int e = x;
        while (e < m.width() && m(e, y)) ++e;
        os << "<rect class=\"" << cls << "\" x=\"" << num(x * s_) << "\" y=\"" << num((f_.height - y - 1) * s_)
           << "\" width=\"" << num((e - x) * s_) << "\" height=\"" << num(s_) << "\" fill=\"" << fill << "\"/>\n";
        x = e;
      }
  }

  void line(std::ostringstream& os, const Divider& d, const char* cls, const char* extra) const {
    os << "<line class=\"" << cls << "\" data-divider-id=\"" << d.id << "\" x1=\"" << num(px(d.a)) << "\" y1=\""
       << num(py(d.a)) << "\" x2=\"" << num(px(d.b)) << "\" y2=\"" << num(py(d.b)) << "\"" << extra << "/>\n";
  }

 private:
  const GridFrame& f_;
  double s_;
};

}  // namespace

std::string render_svg(const SemanticMap& map, const TransferTrace* trace, const RenderOptions& opt) {
  const GridFrame& f = map.grid.frame();
  const Canvas c(f, opt.pixels_per_cell);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width * opt.pixels_per_cell) << "\" height=\""
     << num(f.height * opt.pixels_per_cell) << "\" data-version=\"" << map.version << "\">\n"
     << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  os << "<g id=\"unknown\">\n";
  c.cells(os, map.grid.unknown(), "unknown", "#c8c8c8");
  os << "</g>\n<g id=\"rooms\">\n";
  for (const auto& r : map.rooms) {
    const char* fill = kPalette[static_cast<std::size_t>(r.id > 0 ? r.id : -r.id) % std::size(kPalette)];
    os << "<path class=\"room\" data-room-id=\"" << r.id << "\" d=\"" << c.path(r.boundary) << "\" fill=\"" << fill
       << "\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
  }
  os << "</g>\n";
  if (trace != nullptr) {
    os << "<g id=\"tracked\">\n";
    for (const auto& r : trace->tracked.rooms)
      os << "<path class=\"tracked\" data-room-id=\"" << r.id << "\" d=\"" << c.path(r.boundary)
         << "\" fill=\"none\" stroke=\"#e41a1c\" stroke-width=\"1.5\"/>\n";
    os << "</g>\n";
  }
  os << "<g id=\"clutter\">\n";
  c.cells(os, map.labels.clutter, "clutter", "#a6761d");
  os << "</g>\n<g id=\"walls\">\n";
  c.cells(os, map.labels.wall, "wall", "#000000");
  os << "</g>\n<g id=\"meta-occupancy\">\n";
  c.cells(os, map.meta.occupancy_wall, "meta meta-wall", "#377eb8");
  c.cells(os, map.meta.occupancy_free, "meta meta-free", "#4daf4a");
  os << "</g>\n<g id=\"dividers\">\n";
  for (const auto& d : map.dividers) c.line(os, d, "divider", " stroke=\"#ff7f00\" stroke-width=\"2\"");
  os << "</g>\n<g id=\"meta-dividers\">\n";
  for (const auto& d : map.meta.dividers)
    c.line(os, d, "meta meta-divider", " stroke=\"#377eb8\" stroke-width=\"2\" stroke-dasharray=\"4 2\"");
  os << "</g>\n";
  if (opt.labels) {
    os << "<g id=\"labels\">\n";
    for (const auto& r : map.rooms) {
      if (r.boundary.vertices.empty()) continue;
      Point m{};
      for (const auto& v : r.boundary.vertices) m = {m.x + v.x, m.y + v.y};
      const double n = static_cast<double>(r.boundary.vertices.size());
      m = {m.x / n, m.y / n};
      os << "<text class=\"label\" x=\"" << num(c.px(m)) << "\" y=\"" << num(c.py(m))
         << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(r.label) << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace semlife
