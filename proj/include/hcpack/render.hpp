#pragma once

// SVG of a 2-D packing. Output depends only on the input, so it can be diffed.

#include "hcpack/boxes.hpp"
#include "hcpack/geometry.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcpack {

struct RenderOptions {
  double size = 600;  // pixels along the longer container side
  double margin = 10;
};

namespace detail {

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Fill colour from the item id; a fixed palette keeps output stable.
inline const char* fill_for(int id) {
  static const char* palette[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3",
                                  "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd"};
  return palette[static_cast<unsigned>(id) % 10];
}

}  // namespace detail

inline std::string render_svg(const Packing& p, const std::vector<BoxSpec>& boxes = {}, RenderOptions opt = {}) {
  if (p.container.dim() != 2) throw std::invalid_argument("render_svg: only d = 2 is supported");
  const Cuboid& c = p.container;
  const double w0 = c.side(0).get_d(), h0 = c.side(1).get_d();
  const double scale = opt.size / std::max(w0, h0);
  const double W = w0 * scale + 2 * opt.margin, H = h0 * scale + 2 * opt.margin;
  // y grows upward in the packing, downward in SVG.
  auto X = [&](const Scalar& x) { return opt.margin + Scalar(x - c.lower(0)).get_d() * scale; };
  auto Y = [&](const Scalar& y, const Scalar& h) {
    return opt.margin + (h0 - Scalar(y - c.lower(1) + h).get_d()) * scale;
  };
  using detail::px;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(W) << "\" height=\"" << px(H) << "\" viewBox=\"0 0 "
    << px(W) << ' ' << px(H) << "\">\n";
  o << "<rect x=\"" << px(opt.margin) << "\" y=\"" << px(opt.margin) << "\" width=\"" << px(w0 * scale)
    << "\" height=\"" << px(h0 * scale) << "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
  for (const auto& pl : p.placements) {
    const double s = pl.item.side.get_d() * scale;
    o << "<rect x=\"" << px(X(pl.pos[0])) << "\" y=\"" << px(Y(pl.pos[1], pl.item.side)) << "\" width=\"" << px(s)
      << "\" height=\"" << px(s) << "\" fill=\"" << detail::fill_for(pl.item.id)
      << "\" stroke=\"#333\" stroke-width=\"0.5\"><title>item " << pl.item.id << " side " << to_string(pl.item.side)
      << " profit " << to_string(pl.item.profit) << "</title></rect>\n";
  }
  for (const auto& b : boxes) {
    o << "<rect x=\"" << px(X(b.shell.lower(0))) << "\" y=\"" << px(Y(b.shell.lower(1), b.shell.side(1)))
      << "\" width=\"" << px(b.shell.side(0).get_d() * scale) << "\" height=\"" << px(b.shell.side(1).get_d() * scale)
      << "\" fill=\"none\" stroke=\"" << (b.kind == BoxKind::V ? "#1f4e9c" : "#b22222")
      << "\" stroke-width=\"1.5\" stroke-dasharray=\"4 2\"><title>" << to_string(b.kind) << "-Box s_hat "
      << to_string(b.s_hat) << (b.tag.empty() ? "" : " " + b.tag) << "</title></rect>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace hcpack
