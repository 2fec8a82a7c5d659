#include "svg.hpp"

#include <algorithm>
#include <ostream>

namespace he::svg {

namespace {

struct Frame {
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  double scale = 1.0;
  double margin = 10.0;

  void fit(const std::vector<Complex>& pts) {
    for (const auto& p : pts) {
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
      ymin = std::min(ymin, p.imag());
      ymax = std::max(ymax, p.imag());
    }
  }
  void finish() { scale = 800.0 / std::max({xmax - xmin, ymax - ymin, 1e-9}); }
  double width() const { return (xmax - xmin) * scale + 2 * margin; }
  double height() const { return (ymax - ymin) * scale + 2 * margin; }
  // SVG y grows downwards.
  void point(std::ostream& os, Complex z) const {
    os << margin + (z.real() - xmin) * scale << ',' << margin + (ymax - z.imag()) * scale;
  }
};

void polyline(std::ostream& os, const Frame& f, const std::vector<Complex>& pts, const char* style) {
  os << "<polyline fill=\"none\" " << style << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    f.point(os, pts[i]);
  }
  os << "\"/>\n";
}

void header(std::ostream& os, const Frame& f) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width() << "\" height=\"" << f.height()
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::vector<Complex> embedded(const std::vector<Vertex>& vs) {
  std::vector<Complex> out;
  for (const auto& v : vs) out.push_back(embed(v));
  return out;
}

}  // namespace

void write_domain(std::ostream& os, const LatticeDomain& d, const std::vector<std::vector<Complex>>& paths) {
  const auto plus = embedded(d.arc_plus());
  const auto minus = embedded(d.arc_minus());
  Frame f;
  f.xmin = f.xmax = plus.front().real();
  f.ymin = f.ymax = plus.front().imag();
  f.fit(plus);
  f.fit(minus);
  f.finish();
  header(os, f);
  polyline(os, f, minus, "stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
  polyline(os, f, plus, "stroke=\"black\" stroke-width=\"3\"");
  for (const auto& p : paths) polyline(os, f, p, "stroke=\"#c0392b\" stroke-width=\"1.5\"");
  os << "</svg>\n";
}

void write_curves(std::ostream& os, const std::vector<std::vector<Complex>>& curves) {
  Frame f;
  f.xmin = -1.0;
  f.xmax = 1.0;
  f.ymin = 0.0;
  f.ymax = 1.0;
  for (const auto& c : curves) f.fit(c);
  f.finish();
  header(os, f);
  polyline(os, f, {Complex(f.xmin, 0.0), Complex(f.xmax, 0.0)}, "stroke=\"gray\" stroke-width=\"1\"");
  for (const auto& c : curves) polyline(os, f, c, "stroke=\"#2c3e50\" stroke-width=\"1\"");
  os << "</svg>\n";
}

}  // namespace he::svg
