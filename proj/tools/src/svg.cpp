#include "birgn/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace birgn::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Blue -> white -> red.
std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double s = t / 0.5;
    r = static_cast<int>(40 + s * 215);
    g = static_cast<int>(80 + s * 175);
    b = 255;
  } else {
    const double s = (t - 0.5) / 0.5;
    r = 255;
    g = static_cast<int>(255 - s * 205);
    b = static_cast<int>(255 - s * 215);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

void line_plot(std::ostream& out, const Field& rec, const std::optional<Field>& truth) {
  const double W = 640, H = 400, L = 60, R = 20, T = 40, B = 40;
  double lo = rec.values().minCoeff(), hi = rec.values().maxCoeff();
  if (truth) {
    lo = std::min(lo, truth->values().minCoeff());
    hi = std::max(hi, truth->values().maxCoeff());
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](double t) { return L + t * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - lo) / (hi - lo) * (H - T - B); };
  auto path = [&](const Field& f) {
    std::string d;
    const auto& g = *f.grid();
    for (std::size_t i = 0; i < f.size(); ++i) {
      d += (i == 0 ? "M" : " L") + num(px(g.coord(i, 0))) + "," + num(py(f[i]));
    }
    return d;
  };
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    out << "<text x=\"" << L - 6 << "\" y=\"" << num(py(v) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
        << label(v) << "</text>\n";
    const double t = k / 4.0;
    out << "<text x=\"" << num(px(t)) << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
        << label(t) << "</text>\n";
  }
  if (truth) {
    out << "<path d=\"" << path(*truth) << "\" fill=\"none\" stroke=\"#222\" stroke-dasharray=\"6,4\"/>\n";
  }
  out << "<path d=\"" << path(rec) << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
  out << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 16
      << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#c0392b\">reconstruction</text>\n";
  if (truth) {
    out << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 32
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#222\">truth (dashed)</text>\n";
  }
}

void heat_map(std::ostream& out, const Field& f, double x0, double y0, double size, double lo, double hi,
              const std::string& caption) {
  const auto& g = *f.grid();
  const int n = g.points_per_axis();
  const double cell = size / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = f[g.index(i, j)];
      // y axis points up.
      out << "<rect x=\"" << num(x0 + i * cell) << "\" y=\"" << num(y0 + (n - 1 - j) * cell) << "\" width=\""
          << num(cell + 0.3) << "\" height=\"" << num(cell + 0.3) << "\" fill=\"" << colour((v - lo) / (hi - lo))
          << "\"/>\n";
    }
  }
  out << "<text x=\"" << num(x0 + size / 2) << "\" y=\"" << num(y0 + size + 18)
      << "\" font-size=\"12\" text-anchor=\"middle\">" << escape(caption) << "</text>\n";
}

}  // namespace

void write_plot_svg(std::ostream& out, const Field& rec, const std::optional<Field>& truth,
                    const std::string& title) {
  const bool two_d = rec.grid()->dimension() == 2;
  const double W = two_d ? 700 : 640, H = two_d ? 400 : 400;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << ' ' << H << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";
  if (!two_d) {
    line_plot(out, rec, truth);
  } else {
    double lo = rec.values().minCoeff(), hi = rec.values().maxCoeff();
    if (truth) {
      lo = std::min(lo, truth->values().minCoeff());
      hi = std::max(hi, truth->values().maxCoeff());
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    if (truth) {
      heat_map(out, *truth, 30, 50, 300, lo, hi, "truth");
      heat_map(out, rec, 370, 50, 300, lo, hi, "reconstruction");
    } else {
      heat_map(out, rec, 200, 50, 300, lo, hi, "reconstruction");
    }
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 8 << "\" font-size=\"11\" text-anchor=\"middle\">colour scale "
        << label(lo) << " (blue) to " << label(hi) << " (red)</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace birgn::cli
