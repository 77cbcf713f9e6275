#include "mott/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace mott {

FigureKind parse_figure_kind(std::string_view s) {
  static const std::map<std::string_view, FigureKind> m = {
      {"route", FigureKind::route},         {"dc-locus", FigureKind::dc_locus},
      {"nyquist", FigureKind::nyquist},     {"rez-map", FigureKind::rez_map},
      {"trdet", FigureKind::trdet},         {"nullclines", FigureKind::nullclines},
      {"portrait", FigureKind::phase_portrait}, {"bifurcation", FigureKind::bifurcation},
      {"time-series", FigureKind::time_series}};
  const auto it = m.find(s);
  if (it == m.end()) throw render_error("unknown figure kind '" + std::string(s) + "'");
  return it->second;
}

namespace {

constexpr double W = 640, H = 480, ML = 80, MR = 30, MT = 40, MB = 60;

std::string fmt(double v, int prec = 4) {
  char buf[48];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, prec);
  return std::string(buf, r.ptr);
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double p0 = 0, p1 = 1;  // pixel range

  double t(double v) const { return log ? std::log10(v) : v; }
  double map(double v) const {
    const double a = t(lo), b = t(hi);
    return p0 + (t(v) - a) / (b - a) * (p1 - p0);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::floor(std::log10(lo)); e <= std::ceil(std::log10(hi)); e += 1.0) {
        const double v = std::pow(10.0, e);
        if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
      }
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

Axis make_axis(std::vector<double> vals, bool log, double p0, double p1) {
  Axis a;
  a.log = log;
  a.p0 = p0;
  a.p1 = p1;
  vals.erase(std::remove_if(vals.begin(), vals.end(),
                            [log](double v) { return !std::isfinite(v) || (log && v <= 0); }),
             vals.end());
  if (vals.empty()) throw render_error("no plottable values");
  auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  a.lo = *mn;
  a.hi = *mx;
  if (a.hi == a.lo) {
    const double d = a.lo == 0 ? 1.0 : std::abs(a.lo) * 0.1;
    a.lo -= d;
    a.hi += d;
  } else if (!log) {
    const double pad = 0.05 * (a.hi - a.lo);
    a.lo -= pad;
    a.hi += pad;
  }
  return a;
}

class Plot {
 public:
  Plot(Axis x, Axis y, std::string xl, std::string yl, std::string title)
      : x_(x), y_(y), xl_(std::move(xl)), yl_(std::move(yl)), title_(std::move(title)) {}

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width = 1.5) {
    std::string d;
    for (const auto& [a, b] : pts) {
      if (!ok(a, b)) continue;
      d += fmt(x_.map(a), 6) + "," + fmt(y_.map(b), 6) + " ";
    }
    if (d.empty()) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << fmt(width)
          << "\" points=\"" << d << "\"/>\n";
  }
  void marker(double a, double b, const std::string& color, double r = 3.5) {
    if (!ok(a, b)) return;
    body_ << "<circle cx=\"" << fmt(x_.map(a), 6) << "\" cy=\"" << fmt(y_.map(b), 6) << "\" r=\""
          << fmt(r) << "\" fill=\"" << color << "\"/>\n";
  }
  // arrow of fixed pixel length along the screen-space direction (dx, dy)
  void glyph(double a, double b, double dxp, double dyp, const std::string& color) {
    if (!ok(a, b)) return;
    const double n = std::hypot(dxp, dyp);
    if (!(n > 0)) return;
    const double L = 9.0, ux = dxp / n, uy = dyp / n;
    const double x0 = x_.map(a) - 0.5 * L * ux, y0 = y_.map(b) - 0.5 * L * uy;
    const double x1 = x0 + L * ux, y1 = y0 + L * uy;
    body_ << "<line x1=\"" << fmt(x0, 6) << "\" y1=\"" << fmt(y0, 6) << "\" x2=\"" << fmt(x1, 6)
          << "\" y2=\"" << fmt(y1, 6) << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
    const double hx = x1 - 3.5 * ux, hy = y1 - 3.5 * uy;
    body_ << "<polygon fill=\"" << color << "\" points=\"" << fmt(x1, 6) << "," << fmt(y1, 6) << " "
          << fmt(hx - 2.5 * uy, 6) << "," << fmt(hy + 2.5 * ux, 6) << " " << fmt(hx + 2.5 * uy, 6)
          << "," << fmt(hy - 2.5 * ux, 6) << "\"/>\n";
  }
  void rect(double a0, double b0, double a1, double b1, const std::string& color) {
    const double xa = x_.map(a0), xb = x_.map(a1), ya = y_.map(b0), yb = y_.map(b1);
    body_ << "<rect x=\"" << fmt(std::min(xa, xb), 6) << "\" y=\"" << fmt(std::min(ya, yb), 6)
          << "\" width=\"" << fmt(std::abs(xb - xa) + 0.3, 6) << "\" height=\""
          << fmt(std::abs(yb - ya) + 0.3, 6) << "\" fill=\"" << color << "\"/>\n";
  }
  const Axis& xa() const { return x_; }
  const Axis& ya() const { return y_; }

  std::string str() const {
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"DejaVu Sans, sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<defs><clipPath id=\"plot\"><rect x=\"" << ML << "\" y=\"" << MT << "\" width=\""
      << W - ML - MR << "\" height=\"" << H - MT - MB << "\"/></clipPath></defs>\n"
      << "<g clip-path=\"url(#plot)\">\n" << body_.str() << "</g>\n";
    o << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR << "\" height=\""
      << H - MT - MB << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : x_.ticks()) {
      const double p = x_.map(v);
      o << "<line x1=\"" << fmt(p, 6) << "\" y1=\"" << H - MB << "\" x2=\"" << fmt(p, 6) << "\" y2=\""
        << H - MB + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fmt(p, 6) << "\" y=\"" << H - MB + 18 << "\" text-anchor=\"middle\">"
        << fmt(v, 3) << "</text>\n";
    }
    for (double v : y_.ticks()) {
      const double p = y_.map(v);
      o << "<line x1=\"" << ML - 5 << "\" y1=\"" << fmt(p, 6) << "\" x2=\"" << ML << "\" y2=\""
        << fmt(p, 6) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ML - 8 << "\" y=\"" << fmt(p + 4, 6) << "\" text-anchor=\"end\">"
        << fmt(v, 3) << "</text>\n";
    }
    o << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << xl_ << "</text>\n"
      << "<text transform=\"translate(18," << (MT + H - MB) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << yl_ << "</text>\n";
    if (!title_.empty())
      o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title_
        << "</text>\n";
    o << "</svg>\n";
    return o.str();
  }

 private:
  bool ok(double a, double b) const {
    return std::isfinite(a) && std::isfinite(b) && !(x_.log && a <= 0) && !(y_.log && b <= 0);
  }
  Axis x_, y_;
  std::string xl_, yl_, title_;
  std::ostringstream body_;
};

const char* palette(std::size_t k) {
  static const char* c[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                            "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};
  return c[k % 10];
}

std::vector<double> col(const Table& t, const std::string& name) {
  std::vector<double> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) out.push_back(t.num(r, name));
  return out;
}

void require(const Table& t, std::initializer_list<const char*> names) {
  if (t.rows.empty()) throw render_error("table '" + t.name + "' is empty");
  for (const char* n : names)
    if (!t.has(n)) throw render_error("table '" + t.name + "' lacks column '" + n + "'");
}

// group row indices by the value of a column (first-appearance order)
std::vector<std::vector<std::size_t>> groups(const Table& t, const std::string& key) {
  std::vector<std::vector<std::size_t>> g;
  if (!t.has(key)) {
    g.emplace_back();
    for (std::size_t r = 0; r < t.rows.size(); ++r) g[0].push_back(r);
    return g;
  }
  std::vector<double> keys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double k = t.num(r, key);
    auto it = std::find(keys.begin(), keys.end(), k);
    if (it == keys.end()) {
      keys.push_back(k);
      g.emplace_back();
      it = keys.end() - 1;
    }
    g[static_cast<std::size_t>(it - keys.begin())].push_back(r);
  }
  return g;
}

std::vector<std::pair<double, double>> pairs(const Table& t, const std::vector<std::size_t>& rows,
                                             const std::string& a, const std::string& b) {
  std::vector<std::pair<double, double>> out;
  for (auto r : rows) out.emplace_back(t.num(r, a), t.num(r, b));
  return out;
}

std::string diverging(double v, double scale) {
  // blue for negative, red for positive, white at zero; signed log scale
  const double m = std::clamp(std::log10(1.0 + std::abs(v)) / std::log10(1.0 + scale), 0.0, 1.0);
  const int lo = static_cast<int>(std::lround(255 * (1.0 - m)));
  char buf[16];
  if (v < 0)
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", lo, lo, 255);
  else
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", 255, lo, lo);
  return buf;
}

}  // namespace

std::string render_figure(const std::vector<Table>& tables, FigureKind kind,
                          const std::string& title) {
  if (tables.empty()) throw render_error("no tables to render");
  const Table& t = tables[0];
  const double x0 = ML, x1 = W - MR, y0 = H - MB, y1 = MT;

  switch (kind) {
    case FigureKind::route: {
      require(t, {"x", "f_x_per_s"});
      auto xs = col(t, "x");
      auto fs = col(t, "f_x_per_s");
      // symmetric-log compression keeps the tiny and huge rates visible
      auto slog = [](double v) { return std::copysign(std::log10(1.0 + std::abs(v)), v); };
      for (auto& f : fs) f = slog(f);
      Plot p(make_axis(xs, true, x0, x1), make_axis(fs, false, y0, y1), "x",
             "sign(f) log10(1+|f_x| s)", title);
      std::size_t k = 0;
      for (const auto& g : groups(t, "bias")) {
        std::vector<std::pair<double, double>> pts;
        for (auto r : g) pts.emplace_back(t.num(r, "x"), slog(t.num(r, "f_x_per_s")));
        p.polyline(pts, palette(k++));
      }
      p.polyline({{p.xa().lo, 0.0}, {p.xa().hi, 0.0}}, "#000000", 0.6);
      return p.str();
    }
    case FigureKind::dc_locus: {
      require(t, {"i_q_A", "v_q_V"});
      Plot p(make_axis(col(t, "i_q_A"), true, x0, x1), make_axis(col(t, "v_q_V"), false, y0, y1),
             "i_Q (A)", "v_Q (V)", title);
      std::vector<std::size_t> all(t.rows.size());
      for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
      p.polyline(pairs(t, all, "i_q_A", "v_q_V"), palette(0));
      return p.str();
    }
    case FigureKind::nyquist: {
      require(t, {"re_ohm", "im_ohm"});
      auto re = col(t, "re_ohm"), im = col(t, "im_ohm");
      std::vector<double> imm = im;
      for (double v : im) imm.push_back(-v);
      re.push_back(0.0);
      Plot p(make_axis(re, false, x0, x1), make_axis(imm, false, y0, y1), "Re Z (Ohm)",
             "Im Z (Ohm)", title);
      std::vector<std::pair<double, double>> up, dn;
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        up.emplace_back(re[r], im[r]);
        dn.emplace_back(re[r], -im[r]);
      }
      p.polyline(up, palette(0));
      p.polyline(dn, palette(0), 0.8);
      p.polyline({{0.0, p.ya().lo}, {0.0, p.ya().hi}}, "#000000", 0.6);
      p.polyline({{p.xa().lo, 0.0}, {p.xa().hi, 0.0}}, "#000000", 0.6);
      return p.str();
    }
    case FigureKind::rez_map: {
      require(t, {"i_A", "f_Hz", "re_ohm"});
      auto is = col(t, "i_A"), fs = col(t, "f_Hz"), re = col(t, "re_ohm");
      std::vector<double> iu = is, fu = fs;
      std::sort(iu.begin(), iu.end());
      iu.erase(std::unique(iu.begin(), iu.end()), iu.end());
      std::sort(fu.begin(), fu.end());
      fu.erase(std::unique(fu.begin(), fu.end()), fu.end());
      if (iu.size() < 2 || fu.size() < 2) throw render_error("rez-map needs a 2D grid");
      Plot p(make_axis(iu, true, x0, x1), make_axis(fu, true, y0, y1), "i_Q (A)", "f (Hz)", title);
      double scale = 0;
      for (double v : re) scale = std::max(scale, std::abs(v));
      auto edge = [](const std::vector<double>& g, std::size_t k, bool upper) {
        if (upper) return k + 1 < g.size() ? std::sqrt(g[k] * g[k + 1]) : g[k];
        return k > 0 ? std::sqrt(g[k] * g[k - 1]) : g[k];
      };
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto ki = static_cast<std::size_t>(std::lower_bound(iu.begin(), iu.end(), is[r]) - iu.begin());
        const auto kf = static_cast<std::size_t>(std::lower_bound(fu.begin(), fu.end(), fs[r]) - fu.begin());
        p.rect(edge(iu, ki, false), edge(fu, kf, false), edge(iu, ki, true), edge(fu, kf, true),
               diverging(re[r], scale));
      }
      if (tables.size() > 1) {
        const Table& c = tables[1];
        require(c, {"i0_A", "f0_Hz", "i1_A", "f1_Hz"});
        for (std::size_t r = 0; r < c.rows.size(); ++r)
          p.polyline({{c.num(r, "i0_A"), c.num(r, "f0_Hz")}, {c.num(r, "i1_A"), c.num(r, "f1_Hz")}},
                     "#000000", 1.2);
      }
      return p.str();
    }
    case FigureKind::trdet: {
      require(t, {"tr", "det"});
      auto tr = col(t, "tr"), det = col(t, "det");
      std::vector<double> xs = tr, ys = det;
      xs.push_back(0.0);
      ys.push_back(0.0);
      Plot p(make_axis(xs, false, x0, x1), make_axis(ys, false, y0, y1), "tr (1/s)", "det (1/s^2)", title);
      std::vector<std::pair<double, double>> par;
      for (int k = 0; k <= 200; ++k) {
        const double x = p.xa().lo + (p.xa().hi - p.xa().lo) * k / 200.0;
        par.emplace_back(x, 0.25 * x * x);
      }
      p.polyline(par, "#7f7f7f", 1.0);
      p.polyline({{0.0, p.ya().lo}, {0.0, p.ya().hi}}, "#000000", 0.6);
      p.polyline({{p.xa().lo, 0.0}, {p.xa().hi, 0.0}}, "#000000", 0.6);
      std::size_t k = 0;
      for (const auto& g : groups(t, "branch")) p.polyline(pairs(t, g, "tr", "det"), palette(k++));
      for (std::size_t r = 0; r < t.rows.size(); ++r) p.marker(tr[r], det[r], "#000000", 1.5);
      return p.str();
    }
    case FigureKind::nullclines: {
      require(t, {"x", "v0_V", "v1_V"});
      auto xs = col(t, "x");
      std::vector<double> vs = col(t, "v0_V");
      for (double v : col(t, "v1_V")) vs.push_back(v);
      vs.push_back(0.0);
      Plot p(make_axis(xs, true, x0, x1), make_axis(vs, false, y0, y1), "x", "v (V)", title);
      std::vector<std::size_t> all(t.rows.size());
      for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
      if (tables.size() > 1 && tables[1].has("dx_dt")) {
        const Table& f = tables[1];
        require(f, {"x", "v_V", "dx_dt", "dv_dt"});
        for (std::size_t r = 0; r < f.rows.size(); ++r) {
          // screen direction: chain rule through the log x axis
          const double x = f.num(r, "x"), v = f.num(r, "v_V");
          const double sx = (p.xa().p1 - p.xa().p0) / (std::log10(p.xa().hi) - std::log10(p.xa().lo));
          const double sy = (p.ya().p1 - p.ya().p0) / (p.ya().hi - p.ya().lo);
          const double dxp = sx * f.num(r, "dx_dt") / (x * std::log(10.0));
          const double dyp = sy * f.num(r, "dv_dt");
          p.glyph(x, v, dxp, dyp, "#9a9a9a");
        }
      }
      p.polyline(pairs(t, all, "x", "v0_V"), "#6a3d9a", 2.0);
      p.polyline(pairs(t, all, "x", "v1_V"), "#8c564b", 2.0);
      for (std::size_t k = 1; k < tables.size(); ++k) {
        const Table& q = tables[k];
        if (!q.has("x_q") || !q.has("v_q")) continue;
        for (std::size_t r = 0; r < q.rows.size(); ++r) p.marker(q.num(r, "x_q"), q.num(r, "v_q"), "#d62728");
      }
      return p.str();
    }
    case FigureKind::phase_portrait: {
      require(t, {"orbit", "x", "v_V"});
      Plot p(make_axis(col(t, "x"), false, x0, x1), make_axis(col(t, "v_V"), false, y0, y1), "x",
             "v (V)", title);
      std::size_t k = 0;
      for (const auto& g : groups(t, "orbit")) p.polyline(pairs(t, g, "x", "v_V"), palette(k++), 0.8);
      return p.str();
    }
    case FigureKind::bifurcation: {
      require(t, {"value", "v_min", "v_max"});
      std::vector<double> ys = col(t, "v_min");
      for (double v : col(t, "v_max")) ys.push_back(v);
      Plot p(make_axis(col(t, "value"), false, x0, x1), make_axis(ys, false, y0, y1), "parameter",
             "v extrema (V)", title);
      std::vector<std::size_t> all(t.rows.size());
      for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
      p.polyline(pairs(t, all, "value", "v_min"), palette(0));
      p.polyline(pairs(t, all, "value", "v_max"), palette(1));
      for (auto r : all) {
        p.marker(t.num(r, "value"), t.num(r, "v_min"), palette(0), 2.0);
        p.marker(t.num(r, "value"), t.num(r, "v_max"), palette(1), 2.0);
      }
      return p.str();
    }
    case FigureKind::time_series: {
      require(t, {"t_s", "v_V"});
      Plot p(make_axis(col(t, "t_s"), false, x0, x1), make_axis(col(t, "v_V"), false, y0, y1), "t (s)",
             "v (V)", title);
      std::vector<std::size_t> all(t.rows.size());
      for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
      p.polyline(pairs(t, all, "t_s", "v_V"), palette(0), 1.0);
      return p.str();
    }
  }
  throw render_error("unhandled figure kind");
}

}  // namespace mott
