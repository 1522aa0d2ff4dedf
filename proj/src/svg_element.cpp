#include "texprint/svg_element.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <Eigen/SVD>

#include "texprint/error.hpp"

namespace texprint {

namespace {

using geom2d::Polygon2;
using geom2d::Ring;
using boost::property_tree::ptree;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxPieces = 100000;

struct Affine {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  Vec2 t = Vec2::Zero();

  Vec2 operator()(const Vec2& p) const { return m * p + t; }
  Affine operator*(const Affine& o) const { return {m * o.m, m * o.t + t}; }
  double max_scale() const { return std::max(Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues()(0), 1e-300); }
};

std::string_view local_name(std::string_view tag) {
  const auto colon = tag.find(':');
  return colon == std::string_view::npos ? tag : tag.substr(colon + 1);
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

// Tokenizer shared by path data, point lists and transforms.
class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (pos_ < s_.size() && (is_space(s_[pos_]) || s_[pos_] == ',')) ++pos_;
  }
  void skip_spaces() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }
  bool done() {
    skip_separators();
    return pos_ >= s_.size();
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return s_[pos_++]; }

  bool at_number() {
    skip_separators();
    const char c = peek();
    return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
  }

  double number() {
    skip_separators();
    std::size_t p = pos_;
    if (p < s_.size() && s_[p] == '+') ++p;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s_.data() + p, s_.data() + s_.size(), v);
    if (ec != std::errc()) throw ParseError("expected a number at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    pos_ = static_cast<std::size_t>(end - s_.data());
    return v;
  }

  bool flag() {
    skip_separators();
    const char c = peek();
    if (c != '0' && c != '1') throw ParseError("expected an arc flag at offset " + std::to_string(pos_));
    ++pos_;
    return c == '1';
  }

  std::string_view word() {
    skip_separators();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// Length in user units (mm); absolute units convert to millimetres.
std::optional<double> parse_length(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  std::string_view s = *text;
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.back() == '%') return std::nullopt;
  std::size_t p = s.front() == '+' ? 1 : 0;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data() + p, s.data() + s.size(), v);
  if (ec != std::errc()) throw ParseError("bad length '" + std::string(s) + "'");
  const std::string_view unit = s.substr(static_cast<std::size_t>(end - s.data()));
  if (unit.empty() || unit == "px" || unit == "mm") return v;
  if (unit == "cm") return v * 10.0;
  if (unit == "in") return v * 25.4;
  throw ParseError("unsupported length unit '" + std::string(unit) + "'");
}

std::optional<std::string> attr(const ptree& node, const char* name) {
  if (auto a = node.get_child_optional("<xmlattr>")) {
    if (auto v = a->get_optional<std::string>(name)) return *v;
  }
  return std::nullopt;
}

double length_or(const ptree& node, const char* name, double fallback) {
  return parse_length(attr(node, name)).value_or(fallback);
}

Affine parse_transform(std::string_view text) {
  Affine total;
  Scanner sc(text);
  while (!sc.done()) {
    const std::string_view name = sc.word();
    sc.skip_spaces();
    if (sc.peek() != '(') throw ParseError("bad transform '" + std::string(text) + "'");
    sc.get();
    std::vector<double> a;
    while (sc.at_number()) a.push_back(sc.number());
    sc.skip_separators();
    if (sc.peek() != ')') throw ParseError("bad transform '" + std::string(text) + "'");
    sc.get();
    Affine t;
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (a.size() < lo || a.size() > hi) throw ParseError("wrong argument count in transform '" + std::string(text) + "'");
    };
    if (name == "matrix") {
      need(6, 6);
      t.m << a[0], a[2], a[1], a[3];
      t.t = Vec2(a[4], a[5]);
    } else if (name == "translate") {
      need(1, 2);
      t.t = Vec2(a[0], a.size() > 1 ? a[1] : 0.0);
    } else if (name == "scale") {
      need(1, 2);
      t.m = Vec2(a[0], a.size() > 1 ? a[1] : a[0]).asDiagonal();
    } else if (name == "rotate") {
      if (a.size() != 1 && a.size() != 3) throw ParseError("wrong argument count in transform '" + std::string(text) + "'");
      const double r = a[0] * kPi / 180.0;
      t.m << std::cos(r), -std::sin(r), std::sin(r), std::cos(r);
      if (a.size() == 3) {
        const Vec2 c(a[1], a[2]);
        t.t = c - t.m * c;
      }
    } else if (name == "skewX") {
      need(1, 1);
      t.m(0, 1) = std::tan(a[0] * kPi / 180.0);
    } else if (name == "skewY") {
      need(1, 1);
      t.m(1, 0) = std::tan(a[0] * kPi / 180.0);
    } else {
      throw ParseError("unknown transform '" + std::string(name) + "'");
    }
    total = total * t;
  }
  return total;
}

// Pieces needed so a circular arc of radius r and sweep theta keeps within
// the chord deviation and the per-turn minimum.
int arc_pieces(double r, double sweep, double tol, int min_per_turn) {
  const double turns = std::abs(sweep) / (2 * kPi);
  double n = std::ceil(turns * min_per_turn);
  if (r > tol) n = std::max(n, std::ceil(std::abs(sweep) / (2.0 * std::acos(1.0 - tol / r))));
  return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(kMaxPieces)));
}

double turning(std::initializer_list<Vec2> control) {
  std::vector<Vec2> legs;
  const Vec2* prev = nullptr;
  for (const Vec2& p : control) {
    if (prev && (p - *prev).norm() > 0) legs.push_back(p - *prev);
    prev = &p;
  }
  double total = 0.0;
  for (std::size_t i = 1; i < legs.size(); ++i)
    total += std::abs(std::atan2(legs[i - 1].x() * legs[i].y() - legs[i - 1].y() * legs[i].x(), legs[i - 1].dot(legs[i])));
  return total;
}

class RingBuilder {
 public:
  RingBuilder(const SvgOptions& options, double tol) : options_(options), tol_(tol) {}

  void move_to(const Vec2& p) {
    finish_open();
    current_ = {p};
    start_ = p;
  }
  void line_to(const Vec2& p) {
    if (current_.empty()) current_.push_back(last_);
    current_.push_back(p);
  }
  void close() {
    if (current_.size() >= 3) rings_.push_back(current_);
    current_.clear();
    last_ = start_;
  }

  void cubic(const Vec2& p0, const Vec2& p1, const Vec2& p2, const Vec2& p3) {
    const double m = std::max((p0 - 2 * p1 + p2).norm(), (p1 - 2 * p2 + p3).norm());
    const int n = pieces(std::sqrt(6.0 * m / (8.0 * tol_)), turning({p0, p1, p2, p3}));
    for (int i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n, s = 1 - t;
      line_to(s * s * s * p0 + 3 * s * s * t * p1 + 3 * s * t * t * p2 + t * t * t * p3);
    }
  }

  void quadratic(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    const double m = (p0 - 2 * p1 + p2).norm();
    const int n = pieces(std::sqrt(2.0 * m / (8.0 * tol_)), turning({p0, p1, p2}));
    for (int i = 1; i <= n; ++i) {
      const double t = static_cast<double>(i) / n, s = 1 - t;
      line_to(s * s * p0 + 2 * s * t * p1 + t * t * p2);
    }
  }

  // Endpoint-parameterized elliptical arc.
  void arc(const Vec2& p1, double rx, double ry, double phi_deg, bool large, bool sweep, const Vec2& p2) {
    if (p1 == p2) return;
    rx = std::abs(rx);
    ry = std::abs(ry);
    if (rx == 0 || ry == 0) {
      line_to(p2);
      return;
    }
    const double phi = phi_deg * kPi / 180.0, c = std::cos(phi), s = std::sin(phi);
    const Vec2 h = (p1 - p2) / 2;
    const Vec2 q(c * h.x() + s * h.y(), -s * h.x() + c * h.y());
    const double lambda = q.x() * q.x() / (rx * rx) + q.y() * q.y() / (ry * ry);
    if (lambda > 1) {
      rx *= std::sqrt(lambda);
      ry *= std::sqrt(lambda);
    }
    const double num = rx * rx * ry * ry - rx * rx * q.y() * q.y() - ry * ry * q.x() * q.x();
    const double den = rx * rx * q.y() * q.y() + ry * ry * q.x() * q.x();
    double k = std::sqrt(std::max(0.0, num / den));
    if (large == sweep) k = -k;
    const Vec2 cq(k * rx * q.y() / ry, -k * ry * q.x() / rx);
    const Vec2 center(c * cq.x() - s * cq.y() + (p1.x() + p2.x()) / 2, s * cq.x() + c * cq.y() + (p1.y() + p2.y()) / 2);
    const double t1 = std::atan2((q.y() - cq.y()) / ry, (q.x() - cq.x()) / rx);
    const double t2 = std::atan2((-q.y() - cq.y()) / ry, (-q.x() - cq.x()) / rx);
    double dt = t2 - t1;
    if (sweep && dt < 0) dt += 2 * kPi;
    if (!sweep && dt > 0) dt -= 2 * kPi;
    const int n = arc_pieces(std::max(rx, ry), dt, tol_, options_.min_circle_segments);
    for (int i = 1; i < n; ++i) {
      const double t = t1 + dt * i / n;
      const Vec2 e(rx * std::cos(t), ry * std::sin(t));
      line_to(center + Vec2(c * e.x() - s * e.y(), s * e.x() + c * e.y()));
    }
    line_to(p2);
  }

  void ellipse(const Vec2& center, double rx, double ry) {
    if (rx <= 0 || ry <= 0) return;
    const int n = arc_pieces(std::max(rx, ry), 2 * kPi, tol_, options_.min_circle_segments);
    Ring r;
    for (int i = 0; i < n; ++i) {
      const double t = 2 * kPi * i / n;
      r.emplace_back(center.x() + rx * std::cos(t), center.y() + ry * std::sin(t));
    }
    rings_.push_back(std::move(r));
  }

  void set_last(const Vec2& p) { last_ = p; }

  // Rings collected so far, mapped through xf; open subpaths are dropped
  // unless their ends meet.
  std::vector<Ring> take(const Affine& xf) {
    finish_open();
    std::vector<Ring> out;
    for (Ring& r : rings_) {
      for (Vec2& p : r) p = xf(p);
      out.push_back(std::move(r));
    }
    rings_.clear();
    return out;
  }

 private:
  int pieces(double by_deviation, double by_turning) const {
    const double n = std::max(std::ceil(by_deviation), std::ceil(by_turning * options_.min_circle_segments / (2 * kPi)));
    return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(kMaxPieces)));
  }

  void finish_open() {
    if (current_.size() >= 4 && (current_.front() - current_.back()).norm() <= geom2d::kDuplicateSpacing) {
      current_.pop_back();
      rings_.push_back(current_);
    }
    current_.clear();
  }

  const SvgOptions& options_;
  double tol_;
  Ring current_;
  Vec2 start_ = Vec2::Zero();
  Vec2 last_ = Vec2::Zero();
  std::vector<Ring> rings_;
};

bool is_command(char c) { return std::string_view("MmLlHhVvCcSsQqTtAaZz").find(c) != std::string_view::npos; }

void parse_path(std::string_view d, RingBuilder& out) {
  Scanner sc(d);
  Vec2 cur = Vec2::Zero(), start = Vec2::Zero(), ctrl = Vec2::Zero();
  char cmd = 0, prev = 0;
  while (!sc.done()) {
    if (!sc.at_number()) {
      const char c = sc.get();
      if (!is_command(c)) throw ParseError(std::string("unknown path command '") + c + "'");
      cmd = c;
    } else if (cmd == 0 || cmd == 'Z' || cmd == 'z') {
      throw ParseError("path data must start with a command");
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    const Vec2 base = rel ? cur : Vec2::Zero();
    auto point = [&]() -> Vec2 {
      const double x = sc.number();
      const double y = sc.number();
      return base + Vec2(x, y);
    };
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(cmd)));
    const char prev_up = static_cast<char>(std::toupper(static_cast<unsigned char>(prev)));
    switch (up) {
      case 'M':
        cur = start = point();
        out.move_to(cur);
        cmd = rel ? 'l' : 'L';  // later pairs are implicit line-tos
        break;
      case 'L':
        cur = point();
        out.line_to(cur);
        break;
      case 'H':
        cur = Vec2(sc.number() + (rel ? cur.x() : 0.0), cur.y());
        out.line_to(cur);
        break;
      case 'V':
        cur = Vec2(cur.x(), sc.number() + (rel ? cur.y() : 0.0));
        out.line_to(cur);
        break;
      case 'C': {
        const Vec2 p1 = point(), p2 = point(), p3 = point();
        out.cubic(cur, p1, p2, p3);
        ctrl = p2;
        cur = p3;
        break;
      }
      case 'S': {
        const Vec2 p1 = (prev_up == 'C' || prev_up == 'S') ? 2 * cur - ctrl : cur;
        const Vec2 p2 = point(), p3 = point();
        out.cubic(cur, p1, p2, p3);
        ctrl = p2;
        cur = p3;
        break;
      }
      case 'Q': {
        const Vec2 p1 = point(), p2 = point();
        out.quadratic(cur, p1, p2);
        ctrl = p1;
        cur = p2;
        break;
      }
      case 'T': {
        const Vec2 p1 = (prev_up == 'Q' || prev_up == 'T') ? 2 * cur - ctrl : cur;
        const Vec2 p2 = point();
        out.quadratic(cur, p1, p2);
        ctrl = p1;
        cur = p2;
        break;
      }
      case 'A': {
        const double rx = sc.number(), ry = sc.number(), rot = sc.number();
        const bool large = sc.flag(), sweep = sc.flag();
        const Vec2 p = point();
        out.arc(cur, rx, ry, rot, large, sweep, p);
        cur = p;
        break;
      }
      case 'Z':
        out.close();
        cur = start;
        break;
    }
    out.set_last(cur);
    prev = up == 'M' ? 'M' : cmd;
  }
}

void rect_rings(const ptree& node, RingBuilder& out) {
  const double x = length_or(node, "x", 0), y = length_or(node, "y", 0);
  const double w = length_or(node, "width", 0), h = length_or(node, "height", 0);
  if (w <= 0 || h <= 0) return;
  auto rx = parse_length(attr(node, "rx")), ry = parse_length(attr(node, "ry"));
  if (!rx) rx = ry;
  if (!ry) ry = rx;
  const double a = std::min(rx.value_or(0.0), w / 2), b = std::min(ry.value_or(0.0), h / 2);
  if (a <= 0 || b <= 0) {
    out.move_to({x, y});
    out.line_to({x + w, y});
    out.line_to({x + w, y + h});
    out.line_to({x, y + h});
    out.close();
    return;
  }
  out.move_to({x + a, y});
  out.line_to({x + w - a, y});
  out.arc({x + w - a, y}, a, b, 0, false, true, {x + w, y + b});
  out.line_to({x + w, y + h - b});
  out.arc({x + w, y + h - b}, a, b, 0, false, true, {x + w - a, y + h});
  out.line_to({x + a, y + h});
  out.arc({x + a, y + h}, a, b, 0, false, true, {x, y + h - b});
  out.line_to({x, y + b});
  out.arc({x, y + b}, a, b, 0, false, true, {x + a, y});
  out.close();
}

void polygon_rings(const ptree& node, RingBuilder& out) {
  const std::string points = attr(node, "points").value_or("");
  Scanner sc(points);
  bool first = true;
  while (sc.at_number()) {
    const double px = sc.number();
    const Vec2 p(px, sc.number());
    if (first) out.move_to(p);
    else out.line_to(p);
    first = false;
  }
  if (!sc.done()) throw ParseError("bad polygon points");
  out.close();
}

bool skipped(std::string_view name) {
  return name == "defs" || name == "clipPath" || name == "mask" || name == "symbol" || name == "pattern" ||
         name == "marker" || name == "metadata" || name == "title" || name == "desc" || name == "style";
}

void collect(const ptree& node, const Affine& parent, const SvgOptions& options, std::vector<Ring>& rings) {
  for (const auto& [tag, child] : node) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>" || tag == "<xmltext>") continue;
    const std::string_view name = local_name(tag);
    if (skipped(name)) continue;
    if (attr(child, "display").value_or("") == "none") continue;
    Affine xf = parent;
    if (auto t = attr(child, "transform")) xf = parent * parse_transform(*t);
    RingBuilder b(options, options.chord_deviation / xf.max_scale());
    if (name == "g" || name == "a" || name == "svg") {
      collect(child, xf, options, rings);
      continue;
    }
    if (name == "path") {
      parse_path(attr(child, "d").value_or(""), b);
    } else if (name == "rect") {
      rect_rings(child, b);
    } else if (name == "circle") {
      const double r = length_or(child, "r", 0);
      b.ellipse({length_or(child, "cx", 0), length_or(child, "cy", 0)}, r, r);
    } else if (name == "ellipse") {
      b.ellipse({length_or(child, "cx", 0), length_or(child, "cy", 0)}, length_or(child, "rx", 0), length_or(child, "ry", 0));
    } else if (name == "polygon") {
      polygon_rings(child, b);
    }
    for (Ring& r : b.take(xf)) rings.push_back(std::move(r));
  }
}

// Root scale from a millimetre size plus viewBox; 1 otherwise.
Affine root_transform(const ptree& svg) {
  Affine xf;
  xf.m(1, 1) = -1.0;  // y down in SVG, up in the chart
  const auto vb = attr(svg, "viewBox");
  if (!vb) return xf;
  Scanner sc(*vb);
  double v[4];
  for (double& x : v) x = sc.number();
  if (v[2] <= 0 || v[3] <= 0) throw ParseError("viewBox needs a positive size");
  const auto w = parse_length(attr(svg, "width")), h = parse_length(attr(svg, "height"));
  double scale = 1.0;
  if (w && h) scale = std::min(*w / v[2], *h / v[3]);
  else if (w) scale = *w / v[2];
  else if (h) scale = *h / v[3];
  xf.m *= scale;
  xf.t = xf.m * Vec2(-v[0], -v[1]);
  return xf;
}

// Whether ring a lies inside ring b, judged at its first vertex off b.
bool inside_ring(const Ring& a, const Ring& b) {
  int in = 0, out = 0;
  for (const Vec2& p : a) {
    bool on = false;
    for (std::size_t i = 0; i < b.size() && !on; ++i) {
      const Vec2& u = b[i];
      const Vec2& v = b[(i + 1) % b.size()];
      const Vec2 d = v - u;
      const double t = std::clamp((p - u).dot(d) / std::max(d.squaredNorm(), 1e-300), 0.0, 1.0);
      on = (u + t * d - p).norm() <= geom2d::kDuplicateSpacing;
    }
    if (on) continue;
    (geom2d::ring_contains(b, p) ? in : out) += 1;
    break;
  }
  return in > 0;
}

Polygon2 classify(std::vector<Ring> rings) {
  std::vector<Ring> simple;
  for (Ring& raw : rings) {
    Ring r;
    for (const Vec2& p : raw)
      if (r.empty() || (p - r.back()).norm() > geom2d::kDuplicateSpacing) r.push_back(p);
    while (r.size() > 1 && (r.front() - r.back()).norm() <= geom2d::kDuplicateSpacing) r.pop_back();
    if (r.size() < 3 || std::abs(geom2d::signed_area(r)) <= geom2d::kSliverArea) continue;
    if (!geom2d::ring_is_simple(r)) throw InvalidInput("element path is self-intersecting");
    simple.push_back(std::move(r));
  }
  if (simple.empty()) throw InvalidInput("element has no closed shape");
  const std::size_t n = simple.size();
  std::vector<int> depth(n, 0);
  std::vector<std::vector<bool>> within(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && inside_ring(simple[i], simple[j])) {
        within[i][j] = true;
        ++depth[i];
      }
  int outers = 0;
  std::size_t outer = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (depth[i] % 2 == 0) {
      ++outers;
      outer = i;
    }
  if (outers != 1) throw InvalidInput("element has " + std::to_string(outers) + " disjoint parts; expected one");
  std::vector<Ring> holes;
  for (std::size_t i = 0; i < n; ++i)
    if (i != outer) {
      if (depth[i] != 1 || !within[i][outer]) throw InvalidInput("element rings overlap");
      holes.push_back(simple[i]);
    }
  return geom2d::make_polygon_collapsed(simple[outer], std::move(holes));
}

}  // namespace

TextureElement make_element(const Polygon2& shape) {
  const Vec2 c = geom2d::centroid(shape);
  TextureElement e;
  e.shape = geom2d::translated(shape, -c);
  Vec2 lo = e.shape.outer.front(), hi = lo;
  for (const Vec2& p : e.shape.outer) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  e.nominal_size = (hi - lo).norm();
  if (!(e.nominal_size > 0)) throw InvalidInput("element has zero size");
  return e;
}

TextureElement load_element(std::string_view bytes, const SvgOptions& options) {
  if (!(options.chord_deviation > 0)) throw InvalidInput("chord deviation must be positive");
  ptree doc;
  try {
    std::istringstream in{std::string(bytes)};
    boost::property_tree::read_xml(in, doc);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw ParseError(std::string("bad SVG: ") + e.what());
  }
  const ptree* svg = nullptr;
  for (const auto& [tag, child] : doc)
    if (local_name(tag) == "svg") svg = &child;
  if (!svg) throw ParseError("document has no <svg> root");
  std::vector<Ring> rings;
  collect(*svg, root_transform(*svg), options, rings);
  return make_element(classify(std::move(rings)));
}

TextureElement load_element_file(const std::string& path, const SvgOptions& options) {
  const auto bytes = read_file(path);
  return load_element(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), options);
}

}  // namespace texprint
