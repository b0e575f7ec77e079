#include "cad2gis/cad_model.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "cad2gis/error.hpp"

namespace cad2gis {

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::Line: return "Line";
    case EntityKind::Polyline: return "Polyline";
    case EntityKind::Circle: return "Circle";
    case EntityKind::Arc: return "Arc";
    case EntityKind::Text: return "Text";
    case EntityKind::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

std::set<std::string> CadDocument::layers() const {
  std::set<std::string> out;
  for (const auto& e : entities) out.insert(e.layer);
  return out;
}

std::size_t KindCounts::total() const {
  return std::accumulate(by_kind.begin(), by_kind.end(), std::size_t{0});
}

double arc_sweep_degrees(double start_angle, double end_angle) {
  if (start_angle == end_angle) return 0.0;
  double sweep = std::fmod(end_angle - start_angle, 360.0);
  if (sweep < 0.0) sweep += 360.0;
  if (sweep == 0.0) sweep = 360.0;
  return sweep;
}

namespace {

struct GroupPair {
  int code;
  std::string_view value;
  std::size_t line;  // 1-based line of the value
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<GroupPair> read_pairs(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  if (lines.size() % 2 != 0) {
    throw ParseError(lines.size(), "group code without a value (odd line count)");
  }
  std::vector<GroupPair> pairs;
  pairs.reserve(lines.size() / 2);
  for (std::size_t i = 0; i < lines.size(); i += 2) {
    const auto code_text = trim(lines[i]);
    int code = 0;
    const auto res = std::from_chars(code_text.data(), code_text.data() + code_text.size(), code);
    if (code_text.empty() || res.ec != std::errc{} || res.ptr != code_text.data() + code_text.size()) {
      throw ParseError(i + 1, "non-numeric group code '" + std::string(code_text) + "'");
    }
    pairs.push_back(GroupPair{code, lines[i + 1], i + 2});
  }
  return pairs;
}

double to_number(const GroupPair& p) {
  const auto t = trim(p.value);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ParseError(p.line, "invalid number '" + std::string(t) + "' for group code " +
                                 std::to_string(p.code));
  }
  return v;
}

int to_int(const GroupPair& p) {
  const auto t = trim(p.value);
  int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
    throw ParseError(p.line, "invalid integer '" + std::string(t) + "' for group code " +
                                 std::to_string(p.code));
  }
  return v;
}

// One top-level entity: its own pairs plus, for POLYLINE, the trailing VERTEX records.
struct RawRecord {
  std::string type;
  std::vector<GroupPair> pairs;
  std::vector<std::vector<GroupPair>> vertices;
  std::size_t line = 0;
};

std::vector<RawRecord> split_records(std::span<const GroupPair> section) {
  std::vector<RawRecord> records;
  std::size_t i = 0;
  auto read_body = [&](std::vector<GroupPair>& into) {
    for (; i < section.size() && section[i].code != 0; ++i) into.push_back(section[i]);
  };
  while (i < section.size()) {
    const auto& head = section[i];
    if (head.code != 0) {
      throw ParseError(head.line, "expected entity start (group code 0), found code " +
                                      std::to_string(head.code));
    }
    RawRecord rec;
    rec.type = std::string(trim(head.value));
    rec.line = head.line;
    ++i;
    read_body(rec.pairs);
    if (rec.type == "POLYLINE") {
      bool terminated = false;
      while (i < section.size()) {
        const auto type = trim(section[i].value);
        if (type == "VERTEX") {
          ++i;
          rec.vertices.emplace_back();
          read_body(rec.vertices.back());
        } else if (type == "SEQEND") {
          ++i;
          std::vector<GroupPair> ignored;
          read_body(ignored);
          terminated = true;
          break;
        } else {
          break;
        }
      }
      if (!terminated) throw ParseError(rec.line, "POLYLINE without SEQEND");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

class EntityBuilder {
 public:
  explicit EntityBuilder(std::size_t& z_counter) : z_counter_(z_counter) {}

  CadEntity build(const RawRecord& rec) {
    CadEntity e;
    e.layer = "0";
    for (const auto& p : rec.pairs) {
      if (p.code == 8) e.layer = std::string(trim(p.value));
      if (p.code == 5) e.handle = std::string(trim(p.value));
    }
    if (rec.type == "LINE") {
      e.geometry = line(rec.pairs);
    } else if (rec.type == "LWPOLYLINE") {
      e.geometry = lwpolyline(rec.pairs);
    } else if (rec.type == "POLYLINE") {
      e.geometry = polyline(rec);
    } else if (rec.type == "CIRCLE") {
      e.geometry = circle(rec.pairs);
    } else if (rec.type == "ARC") {
      e.geometry = arc(rec.pairs);
    } else if (rec.type == "TEXT" || rec.type == "MTEXT") {
      e.geometry = text(rec.pairs);
    } else {
      e.geometry = UnsupportedGeom{rec.type, "unsupported entity type"};
    }
    return e;
  }

 private:
  void note_z(const GroupPair& p) {
    if (to_number(p) != 0.0) ++z_counter_;
  }

  EntityGeometry line(const std::vector<GroupPair>& pairs) {
    LineGeom g{Point2::Zero(), Point2::Zero()};
    for (const auto& p : pairs) {
      switch (p.code) {
        case 10: g.start.x() = to_number(p); break;
        case 20: g.start.y() = to_number(p); break;
        case 11: g.end.x() = to_number(p); break;
        case 21: g.end.y() = to_number(p); break;
        case 30:
        case 31: note_z(p); break;
        default: break;
      }
    }
    if (same_point(g.start, g.end)) return UnsupportedGeom{"LINE", "degenerate: zero length"};
    return g;
  }

  EntityGeometry lwpolyline(const std::vector<GroupPair>& pairs) {
    PolylineGeom g;
    for (const auto& p : pairs) {
      switch (p.code) {
        case 10: g.vertices.emplace_back(to_number(p), 0.0); break;
        case 20:
          if (g.vertices.empty()) throw ParseError(p.line, "LWPOLYLINE y coordinate before x");
          g.vertices.back().y() = to_number(p);
          break;
        case 70: g.closed = (to_int(p) & 1) != 0; break;
        case 30: note_z(p); break;
        default: break;
      }
    }
    if (g.vertices.size() < 2) return UnsupportedGeom{"LWPOLYLINE", "degenerate: fewer than 2 vertices"};
    return g;
  }

  EntityGeometry polyline(const RawRecord& rec) {
    PolylineGeom g;
    int flags = 0;
    for (const auto& p : rec.pairs) {
      if (p.code == 70) flags = to_int(p);
    }
    // 16 = polygon mesh, 64 = polyface mesh.
    if (flags & (16 | 64)) return UnsupportedGeom{"POLYLINE", "mesh polyline"};
    g.closed = (flags & 1) != 0;
    for (const auto& vertex : rec.vertices) {
      Point2 v = Point2::Zero();
      for (const auto& p : vertex) {
        if (p.code == 10) v.x() = to_number(p);
        if (p.code == 20) v.y() = to_number(p);
        if (p.code == 30) note_z(p);
      }
      g.vertices.push_back(v);
    }
    if (g.vertices.size() < 2) return UnsupportedGeom{"POLYLINE", "degenerate: fewer than 2 vertices"};
    return g;
  }

  EntityGeometry circle(const std::vector<GroupPair>& pairs) {
    CircleGeom g{Point2::Zero(), 0.0};
    for (const auto& p : pairs) {
      switch (p.code) {
        case 10: g.center.x() = to_number(p); break;
        case 20: g.center.y() = to_number(p); break;
        case 40: g.radius = to_number(p); break;
        case 30: note_z(p); break;
        default: break;
      }
    }
    if (!(g.radius > 0.0)) return UnsupportedGeom{"CIRCLE", "degenerate: radius not positive"};
    return g;
  }

  EntityGeometry arc(const std::vector<GroupPair>& pairs) {
    ArcGeom g{Point2::Zero(), 0.0, 0.0, 0.0};
    for (const auto& p : pairs) {
      switch (p.code) {
        case 10: g.center.x() = to_number(p); break;
        case 20: g.center.y() = to_number(p); break;
        case 40: g.radius = to_number(p); break;
        case 50: g.start_angle = to_number(p); break;
        case 51: g.end_angle = to_number(p); break;
        case 30: note_z(p); break;
        default: break;
      }
    }
    if (!(g.radius > 0.0)) return UnsupportedGeom{"ARC", "degenerate: radius not positive"};
    if (arc_sweep_degrees(g.start_angle, g.end_angle) == 0.0) {
      return UnsupportedGeom{"ARC", "degenerate: zero sweep"};
    }
    return g;
  }

  EntityGeometry text(const std::vector<GroupPair>& pairs) {
    TextGeom g{Point2::Zero(), {}};
    std::string chunks;
    std::string tail;
    for (const auto& p : pairs) {
      switch (p.code) {
        case 10: g.insert.x() = to_number(p); break;
        case 20: g.insert.y() = to_number(p); break;
        case 1: tail = std::string(p.value); break;
        case 3: chunks += std::string(p.value); break;  // MTEXT continuation
        case 30: note_z(p); break;
        default: break;
      }
    }
    g.content = chunks + tail;
    return g;
  }

  std::size_t& z_counter_;
};

}  // namespace

CadDocument parse_dxf(std::string_view text, std::string source_name) {
  if (text.starts_with("AutoCAD Binary DXF")) {
    throw StructuralError("binary DXF is not supported");
  }
  const auto pairs = read_pairs(text);

  std::optional<std::size_t> begin;
  std::optional<std::size_t> end;
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (pairs[i].code == 0 && trim(pairs[i].value) == "SECTION" && pairs[i + 1].code == 2 &&
        trim(pairs[i + 1].value) == "ENTITIES") {
      begin = i + 2;
      for (std::size_t j = *begin; j < pairs.size(); ++j) {
        if (pairs[j].code == 0 && trim(pairs[j].value) == "ENDSEC") {
          end = j;
          break;
        }
      }
      break;
    }
  }
  if (!begin) throw StructuralError("missing ENTITIES section");
  if (!end) throw StructuralError("unterminated ENTITIES section");

  CadDocument doc;
  doc.source_name = std::move(source_name);
  const auto records = split_records(std::span(pairs).subspan(*begin, *end - *begin));
  EntityBuilder builder(doc.discarded_z_values);
  std::unordered_set<std::string> seen;
  doc.entities.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CadEntity e = builder.build(records[i]);
    // DXF handles are hexadecimal, so '#' never collides with a real one.
    if (e.handle.empty() || seen.contains(e.handle)) e.handle = "#" + std::to_string(i + 1);
    seen.insert(e.handle);
    doc.entities.push_back(std::move(e));
  }
  return doc;
}

LayerInventory inventory(const CadDocument& doc) {
  LayerInventory inv;
  Box2 all;
  for (const auto& e : doc.entities) {
    ++inv.layers[e.layer][e.kind()];
    ++inv.entity_total;
    Box2 box;
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, LineGeom>) {
            box.extend(g.start);
            box.extend(g.end);
          } else if constexpr (std::is_same_v<G, PolylineGeom>) {
            for (const auto& v : g.vertices) box.extend(v);
          } else if constexpr (std::is_same_v<G, CircleGeom> || std::is_same_v<G, ArcGeom>) {
            box.extend(Point2(g.center.array() - g.radius));
            box.extend(Point2(g.center.array() + g.radius));
          } else if constexpr (std::is_same_v<G, TextGeom>) {
            box.extend(g.insert);
          } else {
            ++inv.unsupported_types[g.type_name];
            ++inv.unsupported_total;
          }
        },
        e.geometry);
    if (!box.isEmpty()) {
      inv.layer_bboxes[e.layer].extend(box);
      all.extend(box);
    }
  }
  if (!all.isEmpty()) inv.bbox = all;
  return inv;
}

}  // namespace cad2gis
