#include "fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fixtures {

using namespace cad2gis;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void pair(std::ostringstream& out, int code, const std::string& value) { out << code << "\n" << value << "\n"; }

class DocBuilder {
 public:
  CadDocument doc;

  std::string next_handle() {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%X", 0x100 + counter_++);
    return buf;
  }
  void add(const std::string& layer, EntityGeometry g) {
    doc.entities.push_back(CadEntity{next_handle(), layer, std::move(g), false});
  }
  void line(const std::string& layer, Point2 a, Point2 b) { add(layer, LineGeom{a, b}); }
  void text(const std::string& layer, Point2 at, std::string content) {
    add(layer, TextGeom{at, std::move(content)});
  }

 private:
  int counter_ = 0;
};

}  // namespace

std::string to_dxf(const CadDocument& doc) {
  std::ostringstream out;
  pair(out, 0, "SECTION");
  pair(out, 2, "ENTITIES");
  for (const auto& e : doc.entities) {
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          auto head = [&](const char* type) {
            pair(out, 0, type);
            pair(out, 5, e.handle);
            pair(out, 8, e.layer);
          };
          if constexpr (std::is_same_v<G, LineGeom>) {
            head("LINE");
            pair(out, 10, num(g.start.x()));
            pair(out, 20, num(g.start.y()));
            pair(out, 11, num(g.end.x()));
            pair(out, 21, num(g.end.y()));
          } else if constexpr (std::is_same_v<G, PolylineGeom>) {
            head("LWPOLYLINE");
            pair(out, 90, std::to_string(g.vertices.size()));
            pair(out, 70, g.closed ? "1" : "0");
            for (const auto& v : g.vertices) {
              pair(out, 10, num(v.x()));
              pair(out, 20, num(v.y()));
            }
          } else if constexpr (std::is_same_v<G, CircleGeom>) {
            head("CIRCLE");
            pair(out, 10, num(g.center.x()));
            pair(out, 20, num(g.center.y()));
            pair(out, 40, num(g.radius));
          } else if constexpr (std::is_same_v<G, ArcGeom>) {
            head("ARC");
            pair(out, 10, num(g.center.x()));
            pair(out, 20, num(g.center.y()));
            pair(out, 40, num(g.radius));
            pair(out, 50, num(g.start_angle));
            pair(out, 51, num(g.end_angle));
          } else if constexpr (std::is_same_v<G, TextGeom>) {
            head("TEXT");
            pair(out, 10, num(g.insert.x()));
            pair(out, 20, num(g.insert.y()));
            pair(out, 1, g.content);
          } else {
            head(g.type_name.c_str());
          }
        },
        e.geometry);
  }
  pair(out, 0, "ENDSEC");
  pair(out, 0, "EOF");
  return out.str();
}

CampusSpec large_campus_spec(std::size_t entities) {
  // Per manhole: ~5 conduit pieces (1 gapped), 1.5 texts, 0.5 ring, 0.1 stub.
  CampusSpec s;
  s.manholes = std::max<std::size_t>(2, entities / 8);
  const std::size_t routes = s.manholes - 1;
  s.text_gaps = routes;
  s.unclosed_rings = s.manholes / 2;
  s.dangles = s.manholes / 10;
  s.annotations = s.text_gaps + s.manholes / 2;
  s.conduit_segments = routes * 4 + s.text_gaps + s.dangles;
  s.extras = true;
  return s;
}

CampusFixture make_campus(const CampusSpec& spec) {
  if (spec.manholes < 2) throw std::invalid_argument("need at least two manholes");
  if (spec.conduit_segments < spec.text_gaps + spec.dangles) throw std::invalid_argument("too few segments");
  const std::size_t pieces = spec.conduit_segments - spec.text_gaps - spec.dangles;
  const std::size_t routes = spec.manholes - 1;
  if (pieces < routes) throw std::invalid_argument("each manhole link needs a segment");
  if (spec.text_gaps > pieces) throw std::invalid_argument("more gaps than segments");
  if (spec.annotations < spec.text_gaps) throw std::invalid_argument("each text gap carries an annotation");

  CampusFixture fx;
  fx.spec = spec;
  DocBuilder b;
  b.doc.source_name = "campus.dxf";

  const std::size_t per_route_max = pieces / routes + (pieces % routes ? 1 : 0);
  const double spacing = std::max(20.0, 8.0 * static_cast<double>(per_route_max));
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.manholes))));
  std::vector<Point2> mh;
  for (std::size_t i = 0; i < spec.manholes; ++i) {
    const std::size_t row = i / cols;
    const std::size_t k = i % cols;
    const std::size_t col = row % 2 == 0 ? k : cols - 1 - k;  // serpentine keeps neighbours adjacent
    mh.emplace_back(spacing * static_cast<double>(col), spacing * static_cast<double>(row));
  }
  for (const auto& p : mh) b.add("MH", CircleGeom{p, 0.6});

  // Conduit pieces along each manhole-to-manhole route.
  const double gap = 2.0;
  std::size_t piece_index = 0;
  std::size_t gaps_made = 0;
  std::vector<std::pair<Point2, Point2>> gap_labels;
  for (std::size_t r = 0; r < routes; ++r) {
    const std::size_t n = pieces / routes + (r < pieces % routes ? 1 : 0);
    const Point2 a = mh[r];
    const Point2 c = mh[r + 1];
    std::vector<Point2> stations;
    for (std::size_t k = 0; k <= n; ++k) stations.push_back(a + (c - a) * (static_cast<double>(k) / static_cast<double>(n)));
    stations.back() = c;
    const Point2 dir = (c - a).normalized();
    const Point2 normal(-dir.y(), dir.x());
    for (std::size_t k = 0; k < n; ++k, ++piece_index) {
      // Spread the gaps evenly over all pieces.
      const bool gapped = (piece_index + 1) * spec.text_gaps / pieces != piece_index * spec.text_gaps / pieces;
      if (!gapped) {
        b.line("CONDUIT", stations[k], stations[k + 1]);
        continue;
      }
      const Point2 mid = (stations[k] + stations[k + 1]) / 2.0;
      b.line("CONDUIT", stations[k], mid - dir * (gap / 2.0));
      b.line("CONDUIT", mid + dir * (gap / 2.0), stations[k + 1]);
      gap_labels.emplace_back(mid + normal * 0.4, mid);
      ++gaps_made;
    }
  }
  if (gaps_made != spec.text_gaps) throw std::logic_error("gap distribution");

  std::size_t label_no = 0;
  for (const auto& [at, mid] : gap_labels) b.text("TEXT", at, std::to_string(6 + 2 * (label_no++ % 6)) + "in");
  for (std::size_t k = 0; k < spec.annotations - spec.text_gaps; ++k) {
    const Point2 centre = mh[k % mh.size()];
    const double phi = 0.5 + 0.9 * static_cast<double>(k / mh.size());
    b.text("TEXT", centre + Point2(std::cos(phi), std::sin(phi)), "MH-" + std::to_string(k + 1));
  }

  // Catch-basin outlines, drafted open with a small closing gap.
  for (std::size_t k = 0; k < spec.unclosed_rings; ++k) {
    const Point2 corner =
        mh[k % mh.size()] + Point2(spacing / 4.0 + 2.0 * static_cast<double>(k / mh.size()), spacing / 4.0);
    PolylineGeom ring;
    ring.vertices = {corner, corner + Point2(1.2, 0.0), corner + Point2(1.2, 1.2), corner + Point2(0.0, 1.2),
                     corner + Point2(0.01, 0.0)};
    b.add("CB", ring);
  }

  // Stubs leaving a manhole and ending nowhere.
  for (std::size_t k = 0; k < spec.dangles; ++k) {
    const Point2 from = mh[k % mh.size()];
    const double phi = 4.0 + 0.35 * static_cast<double>(k / mh.size());
    b.line("CONDUIT", from, from + 6.0 * Point2(std::cos(phi), std::sin(phi)));
  }

  if (spec.extras) {
    for (int k = 0; k < 3; ++k) b.line("SIDEWALK", Point2(-30.0, -40.0 - k), Point2(-10.0, -40.0 - k));
    for (int k = 0; k < 2; ++k) b.line("XREF-OLD", Point2(-30.0, -60.0 - k), Point2(-10.0, -60.0 - k));
    b.add("BLDG", PolylineGeom{{Point2(-40, -40), Point2(-30, -40), Point2(-30, -30), Point2(-40, -30)}, true});
    b.add("CONDUIT", UnsupportedGeom{"SPLINE", "unsupported entity type"});
    b.add("CONDUIT", UnsupportedGeom{"LINE", "degenerate: zero length"});
    b.add("MH", CircleGeom{mh.front(), 0.6});  // drafted twice
    fx.dropped = 5;
    fx.unsupported = 2;
    fx.merged = 1;
  }
  fx.merged += spec.text_gaps;

  fx.doc = b.doc;
  fx.dxf = to_dxf(fx.doc);
  // Reparse so the document matches what the pipeline will see (degenerate records included).
  fx.doc = parse_dxf(fx.dxf, "campus.dxf");

  auto& p = fx.profile;
  p.rules = {
      LayerRule{"CONDUIT", LayerAction::Line, Collapse::None, {{"asset", "conduit"}}},
      LayerRule{"MH", LayerAction::Point, Collapse::Centroid, {{"asset", "manhole"}}},
      LayerRule{"CB", LayerAction::Polygon, Collapse::None, {{"asset", "catch_basin"}}},
      LayerRule{"TEXT", LayerAction::Annotation, Collapse::None, {}},
      LayerRule{"SIDEWALK", LayerAction::Drop, Collapse::None, {}},
      LayerRule{"BLDG", LayerAction::ReferenceOnly, Collapse::None, {}},
  };
  p.tolerances.gap_bridge = 2.5;
  p.tolerances.lateral_offset = 0.1;
  p.tolerances.snap = 0.05;
  p.tolerances.ring_close = 0.05;
  p.tolerances.annotation_attach = 2.0;
  p.tolerances.arc_chord = 0.05;
  p.tolerances.dangle = 0.05;
  p.crs.epsg = 26916;
  p.crs.wkt = "PROJCS[\"NAD83 / UTM zone 16N\",GEOGCS[\"NAD83\",DATUM[\"North_American_Datum_1983\","
              "SPHEROID[\"GRS 1980\",6378137,298.257222101]],PRIMEM[\"Greenwich\",0],"
              "UNIT[\"degree\",0.0174532925199433]],PROJECTION[\"Transverse_Mercator\"],"
              "PARAMETER[\"latitude_of_origin\",0],PARAMETER[\"central_meridian\",-87],"
              "PARAMETER[\"scale_factor\",0.9996],PARAMETER[\"false_easting\",500000],"
              "PARAMETER[\"false_northing\",0],UNIT[\"metre\",1]]";
  p.transform_model = TransformModel::Similarity;
  fx.profile_json = serialize_profile(p);

  // Feet to metres, a small rotation and a UTM-like offset.
  fx.truth.scale = 0.3048;
  fx.truth.rotation = 0.2;
  fx.truth.translation = Point2(443000.0, 4637000.0);
  Box2 extent;
  for (const auto& m : mh) extent.extend(m);
  const Point2 corners[] = {extent.min(), Point2(extent.max().x(), extent.min().y()), extent.max(),
                            Point2(extent.min().x(), extent.max().y() + spacing)};
  std::ostringstream csv;
  csv << "src_x,src_y,dst_x,dst_y,label\n";
  for (int k = 0; k < 4; ++k) {
    const Point2 target = fx.truth(corners[k]);
    ControlPointPair cp{corners[k], target, "CP" + std::to_string(k + 1)};
    csv << num(cp.source.x()) << "," << num(cp.source.y()) << "," << num(target.x()) << "," << num(target.y())
        << "," << cp.label << "\n";
  }
  fx.control_points_csv = csv.str();
  fx.control_points = parse_control_points(fx.control_points_csv);
  return fx;
}

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

Point2 random_point(Rng& rng, double extent) { return {uniform(rng, 0.0, extent), uniform(rng, 0.0, extent)}; }

}  // namespace

CadDocument random_document(Rng& rng, std::size_t entities) {
  static const char* const kLayers[] = {"A", "B", "C", "SKIP", "REF", "X", "T"};
  DocBuilder b;
  b.doc.source_name = "random.dxf";
  const double extent = 40.0 + static_cast<double>(entities);
  while (b.doc.entities.size() < entities) {
    const std::string layer = kLayers[pick(rng, 7)];
    switch (pick(rng, 10)) {
      case 0:
      case 1: {
        // A straight run broken into pieces, usually with text at the breaks.
        const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const Point2 dir(std::cos(theta), std::sin(theta));
        Point2 at = random_point(rng, extent);
        const std::size_t n = 2 + pick(rng, 3);
        for (std::size_t k = 0; k < n; ++k) {
          const double len = uniform(rng, 3.0, 8.0);
          const Point2 end = at + dir * len;
          if (pick(rng, 3) == 0) {
            b.add(layer, PolylineGeom{{at, at + dir * (len / 2.0), end}, false});
          } else if (pick(rng, 2) == 0) {
            b.line(layer, at, end);
          } else {
            b.line(layer, end, at);
          }
          const double g = uniform(rng, 0.3, 1.8);
          if (pick(rng, 4) != 0) {
            const Point2 normal(-dir.y(), dir.x());
            b.text(kLayers[pick(rng, 7)], end + dir * (g / 2.0) + normal * uniform(rng, -0.5, 0.5), "L" + std::to_string(k));
          }
          at = end + dir * g;
        }
        break;
      }
      case 2: b.line(layer, random_point(rng, extent), random_point(rng, extent)); break;
      case 3: {
        PolylineGeom pl;
        const Point2 c = random_point(rng, extent);
        const std::size_t n = 2 + pick(rng, 5);
        for (std::size_t k = 0; k < n; ++k) pl.vertices.push_back(c + Point2(uniform(rng, -5, 5), uniform(rng, -5, 5)));
        pl.closed = pick(rng, 2) == 0;
        b.add(layer, pl);
        break;
      }
      case 4: b.add(layer, CircleGeom{random_point(rng, extent), uniform(rng, 0.2, 4.0)}); break;
      case 5:
        b.add(layer, ArcGeom{random_point(rng, extent), uniform(rng, 0.2, 4.0), uniform(rng, -360.0, 360.0),
                             uniform(rng, -360.0, 360.0)});
        break;
      case 6: b.text(layer, random_point(rng, extent), "t" + std::to_string(b.doc.entities.size())); break;
      case 7:
        if (!b.doc.entities.empty()) {
          CadEntity copy = b.doc.entities[pick(rng, b.doc.entities.size())];
          copy.handle = b.next_handle();
          b.doc.entities.push_back(copy);
        }
        break;
      case 8: b.add(layer, UnsupportedGeom{pick(rng, 2) ? "SPLINE" : "INSERT", "unsupported entity type"}); break;
      default: {
        const Point2 p = random_point(rng, extent);
        b.add(layer, UnsupportedGeom{"LINE", "degenerate: zero length"});
        b.line(layer, p, p + Point2(uniform(rng, 0.05, 1.0), 0.0));
        break;
      }
    }
  }
  b.doc.entities.resize(entities);
  return b.doc;
}

CadDocument random_gap_document(Rng& rng, std::size_t max_entities) {
  DocBuilder b;
  b.doc.source_name = "gaps.dxf";
  std::size_t cell = 0;
  while (b.doc.entities.size() + 8 <= max_entities) {
    const Point2 origin(60.0 * static_cast<double>(cell % 10), 60.0 * static_cast<double>(cell / 10));
    ++cell;
    const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Point2 dir(std::cos(theta), std::sin(theta));
    const Point2 normal(-dir.y(), dir.x());
    Point2 at = origin + Point2(30, 30) - dir * 20.0;
    const std::size_t pieces = 2 + pick(rng, 4);
    for (std::size_t k = 0; k < pieces; ++k) {
      const double len = uniform(rng, 3.0, 6.0);
      Point2 a = at;
      Point2 c = at + dir * len;
      if (pick(rng, 6) == 0) {
        a += normal * 0.3;
        c += normal * 0.3;
      }
      const std::string layer = pick(rng, 8) == 0 ? "B" : "A";
      if (pick(rng, 3) == 0) {
        b.add(layer, PolylineGeom{{a, a + (c - a) * 0.4, c}, false});
      } else if (pick(rng, 2) == 0) {
        b.line(layer, a, c);
      } else {
        b.line(layer, c, a);
      }
      const double g = uniform(rng, 0.2, 3.0);
      if (k + 1 < pieces && pick(rng, 10) < 7) {
        b.text("T", at + dir * (len + g / 2.0) + normal * uniform(rng, -3.0, 3.0), std::to_string(k));
      }
      at = at + dir * (len + g);
    }
  }
  return b.doc;
}

ConversionProfile random_profile(Rng& rng) {
  ConversionProfile p;
  const LayerAction actions[] = {LayerAction::Line, LayerAction::Polygon, LayerAction::Point};
  for (const char* layer : {"A", "B", "C"}) {
    LayerRule r{layer, actions[pick(rng, 3)], Collapse::None, {}};
    if (r.action == LayerAction::Point && pick(rng, 2) == 0) r.collapse = Collapse::Centroid;
    if (pick(rng, 2) == 0) r.attributes["kind"] = std::string("k") + layer;
    p.rules.push_back(r);
  }
  p.rules.push_back(LayerRule{"T", LayerAction::Annotation, Collapse::None, {}});
  p.rules.push_back(LayerRule{"SKIP", LayerAction::Drop, Collapse::None, {}});
  p.rules.push_back(LayerRule{"REF", LayerAction::ReferenceOnly, Collapse::None, {}});
  p.tolerances.gap_bridge = uniform(rng, 1.0, 2.5);
  p.tolerances.lateral_offset = uniform(rng, 0.01, 0.3);
  p.tolerances.snap = uniform(rng, 0.05, 0.6);
  p.tolerances.ring_close = uniform(rng, 0.05, 0.6);
  p.tolerances.annotation_attach = uniform(rng, 0.5, 3.0);
  p.tolerances.arc_chord = uniform(rng, 0.01, 0.2);
  p.tolerances.dangle = uniform(rng, 0.05, 0.6);
  p.crs.epsg = 3857;
  return p;
}

FeatureSet random_features(Rng& rng, std::size_t count, double tol) {
  FeatureSet fs;
  fs.georeferenced = true;
  fs.crs = Crs{3857, std::nullopt};
  const double extent = 10.0 + 2.0 * static_cast<double>(count);
  std::vector<Point2> pool;
  for (std::size_t k = 0; k < std::max<std::size_t>(2, count / 2); ++k) pool.push_back(random_point(rng, extent));
  auto node = [&]() -> Point2 {
    return pool[pick(rng, pool.size())] + Point2(uniform(rng, -1.5 * tol, 1.5 * tol), uniform(rng, -1.5 * tol, 1.5 * tol));
  };

  for (std::size_t i = 0; i < count; ++i) {
    Feature f;
    f.id = i + 1;
    f.attributes["handle"] = std::to_string(0x200 + i);
    switch (pick(rng, 6)) {
      case 0:
      case 1: {
        std::vector<Point2> v{node()};
        for (std::size_t k = pick(rng, 3); k > 0; --k) v.push_back(random_point(rng, extent));
        v.push_back(node());
        f.klass = FeatureClass::Line;
        f.geometry = LineStringGeometry{v};
        f.attributes["layer"] = "A";
        break;
      }
      case 2:
        f.klass = FeatureClass::Point;
        f.geometry = PointGeometry{node()};
        f.attributes["layer"] = "C";
        break;
      case 3: {
        const Point2 c = random_point(rng, extent);
        const double r = uniform(rng, 1.0, 3.0);
        std::vector<Point2> ring;
        const std::size_t n = 3 + pick(rng, 4);
        for (std::size_t k = 0; k < n; ++k) {
          const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
          ring.push_back(c + r * Point2(std::cos(t), std::sin(t)));
        }
        ring.push_back(ring.front() + Point2(uniform(rng, -2.0 * tol, 2.0 * tol), uniform(rng, -2.0 * tol, 2.0 * tol)));
        f.klass = FeatureClass::Line;
        f.ring_candidate = true;
        f.geometry = LineStringGeometry{ring};
        f.attributes["layer"] = "B";
        break;
      }
      case 4: {
        const Point2 c = random_point(rng, extent);
        const double r = uniform(rng, 0.5, 2.0);
        std::vector<Point2> ring{c, c + Point2(r, 0), c + Point2(r, r), c + Point2(0, r), c};
        f.klass = FeatureClass::Polygon;
        f.geometry = PolygonGeometry{ring};
        f.attributes["layer"] = pick(rng, 2) ? "B" : "C";
        break;
      }
      default:
        f.klass = FeatureClass::Annotation;
        f.geometry = PointGeometry{node() + Point2(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0))};
        f.attributes["layer"] = "T";
        f.attributes["label"] = "n" + std::to_string(i);
        break;
    }
    fs.features.push_back(std::move(f));
  }
  return fs;
}

std::vector<ControlPointPair> make_pairs(Rng& rng, std::size_t n, const GeoTransform& truth, double noise) {
  std::normal_distribution<double> jitter(0.0, noise > 0.0 ? noise : 1.0);
  std::vector<ControlPointPair> pairs;
  for (std::size_t k = 0; k < n; ++k) {
    const Point2 src(uniform(rng, -1000.0, 1000.0), uniform(rng, -1000.0, 1000.0));
    Point2 dst = apply(truth, src);
    if (noise > 0.0) dst += Point2(jitter(rng), jitter(rng));
    pairs.push_back({src, dst, "P" + std::to_string(k + 1)});
  }
  return pairs;
}

}  // namespace fixtures
