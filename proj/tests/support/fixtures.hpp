#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cad2gis/cad_model.hpp"
#include "cad2gis/convert.hpp"
#include "cad2gis/georef.hpp"
#include "cad2gis/profile.hpp"

namespace fixtures {

// ASCII DXF for a document: LINE, LWPOLYLINE, CIRCLE, ARC, TEXT; Unsupported entities are
// written as a bare record of their type name. Coordinates use 17 significant digits.
std::string to_dxf(const cad2gis::CadDocument& doc);

// Synthetic utility campus: manholes (circles) joined by conduit runs, some runs broken by
// label text, open catch-basin outlines, free-standing labels and dangling stubs.
struct CampusSpec {
  std::size_t conduit_segments = 12;  // CONDUIT entities, counting both halves of a gap and stubs
  std::size_t text_gaps = 3;          // K1
  std::size_t unclosed_rings = 2;     // K2
  std::size_t manholes = 4;           // K3
  std::size_t annotations = 6;        // K4, includes one label per text gap
  std::size_t dangles = 0;            // K5, one stub each
  bool extras = false;                // dropped, unmapped, reference, unsupported and duplicate entities
};

struct CampusFixture {
  CampusSpec spec;
  cad2gis::CadDocument doc;
  std::string dxf;
  cad2gis::ConversionProfile profile;
  std::string profile_json;
  std::vector<cad2gis::ControlPointPair> control_points;
  std::string control_points_csv;
  cad2gis::SimilarityTransform<double> truth;
  // Expected ledger terms.
  std::size_t dropped = 0;
  std::size_t merged = 0;
  std::size_t unsupported = 0;
};

// Throws std::invalid_argument when the counts cannot be laid out.
CampusFixture make_campus(const CampusSpec& spec);

// Campus layout sized to roughly `entities` entities with every defect class present.
CampusSpec large_campus_spec(std::size_t entities);

using Rng = std::mt19937_64;

// Mixed document: runs broken by text gaps, duplicates, degenerate and unsupported records,
// circles, arcs, closed and open polylines, across layers "A", "B", "C", "SKIP", "REF", "X".
cad2gis::CadDocument random_document(Rng& rng, std::size_t entities);

// Straight runs in separate cells, broken by gaps of 0.2-3.0 with text nearby (or not), some
// pieces nudged sideways or moved to another layer. Pieces are >= 3 long, so with gap_bridge <= 2.5
// every end has at most one qualifying partner.
cad2gis::CadDocument random_gap_document(Rng& rng, std::size_t max_entities);

// Profile over the random_document layers; tolerances in drawing units scaled to the layout.
cad2gis::ConversionProfile random_profile(Rng& rng);

// Georeferenced features drawn around a small pool of nodes so that clusters, dangles,
// ring candidates and nearby annotations all occur.
cad2gis::FeatureSet random_features(Rng& rng, std::size_t count, double tol);

// Pairs from a known similarity (or affine) transform, optionally with Gaussian noise.
std::vector<cad2gis::ControlPointPair> make_pairs(Rng& rng, std::size_t n,
                                                  const cad2gis::GeoTransform& truth, double noise);

}  // namespace fixtures
