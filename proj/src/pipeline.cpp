#include "cad2gis/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cad2gis/error.hpp"

namespace cad2gis {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<std::string> unmapped_layers(const CadDocument& doc, const ConversionProfile& profile) {
  std::vector<std::string> out;
  for (const auto& layer : doc.layers()) {
    if (!match_rule(profile, layer)) out.push_back(layer);
  }
  return out;
}

void append(std::vector<CleanFix>& into, std::vector<CleanFix>&& from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

FeatureSet only_class(const FeatureSet& fs, FeatureClass klass) {
  FeatureSet out;
  out.crs = fs.crs;
  out.georeferenced = fs.georeferenced;
  for (const auto& f : fs.features) {
    if (f.klass == klass) out.features.push_back(f);
  }
  return out;
}

std::string as_string(const std::vector<std::uint8_t>& bytes) { return {bytes.begin(), bytes.end()}; }

}  // namespace

ConversionRun run_conversion(const CadDocument& doc, const ConversionProfile& profile,
                             std::span<const ControlPointPair> control_points,
                             const PipelineOptions& options, std::string* stage) {
  auto enter = [&](const char* name) {
    if (stage) *stage = name;
  };
  const auto skipped = [&](std::string_view pass) { return options.skip_passes.contains(std::string(pass)); };
  for (const auto& pass : options.skip_passes) {
    if (std::find(std::begin(kSkippablePasses), std::end(kSkippablePasses), pass) == std::end(kSkippablePasses)) {
      throw ValidationError("skip-pass", "unknown pass '" + pass + "'");
    }
  }

  ConversionRun run;
  QaReport& report = run.report;
  report.source = doc.source_name;
  report.skipped_passes.assign(options.skip_passes.begin(), options.skip_passes.end());

  enter("inventory");
  report.inventory = inventory(doc);
  report.discarded_z_values = doc.discarded_z_values;
  report.unmapped_layers = unmapped_layers(doc, profile);

  enter("cad-clean");
  auto cleaned = drop_irrelevant(doc, profile);
  append(report.fixes, std::move(cleaned.fixes));
  if (!skipped("dedupe")) {
    auto r = dedupe_entities(cleaned.doc);
    cleaned.doc = std::move(r.doc);
    append(report.fixes, std::move(r.fixes));
  }
  if (!skipped("bridge")) {
    auto r = bridge_text_gaps(cleaned.doc, profile.tolerances);
    cleaned.doc = std::move(r.doc);
    append(report.fixes, std::move(r.fixes));
  }

  enter("convert");
  auto converted = convert_document(cleaned.doc, profile);
  report.conversion = converted.counts;
  report.conversion_warnings = std::move(converted.warnings);

  auto& ledger = report.ledger;
  ledger.total = report.inventory.entity_total;
  ledger.converted = converted.counts.converted();
  ledger.dropped = report.count_fixes(FixKind::DroppedEntity);
  ledger.merged = report.count_fixes(FixKind::BridgedGap) + report.count_fixes(FixKind::Deduped);
  ledger.unsupported = converted.counts.unsupported_skipped;
  if (!ledger.balanced()) {
    throw Error("conservation ledger does not balance: " + std::to_string(ledger.total) + " != " +
                std::to_string(ledger.converted) + " + " + std::to_string(ledger.dropped) + " + " +
                std::to_string(ledger.merged) + " + " + std::to_string(ledger.unsupported));
  }

  enter("georeference");
  auto& g = report.georef;
  g.model = profile.transform_model;
  g.crs = profile.crs;
  g.max_residual = options.max_residual;
  const GeoTransform transform = estimate_transform(control_points, profile.transform_model);
  g.transform = transform;
  g.residuals = residuals(transform, control_points);
  for (const auto& p : control_points) g.pair_labels.push_back(p.label);
  if (options.max_residual) {
    for (std::size_t i = 0; i < g.residuals.per_pair.size(); ++i) {
      if (g.residuals.per_pair[i] > *options.max_residual) g.flagged_pairs.push_back(i);
    }
  }
  FeatureSet georeferenced = apply_transform(converted.features, transform, profile.crs);
  run.reference = apply_transform(converted.reference, transform, profile.crs);
  g.performed = true;

  enter("gis-clean");
  GisCleanOptions passes;
  passes.snap = !skipped("snap");
  passes.close = !skipped("close");
  passes.collapse = !skipped("collapse");
  passes.attach = !skipped("attach");
  auto gis = clean_features(georeferenced, profile, passes);
  run.features = std::move(gis.features);
  report.topology = std::move(gis.report);

  // Rounded coordinates are what the writers emit, so the remaining defects are listed against them.
  quantize_coordinates(run.features);
  quantize_coordinates(run.reference);
  auto final_check = validate_network(run.features, profile.tolerances.dangle);
  report.topology.unclosed_rings = std::move(final_check.unclosed_rings);
  report.topology.orphan_annotations = std::move(final_check.orphan_annotations);
  report.topology.dangles = std::move(final_check.dangles);

  const auto& t = report.topology;
  const bool warnings = !t.dangles.empty() || !t.orphan_annotations.empty() || !t.unclosed_rings.empty() ||
                        !g.flagged_pairs.empty();
  run.exit_code = warnings ? kExitWarnings : kExitClean;
  enter("done");
  return run;
}

std::map<std::string, std::string> render_outputs(ConversionRun& run, const std::set<OutputFormat>& formats) {
  std::map<std::string, std::string> files;
  for (auto klass : kFeatureClasses) {
    const std::string stem(to_string(klass));
    const FeatureSet subset = only_class(run.features, klass);
    if (formats.contains(OutputFormat::GeoJson)) {
      files[stem + ".geojson"] = write_geojson(subset, klass);
    }
    if (formats.contains(OutputFormat::Shapefile)) {
      auto shp = write_shapefile(subset, klass);
      files[stem + ".shp"] = as_string(shp.shp);
      files[stem + ".shx"] = as_string(shp.shx);
      files[stem + ".dbf"] = as_string(shp.dbf);
      files[stem + ".prj"] = shp.prj;
      run.report.dbf_fields[stem] = std::move(shp.field_names);
      for (auto& w : shp.warnings) run.report.output_warnings.push_back(std::move(w));
    }
  }
  return files;
}

int run_pipeline(const PipelineConfig& config, std::ostream& log) {
  std::string stage = "read-input";
  try {
    if (config.dxf_path.empty() || config.profile_path.empty() || config.control_points_path.empty() ||
        config.output_directory.empty() || config.report_path.empty()) {
      throw ValidationError("config", "all paths must be non-empty");
    }
    if (config.formats.empty()) throw ValidationError("formats", "at least one output format is required");

    stage = "parse-dxf";
    const CadDocument doc = parse_dxf(read_text_file(config.dxf_path), config.dxf_path.filename().string());
    stage = "load-profile";
    const ConversionProfile profile = load_profile(read_text_file(config.profile_path));
    stage = "read-control-points";
    const auto pairs = parse_control_points(read_text_file(config.control_points_path));

    ConversionRun run = run_conversion(doc, profile, pairs, config.options, &stage);

    stage = "write-outputs";
    const auto files = render_outputs(run, config.formats);
    std::filesystem::create_directories(config.output_directory);
    for (const auto& [name, bytes] : files) write_file(config.output_directory / name, bytes);
    for (const auto& w : run.report.output_warnings) log << "warning: " << w << "\n";

    stage = "write-report";
    if (config.report_path.has_parent_path()) std::filesystem::create_directories(config.report_path.parent_path());
    write_file(config.report_path, write_report(run.report));

    const auto& t = run.report.topology;
    log << "converted " << run.report.ledger.converted << " of " << run.report.ledger.total << " entities; "
        << t.dangles.size() << " dangles, " << t.orphan_annotations.size() << " orphan annotations, "
        << t.unclosed_rings.size() << " unclosed rings, " << run.report.georef.flagged_pairs.size()
        << " flagged control points\n";
    return run.exit_code;
  } catch (const std::exception& e) {
    log << "error [" << stage << "]: " << e.what() << "\n";
  }
  return kExitError;
}

namespace {

std::string pad(std::string s, std::size_t width, bool right = false) {
  if (s.size() >= width) return s;
  return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

std::string box_text(const Box2& b) {
  return "[" + format_fixed(b.min().x(), 3) + ", " + format_fixed(b.min().y(), 3) + "] - [" +
         format_fixed(b.max().x(), 3) + ", " + format_fixed(b.max().y(), 3) + "]";
}

}  // namespace

int inspect(const std::filesystem::path& dxf_path, std::ostream& out, std::ostream& log) {
  LayerInventory inv;
  try {
    inv = inventory(parse_dxf(read_text_file(dxf_path), dxf_path.filename().string()));
  } catch (const std::exception& e) {
    log << "error [parse-dxf]: " << e.what() << "\n";
    return kExitError;
  }

  std::size_t name_width = 5;
  for (const auto& [name, counts] : inv.layers) name_width = std::max(name_width, name.size());
  out << pad("layer", name_width + 2);
  for (std::size_t k = 0; k < kEntityKindCount; ++k) {
    out << pad(std::string(to_string(static_cast<EntityKind>(k))), 12, true);
  }
  out << pad("Total", 8, true) << "  bbox\n";
  KindCounts sum;
  for (const auto& [name, counts] : inv.layers) {
    out << pad(name, name_width + 2);
    for (std::size_t k = 0; k < kEntityKindCount; ++k) {
      out << pad(std::to_string(counts.by_kind[k]), 12, true);
      sum.by_kind[k] += counts.by_kind[k];
    }
    out << pad(std::to_string(counts.total()), 8, true) << "  ";
    if (const auto it = inv.layer_bboxes.find(name); it != inv.layer_bboxes.end()) out << box_text(it->second);
    out << "\n";
  }
  out << pad("TOTAL", name_width + 2);
  for (std::size_t k = 0; k < kEntityKindCount; ++k) out << pad(std::to_string(sum.by_kind[k]), 12, true);
  out << pad(std::to_string(sum.total()), 8, true) << "  " << (inv.bbox ? box_text(*inv.bbox) : "") << "\n";
  out << "unsupported: " << inv.unsupported_total;
  if (!inv.unsupported_types.empty()) {
    out << " (";
    bool first = true;
    for (const auto& [type, n] : inv.unsupported_types) {
      out << (first ? "" : ", ") << type << "=" << n;
      first = false;
    }
    out << ")";
  }
  out << "\n";
  return kExitClean;
}

int georef_fit(const std::filesystem::path& control_points_path, std::string_view model,
               std::optional<double> max_residual, std::ostream& out, std::ostream& log) {
  std::vector<ControlPointPair> pairs;
  GeoTransform transform;
  try {
    pairs = parse_control_points(read_text_file(control_points_path));
    if (model == "similarity") {
      transform = estimate_transform(pairs, TransformModel::Similarity);
    } else if (model == "affine") {
      transform = estimate_transform(pairs, TransformModel::Affine);
    } else if (model == "identity") {
      transform = SimilarityTransform<double>{};
    } else {
      throw ValidationError("model", "expected similarity, affine or identity");
    }
  } catch (const ParseError& e) {
    log << "error [read-control-points]: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    log << "error [georeference]: " << e.what() << "\n";
    return kExitError;
  }

  out << "model         " << model << "\n";
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SimilarityTransform<double>>) {
          out << "scale         " << format_fixed(t.scale, 12) << "\n";
          out << "rotation_deg  " << format_fixed(t.rotation * 180.0 / std::numbers::pi, 12) << "\n";
          out << "translation   " << format_fixed(t.translation.x(), 9) << " " << format_fixed(t.translation.y(), 9)
              << "\n";
        } else {
          const auto& c = t.coefficients;
          out << "row1          " << format_fixed(c(0, 0), 12) << " " << format_fixed(c(0, 1), 12) << " "
              << format_fixed(c(0, 2), 9) << "\n";
          out << "row2          " << format_fixed(c(1, 0), 12) << " " << format_fixed(c(1, 1), 12) << " "
              << format_fixed(c(1, 2), 9) << "\n";
        }
      },
      transform);

  const auto r = residuals(transform, pairs);
  out << "pair  label  residual\n";
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const bool over = max_residual && r.per_pair[i] > *max_residual;
    flagged += over ? 1 : 0;
    out << pad(std::to_string(i + 1), 4, true) << "  " << (pairs[i].label.empty() ? "-" : pairs[i].label) << "  "
        << format_fixed(r.per_pair[i], 9) << (over ? "  EXCEEDS" : "") << "\n";
  }
  out << "rms           " << format_fixed(r.rms, 9) << "\n";
  out << "max           " << format_fixed(r.max, 9) << "\n";
  if (flagged) {
    log << "warning: " << flagged << " control point(s) exceed max residual " << format_fixed(*max_residual, 9)
        << "\n";
    return kExitWarnings;
  }
  return kExitClean;
}

int validate(std::span<const std::filesystem::path> geojson_paths, double dangle_tol, std::ostream& out,
             std::ostream& log) {
  FeatureSet merged;
  merged.georeferenced = true;
  try {
    if (geojson_paths.empty()) throw ValidationError("geojson", "no input files");
    for (const auto& path : geojson_paths) {
      FeatureSet fs = read_geojson(read_text_file(path));
      if (!merged.crs) merged.crs = fs.crs;
      for (auto& f : fs.features) merged.features.push_back(std::move(f));
    }
  } catch (const std::exception& e) {
    log << "error [read-geojson]: " << e.what() << "\n";
    return kExitError;
  }
  std::sort(merged.features.begin(), merged.features.end(),
            [](const Feature& a, const Feature& b) { return a.id < b.id; });

  const TopologyReport t = validate_network(merged, dangle_tol);
  out << "dangles: " << t.dangles.size() << "\n";
  for (const auto& d : t.dangles) {
    out << "  feature " << d.feature << " at " << format_fixed(d.endpoint.x(), 9) << " "
        << format_fixed(d.endpoint.y(), 9) << " nearest "
        << (std::isfinite(d.nearest_distance) ? format_fixed(d.nearest_distance, 9) : std::string("none")) << "\n";
  }
  out << "orphan annotations: " << t.orphan_annotations.size() << "\n";
  for (auto id : t.orphan_annotations) out << "  feature " << id << "\n";
  out << "unclosed rings: " << t.unclosed_rings.size() << "\n";
  for (const auto& u : t.unclosed_rings) out << "  feature " << u.feature << " gap " << format_fixed(u.gap, 9) << "\n";
  const bool defects = !t.dangles.empty() || !t.orphan_annotations.empty() || !t.unclosed_rings.empty();
  return defects ? kExitWarnings : kExitClean;
}

}  // namespace cad2gis
