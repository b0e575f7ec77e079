#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cad2gis/pipeline.hpp"

namespace {

std::set<cad2gis::OutputFormat> parse_formats(const std::string& list) {
  std::set<cad2gis::OutputFormat> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "geojson") {
      out.insert(cad2gis::OutputFormat::GeoJson);
    } else if (item == "shapefile") {
      out.insert(cad2gis::OutputFormat::Shapefile);
    } else {
      throw CLI::ValidationError("--formats", "unknown format '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--formats", "at least one format is required");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert CAD drawings (ASCII DXF) into georeferenced GIS layers"};
  app.require_subcommand(1);

  cad2gis::PipelineConfig config;
  std::string formats = "geojson,shapefile";
  std::vector<std::string> skip;
  double max_residual = 0.0;
  auto* convert = app.add_subcommand("convert", "Run the full conversion pipeline");
  convert->add_option("--dxf", config.dxf_path, "Input DXF")->required();
  convert->add_option("--profile", config.profile_path, "Conversion profile (JSON)")->required();
  convert->add_option("--control-points", config.control_points_path, "Control point CSV")->required();
  convert->add_option("--out-dir", config.output_directory, "Output directory")->required();
  convert->add_option("--formats", formats, "Comma-separated subset of geojson,shapefile")->capture_default_str();
  convert->add_option("--report", config.report_path, "QA report path")->required();
  convert->add_option("--skip-pass", skip, "Disable a cleaning pass (dedupe, bridge, snap, close, collapse, attach)")
      ->check(CLI::IsMember({"dedupe", "bridge", "snap", "close", "collapse", "attach"}));
  auto* max_opt = convert->add_option("--max-residual", max_residual, "Flag control points above this residual");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print the layer inventory of a DXF");
  inspect->add_option("dxf", inspect_path, "Input DXF")->required();

  std::string cp_path;
  std::string model = "similarity";
  double fit_max = 0.0;
  auto* fit = app.add_subcommand("georef-fit", "Fit a transform to control points and print residuals");
  fit->add_option("control_points", cp_path, "Control point CSV")->required();
  fit->add_option("--model", model, "similarity, affine or identity")
      ->check(CLI::IsMember({"similarity", "affine", "identity"}))
      ->capture_default_str();
  auto* fit_max_opt = fit->add_option("--max-residual", fit_max, "Exit 1 when any residual exceeds this");

  std::vector<std::filesystem::path> geojson_paths;
  double dangle_tol = 0.05;
  auto* val = app.add_subcommand("validate", "Report dangles, orphan annotations and unclosed rings");
  val->add_option("geojson", geojson_paths, "GeoJSON files produced by convert")->required();
  val->add_option("--dangle-tol", dangle_tol, "Dangle tolerance in CRS units")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*convert) config.formats = parse_formats(formats);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cad2gis::kExitError;
  }

  if (*convert) {
    config.options.skip_passes.insert(skip.begin(), skip.end());
    if (*max_opt) config.options.max_residual = max_residual;
    return cad2gis::run_pipeline(config, std::cerr);
  }
  if (*inspect) return cad2gis::inspect(inspect_path, std::cout, std::cerr);
  if (*fit) {
    std::optional<double> limit;
    if (*fit_max_opt) limit = fit_max;
    return cad2gis::georef_fit(cp_path, model, limit, std::cout, std::cerr);
  }
  return cad2gis::validate(geojson_paths, dangle_tol, std::cout, std::cerr);
}
