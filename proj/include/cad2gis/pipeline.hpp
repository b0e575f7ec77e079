#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cad2gis/io_formats.hpp"

namespace cad2gis {

enum ExitStatus : int { kExitClean = 0, kExitWarnings = 1, kExitError = 2 };

enum class OutputFormat { GeoJson, Shapefile };

// Pass names accepted by --skip-pass.
inline constexpr std::string_view kSkippablePasses[] = {"dedupe", "bridge", "snap", "close", "collapse", "attach"};

struct PipelineOptions {
  std::set<std::string> skip_passes;
  std::optional<double> max_residual;
};

struct PipelineConfig {
  std::filesystem::path dxf_path;
  std::filesystem::path profile_path;
  std::filesystem::path control_points_path;
  std::filesystem::path output_directory;
  std::set<OutputFormat> formats;
  std::filesystem::path report_path;
  PipelineOptions options;
};

struct ConversionRun {
  FeatureSet features;   // georeferenced, cleaned and quantized; ready for the writers
  FeatureSet reference;  // reference-only layers after georeferencing (never written)
  QaReport report;
  int exit_code = kExitClean;  // clean or warnings; hard errors throw
};

// Cleaning, conversion, georeferencing and topology on an already parsed document. Throws
// cad2gis::Error subclasses on hard failures; `stage`, when given, names the step that was running.
ConversionRun run_conversion(const CadDocument& doc, const ConversionProfile& profile,
                             std::span<const ControlPointPair> control_points,
                             const PipelineOptions& options = {}, std::string* stage = nullptr);

// Output file name -> contents for every feature class in each requested format. Records the
// DBF field mapping and writer warnings in run.report.
std::map<std::string, std::string> render_outputs(ConversionRun& run, const std::set<OutputFormat>& formats);

// Full file-to-file run. Returns the exit status; the report is written on exit 0 and 1.
int run_pipeline(const PipelineConfig& config, std::ostream& log);

// Operator subcommands; each prints to `out`, logs to `log` and returns the exit status.
int inspect(const std::filesystem::path& dxf_path, std::ostream& out, std::ostream& log);
int georef_fit(const std::filesystem::path& control_points_path, std::string_view model,
               std::optional<double> max_residual, std::ostream& out, std::ostream& log);
int validate(std::span<const std::filesystem::path> geojson_paths, double dangle_tol,
             std::ostream& out, std::ostream& log);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace cad2gis
