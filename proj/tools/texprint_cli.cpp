// texprint: batch driver for parametrize / segment / apply / check.
// Exit codes: 0 success, 1 validation failure, 2 usage or input error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "texprint/error.hpp"
#include "texprint/pipeline.hpp"

using namespace texprint;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

std::string read_text(const std::string& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct Flags {
  std::string config;
  std::string mesh, element, demo, region, out, seed;
  std::string mode = "raised";
  double depth = 1.0;
  bool suggest_only = false;
  std::optional<double> chord_deviation, lambda_fraction, threshold;
  std::optional<int> segment_r, segment_k, arap_iterations;
  bool no_physical_scale = false;
};

Config load_config(const Flags& f) {
  Config c = f.config.empty() ? Config{} : config_from_json(read_text(f.config));
  if (f.chord_deviation) c.svg.chord_deviation = *f.chord_deviation;
  if (f.lambda_fraction) c.segmentation.lambda_fraction = *f.lambda_fraction;
  if (f.threshold) c.segmentation.threshold = *f.threshold;
  if (f.segment_r) c.segmentation.R = *f.segment_r;
  if (f.segment_k) c.segmentation.k = *f.segment_k;
  if (f.arap_iterations) c.arap.max_iterations = *f.arap_iterations;
  if (f.no_physical_scale) c.imprint.physical_scale = false;
  return c;
}

int cmd_parametrize(const Flags& f) {
  const Config c = load_config(f);
  const TriMesh mesh = load_mesh_file(f.mesh);
  const UVChart chart = parameterize(mesh, c.arap);
  double uv_area = 0;
  for (std::size_t i = 0; i < chart.face_count(); ++i) uv_area += chart.signed_area(static_cast<int>(i));
  std::cout << "faces: " << chart.face_count() << "\n"
            << "seam edges: " << chart.seam_edges.size() << "\n"
            << "max distortion: " << chart.max_distortion << "\n"
            << "area error: " << std::abs(uv_area / mesh.surface_area() - 1.0) << "\n";
  if (!f.out.empty()) write_text(f.out, chart_to_json(chart));
  return kOk;
}

int cmd_segment(const Flags& f) {
  const Config c = load_config(f);
  const Vec3 seed = parse_point(f.seed);
  const TriMesh mesh = load_mesh_file(f.mesh);
  RegionDocument doc{seed, infer_region(mesh, seed, c.segmentation)};
  std::cout << "region faces: " << doc.region.faces.size() << " of " << mesh.face_count() << "\n"
            << "score: " << doc.region.score << "\n";
  if (doc.region.fallback) std::cout << "no boundary found; region is the whole component\n";
  if (!f.out.empty()) write_text(f.out, region_to_json(doc));
  return kOk;
}

int cmd_apply(const Flags& f) {
  const Config c = load_config(f);
  ExtrudeOptions extrude;
  extrude.mode = parse_mode(f.mode);
  extrude.depth = f.depth;
  if (extrude.mode != ExtrudeMode::Cutout && !(f.depth > 0)) throw InvalidInput("--depth must be positive");
  const TriMesh mesh = load_mesh_file(f.mesh);
  const TextureElement element = load_element_file(f.element, c.svg);
  const Demo demo = demo_from_json(read_text(f.demo));
  std::optional<std::vector<int>> region;
  if (!f.region.empty()) region = region_from_json(read_text(f.region)).region.faces;

  const UVChart chart = parameterize(mesh, c.arap);
  const Suggestion s = suggest(mesh, chart, element, demo, region, c.imprint);
  for (const std::string& w : s.warnings) std::cerr << "warning: " << w << "\n";
  if (f.suggest_only) {
    std::optional<Generator> g;
    if (s.pattern) g = s.pattern->generator;
    std::cout << placements_to_json(s.placements, s.demonstrated, g) << "\n";
    return kOk;
  }
  if (f.out.empty()) throw InvalidInput("--out is required unless --suggest-only is given");

  const ApplyResult r = apply(mesh, chart, element, s.placements, extrude, c.imprint);
  for (const std::string& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "placements: " << s.placements.size() << "\n" << describe(r.report);
  if (!r.valid) {
    std::cerr << "error: output failed validation; nothing written\n";
    return kInvalid;
  }
  const auto bytes = export_mesh(r.mesh, format_from_path(f.out) == MeshFormat::Obj ? ExportFormat::Obj : ExportFormat::StlBinary);
  write_file(f.out, bytes);
  return kOk;
}

int cmd_check(const Flags& f) {
  const TriMesh mesh = load_mesh_file(f.mesh);
  const WatertightReport r = check_watertight(mesh);
  std::cout << describe(r);
  return r.is_closed ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Texture elements onto 3D-printable meshes"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON config file (texprint.config)")->check(CLI::ExistingFile);
  app.add_option("--chord-deviation", f.chord_deviation, "SVG curve flattening tolerance, mm (default 0.05)");
  app.add_option("--segment-r", f.segment_r, "Distortion ring radius R (default 3)");
  app.add_option("--segment-k", f.segment_k, "Boundary candidates k (default 8)");
  app.add_option("--lambda-fraction", f.lambda_fraction, "Cursor distance weight, fraction of bbox diagonal (default 0.1)");
  app.add_option("--threshold", f.threshold, "Minimum distortion for a boundary candidate (default 0.02)");
  app.add_option("--arap-iterations", f.arap_iterations, "ARAP iteration cap (default 100)");
  app.add_flag("--no-physical-scale", f.no_physical_scale, "Place elements at chart scale, without local length correction");

  auto* parametrize = app.add_subcommand("parametrize", "Cut seams and flatten a mesh into a chart");
  parametrize->add_option("--mesh", f.mesh, "Input OBJ or STL")->required();
  parametrize->add_option("--out", f.out, "Chart JSON to write");

  auto* segment = app.add_subcommand("segment", "Infer the region around a seed point");
  segment->add_option("--mesh", f.mesh, "Input OBJ or STL")->required();
  segment->add_option("--seed", f.seed, "Cursor position \"x,y,z\"")->required();
  segment->add_option("--out", f.out, "Region JSON to write");

  auto* apply_cmd = app.add_subcommand("apply", "Complete a demonstration and texture the mesh");
  apply_cmd->add_option("--mesh", f.mesh, "Input OBJ or STL")->required();
  apply_cmd->add_option("--element", f.element, "SVG texture element")->required();
  apply_cmd->add_option("--demo", f.demo, "Demo JSON (texprint.demo)")->required();
  apply_cmd->add_option("--region", f.region, "Region JSON from segment");
  apply_cmd->add_option("--mode", f.mode, "raised, embossed or cutout");
  apply_cmd->add_option("--depth", f.depth, "Extrusion depth, mm (default 1)");
  apply_cmd->add_option("--out", f.out, "Output STL (or .obj)");
  apply_cmd->add_flag("--suggest-only", f.suggest_only, "Print the completed placements and write nothing");

  auto* check = app.add_subcommand("check", "Report whether a mesh is watertight");
  check->add_option("--mesh,mesh", f.mesh, "Mesh to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*parametrize) return cmd_parametrize(f);
    if (*segment) return cmd_segment(f);
    if (*apply_cmd) return cmd_apply(f);
    return cmd_check(f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
