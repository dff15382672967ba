#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "biphoton/analysis.hpp"
#include "biphoton/biphoton.hpp"
#include "biphoton/config.hpp"
#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/interference.hpp"
#include "biphoton/io.hpp"

namespace biphoton::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string out;
  std::string kind;
  std::string filters;
  std::string scheme;
  double from = 0.0, to = 0.0, step = 0.0;
  double theta1 = 45.0, theta2 = 45.0;
  double tau = 0.0;
  double pass_phase = 0.0;
  int points_per_feature = 16;
  std::string preset_name;
  std::string fit_input;
  std::optional<double> omega;
  std::optional<double> lambda_nm;
};

FilterPair parse_filters_flag(const std::string& text) {
  if (text.empty() || text == "none") return {};
  std::vector<SpectralFilter> fl;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "none") {
      fl.push_back(SpectralFilter::none());
      continue;
    }
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ValidationError("--filters: expected CENTER_NM:FWHM_NM, got \"" + item + "\"");
    double c = 0.0, w = 0.0;
    try {
      c = std::stod(item.substr(0, colon));
      w = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("--filters: not a number in \"" + item + "\"");
    }
    fl.push_back(SpectralFilter::from_nm(c, w));
  }
  if (fl.size() == 1) return {fl[0], fl[0]};
  if (fl.size() == 2) return {fl[0], fl[1]};
  throw ValidationError("--filters: give one or two filters");
}

RunConfig resolve_config(const Options& o, std::optional<CrystalKind> kind) {
  RunConfig rc;
  if (o.config.empty()) {
    const auto& cat = PresetCatalog::builtin();
    const CrystalKind k = kind.value_or(CrystalKind::TypeII);
    std::string name;
    for (const auto& c : cat.crystals())
      if (c.kind == k) {
        name = c.name;
        break;
      }
    if (name.empty()) throw ValidationError("no built-in crystal preset for this kind");
    rc = parse_config({{"pump", {{"preset", cat.crystal(name).pump}}}, {"crystal", {{"preset", name}}}});
  } else {
    rc = load_config(o.config);
    if (kind && *kind != rc.crystal.kind) {
      if (!rc.crystal_preset.empty())
        throw ValidationError("--kind " + std::string(to_string(*kind)) + " conflicts with crystal preset " +
                              rc.crystal_preset);
      rc.crystal.kind = *kind;
      rc.crystal.validate();
    }
  }
  if (!o.filters.empty()) rc.filters = parse_filters_flag(o.filters);
  for (const auto& f : rc.filters) f.validate();
  return rc;
}

std::optional<CrystalKind> kind_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_crystal_kind(s);
}

RunManifest manifest(const std::string& command, const std::string& config, const fs::path& dir) {
  RunManifest m;
  m.command = command;
  m.config_path = config;
  m.output_dir = dir;
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_pi_grid(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig rc = resolve_config(o, kind_flag(o.kind));
  if (o.points_per_feature < 16) throw ValidationError("--ppf must be >= 16");
  const auto kernel = make_kernel(rc.pump, rc.crystal, rc.filters, rc.quad);
  const GridSpec spec = auto_grid_spec(*kernel, o.points_per_feature);
  const BiphotonGrid grid = rc.filtered()
                                ? pi_filtered(rc.crystal.kind, rc.pump, rc.crystal, rc.filters, spec, rc.quad)
                                : pi_grid(rc.crystal.kind, rc.pump, rc.crystal, spec, rc.quad);
  const fs::path dir(o.out);
  RunManifest m = manifest("pi-grid", o.config, dir);
  write_grid_csv(dir / "grid.csv", grid);
  m.add_output("grid.csv");
  json header = grid_header(grid);
  header["kernel"] = kernel->description();
  header["config"] = rc.to_json();
  write_json(dir / "grid.json", header);
  m.add_output("grid.json");
  m.parameters = rc.to_json();
  m.parameters["points_per_feature"] = o.points_per_feature;
  m.wall_time_s = seconds_since(t0);
  m.write();
  out << "pi-grid: " << grid.t_plus.count << " x " << grid.t_minus.count << " samples -> "
      << (dir / "grid.csv").string() << '\n';
  return kOk;
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const SchemeKind sk = parse_scheme(o.scheme);
  const CrystalKind ck = sk == SchemeKind::TypeI_MZI ? CrystalKind::TypeIDegenerate : CrystalKind::TypeII;
  const RunConfig rc = resolve_config(o, ck);
  if (rc.crystal.kind != ck)
    throw ValidationError("scheme " + o.scheme + " needs a " + std::string(to_string(ck)) + " crystal");
  const auto axis = linear_axis(o.from, o.to, o.step);

  ScanResult scan;
  if (sk == SchemeKind::TypeII_HOM_single) {
    scan = hom_visibility(axis, rc.pump, rc.crystal, rc.filters);
  } else {
    const auto kernel = make_kernel(rc.pump, rc.crystal, rc.filters, rc.quad);
    const Scheme scheme = sk == SchemeKind::Branning4 ? Scheme::branning4(kernel, o.pass_phase)
                                                      : Scheme::make(sk, kernel);
    scan = spacetime_scan(scheme, AnalyzerPair::degrees(o.theta1, o.theta2), axis, o.tau);
  }

  const fs::path dir(o.out);
  RunManifest m = manifest("scan", o.config, dir);
  write_scan_csv(dir / "scan.csv", scan);
  m.add_output("scan.csv");
  json side = scan.meta;
  side["config"] = rc.to_json();
  side["axis"] = {{"name", scan.axis_name}, {"from", o.from}, {"to", o.to}, {"step", o.step}, {"count", axis.size()}};
  write_json(dir / "scan.json", side);
  m.add_output("scan.json");

  if (sk != SchemeKind::TypeII_HOM_single) {
    const double period = 2.0 * kPi / rc.pump.omega_p;
    if (axis.back() - axis.front() >= 5.0 * period) {
      try {
        const EnvelopeFit fit = fit_envelope(scan);
        write_json(dir / "fit.json", to_json(fit));
        m.add_output("fit.json");
        out << "fit: fwhm " << format_number(fit.fwhm) << " fs, visibility " << format_number(fit.visibility)
            << '\n';
      } catch (const FitError& e) {
        err << "warning: envelope fit skipped: " << e.what() << '\n';
        m.parameters["fit_error"] = e.what();
      }
    }
  }
  m.parameters["config"] = rc.to_json();
  m.parameters["scheme"] = o.scheme;
  m.parameters["theta1_deg"] = o.theta1;
  m.parameters["theta2_deg"] = o.theta2;
  m.parameters["tau_fs"] = o.tau;
  m.parameters["pass_phase_rad"] = o.pass_phase;
  m.parameters["axis"] = side["axis"];
  m.wall_time_s = seconds_since(t0);
  m.write();
  out << "scan: " << scan.size() << " points -> " << (dir / "scan.csv").string() << '\n';
  return kOk;
}

json pump_json(const PumpPreset& p) {
  const PumpPulse pulse = p.pulse();
  return {{"name", p.name},
          {"type", "pump"},
          {"lambda_nm", p.lambda_nm},
          {"envelope_fwhm_fs", p.envelope_fwhm_fs},
          {"omega_p_radfs", pulse.omega_p},
          {"sigma_p_radfs", pulse.sigma_p},
          {"note", p.note}};
}

json crystal_json(const PresetCatalog& cat, const CrystalPreset& c) {
  const PumpPulse pump = cat.pump(c.pump).pulse();
  const CrystalParams cp = cat.crystal_params(c.name, pump);
  const auto& mat = cat.material(c.material);
  return {{"name", c.name},
          {"type", "crystal"},
          {"kind", std::string(to_string(c.kind))},
          {"material", c.material},
          {"material_reference", mat.reference},
          {"L_um", c.length_um},
          {"default_pump", c.pump},
          {"D_fs_per_um", cp.D},
          {"D_plus_fs_per_um", cp.D_plus},
          {"D_second_fs2_per_um", cp.D_second},
          {"DL_fs", cp.D * cp.length_um},
          {"note", c.note}};
}

int cmd_presets_list(const Options& o, std::ostream& out) {
  const auto& cat = PresetCatalog::builtin();
  json all = json::array();
  for (const auto& p : cat.pumps()) {
    out << std::left << std::setw(20) << p.name << "pump     lambda " << format_number(p.lambda_nm)
        << " nm, envelope FWHM " << format_number(p.envelope_fwhm_fs) << " fs\n";
    all.push_back(pump_json(p));
  }
  for (const auto& c : cat.crystals()) {
    out << std::left << std::setw(20) << c.name << "crystal  " << to_string(c.kind) << ", L="
        << format_number(c.length_um) << " um, " << c.material << '\n';
    all.push_back(crystal_json(cat, c));
  }
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    RunManifest m = manifest("presets list", "", dir);
    write_json(dir / "presets.json", all);
    m.add_output("presets.json");
    m.parameters = {{"count", all.size()}};
    m.write();
  }
  return kOk;
}

int cmd_presets_show(const Options& o, std::ostream& out) {
  const auto& cat = PresetCatalog::builtin();
  json j;
  bool found = false;
  for (const auto& p : cat.pumps())
    if (p.name == o.preset_name) {
      j = pump_json(p);
      found = true;
    }
  for (const auto& c : cat.crystals())
    if (c.name == o.preset_name) {
      j = crystal_json(cat, c);
      found = true;
    }
  for (const auto& mat : cat.materials())
    if (mat.name == o.preset_name) {
      j = {{"name", mat.name}, {"type", "material"}, {"reference", mat.reference}};
      found = true;
    }
  if (!found) throw ValidationError("unknown preset \"" + o.preset_name + "\"");
  out << j.dump(2) << '\n';
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    RunManifest m = manifest("presets show", "", dir);
    write_json(dir / "preset.json", j);
    m.add_output("preset.json");
    m.parameters = {{"name", o.preset_name}};
    m.write();
  }
  return kOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  ScanResult scan = read_scan_csv(o.fit_input);
  FitOptions fo;
  if (o.omega && o.lambda_nm) throw ValidationError("give --omega or --lambda-nm, not both");
  if (o.omega) fo.omega = *o.omega;
  if (o.lambda_nm) fo.omega = omega_from_wavelength_nm(*o.lambda_nm);
  const EnvelopeFit fit = fit_envelope(scan, fo);
  const json j = to_json(fit);
  out << j.dump(2) << '\n';
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    RunManifest m = manifest("fit", "", dir);
    write_json(dir / "fit.json", j);
    m.add_output("fit.json");
    m.parameters = {{"input", o.fit_input}, {"rows", scan.size()}};
    if (fo.omega) m.parameters["omega_radfs"] = *fo.omega;
    m.wall_time_s = seconds_since(t0);
    m.write();
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Biphoton amplitudes and two-photon interference scans", "biphoton"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BIPHOTON_VERSION));
  Options o;

  auto* grid = app.add_subcommand("pi-grid", "Sample the two-photon amplitude on a (t+, t-) grid");
  grid->add_option("--config", o.config, "JSON config (default: built-in preset for --kind)");
  grid->add_option("--out", o.out, "Output directory")->required();
  grid->add_option("--kind", o.kind, "Crystal kind")->check(CLI::IsMember({"type2", "type1"}));
  grid->add_option("--filters", o.filters, "none | C:W | C1:W1,C2:W2 (nm)");
  grid->add_option("--ppf", o.points_per_feature, "Grid points per feature width");

  auto* scan = app.add_subcommand("scan", "Coincidence rate versus delay");
  scan->add_option("--config", o.config, "JSON config (default: built-in preset for the scheme)");
  scan->add_option("--out", o.out, "Output directory")->required();
  scan->add_option("--scheme", o.scheme, "type2-mzi | type1-mzi | hom | branning")->required();
  scan->add_option("--from", o.from, "First delay (fs)")->required();
  scan->add_option("--to", o.to, "Last delay (fs)")->required();
  scan->add_option("--step", o.step, "Delay step (fs)")->required();
  scan->add_option("--theta1", o.theta1, "Analyzer 1 angle (deg)");
  scan->add_option("--theta2", o.theta2, "Analyzer 2 angle (deg)");
  scan->add_option("--tau", o.tau, "Fixed e-o delay (fs) for mzi and branning schemes");
  scan->add_option("--pass-phase", o.pass_phase, "Extra second-pass phase (rad), branning only");
  scan->add_option("--filters", o.filters, "none | C:W | C1:W1,C2:W2 (nm)");

  auto* presets = app.add_subcommand("presets", "Built-in pump and crystal presets");
  presets->require_subcommand(1);
  auto* plist = presets->add_subcommand("list", "List presets");
  plist->add_option("--out", o.out, "Also write presets.json here");
  auto* pshow = presets->add_subcommand("show", "Show one preset with derived constants");
  pshow->add_option("name", o.preset_name)->required();
  pshow->add_option("--out", o.out, "Also write preset.json here");

  auto* fit = app.add_subcommand("fit", "Gaussian envelope fit of a scan CSV");
  fit->add_option("input", o.fit_input, "CSV with a delay column and a rate column")->required();
  fit->add_option("--omega", o.omega, "Fringe angular frequency (rad/fs)");
  fit->add_option("--lambda-nm", o.lambda_nm, "Fringe wavelength (nm), e.g. the pump");
  fit->add_option("--out", o.out, "Output directory for fit.json");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (grid->parsed()) return cmd_pi_grid(o, out);
    if (scan->parsed()) return cmd_scan(o, out, err);
    if (plist->parsed()) return cmd_presets_list(o, out);
    if (pshow->parsed()) return cmd_presets_show(o, out);
    if (fit->parsed()) return cmd_fit(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace biphoton::cli
