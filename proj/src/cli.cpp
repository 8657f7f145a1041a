#include "sbinterp/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "sbinterp/bicubic.hpp"
#include "sbinterp/image_io.hpp"
#include "sbinterp/metrics.hpp"

namespace sbi::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw Error("invalid numeric value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw Error("invalid integer value '" + std::string(text) + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "on") return true;
  if (text == "0" || text == "false" || text == "off") return false;
  throw Error("invalid boolean value '" + std::string(text) + "' for " + std::string(key));
}

// "dr:dc,dr:dc,..."
NeighborLayout parse_layout(std::string_view text) {
  NeighborLayout layout;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item = text.substr(start, comma - start);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) throw Error("invalid ar_layout entry '" + std::string(item) + "'");
    layout.offsets.push_back(
        {parse_int("ar_layout", item.substr(0, colon)), parse_int("ar_layout", item.substr(colon + 1))});
    start = comma + 1;
  }
  layout.validate();
  return layout;
}

std::string format_layout(const NeighborLayout& layout) {
  std::string s;
  for (const auto& o : layout.offsets) {
    if (!s.empty()) s += ',';
    s += std::to_string(o.d_row) + ":" + std::to_string(o.d_col);
  }
  return s;
}

using Setter = std::function<void(SolverConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"lambda", [](SolverConfig& c, auto k, auto v) { c.lambda = parse_double(k, v); }},
      {"gamma", [](SolverConfig& c, auto k, auto v) { c.gamma = parse_double(k, v); }},
      {"alpha", [](SolverConfig& c, auto k, auto v) { c.alpha = parse_double(k, v); }},
      {"beta", [](SolverConfig& c, auto k, auto v) { c.beta = parse_double(k, v); }},
      {"max_iters", [](SolverConfig& c, auto k, auto v) { c.max_iters = parse_int(k, v); }},
      {"ar_layout", [](SolverConfig& c, auto, auto v) { c.ar.layout = parse_layout(v); }},
      {"ar_window", [](SolverConfig& c, auto k, auto v) { c.ar.window = parse_int(k, v); }},
      {"ar_ridge", [](SolverConfig& c, auto k, auto v) { c.ar.ridge = parse_double(k, v); }},
      {"ar_patch", [](SolverConfig& c, auto k, auto v) { c.ar.patch.patch_size = parse_int(k, v); }},
      {"ar_mu", [](SolverConfig& c, auto k, auto v) { c.ar.patch.mu = parse_double(k, v); }},
      {"nl_block", [](SolverConfig& c, auto k, auto v) { c.nl.block_size = parse_int(k, v); }},
      {"nl_levels", [](SolverConfig& c, auto k, auto v) { c.nl.dwt_levels = parse_int(k, v); }},
      {"nl_radius", [](SolverConfig& c, auto k, auto v) { c.nl.search_radius = parse_int(k, v); }},
      {"nl_group", [](SolverConfig& c, auto k, auto v) { c.nl.max_group = parse_int(k, v); }},
      {"nl_epsilon", [](SolverConfig& c, auto k, auto v) { c.nl.epsilon = parse_double(k, v); }},
      {"nl_stride", [](SolverConfig& c, auto k, auto v) { c.nl.stride = parse_int(k, v); }},
      {"factor", [](SolverConfig& c, auto k, auto v) { c.sampling.factor = parse_int(k, v); }},
      {"phase_row", [](SolverConfig& c, auto k, auto v) { c.sampling.phase_row = parse_int(k, v); }},
      {"phase_col", [](SolverConfig& c, auto k, auto v) { c.sampling.phase_col = parse_int(k, v); }},
      {"g_step",
       [](SolverConfig& c, auto, auto v) {
         if (v == "coupled") {
           c.g_step = GStep::coupled;
         } else if (v == "literal") {
           c.g_step = GStep::literal;
         } else {
           throw Error("g_step must be 'coupled' or 'literal'");
         }
       }},
      {"cg_iters", [](SolverConfig& c, auto k, auto v) { c.cg.max_iters = parse_int(k, v); }},
      {"cg_tol", [](SolverConfig& c, auto k, auto v) { c.cg.tolerance = parse_double(k, v); }},
      {"zero_init", [](SolverConfig& c, auto k, auto v) { c.zero_init = parse_bool(k, v); }},
      {"pin_samples", [](SolverConfig& c, auto k, auto v) { c.pin_samples = parse_bool(k, v); }},
      {"threads",
       [](SolverConfig& c, auto k, auto v) {
         const int n = parse_int(k, v);
         if (n < 0) throw Error("threads must be non-negative");
         c.threads = static_cast<unsigned>(n);
       }},
  };
  return table;
}

std::string display_name(const fs::path& p) { return p.filename().string(); }

void print_history(const std::vector<IterationRecord>& history, std::ostream& out) {
  out << "iter  data_residual  phi            psi\n";
  char line[128];
  for (const auto& rec : history) {
    std::snprintf(line, sizeof line, "%4d  %.6e  %.6e  %.6e\n", rec.t, rec.data_residual, rec.phi,
                  rec.psi);
    out << line;
  }
}

bool write_text(const fs::path& path, const std::string& text, std::ostream& err) {
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

}  // namespace

void apply_override(SolverConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error("unknown config key '" + std::string(key) + "'");
  it->second(cfg, key, value);
}

SolverConfig config_from_overrides(const std::vector<std::string>& tokens, SolverConfig base) {
  for (const auto& token : tokens) {
    std::string_view t = token;
    while (!t.empty() && t.front() == '-') t.remove_prefix(1);
    const std::size_t eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw Error("config override '" + token + "' is not of the form --key=value");
    }
    apply_override(base, t.substr(0, eq), t.substr(eq + 1));
  }
  base.validate();
  return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const SolverConfig& cfg) {
  return {
      {"lambda", fmt_double(cfg.lambda)},
      {"gamma", fmt_double(cfg.gamma)},
      {"alpha", fmt_double(cfg.alpha)},
      {"beta", fmt_double(cfg.beta)},
      {"max_iters", std::to_string(cfg.max_iters)},
      {"ar_layout", format_layout(cfg.ar.layout)},
      {"ar_window", std::to_string(cfg.ar.window)},
      {"ar_ridge", fmt_double(cfg.ar.ridge)},
      {"ar_patch", std::to_string(cfg.ar.patch.patch_size)},
      {"ar_mu", fmt_double(cfg.ar.patch.mu)},
      {"nl_block", std::to_string(cfg.nl.block_size)},
      {"nl_levels", std::to_string(cfg.nl.dwt_levels)},
      {"nl_radius", std::to_string(cfg.nl.search_radius)},
      {"nl_group", std::to_string(cfg.nl.max_group)},
      {"nl_epsilon", fmt_double(cfg.nl.epsilon)},
      {"nl_stride", std::to_string(cfg.nl.stride)},
      {"factor", std::to_string(cfg.sampling.factor)},
      {"phase_row", std::to_string(cfg.sampling.phase_row)},
      {"phase_col", std::to_string(cfg.sampling.phase_col)},
      {"g_step", cfg.g_step == GStep::coupled ? "coupled" : "literal"},
      {"cg_iters", std::to_string(cfg.cg.max_iters)},
      {"cg_tol", fmt_double(cfg.cg.tolerance)},
      {"zero_init", cfg.zero_init ? "true" : "false"},
      {"pin_samples", cfg.pin_samples ? "true" : "false"},
  };
}

std::vector<EvaluationRow> evaluate_image(const Image& hr, const std::string& name,
                                          const SolverConfig& cfg,
                                          const std::optional<fs::path>& save_dir) {
  cfg.validate();
  const Image lr = downsample(hr, cfg.sampling);
  const Image bicubic = bicubic_upscale(lr, cfg.sampling);
  const InterpolationResult proposed = interpolate(lr, cfg);
  if (save_dir) {
    const std::string stem = fs::path(name).stem().string();
    fs::create_directories(*save_dir);
    save_pgm(bicubic, *save_dir / (stem + "_bicubic.pgm"));
    save_pgm(proposed.image, *save_dir / (stem + "_proposed.pgm"));
  }
  return {{name, "bicubic", psnr(bicubic, hr)}, {name, "proposed", psnr(proposed.image, hr)}};
}

std::string format_csv(const std::string& command, const SolverConfig& cfg,
                       const std::vector<EvaluationRow>& rows) {
  std::ostringstream out;
  out << "# sbinterp " << command << "\n# config:";
  for (const auto& [key, value] : config_entries(cfg)) out << ' ' << key << '=' << value;
  out << "\nimage,method,psnr_db\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.10f", row.psnr_db);
    out << row.image << ',' << row.method << ',' << buf << '\n';
  }
  return out.str();
}

void append_averages(std::vector<EvaluationRow>& rows) {
  std::vector<std::string> methods;
  for (const auto& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
  }
  std::vector<EvaluationRow> averages;
  for (const auto& m : methods) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : rows) {
      if (r.method == m) {
        sum += r.psnr_db;
        ++count;
      }
    }
    averages.push_back({"Average", m, sum / count});
  }
  rows.insert(rows.end(), averages.begin(), averages.end());
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (ext == ".pgm" || ext == ".ppm" || ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

int cmd_interpolate(const fs::path& lr_path, const fs::path& out_path, const SolverConfig& cfg,
                    std::ostream& out, std::ostream& err) {
  try {
    const Image lr = load_image(lr_path);
    const InterpolationResult result = interpolate(lr, cfg);
    save_pgm(result.image, out_path);
    print_history(result.history, out);
    out << "wrote " << out_path.string() << " (" << result.image.width() << "x"
        << result.image.height() << ")\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_evaluate(const fs::path& hr_path, const fs::path& csv_path, const SolverConfig& cfg,
                 const std::optional<fs::path>& save_dir, std::ostream& out, std::ostream& err) {
  try {
    const Image hr = load_image(hr_path);
    const auto rows = evaluate_image(hr, display_name(hr_path), cfg, save_dir);
    for (const auto& r : rows) out << r.image << "  " << r.method << "  " << fmt_double(r.psnr_db) << " dB\n";
    return write_text(csv_path, format_csv("evaluate", cfg, rows), err) ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_benchmark(const fs::path& image_dir, const fs::path& csv_path, const SolverConfig& cfg,
                  const std::optional<fs::path>& save_dir, std::ostream& out, std::ostream& err) {
  try {
    if (!fs::is_directory(image_dir)) {
      err << "error: " << image_dir.string() << " is not a directory\n";
      return 1;
    }
    const auto files = list_images(image_dir);
    if (files.empty()) {
      err << "error: no .pgm/.ppm/.png images in " << image_dir.string() << "\n";
      return 1;
    }
    std::vector<EvaluationRow> rows;
    for (const auto& f : files) {
      const auto per_image = evaluate_image(load_image(f), display_name(f), cfg, save_dir);
      for (const auto& r : per_image) {
        out << r.image << "  " << r.method << "  " << fmt_double(r.psnr_db) << " dB\n";
      }
      rows.insert(rows.end(), per_image.begin(), per_image.end());
    }
    append_averages(rows);
    for (std::size_t i = rows.size() - 2; i < rows.size(); ++i) {
      out << "Average  " << rows[i].method << "  " << fmt_double(rows[i].psnr_db) << " dB\n";
    }
    return write_text(csv_path, format_csv("benchmark", cfg, rows), err) ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Split-Bregman 2x image interpolation with local AR and nonlocal 3-D sparse priors"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::string save_dir;

  auto* interp = app.add_subcommand("interpolate", "Upscale a low-resolution image by 2x");
  interp->add_option("lr", in_path, "Low-resolution input (PGM/PPM/PNG)")->required();
  interp->add_option("out", out_path, "Output PGM path")->required();
  interp->allow_extras();

  auto* eval = app.add_subcommand("evaluate", "Decimate a ground-truth image and score both methods");
  eval->add_option("hr", in_path, "Ground-truth image (PGM/PPM/PNG)")->required();
  eval->add_option("csv", out_path, "Output CSV path")->required();
  eval->add_option("--save-dir", save_dir, "Directory for the reconstructed images");
  eval->allow_extras();

  auto* bench = app.add_subcommand("benchmark", "Evaluate every image in a directory");
  bench->add_option("dir", in_path, "Directory of ground-truth images")->required();
  bench->add_option("csv", out_path, "Output CSV path")->required();
  bench->add_option("--save-dir", save_dir, "Directory for the reconstructed images");
  bench->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  CLI::App* chosen = app.get_subcommands().front();
  SolverConfig cfg;
  try {
    cfg = config_from_overrides(chosen->remaining());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  std::optional<fs::path> save;
  if (!save_dir.empty()) save = fs::path(save_dir);

  if (chosen == interp) return cmd_interpolate(in_path, out_path, cfg, out, err);
  if (chosen == eval) return cmd_evaluate(in_path, out_path, cfg, save, out, err);
  return cmd_benchmark(in_path, out_path, cfg, save, out, err);
}

}  // namespace sbi::cli
