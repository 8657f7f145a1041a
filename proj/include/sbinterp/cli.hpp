#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbinterp/image.hpp"
#include "sbinterp/solver.hpp"

namespace sbi::cli {

/// Sets one SolverConfig field from its command-line key. Throws Error on an
/// unknown key or an unparsable value.
void apply_override(SolverConfig& cfg, std::string_view key, std::string_view value);

/// Parses "--key=value" tokens (the leading dashes are optional).
SolverConfig config_from_overrides(const std::vector<std::string>& tokens,
                                   SolverConfig base = {});

/// Every key that influences numeric output with its current value, in a
/// fixed order. `threads` is omitted since results do not depend on it.
std::vector<std::pair<std::string, std::string>> config_entries(const SolverConfig& cfg);

struct EvaluationRow {
  std::string image;
  std::string method;
  double psnr_db = 0.0;
};

/// Decimates `hr`, reconstructs with bicubic and with the solver, and scores
/// both against `hr`. Optionally saves both reconstructions as PGM.
std::vector<EvaluationRow> evaluate_image(const Image& hr, const std::string& name,
                                          const SolverConfig& cfg,
                                          const std::optional<std::filesystem::path>& save_dir);

/// CSV text: comment lines with the command and configuration, a header row,
/// then one row per entry.
std::string format_csv(const std::string& command, const SolverConfig& cfg,
                       const std::vector<EvaluationRow>& rows);

/// Appends one "Average" row per method (in first-seen method order).
void append_averages(std::vector<EvaluationRow>& rows);

/// Image files (.pgm, .ppm, .png) directly inside `dir`, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

// Commands return a process exit status and report problems on `err`.
int cmd_interpolate(const std::filesystem::path& lr_path, const std::filesystem::path& out_path,
                    const SolverConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const std::filesystem::path& hr_path, const std::filesystem::path& csv_path,
                 const SolverConfig& cfg, const std::optional<std::filesystem::path>& save_dir,
                 std::ostream& out, std::ostream& err);
int cmd_benchmark(const std::filesystem::path& image_dir, const std::filesystem::path& csv_path,
                  const SolverConfig& cfg, const std::optional<std::filesystem::path>& save_dir,
                  std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[0] is the program name).
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sbi::cli
