#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "heatda/analysis.hpp"

namespace heatda {

/// Experiment configuration. Text form is INI-style:
///
///   [problem]        variant, solution, boundary_condition
///   [discretization] levels, ct, solver
///   [time]           T, T1, T2
///   [geometry]       omega, B            (boxes as "x0 x1 y0 y1")
///   [data]           delta, seed, target
///   [output]         directory, name, svg, norms
///
/// Lists are comma or space separated; '#' and ';' start comments. Keys left
/// out take the defaults of the chosen variant.
struct RunConfig {
  Variant variant = Variant::Unstable;
  std::string solution;
  std::string boundary_condition;  // "none" (UnstableModel) or "dirichlet" (StableModel)
  std::vector<int> levels;
  double ct = 1.0;
  SolveMethod solver = SolveMethod::Auto;
  double T = 1.0;
  double T1 = 0.0;
  double T2 = 1.0;
  Region omega;
  Region B;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  PerturbationTarget target = PerturbationTarget::Both;
  std::string directory;
  std::string name;
  bool svg = false;
  std::vector<NormKind> norms;

  static RunConfig defaults(Variant variant);

  ExperimentSetup setup() const;
  /// Every field, defaults included, in the text format.
  std::string render() const;
  /// Throws Validation naming the field.
  void validate() const;

  std::string csv_path(std::string_view command) const;
  std::string svg_path(std::string_view command, std::string_view kind) const;
};

/// Parses and validates. Errors are Validation with "source:line: " prefixes
/// where a line is known.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
/// Reads the file (Io on failure) and parses it.
RunConfig load_config(const std::string& path);

const char* to_string(PerturbationTarget target);

}  // namespace heatda
