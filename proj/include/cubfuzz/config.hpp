#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubfuzz/cub.hpp"
#include "cubfuzz/fuzzy.hpp"
#include "cubfuzz/rating.hpp"

namespace cubfuzz {

enum class ShelterMode { none, fixed, automatic };
enum class WeightScheme { uncertainty, membership, uniform, custom };

/// Scale specification with 0 meaning "derive the default": ip = (m+1)/2
/// (odd m only), lb = 1, ub = m.
struct ScaleSpec {
  int m = 7;
  int ip = 0;
  int lb = 0;
  int ub = 0;
  Orientation orientation = Orientation::positive;
};

RatingScale resolve_scale(const ScaleSpec& spec);

/// Parameters for the simulate subcommand; lists make a full pi x xi grid,
/// one output file per cell. c = 0 disables the shelter component.
struct SimulateSpec {
  std::vector<double> pi{0.7};
  std::vector<double> xi{0.3};
  double delta = 0.0;
  int c = 0;
  long n = 1000;
};

struct AnalysisConfig {
  ScaleSpec scale;
  std::vector<FuzzySystem> systems{FuzzySystem::cub_fuzzy};
  SplineConfig spline;
  ShelterMode shelter = ShelterMode::none;
  int shelter_c = 0;  ///< shelter category when mode is fixed
  double alpha = 0.05;
  WeightScheme weights = WeightScheme::uncertainty;
  std::string weights_path;  ///< custom weight file, one weight per item
  std::uint64_t seed = 12345;
  FitOptions em;
  SimulateSpec simulate;
};

/// Loads a JSON configuration document on top of base: only keys present in
/// the file are overridden. Unknown keys are rejected so typos surface
/// instead of silently falling back to defaults.
AnalysisConfig load_config(const std::string& path, AnalysisConfig base = {});

/// Reads one weight per line (or a single comma-separated line), checks the
/// sum is within 1e-6 of 1, and renormalizes exactly.
std::vector<double> load_weight_file(const std::string& path);

const char* to_string(FuzzySystem s);
const char* to_string(WeightScheme s);
const char* to_string(ShelterMode s);
FuzzySystem fuzzy_system_from_string(const std::string& name);

}  // namespace cubfuzz
