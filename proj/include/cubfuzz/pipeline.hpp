#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cubfuzz/aggregate.hpp"
#include "cubfuzz/config.hpp"
#include "cubfuzz/cub.hpp"
#include "cubfuzz/io.hpp"

namespace cubfuzz {

/// Inputs normalized for analysis: negative-orientation data are reversed
/// once here, so every downstream stage works on a positive scale.
struct PipelineData {
  RatingsTable table;
  RatingScale scale;                        ///< positive orientation
  bool orientation_normalized = false;      ///< input scale was negative
  std::vector<RatingSample> samples;        ///< per item, all available ratings
  std::vector<std::vector<int>> complete;   ///< listwise-complete rows
  std::vector<long> complete_index;         ///< 1-based data-row number per complete row
};

PipelineData prepare_data(const RatingsTable& table, const AnalysisConfig& cfg);

/// Fit of one item; a non-empty error means the computation failed and the
/// run must exit nonzero, but other items proceed.
struct ItemFit {
  std::string item;
  long n = 0;
  std::string error;
  CubFit base;
  bool shelter_tried = false;
  CubFit shelter_fit;
  std::string shelter_error;
  LrTest lrt{0.0, 1.0};
  bool shelter_retained = false;
  double se_pi1 = 0.0, se_pi2 = 0.0;
  bool has_derived_se = false;

  bool ok() const { return error.empty() && shelter_error.empty(); }
  /// Accuracy estimate feeding the CUB-Fuzzy system: shelter pi1 when the
  /// LRT retains the shelter, the baseline pi otherwise.
  double pi1() const;
};

std::vector<ItemFit> fit_items(const PipelineData& data, const AnalysisConfig& cfg);

/// Per-item profiles of one fuzzy system; a missing profile carries the
/// reason in errors at the same index.
struct SystemProfiles {
  FuzzySystem system;
  std::vector<std::optional<IfsProfile>> profiles;
  std::vector<std::string> errors;
  std::vector<double> pi1_used;  ///< cub_fuzzy only, NaN where unavailable

  bool all_ok() const;
};

std::vector<SystemProfiles> build_profiles(const PipelineData& data,
                                           const std::vector<ItemFit>& fits,
                                           const AnalysisConfig& cfg);

/// Weights, per-item aggregated fuzzy functions and the composite row for
/// one system. For the membership-only empirical system the nu/u/score/
/// accuracy entries stay empty and per-respondent nu is not emitted.
struct SystemAggregate {
  FuzzySystem system;
  std::string error;  ///< non-empty when the aggregate could not be computed
  WeightVector weights;
  std::vector<double> g;  ///< fuzzy proportions behind the weights; empty for uniform/custom
  bool membership_only = false;
  std::vector<double> item_mu, item_nu, item_u, item_s, item_a;
  double mu_bar = 0.0, nu_bar = 0.0, u_bar = 0.0, s_bar = 0.0, a_bar = 0.0;
  std::vector<RespondentAggregate> per_respondent;
  double identity_gap = 0.0;  ///< |u_bar - sum_k w_k u_bar_k|

  bool ok() const { return error.empty(); }
};

std::vector<SystemAggregate> aggregate_systems(const PipelineData& data,
                                               const std::vector<SystemProfiles>& profiles,
                                               const AnalysisConfig& cfg);

/// Outcome of a CLI command: ok decides the exit status; files lists what
/// was written (run.json last).
struct RunOutcome {
  bool ok = true;
  std::vector<std::string> files;
};

RunOutcome cmd_fit(const AnalysisConfig& cfg, const std::string& data_path,
                   const std::string& out_dir);
RunOutcome cmd_fuzzy(const AnalysisConfig& cfg, const std::string& data_path,
                     const std::string& out_dir);
RunOutcome cmd_aggregate(const AnalysisConfig& cfg, const std::string& data_path,
                         const std::string& out_dir);
RunOutcome cmd_report(const AnalysisConfig& cfg, const std::string& data_path,
                      const std::string& out_dir);
RunOutcome cmd_simulate(const AnalysisConfig& cfg, const std::string& out_dir);
RunOutcome cmd_distance(const std::string& path_a, const std::string& path_b,
                        const std::string& out_dir);

}  // namespace cubfuzz
