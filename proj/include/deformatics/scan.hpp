#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace deformatics {

/// Randomized falsification campaigns. Each trial draws algebra data from its own sub-seed,
/// evaluates the algebraic gate exactly and then verifies the unchecked theory built from the data.
enum class Campaign { Jacobi, YangMills, FreedmanTownsend, Combined, TorsionMassless, Gravity };

std::string campaign_name(Campaign c);
/// Throws PreconditionError for unknown names.
Campaign parse_campaign(const std::string& name);
const std::vector<Campaign>& all_campaigns();

struct TrialResult {
  int index = 0;
  std::uint64_t sub_seed = 0;
  std::string data;            // drawn parameters in text form
  bool violated = false;       // the algebraic condition fails
  std::string gate;            // residual summary of the algebraic condition
  bool gauge_invariant = false;
  std::optional<int> first_failure;  // hierarchy first failing order (-1 = passed); absent when not run
  bool passed = false;         // gauge invariant and hierarchy passed
  std::string error;           // library error raised while building or verifying (counts as not passed)
  bool spurious() const { return violated && passed; }
  bool missed() const { return !violated && !passed; }
};

struct ScanSummary {
  int trials = 0;
  int violations = 0;
  int controls = 0;
  int spurious_passes = 0;
  int control_failures = 0;
};

struct ScanResult {
  Campaign campaign = Campaign::Jacobi;
  std::uint64_t seed = 0;
  std::vector<TrialResult> trials;  // in index order
  ScanSummary summary() const;
};

struct ScanOptions {
  int trials = 200;
  /// Count only violating trials towards `trials`; controls drawn along the way are kept.
  bool count_violations = false;
  /// Worker threads; 0 uses DEFORMATICS_THREADS or the hardware concurrency.
  int threads = 0;
};

/// Sub-seed of trial `index`, a splitmix64 mix of (seed, index).
std::uint64_t trial_seed(std::uint64_t seed, int index);
/// One trial; pure in (campaign, seed, index).
TrialResult run_trial(Campaign c, std::uint64_t seed, int index);
/// Trials in index order, independent of the worker count.
ScanResult run_campaign(Campaign c, std::uint64_t seed, const ScanOptions& opt = {});

/// min(requested or hardware concurrency, DEFORMATICS_THREADS when set), at least 1.
int worker_count(int requested = 0);

}  // namespace deformatics
