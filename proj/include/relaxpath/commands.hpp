#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "relaxpath/io.hpp"

namespace relaxpath::cli {

enum class TrackerKind { Local, Sparse, Uniform, Global, Auto };

TrackerKind parse_tracker(const std::string& name);
Objective parse_objective(const std::string& name);

/// 2 for invalid input or parameters, 3 for tracker incompatibility,
/// 4 for ZeroPrimal, 5 for ZeroProbability.
int exit_code(Errc code);

struct PathOptions {
  std::string input;
  std::string out;
  TrackerKind tracker = TrackerKind::Auto;
  Objective objective = Objective::Entropy;
};

struct SolveOptions {
  std::string input;
  std::string out;
  double nu = 0;
  Objective objective = Objective::Entropy;
};

struct SelectOptions {
  std::string input;
  std::string path;  // optional precomputed path file
  std::string out;
  TrackerKind tracker = TrackerKind::Auto;
  double lambda_min = 1e-9;
};

struct SweepOptions {
  std::string dist = "zipf";
  Index n = 5000;
  std::vector<Index> samples;  // defaults to n/4, n/2, n, 2n
  std::uint64_t seed = 42;
  int repeats = 10;
  double prior_offset = 2;
  double exponent = 1;
  std::string out;
};

struct CascadeOptions {
  std::string input;
  std::string out;
};

/// Picks the tracker for an instance; throws NonUniformPrior or IncompatibleTracker
/// on a mismatch.
RelaxationPath<double> compute_path(const ProblemInstance<double>& inst, TrackerKind tracker,
                                    Objective objective);

std::string path_document(const PathOptions& opt);
std::string solve_document(const SolveOptions& opt);
std::string select_document(const SelectOptions& opt);
std::string sweep_document(const SweepOptions& opt);
std::string cascade_document(const CascadeOptions& opt);

/// Runs a command, writes its output, and maps errors to exit codes with a
/// diagnostic on err.
int cmd_path(const PathOptions& opt, std::ostream& err);
int cmd_solve(const SolveOptions& opt, std::ostream& err);
int cmd_select(const SelectOptions& opt, std::ostream& err);
int cmd_sweep(const SweepOptions& opt, std::ostream& err);
int cmd_cascade(const CascadeOptions& opt, std::ostream& err);

struct SweepRow {
  Index sample_size;
  double mean_kappa;
  double kappa_over_n;
};

/// Seeded Zipf path-complexity experiment: mean kappa over repeats per sample size.
std::vector<SweepRow> zipf_sweep(const SweepOptions& opt);

/// std::mt19937_64 with 53-bit uniforms and inverse-CDF categorical draws.
class SampleGenerator {
 public:
  explicit SampleGenerator(std::uint64_t seed);
  double uniform();
  /// Counts of `draws` samples from the distribution with cumulative masses cdf.
  Eigen::VectorXd multinomial(const std::vector<double>& cdf, Index draws);

 private:
  std::mt19937_64 engine_;
};

}  // namespace relaxpath::cli
