#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "halfline/grid.hpp"
#include "halfline/maximal.hpp"
#include "halfline/rispace.hpp"
#include "halfline/sio.hpp"
#include "halfline/weights.hpp"

namespace halfline {

/// Named experiments, one per verified inequality or equivalence.
enum class ExperimentKind {
  sawyer_equivalence,
  weak_type_constant,
  uniform_family,
  coifman,
  fefferman_stein,
  pointwise_sharp,
  lorentz_shimogaki,
  rubio_properties,
  boyd_extrapolation,
  strong_type_lpw,
  maxreg_first_order,
  negative_control,
  embedding,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);
const std::vector<std::string>& experiment_kind_names();

struct GridSpecCfg {
  double T = 8.0;
  std::size_t n = 512;
  bool geometric = false;
  double first = 0.0;  // first breakpoint of geometric grids
};

struct ProbeFamilySpec {
  int random_count = 6;
  int dyadic_depth = 2;
  bool indicators = true;
  bool oscillating = true;
  bool spikes = true;
  bool random_steps = true;
  double positive_floor = 0.0;  // added to every probe (rubio experiments)
};

struct Tolerances {
  double stability = 0.15;     // allowed relative growth per doubling
  double growth_factor = 2.0;  // required growth for negative directions
  double slack = 1e-9;         // absolute slack of explicit-constant checks
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::weak_type_constant;
  std::string name;
  GridSpecCfg grid;
  std::vector<WeightSpec> weights;
  SpaceSpec space = SpaceSpec::Lp(2.0);
  double p = 2.0;
  double r = 2.0;  // kernel regularity exponent; the dual r' = r/(r-1) is used
  double q = 4.0;  // companion exponent (embedding)
  SawyerVariant variant = SawyerVariant::minus;
  Side side = Side::backward;
  Eigen::MatrixXd generator;  // kernel kinds only
  ProbeFamilySpec probes;
  int refinements = 3;  // doublings in the ladder
  Tolerances tol;
  std::uint64_t seed = 0;
  int rubio_terms = 12;
  double rubio_safety = 1.5;
  int sharp_subdivisions = 4;
};

struct MeasurementRow {
  std::string label;
  int level = 0;
  std::size_t cells = 0;
  double value = 0.0;
  std::string witness;
};

struct ExperimentReport {
  std::string kind;
  std::string name;
  std::string verdict;          // pass | fail | inconclusive
  std::string bound_direction;  // how the measured constants relate to truth
  std::string detail;           // which criterion fired
  double headline = 0.0;        // finest-level constant
  std::vector<MeasurementRow> rows;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

/// Runs one seeded experiment; deterministic for a fixed config.  Throws on
/// configuration errors and on unexpected NaN/infinite probe values.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Runs experiments on a pool of `parallelism` workers; output order equals
/// input order, per-config errors become failed reports without aborting the
/// sweep.  Reports are bit-identical for any parallelism (timings aside).
std::vector<ExperimentReport> sweep(const std::vector<ExperimentConfig>& cfgs,
                                    int parallelism);

/// Fixed probe families (dyadic indicators, +-1 oscillations, single-cell
/// spikes, seeded uniform noise).  Exposed for tests.
std::vector<std::pair<std::string, StepFunction>> make_scalar_probes(
    const Grid& g, const ProbeFamilySpec& spec, std::uint64_t seed);

}  // namespace halfline
