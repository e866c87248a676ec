#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

// Derivative-free box-constrained minimizers: Rosenbrock's rotating-direction
// local search and a soft-selection evolutionary global stage.
namespace cvmesh::opt {

using Objective = std::function<double(std::span<const double>)>;

/// Per-coordinate open interval lo < x < hi.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const { return lo.size(); }
  bool contains(std::span<const double> x) const;
};

/// Seeded generator with distribution transforms that give identical streams
/// on every platform (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   // Box-Muller

 private:
  std::mt19937_64 engine_;
};

struct RosenbrockParams {
  double expansion = 3.0;
  double contraction = -0.5;
  double initial_step = 0.1;   // fraction of each interval width
  double tol_step = 1e-10;     // fraction of each interval width
  double tol_f = 1e-14;        // absolute improvement over one stage
  long max_evals = 0;          // 0 means 100000 * dimension
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  long evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // best value per stage / generation
};

/// Minimizes f from x0 (strictly inside `bounds`). Out-of-box trial points
/// count as failed steps. Hitting max_evals returns the best point found with
/// converged = false.
Result rosenbrock_minimize(const Objective& f, std::vector<double> x0, const Box& bounds,
                           const RosenbrockParams& params = {});

struct SoftSelectionParams {
  int mu = 20;
  int lambda = 140;
  int generations = 200;
  double sigma = 0.1;         // fraction of each interval width
  double sigma_decay = 0.99;  // per generation
  bool polish = true;
  RosenbrockParams polish_params;
};

/// (mu, lambda) evolutionary search with Gaussian mutation. Parents are drawn
/// with probability proportional to a linearly scaled fitness, so weaker
/// individuals still reproduce at a reduced rate. The best individual found
/// so far is always carried over, which makes the per-generation trace
/// non-increasing. The winner is polished with rosenbrock_minimize.
///
/// `start`, when given, joins the initial population and is polished as
/// well; the better of the two polished points is returned. Offspring are evaluated
/// concurrently; the result depends only on the seed.
Result soft_selection_minimize(const Objective& f, const Box& bounds, std::uint64_t seed,
                               const SoftSelectionParams& params = {},
                               std::optional<std::vector<double>> start = std::nullopt);

}  // namespace cvmesh::opt
