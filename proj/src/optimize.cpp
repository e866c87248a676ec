#include "cvmesh/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cvmesh/error.hpp"
#include "cvmesh/parallel.hpp"

namespace cvmesh::opt {

bool Box::contains(std::span<const double> x) const {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
  }
  return true;
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

using Matrix = std::vector<std::vector<double>>;

// New search directions from the stage displacements (Gram-Schmidt on
// A_k = sum_{m >= k} lambda_m d_m). Directions whose A_k degenerates keep
// their previous orientation, re-orthogonalized.
void rotate_directions(Matrix& dirs, const std::vector<double>& lambda) {
  const std::size_t n = dirs.size();
  Matrix a(n, std::vector<double>(n, 0.0));
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n) a[k] = a[k + 1];
    for (std::size_t c = 0; c < n; ++c) a[k][c] += lambda[k] * dirs[k][c];
  }
  Matrix out;
  out.reserve(n);
  auto orthonormalize = [&](std::vector<double> v) -> std::optional<std::vector<double>> {
    const double before = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (before == 0.0) return std::nullopt;
    for (const auto& e : out) {
      const double p = std::inner_product(v.begin(), v.end(), e.begin(), 0.0);
      for (std::size_t c = 0; c < n; ++c) v[c] -= p * e[c];
    }
    const double after = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (after <= 1e-10 * before) return std::nullopt;
    for (double& c : v) c /= after;
    return v;
  };
  for (std::size_t k = 0; k < n; ++k) {
    auto e = orthonormalize(a[k]);
    if (!e) e = orthonormalize(dirs[k]);
    for (std::size_t c = 0; !e && c < n; ++c) {
      std::vector<double> unit(n, 0.0);
      unit[c] = 1.0;
      e = orthonormalize(unit);
    }
    out.push_back(*e);
  }
  dirs = std::move(out);
}

}  // namespace

Result rosenbrock_minimize(const Objective& f, std::vector<double> x0, const Box& bounds,
                           const RosenbrockParams& params) {
  const std::size_t n = x0.size();
  if (n == 0 || bounds.size() != n) {
    throw Error(ErrorKind::InvalidInput, "rosenbrock: dimension mismatch");
  }
  if (!bounds.contains(x0)) {
    throw Error(ErrorKind::InvalidInput, "rosenbrock: start point outside the bounds");
  }
  const long max_evals = params.max_evals > 0 ? params.max_evals : 100000L * static_cast<long>(n);

  Result res;
  res.x = std::move(x0);
  res.value = f(res.x);
  res.evaluations = 1;
  if (!std::isfinite(res.value)) {
    throw Error(ErrorKind::InvalidInput, "rosenbrock: objective not finite at the start point");
  }

  Matrix dirs(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) dirs[k][k] = 1.0;
  std::vector<double> width(n), step(n);
  for (std::size_t k = 0; k < n; ++k) {
    width[k] = bounds.hi[k] - bounds.lo[k];
    step[k] = params.initial_step * width[k];
  }
  const double min_width = *std::min_element(width.begin(), width.end());

  std::vector<double> trial(n);
  while (true) {
    const double stage_start = res.value;
    std::vector<double> lambda(n, 0.0);
    std::vector<bool> success(n, false), failure(n, false);
    bool stage_done = false;
    while (!stage_done) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t c = 0; c < n; ++c) trial[c] = res.x[c] + step[k] * dirs[k][c];
        bool improved = false;
        if (bounds.contains(trial)) {
          const double ft = f(trial);
          ++res.evaluations;
          if (ft < res.value) {
            res.x = trial;
            res.value = ft;
            improved = true;
          }
        }
        if (improved) {
          lambda[k] += step[k];
          step[k] *= params.expansion;
          success[k] = true;
        } else {
          step[k] *= params.contraction;
          failure[k] = true;
        }
        if (res.evaluations >= max_evals) {
          res.converged = false;
          return res;
        }
      }
      const bool tiny = std::all_of(step.begin(), step.end(), [&](double s) {
        return std::abs(s) < params.tol_step * min_width;
      });
      if (tiny) {
        res.converged = true;
        res.trace.push_back(res.value);
        return res;
      }
      stage_done = std::all_of(success.begin(), success.end(), [](bool b) { return b; }) &&
                   std::all_of(failure.begin(), failure.end(), [](bool b) { return b; });
    }
    res.trace.push_back(res.value);
    if (stage_start - res.value < params.tol_f) {
      res.converged = true;
      return res;
    }
    rotate_directions(dirs, lambda);
  }
}

Result soft_selection_minimize(const Objective& f, const Box& bounds, std::uint64_t seed,
                               const SoftSelectionParams& params,
                               std::optional<std::vector<double>> start) {
  const std::size_t n = bounds.size();
  if (n == 0) throw Error(ErrorKind::InvalidInput, "soft selection: empty bounds box");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(bounds.lo[k] < bounds.hi[k])) {
      throw Error(ErrorKind::EmptyInterval, "soft selection: empty interval",
                  {static_cast<int>(k)});
    }
  }
  if (params.mu < 1 || params.lambda < params.mu) {
    throw Error(ErrorKind::InvalidInput, "soft selection: need 1 <= mu <= lambda");
  }

  Rng rng(seed);
  std::vector<double> width(n);
  for (std::size_t k = 0; k < n; ++k) width[k] = bounds.hi[k] - bounds.lo[k];

  // Keeps a coordinate strictly inside its interval by reflection.
  auto confine = [&](double x, std::size_t k) {
    const double lo = bounds.lo[k], hi = bounds.hi[k];
    for (int guard = 0; guard < 8 && (x <= lo || x >= hi); ++guard) {
      x = x <= lo ? lo + (lo - x) : hi - (x - hi);
    }
    const double pad = 1e-9 * width[k];
    return std::clamp(x, lo + pad, hi - pad);
  };

  struct Individual {
    std::vector<double> x;
    double value = 0.0;
  };
  auto evaluate = [&](std::vector<Individual>& group) {
    parallel_for(static_cast<int>(group.size()), [&](int k) {
      const double v = f(group[k].x);
      group[k].value = std::isfinite(v) ? v : INFINITY;
    });
  };
  auto by_value = [](const Individual& a, const Individual& b) { return a.value < b.value; };

  std::vector<Individual> pop(params.mu);
  for (int m = 0; m < params.mu; ++m) {
    pop[m].x.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      pop[m].x[k] = confine(rng.uniform(bounds.lo[k], bounds.hi[k]), k);
    }
  }
  std::vector<double> pop_start;
  if (start) {
    if (start->size() != n) throw Error(ErrorKind::InvalidInput, "soft selection: bad start size");
    pop[0].x = *start;
    for (std::size_t k = 0; k < n; ++k) pop[0].x[k] = confine(pop[0].x[k], k);
    pop_start = pop[0].x;
  }
  evaluate(pop);
  long evals = params.mu;
  Individual best = *std::min_element(pop.begin(), pop.end(), by_value);

  Result res;
  double sigma = params.sigma;
  std::vector<Individual> children(params.lambda);
  std::vector<double> weight(pop.size());
  for (int g = 0; g < params.generations; ++g) {
    double fmin = INFINITY, fmax = -INFINITY;
    for (const auto& ind : pop) {
      if (!std::isfinite(ind.value)) continue;
      fmin = std::min(fmin, ind.value);
      fmax = std::max(fmax, ind.value);
    }
    double total = 0.0;
    for (std::size_t m = 0; m < pop.size(); ++m) {
      const double v = pop[m].value;
      weight[m] = std::isfinite(v) ? (fmax - v) + 0.1 * (fmax - fmin) : 0.0;
      total += weight[m];
    }
    if (!(total > 0.0)) {
      std::fill(weight.begin(), weight.end(), 1.0);
      total = static_cast<double>(weight.size());
    }
    for (auto& child : children) {
      double pick = rng.uniform() * total;
      std::size_t parent = 0;
      while (parent + 1 < pop.size() && pick >= weight[parent]) pick -= weight[parent++];
      child.x = pop[parent].x;
      for (std::size_t k = 0; k < n; ++k) {
        child.x[k] = confine(child.x[k] + sigma * width[k] * rng.normal(), k);
      }
    }
    evaluate(children);
    evals += params.lambda;
    std::partial_sort(children.begin(), children.begin() + params.mu, children.end(), by_value);
    if (children.front().value < best.value) best = children.front();
    pop.assign(children.begin(), children.begin() + (params.mu - 1));
    pop.push_back(best);
    res.trace.push_back(best.value);
    sigma *= params.sigma_decay;
  }

  res.x = best.x;
  res.value = best.value;
  res.evaluations = evals;
  res.converged = true;
  if (params.polish && std::isfinite(best.value)) {
    Result polished = rosenbrock_minimize(f, best.x, bounds, params.polish_params);
    res.evaluations += polished.evaluations;
    // The search can drift along a valley into the box walls, where the local
    // method stalls; the caller's start point gets its own polish.
    if (start) {
      Result local = rosenbrock_minimize(f, pop_start, bounds, params.polish_params);
      res.evaluations += local.evaluations;
      if (local.value < polished.value) polished = std::move(local);
    }
    res.x = std::move(polished.x);
    res.value = polished.value;
    res.converged = polished.converged;
  }
  return res;
}

}  // namespace cvmesh::opt
