#include "conlearn/online.hpp"

#include "conlearn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace conlearn {

Domain Domain::ball(Vector center, Scalar radius) {
  require(radius > 0.0, "ball radius must be positive");
  Domain d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

Domain Domain::box(Vector lo, Vector hi) {
  require(lo.size() == hi.size(), "box bound size mismatch");
  require((lo.array() <= hi.array()).all(), "box bounds crossed");
  Domain d;
  d.kind = Kind::Box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

Vector Domain::project(const Vector& v) const {
  if (kind == Kind::Ball) {
    const Vector delta = v - center;
    const Scalar n = delta.norm();
    return n <= radius ? v : Vector(center + (radius / n) * delta);
  }
  return v.cwiseMax(lo).cwiseMin(hi);
}

bool Domain::contains(const Vector& v, Scalar tol) const {
  if (kind == Kind::Ball) return (v - center).norm() <= radius + tol;
  return ((v.array() >= lo.array() - tol) && (v.array() <= hi.array() + tol)).all();
}

MirrorMap MirrorMap::euclidean(Vector anchor) {
  MirrorMap m;
  const Vector a = anchor;
  m.grad = [a](const Vector& th) { return Vector(th - a); };
  m.grad_conjugate = [a](const Vector& w) { return Vector(w + a); };
  return m;
}

Vector omd_step(const MirrorMap& map, const Domain& domain, const Vector& theta,
                const Vector& mu, Scalar eta) {
  require(mu.allFinite(), "non-finite gradient estimate");
  const Vector zeta = map.grad_conjugate(map.grad(theta) - eta * mu);
  return domain.project(zeta);
}

void RegretLedger::record(std::function<Scalar(const Vector&)> loss,
                          const Vector& theta_t) {
  realized.push_back(loss(theta_t));
  losses.push_back(std::move(loss));
}

Scalar RegretLedger::average_loss_at(const Vector& theta) const {
  Scalar acc = 0.0;
  for (const auto& f : losses) acc += f(theta);
  return losses.empty() ? 0.0 : acc / static_cast<Scalar>(losses.size());
}

Scalar RegretLedger::average_realized() const {
  Scalar acc = 0.0;
  for (const Scalar v : realized) acc += v;
  return realized.empty() ? 0.0 : acc / static_cast<Scalar>(realized.size());
}

RegretMeasurement measure_regret(
    const RegretLedger& ledger,
    const std::function<Vector(const RegretLedger&)>& solver) {
  RegretMeasurement m;
  m.comparator = solver(ledger);
  m.average_regret = ledger.average_realized() - ledger.average_loss_at(m.comparator);
  return m;
}

Vector batch_comparator(const RegretLedger& ledger, const Domain& domain,
                        const std::function<Vector(const Vector&)>& avg_grad,
                        int restarts, int iters, Scalar eta, Rng& rng) {
  Vector best;
  Scalar best_val = std::numeric_limits<Scalar>::infinity();
  const Index dim = domain.kind == Domain::Kind::Ball ? domain.center.size()
                                                      : domain.lo.size();
  for (int r = 0; r < restarts; ++r) {
    Vector th(dim);
    if (domain.kind == Domain::Kind::Ball) {
      th = domain.center + domain.radius * rng.uniform() * rng.unit_vector(dim);
    } else {
      for (Index i = 0; i < dim; ++i)
        th[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * rng.uniform();
    }
    for (int it = 0; it < iters; ++it) th = domain.project(th - eta * avg_grad(th));
    const Scalar val = ledger.average_loss_at(th);
    if (val < best_val) {
      best_val = val;
      best = th;
    }
  }
  return best;
}

FamilyRun run_quadratic_family(const QuadraticFamilyConfig& cfg) {
  require(cfg.T >= 1, "family horizon must be >= 1");
  Rng rng(cfg.seed);
  const Index dim = cfg.dim;
  const Scalar M = cfg.domain_radius * cfg.domain_radius / 2.0;
  const Scalar W = cfg.alpha * (cfg.domain_radius + cfg.center_radius) +
                   cfg.noise + cfg.bias;
  const Scalar eta = std::sqrt(M / (W * static_cast<Scalar>(cfg.T)));
  const Domain domain = Domain::ball(Vector::Zero(dim), cfg.domain_radius);
  const MirrorMap map = MirrorMap::euclidean(Vector::Zero(dim));

  // Loss centers, uniform in the ball of radius center_radius.
  std::vector<Vector> centers;
  centers.reserve(static_cast<size_t>(cfg.T));
  for (Index t = 0; t < cfg.T; ++t) {
    const Scalar r =
        cfg.center_radius *
        std::pow(rng.uniform(), 1.0 / static_cast<Scalar>(dim));
    centers.push_back(r * rng.unit_vector(dim));
  }
  Vector bias_dir = Vector::Zero(dim);
  bias_dir[0] = 1.0;

  Vector theta = Vector::Zero(dim);
  Scalar realized = 0.0;
  for (Index t = 0; t < cfg.T; ++t) {
    const Vector& c = centers[static_cast<size_t>(t)];
    realized += 0.5 * cfg.alpha * (theta - c).squaredNorm();
    Vector mu = cfg.alpha * (theta - c);
    mu += (cfg.noise * rng.uniform()) * rng.unit_vector(dim);
    mu += cfg.bias * bias_dir;
    theta = omd_step(map, domain, theta, mu, eta);
  }

  // Comparator: the first-order condition of the averaged quadratic is the
  // mean center (interior for center_radius < domain_radius).
  Vector cbar = Vector::Zero(dim);
  for (const auto& c : centers) cbar += c;
  cbar /= static_cast<Scalar>(cfg.T);
  Scalar comp = 0.0;
  for (const auto& c : centers) comp += 0.5 * cfg.alpha * (cbar - c).squaredNorm();

  FamilyRun out;
  out.M = M;
  out.W = W;
  out.regret_bound = 1.5 * std::sqrt(M * W / static_cast<Scalar>(cfg.T));
  out.average_regret = (realized - comp) / static_cast<Scalar>(cfg.T);
  return out;
}

FamilyRun run_neural_family(const NeuralFamilyConfig& cfg) {
  Rng rng(cfg.seed);
  TwoLayerNet net = init_net(cfg.m, cfg.d, cfg.radius, cfg.seed + 7);

  // Fixed sample pool from two spherical Gaussians inside the unit ball.
  Matrix X(cfg.data_n, cfg.d);
  Vector z(cfg.data_n);
  for (Index i = 0; i < cfg.data_n; ++i) {
    const int label = rng.rademacher();
    z[i] = static_cast<Scalar>(label);
    Vector x = 0.15 * rng.gaussian_vector(cfg.d);
    x[0] += 0.5 * static_cast<Scalar>(label);
    const Scalar n = x.norm();
    if (n > 1.0) x /= n;
    X.row(i) = x.transpose();
  }

  const Scalar Lf = 1.0;  // cross-entropy gradient bound
  const Scalar eta =
      std::sqrt(cfg.radius * cfg.radius / (2.0 * Lf * static_cast<Scalar>(cfg.T)));
  Scalar realized = 0.0;
  std::vector<Index> rounds;
  for (Index t = 0; t < cfg.T; ++t) {
    const Index i = rng.uniform_index(cfg.data_n);
    rounds.push_back(i);
    const Scalar y = forward(net, X.row(i).transpose());
    realized += std::log1p(std::exp(-z[i] * y));
    const Scalar coef = -z[i] / (1.0 + std::exp(z[i] * y));
    add_scaled_grad(net, X.row(i).transpose(), -eta * coef);
    project_theta_inplace(net);
  }

  // Approximate comparator: multi-restart projected batch descent over the
  // realized rounds, warm-started from the online trajectory's endpoint
  // (lower-bound caveat: regret is under-estimated by the comparator's gap).
  const auto avg_loss = [&](const TwoLayerNet& n) {
    Scalar acc = 0.0;
    for (const Index i : rounds) {
      const Scalar y = forward(n, X.row(i).transpose());
      acc += std::log1p(std::exp(-z[i] * y));
    }
    return acc / static_cast<Scalar>(rounds.size());
  };
  Scalar comp_best = std::numeric_limits<Scalar>::infinity();
  for (int restart = 0; restart < 3; ++restart) {
    TwoLayerNet comp = init_net(cfg.m, cfg.d, cfg.radius, cfg.seed + 7);
    if (restart == 0) {
      comp.theta() = net.theta();  // warm start
    } else if (restart == 2) {
      comp.theta() += (0.5 * cfg.radius * rng.uniform()) *
                      rng.unit_vector(comp.theta().size());
      project_theta_inplace(comp);
    }
    const Scalar beta = 0.5;
    for (int it = 0; it < 400; ++it) {
      Vector grad = Vector::Zero(comp.theta().size());
      for (const Index i : rounds) {
        const Scalar y = forward(comp, X.row(i).transpose());
        const Scalar coef = -z[i] / (1.0 + std::exp(z[i] * y));
        if (coef != 0.0) grad += coef * grad_theta(comp, X.row(i).transpose());
      }
      comp.theta() -= (beta / static_cast<Scalar>(rounds.size())) * grad;
      project_theta_inplace(comp);
    }
    comp_best = std::min(comp_best, avg_loss(comp));
  }

  FamilyRun out;
  out.M = cfg.radius * cfg.radius / 2.0;
  out.W = Lf;
  out.regret_bound = 1.5 * std::sqrt(out.M * out.W / static_cast<Scalar>(cfg.T));
  out.average_regret = realized / static_cast<Scalar>(cfg.T) - comp_best;
  return out;
}

SlopeExperimentResult regret_slope_experiment(
    const QuadraticFamilyConfig& base, const std::vector<Index>& T_grid,
    int seeds) {
  require(T_grid.size() >= 3, "need >= 3 grid points");
  require(seeds >= 1, "need >= 1 seed");
  SlopeExperimentResult res;
  res.grid = T_grid;
  std::vector<Scalar> grid_f;
  std::vector<std::vector<Scalar>> cells;
  for (const Index T : T_grid) {
    std::vector<Scalar> vals;
    Scalar bound = 0.0;
    for (int s = 0; s < seeds; ++s) {
      QuadraticFamilyConfig cfg = base;
      cfg.T = T;
      cfg.seed = base.seed + static_cast<std::uint64_t>(s);
      const FamilyRun run = run_quadratic_family(cfg);
      vals.push_back(run.average_regret);
      bound = run.regret_bound;
    }
    Scalar mean = 0.0;
    for (const Scalar v : vals) mean += v;
    mean /= static_cast<Scalar>(vals.size());
    Scalar var = 0.0;
    for (const Scalar v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / static_cast<Scalar>(vals.size() - 1) : 0.0;
    res.mean_regret.push_back(mean);
    res.stderr_regret.push_back(std::sqrt(var / static_cast<Scalar>(vals.size())));
    res.mean_bound.push_back(bound);
    cells.push_back(std::move(vals));
    grid_f.push_back(static_cast<Scalar>(T));
  }
  res.fit = fit_scaling_exponent_bootstrap(grid_f, cells, 200, base.seed + 99);
  return res;
}

}  // namespace conlearn
