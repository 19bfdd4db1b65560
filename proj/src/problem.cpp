#include "conlearn/problem.hpp"

#include <algorithm>
#include <utility>

namespace conlearn {
namespace {

std::string cell_name(std::optional<int> group, std::optional<int> label) {
  std::string name;
  if (group)
    name += std::string("group=") + (*group == 1 ? "A" : "Ac");
  if (label) {
    if (!name.empty()) name += ",";
    name += std::string("z=") + (*label == 1 ? "+1" : "-1");
  }
  return name.empty() ? "all" : name;
}

}  // namespace

DistributionSpec make_sampler(const Dataset& ds, std::optional<int> group,
                              std::optional<int> label) {
  DistributionSpec spec;
  spec.group = group;
  spec.label = label;
  spec.name = cell_name(group, label);
  spec.indices = ds.indices_where(group, label);
  if (spec.indices.empty())
    throw std::invalid_argument("empty conditional distribution: " + spec.name);
  return spec;
}

void ConstraintProblem::validate() const {
  const Index K = num_metrics();
  require(static_cast<Index>(surrogates.size()) == K, "surrogate count != K");
  require(static_cast<Index>(samplers.size()) == K + 1, "sampler count != K+1");
  require(xi_bound.size() == K, "xi bound count != K");
  require(kappa > 0.0, "kappa must be positive");
  require(radius > 0.0, "radius must be positive");
  require(dataset != nullptr, "problem needs a dataset");
  for (const auto& g : outers)
    require(g.arity == K, "outer constraint arity != K");
  for (const auto& s : surrogates) {
    require(is_convex(s.kind), "surrogates must be convex");
    require(has_gradient(s.kind), "surrogates must be differentiable");
  }
  for (const auto& spec : samplers)
    require(!spec.indices.empty(), "sampler over empty cell");
}

Vector compute_xi_domain(const std::vector<ScalarLoss>& surrogates, Scalar radius) {
  Vector bound(static_cast<Index>(surrogates.size()));
  for (size_t k = 0; k < surrogates.size(); ++k)
    bound[static_cast<Index>(k)] =
        sup_abs_loss(surrogates[k], -2.0 * radius, 2.0 * radius);
  return bound;
}

void clamp_xi_inplace(const ConstraintProblem& p, Vector& xi) {
  for (Index k = 0; k < p.num_metrics(); ++k)
    xi[k] = std::clamp(xi[k], -p.xi_bound[k], p.xi_bound[k]);
}

void clamp_lambda_inplace(const ConstraintProblem& p, Vector& lambda) {
  for (Index i = 0; i < lambda.size(); ++i)
    lambda[i] = std::clamp(lambda[i], 0.0, p.kappa);
}

Scalar exact_rate(const ConstraintProblem& p, Index k, const TwoLayerNet& net) {
  require(k >= 1 && k <= p.num_metrics(), "metric index out of range");
  const auto& spec = p.samplers[static_cast<size_t>(k)];
  const auto& loss = p.metrics[static_cast<size_t>(k - 1)];
  Scalar acc = 0.0;
  for (const Index i : spec.indices) {
    const Scalar y = forward(net, p.dataset->features.row(i).transpose());
    acc += eval_loss(loss, y, sgn(p.dataset->labels[i]));
  }
  return acc / static_cast<Scalar>(spec.size());
}

Vector exact_rates(const ConstraintProblem& p, const TwoLayerNet& net) {
  Vector r(p.num_metrics());
  for (Index k = 1; k <= p.num_metrics(); ++k) r[k - 1] = exact_rate(p, k, net);
  return r;
}

Scalar exact_objective(const ConstraintProblem& p, const TwoLayerNet& net) {
  const auto& spec = p.samplers[0];
  Scalar acc = 0.0;
  for (const Index i : spec.indices) {
    const Scalar y = forward(net, p.dataset->features.row(i).transpose());
    acc += eval_loss(p.objective, y, sgn(p.dataset->labels[i]));
  }
  return acc / static_cast<Scalar>(spec.size());
}

Vector eval_outers(const ConstraintProblem& p, const VecRef& xi) {
  Vector out(p.num_outers());
  for (Index j = 0; j < p.num_outers(); ++j)
    out[j] = eval_outer(p.outers[static_cast<size_t>(j)], xi);
  return out;
}

ConstraintProblem build_unconstrained_problem(std::shared_ptr<const Dataset> ds,
                                              LossKind objective_kind,
                                              Scalar kappa, Scalar radius) {
  ConstraintProblem p;
  p.objective = make_loss(objective_kind);
  p.samplers.push_back(make_sampler(*ds, std::nullopt, std::nullopt));
  p.kappa = kappa;
  p.radius = radius;
  p.xi_bound = Vector(0);
  p.dataset = std::move(ds);
  p.validate();
  return p;
}

ConstraintProblem build_fairness_problem(std::shared_ptr<const Dataset> ds,
                                         LossKind objective_kind, Scalar kappa,
                                         Scalar radius) {
  require(ds->has_group(), "equal-opportunity preset needs a group column");
  ConstraintProblem p;
  p.objective = make_loss(objective_kind);
  p.metrics = {make_loss(LossKind::ZeroOneMatch), make_loss(LossKind::ZeroOneMatch),
               make_loss(LossKind::NegZeroOneMatch),
               make_loss(LossKind::NegZeroOneMatch)};
  p.surrogates = {make_loss(LossKind::SmoothedReverseHinge),
                  make_loss(LossKind::SmoothedReverseHinge),
                  make_loss(LossKind::SmoothedHinge),
                  make_loss(LossKind::SmoothedHinge)};
  Vector c1(4), c2(4);
  c1 << 1, 0, 0, 1;  // recall(A) - recall(Ac) <= 0
  c2 << 0, 1, 1, 0;  // recall(Ac) - recall(A) <= 0
  p.outers = {make_linear_outer(c1), make_linear_outer(c2)};
  p.samplers.push_back(make_sampler(*ds, std::nullopt, std::nullopt));
  p.samplers.push_back(make_sampler(*ds, 1, 1));  // D1: match on (A, z=1)
  p.samplers.push_back(make_sampler(*ds, 0, 1));  // D2: match on (Ac, z=1)
  p.samplers.push_back(make_sampler(*ds, 1, 1));  // D3: -match on (A, z=1)
  p.samplers.push_back(make_sampler(*ds, 0, 1));  // D4: -match on (Ac, z=1)
  p.kappa = kappa;
  p.radius = radius;
  p.xi_bound = compute_xi_domain(p.surrogates, radius);
  p.dataset = std::move(ds);
  p.validate();
  return p;
}

ConstraintProblem build_rate_mean_problem(std::shared_ptr<const Dataset> ds,
                                          OuterKind mean_kind,
                                          LossKind objective_kind, Scalar kappa,
                                          Scalar radius) {
  require(mean_kind == OuterKind::GMean || mean_kind == OuterKind::HMean,
          "rate-mean preset expects g-mean or h-mean");
  ConstraintProblem p;
  p.objective = make_loss(objective_kind);
  // xi_k bounds the negated rate: h_k = -1{z = sgn(y)} on the class cells, so
  // tau_k = -xi_k recovers TPR / TNR inside the increasing outer function.
  p.metrics = {make_loss(LossKind::NegZeroOneMatch),
               make_loss(LossKind::NegZeroOneMatch)};
  p.surrogates = {make_loss(LossKind::SmoothedHinge),
                  make_loss(LossKind::SmoothedHinge)};
  p.outers = {mean_kind == OuterKind::GMean ? make_gmean_outer()
                                            : make_hmean_outer()};
  p.samplers.push_back(make_sampler(*ds, std::nullopt, std::nullopt));
  p.samplers.push_back(make_sampler(*ds, std::nullopt, 1));   // TPR cell
  p.samplers.push_back(make_sampler(*ds, std::nullopt, -1));  // TNR cell
  p.kappa = kappa;
  p.radius = radius;
  p.xi_bound = compute_xi_domain(p.surrogates, radius);
  p.dataset = std::move(ds);
  p.validate();
  return p;
}

}  // namespace conlearn
