// pybind11 bindings: the library's main operations, with IntervalSets mapped
// to/from lists of (lo, hi) pairs.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "datamarket/optin.hpp"
#include "datamarket/oracle.hpp"
#include "datamarket/version.hpp"

namespace py = pybind11;
using namespace datamarket;

namespace {

IntervalSet set_from(const std::vector<std::pair<double, double>>& pairs) {
  return IntervalSet::from_pairs(pairs);
}

py::list set_to(const IntervalSet& s) {
  py::list out;
  for (const auto& [lo, hi] : s.intervals()) out.append(py::make_tuple(lo, hi));
  return out;
}

py::dict outcome_to(const MarketOutcome& oc) {
  py::dict d;
  d["uniform_a"] = oc.uniform_a;
  d["profit_a_gross"] = oc.profit_a_gross;
  d["profit_b_gross"] = oc.profit_b_gross;
  d["transfer"] = oc.transfer;
  d["profit_a_net"] = oc.profit_a_net;
  d["profit_b_net"] = oc.profit_b_net;
  d["consumer_welfare"] = oc.consumer_welfare;
  d["a_uniform"] = set_to(oc.a_uniform);
  d["a_personalized"] = set_to(oc.a_personalized);
  d["b_personalized"] = set_to(oc.b_personalized);
  d["equilibrium_price"] = oc.equilibrium_price;
  d["uniform_price_unused"] = oc.uniform_price_unused;
  d["utility_of"] = py::cpp_function(oc.utility_of);
  return d;
}

py::dict report_to(const MechanismReport& rep) {
  py::dict d;
  d["shared"] = set_to(rep.mechanism.shared);
  d["transfer"] = rep.mechanism.transfer;
  d["outcome"] = outcome_to(rep.outcome);
  d["baseline"] = outcome_to(rep.baseline);
  if (rep.ir_transfer_range)
    d["ir_transfer_range"] =
        py::make_tuple(rep.ir_transfer_range->first, rep.ir_transfer_range->second);
  else
    d["ir_transfer_range"] = py::none();
  d["firms_ir"] = rep.pareto_flags.firms_ir;
  d["all_consumers_weak"] = rep.pareto_flags.all_consumers_weak;
  d["some_consumer_strict"] = rep.pareto_flags.some_consumer_strict;
  return d;
}

ConsumerDistribution dist_from(const std::string& spec) {
  if (spec == "uniform") return ConsumerDistribution::uniform();
  if (spec.rfind("linear:", 0) == 0)
    return ConsumerDistribution::linear(std::stod(spec.substr(7)));
  if (spec.rfind("csv:", 0) == 0) return ConsumerDistribution::from_csv(spec.substr(4));
  throw std::invalid_argument("unknown distribution spec: " + spec);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hotelling data-sharing market analyzer";
  m.attr("__version__") = kVersion;

  using Pairs = std::vector<std::pair<double, double>>;

  m.def("mu", [](double price, double v, double t) { return mu(price, {v, t}); },
        py::arg("price"), py::arg("v"), py::arg("t"),
        "Indifference location 1/2 - p/(2t), clamped to [0,1]");

  m.def(
      "direct_effect",
      [](double theta, double uniform_a, double v, double t) {
        const auto rep = direct_effect(theta, uniform_a, {v, t});
        py::dict d;
        d["case"] = static_cast<int>(rep.effect_case) + 1;
        d["delta_profit_a"] = rep.delta_profit_a;
        d["delta_profit_b"] = rep.delta_profit_b;
        d["delta_consumer"] = rep.delta_consumer;
        d["net_gain_positive"] = rep.net_gain_positive;
        return d;
      },
      py::arg("theta"), py::arg("uniform_a"), py::arg("v"), py::arg("t"),
      "Single-consumer sharing deltas (lemma-1 classification, cases 1..3)");

  m.def(
      "no_sharing_equilibrium",
      [](double v, double t, const std::string& dist) {
        const auto [eq, out] = no_sharing_equilibrium(dist_from(dist), {v, t});
        py::dict d = outcome_to(out);
        d["candidate_prices"] = eq.candidate_prices;
        d["p_a"] = eq.selected;
        return d;
      },
      py::arg("v"), py::arg("t"), py::arg("dist") = "uniform");

  m.def(
      "mechanism_equilibrium",
      [](const Pairs& shared, double transfer, double v, double t, const std::string& dist,
         std::optional<double> price) {
        const auto selection =
            price ? PriceSelection::given(*price) : PriceSelection::firm_preferred();
        return outcome_to(mechanism_equilibrium(dist_from(dist), {v, t},
                                                {set_from(shared), transfer}, selection));
      },
      py::arg("shared"), py::arg("transfer") = 0.0, py::arg("v") = 3.0, py::arg("t") = 1.0,
      py::arg("dist") = "uniform", py::arg("price") = py::none());

  m.def(
      "full_sharing_report",
      [](double v, double t, const std::string& dist, double baseline_price) {
        return report_to(full_sharing_report(dist_from(dist), {v, t}, baseline_price));
      },
      py::arg("v"), py::arg("t"), py::arg("dist"), py::arg("baseline_price"));

  m.def(
      "firm_optimal_mechanism",
      [](double v, double t, const std::string& dist) {
        const auto rep = firm_optimal_mechanism(dist_from(dist), {v, t});
        py::dict d = report_to(rep);
        d["condition_holds"] = rep.condition_holds;
        d["profit_lower_bound"] = rep.profit_lower_bound;
        d["rival_profit_cap"] = rep.rival_profit_cap;
        return d;
      },
      py::arg("v"), py::arg("t"), py::arg("dist") = "uniform");

  m.def(
      "pareto_improving_mechanism",
      [](double v, double t, const std::string& dist, double baseline_price) {
        return report_to(pareto_improving_mechanism(dist_from(dist), {v, t}, baseline_price));
      },
      py::arg("v"), py::arg("t"), py::arg("dist"), py::arg("baseline_price"));

  m.def(
      "epsilon_mechanism",
      [](double eps, double v, double t) {
        const auto rep = epsilon_mechanism(ConsumerDistribution::uniform(), {v, t}, eps);
        py::dict d = report_to(rep);
        d["eps"] = rep.eps;
        d["closed_form"] =
            py::dict(py::arg("p_a") = rep.uniform_a_cf, py::arg("pi_a") = rep.profit_a_cf,
                     py::arg("pi_b") = rep.profit_b_cf,
                     py::arg("cw") = rep.consumer_welfare_cf);
        return d;
      },
      py::arg("eps"), py::arg("v") = 3.0, py::arg("t") = 1.0);

  m.def(
      "verify_prop4_tfne",
      [](double v, double t, double baseline_price, double theta_bar,
         const std::string& dist) {
        const auto [profile, policy] =
            optin::prop4_policy(dist_from(dist), {v, t}, baseline_price, theta_bar);
        const auto verdict = optin::verify_tfne(dist_from(dist), {v, t}, profile, policy);
        py::dict d;
        d["holds"] = verdict.holds;
        py::list viols;
        for (const auto& viol : verdict.violations)
          viols.append(py::dict(py::arg("bullet") = viol.bullet,
                                py::arg("theta") = viol.theta,
                                py::arg("detail") = viol.detail));
        d["violations"] = viols;
        return d;
      },
      py::arg("v"), py::arg("t"), py::arg("baseline_price"), py::arg("theta_bar"),
      py::arg("dist") = "uniform");

  m.def(
      "consumer_optimal_scan",
      [](double v, double t, double baseline_price, int n_lattice) {
        const auto rep = optin::consumer_optimal_scan(ConsumerDistribution::uniform(),
                                                      {v, t}, baseline_price, n_lattice);
        py::dict d;
        d["n_lattice"] = rep.n_lattice;
        d["reference_consumer_welfare"] = rep.reference_consumer_welfare;
        d["pareto_mechanism_firm_chosen"] = rep.pareto_mechanism_firm_chosen;
        d["counterexample_count"] = rep.counterexamples.size();
        return d;
      },
      py::arg("v") = 3.0, py::arg("t") = 1.0, py::arg("baseline_price") = 0.5,
      py::arg("n_lattice") = 32);

  m.def(
      "oracle_outcome",
      [](const Pairs& shared, double uniform_price, double v, double t,
         const std::string& dist, int n_theta) {
        return outcome_to(oracle::oracle_outcome(dist_from(dist), {v, t},
                                                 {set_from(shared), 0.0}, uniform_price,
                                                 oracle::GridConfig(n_theta, 64)));
      },
      py::arg("shared"), py::arg("uniform_price"), py::arg("v") = 3.0, py::arg("t") = 1.0,
      py::arg("dist") = "uniform", py::arg("n_theta") = 2048);

  m.def(
      "oracle_uniform_price",
      [](const Pairs& shared, double v, double t, const std::string& dist, int n_theta,
         int n_price) {
        return oracle::oracle_uniform_price(dist_from(dist), {v, t}, set_from(shared),
                                            oracle::GridConfig(n_theta, n_price));
      },
      py::arg("shared"), py::arg("v") = 3.0, py::arg("t") = 1.0,
      py::arg("dist") = "uniform", py::arg("n_theta") = 2048, py::arg("n_price") = 4096);
}
