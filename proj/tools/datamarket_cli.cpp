// Command-line front end: named analyses, parameter sweeps, and oracle
// verification, emitting machine-readable reports.
//
// Exit codes: 0 success, 2 argument error, 3 numeric failure, 4 falsified
// invariant (oracle disagreement).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "datamarket/distribution.hpp"
#include "datamarket/equilibrium.hpp"
#include "datamarket/mechanisms.hpp"
#include "datamarket/optin.hpp"
#include "datamarket/oracle.hpp"
#include "datamarket/version.hpp"

using json = nlohmann::json;
using namespace datamarket;

namespace {

struct CommonArgs {
  double t = 1.0;
  double v = 3.0;
  std::string dist_spec = "uniform";
  std::string format = "json";
};

ConsumerDistribution parse_dist(const std::string& spec) {
  if (spec == "uniform") return ConsumerDistribution::uniform();
  if (spec.rfind("linear:", 0) == 0)
    return ConsumerDistribution::linear(std::stod(spec.substr(7)));
  if (spec.rfind("csv:", 0) == 0) return ConsumerDistribution::from_csv(spec.substr(4));
  throw std::invalid_argument("unknown distribution spec: " + spec);
}

IntervalSet parse_intervals(const std::string& spec) {
  // semicolon-separated lo,hi pairs: "0.1,0.5;0.7,0.8"
  std::vector<IntervalSet::Interval> pairs;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const std::size_t semi = spec.find(';', pos);
    const std::string item = spec.substr(pos, semi == std::string::npos ? semi : semi - pos);
    const std::size_t comma = item.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("interval needs the form lo,hi: " + item);
    pairs.push_back({std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1))});
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return IntervalSet::from_pairs(std::move(pairs));
}

oracle::GridConfig grid_from_env() {
  oracle::GridConfig grid;
  if (const char* s = std::getenv("DATAMARKET_GRID_THETA")) grid.n_theta = std::atoi(s);
  if (const char* s = std::getenv("DATAMARKET_GRID_PRICE")) grid.n_price = std::atoi(s);
  return grid;
}

json to_json(const IntervalSet& set) {
  json arr = json::array();
  for (const auto& [lo, hi] : set.intervals()) arr.push_back({lo, hi});
  return arr;
}

json to_json(const MarketOutcome& oc) {
  return {{"uniform_a", oc.uniform_a},
          {"profit_a_gross", oc.profit_a_gross},
          {"profit_b_gross", oc.profit_b_gross},
          {"transfer", oc.transfer},
          {"profit_a_net", oc.profit_a_net},
          {"profit_b_net", oc.profit_b_net},
          {"consumer_welfare", oc.consumer_welfare},
          {"partition",
           {{"a_uniform", to_json(oc.a_uniform)},
            {"a_personalized", to_json(oc.a_personalized)},
            {"b_personalized", to_json(oc.b_personalized)}}},
          {"equilibrium_price", oc.equilibrium_price},
          {"uniform_price_unused", oc.uniform_price_unused}};
}

json to_json(const MechanismReport& rep) {
  json j = {{"mechanism",
             {{"shared", to_json(rep.mechanism.shared)},
              {"transfer", rep.mechanism.transfer}}},
            {"outcome", to_json(rep.outcome)},
            {"baseline", to_json(rep.baseline)},
            {"pareto_flags",
             {{"firms_ir", rep.pareto_flags.firms_ir},
              {"all_consumers_weak", rep.pareto_flags.all_consumers_weak},
              {"some_consumer_strict", rep.pareto_flags.some_consumer_strict}}}};
  if (rep.ir_transfer_range)
    j["ir_transfer_range"] = {rep.ir_transfer_range->first, rep.ir_transfer_range->second};
  else
    j["ir_transfer_range"] = nullptr;
  return j;
}

json meta(const CommonArgs& args, const std::string& command,
          const oracle::GridConfig& grid) {
  return {{"library_version", kVersion},
          {"command", command},
          {"t", args.t},
          {"v", args.v},
          {"dist", args.dist_spec},
          {"grid", {{"n_theta", grid.n_theta}, {"n_price", grid.n_price}}},
          {"tolerance", kDefaultTol}};
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

double baseline_price_or_default(const ConsumerDistribution& dist, const MarketParams& params,
                                 const std::optional<double>& given) {
  if (given) return *given;
  return no_sharing_equilibrium(dist, params).first.selected;
}

int run(int argc, char** argv) {
  CLI::App app{"Hotelling data-sharing market analyzer"};
  app.require_subcommand(1);

  CommonArgs args;
  app.add_option("--t", args.t, "marginal transport cost")->capture_default_str();
  app.add_option("--v", args.v, "consumer value for the good")->capture_default_str();
  app.add_option("--dist", args.dist_spec, "uniform | linear:<slope> | csv:<path>")
      ->capture_default_str();
  app.add_option("--format", args.format, "json | csv (csv for sweeps only)")
      ->capture_default_str();

  auto* cmd_no_sharing = app.add_subcommand("no-sharing", "no-sharing equilibrium set");

  std::string shared_spec;
  double transfer = 0.0;
  std::optional<double> given_price;
  auto* cmd_analyze = app.add_subcommand("analyze", "equilibrium of a given mechanism");
  cmd_analyze->add_option("--shared", shared_spec, "shared set, e.g. 0.1,0.5;0.7,0.8")
      ->required();
  cmd_analyze->add_option("--transfer", transfer, "transfer paid by A to B");
  cmd_analyze->add_option("--price", given_price, "fix A's uniform price");

  std::optional<double> baseline_price;
  auto* cmd_full = app.add_subcommand("full-sharing", "full-sharing report");
  cmd_full->add_option("--price", baseline_price, "baseline no-sharing price");

  auto* cmd_firm = app.add_subcommand("firm-optimal", "joint-profit-maximizing mechanism");

  auto* cmd_pareto = app.add_subcommand("pareto", "Pareto-improving mechanism");
  cmd_pareto->add_option("--price", baseline_price, "baseline no-sharing price");

  double eps = 0.1;
  auto* cmd_eps = app.add_subcommand("epsilon", "mechanism ([eps,1/2],0), uniform F");
  cmd_eps->add_option("--eps", eps, "eps in (0, 1/4]")->required();

  double theta_bar = -1.0;
  auto* cmd_optin = app.add_subcommand("optin-verify", "verify the opt-in equilibrium");
  cmd_optin->add_option("--theta-bar", theta_bar, "upper end of the opt-in set");
  cmd_optin->add_option("--price", baseline_price, "baseline no-sharing price");

  int lattice = 64;
  auto* cmd_scan = app.add_subcommand("consumer-scan", "consumer-optimality scan");
  cmd_scan->add_option("--lattice", lattice, "endpoint lattice resolution");
  cmd_scan->add_option("--price", baseline_price, "baseline no-sharing price");

  auto* cmd_oracle = app.add_subcommand("oracle-verify", "closed forms vs brute force");

  std::string sweep_param;
  double sweep_from = 0.0, sweep_to = 0.0;
  int sweep_steps = 10;
  auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep");
  cmd_sweep->add_option("--param", sweep_param, "t | v | eps")->required();
  cmd_sweep->add_option("--from", sweep_from)->required();
  cmd_sweep->add_option("--to", sweep_to)->required();
  cmd_sweep->add_option("--steps", sweep_steps)->capture_default_str();

  // let --t/--v/--dist/--format appear after the subcommand name
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const oracle::GridConfig grid = grid_from_env();
  const ConsumerDistribution dist = parse_dist(args.dist_spec);
  const MarketParams params(args.v, args.t);

  if (cmd_no_sharing->parsed()) {
    const auto [eq, outcome] = no_sharing_equilibrium(dist, params);
    json j = {{"meta", meta(args, "no-sharing", grid)},
              {"candidate_prices", eq.candidate_prices},
              {"p_a", eq.selected},
              {"pi_a", outcome.profit_a_gross},
              {"pi_b", outcome.profit_b_gross},
              {"cw", outcome.consumer_welfare},
              {"outcome", to_json(outcome)}};
    emit(j);
  } else if (cmd_analyze->parsed()) {
    Mechanism mech{parse_intervals(shared_spec), transfer};
    const auto selection = given_price ? PriceSelection::given(*given_price)
                                       : PriceSelection::firm_preferred();
    const MarketOutcome oc = mechanism_equilibrium(dist, params, mech, selection);
    const auto [eq, base] = no_sharing_equilibrium(dist, params);
    json j = {{"meta", meta(args, "analyze", grid)},
              {"outcome", to_json(oc)},
              {"baseline", to_json(base)}};
    const auto range = ir_transfer_range(base, oc);
    j["ir_transfer_range"] = range ? json({range->first, range->second}) : json(nullptr);
    emit(j);
  } else if (cmd_full->parsed()) {
    const double bp = baseline_price_or_default(dist, params, baseline_price);
    json j = {{"meta", meta(args, "full-sharing", grid)},
              {"report", to_json(full_sharing_report(dist, params, bp))}};
    emit(j);
  } else if (cmd_firm->parsed()) {
    const FirmOptimalReport rep = firm_optimal_mechanism(dist, params);
    json j = {{"meta", meta(args, "firm-optimal", grid)},
              {"report", to_json(rep)},
              {"condition_holds", rep.condition_holds},
              {"profit_lower_bound", rep.profit_lower_bound},
              {"rival_profit_cap", rep.rival_profit_cap}};
    emit(j);
  } else if (cmd_pareto->parsed()) {
    const double bp = baseline_price_or_default(dist, params, baseline_price);
    json j = {{"meta", meta(args, "pareto", grid)},
              {"report", to_json(pareto_improving_mechanism(dist, params, bp))}};
    emit(j);
  } else if (cmd_eps->parsed()) {
    const EpsilonReport rep = epsilon_mechanism(dist, params, eps);
    json j = {{"meta", meta(args, "epsilon", grid)},
              {"report", to_json(rep)},
              {"eps", rep.eps},
              {"closed_form",
               {{"p_a", rep.uniform_a_cf},
                {"pi_a", rep.profit_a_cf},
                {"pi_b", rep.profit_b_cf},
                {"cw", rep.consumer_welfare_cf}}},
              {"numeric",
               {{"p_a", rep.outcome.uniform_a},
                {"pi_a", rep.outcome.profit_a_gross},
                {"pi_b", rep.outcome.profit_b_gross},
                {"cw", rep.outcome.consumer_welfare}}}};
    emit(j);
  } else if (cmd_optin->parsed()) {
    const double bp = baseline_price_or_default(dist, params, baseline_price);
    const double m = mu(bp, params);
    const double tb = theta_bar >= 0.0 ? theta_bar : 0.25 + 0.5 * m;
    const auto [profile, policy] = optin::prop4_policy(dist, params, bp, tb);
    const auto verdict = optin::verify_tfne(dist, params, profile, policy);
    json viols = json::array();
    for (const auto& v : verdict.violations)
      viols.push_back({{"bullet", v.bullet}, {"theta", v.theta}, {"detail", v.detail}});
    emit({{"meta", meta(args, "optin-verify", grid)},
          {"opted_in", to_json(profile.opted_in)},
          {"base_shared", to_json(policy.base.shared)},
          {"holds", verdict.holds},
          {"violations", viols}});
  } else if (cmd_scan->parsed()) {
    const double bp = baseline_price_or_default(dist, params, baseline_price);
    const auto rep = optin::consumer_optimal_scan(dist, params, bp, lattice);
    json cex = json::array();
    for (const auto& c : rep.counterexamples)
      cex.push_back({{"opted_in", to_json(c.opted_in)},
                     {"shared", to_json(c.shared)},
                     {"consumer_welfare", c.consumer_welfare},
                     {"total_profit", c.total_profit}});
    emit({{"meta", meta(args, "consumer-scan", grid)},
          {"n_lattice", rep.n_lattice},
          {"reference_consumer_welfare", rep.reference_consumer_welfare},
          {"pareto_mechanism_firm_chosen", rep.pareto_mechanism_firm_chosen},
          {"counterexample_count", cex.size()},
          {"counterexamples", cex}});
  } else if (cmd_oracle->parsed()) {
    const double tol =
        5.0 / grid.n_theta * std::max(params.v, params.t);
    const auto [eq, base] = no_sharing_equilibrium(dist, params);
    json checks = json::array();
    bool ok = true;
    const auto check = [&](const std::string& name, const Mechanism& mech,
                           const MarketOutcome& fast) {
      const MarketOutcome slow =
          oracle::oracle_outcome(dist, params, mech, fast.uniform_a, grid);
      const bool pass = std::abs(slow.profit_a_gross - fast.profit_a_gross) <= tol &&
                        std::abs(slow.profit_b_gross - fast.profit_b_gross) <= tol &&
                        std::abs(slow.consumer_welfare - fast.consumer_welfare) <= tol;
      ok = ok && pass;
      checks.push_back({{"name", name},
                        {"pass", pass},
                        {"closed_form",
                         {{"pi_a", fast.profit_a_gross},
                          {"pi_b", fast.profit_b_gross},
                          {"cw", fast.consumer_welfare}}},
                        {"oracle",
                         {{"pi_a", slow.profit_a_gross},
                          {"pi_b", slow.profit_b_gross},
                          {"cw", slow.consumer_welfare}}}});
    };
    check("no_sharing", Mechanism{}, base);
    const Mechanism full{IntervalSet::full(), 0.0};
    check("full_sharing", full, mechanism_equilibrium(dist, params, full));
    const Mechanism half{IntervalSet::interval(0.0, 0.5), 0.0};
    check("firm_optimal", half, mechanism_equilibrium(dist, params, half));
    const MechanismReport pareto = pareto_improving_mechanism(dist, params, eq.selected);
    check("pareto", Mechanism{pareto.mechanism.shared, 0.0}, pareto.outcome);
    emit({{"meta", meta(args, "oracle-verify", grid)},
          {"tolerance", tol},
          {"pass", ok},
          {"checks", checks}});
    if (!ok) return 4;
  } else if (cmd_sweep->parsed()) {
    if (sweep_steps < 1) throw CLI::ValidationError("--steps must be >= 1");
    json rows = json::array();
    std::vector<std::string> header;
    for (int i = 0; i <= sweep_steps; ++i) {
      const double x =
          sweep_from + (sweep_to - sweep_from) * i / std::max(1, sweep_steps);
      double t = args.t, v = args.v;
      if (sweep_param == "t")
        t = x;
      else if (sweep_param == "v")
        v = x;
      else if (sweep_param != "eps")
        throw CLI::ValidationError("--param must be t, v or eps");
      const MarketParams p(v, t);
      if (sweep_param == "eps") {
        const EpsilonReport rep = epsilon_mechanism(dist, p, x);
        header = {"eps", "p_a", "pi_a", "pi_b", "cw"};
        rows.push_back({{"eps", x},
                        {"p_a", rep.outcome.uniform_a},
                        {"pi_a", rep.outcome.profit_a_gross},
                        {"pi_b", rep.outcome.profit_b_gross},
                        {"cw", rep.outcome.consumer_welfare}});
      } else {
        const auto [eq, outcome] = no_sharing_equilibrium(dist, p);
        header = {sweep_param, "p_a", "pi_a", "pi_b", "cw"};
        rows.push_back({{sweep_param, x},
                        {"p_a", eq.selected},
                        {"pi_a", outcome.profit_a_gross},
                        {"pi_b", outcome.profit_b_gross},
                        {"cw", outcome.consumer_welfare}});
      }
    }
    if (args.format == "csv") {
      for (std::size_t i = 0; i < header.size(); ++i)
        std::cout << header[i] << (i + 1 < header.size() ? "," : "\n");
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < header.size(); ++i)
          std::cout << row[header[i]].get<double>()
                    << (i + 1 < header.size() ? "," : "\n");
      }
    } else {
      emit({{"meta", meta(args, "sweep", grid)}, {"rows", rows}});
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const QuadratureError& e) {
    std::cerr << "numeric failure: " << e.what() << " (best estimate "
              << e.best_estimate << ")\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
