#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spx/checks.hpp"
#include "spx/exponents.hpp"
#include "spx/formats.hpp"
#include "spx/harness.hpp"
#include "spx/oracle.hpp"
#include "spx/solvers.hpp"

using namespace spx;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitBudget = 3;

Rational parse_q(const std::string& s, const char* what) {
  try {
    return parse_rational(s);
  } catch (const std::exception&) {
    throw CLI::ValidationError(what, "expected an integer or p/q, got '" + s + "'");
  }
}

std::vector<Rational> parse_list(const std::string& s, const char* what) {
  std::vector<Rational> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_q(tok, what));
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

struct Common {
  std::string in;
  std::string eta = "1/2";
  std::string delta = "1/10";
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool json_out = false;
  bool no_timestamp = false;
  std::string out;
};

RunConfig base_config(const std::string& command, const Common& c) {
  RunConfig rc;
  rc.command = command;
  rc.instance = c.in;
  rc.eta = parse_q(c.eta, "--eta");
  rc.delta = parse_q(c.delta, "--delta");
  rc.seed = c.seed;
  rc.workers = resolve_workers(c.workers ? std::optional<unsigned>(c.workers) : std::nullopt);
  rc.output = c.out;
  rc.format = c.json_out ? "json" : "text";
  return rc;
}

void emit_report(const RunConfig& rc, json result, const Common& c) {
  const auto rep = make_report(rc, std::move(result), c.no_timestamp ? std::nullopt : std::optional(utc_timestamp()));
  emit(rep.dump(2) + "\n", c.out);
}

std::string q(const Rational& r) { return to_string(r); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spx: exact optimization by conditioning and search for MAX-Ek-LIN2 and weighted MAX-k-CSP"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto add_common = [](CLI::App* sub, Common& c, bool with_in) {
    if (with_in) sub->add_option("--in", c.in, "instance file (.spx, or .cnf for DIMACS)")->required();
    sub->add_option("--eta", c.eta, "threshold parameter eta in (0,1), p/q")->capture_default_str();
    sub->add_option("--workers", c.workers, "worker threads (SPX_THREADS overrides)");
    sub->add_flag("--json", c.json_out, "emit an spx-report/1 JSON report");
    sub->add_flag("--no-timestamp", c.no_timestamp, "leave the report timestamp null");
    sub->add_option("--out", c.out, "output path (default stdout)");
  };

  // gen
  Common gc;
  std::string kind = "csp", family = "sat", weights = "1", coeffs = "-1,1", gformat = "spx";
  std::size_t gn = 0, gk = 3, gm = 0;
  bool mixed = false, planted = false;
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--kind", kind, "lin2 | csp")->check(CLI::IsMember({"lin2", "csp"}))->capture_default_str();
  gen->add_option("--n", gn, "variables")->required();
  gen->add_option("--k", gk, "arity")->capture_default_str();
  gen->add_option("--m", gm, "terms or constraints")->required();
  gen->add_option("--family", family, "csp predicate family: sat | parity | random")->capture_default_str();
  gen->add_flag("--mixed", mixed, "csp arity uniform in 1..k");
  gen->add_flag("--planted", planted, "plant a uniformly random optimum (all satisfied / all terms -|c|)");
  gen->add_option("--weights", weights, "csp weight set, comma separated")->capture_default_str();
  gen->add_option("--coeffs", coeffs, "lin2 coefficient set, comma separated")->capture_default_str();
  gen->add_option("--seed", gc.seed, "generator seed")->capture_default_str();
  gen->add_option("--format", gformat, "spx | json")->check(CLI::IsMember({"spx", "json"}))->capture_default_str();
  gen->add_option("--out", gc.out, "output path (default stdout)");

  // oracle
  Common oc;
  bool histogram = false;
  auto* oracle = app.add_subcommand("oracle", "exact optimum and threshold-set count");
  add_common(oracle, oc, true);
  oracle->add_flag("--histogram", histogram, "include the value histogram");

  // exponents
  Common ec;
  std::optional<std::size_t> ek, en;
  std::optional<double> egamma;
  std::optional<std::string> ehmin;
  auto* exps = app.add_subcommand("exponents", "exponent report for an instance or for (k, eta, gamma)");
  add_common(exps, ec, false);
  exps->add_option("--in", ec.in, "instance file");
  exps->add_option("--k", ek, "arity (parameter mode)");
  exps->add_option("--gamma", egamma, "threshold exponent gamma (parameter mode)");
  exps->add_option("--n", en, "dimension for r_ns (parameter mode)");
  exps->add_option("--h-min", ehmin, "known optimum; computed by the oracle when omitted");

  // solve
  Common sc;
  std::string algo = "case1";
  std::optional<std::string> shmin;
  std::uint64_t max_ball = 1'000'000;
  std::optional<std::uint64_t> max_draws;
  std::optional<std::size_t> radius;
  std::optional<double> sgamma;
  double slack = 1.0;
  bool no_fallback = false;
  auto* solve = app.add_subcommand("solve", "run one solver");
  add_common(solve, sc, true);
  solve->add_option("--algo", algo, "case1 | case2 | ranked | sweep")
      ->check(CLI::IsMember({"case1", "case2", "ranked", "sweep"}))
      ->capture_default_str();
  solve->add_option("--delta", sc.delta, "failure probability in (0,1/2)")->capture_default_str();
  solve->add_option("--seed", sc.seed, "rng seed")->capture_default_str();
  solve->add_option("--h-min", shmin, "known optimum for case1/case2; oracle when omitted");
  solve->add_option("--max-ball-points", max_ball, "ball-point budget")->capture_default_str();
  solve->add_option("--max-raw-draws", max_draws, "raw-draw budget (default 64 * 2^n)");
  solve->add_option("--radius", radius, "override the search radius");
  solve->add_option("--gamma", sgamma, "ranked: threshold exponent hint (default: from the instance)");
  solve->add_option("--slack", slack, "ranked/sweep: multiplier on the successful-set size")->capture_default_str();
  solve->add_flag("--no-fallback", no_fallback, "sweep: no exhaustive search after all stages return NULL");

  // verify
  Common vc;
  std::string vscale = "small";
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(verify, vc, false);
  verify->add_option("--scale", vscale, "small | full")->check(CLI::IsMember({"small", "full"}))->capture_default_str();

  // bench
  Common bc;
  BenchConfig bcfg;
  std::string bformat = "csv";
  auto* bench = app.add_subcommand("bench", "sweep n and record solver work against oracle-exact set sizes");
  add_common(bench, bc, false);
  bench->add_option("--family", bcfg.family, "lin2 | planted-lin2 | sat | parity | random")->capture_default_str();
  bench->add_option("--k", bcfg.k, "arity")->capture_default_str();
  bench->add_option("--n-from", bcfg.n_from, "first n")->capture_default_str();
  bench->add_option("--n-to", bcfg.n_to, "last n (inclusive)")->capture_default_str();
  bench->add_option("--n-step", bcfg.n_step, "n increment")->capture_default_str();
  bench->add_option("--m-per-n", bcfg.m_per_n, "m / n")->capture_default_str();
  bench->add_option("--seeds", bcfg.seeds, "instances per n")->capture_default_str();
  bench->add_option("--runs", bcfg.runs, "solver runs per instance")->capture_default_str();
  bench->add_option("--seed", bc.seed, "master seed")->capture_default_str();
  bench->add_option("--max-ball-points", bcfg.max_ball_points, "ball-point budget per run")->capture_default_str();
  bench->add_option("--format", bformat, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      Instance inst;
      RngStream prng(gc.seed, 99);
      if (kind == "lin2") {
        const auto cs = parse_list(coeffs, "--coeffs");
        inst = planted ? gen_planted_lin2(gn, gk, gm, cs, prng.uniform_assignment(gn), gc.seed)
                       : gen_random_lin2(gn, gk, gm, cs, gc.seed);
      } else {
        CspGenSpec spec;
        spec.n = gn;
        spec.k = gk;
        spec.m = gm;
        spec.family = parse_predicate_family(family);
        spec.mixed_arity = mixed;
        spec.weights = parse_list(weights, "--weights");
        inst = planted ? gen_planted_csp(spec, prng.uniform_assignment(gn), gc.seed) : gen_random_csp(spec, gc.seed);
      }
      emit(gformat == "json" ? instance_to_json(inst).dump(2) + "\n" : write_instance(inst), gc.out);
      return kExitOk;
    }

    if (oracle->parsed()) {
      const auto rc = base_config("oracle", oc);
      const Instance inst = read_instance_file(oc.in);
      OracleOptions opts;
      opts.histogram = histogram;
      opts.workers = rc.workers;
      const auto res = brute_force_minimum(inst, opts);
      json j;
      j["n"] = instance_n(inst);
      j["h_min"] = q(res.h_min);
      j["minimizer_count"] = res.minimizer_count;
      j["first_minimizer"] = res.minimizers.empty() ? json() : json(res.minimizers.front().to_string());
      std::optional<std::uint64_t> tcount;
      std::optional<double> gamma;
      if (res.h_min < 0) {
        tcount = threshold_set_count(inst, res.h_min, rc.eta, rc.workers);
        const CspInstance csp = std::holds_alternative<CspInstance>(inst) ? std::get<CspInstance>(inst)
                                                                          : csp_of_lin2(std::get<Lin2Instance>(inst));
        gamma = mcdiarmid_gamma(compute_stats(csp), res.h_min, rc.eta);
      }
      j["threshold_count"] = tcount ? json(*tcount) : json();
      j["gamma"] = gamma ? json(*gamma) : json();
      const double n = static_cast<double>(instance_n(inst));
      j["log2_threshold_bound"] = gamma ? json((1 - *gamma) * n) : json();
      if (res.histogram) {
        json h = json::object();
        for (const auto& [v, c] : *res.histogram) h[q(v)] = c;
        j["histogram"] = h;
      }
      if (oc.json_out) {
        emit_report(rc, j, oc);
      } else {
        std::ostringstream os;
        os << "h_min: " << q(res.h_min) << "\nminimizers: " << res.minimizer_count << "\n";
        if (!res.minimizers.empty()) os << "first minimizer: " << res.minimizers.front().to_string() << "\n";
        if (tcount) {
          os << "|T_eta| (eta = " << q(rc.eta) << "): " << *tcount << "\n";
          os << "threshold bound 2^{(1-gamma) n}: 2^" << (1 - *gamma) * n << " = " << std::exp2((1 - *gamma) * n)
             << " (gamma = " << *gamma << ")\n";
        } else {
          os << "|T_eta|: undefined (h_min = 0)\n";
        }
        if (res.histogram) {
          for (const auto& [v, c] : *res.histogram) os << "  H = " << q(v) << ": " << c << "\n";
        }
        emit(os.str(), oc.out);
      }
      return kExitOk;
    }

    if (exps->parsed()) {
      const auto rc = base_config("exponents", ec);
      ExponentReport rep;
      if (!ec.in.empty()) {
        const Instance inst = read_instance_file(ec.in);
        Rational h_min = ehmin ? parse_q(*ehmin, "--h-min") : brute_force_minimum(inst).h_min;
        if (std::holds_alternative<CspInstance>(inst)) {
          rep = classical_exponent_case2(compute_stats(std::get<CspInstance>(inst)), h_min, rc.eta);
        } else {
          const auto& lin2 = std::get<Lin2Instance>(inst);
          const double g = egamma ? *egamma : mcdiarmid_gamma(compute_stats(csp_of_lin2(lin2)), h_min, rc.eta);
          rep = classical_exponent_case1(g, rc.eta, lin2.k(), lin2.n());
        }
      } else {
        if (!ek || !egamma) throw CLI::ValidationError("exponents", "give --in, or both --k and --gamma");
        rep = classical_exponent_case1(*egamma, rc.eta, *ek, en);
      }
      if (ec.json_out) {
        emit_report(rc, report_to_json(rep), ec);
      } else {
        std::ostringstream os;
        os << "regime: " << rep.regime << "\neta: " << q(rep.eta) << "\ngamma: " << rep.gamma << "\nkappa: " << rep.kappa
           << "\nc_cl: " << rep.c_cl << "\nc_q: " << rep.c_q << "\nratio c_cl/c_q: " << rep.ratio
           << "\nlower bound: " << rep.lower_bound << "\n";
        if (rep.q_eta) os << "q_eta: " << *rep.q_eta << "\n";
        if (rep.r_ns) os << "r_ns: " << *rep.r_ns << "\n";
        if (rep.theta_eta) os << "theta_eta: " << q(*rep.theta_eta) << "\n";
        if (rep.r_lip) os << "r_lip: " << *rep.r_lip << "\n";
        emit(os.str(), ec.out);
      }
      return kExitOk;
    }

    if (solve->parsed()) {
      auto rc = base_config("solve", sc);
      rc.max_ball_points = max_ball;
      rc.max_raw_draws = max_draws;
      rc.slack = slack;
      rc.extra["algo"] = algo;
      if (radius) rc.extra["radius"] = std::to_string(*radius);
      if (shmin) rc.extra["h_min"] = *shmin;
      if (sgamma) rc.extra["gamma"] = std::to_string(*sgamma);
      if (no_fallback) rc.extra["fallback"] = "off";
      const Instance inst = read_instance_file(sc.in);
      RngStream rng(sc.seed);
      auto known = [&] { return shmin ? parse_q(*shmin, "--h-min") : brute_force_minimum(inst).h_min; };
      SolveOutcome out;
      json extra = json::object();
      if (algo == "case1" || algo == "ranked") {
        if (!std::holds_alternative<Lin2Instance>(inst)) throw CLI::ValidationError("--algo", algo + " needs a lin2 instance");
        const auto& lin2 = std::get<Lin2Instance>(inst);
        if (algo == "case1") {
          Budget b{max_ball, max_draws};
          out = solve_case1(lin2, known(), rc.eta, rng, b, SearchRadius{radius});
        } else {
          RankedOptions ro;
          ro.delta = rc.delta;
          ro.slack = slack;
          ro.radius_override = radius;
          ro.max_ball_points = max_ball;
          double g = 0;
          if (sgamma) {
            g = *sgamma;
          } else if (!lin2.trivial()) {
            g = mcdiarmid_gamma(compute_stats(csp_of_lin2(lin2)), known(), rc.eta);
          }
          RankedTrace tr;
          out = ranked_solve(lin2, rc.eta, g, rng, ro, &tr);
          extra = {{"N", tr.N}, {"K", tr.K}, {"radius", tr.radius}, {"gamma_hint", g}};
        }
      } else {
        if (!std::holds_alternative<CspInstance>(inst)) throw CLI::ValidationError("--algo", algo + " needs a csp instance");
        const auto& csp = std::get<CspInstance>(inst);
        if (algo == "case2") {
          Budget b{max_ball, max_draws};
          out = solve_case2(csp, known(), rc.eta, rng, b, SearchRadius{radius});
        } else {
          SweepOptions so;
          so.stage.delta = rc.delta;
          so.stage.slack = slack;
          so.stage.max_ball_points = max_ball;
          so.exhaustive_fallback = !no_fallback;
          SweepTrace tr;
          out = bounded_sweep_solve(csp, rc.eta, rng, so, &tr);
          json stages = json::array();
          for (const auto& st : tr.stages) {
            stages.push_back({{"r", st.r}, {"U", q(st.U)}, {"status", to_string(st.result.status)},
                              {"radius", st.result.radius}, {"N", st.result.N}, {"kept", st.result.kept},
                              {"cap", st.result.cap}});
          }
          extra = {{"B", q(tr.B)}, {"R", tr.R}, {"stages", stages},
                   {"halt_stage", tr.halt_stage ? json(*tr.halt_stage) : json()},
                   {"exhaustive_fallback", tr.exhaustive_fallback}};
        }
      }
      json j = {{"status", to_string(out.status)},
                {"value", q(out.value)},
                {"assignment", out.best.to_string()},
                {"certified_optimal", out.certified_optimal},
                {"iterations", out.iterations},
                {"raw_draws", out.raw_draws},
                {"ball_points", out.ball_points},
                {"note", out.note},
                {"trace", extra}};
      if (sc.json_out) {
        emit_report(rc, j, sc);
      } else {
        std::ostringstream os;
        os << "status: " << to_string(out.status) << "\nvalue: " << q(out.value) << "\nassignment: " << out.best.to_string()
           << "\ncertified optimal: " << (out.certified_optimal ? "yes" : "no") << "\niterations: " << out.iterations
           << "\nraw draws: " << out.raw_draws << "\nball points: " << out.ball_points << "\n";
        if (!out.note.empty()) os << "note: " << out.note << "\n";
        emit(os.str(), sc.out);
      }
      std::cout.flush();
      std::fprintf(stderr, "wall time: %.3f s\n", out.wall_seconds);
      const bool budget_out = out.status == SolveStatus::kBudgetExhausted || out.status == SolveStatus::kRefused ||
                              out.status == SolveStatus::kFailed;
      return budget_out ? kExitBudget : kExitOk;
    }

    if (verify->parsed()) {
      const auto rc = base_config("verify", vc);
      const auto results =
          run_invariant_suite(vscale == "full" ? SuiteScale::kFull : SuiteScale::kSmall, rc.workers);
      bool ok = true;
      for (const auto& r : results) ok = ok && r.passed;
      if (vc.json_out) {
        auto rc2 = rc;
        rc2.extra["scale"] = vscale;
        emit_report(rc2, {{"passed", ok}, {"checks", checks_to_json(results)}}, vc);
      } else {
        std::ostringstream os;
        for (const auto& r : results) {
          os << (r.passed ? "PASS " : "FAIL ") << r.id << " " << r.name << ": " << r.detail << "\n";
        }
        os << (ok ? "all checks passed" : "some checks FAILED") << "\n";
        emit(os.str(), vc.out);
      }
      return ok ? kExitOk : kExitInvariant;
    }

    if (bench->parsed()) {
      auto rc = base_config("bench", bc);
      bcfg.eta = rc.eta;
      bcfg.seed = bc.seed;
      bcfg.workers = rc.workers;
      const auto rep = bench_sweep(bcfg);
      if (bformat == "json" || bc.json_out) {
        rc.format = "json";
        json result = bench_to_json(rep);
        result["bench"] = bench_config_to_json(bcfg);
        emit_report(rc, result, bc);
      } else {
        emit(bench_to_csv(rep), bc.out);
        if (rep.slope) std::fprintf(stderr, "log2 work slope per unit n: %.4f\n", *rep.slope);
      }
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
