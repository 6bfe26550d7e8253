#include "latcover/cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "latcover/constants.hpp"
#include "latcover/error.hpp"
#include "latcover/lattice_io.hpp"
#include "serialize.hpp"

namespace latcover::cli {

std::string RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  Json p = Json::object();
  for (const auto& [k, v] : parameters) p[k] = v;
  j["parameters"] = p;
  j["seed"] = seed;
  j["versions"] = versions;
  j["outputs"] = outputs;
  j["wall_time_ms"] = wall_time_ms;
  return j.dump();
}

namespace {

struct Shared {
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> samples;
  std::optional<double> grid;
  std::optional<double> tol;
  std::optional<double> tau;
  unsigned threads = 0;
  std::string out;
  std::string manifest;
  bool paper_constants = false;
  bool per_event = false;
};

struct Context {
  const Shared& shared;
  RunManifest& manifest;
  Json payload;
  int status = kOk;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EnumerationBudgetExceeded:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::BisectionStalled:
    case ErrorCode::MaxTriesExceeded:
      return kBudget;
    case ErrorCode::CoverageCheckFailed:
      return kCoverage;
    default:
      return kValidation;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

Json entry(double value, const std::string& provenance) {
  return Json{{"value", value}, {"provenance", provenance}};
}

double parse_density(const std::string& text, int d) {
  if (text == "hex") return constants::hex_robust_density();
  if (text == "cube") return constants::nu(d);
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::InvalidArgument, "--D must be hex, cube or a number, got '" + text + "'");
}

// ---------------------------------------------------------------- commands

struct ConstantsArgs {
  int d = 2;
  std::string D = "hex";
  std::optional<int> n;
  std::optional<int> k;
  std::optional<double> eta;
  std::optional<double> delta0;
  std::optional<double> c_lift;
};

void cmd_constants(Context& ctx, const ConstantsArgs& a) {
  require(a.d >= 1, ErrorCode::InvalidArgument, "--d must be >= 1");
  const double D = parse_density(a.D, a.d);
  const auto ex = constants::exponents(a.d, D);
  const auto lb = constants::robust_lower_bounds(a.d);
  Json& j = ctx.payload;
  j["d"] = entry(a.d, "input");
  j["D"] = entry(D, a.D == "hex" ? "8 pi / (3 sqrt 3)" : a.D == "cube" ? "nu_d" : "input");
  j["alpha"] = entry(ex.alpha, "1/2 log2(2 pi e)");
  j["beta"] = entry(ex.beta, "1/2 log2(8 pi e / (3 sqrt 3))");
  j["gamma"] = entry(ex.gamma, "alpha - (1/d) log2(nu_d / D)");
  j["nu_d"] = entry(constants::nu(a.d), "(pi d)^(d/2) / Gamma(d/2 + 1)");
  j["hex_density"] = entry(constants::hex_robust_density(), "8 pi / (3 sqrt 3)");
  j["robust_lower_bound"] = entry(lb.nu_over_2n, "nu_d / 2^d");
  j["exponent_floor"] = entry(lb.exponent_floor, "1/2 log2(2 pi e) - 1");
  if (a.d <= 6) {
    const auto lc = constants::lift_constants(a.d);
    j["c_pt"] = entry(lc.c_pt, "(4^d d^(d/2) + 1)^(d 2^d)");
    j["log2_c_pt"] = entry(lc.log2_c_pt, "log2 c_pt");
    j["c_lift"] = entry(lc.c_lift, "((c_pt + 1) d)^(2^d - 1)");
    j["log2_c_lift"] = entry(lc.log2_c_lift, "log2 c_lift");
    if (const auto exact = constants::exact_lift_constants(a.d)) {
      j["c_pt_exact"] = Json{{"value", exact->c_pt}, {"provenance", "exact integer"}};
      j["c_lift_exact"] = Json{{"value", exact->c_lift}, {"provenance", "exact integer"}};
    }
  }
  if (a.n) {
    const bool manual = a.k || a.eta || a.delta0 || a.c_lift;
    constants::ManualOverrides mo{a.k, a.eta, a.delta0, a.c_lift};
    const auto p = constants::theorem2_params(
        *a.n, a.d, D, manual ? constants::ParamMode::Manual : constants::ParamMode::Asymptotic, mo);
    j["n"] = entry(p.n, "input");
    j["mode"] = Json{{"value", manual ? "manual" : "asymptotic"}, {"provenance", "input"}};
    j["k"] = entry(p.k, manual && a.k ? "override" : "ceil((1/d) log2 ln n + 4)");
    j["m"] = entry(p.m, "n - k d");
    j["eta"] = entry(p.eta, a.eta ? "override" : "(m/4) ln(27/16) - 3 ln m");
    j["eta_negative"] = Json{{"value", p.eta_negative}, {"provenance", "eta <= 0"}};
    j["delta0_bound"] = entry(p.delta0_bound, a.delta0 ? "override" : "m^3 (16/27)^(m/4), C = 1");
    j["delta_schedule"] =
        Json{{"value", p.delta_schedule}, {"provenance", "delta_i = c_lift delta_{i-1}^(2^d)"}};
    j["log2_delta_schedule"] = Json{{"value", p.log2_delta_schedule}, {"provenance", "log2 delta_i"}};
    j["density_bound"] =
        Json{{"value", p.density_bound ? Json(*p.density_bound) : Json(nullptr)},
             {"provenance", "2 e eta (D/nu_d)^k (2 pi e)^(k d / 2), eta > 0 only"}};
    j["overrides"] = Json{{"value", p.overrides}, {"provenance", "input"}};
  }
}

struct LatticeArgs {
  std::string lattice;
  std::optional<double> radius;
  std::string csv;
};

CertifyOptions certify_options(const Shared& s) {
  CertifyOptions o;
  o.threads = s.threads;
  return o;
}

void cmd_verify_robust(Context& ctx, const LatticeArgs& a) {
  const auto doc = load_lattice(a.lattice);
  const std::optional<double> r = a.radius ? a.radius : doc.radius;
  require(r.has_value(), ErrorCode::InvalidArgument, "no --radius and no radius in the lattice file");
  const double h = ctx.shared.grid.value_or(1e-3);
  const auto cert = certify_robust(doc.lattice, *r, h, certify_options(ctx.shared));
  ctx.payload["lattice"] = to_json(doc.lattice);
  ctx.payload["certificate"] = to_json(cert);
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write '" + a.csv + "'");
    dump_deficit_grid(doc.lattice, *r, h, f, certify_options(ctx.shared));
    ctx.manifest.outputs.push_back(a.csv);
  }
  if (cert.verdict == Verdict::Inconclusive) ctx.status = kBudget;
}

void cmd_min_radius(Context& ctx, const LatticeArgs& a) {
  const auto doc = load_lattice(a.lattice);
  MinRadiusOptions o;
  o.certify = certify_options(ctx.shared);
  const auto res = min_robust_radius(doc.lattice, ctx.shared.tol.value_or(1e-3), o);
  ctx.payload["lattice"] = to_json(doc.lattice);
  ctx.payload["result"] = to_json(res);
}

void cmd_search(Context& ctx, int iters) {
  SearchOptions o;
  o.threads = ctx.shared.threads;
  o.tol = ctx.shared.tol.value_or(1e-3);
  const auto res = search_robust_2d(ctx.shared.seed, iters, o);
  ctx.payload["result"] = to_json(res);
}

struct EstimateArgs {
  std::string lattice;
  std::string body;
};

McOptions mc_options(const Shared& s) {
  McOptions o;
  o.threads = s.threads;
  return o;
}

void cmd_estimate(Context& ctx, const EstimateArgs& a) {
  const auto doc = load_lattice(a.lattice);
  const auto body = load_body(a.body);
  const auto est = estimate_uncovered_density(doc.lattice, body,
                                              ctx.shared.samples.value_or(100'000),
                                              ctx.shared.seed, mc_options(ctx.shared));
  ctx.payload["estimate"] = to_json(est);
}

LiftOptions lift_options(const Shared& s, std::uint64_t default_samples) {
  LiftOptions o;
  o.tau = s.tau.value_or(3.0);
  o.paper_constants = s.paper_constants;
  o.per_event = s.per_event;
  o.samples = s.samples.value_or(default_samples);
  o.mc = mc_options(s);
  return o;
}

struct LiftArgs {
  std::string base;
  std::string robust = "hex";
  std::string body;
  double delta = 0.0;
  int max_tries = 20;
};

void cmd_lift(Context& ctx, const LiftArgs& a) {
  const auto base = load_lattice(a.base);
  const auto body = load_body(a.body);
  const auto robust = builtin_covering(a.robust);
  const auto res = lift_until_good(base.lattice, robust, body, a.delta, ctx.shared.seed,
                                   a.max_tries, lift_options(ctx.shared, 1'000'000));
  ctx.payload["result"] = to_json(res);
}

struct PipelineArgs {
  int n = 0;
  int d = 0;
  int k = 0;
  std::string robust;
  std::string initial_lattice;
  std::string initial_body;
  double delta0 = 0.1;
  std::uint64_t verify_samples = 100'000;
  int max_tries = 20;
  std::string csv;
};

void cmd_pipeline(Context& ctx, const PipelineArgs& a) {
  PipelineOptions o;
  o.n = a.n;
  o.d = a.d;
  o.k = a.k;
  o.robust = !a.robust.empty() ? a.robust : a.d == 2 ? "hex" : "cube(" + std::to_string(a.d) + ")";
  require(a.initial_lattice.empty() == a.initial_body.empty(), ErrorCode::InvalidArgument,
          "--initial-lattice and --initial-body go together");
  if (!a.initial_lattice.empty()) {
    o.initial.emplace(load_lattice(a.initial_lattice).lattice, load_body(a.initial_body));
  }
  o.delta0_target = a.delta0;
  o.lift = lift_options(ctx.shared, 1'000'000);
  o.samples = o.lift.samples;
  o.verify_samples = a.verify_samples;
  o.seed = ctx.shared.seed;
  o.max_tries = a.max_tries;
  const auto res = pipeline_run(o);
  ctx.payload["robust"] = o.robust;
  ctx.payload["result"] = to_json(res);
  if (!a.csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "stage,dim,delta,ci,resamples\n";
    for (std::size_t i = 0; i < res.stages.size(); ++i) {
      const auto& s = res.stages[i];
      csv << i << ',' << s.dim << ',' << s.delta_estimate.estimate << ','
          << s.delta_estimate.ci95_upper << ',' << s.resamples << '\n';
    }
    write_file(a.csv, csv.str());
    ctx.manifest.outputs.push_back(a.csv);
  }
  if (!res.coverage_check.all_covered) ctx.status = kCoverage;
}

void cmd_check_lemmas(Context& ctx) {
  LemmaCheckOptions o;
  o.seed = ctx.shared.seed;
  o.threads = ctx.shared.threads;
  if (ctx.shared.samples) o.translation_samples = *ctx.shared.samples;
  bool all = true;
  Json checks = Json::array();
  for (const auto& c : run_lemma_checks(o)) {
    checks.push_back(to_json(c));
    all = all && c.passed;
  }
  ctx.payload["checks"] = checks;
  ctx.payload["all_passed"] = all;
  if (!all) ctx.status = kCheckFailed;
}

void record_options(const CLI::App& app, std::map<std::string, std::string>& params) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help" || opt->get_name() == "--version") {
      continue;
    }
    std::string value;
    for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    params[opt->get_name()] = value;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Lattice covering constructions and checks", "latcover"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "key=value defaults; flags override")
      ->envname("LATCOVER_CONFIG");

  Shared sh;
  app.add_option("--seed", sh.seed, "RNG seed");
  app.add_option("--samples", sh.samples, "Monte Carlo samples");
  app.add_option("--grid", sh.grid, "certification grid spacing")->check(CLI::PositiveNumber);
  app.add_option("--tol", sh.tol, "bracket width")->check(CLI::PositiveNumber);
  app.add_option("--tau", sh.tau, "lift acceptance factor")->check(CLI::PositiveNumber);
  app.add_option("--threads", sh.threads, "worker threads (0: all cores)");
  app.add_option("--out", sh.out, "write JSON here instead of stdout");
  app.add_option("--manifest", sh.manifest, "write the run manifest here instead of stderr");
  app.add_flag("--paper-constants", sh.paper_constants, "accept lifts against C_lift");
  app.add_flag("--per-event", sh.per_event, "check every parallelepiped event");

  std::vector<std::pair<CLI::App*, std::function<void(Context&)>>> commands;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    return sub;
  };

  ConstantsArgs ca;
  {
    auto* s = add("constants", "exponents, lifting constants and parameter schedules");
    s->add_option("--d", ca.d, "robust covering dimension");
    s->add_option("--D", ca.D, "robust density: hex, cube or a number");
    s->add_option("--n", ca.n, "target dimension for the parameter schedule");
    s->add_option("--k", ca.k, "manual number of lifts");
    s->add_option("--eta", ca.eta, "manual eta");
    s->add_option("--delta0", ca.delta0, "manual delta_0");
    s->add_option("--c-lift", ca.c_lift, "manual lifting constant");
    commands.emplace_back(s, [&](Context& c) { cmd_constants(c, ca); });
  }
  LatticeArgs va;
  {
    auto* s = add("verify-robust", "certify or refute robustness at one radius");
    s->add_option("--lattice", va.lattice, "lattice file")->required();
    s->add_option("--radius", va.radius, "ball radius (defaults to the file's radius)");
    s->add_option("--csv", va.csv, "dump the base deficit grid");
    commands.emplace_back(s, [&](Context& c) { cmd_verify_robust(c, va); });
  }
  LatticeArgs ma;
  {
    auto* s = add("min-radius", "bracket the minimal robust radius");
    s->add_option("--lattice", ma.lattice, "lattice file")->required();
    commands.emplace_back(s, [&](Context& c) { cmd_min_radius(c, ma); });
  }
  int iters = 50;
  {
    auto* s = add("search", "local search for planar robust coverings");
    s->add_option("--iters", iters, "proposals")->check(CLI::NonNegativeNumber);
    commands.emplace_back(s, [&](Context& c) { cmd_search(c, iters); });
  }
  EstimateArgs ea;
  {
    auto* s = add("estimate", "uncovered density of a lattice and body");
    s->add_option("--lattice", ea.lattice, "lattice file")->required();
    s->add_option("--body", ea.body, "body file")->required();
    commands.emplace_back(s, [&](Context& c) { cmd_estimate(c, ea); });
  }
  LiftArgs la;
  {
    auto* s = add("lift", "lift a near-covering by a robust covering");
    s->add_option("--base", la.base, "base lattice file")->required();
    s->add_option("--robust", la.robust, "robust covering name");
    s->add_option("--body", la.body, "body file")->required();
    s->add_option("--delta", la.delta, "uncovered density of the base pair")->required();
    s->add_option("--max-tries", la.max_tries, "resampling budget");
    commands.emplace_back(s, [&](Context& c) { cmd_lift(c, la); });
  }
  PipelineArgs pa;
  {
    auto* s = add("pipeline", "k lifts, expansion and a final coverage check");
    s->add_option("--n", pa.n, "final dimension")->required();
    s->add_option("--d", pa.d, "robust covering dimension")->required();
    s->add_option("--k", pa.k, "number of lifts")->required();
    s->add_option("--robust", pa.robust, "robust covering name (default hex for d = 2, cube(d) otherwise)");
    s->add_option("--initial-lattice", pa.initial_lattice, "starting lattice file");
    s->add_option("--initial-body", pa.initial_body, "starting body file");
    s->add_option("--delta0", pa.delta0, "target delta_0 for the default start");
    s->add_option("--verify-samples", pa.verify_samples, "points in the final coverage check");
    s->add_option("--max-tries", pa.max_tries, "resampling budget per lift");
    s->add_option("--csv", pa.csv, "per-stage delta trace");
    commands.emplace_back(s, [&](Context& c) { cmd_pipeline(c, pa); });
  }
  {
    auto* s = add("check-lemmas", "run the bundled lemma checks");
    commands.emplace_back(s, [&](Context& c) { cmd_check_lemmas(c); });
  }

  if (argc > 1 && argv[1][0] != '-') {
    std::set<std::string> names;
    for (const auto& [sub, fn] : commands) names.insert(sub->get_name());
    if (!names.count(argv[1])) {
      err << to_string(ErrorCode::UnknownCommand) << ": '" << argv[1] << "'\n";
      return kValidation;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kOk;
    err << e.what() << '\n';
    return kValidation;
  }

  RunManifest manifest;
  manifest.seed = sh.seed;
  record_options(app, manifest.parameters);
  Context ctx{sh, manifest, Json::object(), kOk};
  for (const auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    manifest.command = sub->get_name();
    record_options(*sub, manifest.parameters);
    try {
      fn(ctx);
    } catch (const Error& e) {
      err << e.what() << '\n';
      ctx.status = exit_code_for(e.code());
      ctx.payload = Json::object();
      ctx.payload["error"] = std::string(to_string(e.code()));
      ctx.payload["message"] = e.what();
    }
  }

  Json doc;
  doc["command"] = manifest.command;
  doc["seed"] = sh.seed;
  for (auto it = ctx.payload.begin(); it != ctx.payload.end(); ++it) doc[it.key()] = it.value();
  const std::string text = doc.dump(2) + "\n";
  try {
    if (sh.out.empty()) {
      out << text;
    } else {
      write_file(sh.out, text);
      manifest.outputs.insert(manifest.outputs.begin(), sh.out);
    }
    manifest.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    if (sh.manifest.empty()) {
      err << manifest.to_json() << '\n';
    } else {
      write_file(sh.manifest, manifest.to_json() + "\n");
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kValidation;
  }
  return ctx.status;
}

}  // namespace latcover::cli
