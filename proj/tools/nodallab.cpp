// nodallab command-line front end: construct, analyze, verify, sweep, plot.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>
#include <atomic>
#include <thread>

#include <CLI11.hpp>

#include "nodallab/circle.hpp"
#include "nodallab/error.hpp"
#include "nodallab/functionals.hpp"
#include "nodallab/io.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/order.hpp"
#include "nodallab/report.hpp"
#include "nodallab/svg.hpp"
#include "nodallab/verify.hpp"
#include "nodallab/version.hpp"

namespace fs = std::filesystem;
using namespace nodallab;
using report::Json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kPrecondition = 2, kIo = 3 };

struct Common {
  std::string out = ".";
  unsigned jobs = 1;
  std::string config;
};

struct Params {
  double q = 1.0;
  double lp = 1.0;
  double lm = 1.0;
  double mu = 1.0;

  ProblemParams get() const { return {q, lp, lm, mu}; }
};

unsigned default_jobs() {
  if (const char* env = std::getenv("NODALLAB_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 1;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--jobs", c.jobs, "Worker threads (default: NODALLAB_JOBS or 1)")->capture_default_str();
  app->add_option("--config", c.config, "key=value file with the same keys as the long flags");
}

void add_params(CLI::App* app, Params& p) {
  app->add_option("--q", p.q, "Exponent q in [1, 2)")->capture_default_str();
  app->add_option("--lambda-plus,--lp", p.lp, "Coefficient of the positive phase")->capture_default_str();
  app->add_option("--lambda-minus,--lm", p.lm, "Coefficient of the negative phase")->capture_default_str();
  app->add_option("--mu", p.mu, "Equation scale (0 switches the nonlinearity off)")->capture_default_str();
}

fs::path prepare(const Common& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
  return dir;
}

// Options of a subcommand as strings, for run.json.
Json option_record(const CLI::App* app) {
  Json j = Json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      j[name] = res.size() == 1 ? Json(res.front()) : Json(res);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void write_run_record(const fs::path& dir, const CLI::App* app, double seconds, int exit_code) {
  Json j{{"command", app->get_name()},
         {"version", kVersionString},
         {"options", option_record(app)},
         {"exit_code", exit_code},
         {"timings", Json{{"seconds", seconds}}}};
  io::write_file(dir / "run.json", report::dump(j));
}

std::string fmt(double v) { return io::format_double(v); }

AngularProfile perturb(const AngularProfile& p, double amplitude) {
  const double a = amplitude * p.scale();
  std::vector<double> v = p.values(), d = p.derivative();
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] += a * std::sin(3.0 * p.node(j));
    d[j] += 3.0 * a * std::cos(3.0 * p.node(j));
  }
  return AngularProfile(std::move(v), std::move(d), p.params());
}

// --- construct ---------------------------------------------------------------

struct ConstructArgs {
  Common common;
  Params params;
  int k = 0;
  std::size_t arc_nodes = 2048;
  std::size_t profile_samples = 8192;
  std::size_t scan = 0;
  double perturb = 0.0;
};

int cmd_construct(const ConstructArgs& a, const fs::path& dir) {
  const auto params = a.params.get();
  ConstructOptions opts;
  opts.arc_nodes = a.arc_nodes;
  opts.profile_samples = a.profile_samples;
  Json extra = Json::object();
  if (a.scan > 0) {
    const auto scan = scan_psi(params, a.k, a.arc_nodes, a.scan, opts.bracket_fraction, opts.arc);
    std::ostringstream csv;
    csv << "t,psi\n";
    for (const auto& s : scan.samples) csv << fmt(s.t) << ',' << fmt(s.value) << '\n';
    io::write_file(dir / "psi_scan.csv", csv.str());
    Json changes = Json::array();
    for (const auto& [lo, hi] : scan.sign_changes) changes.push_back(Json::array({lo, hi}));
    extra["psi_sign_changes"] = changes;
  }
  auto result = construct_uk(params, a.k, opts);
  if (a.perturb != 0.0) {
    result.profile = perturb(result.profile, a.perturb);
    result.energy_drift = energy_drift(params, result.profile);
  }
  io::save(result.profile, dir / "profile.txt");
  const double n_q = eval_Nt(result.field(), {0.0, 0.0}, 1.0, params.q());
  const auto zeros = profile_zero_structure(result.profile);
  Json j = report::to_json(result, "profile.txt");
  j["N_q"] = n_q;
  j["gamma_q"] = gamma_q(params);
  j["zeros"] = zeros.zeros.size();
  j["antipodal"] = zeros.antipodal;
  j.update(extra);
  io::write_file(dir / "matching.json", report::dump(j));

  std::ostringstream s;
  s << "k = " << a.k << "\n"
    << "T = " << fmt(result.T) << "\n"
    << "t_bar = " << fmt(result.t_bar) << "\n"
    << "psi_residual = " << fmt(result.psi_residual) << "\n"
    << "energy_drift = " << fmt(result.energy_drift) << "\n"
    << "N_q(u_k,0,1) = " << fmt(n_q) << "\n"
    << "gamma_q = " << fmt(gamma_q(params)) << "\n"
    << "zeros = " << zeros.zeros.size() << (zeros.antipodal ? " (antipodal)" : "") << "\n";
  io::write_file(dir / "summary.txt", s.str());
  std::cout << s.str();
  return kOk;
}

// --- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  Common common;
  Params params;
  std::string input;
  std::string field;
  std::vector<double> x0{0.0, 0.0};
  double r_max = 0.9;
  std::size_t radii = 10;
  std::size_t grid = 512;
  int max_degree = 4;
};

PlanarField load_for_analysis(const AnalyzeArgs& a) {
  if (!a.field.empty()) return fields::from_name(a.field, a.params.get());
  auto loaded = io::load(a.input);
  if (auto* f = std::get_if<PlanarField>(&loaded)) return *f;
  const auto& prof = std::get<AngularProfile>(loaded);
  const ProblemParams p = prof.params().value_or(a.params.get());
  return PlanarField::homogeneous(gamma_q(p), prof, p);
}

int cmd_analyze(const AnalyzeArgs& a, const fs::path& dir) {
  if (a.input.empty() == a.field.empty()) throw Error(ErrorKind::Argument, "give exactly one of --input and --field");
  const PlanarField field = load_for_analysis(a);
  const Vec2 x0{a.x0.at(0), a.x0.at(1)};
  QuadratureOptions quad;
  quad.jobs = a.common.jobs;
  OrderOptions oopts;
  oopts.quadrature = quad;
  oopts.max_degree = a.max_degree;
  const auto ladder = dyadic_ladder(a.r_max, a.radii);
  const auto est = estimate_order(field, x0, ladder, oopts);

  Json j{{"field", field.describe()}, {"params", report::to_json(field.params())}};
  j["derived"] = report::to_json(derived_exponents(field.params()));
  j["order"] = report::to_json(est);

  const double gm = gamma_q(field.params());
  const auto tl = geometric_ladder(a.r_max * 1e-3, a.r_max, 40);
  try {
    j["transition"] = report::to_json(transition_exponent(field, x0, gamma_grid(0.5, gm + 1.0, 0.05), tl, quad));
  } catch (const Error& e) {
    j["transition"] = report::error_json(e);
  }

  const auto moments = compute_moments(field, x0, tl, quad);
  io::save_trace_csv(sample_trace(moments, {FunctionalKind::W, gm, 2.0}), dir / "W.csv");
  io::save_trace_csv(sample_trace(moments, {FunctionalKind::H, gm, 2.0}), dir / "H.csv");
  try {
    io::save_trace_csv(sample_trace(moments, {FunctionalKind::Nt, gm, field.params().q()}), dir / "N.csv");
  } catch (const Error& e) {
    j["frequency_trace"] = report::error_json(e);
  }

  if (field.kind() == PlanarField::Kind::Homogeneous) j["profile_zeros"] = report::to_json(profile_zero_structure(field.profile()));

  if (x0 == Vec2{0.0, 0.0}) {
    auto set = extract_nodal_set(field, a.grid, 1.0, a.common.jobs);
    try {
      detect_singular(field, set);
    } catch (const Error& e) {
      j["singular_error"] = report::error_json(e);
    }
    io::save_nodal(set, dir / "nodal.csv", dir / "nodal.json");
    j["nodal_length_half"] = nodal_length(set, 0.5);
    j["singular_points"] = set.singular_points.size();
  }
  io::write_file(dir / "analysis.json", report::dump(j));
  std::cout << report::dump(j);
  return kOk;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  verify::Config config;
};

int cmd_verify(VerifyArgs& a, const fs::path& dir) {
  a.config.jobs = a.common.jobs;
  const auto rep = verify::run(a.config, [](const verify::Criterion& c) {
    std::cout << verify::summary_line(c) << std::endl;
  });
  io::write_file(dir / "verify.json", report::dump(verify::to_json(rep)));
  std::cout << (rep.all_pass() ? "all checks passed" : "verification FAILED") << std::endl;
  return rep.all_pass() ? kOk : kVerifyFailed;
}

// --- sweep -------------------------------------------------------------------

struct SweepArgs {
  Common common;
  Params params;
  int k_min = 5;
  int k_max = 10;
  std::size_t arc_nodes = 2048;
  std::size_t grid = 512;
};

int cmd_sweep(const SweepArgs& a, const fs::path& dir) {
  const auto params = a.params.get();
  const int count = std::max(0, a.k_max - a.k_min + 1);
  std::vector<std::string> rows(static_cast<std::size_t>(count));
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      const int k = a.k_min + i;
      std::ostringstream row;
      try {
        ConstructOptions opts;
        opts.arc_nodes = a.arc_nodes;
        const auto r = construct_uk(params, k, opts);
        const double n_q = eval_Nt(r.field(), {0.0, 0.0}, 1.0, params.q());
        const double len = nodal_length(extract_nodal_set(r.field(), a.grid, 0.5), 0.5);
        row << k << ',' << fmt(r.t_bar) << ',' << fmt(n_q) << ',' << fmt(len) << ',' << fmt(r.energy_drift) << ",ok";
      } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        row << k << ",,,,," << "error: " << msg;
      }
      rows[static_cast<std::size_t>(i)] = row.str();
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(a.common.jobs, static_cast<unsigned>(std::max(count, 1))));
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::ostringstream csv;
  csv << "k,t_bar,N_q,nodal_length_half,energy_drift,status\n";
  for (const auto& r : rows) csv << r << '\n';
  io::write_file(dir / "sweep.csv", csv.str());
  std::cout << csv.str();
  return kOk;
}

// --- plot --------------------------------------------------------------------

struct PlotArgs {
  Common common;
  std::string nodal;
  std::string singular;
  std::string trace;
  std::string output;
};

int cmd_plot(const PlotArgs& a, const fs::path& dir) {
  if (a.nodal.empty() == a.trace.empty()) throw Error(ErrorKind::Argument, "give exactly one of --nodal and --trace");
  const fs::path target = a.output.empty() ? dir / "plot.svg" : fs::path(a.output);
  if (!a.nodal.empty()) {
    io::write_file(target, svg::nodal_svg(io::load_nodal(a.nodal, a.singular)));
  } else {
    io::write_file(target, svg::trace_svg(io::load_trace_csv(a.trace)));
  }
  std::cout << target.string() << "\n";
  return kOk;
}

// Inserts key=value lines of a --config file as flags right after the
// subcommand token; flags given on the command line win.
std::vector<std::string> apply_config(const CLI::App& app, std::vector<std::string> args) {
  auto cfg_it = std::find(args.begin(), args.end(), "--config");
  std::string path;
  if (cfg_it != args.end() && cfg_it + 1 != args.end()) {
    path = *(cfg_it + 1);
  } else {
    for (const auto& s : args) {
      if (s.rfind("--config=", 0) == 0) path = s.substr(9);
    }
  }
  if (path.empty()) return args;
  std::size_t sub_pos = args.size();
  const CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && !sub; ++i) {
    for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; })) {
      if (s->get_name() == args[i]) {
        sub = s;
        sub_pos = i;
        break;
      }
    }
  }
  if (!sub) return args;

  auto given = [&](const CLI::Option* opt) {
    for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
      for (const auto& n : opt->get_lnames()) {
        if (args[i] == "--" + n || args[i].rfind("--" + n + "=", 0) == 0) return true;
      }
    }
    return false;
  };
  std::istringstream in(io::read_file(path));
  std::string line;
  std::vector<std::string> inserted;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(ErrorKind::Parse, lineno, "expected key=value in " + path);
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r"), y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt || key == "config") continue;  // keys for other commands
    if (given(opt)) continue;
    inserted.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1, inserted.begin(), inserted.end());
  return args;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parse:
    case ErrorKind::Version:
    case ErrorKind::Data:
    case ErrorKind::Io:
      return kIo;
    default:
      return kPrecondition;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nodallab: sublinear two-phase equation laboratory"};
  app.set_version_flag("--version", std::string(kVersionString));
  app.require_subcommand(1);

  ConstructArgs ca;
  ca.common.jobs = default_jobs();
  auto* construct = app.add_subcommand("construct", "Build the k-fold homogeneous solution");
  add_common(construct, ca.common);
  add_params(construct, ca.params);
  construct->add_option("--k", ca.k, "Wave count (must exceed k_bar)")->required();
  construct->add_option("--arc-nodes", ca.arc_nodes, "Interior nodes per arc")->capture_default_str();
  construct->add_option("--profile-samples", ca.profile_samples, "Profile samples (rounded up to a multiple of k)")
      ->capture_default_str();
  construct->add_option("--scan", ca.scan, "Also tabulate Psi on this many points and list sign changes");
  construct->add_option("--perturb", ca.perturb, "Fault injection: relative profile perturbation");

  AnalyzeArgs aa;
  aa.common.jobs = default_jobs();
  auto* analyze = app.add_subcommand("analyze", "Order, transition exponent, traces and nodal set of a field");
  add_common(analyze, aa.common);
  add_params(analyze, aa.params);
  analyze->add_option("--input", aa.input, "NODALLAB v1 profile or field file");
  analyze->add_option("--field", aa.field, "Catalogue field: linear, saddle, monomial:d, circle:r, constant:c");
  analyze->add_option("--x0", aa.x0, "Centre point (two numbers)")->expected(2)->capture_default_str();
  analyze->add_option("--r-max", aa.r_max, "Largest ladder radius")->capture_default_str();
  analyze->add_option("--radii", aa.radii, "Dyadic ladder length")->capture_default_str();
  analyze->add_option("--grid", aa.grid, "Marching-squares cells per side")->capture_default_str();
  analyze->add_option("--max-degree", aa.max_degree, "Largest harmonic degree searched")->capture_default_str();

  VerifyArgs va;
  va.common.jobs = default_jobs();
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  add_common(verify_cmd, va.common);
  verify_cmd->add_option("--suite", va.config.suites, "Restrict to these suites")
      ->check(CLI::IsMember(verify::suite_names()));
  verify_cmd->add_option("--perturb", va.config.perturb, "Fault injection: relative profile perturbation");
  verify_cmd->add_option("--seed", va.config.seed, "Seed for randomized checks")->capture_default_str();
  verify_cmd->add_option("--arc-nodes", va.config.arc_nodes, "Interior nodes per arc")->capture_default_str();
  verify_cmd->add_option("--grid", va.config.grid, "Marching-squares cells per side")->capture_default_str();

  SweepArgs sa;
  sa.common.jobs = default_jobs();
  auto* sweep = app.add_subcommand("sweep", "Construct over a range of k and tabulate");
  add_common(sweep, sa.common);
  add_params(sweep, sa.params);
  sweep->add_option("--k-min", sa.k_min, "First k")->capture_default_str();
  sweep->add_option("--k-max", sa.k_max, "Last k (an empty range writes only the header)")->capture_default_str();
  sweep->add_option("--arc-nodes", sa.arc_nodes, "Interior nodes per arc")->capture_default_str();
  sweep->add_option("--grid", sa.grid, "Marching-squares cells per side")->capture_default_str();

  PlotArgs pa;
  pa.common.jobs = default_jobs();
  auto* plot = app.add_subcommand("plot", "Render a nodal set or a functional trace as SVG");
  add_common(plot, pa.common);
  plot->add_option("--nodal", pa.nodal, "Segment CSV (x1,y1,x2,y2)");
  plot->add_option("--singular", pa.singular, "Singular-point JSON sidecar");
  plot->add_option("--trace", pa.trace, "Trace CSV (r,value)");
  plot->add_option("--output", pa.output, "SVG path (default <out>/plot.svg)");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = apply_config(app, args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  }
  std::reverse(args.begin(), args.end());
  args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kPrecondition;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const CLI::App* chosen = app.get_subcommands().front();
  const Common& common = chosen == construct ? ca.common
                         : chosen == analyze ? aa.common
                         : chosen == verify_cmd ? va.common
                         : chosen == sweep ? sa.common
                                           : pa.common;
  fs::path dir;
  int code = kOk;
  try {
    dir = prepare(common);
    if (chosen == construct) code = cmd_construct(ca, dir);
    else if (chosen == analyze) code = cmd_analyze(aa, dir);
    else if (chosen == verify_cmd) code = cmd_verify(va, dir);
    else if (chosen == sweep) code = cmd_sweep(sa, dir);
    else code = cmd_plot(pa, dir);
  } catch (const Error& e) {
    code = exit_for(e);
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    if (!dir.empty()) {
      try {
        io::write_file(dir / "error.json", report::dump(report::error_json(e)));
      } catch (...) {
      }
    }
  } catch (const std::exception& e) {
    code = kPrecondition;
    std::cerr << "error: " << e.what() << "\n";
  }
  if (!dir.empty()) {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
      write_run_record(dir, chosen, seconds, code);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      if (code == kOk) code = kIo;
    }
  }
  return code;
}
