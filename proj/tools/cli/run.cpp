#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cubeval/acceptance.hpp"
#include "cubeval/arith.hpp"
#include "cubeval/cli.hpp"
#include "cubeval/config.hpp"
#include "cubeval/densities.hpp"
#include "cubeval/dickman.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/expsums.hpp"
#include "cubeval/forms.hpp"
#include "cubeval/grid.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/parallel.hpp"
#include "cubeval/type_one.hpp"

#ifndef CUBEVAL_VERSION_HASH
#define CUBEVAL_VERSION_HASH "unknown"
#endif

namespace cubeval::cli {
namespace {

using json = nlohmann::ordered_json;

json big(u128 v) {
  if (v <= UINT64_MAX) return static_cast<uint64_t>(v);
  return to_string(v);
}

json big(i128 v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return static_cast<int64_t>(v);
  return to_string(v);
}

json optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// CSV writer: header row, comma separated, LF endings, 17-digit doubles.
class Csv {
 public:
  Csv(std::ostream& os, std::initializer_list<std::string> header) : os_(os) {
    bool first = true;
    for (const auto& h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << '\n';
    os_ << std::setprecision(17);
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << v, first = false), ...);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

struct Output {
  json result = json::object();
  json prediction = nullptr;  // {"value": .., "tag": ..}
  json ratio = nullptr;
};

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot write csv file '" + path + "'");
  return f;
}

json config_json(const ExperimentConfig& c) {
  // Every field except the thread count, which must not change the report.
  ExperimentConfig copy = c;
  copy.threads = 0;
  json out = json::object();
  std::istringstream is(copy.serialize());
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    if (key == "threads") continue;
    const std::string value = line.substr(eq + 1);
    if (key == "command" || key == "form" || key == "mode" || key == "level" || key == "csv") {
      out[key] = value;
    } else if (value == "true" || value == "false") {
      out[key] = value == "true";
    } else {
      out[key] = json::parse(value);
    }
  }
  return out;
}

grid::SieveRegion region_of(const ExperimentConfig& c) {
  return {c.x, c.q, c.a1, c.a2, c.coprime};
}

grid::SieveOptions options_of(const ExperimentConfig& c, unsigned threads) {
  grid::SieveOptions o;
  o.bound = c.bound;
  o.kmax = c.kmax;
  o.threads = threads;
  return o;
}

Output cmd_analyze(const ExperimentConfig& c) {
  const auto form = BinaryCubicForm::parse(c.form);
  Output o;
  o.result["form"] = form.to_string();
  o.result["disc"] = big(form.disc());
  o.result["primitive"] = form.is_primitive();
  o.result["irreducible"] = form.disc() != 0 && is_irreducible(form);
  json singular = nullptr;
  if (form.a() != 0 && form.d() != 0 && form.disc() != 0) {
    singular = json::array();
    for (uint64_t p : local::singular_primes(form, c.q)) singular.push_back(p);
  }
  o.result["singular_primes"] = singular;
  const uint64_t limit = std::min<uint64_t>(c.pmax, 100);
  json rows = json::array();
  for (uint64_t p : arith::primes_up_to(limit)) {
    if (form.content() % p == 0) continue;
    const auto data = local::nu_p(form, p, c.q);
    rows.push_back({{"p", p}, {"nu", data.nu}, {"singular", data.singular},
                    {"gamma_p", big(local::gamma_prime_power(form, p, 1))}});
  }
  o.result["local"] = rows;
  return o;
}

Output cmd_gamma(const ExperimentConfig& c) {
  const auto form = BinaryCubicForm::parse(c.form);
  if (c.dmax == 0 || c.dmax > typeone::kMaxModulus) {
    throw InvalidInput("dmax must lie in [1, 10^6]");
  }
  Output o;
  json values = json::array();
  std::ofstream file;
  std::optional<Csv> csv;
  if (!c.csv.empty()) {
    file = open_csv(c.csv);
    csv.emplace(file, std::initializer_list<std::string>{"d", "gamma"});
  }
  for (uint64_t d = 1; d <= c.dmax; ++d) {
    const u128 g = local::gamma_F(form, d).gamma;
    if (csv) csv->row(d, to_string(g));
    if (d <= 1000) values.push_back({{"d", d}, {"gamma", big(g)}});
  }
  o.result["dmax"] = c.dmax;
  o.result["values"] = values;
  return o;
}

Output cmd_expsum(const ExperimentConfig& c) {
  const auto form = BinaryCubicForm::parse(c.form);
  if (c.p == 0) throw InvalidInput("expsum needs --p");
  expsum::ExpSumSpec spec{c.p, c.k, 0, c.g1, c.g2, c.a1, c.a2, c.q, c.restricted};
  const auto roots = local::lift_roots(form, c.p, c.k);
  Output o;
  json rows = json::array();
  std::ofstream file;
  std::optional<Csv> csv;
  if (!c.csv.empty()) {
    file = open_csv(c.csv);
    csv.emplace(file, std::initializer_list<std::string>{"omega", "g1", "g2", "re", "im",
                                                         "branch"});
  }
  const bool brute_ok = static_cast<double>(roots.modulus) <=
                        static_cast<double>(expsum::kBruteForceModulusCap);
  for (const auto& root : roots.affine_roots) {
    spec.omega = root.value;
    spec.g1 = c.g1;
    spec.g2 = c.g2;
    const auto closed = expsum::exp_sum_closed(form, spec);
    json row = {{"omega", root.value},
                {"closed", {closed.value.real(), closed.value.imag()}},
                {"branch", expsum::to_string(closed.branch)},
                {"reduced_by", closed.reduced_by}};
    if (brute_ok) {
      const auto b = expsum::exp_sum_bruteforce(spec);
      row["bruteforce"] = {b.real(), b.imag()};
      row["abs_error"] = std::abs(b - closed.value);
    }
    rows.push_back(row);
    if (csv) {
      const auto g = static_cast<int64_t>(c.gmax);
      for (int64_t g1 = -g; g1 <= g; ++g1) {
        for (int64_t g2 = -g; g2 <= g; ++g2) {
          spec.g1 = g1;
          spec.g2 = g2;
          const auto v = expsum::exp_sum_closed(form, spec);
          csv->row(root.value, g1, g2, v.value.real(), v.value.imag(),
                   expsum::to_string(v.branch));
        }
      }
    }
  }
  o.result["modulus"] = roots.modulus;
  o.result["sums"] = rows;
  return o;
}

Output cmd_dickman(const ExperimentConfig& c, std::ostream& out, bool& csv_to_stdout) {
  const auto table = dickman::build_rho(c.umax, c.step);
  const auto& v = table.values();
  const uint64_t n = static_cast<uint64_t>(std::llround(c.umax / table.step()));
  auto write = [&](std::ostream& os) {
    Csv csv(os, {"u", "rho"});
    for (uint64_t i = 0; i <= n && i < v.size(); ++i) {
      csv.row(static_cast<double>(i) * table.step(), v[i]);
    }
  };
  if (c.csv.empty()) {
    csv_to_stdout = true;
    write(out);
    return {};
  }
  auto file = open_csv(c.csv);
  write(file);
  Output o;
  o.result["umax"] = c.umax;
  o.result["step"] = table.step();
  o.result["rows"] = n + 1;
  o.result["rho_2"] = c.umax >= 2 ? json(table(2.0)) : json(nullptr);
  o.result["delay_residual"] = dickman::delay_residual(table);
  return o;
}

Output cmd_smooth(const ExperimentConfig& c, unsigned threads) {
  const auto form = BinaryCubicForm::parse(c.form);
  const auto region = region_of(c);
  const double y = c.y > 0 ? c.y : std::pow(static_cast<double>(c.x), 1.5);
  const auto opt = options_of(c, threads);
  const auto rep = c.x <= grid::kDenseMaxX
                       ? grid::smooth_count(grid::sieve(form, region, opt), y, 0, threads)
                       : grid::smooth_count_banded(form, region, opt, y);
  Output o;
  o.result = {{"count", rep.count},   {"cells", rep.cells}, {"zero_cells", rep.zero_cells},
              {"x", c.x},             {"y", y},             {"u", rep.u},
              {"rho_3u", optional(rep.rho_3u)}};
  if (rep.prediction) o.prediction = {{"value", *rep.prediction}, {"tag", rep.tag}};
  o.ratio = optional(rep.ratio);
  if (!c.csv.empty()) {
    auto file = open_csv(c.csv);
    Csv csv(file, {"x", "y", "count", "prediction", "ratio"});
    csv.row(c.x, y, rep.count, rep.prediction.value_or(NAN), rep.ratio.value_or(NAN));
  }
  return o;
}

Output cmd_mean(const ExperimentConfig& c, unsigned threads) {
  const auto form = BinaryCubicForm::parse(c.form);
  const auto region = region_of(c);
  const auto h = density::parse_mode(c.mode, c.z);
  const auto opt = options_of(c, threads);
  const auto rep =
      c.x <= grid::kDenseMaxX
          ? grid::mean_multiplicative(grid::sieve(form, region, opt), h, 0, c.pmax, threads)
          : grid::mean_multiplicative_banded(form, region, opt, h, c.pmax);
  Output o;
  o.result = {{"sum", rep.sum},
              {"normalized", rep.normalized},
              {"abs_normalized", std::abs(rep.normalized)},
              {"cells", rep.cells},
              {"zero_cells", rep.zero_cells},
              {"negative_cells", rep.negative_cells},
              {"mode", density::to_string(h)},
              {"z", h.effective_z()},
              {"constant", optional(rep.constant)},
              {"prediction_alt", optional(rep.prediction_alt)},
              {"ratio_alt", optional(rep.ratio_alt)},
              {"max_abs_value", big(rep.max_abs)},
              {"counted_singular_primes", rep.singular_primes}};
  if (rep.prediction) o.prediction = {{"value", *rep.prediction}, {"tag", rep.tag}};
  o.ratio = optional(rep.ratio);
  if (!c.csv.empty()) {
    auto file = open_csv(c.csv);
    Csv csv(file, {"x", "mode", "z", "sum", "prediction", "ratio"});
    csv.row(c.x, density::to_string(h), h.effective_z(), rep.sum,
            rep.prediction.value_or(NAN), rep.ratio.value_or(NAN));
  }
  return o;
}

Output cmd_type1(const ExperimentConfig& c, unsigned threads) {
  const auto form = BinaryCubicForm::parse(c.form);
  const auto rep = typeone::type_one_aggregate(form, c.x, c.dmax, threads);
  Output o;
  o.result = {{"x", c.x},
              {"D", c.dmax},
              {"sum_abs_r", rep.sum_abs_r},
              {"ratio_sqrt", rep.ratio_sqrt},
              {"ratio_linear", rep.ratio_linear},
              {"ratio_combined", rep.ratio_combined}};
  o.prediction = {{"value", static_cast<double>(c.x) * std::sqrt(static_cast<double>(c.dmax)) +
                                static_cast<double>(c.dmax)},
                  {"tag", "type1"}};
  o.ratio = rep.ratio_combined;
  if (!c.csv.empty()) {
    auto file = open_csv(c.csv);
    Csv csv(file, {"d", "N", "gamma", "r_d"});
    for (const auto& row : rep.rows) csv.row(row.d, row.count, to_string(row.gamma), row.remainder);
  }
  return o;
}

Output cmd_sigma(const ExperimentConfig& c, unsigned threads) {
  const auto form = BinaryCubicForm::parse(c.form);
  if (c.pmax > 1'000'000) throw CapacityError("pmax is capped at 10^6");
  const auto h = density::parse_mode(c.mode, c.z);
  if (h.mode != density::Mode::kOmega && h.mode != density::Mode::kBigOmega) {
    throw InvalidInput("sigma supports the omega and Omega modes");
  }
  const auto s = density::sigma_F(form, c.q, c.pmax, threads);
  const auto sh = density::sigma_F_h(form, c.q, h.z, h.mode, c.pmax, threads);
  Output o;
  o.result = {{"pmax", c.pmax},
              {"sigma_F", s.value},
              {"sigma_F_h", sh.value},
              {"product", s.value * sh.value},
              {"mode", density::to_string(h)},
              {"z", h.z},
              {"tail_log_bound", s.tail_log_bound},
              {"excluded_singular", s.excluded_singular}};
  if (!c.csv.empty()) {
    auto file = open_csv(c.csv);
    Csv csv(file, {"p", "nu", "sigma_factor", "sigma_h_factor"});
    for (std::size_t i = 0; i < s.per_prime.size(); ++i) {
      csv.row(s.per_prime[i].p, s.per_prime[i].nu, s.per_prime[i].factor,
              sh.per_prime[i].factor);
    }
  }
  return o;
}

int cmd_verify(const ExperimentConfig& c, unsigned threads, std::ostream& out,
               std::ostream& err) {
  const auto level = acceptance::parse_level(c.level);
  json rows = json::array();
  const auto outcomes = acceptance::run(level, threads, [&](const acceptance::Outcome& o) {
    err << acceptance::format_line(o) << '\n';
  });
  bool ok = true;
  for (const auto& o : outcomes) {
    ok = ok && (o.passed || o.skipped);
    rows.push_back({{"id", o.id},
                    {"title", o.title},
                    {"status", o.skipped ? "skip" : (o.passed ? "pass" : "fail")},
                    {"detail", o.detail}});
  }
  json doc = {{"command", "verify-all"},
              {"level", c.level},
              {"passed", ok},
              {"criteria", rows},
              {"version", CUBEVAL_VERSION_HASH}};
  out << doc.dump(2) << '\n';
  return ok ? 0 : 1;
}

unsigned thread_count(const ExperimentConfig& c) {
  if (c.threads != 0) return c.threads;
  if (const char* env = std::getenv("CUBEVAL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw InvalidInput("CUBEVAL_THREADS must be a nonnegative integer");
    if (v > 0) return static_cast<unsigned>(v);
  }
  return resolve_threads(0);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cubeval: arithmetic of binary cubic form values"};
  app.require_subcommand(1);
  ExperimentConfig flags;
  std::string config_path;
  std::map<std::string, CLI::Option*> set_by_flag;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "discriminant, irreducibility and local data of a form"},
      {"gamma", "gamma_F(d) for d <= dmax"},
      {"expsum", "complete exponential sums at p^k, closed form and direct"},
      {"dickman", "tabulate the Dickman rho function as CSV"},
      {"smooth", "count y-smooth values on [1, x]^2"},
      {"mean", "mean value of a multiplicative function of F"},
      {"type1", "Type I remainders r_d(x) for d <= dmax"},
      {"sigma", "truncated Euler products sigma(F) and sigma(F, h)"},
      {"verify-all", "run the acceptance criteria"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    auto add = [&](const std::string& flag, auto& target, const std::string& what) {
      set_by_flag[flag + "@" + name] = sub->add_option("--" + flag, target, what);
    };
    add("form", flags.form, "coefficients a,b,c,d");
    add("x", flags.x, "side of the square [1, x]^2");
    add("y", flags.y, "smoothness bound (default x^1.5)");
    add("q", flags.q, "progression modulus");
    add("a1", flags.a1, "progression offset for n1");
    add("a2", flags.a2, "progression offset for n2");
    add("z", flags.z, "parameter z of h, |z| <= 1");
    add("mode", flags.mode, "omega, Omega, moebius, liouville, kfree[K]");
    add("pmax", flags.pmax, "largest prime in Euler products");
    add("dmax", flags.dmax, "largest modulus d");
    add("umax", flags.umax, "rho table range");
    add("step", flags.step, "rho grid step, 1/N with N >= 64");
    add("threads", flags.threads, "worker threads (default CUBEVAL_THREADS or all cores)");
    add("csv", flags.csv, "write plottable rows to this file");
    add("bound", flags.bound, "sieve bound B (default sqrt of the largest value)");
    add("kmax", flags.kmax, "prime power depth walked by the sieve");
    add("p", flags.p, "prime for expsum");
    add("k", flags.k, "exponent for expsum");
    add("g1", flags.g1, "first phase coefficient");
    add("g2", flags.g2, "second phase coefficient");
    add("gmax", flags.gmax, "CSV table of sums for |g_i| <= gmax");
    add("level", flags.level, "quick or full");
    add("seed", flags.seed, "seed for sampled checks");
    set_by_flag["coprime@" + name] = sub->add_flag("--coprime", flags.coprime, "gcd(m1, m2) = 1 only");
    set_by_flag["restricted@" + name] =
        sub->add_flag("--restricted", flags.restricted, "drop pairs with p | m1 and p | m2");
    sub->add_option("--config", config_path, "key=value file; flags override it");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw InvalidInput("cannot read config file '" + config_path + "'");
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = ExperimentConfig::parse(ss.str());
    }
    // Flags given on the command line override the file.
    if (config_path.empty()) {
      cfg = flags;
    } else {
      const std::string given = flags.serialize();
      std::string patch;
      for (const auto& [key, opt] : set_by_flag) {
        const auto at = key.find('@');
        if (key.substr(at + 1) != command || opt->count() == 0) continue;
        const std::string prefix = key.substr(0, at) + "=";
        std::istringstream lines(given);
        std::string line;
        while (std::getline(lines, line)) {
          if (line.rfind(prefix, 0) == 0) patch += line + "\n";
        }
      }
      cfg.merge(patch);
    }
    cfg.command = command;
    const unsigned threads = thread_count(cfg);

    if (command == "verify-all") return cmd_verify(cfg, threads, out, err);

    Output o;
    bool csv_only = false;
    if (command == "analyze") o = cmd_analyze(cfg);
    else if (command == "gamma") o = cmd_gamma(cfg);
    else if (command == "expsum") o = cmd_expsum(cfg);
    else if (command == "dickman") o = cmd_dickman(cfg, out, csv_only);
    else if (command == "smooth") o = cmd_smooth(cfg, threads);
    else if (command == "mean") o = cmd_mean(cfg, threads);
    else if (command == "type1") o = cmd_type1(cfg, threads);
    else if (command == "sigma") o = cmd_sigma(cfg, threads);
    if (csv_only) return 0;

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json doc = {{"command", command},
                {"config", config_json(cfg)},
                {"result", o.result},
                {"prediction", o.prediction},
                {"ratio", o.ratio},
                {"runtime", {{"wall_time_s", wall}, {"threads", threads}}},
                {"version", CUBEVAL_VERSION_HASH}};
    out << doc.dump(2) << '\n';
    return 0;
  } catch (const CapacityError& e) {
    err << "cubeval " << command << ": capacity: " << e.what() << '\n';
    return 3;
  } catch (const InvalidInput& e) {
    err << "cubeval " << command << ": invalid input: " << e.what() << '\n';
    return 2;
  } catch (const RangeError& e) {
    err << "cubeval " << command << ": out of range: " << e.what() << '\n';
    return 2;
  } catch (const Unsupported& e) {
    err << "cubeval " << command << ": unsupported: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cubeval::cli
