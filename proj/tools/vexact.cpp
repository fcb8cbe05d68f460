// Command-line front end: sampling, witness search, genericity tests,
// scaling benchmarks and preimage dumps.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "vexact/vexact.hpp"

namespace {

using namespace vexact;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitSpec = 2;
constexpr int kExitBudget = 3;

struct RunConfig {
  std::string spec;
  std::int64_t precision = 32;
  std::uint64_t budget = kDefaultStepBudget;
  std::string schedule = "index";
  std::string out;
  std::uint64_t seed = 1;
  std::uint64_t stage = 64;
};

json interval_json(const DyInterval& v) { return {v.lo().to_fraction_string(), v.hi().to_fraction_string()}; }

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw Error("cannot write " + cfg.out);
  f << text;
}

Schedule schedule_of(const RunConfig& cfg) {
  return cfg.schedule == "stage" ? Schedule::ByStage : Schedule::ByIndex;
}

VolterraFunction load_function(const RunConfig& cfg) {
  if (cfg.spec.empty()) throw SpecError("--spec is required");
  return VolterraFunction(parse_class_spec(read_file(cfg.spec)), schedule_of(cfg), cfg.budget);
}

Dyadic grid_point(std::size_t i, std::size_t n) {
  // i/(n-1), exact when n-1 is a power of two
  Rational q(static_cast<unsigned long>(i), static_cast<unsigned long>(n - 1));
  q.canonicalize();
  if (auto d = Dyadic::try_from_rational(q)) return *d;
  return detail::rational_floor(q, 64);
}

int cmd_sample(const RunConfig& cfg, std::size_t grid, std::size_t random_points) {
  if (grid < 2) throw InvalidInput("--grid must be at least 2");
  VolterraFunction F = load_function(cfg);
  std::vector<Dyadic> xs;
  for (std::size_t i = 0; i < grid; ++i) xs.push_back(grid_point(i, grid));
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t i = 0; i < random_points; ++i)
    xs.push_back(Dyadic(mpz_class(std::to_string(rng() >> 11)), -53));
  std::ostringstream os;
  os << "x,f_lo,f_hi,fprime_lo,fprime_hi,verdict\n";
  const Precision p{cfg.precision};
  for (const Dyadic& x : xs) {
    os << x.to_fraction_string() << ',';
    try {
      DyInterval f = F.f_eval(x, p);
      os << f.lo().to_fraction_string() << ',' << f.hi().to_fraction_string() << ',';
    } catch (const BudgetExhausted&) {
      os << ",,,,budget-exhausted\n";
      continue;
    }
    DerivativeValue d = F.f_prime_eval(x, p, cfg.stage);
    if (const auto* v = std::get_if<DyInterval>(&d)) {
      os << v->lo().to_fraction_string() << ',' << v->hi().to_fraction_string() << ",in-U\n";
    } else {
      os << ",,consistent-zero\n";
    }
  }
  emit(cfg, os.str());
  return kExitOk;
}

int cmd_witness(const RunConfig& cfg, const std::string& x_text, unsigned scales, const std::string& target_text) {
  VolterraFunction F = load_function(cfg);
  const Rational x = parse_rational(x_text);
  const Rational target = parse_rational(target_text);
  if (x < 0 || x > 1) throw InvalidInput("--x must lie in [0,1]");
  json rows = json::array();
  bool all_found = true;
  for (unsigned j = 1; j <= scales; ++j) {
    Rational r(mpz_class(1), mpz_class(1) << j);
    RationalInterval I{std::max(Rational(0), Rational(x - r)), std::min(Rational(1), Rational(x + r))};
    json row = {{"j", j}, {"interval", {to_fraction_string(I.lo), to_fraction_string(I.hi)}}};
    WitnessResult w = F.oscillation_witness(I, cfg.stage, target, Precision{cfg.precision});
    if (const auto* wit = std::get_if<Witness>(&w)) {
      row["found"] = true;
      row["y"] = wit->y.to_fraction_string();
      row["fprime"] = interval_json(wit->fprime);
      row["piece"] = wit->piece;
      row["k"] = wit->k;
      row["mirrored"] = wit->mirrored;
      row["pass"] = compare(wit->fprime.hi(), -target) <= 0;
    } else {
      all_found = false;
      row["found"] = false;
      row["stage"] = std::get<NotFoundAtStage>(w).stage;
    }
    rows.push_back(row);
  }
  json out = {{"x", to_fraction_string(x)},
              {"target", to_fraction_string(target)},
              {"stage", cfg.stage},
              {"all_found", all_found},
              {"scales", rows}};
  emit(cfg, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_generic(const RunConfig& cfg, const std::string& strings_path, const std::string& prefix_text,
                std::size_t depth) {
  auto set = parse_string_set_spec(read_file(strings_path));
  BinaryString prefix = BinaryString::parse(prefix_text);
  GenericityEvidence ev = non_genericity_evidence(prefix, *set, cfg.stage, depth);
  json rows = json::array();
  for (const auto& r : ev.density.rows)
    rows.push_back({{"sigma", r.sigma.to_string()},
                    {"extension", r.extension ? json(r.extension->to_string()) : json(nullptr)}});
  json out = {{"prefix", prefix.to_string()},
              {"set", set->name()},
              {"stage", cfg.stage},
              {"depth", depth},
              {"meets", ev.met},
              {"dense_along", rows},
              {"dense", ev.density.dense()},
              {"non_generic_evidence", ev.non_generic_evidence()}};
  emit(cfg, out.dump(2) + "\n");
  return kExitOk;
}

std::vector<std::int64_t> parse_p_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = std::stoll(item, &used);
    if (used != item.size() || v <= 0) throw InvalidInput("bad precision '" + item + "' in --p-list");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidInput("--p-list is empty");
  return out;
}

int cmd_bench(const RunConfig& cfg, const std::string& p_list, const std::string& x_text) {
  if (cfg.spec.empty()) throw SpecError("--spec is required");
  Pi01Class cls = parse_class_spec(read_file(cfg.spec));
  Dyadic x = Dyadic::from_rational(parse_rational(x_text));
  ScalingReport rep = scaling_probe(cls, schedule_of(cfg), x, parse_p_list(p_list), cfg.budget);
  json summary = scaling_summary(rep);
  summary["schedule"] = cfg.schedule;
  summary["x"] = x.to_fraction_string();
  if (cfg.out.empty()) {
    std::cout << timing_csv(rep) << summary.dump(2) << "\n";
  } else {
    emit(cfg, timing_csv(rep));
    std::ofstream(cfg.out + ".summary.json") << summary.dump(2) << "\n";
  }
  bool all_exhausted = !rep.samples.empty();
  for (const auto& t : rep.samples) all_exhausted = all_exhausted && t.budget_exhausted;
  return all_exhausted ? kExitBudget : kExitOk;
}

int cmd_preimage(const RunConfig& cfg, const std::string& a, const std::string& b) {
  VolterraFunction F = load_function(cfg);
  PreimageCover cover = preimage_stage(F.as_comp_func(), parse_rational(a), parse_rational(b), cfg.stage);
  emit(cfg, to_json(cover).dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-real Volterra construction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  app.add_option("--spec", cfg.spec, "class spec (JSON)");
  app.add_option("--precision", cfg.precision, "output precision in bits")->check(CLI::Range(0, 1 << 20));
  app.add_option("--budget", cfg.budget, "generator step budget")->check(CLI::PositiveNumber);
  app.add_option("--schedule", cfg.schedule, "bump weights: index (2^-n) or stage (2^-t(n))")
      ->check(CLI::IsMember({"index", "stage"}));
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--seed", cfg.seed, "seed for random sample points");
  app.add_option("--stage", cfg.stage, "enumeration stage for verdicts")->check(CLI::PositiveNumber);

  std::size_t grid = 5, random_points = 0;
  auto* sample = app.add_subcommand("sample", "f and f' on a uniform grid (CSV)");
  sample->add_option("--grid", grid, "grid points")->check(CLI::Range(2, 1 << 24));
  sample->add_option("--random", random_points, "extra seeded random points");

  std::string x_text = "0", target_text = "1";
  unsigned scales = 10;
  auto* witness = app.add_subcommand("witness", "search y near x with f'(y) <= -target (JSON)");
  witness->add_option("--x", x_text, "point")->required();
  witness->add_option("--scales", scales, "largest j; neighbourhoods of radius 2^-j");
  witness->add_option("--target", target_text, "positive rational");

  std::string strings_path, prefix_text;
  std::size_t depth = 8;
  auto* generic = app.add_subcommand("generic", "finite-stage non-genericity evidence (JSON)");
  generic->add_option("--strings", strings_path, "string set spec (JSON)")->required();
  generic->add_option("--prefix", prefix_text, "binary prefix of the point");
  generic->add_option("--depth", depth, "extension depth");

  std::string p_list = "16,32,64,128", bench_x = "1/2";
  auto* bench = app.add_subcommand("bench", "op-count scaling of f evaluation (CSV + JSON)");
  bench->add_option("--p-list", p_list, "comma separated precisions");
  bench->add_option("--x", bench_x, "dyadic evaluation point");

  std::string a_text, b_text;
  auto* preimage = app.add_subcommand("preimage", "stage-s cover of f^-1((a,b)) (JSON)");
  preimage->add_option("--a", a_text, "lower target end")->required();
  preimage->add_option("--b", b_text, "upper target end")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return cmd_sample(cfg, grid, random_points);
    if (*witness) return cmd_witness(cfg, x_text, scales, target_text);
    if (*generic) return cmd_generic(cfg, strings_path, prefix_text, depth);
    if (*bench) return cmd_bench(cfg, p_list, bench_x);
    if (*preimage) return cmd_preimage(cfg, a_text, b_text);
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return kExitSpec;
  } catch (const BudgetExhausted& e) {
    std::cerr << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
