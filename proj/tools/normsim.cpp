#include "normsim/algorithms.hpp"
#include "normsim/json_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace normsim;

namespace {

enum Exit { kOk = 0, kFailure = 1, kExhausted = 2, kPrecondition = 3, kInput = 4 };

struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Config {
  std::uint64_t seed = 1;
  std::uint64_t cap = 0;  // 0: default_dense_cap()
  std::uint64_t shots = 1000;
  std::optional<std::uint64_t> comb_M;
  std::optional<double> resolution;
  std::string out;
  std::string format = "csv";

  std::uint64_t dense_cap() const { return cap ? cap : default_dense_cap(); }
};

BlackBoxPtr make_group(const std::string& type, const std::string& params) {
  json j{{"type", type}};
  std::vector<std::uint64_t> v;
  std::stringstream ss(params);
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("bad group parameter '" + tok + "'");
    }
  }
  if (type == "zn_star" && v.size() == 1) {
    j["N"] = v[0];
  } else if (type == "ec" && v.size() == 3) {
    j["p"] = v[0];
    j["a"] = v[1];
    j["b"] = v[2];
  } else {
    throw InputError("group must be 'zn_star N' or 'ec p,a,b'");
  }
  try {
    return blackbox_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

// Splits on commas outside parentheses, so "(0,1),(4,2)" is two items.
std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string matrix_text(const IntMatrix& M) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    out += i ? ", [" : "[";
    for (Eigen::Index j = 0; j < M.cols(); ++j) out += (j ? ", " : "") + to_string(M(i, j));
    out += "]";
  }
  return out + "]";
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

OrderOptions order_options(const Config& cfg) {
  OrderOptions o;
  o.seed = cfg.seed;
  o.cap = cfg.dense_cap();
  o.comb_M = cfg.comb_M;
  if (cfg.resolution) {
    o.dirichlet.method = DirichletOptions::Method::Grid;
    o.dirichlet.grid_points = static_cast<std::size_t>(std::ceil(1 / *cfg.resolution));
  }
  return o;
}

json no_calls() { return {{"algorithm", 0}, {"simulator", 0}}; }

void emit(const Config& cfg, const json& log, const std::string& text) {
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) throw InputError("cannot write " + cfg.out);
    f << log.dump(2) << "\n";
  }
  if (cfg.format == "json")
    std::cout << log.dump(2) << "\n";
  else
    std::cout << text;
}

json run_log(const char* name, const Config& cfg, json inputs) {
  json log;
  log["algorithm"] = name;
  log["seed"] = cfg.seed;
  log["inputs"] = std::move(inputs);
  return log;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalizer circuit simulator and algorithm suite"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--seed", cfg.seed, "Seed for every stochastic step");
  app.add_option("--cap", cfg.cap, "Dense dimension cap (overrides NORMSIM_CAP)")->check(CLI::PositiveNumber);
  app.add_option("--shots", cfg.shots, "Samples for run");
  app.add_option("--comb-M", cfg.comb_M, "Comb half-length M for order finding")->check(CLI::PositiveNumber);
  app.add_option("--resolution", cfg.resolution, "Grid resolution for the Dirichlet sampler")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "Also write the JSON run log here");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  std::function<void()> action;

  auto* f = app.add_subcommand("factor", "Nontrivial factor of N");
  std::uint64_t N = 0;
  int attempts = 10;
  f->add_option("N", N)->required();
  f->add_option("--attempts", attempts)->check(CLI::NonNegativeNumber);
  f->callback([&] {
    action = [&] {
      FactorOptions o;
      o.attempts = attempts;
      o.seed = cfg.seed;
      o.order = order_options(cfg);
      auto run = factor(N, o);
      emit(cfg, run.log, std::to_string(run.d) + "\n");
    };
  });

  auto* d = app.add_subcommand("dlog", "s with a^s = b mod p");
  std::uint64_t p = 0, a = 0, b = 0;
  int reps = 10;
  d->add_option("p", p)->required();
  d->add_option("a", a)->required();
  d->add_option("b", b)->required();
  d->add_option("--repetitions", reps)->check(CLI::PositiveNumber);
  d->callback([&] {
    action = [&] {
      DlogOptions o{reps, cfg.seed, cfg.dense_cap()};
      auto run = discrete_log(p, a, b, o);
      emit(cfg, run.log, to_string(run.s) + "\n");
    };
  });

  auto* e = app.add_subcommand("ecdlog", "s with s.a = b on y^2 = x^3 + Ax + B over F_p");
  std::string curve, pa, pb;
  e->add_option("curve", curve, "p,A,B")->required();
  e->add_option("a", pa)->required();
  e->add_option("b", pb)->required();
  e->callback([&] {
    action = [&] {
      auto E = std::dynamic_pointer_cast<const EllipticCurveGroup>(make_group("ec", curve));
      EcdlogOptions o;
      o.seed = cfg.seed;
      o.cap = cfg.dense_cap();
      o.order = order_options(cfg);
      auto run = ec_discrete_log(*E, pa, pb, o);
      emit(cfg, run.log, to_string(run.s) + "\n");
    };
  });

  auto* o = app.add_subcommand("order", "Order of an element by hybrid order finding");
  std::string gtype, gparams, elem, engine = "dirichlet";
  std::optional<std::uint64_t> bound;
  o->add_option("type", gtype, "zn_star or ec")->required();
  o->add_option("params", gparams, "N or p,A,B")->required();
  o->add_option("element", elem)->required();
  o->add_option("--bound", bound, "Upper bound on the order")->check(CLI::PositiveNumber);
  o->add_option("--engine", engine)->check(CLI::IsMember({"dirichlet", "dense"}));
  o->callback([&] {
    action = [&] {
      auto B = make_group(gtype, gparams);
      OrderOptions oo = order_options(cfg);
      if (bound) oo.order_bound = Integer(*bound);
      if (engine == "dense") oo.engine = OrderOptions::Engine::Dense;
      auto run = find_order(*B, elem, oo);
      emit(cfg, run.log, to_string(run.r) + "\n");
    };
  });

  auto* dc = app.add_subcommand("decompose", "Independent generators of <gens>");
  std::string gens;
  dc->add_option("type", gtype, "zn_star or ec")->required();
  dc->add_option("params", gparams, "N or p,A,B")->required();
  dc->add_option("--gens", gens, "Comma-separated generators; sampled when absent");
  dc->callback([&] {
    action = [&] {
      auto B = make_group(gtype, gparams);
      std::vector<std::string> alpha = split_list(gens);
      const bool sampled = alpha.empty();
      if (sampled) {
        std::mt19937_64 rng(cfg.seed);
        alpha = bb_sample_generators(*B, rng);
      }
      DecomposeOptions opt;
      opt.seed = cfg.seed;
      opt.cap = cfg.dense_cap();
      opt.order = order_options(cfg);
      auto run = decompose_group(B, alpha, opt);
      run.log["inputs"]["generators"] = sampled ? "sampled" : "given";
      const auto& T = run.table;
      std::vector<std::string> c;
      for (Eigen::Index i = 0; i < T.c.size(); ++i) c.push_back(to_string(T.c(i)));
      std::string text = T.type_string() + "\nalpha: " + join(T.alpha) + "\nbeta: " + join(T.beta) + "\nc: " +
                         join(c) + "\nA: " + matrix_text(T.A) + "\nB: " + matrix_text(T.B) + "\n";
      emit(cfg, run.log, text);
    };
  });

  auto* h = app.add_subcommand("hsp", "Recover a subgroup hidden behind a random coset labelling");
  std::string group, hidden;
  h->add_option("group", group, "e.g. \"Z4 x Z2\"")->required();
  h->add_option("--hidden", hidden, "Generators of the planted subgroup, e.g. \"(2,0),(0,1)\"");
  h->callback([&] {
    action = [&] {
      ElementaryGroup G;
      std::vector<RatVector> H;
      try {
        G = ElementaryGroup::parse(group);
        for (const auto& s : split_list(hidden)) H.push_back(parse_element(s, G).coords);
      } catch (const std::invalid_argument& ex) {
        throw InputError(ex.what());
      }
      // close <H>, then give each coset a shuffled label
      std::vector<std::string> sub{format_tuple(identity(G).coords)};
      std::set<std::string> seen(sub.begin(), sub.end());
      std::vector<RatVector> members{identity(G).coords};
      for (std::size_t i = 0; i < members.size(); ++i)
        for (const auto& g : H) {
          RatVector x = reduce(members[i] + g, G).coords;
          if (seen.insert(format_tuple(x)).second) members.push_back(x);
        }
      auto all = enumerate(G);
      std::vector<std::size_t> ids(all.size());
      for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
      std::mt19937_64 rng(cfg.seed);
      std::shuffle(ids.begin(), ids.end(), rng);
      auto labels = std::make_shared<std::map<std::string, std::string>>();
      std::size_t next = 0;
      for (const auto& g : all) {
        if (labels->count(format_tuple(g.coords))) continue;
        std::string name = "c" + std::to_string(ids[next++]);
        for (const auto& m : members) (*labels)[format_tuple(reduce(g.coords + m, G).coords)] = name;
      }
      KernelOptions ko;
      ko.seed = cfg.seed;
      ko.cap = cfg.dense_cap();
      auto run = solve_hsp({G, [labels](const RatVector& g) { return labels->at(format_tuple(g)); }}, ko);
      run.log["inputs"]["hidden"] = hidden;
      std::string text;
      for (Eigen::Index j = 0; j < run.generators.cols(); ++j)
        text += format_tuple(run.generators.col(j).cast<Rational>()) + "\n";
      if (text.empty()) text = "trivial\n";
      emit(cfg, run.log, text);
    };
  });

  auto* r = app.add_subcommand("run", "Sample a circuit file");
  std::string file;
  r->add_option("file", file)->required();
  r->callback([&] {
    action = [&] {
      CircuitRun cr;
      try {
        cr = parse_circuit(read_file(file));
      } catch (const CircuitParseError& ex) {
        throw InputError(ex.what());
      } catch (const CircuitError& ex) {
        throw InputError(ex.what());
      }
      json log = run_log("run", cfg, {{"file", file}, {"shots", cfg.shots}});
      log["circuit"] = to_json(cr);
      std::optional<CallMeter> meter;
      if (cr.circuit.initial.blackbox) meter.emplace(*cr.circuit.initial.blackbox);
      OutcomeSampler sampler(cr, cfg.dense_cap());
      log["engine"] = sampler.engine();
      std::mt19937_64 rng(cfg.seed);
      std::map<std::string, std::pair<std::uint64_t, double>> hist;
      for (std::uint64_t i = 0; i < cfg.shots; ++i) {
        Outcome out = sampler.sample(rng);
        auto& row = hist[outcome_label(out)];
        if (row.first++ == 0) row.second = sampler.probability(out);
      }
      std::string csv = "outcome,count,probability\n";
      json rows = json::array();
      for (const auto& [label, row] : hist) {
        std::ostringstream line;
        line.precision(12);
        line << '"' << label << "\"," << row.first << ',' << row.second << '\n';
        csv += line.str();
        rows.push_back({{"outcome", label}, {"count", row.first}, {"probability", row.second}});
      }
      log["samples"] = rows;
      log["postprocessing"] = json::array();
      log["oracle_calls"] = meter ? meter->to_json() : no_calls();
      log["result"] = {{"distinct_outcomes", hist.size()}};
      emit(cfg, log, csv);
    };
  });

  auto* db = app.add_subcommand("deblackbox", "Rewrite black-box gates into normal form");
  db->add_option("file", file)->required();
  db->callback([&] {
    action = [&] {
      CircuitRun cr;
      try {
        cr = parse_circuit(read_file(file));
      } catch (const CircuitParseError& ex) {
        throw InputError(ex.what());
      } catch (const CircuitError& ex) {
        throw InputError(ex.what());
      }
      std::optional<CallMeter> meter;
      if (cr.circuit.initial.blackbox) meter.emplace(*cr.circuit.initial.blackbox);
      DeblackboxResult res;
      try {
        res = deblackbox_circuit(cr);
      } catch (const CircuitError& ex) {
        throw InputError(ex.what());
      }
      validate_circuit(res.circuit);
      CircuitRun out{res.circuit, res.input, {}};
      json circuit = to_json(out);
      json log = run_log("deblackbox", cfg, {{"file", file}});
      log["circuit"] = to_json(cr);
      log["engine"] = "none";
      log["postprocessing"] = res.provenance;
      log["oracle_calls"] = meter ? meter->to_json() : no_calls();
      log["result"] = {{"circuit", circuit}};
      emit(cfg, log, circuit.dump(2) + "\n");
    };
  });

  auto* cm = app.add_subcommand("check-modexp", "Is (m, x) -> (m, a^m x) a normalizer gate on Z_M x B?");
  std::uint64_t M = 0;
  cm->add_option("type", gtype, "zn_star or ec")->required();
  cm->add_option("params", gparams, "N or p,A,B")->required();
  cm->add_option("element", elem)->required();
  cm->add_option("M", M)->required();
  cm->callback([&] {
    action = [&] {
      auto B = make_group(gtype, gparams);
      if (!B->is_element(elem)) throw PreconditionError("'" + elem + "' is not an element of " + B->name());
      CallMeter meter(*B);
      auto chk = check_modexp_normalizable(Integer(M), *B, elem);
      json log = run_log("check-modexp", cfg, {{"blackbox", to_json(*B)}, {"a", elem}, {"M", M}});
      log["engine"] = "none";
      log["postprocessing"] = json::array({{{"order", to_json(chk.order)}}});
      log["oracle_calls"] = meter.to_json();
      json result{{"normalizable", chk.normalizable}, {"order", to_json(chk.order)}};
      std::string text = chk.normalizable ? "true\n" : "false\n";
      if (chk.rep) {
        result["group"] = chk.group.str();
        result["matrix"] = to_json(chk.rep->A);
        text += chk.group.str() + "\n" + matrix_text(to_integer(chk.rep->A)) + "\n";
      }
      log["result"] = result;
      emit(cfg, log, text);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kInput;
  }
  try {
    action();
    return kOk;
  } catch (const AttemptsExhausted& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExhausted;
  } catch (const PreconditionError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kPrecondition;
  } catch (const InputError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kFailure;
  }
}
