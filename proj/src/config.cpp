#include "pump/config.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "pump/groundstate.hpp"
#include "pump/splitting.hpp"
#include "pump/verify.hpp"

namespace pump {

const char* kToolVersion = "pump 0.1.0";

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
  throw ConfigError(pointer, msg);
}

const json& need(const json& j, const std::string& key, const std::string& pointer) {
  if (!j.contains(key)) fail(pointer + "/" + key, "missing required field");
  return j.at(key);
}

SymmetryGroup parse_group(const json& j, const std::string& pointer) {
  std::string kind = need(j, "kind", pointer).get<std::string>();
  if (kind == "U1") return SymmetryGroup::u1();
  if (kind == "Zn") {
    int n = need(j, "n", pointer).get<int>();
    if (n < 1) fail(pointer + "/n", "cyclic order must be >= 1");
    return SymmetryGroup::cyclic(n);
  }
  if (kind == "product") {
    std::vector<SymmetryGroup> parts;
    for (const auto& p : need(j, "factors", pointer))
      parts.push_back(parse_group(p, pointer + "/factors"));
    return SymmetryGroup::product(parts);
  }
  fail(pointer + "/kind", "expected U1, Zn or product");
}

GeometryPtr parse_geometry(const json& j, const std::string& pointer) {
  int sites = need(j, "sites", pointer).get<int>();
  if (sites < 2) fail(pointer + "/sites", "need at least 2 sites");
  int local_dim = j.value("local_dim", 3);
  // default to an even-aligned first site so pump pairings park boundary
  // charge at the chain ends
  int first = j.value("first", -((sites / 2 + 1) / 2 * 2));
  std::string boundary = j.value("boundary", "ring");
  if (boundary != "ring" && boundary != "open")
    fail(pointer + "/boundary", "expected ring or open");
  return ChainGeometry::uniform(first, sites, local_dim,
                                boundary == "ring" ? ChainGeometry::Boundary::Ring
                                                   : ChainGeometry::Boundary::Open);
}

DualCharge parse_charge(const json& j, const SymmetryGroup& g, const std::string& pointer) {
  std::vector<long> comps;
  if (j.is_number_integer()) {
    comps.assign(g.num_factors(), 0);
    comps[0] = j.get<long>();
  } else if (j.is_array()) {
    comps = j.get<std::vector<long>>();
    if (static_cast<int>(comps.size()) != g.num_factors())
      fail(pointer, "charge component count must match the group factors");
  } else {
    fail(pointer, "expected integer or array of integers");
  }
  return g.charge(comps);
}

// Built-in symmetric dressing generator: pair hop + diagonal bias at a site.
Interaction builtin_dress_generator(const LoopSpec& loop, int site) {
  const ChainGeometry& geom = *loop.geom;
  int j = site + 1 <= geom.last_site() ? site + 1 : site - 1;
  int a = std::min(site, j), b = std::max(site, j);
  long d = static_cast<long>(geom.local_dim_at(a)) * geom.local_dim_at(b);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(d, d);
  for (long q = 0; q < d; ++q) g(q, q) = 0.25 * std::cos(static_cast<double>(q));
  if (d == 9) {
    g(1 * 3 + 2, 0) = 1.0;
    g(0, 1 * 3 + 2) = 1.0;
  }
  Interaction gen;
  gen.add_term(Support({a, b}), g);
  return gen.symmetrized(loop.rep, geom).compacted();
}

LoopSpec parse_loop(const json& j, const SymmetryGroup& group, GeometryPtr geom,
                    const std::string& pointer) {
  std::string type = need(j, "type", pointer).get<std::string>();
  if (type == "example_pump") {
    DualCharge h = parse_charge(need(j, "h", pointer), group, pointer + "/h");
    return example_pump(group, h, geom);
  }
  if (type == "example_pump_multiple") {
    DualCharge h = parse_charge(need(j, "h", pointer), group, pointer + "/h");
    int m = need(j, "multiple", pointer).get<int>();
    return example_pump_multiple(group, h, m, geom);
  }
  if (type == "constant") {
    DualCharge h = parse_charge(j.value("rep_h", json(1)), group, pointer);
    LoopSpec base = example_pump(group, h, geom);
    return constant_loop(geom, base.rep, base.basepoint_levels);
  }
  if (type == "concat") {
    LoopSpec first = parse_loop(need(j, "first", pointer), group, geom, pointer + "/first");
    LoopSpec second = parse_loop(need(j, "second", pointer), group, geom, pointer + "/second");
    return concat(second, first);  // runs `first` first
  }
  if (type == "time_reverse") {
    return time_reverse(parse_loop(need(j, "of", pointer), group, geom, pointer + "/of"));
  }
  if (type == "stack") {
    LoopSpec first = parse_loop(need(j, "first", pointer), group, geom, pointer + "/first");
    LoopSpec second = parse_loop(need(j, "second", pointer), group, geom, pointer + "/second");
    return stack(first, second);
  }
  if (type == "reparametrize") {
    LoopSpec of = parse_loop(need(j, "of", pointer), group, geom, pointer + "/of");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : need(j, "knots", pointer)) {
      if (!k.is_array() || k.size() != 2) fail(pointer + "/knots", "knots are [s, j(s)] pairs");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return reparametrize(of, knots);
  }
  if (type == "dress") {
    LoopSpec of = parse_loop(need(j, "of", pointer), group, geom, pointer + "/of");
    double strength = need(j, "strength", pointer).get<double>();
    int site = j.value("site", 0);
    return dress(of, builtin_dress_generator(of, site), strength);
  }
  fail(pointer + "/type", "unknown loop constructor: " + type);
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.task = j.value("task", "index");
  cfg.seed = j.value("seed", 1u);
  if (cfg.task == "verify") {
    cfg.suite = j.value("suite", "core");
    cfg.out_path = j.value("out", "");
    return cfg;
  }
  cfg.group = parse_group(need(j, "group", ""), "/group");
  cfg.geom = parse_geometry(need(j, "geometry", ""), "/geometry");
  cfg.loop = parse_loop(need(j, "loop", ""), cfg.group, cfg.geom, "/loop");

  if (j.contains("evolution")) {
    const json& e = j.at("evolution");
    std::string integ = e.value("integrator", "auto");
    if (integ == "auto") cfg.evolve.integrator = Integrator::Auto;
    else if (integ == "krylov") cfg.evolve.integrator = Integrator::Krylov;
    else if (integ == "dense") cfg.evolve.integrator = Integrator::DensePiecewise;
    else if (integ == "rk4") cfg.evolve.integrator = Integrator::RK4;
    else fail("/evolution/integrator", "expected auto, krylov, dense or rk4");
    cfg.evolve.max_step = e.value("max_step", cfg.evolve.max_step);
    cfg.evolve.unitarity_tol = e.value("unitarity_tol", cfg.evolve.unitarity_tol);
    cfg.evolve.dense_threshold = e.value("dense_threshold", cfg.evolve.dense_threshold);
  }
  if (j.contains("index")) {
    const json& i = j.at("index");
    cfg.index.cut = i.value("cut", 0);
    if (i.contains("window")) cfg.index.window = i.at("window").get<int>();
    std::string m = i.value("method", "both");
    if (m == "phase") cfg.index.method = ChargeMethod::Phase;
    else if (m == "u1-charge") cfg.index.method = ChargeMethod::U1Charge;
    else if (m == "both") cfg.index.method = ChargeMethod::Both;
    else fail("/index/method", "expected phase, u1-charge or both");
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    std::string fam = s.value("family", "dress");
    if (fam == "dress") cfg.sweep_family = DeformationFamily::Dress;
    else if (fam == "reparametrize") cfg.sweep_family = DeformationFamily::Reparametrize;
    else fail("/sweep/family", "expected dress or reparametrize");
    cfg.sweep_strengths = s.value("strengths", std::vector<double>{0.05, 0.1, 0.2, 0.4});
    cfg.sweep_generator = builtin_dress_generator(cfg.loop, s.value("site", 0));
  }
  if (j.contains("split")) {
    cfg.split_edge = j.at("split").value("edge", 0);
    cfg.split_samples = j.at("split").value("samples", 16);
  }
  if (j.contains("gap")) {
    cfg.gap_sizes = j.at("gap").value("sizes", std::vector<int>{4, 6, 8});
    cfg.gap_num_disorder = j.at("gap").value("num_disorder", 20);
    cfg.gap_w_fnorm = j.at("gap").value("w_fnorm", 0.05);
  }
  cfg.out_path = j.value("out", "");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("/", "cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("/", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

std::string config_hash(const nlohmann::json& j) {
  std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

nlohmann::json index_report_json(const IndexReport& rep) {
  nlohmann::json out;
  out["index"]["components"] = rep.charge.components();
  out["index"]["group"] = rep.charge.group().to_string();
  out["residuals"]["phase"] = rep.phase_residual;
  out["residuals"]["u1_charge"] = rep.charge_residual;
  out["residuals"]["min_unimodularity"] = rep.min_unimodularity;
  out["residuals"]["window_purity_defect"] = rep.window_purity_defect;
  out["closure"]["fidelity"] = rep.closure_fidelity;
  out["closure"]["bulk_distance"] = rep.closure_bulk_distance;
  out["closure"]["pass"] = rep.closure_pass;
  out["method"] = rep.method;
  out["window_halfwidth"] = rep.window_halfwidth;
  out["total_charge_drift"] = rep.total_charge_drift;
  out["runtime_s"] = rep.runtime_s;
  return out;
}

nlohmann::json run_experiment(const ExperimentConfig& cfg) {
  nlohmann::json report;
  report["tool"] = kToolVersion;
  report["config_hash"] = config_hash(cfg.raw);
  report["task"] = cfg.task;
  auto tic = std::chrono::steady_clock::now();

  if (cfg.task == "verify") {
    VerifyResult res = run_suite(cfg.suite, cfg.seed);
    report["suite"] = res.suite;
    report["all_pass"] = res.all_pass;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : res.rows)
      rows.push_back({{"test", r.test},
                      {"expected", r.expected},
                      {"measured", r.measured},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass}});
    report["rows"] = rows;
  } else if (cfg.task == "index") {
    report["report"] = index_report_json(pump_index(cfg.loop, cfg.index, cfg.evolve));
  } else if (cfg.task == "sweep") {
    SweepResult sweep = stability_sweep(cfg.loop, cfg.sweep_family, cfg.sweep_strengths,
                                        cfg.sweep_generator, cfg.index, cfg.evolve);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : sweep.rows) {
      nlohmann::json r = index_report_json(row.report);
      r["strength"] = row.strength;
      rows.push_back(r);
    }
    report["rows"] = rows;
    report["largest_unchanged"] = sweep.largest_unchanged;
  } else if (cfg.task == "split") {
    LoopSpec open = open_shadow(cfg.loop);
    auto [loop, sr] = split_single_edge(open, cfg.split_edge, cfg.split_samples, cfg.evolve);
    report["report"]["ok"] = sr.ok;
    report["report"]["charge_left"] = sr.charge_left.components();
    report["report"]["charge_right"] = sr.charge_right.components();
    report["report"]["max_entropy_after"] = sr.max_entropy_after;
    report["report"]["closure_fidelity"] = sr.closure_fidelity;
    report["report"]["closure_bulk_distance"] = sr.closure_bulk_distance;
    report["report"]["entropy_before"] = sr.entropy_before;
    report["report"]["entropy_after"] = sr.entropy_after;
    report["report"]["left_generator_sup"] = sr.left_generator_sup;
    report["report"]["right_generator_sup"] = sr.right_generator_sup;
  } else if (cfg.task == "gap") {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g;
    FFunction f = FFunction::standard();
    nlohmann::json rows = nlohmann::json::array();
    for (int L : cfg.gap_sizes) {
      auto geom = ChainGeometry::uniform(-L / 2, L, cfg.geom->local_dim_pos(0),
                                         ChainGeometry::Boundary::Open);
      std::vector<int> levels(L, 0);
      Interaction fint = onsite_gap_hamiltonian(*geom, levels);
      GapReport g0 = finite_gap(fint, *geom);
      nlohmann::json row;
      row["L"] = L;
      row["gap_unperturbed"] = g0.gap;
      double min_gap = g0.gap;
      OnsiteRep rep = OnsiteRep::uniform(cfg.group, cfg.loop.rep.charges(0), L);
      for (int c = 0; c < cfg.gap_num_disorder; ++c) {
        Interaction w;
        for (int i = geom->first_site(); i < geom->last_site(); ++i) {
          long d = static_cast<long>(geom->local_dim_at(i)) * geom->local_dim_at(i + 1);
          Eigen::MatrixXcd m(d, d);
          for (long p = 0; p < d; ++p)
            for (long q = 0; q < d; ++q) m(p, q) = std::complex<double>(g(rng), g(rng));
          Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
          std::vector<int> pos{geom->position(i), geom->position(i + 1)};
          w.add_term(Support({i, i + 1}), symmetrize_matrix(herm, rep, pos));
        }
        double n = f_norm(w, f);
        if (n > 0) w = w * (cfg.gap_w_fnorm / n);
        GapReport gr = finite_gap(fint + w, *geom);
        min_gap = std::min(min_gap, gr.gap);
      }
      row["min_gap_disordered"] = min_gap;
      rows.push_back(row);
    }
    report["rows"] = rows;
  } else {
    throw ConfigError("/task", "unknown task: " + cfg.task);
  }

  report["runtime_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path);
    out << report.dump(2) << "\n";
  }
  return report;
}

}  // namespace pump
