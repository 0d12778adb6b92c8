// Command-line front end: exact chain oracles, expansion tables, residue
// profiles, transfer-operator triplets and the pass/fail experiment sweeps.
//
// Exit codes: 0 success / experiment PASS, 2 experiment verdict FAIL,
// 1 error (bad input, violated precondition, I/O).

#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgelab/errors.hpp"
#include "edgelab/expansion.hpp"
#include "edgelab/experiment.hpp"
#include "edgelab/oracle.hpp"
#include "edgelab/resonance.hpp"
#include "edgelab/rpf.hpp"
#include "edgelab/scenario.hpp"
#include "json.hpp"

namespace {

using namespace edgelab;
namespace fs = std::filesystem;

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
  fs::create_directories(dir.empty() ? "." : dir);
  const fs::path path = fs::path(dir.empty() ? "." : dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SpecError("cannot write " + path.string());
  out << body;
  std::cout << "wrote " << path.string() << "\n";
}

PinSet parse_pins(const std::vector<std::string>& kv) {
  PinSet pins;
  for (const std::string& s : kv) {
    const auto pos = s.find(':');
    if (pos == std::string::npos) throw ParameterOutOfRange("pin must be step:state, got " + s);
    pins[std::stoi(s.substr(0, pos))] = std::stoi(s.substr(pos + 1));
  }
  return pins;
}

Scenario scenario_from_config(const std::string& name, const std::string& config_path,
                              std::uint64_t seed) {
  Scenario sc;
  sc.name = name;
  sc.generator = name;
  sc.seed = seed;
  if (name == "even-lattice") sc.regime_tag = "periodic";
  else if (name == "sparse-odd") sc.regime_tag = "sparse-odd";
  else sc.regime_tag = "aperiodic";
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw SpecError("cannot open config file: " + config_path);
    nlohmann::json j;
    in >> j;
    if (j.contains("eps0")) sc.eps0 = j["eps0"].get<double>();
    if (j.contains("states")) sc.states = j["states"].get<int>();
    if (j.contains("K")) sc.value_bound = j["K"].get<int>();
    if (j.contains("c")) sc.c = j["c"].get<double>();
    if (j.contains("ladder")) sc.ladder = j["ladder"].get<std::vector<int>>();
    if (j.contains("generator")) sc.generator = j["generator"].get<std::string>();
  }
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Edgeworth laboratory for integer functionals of finite Markov chains"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, config_path, format = "csv";
  std::vector<std::string> pin_args;
  int order = 1;
  double R = 10.0;
  std::uint64_t seed = 1;
  std::vector<int> ladder;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--spec", spec_path, "chain spec JSON file");
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--format", format, "csv|json|svg");
    cmd->add_option("--pins", pin_args, "pinned coordinates step:state (0-based)");
    cmd->add_option("--order", order, "expansion order r");
    cmd->add_option("--R", R, "drop-rule threshold factor");
    cmd->add_option("--seed", seed, "generator seed");
    cmd->add_option("--ladder", ladder, "horizon ladder");
    cmd->add_option("--config", config_path, "JSON config file");
  };

  auto* c_validate = app.add_subcommand("validate", "ellipticity and mixing report");
  add_common(c_validate);
  auto* c_oracle = app.add_subcommand("oracle", "exact pmf / characteristic function / residue law");
  add_common(c_oracle);
  int residue_m = 0;
  c_oracle->add_option("--residue", residue_m, "also emit the mod-m residue law");
  auto* c_expand = app.add_subcommand("expand", "expansion table and evaluation CSV");
  add_common(c_expand);
  bool drop_enabled = false;
  c_expand->add_flag("--drop", drop_enabled, "enable the M_N >= R ln V_N drop rule");
  auto* c_resonance = app.add_subcommand("resonance", "residue profiles and keep/drop verdicts");
  add_common(c_resonance);
  auto* c_rpf = app.add_subcommand("rpf", "transfer-operator triplets and residuals");
  add_common(c_rpf);
  std::string z_arg = "0.02,0";
  c_rpf->add_option("--z", z_arg, "perturbation parameter re,im");
  auto* c_experiment = app.add_subcommand("experiment", "run a pass/fail sweep");
  add_common(c_experiment);
  std::string exp_id = "llt-order-1", scenario_name = "random-elliptic";
  c_experiment->add_option("--id", exp_id, "experiment id");
  c_experiment->add_option("--scenario", scenario_name,
                           "random-elliptic|even-lattice|sparse-odd");
  auto* c_report = app.add_subcommand("report", "re-emit a saved report JSON");
  add_common(c_report);
  std::string report_in;
  c_report->add_option("--in", report_in, "report JSON path")->required();
  auto* c_gen = app.add_subcommand("gen", "write a scenario instance as a chain spec file");
  add_common(c_gen);
  std::string gen_name = "random-elliptic";
  int gen_n = 64;
  c_gen->add_option("--scenario", gen_name, "scenario generator");
  c_gen->add_option("--N", gen_n, "horizon");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_validate->parsed()) {
      const ChainSpec spec = load_chain_json(spec_path);
      const EllipticityReport rep = validate_chain(spec);
      nlohmann::json j;
      j["C"] = rep.C;
      nlohmann::json ranges = nlohmann::json::array();
      for (const auto& [lo, hi] : rep.density_range) ranges.push_back({lo, hi});
      j["density_range"] = std::move(ranges);
      if (rep.mixing_fit)
        j["mixing_fit"] = {{"C1", rep.mixing_fit->first}, {"delta", rep.mixing_fit->second}};
      else
        j["mixing_fit"] = nullptr;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (c_oracle->parsed()) {
      const ChainSpec spec = load_chain_json(spec_path);
      const PinSet pins = parse_pins(pin_args);
      const SumPmf pmf = sum_pmf(spec, pins);
      if (out_dir.empty())
        std::cout << pmf.to_csv();
      else
        write_file(out_dir, "pmf.csv", pmf.to_csv());
      if (residue_m >= 2) {
        const ResidueLaw law = residue_law(spec, residue_m, pins);
        if (out_dir.empty())
          std::cout << law.to_json() << "\n";
        else
          write_file(out_dir, "residue.json", law.to_json());
      }
      return 0;
    }
    if (c_expand->parsed()) {
      const ChainSpec spec = load_chain_json(spec_path);
      DropRule drop;
      drop.R = R;
      drop.enabled = drop_enabled;
      const GeneralizedExpansion ge = full_expansion(spec, order, drop);
      const SumPmf pmf = sum_pmf(spec);
      std::ostringstream table;
      table << "k,exact,expansion,abs_error\n";
      char buf[128];
      for (long long k = pmf.min_support(); k <= pmf.max_support(); ++k) {
        const double ev = ge.evaluate(k).real();
        std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g\n", k, pmf.at(k), ev,
                      std::abs(pmf.at(k) - ev));
        table << buf;
      }
      if (out_dir.empty()) {
        std::cout << ge.to_json() << "\n";
      } else {
        write_file(out_dir, "expansion.json", ge.to_json());
        write_file(out_dir, "evaluation.csv", table.str());
      }
      return 0;
    }
    if (c_resonance->parsed()) {
      const ChainSpec spec = load_chain_json(spec_path);
      const ProkhorovReport rep = prokhorov_classify(spec, R);
      if (out_dir.empty())
        std::cout << rep.to_json() << "\n";
      else
        write_file(out_dir, "prokhorov.json", rep.to_json());
      for (int m = 2; m <= 2 * spec.value_bound; ++m) {
        const ResidueProfile prof = residue_profile(spec, m, parse_pins(pin_args));
        if (out_dir.empty())
          std::cout << prof.to_csv();
        else
          write_file(out_dir, "residue_profile_m" + std::to_string(m) + ".csv", prof.to_csv());
      }
      return 0;
    }
    if (c_rpf->parsed()) {
      const ChainSpec spec = load_chain_json(spec_path);
      const auto comma = z_arg.find(',');
      const std::complex<double> z(std::stod(z_arg.substr(0, comma)),
                                   comma == std::string::npos ? 0.0
                                                              : std::stod(z_arg.substr(comma + 1)));
      const auto triplets = rpf_triplets(spec, z);
      const auto rep = verify_rpf(spec, z, triplets);
      if (out_dir.empty()) {
        std::cout << rep.to_csv();
      } else {
        nlohmann::json all = nlohmann::json::array();
        for (const auto& t : triplets) all.push_back(nlohmann::json::parse(t.to_json()));
        write_file(out_dir, "triplets.json", all.dump(2));
        write_file(out_dir, "residuals.csv", rep.to_csv());
      }
      std::cout << "mid-horizon residuals: primal " << rep.max_primal_mid << ", dual "
                << rep.max_dual_mid << ", decay ratio " << rep.decay_ratio << "\n";
      return 0;
    }
    if (c_experiment->parsed()) {
      Scenario sc = scenario_from_config(scenario_name, config_path, seed);
      ExperimentParams params;
      params.order = order;
      params.R = R;
      params.seed = static_cast<unsigned>(seed);
      if (!ladder.empty()) params.ladder = ladder;
      const ExperimentReport rep = run_experiment(exp_id, sc, params);
      const std::vector<std::string> formats =
          out_dir.empty() ? std::vector<std::string>{} : std::vector<std::string>{"csv", "json", "svg"};
      if (!out_dir.empty()) emit_report(rep, out_dir, formats);
      std::cout << rep.to_json() << "\n";
      for (const auto& v : rep.verdicts)
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << rep.id << "/" << v.name << " value="
                  << v.value << " threshold=" << v.threshold << " [" << v.anchor << "]\n";
      return rep.all_pass() ? 0 : 2;
    }
    if (c_report->parsed()) {
      std::ifstream in(report_in);
      if (!in) throw SpecError("cannot open report: " + report_in);
      std::ostringstream ss;
      ss << in.rdbuf();
      const std::string problem = validate_report_json(ss.str());
      if (!problem.empty()) throw SpecError("report JSON invalid: " + problem);
      const nlohmann::json j = nlohmann::json::parse(ss.str());
      ExperimentReport rep;
      rep.id = j["id"].get<std::string>();
      rep.scenario_name = j["scenario"].get<std::string>();
      rep.columns = j["columns"].get<std::vector<std::string>>();
      rep.rows = j["rows"].get<std::vector<std::vector<double>>>();
      for (const auto& v : j["verdicts"])
        rep.verdicts.push_back({v["name"].get<std::string>(), v["metric"].get<std::string>(),
                                v["anchor"].get<std::string>(), v["value"].get<double>(),
                                v["threshold"].get<double>(), v["pass"].get<bool>()});
      emit_report(rep, out_dir.empty() ? "." : out_dir, {format});
      return 0;
    }
    if (c_gen->parsed()) {
      Scenario sc = scenario_from_config(gen_name, config_path, seed);
      const ChainSpec spec = generate_scenario(sc, gen_n);
      if (spec_path.empty()) throw ParameterOutOfRange("gen requires --spec output path");
      save_chain_json(spec, spec_path);
      std::cout << "wrote " << spec_path << "\n";
      return 0;
    }
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
