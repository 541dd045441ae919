#include "rlab/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rlab/corpus.hpp"
#include "rlab/encdec.hpp"
#include "rlab/prg.hpp"
#include "rlab/verify.hpp"

namespace rlab::cli {

namespace {

struct RunConfig {
  uint64_t seed = 0;
  uint64_t trials = 20000;
  std::string mode = "sampled";  // exact | sampled
  int jobs = 1;
  std::string out_path;
  std::string format = "json";  // json | csv
  Params params;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["trials"] = trials;
    j["mode"] = mode;
    j["jobs"] = jobs;
    j["format"] = format;
    j["params"] = nlohmann::json::parse(params.descriptor_json());
    j["version"] = kVersion;
    return j;
  }
};

void apply_params_json(Params& params, const nlohmann::json& j) {
  if (j.contains("r_hs_cap")) params.r_hs_cap = j["r_hs_cap"].get<int>();
  if (j.contains("c_ac0")) params.c_ac0 = j["c_ac0"].get<double>();
  if (j.contains("C_ac0")) params.C_ac0 = j["C_ac0"].get<double>();
  if (j.contains("A_f2")) params.A_f2 = j["A_f2"].get<double>();
  if (j.contains("B_f2")) params.B_f2 = j["B_f2"].get<double>();
  if (j.contains("max_stages")) params.max_stages = j["max_stages"].get<int>();
  if (j.contains("rejection_max_attempts"))
    params.rejection_max_attempts = j["rejection_max_attempts"].get<int>();
}

// Config file first, explicit flags override afterwards (CLI11 applies
// flag values after we load the file in a pre-parse callback).
void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  require(bool(in), "config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("seed")) config.seed = j["seed"].get<uint64_t>();
  if (j.contains("trials")) config.trials = j["trials"].get<uint64_t>();
  if (j.contains("mode")) config.mode = j["mode"].get<std::string>();
  if (j.contains("jobs")) config.jobs = j["jobs"].get<int>();
  if (j.contains("format")) config.format = j["format"].get<std::string>();
  if (j.contains("params")) apply_params_json(config.params, j["params"]);
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out_path.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream file(config.out_path);
  require(bool(file), "cannot open output path " + config.out_path);
  file << text << '\n';
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    // accept 2^-6 style entries
    auto caret = item.find("^");
    if (caret != std::string::npos) {
      double base = std::stod(item.substr(0, caret));
      double expo = std::stod(item.substr(caret + 1));
      out.push_back(std::pow(base, expo));
    } else {
      out.push_back(std::stod(item));
    }
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

// --- generate ----------------------------------------------------------------

int cmd_generate(const RunConfig& config, const std::string& cls, int n, int M, int d,
                 int S, double eps, const std::string& format, std::ostream& out) {
  std::optional<ComposedPrg> prg;
  if (cls == "ac0")
    prg = ac0_prg(n, M, d, eps, config.params);
  else if (cls == "f2")
    prg = f2_prg(n, S, eps, config.params);
  else
    throw CLI::ValidationError("--class must be ac0 or f2");

  // The CLI seed is one 64-bit word; the generator's seed bits are expanded
  // from it deterministically.
  SplitMix64 rng(config.seed);
  BitVec seed = rng.bits(prg->seed_bits());
  BitVec bits = prg->generate(seed);

  nlohmann::json j;
  j["run_config"] = config.to_json();
  j["descriptor"] = nlohmann::json::parse(prg->descriptor_json());
  j["seed_bits"] = prg->seed_bits();
  j["stages_used"] = prg->stages_used(seed);
  j["output_bits"] = bits.to_string();
  j["output_hex"] = bits.to_hex();

  if (!config.out_path.empty()) {
    std::ofstream file(config.out_path + ".json");
    require(bool(file), "cannot open output path");
    file << j.dump(2) << '\n';
    std::ofstream bitfile(config.out_path + ".bits");
    bitfile << (format == "hex" ? bits.to_hex() : bits.to_string()) << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  return 0;
}

// --- verify -------------------------------------------------------------------

struct SuiteOutcome {
  bool pass = true;
  nlohmann::json entries = nlohmann::json::array();

  void add(const std::string& name, bool ok, const nlohmann::json& detail) {
    nlohmann::json e;
    e["check"] = name;
    e["pass"] = ok;
    e["detail"] = detail;
    entries.push_back(e);
    pass = pass && ok;
  }
};

void suite_fooling(const RunConfig& config, SuiteOutcome& outcome) {
  {
    SeededDistribution d = epsbiased(10, 0.25);
    double worst = max_parity_bias_exhaustive(d);
    outcome.add("epsbiased-parity-bias", worst <= 0.25,
                {{"worst", worst}, {"delta", 0.25}});
  }
  {
    SeededDistribution d = kwise(12, 3);
    bool ok = true;
    uint64_t seeds = uint64_t{1} << d.seed_bits;
    SplitMix64 rng = derive_stream(config.seed, 7);
    for (int trial = 0; trial < 32 && ok; ++trial) {
      int a = static_cast<int>(rng.below(12));
      int b = static_cast<int>(rng.below(12));
      int c = static_cast<int>(rng.below(12));
      if (a == b || a == c || b == c) continue;
      uint64_t count[8] = {0};
      for (uint64_t s = 0; s < seeds; ++s) {
        BitVec v = d.generate(BitVec::from_u64(s, d.seed_bits));
        ++count[v.get(a) * 4 + v.get(b) * 2 + v.get(c)];
      }
      for (int pat = 0; pat < 8; ++pat) ok = ok && count[pat] * 8 == seeds;
    }
    outcome.add("kwise-triple-marginals", ok, {{"n", 12}, {"k", 3}});
  }
  {
    SplitMix64 rng = derive_stream(config.seed, 8);
    SeededDistribution d = fool_simple_prg(8, 2, 2, 0.2);
    std::vector<double> spectrum = parity_spectrum(d);
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 10 && ok; ++i) {
      PartialDecisionTree tree = random_poly_tree(rng, 8, 2, 2, 3);
      TruthTable tt = tree_truth_table(tree, 8);
      BiasReport r = measure_bias(tt, "poly-leaf tree", d, BiasMode::ExactSpectral,
                                  0, 0, &spectrum);
      worst = std::max(worst, r.bias);
      ok = r.bias <= 0.2;
    }
    outcome.add("fool-simple-tree-bias", ok, {{"worst", worst}, {"delta", 0.2}});
  }
}

void suite_switching(const RunConfig& config, SuiteOutcome& outcome) {
  SplitMix64 rng = derive_stream(config.seed, 21);
  CnfFamily fam = random_family(rng, 16, 2, 4, 4);
  uint64_t trials = std::max<uint64_t>(1, config.trials);
  for (double p : {1.0 / 64, 1.0 / 256}) {
    for (int t : {3, 4}) {
      SwitchingReport r =
          switching_failure(fam, 2, t, TrueRp{p}, trials, config.seed, config.jobs);
      outcome.add("switching-Rp", r.pass, nlohmann::json::parse(r.to_json()));
    }
  }
  {
    BitstringRestrictionSpace space{16, 6};
    SeededDistribution bits = kwise(space.total_bits(), 40);
    SwitchingReport r = switching_failure(fam, 2, 4, PseudoBits{bits, 6}, trials,
                                          config.seed, config.jobs);
    outcome.add("switching-derandomized", r.pass, nlohmann::json::parse(r.to_json()));
  }
}

void suite_encdec(const RunConfig& config, SuiteOutcome& outcome) {
  SplitMix64 rng = derive_stream(config.seed, 31);
  for (int M : {1, 2}) {
    CnfFamily fam = random_family(rng, 4, 2, 2, M);
    CountingReport report = verify_counting_bound(fam, 2, 2, 1, 4);
    bool ok = report.round_trip && report.injective && report.extends_by_t &&
              report.weight_ratio_exact && report.holds;
    outcome.add("witness-compression-M" + std::to_string(M), ok,
                {{"bad_count", report.bad_count},
                 {"m_achieved_max", report.m_achieved_max},
                 {"weight", report.weight_bad.to_string()},
                 {"bound", report.bound.to_string()}});
  }
}

void suite_circuit(const RunConfig& config, SuiteOutcome& outcome) {
  SplitMix64 rng = derive_stream(config.seed, 41);
  CnfFamily fam = random_family(rng, 4, 2, 2, 2);
  BitstringRestrictionSpace space{4, 1};
  int l = 1;
  for (int t : {1, 2}) {
    BadnessSweep sweep = evaluate_all_inputs(fam, l, t, space);
    bool ok = true;
    uint64_t bound = 1;
    for (int i = 0; i < t + l; ++i) bound *= 16;
    for (size_t idx = 0; idx < sweep.bad.size() && ok; ++idx) {
      Restriction rho =
          restriction_from_bits(space, BitVec::from_u64(idx, space.total_bits()));
      bool reaches = ccdt_reaches(restrict_family(fam, rho), l, t);
      ok = (sweep.bad[idx] != 0) == reaches;
      if (ok && reaches)
        ok = sweep.counts[idx] >= 1 && sweep.counts[idx] <= bound;
    }
    outcome.add("recognizer-biconditional-t" + std::to_string(t), ok,
                {{"traversals", sweep.traversal_total}});
  }
}

int cmd_verify(const RunConfig& config, const std::string& suite, std::ostream& out) {
  SuiteOutcome outcome;
  if (suite == "fooling" || suite == "all") suite_fooling(config, outcome);
  if (suite == "switching" || suite == "all") suite_switching(config, outcome);
  if (suite == "encdec" || suite == "all") suite_encdec(config, outcome);
  if (suite == "circuit" || suite == "all") suite_circuit(config, outcome);
  if (suite == "all") {
    for (const OracleResult& r : run_oracle_suite(config.seed))
      outcome.add("oracle:" + r.id, r.pass, r.detail);
  }
  if (outcome.entries.empty())
    throw CLI::ValidationError("unknown suite: " + suite);

  nlohmann::json j;
  j["run_config"] = config.to_json();
  j["suite"] = suite;
  j["pass"] = outcome.pass;
  j["checks"] = outcome.entries;
  emit(config, config.format == "json" ? j.dump(2) : j.dump(2), out);
  return outcome.pass ? 0 : 1;
}

// --- sweep --------------------------------------------------------------------

int cmd_sweep(const RunConfig& config, int n, int M, int k, int Q, int l,
              const std::vector<int>& ts, const std::vector<double>& ps,
              std::ostream& out) {
  SplitMix64 rng = derive_stream(config.seed, 51);
  CnfFamily fam = random_family(rng, n, k, Q, M);
  std::ostringstream csv;
  csv << "# " << config.to_json().dump() << '\n';
  csv << SwitchingReport::csv_header() << '\n';
  bool all_pass = true;
  for (double p : ps) {
    for (int t : ts) {
      SwitchingReport r =
          switching_failure(fam, l, t, TrueRp{p}, config.trials, config.seed,
                            config.jobs);
      all_pass = all_pass && r.pass;
      csv << r.to_csv_row() << '\n';
    }
  }
  emit(config, csv.str(), out);
  return all_pass ? 0 : 1;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"restriction laboratory: pseudorandom restrictions, common "
               "decision trees, and composed generators"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_file;
  std::string params_inline;
  app.add_option("--config", config_file, "JSON config file (flags override)");
  app.add_option("--seed", config.seed, "master seed");
  app.add_option("--trials", config.trials, "Monte Carlo trials");
  app.add_option("--mode", config.mode, "exact|sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  app.add_option("--jobs", config.jobs, "worker threads");
  app.add_option("--out", config.out_path, "output path");
  app.add_option("--format", config.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--params", params_inline, "inline JSON for constants");

  auto* gen = app.add_subcommand("generate", "emit one output of a composed generator");
  std::string gen_class;
  int gen_n = 12, gen_M = 8, gen_d = 2, gen_S = 8;
  double gen_eps = 0.1;
  std::string gen_format = "bits";
  gen->add_option("class", gen_class, "ac0|f2")->required();
  gen->add_option("--n", gen_n, "variable count");
  gen->add_option("--M", gen_M, "circuit size (ac0)");
  gen->add_option("--d", gen_d, "circuit depth (ac0)");
  gen->add_option("--S", gen_S, "sparsity (f2)");
  gen->add_option("--eps", gen_eps, "target fooling error");
  gen->add_option("--bits-format", gen_format, "bits|hex");

  auto* ver = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all";
  ver->add_option("suite", suite, "fooling|switching|encdec|circuit|all");

  auto* sw = app.add_subcommand("sweep", "failure-rate sweep as CSV");
  int sw_n = 16, sw_M = 4, sw_k = 2, sw_Q = 4, sw_l = 2;
  std::string sw_ts = "3,4,5", sw_ps = "2^-6,2^-8";
  sw->add_option("--n", sw_n, "variable count");
  sw->add_option("--M", sw_M, "family size");
  sw->add_option("--k", sw_k, "clause width");
  sw->add_option("--Q", sw_Q, "clauses per member");
  sw->add_option("--l", sw_l, "per-member depth budget");
  sw->add_option("--t", sw_ts, "comma list of depth thresholds");
  sw->add_option("--p", sw_ps, "comma list of star rates (2^-6 accepted)");

  std::vector<const char*> argv;
  argv.push_back("rlab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!config_file.empty()) {
      RunConfig file_config;
      load_config_file(file_config, config_file);
      // flags override: reapply any explicitly passed values
      RunConfig merged = file_config;
      if (app.count("--seed")) merged.seed = config.seed;
      if (app.count("--trials")) merged.trials = config.trials;
      if (app.count("--mode")) merged.mode = config.mode;
      if (app.count("--jobs")) merged.jobs = config.jobs;
      if (app.count("--out")) merged.out_path = config.out_path;
      if (app.count("--format")) merged.format = config.format;
      config = merged;
    }
    if (!params_inline.empty())
      apply_params_json(config.params, nlohmann::json::parse(params_inline));
    require(config.trials >= 1, "trials must be >= 1");
    require(config.jobs >= 1, "jobs must be >= 1");

    if (gen->parsed())
      return cmd_generate(config, gen_class, gen_n, gen_M, gen_d, gen_S, gen_eps,
                          gen_format, out);
    if (ver->parsed()) return cmd_verify(config, suite, out);
    if (sw->parsed())
      return cmd_sweep(config, sw_n, sw_M, sw_k, sw_Q, sw_l, parse_int_list(sw_ts),
                       parse_double_list(sw_ps), out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad JSON: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace rlab::cli
