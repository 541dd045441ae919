#include "rlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rlab/corpus.hpp"
#include "rlab/encdec.hpp"
#include "rlab/prg.hpp"

namespace rlab {

namespace {

// Per-trial derived streams keep results independent of the worker count.
template <typename Fn>
uint64_t parallel_failure_count(uint64_t trials, uint64_t master_seed, int jobs,
                                Fn&& trial_fails) {
  jobs = std::max(1, jobs);
  if (jobs == 1) {
    uint64_t failures = 0;
    for (uint64_t i = 0; i < trials; ++i) {
      SplitMix64 rng = derive_stream(master_seed, i);
      if (trial_fails(rng)) ++failures;
    }
    return failures;
  }
  std::vector<uint64_t> partial(jobs, 0);
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      uint64_t local = 0;
      for (uint64_t i = w; i < trials; i += jobs) {
        SplitMix64 rng = derive_stream(master_seed, i);
        if (trial_fails(rng)) ++local;
      }
      partial[w] = local;
    });
  }
  for (auto& th : workers) th.join();
  uint64_t failures = 0;
  for (uint64_t x : partial) failures += x;
  return failures;
}

double ratio(uint64_t a, uint64_t b) {
  return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

// --- reports ---------------------------------------------------------------------

std::string BiasReport::to_json() const {
  nlohmann::json j;
  j["function"] = function_desc;
  j["distribution"] = dist_desc;
  j["mode"] = exact ? "exact" : "sampled";
  if (!exact) {
    j["trials"] = trials;
    j["ci99_half_width"] = ci_half_width;
  }
  j["uniform_expectation"] = uniform_expectation;
  j["prg_expectation"] = prg_expectation;
  j["bias"] = bias;
  return j.dump();
}

std::string BiasReport::csv_header() {
  return "function,distribution,mode,trials,uniform_expectation,prg_expectation,"
         "bias,ci99_half_width";
}

std::string BiasReport::to_csv_row() const {
  std::ostringstream out;
  out << '"' << function_desc << "\",\"" << dist_desc << "\","
      << (exact ? "exact" : "sampled") << ',' << trials << ','
      << uniform_expectation << ',' << prg_expectation << ',' << bias << ','
      << ci_half_width;
  return out.str();
}

double SwitchingReport::recompute_bound() const {
  int ceil_tl = l >= 1 ? (t + l - 1) / l : t;
  double base = std::pow(static_cast<double>(M_), static_cast<double>(ceil_tl)) *
                std::pow(32.0 * p_ * k_, static_cast<double>(t));
  if (!derandomized_) return base;
  return std::pow(16.0, static_cast<double>(t + l)) * base + delta_;
}

std::string SwitchingReport::to_json() const {
  nlohmann::json j;
  j["family"] = family_desc;
  j["source"] = source_desc;
  j["l"] = l;
  j["t"] = t;
  j["mode"] = exact ? "exact" : "sampled";
  j["trials"] = trials;
  j["failures"] = failures;
  j["rate"] = rate;
  j["bound"] = bound;
  j["bound_formula"] = bound_formula;
  j["bound_recomputed"] = recompute_bound();
  j["sigma"] = sigma;
  j["vacuous"] = vacuous;
  j["pass"] = pass;
  return j.dump();
}

std::string SwitchingReport::csv_header() {
  return "family,source,l,t,mode,trials,failures,rate,bound,sigma,vacuous,pass";
}

std::string SwitchingReport::to_csv_row() const {
  std::ostringstream out;
  out << '"' << family_desc << "\",\"" << source_desc << "\"," << l << ',' << t << ','
      << (exact ? "exact" : "sampled") << ',' << trials << ',' << failures << ','
      << rate << ',' << bound << ',' << sigma << ',' << (vacuous ? 1 : 0) << ','
      << (pass ? 1 : 0);
  return out.str();
}

// --- bias measurement --------------------------------------------------------------

std::vector<double> parity_spectrum(const SeededDistribution& d) {
  require(d.n_out <= 20, "parity_spectrum: n too large");
  size_t total = size_t{1} << d.n_out;
  std::vector<double> out(total);
  if (d.exact_spectrum_available()) {
    for (size_t mask = 0; mask < total; ++mask)
      out[mask] = d.parity_bias_signed(BitVec::from_u64(mask, d.n_out));
    return out;
  }
  // fall back to a seed sweep: spectrum = WHT of the output pmf
  require(d.seed_bits <= 24, "parity_spectrum: seed space too large to sweep");
  std::vector<double> pmf(total, 0.0);
  uint64_t seeds = uint64_t{1} << d.seed_bits;
  for (uint64_t s = 0; s < seeds; ++s)
    pmf[d.generate(BitVec::from_u64(s, d.seed_bits)).low_u64() &
        (total - 1)] += 1.0 / static_cast<double>(seeds);
  walsh_hadamard(pmf);
  return pmf;
}

BiasReport measure_bias(const TruthTable& f, const std::string& function_desc,
                        const SeededDistribution& d, BiasMode mode, uint64_t trials,
                        uint64_t master_seed, const std::vector<double>* spectrum) {
  require(f.n() == d.n_out, "measure_bias: dimension mismatch");
  BiasReport report;
  report.function_desc = function_desc;
  report.dist_desc = d.describe();

  double uniform = 0.0;
  for (uint64_t x = 0; x < f.size(); ++x) uniform += f.get(x);
  uniform /= static_cast<double>(f.size());
  report.uniform_expectation = uniform;

  if (mode == BiasMode::ExactAuto)
    mode = d.seed_bits <= 24 ? BiasMode::ExactSeeds : BiasMode::ExactSpectral;

  switch (mode) {
    case BiasMode::ExactSeeds: {
      require(d.seed_bits <= 24, "measure_bias: seed space too large to sweep");
      uint64_t seeds = uint64_t{1} << d.seed_bits;
      uint64_t ones = 0;
      for (uint64_t s = 0; s < seeds; ++s) {
        BitVec out = d.generate(BitVec::from_u64(s, d.seed_bits));
        uint64_t idx = 0;
        for (int i = 0; i < d.n_out; ++i) idx |= uint64_t{out.get(i)} << i;
        ones += f.get(idx);
      }
      report.exact = true;
      report.prg_expectation = ratio(ones, seeds);
      break;
    }
    case BiasMode::ExactSpectral: {
      // E f(D) = sum_S fhat(S) * bias_D(S)
      std::vector<double> table(f.size());
      for (uint64_t x = 0; x < f.size(); ++x) table[x] = f.get(x);
      walsh_hadamard(table);  // table[S] = 2^n * fhat(S)
      std::vector<double> local;
      const std::vector<double>* spec = spectrum;
      if (!spec) {
        local = parity_spectrum(d);
        spec = &local;
      }
      double acc = 0.0;
      for (size_t mask = 0; mask < f.size(); ++mask)
        if (table[mask] != 0.0 && (*spec)[mask] != 0.0)
          acc += table[mask] / static_cast<double>(f.size()) * (*spec)[mask];
      report.exact = true;
      report.prg_expectation = acc;
      break;
    }
    case BiasMode::Sampled: {
      require(trials >= 1, "measure_bias: sampled mode needs trials >= 1");
      uint64_t ones = 0;
      for (uint64_t i = 0; i < trials; ++i) {
        SplitMix64 rng = derive_stream(master_seed, i);
        BitVec out = d.generate(rng.bits(d.seed_bits));
        uint64_t idx = 0;
        for (int i2 = 0; i2 < d.n_out; ++i2) idx |= uint64_t{out.get(i2)} << i2;
        ones += f.get(idx);
      }
      report.exact = false;
      report.trials = trials;
      report.prg_expectation = ratio(ones, trials);
      report.ci_half_width =
          2.576 * std::sqrt(0.25 / static_cast<double>(trials));
      break;
    }
    case BiasMode::ExactAuto:
      break;  // unreachable
  }
  report.bias = std::abs(report.prg_expectation - report.uniform_expectation);
  return report;
}

double max_parity_bias_exhaustive(const SeededDistribution& d, int seed_cap_bits) {
  require(d.n_out <= 20, "max_parity_bias_exhaustive: n too large");
  require(d.seed_bits <= seed_cap_bits,
          "max_parity_bias_exhaustive: seed space too large");
  size_t total = size_t{1} << d.n_out;
  std::vector<double> pmf(total, 0.0);
  uint64_t seeds = uint64_t{1} << d.seed_bits;
  for (uint64_t s = 0; s < seeds; ++s) {
    BitVec out = d.generate(BitVec::from_u64(s, d.seed_bits));
    uint64_t idx = 0;
    for (int i = 0; i < d.n_out; ++i) idx |= uint64_t{out.get(i)} << i;
    pmf[idx] += 1.0 / static_cast<double>(seeds);
  }
  walsh_hadamard(pmf);  // pmf[S] = E[(-1)^<S, out>]
  double worst = 0.0;
  for (size_t mask = 1; mask < total; ++mask)
    worst = std::max(worst, std::abs(pmf[mask]));
  return worst;
}

// --- switching failure -------------------------------------------------------------

namespace {

std::string source_description(const RestrictionSource& source) {
  if (std::holds_alternative<TrueRp>(source)) {
    std::ostringstream out;
    out << "R_p(p=" << std::get<TrueRp>(source).p << ")";
    return out.str();
  }
  const PseudoBits& pb = std::get<PseudoBits>(source);
  std::ostringstream out;
  out << "bits(q=" << pb.q << "," << pb.dist.describe() << ")";
  return out.str();
}

}  // namespace

SwitchingReport switching_failure(const CnfFamily& fam, int l, int t,
                                  const RestrictionSource& source, uint64_t trials,
                                  uint64_t master_seed, int jobs) {
  require(trials >= 1, "switching_failure: trials >= 1");
  SwitchingReport report;
  {
    std::ostringstream out;
    out << "family(M=" << fam.M() << ",n=" << fam.n << ",k=" << fam.max_width()
        << ")";
    report.family_desc = out.str();
  }
  report.source_desc = source_description(source);
  report.l = l;
  report.t = t;
  report.trials = trials;
  report.M_ = static_cast<int>(fam.M());
  report.k_ = fam.max_width();

  auto trial_fails = [&](SplitMix64& rng) {
    Restriction rho;
    if (std::holds_alternative<TrueRp>(source)) {
      rho = sample_Rp(fam.n, std::get<TrueRp>(source).p, rng);
    } else {
      const PseudoBits& pb = std::get<PseudoBits>(source);
      BitstringRestrictionSpace space{fam.n, pb.q};
      require(pb.dist.n_out == space.total_bits(),
              "switching_failure: distribution does not match the bit space");
      rho = restriction_from_bits(space, pb.dist.generate(rng.bits(pb.dist.seed_bits)));
    }
    return ccdt_reaches(restrict_family(fam, rho), l, t);
  };
  report.failures = parallel_failure_count(trials, master_seed, jobs, trial_fails);
  report.rate = ratio(report.failures, trials);

  int ceil_tl = l >= 1 ? (t + l - 1) / l : t;
  if (std::holds_alternative<TrueRp>(source)) {
    report.p_ = std::get<TrueRp>(source).p;
    report.derandomized_ = false;
    std::ostringstream formula;
    formula << "M^ceil(t/l)*(32pk)^t = " << report.M_ << "^" << ceil_tl << "*(32*"
            << report.p_ << "*" << report.k_ << ")^" << t;
    report.bound_formula = formula.str();
  } else {
    report.p_ = std::ldexp(1.0, -std::get<PseudoBits>(source).q);
    report.delta_ = 0.0;  // independence order treated as exact at this scale
    report.derandomized_ = true;
    std::ostringstream formula;
    formula << "16^(t+l)*M^ceil(t/l)*(32pk)^t + delta = 16^" << (t + l) << "*"
            << report.M_ << "^" << ceil_tl << "*(32*" << report.p_ << "*"
            << report.k_ << ")^" << t << " + " << report.delta_;
    report.bound_formula = formula.str();
  }
  report.bound = report.recompute_bound();
  report.sigma = std::sqrt(std::max(report.rate * (1.0 - report.rate), 1e-12) /
                           static_cast<double>(trials));
  report.vacuous = report.bound >= 1.0;
  report.pass = report.vacuous || report.rate <= report.bound + 3.0 * report.sigma;
  return report;
}

SwitchingReport single_switching_failure(const Cnf& f, int t, double p,
                                         uint64_t trials, uint64_t master_seed,
                                         int jobs) {
  require(trials >= 1, "single_switching_failure: trials >= 1");
  SwitchingReport report;
  {
    std::ostringstream out;
    out << "cnf(n=" << f.n << ",k=" << f.k << ",Q=" << f.Q() << ")";
    report.family_desc = out.str();
  }
  {
    std::ostringstream out;
    out << "R_p(p=" << p << ")";
    report.source_desc = out.str();
  }
  report.l = 0;
  report.t = t;
  report.trials = trials;
  report.M_ = 1;
  report.k_ = f.k;
  report.p_ = p;

  auto trial_fails = [&](SplitMix64& rng) {
    Restriction rho = sample_Rp(f.n, p, rng);
    return cdt_depth_exceeds(restrict_cnf(f, rho), t);
  };
  report.failures = parallel_failure_count(trials, master_seed, jobs, trial_fails);
  report.rate = ratio(report.failures, trials);
  report.bound = std::pow(5.0 * p * f.k, static_cast<double>(t));
  std::ostringstream formula;
  formula << "(5pk)^t = (5*" << p << "*" << f.k << ")^" << t;
  report.bound_formula = formula.str();
  report.sigma = std::sqrt(std::max(report.rate * (1.0 - report.rate), 1e-12) /
                           static_cast<double>(trials));
  report.vacuous = report.bound >= 1.0;
  report.pass = report.vacuous || report.rate <= report.bound + 3.0 * report.sigma;
  return report;
}

double binomial_tail_at_least(int w, int k, double p) {
  if (k <= 0) return 1.0;
  if (k > w) return 0.0;
  double total = 0.0;
  for (int j = k; j <= w; ++j) {
    double c = 1.0;
    for (int i = 0; i < j; ++i) c = c * (w - i) / (i + 1);
    total += c * std::pow(p, j) * std::pow(1.0 - p, w - j);
  }
  return total;
}

PolyFailureReport naive_poly_failure(const F2Polynomial& poly, double p, int k,
                                     double eps, uint64_t trials,
                                     uint64_t master_seed) {
  require(trials >= 1, "naive_poly_failure: trials >= 1");
  PolyFailureReport report;
  {
    std::ostringstream out;
    out << "poly(n=" << poly.n << ",S=" << poly.S() << ",deg=" << poly.degree() << ")";
    report.poly_desc = out.str();
  }
  report.p = p;
  report.k = k;
  report.eps = eps;
  report.trials = trials;

  // Width threshold: smallest w with
  //   S * Pr[> w of a widest monomial survives the half-rate phase] <= eps/2.
  int max_width = poly.degree();
  int w = 0;
  for (; w <= max_width; ++w) {
    double tail = binomial_tail_at_least(max_width, w + 1, 0.5);
    if (static_cast<double>(poly.S()) * tail <= eps / 2.0) break;
  }
  report.w = w;

  uint64_t failures = 0;
  for (uint64_t i = 0; i < trials; ++i) {
    SplitMix64 rng = derive_stream(master_seed, i);
    F2Polynomial stage1 = restrict_poly(poly, sample_Rp(poly.n, 0.5, rng));
    F2Polynomial stage2 = restrict_poly(stage1, sample_Rp(poly.n, p, rng));
    if (stage2.degree() > k) ++failures;
  }
  report.failures = failures;
  report.rate = ratio(failures, trials);

  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (w - i) / (i + 1);
  if (k > w) c = 0.0;
  report.bound = eps / 2.0 + static_cast<double>(poly.S()) * c * std::pow(p, k);
  report.vacuous = report.bound >= 1.0;
  double sigma = std::sqrt(std::max(report.rate * (1.0 - report.rate), 1e-12) /
                           static_cast<double>(trials));
  report.pass = report.vacuous || report.rate <= report.bound + 3.0 * sigma;
  return report;
}

std::string PolyFailureReport::to_json() const {
  nlohmann::json j;
  j["poly"] = poly_desc;
  j["p"] = p;
  j["k"] = k;
  j["eps"] = eps;
  j["w"] = w;
  j["trials"] = trials;
  j["failures"] = failures;
  j["rate"] = rate;
  j["bound"] = bound;
  j["vacuous"] = vacuous;
  j["pass"] = pass;
  return j.dump();
}

// --- oracle suite -------------------------------------------------------------------

namespace {

OracleResult oracle(const std::string& id, bool pass, const std::string& detail = "") {
  return {id, pass, detail};
}

}  // namespace

std::vector<OracleResult> run_oracle_suite(uint64_t master_seed) {
  std::vector<OracleResult> results;

  {  // canonical tree computes the formula
    SplitMix64 rng = derive_stream(master_seed, 101);
    bool ok = true;
    for (int i = 0; i < 40 && ok; ++i) {
      int n = 4 + static_cast<int>(rng.below(7));
      Cnf f = random_kcnf(rng, n, 2 + static_cast<int>(rng.below(2)), 1 + static_cast<int>(rng.below(6)));
      auto tree = cdt_build(f, n);
      ok = tree.has_value() && truth_table(f) == tree_truth_table(*tree, n);
    }
    results.push_back(oracle("cdt-computes-formula", ok));
  }

  {  // depth probe agrees with materialization
    SplitMix64 rng = derive_stream(master_seed, 102);
    bool ok = true;
    for (int i = 0; i < 40 && ok; ++i) {
      int n = 4 + static_cast<int>(rng.below(5));
      Cnf f = random_kcnf(rng, n, 2, 1 + static_cast<int>(rng.below(5)));
      auto tree = cdt_build(f, n);
      int depth = tree ? tree->depth() : -1;
      for (int l = 0; l <= n && ok; ++l)
        ok = cdt_depth_exceeds(f, l) == (depth > l);
    }
    results.push_back(oracle("cdt-depth-probe", ok));
  }

  {  // traversal existence matches the common-tree recursion, exhaustively
    SplitMix64 rng = derive_stream(master_seed, 103);
    bool ok = true;
    for (int inst = 0; inst < 4 && ok; ++inst) {
      CnfFamily fam = random_family(rng, 4, 2, 2, 1 + static_cast<int>(rng.below(2)));
      int l = 1, t = 2;
      uint64_t total = 81;  // 3^4
      for (uint64_t code = 0; code < total && ok; ++code) {
        uint64_t c = code;
        Restriction rho(4);
        for (int i = 0; i < 4; ++i) {
          int digit = static_cast<int>(c % 3);
          c /= 3;
          if (digit < 2) rho.set(i, digit == 1 ? Trit::One : Trit::Zero);
        }
        bool reaches = ccdt_reaches(restrict_family(fam, rho), l, t);
        bool found = false;
        TraversalStream stream(fam, l, t);
        while (auto p = stream.next()) {
          if (traversal_occurs(fam, rho, *p, l, t)) {
            found = true;
            break;
          }
        }
        ok = (reaches == found);
      }
    }
    results.push_back(oracle("traversal-occurrence-vs-recursion", ok));
  }

  {  // recognizer circuit biconditional on a small instance
    SplitMix64 rng = derive_stream(master_seed, 104);
    CnfFamily fam = random_family(rng, 4, 2, 2, 2);
    BitstringRestrictionSpace space{4, 1};
    int l = 1, t = 2;
    BadnessSweep sweep = evaluate_all_inputs(fam, l, t, space);
    bool ok = true;
    for (size_t idx = 0; idx < sweep.bad.size() && ok; ++idx) {
      Restriction rho = restriction_from_bits(
          space, BitVec::from_u64(idx, space.total_bits()));
      bool reaches = ccdt_reaches(restrict_family(fam, rho), l, t);
      ok = (sweep.bad[idx] != 0) == reaches;
    }
    results.push_back(oracle("recognizer-biconditional", ok));
  }

  {  // encode/decode round trip on an exhaustive instance
    SplitMix64 rng = derive_stream(master_seed, 105);
    CnfFamily fam = random_family(rng, 4, 2, 2, 2);
    CountingReport report = verify_counting_bound(fam, 2, 2, 1, 4);
    results.push_back(oracle("witness-compression-roundtrip",
                             report.round_trip && report.injective &&
                                 report.extends_by_t && report.holds));
  }

  {  // exact k-wise marginals
    SeededDistribution d = kwise(8, 2);
    bool ok = true;
    uint64_t seeds = uint64_t{1} << d.seed_bits;
    for (int a = 0; a < 8 && ok; ++a)
      for (int b = a + 1; b < 8 && ok; ++b) {
        int count[4] = {0, 0, 0, 0};
        for (uint64_t s = 0; s < seeds; ++s) {
          BitVec out = d.generate(BitVec::from_u64(s, d.seed_bits));
          ++count[out.get(a) * 2 + out.get(b)];
        }
        for (int pat = 0; pat < 4; ++pat)
          ok = ok && count[pat] * 4 == static_cast<int>(seeds);
      }
    results.push_back(oracle("kwise-pair-marginals", ok));
  }

  {  // biased-distribution meter
    SeededDistribution d = epsbiased(8, 0.25);
    double worst = max_parity_bias_exhaustive(d);
    results.push_back(oracle("epsbiased-max-parity", worst <= 0.25));
  }

  {  // bitstring-to-restriction law
    BitstringRestrictionSpace space{3, 2};
    uint64_t stars[3] = {0, 0, 0};
    uint64_t total = uint64_t{1} << space.total_bits();
    for (uint64_t x = 0; x < total; ++x) {
      Restriction rho = restriction_from_bits(space, BitVec::from_u64(x, space.total_bits()));
      for (int i = 0; i < 3; ++i)
        if (rho.is_star(i)) ++stars[i];
    }
    bool ok = true;
    for (int i = 0; i < 3; ++i) ok = ok && stars[i] * 4 == total;
    results.push_back(oracle("restriction-bitstring-law", ok));
  }

  return results;
}

}  // namespace rlab
