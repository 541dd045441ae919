#include "rlab/prg.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

namespace rlab {

int Params::r_hs(double log2_size, int d, double delta) const {
  double raw = std::pow(log2_size, static_cast<double>(d)) * std::log2(1.0 / delta);
  if (!(raw < static_cast<double>(r_hs_cap))) return r_hs_cap;
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

std::string Params::descriptor_json() const {
  nlohmann::json j;
  j["r_hs_cap"] = r_hs_cap;
  j["c_ac0"] = c_ac0;
  j["C_ac0"] = C_ac0;
  j["A_f2"] = A_f2;
  j["B_f2"] = B_f2;
  j["max_stages"] = max_stages;
  j["rejection_max_attempts"] = rejection_max_attempts;
  return j.dump();
}

StarSampler stars_kwise(int n, int q, int r) {
  require(n >= 1 && q >= 1 && r >= 1, "stars_kwise: n, q, r >= 1");
  StarSampler s;
  s.n = n;
  s.p = std::ldexp(1.0, -q);
  BitstringRestrictionSpace space{n, q};
  SeededDistribution grid = kwise(n * q, std::min(r, n * q));
  s.seed_bits = grid.seed_bits;
  std::ostringstream desc;
  desc << "stars_kwise(n=" << n << ",q=" << q << ",r=" << std::min(r, n * q) << ")";
  s.guarantee = desc.str();
  s.gen = [space, grid = std::move(grid)](const BitVec& seed) {
    return stars_from_bits(space, grid.generate(seed));
  };
  return s;
}

namespace {

// Deterministic per-attempt reseeding for rejection sampling inside a fixed
// seed budget: the attempt seeds are derived from the caller's seed block.
BitVec derived_seed(const BitVec& block, int attempt, int bits) {
  SplitMix64 rng(block.hash() ^ (0xa0761d6478bd642full * (attempt + 1)));
  return rng.bits(bits);
}

}  // namespace

StarSampler condition_min_stars(const StarSampler& base, double threshold,
                                int max_attempts) {
  StarSampler s = base;
  s.min_size = static_cast<int>(std::ceil(threshold - 1e-12));
  std::ostringstream desc;
  desc << base.guarantee << " | >= " << threshold << " stars";
  s.guarantee = desc.str();
  s.gen = [base, threshold, max_attempts](const BitVec& seed) {
    if (static_cast<double>(base.n) < threshold)
      throw Error("condition_min_stars: threshold above n");
    for (int a = 0; a < max_attempts; ++a) {
      BitVec sub = a == 0 ? seed : derived_seed(seed, a, base.seed_bits);
      std::vector<int> live = base.gen(sub);
      if (static_cast<double>(live.size()) >= threshold) return live;
    }
    throw Error("condition_min_stars: rejection attempts exhausted");
  };
  return s;
}

// --- composed generator --------------------------------------------------------

ComposedPrg::ComposedPrg(int n, double p, StarsFactory stars, FillFactory fill,
                         int max_stages, std::string target, std::string notes)
    : n_(n), p_(p), stars_(std::move(stars)), fill_(std::move(fill)),
      max_stages_(max_stages), target_(std::move(target)), notes_(std::move(notes)) {
  require(n_ >= 1, "ComposedPrg: n >= 1");
  require(max_stages_ >= 1, "ComposedPrg: needs at least one stage");
  // Worst-case layout: every stage sampler instantiated at full n (smaller
  // live sets consume a prefix of their block).
  seed_bits_ = 0;
  for (int s = 0; s < max_stages_; ++s) {
    StarSampler sampler = stars_(n_);
    SeededDistribution filler = fill_(n_);
    StageRecord rec;
    rec.live_before = n_;
    rec.stars_seed_bits = sampler.seed_bits;
    rec.fill_seed_bits = filler.seed_bits;
    rec.stars_desc = sampler.guarantee;
    rec.fill_desc = filler.describe();
    plan_.push_back(rec);
    seed_bits_ += sampler.seed_bits + filler.seed_bits;
  }
  seed_bits_ += fill_(n_).seed_bits;  // final residual fill
}

BitVec ComposedPrg::run(const BitVec& seed, int* stages_out) const {
  require(static_cast<int>(seed.size()) == seed_bits_, "ComposedPrg: seed size");
  BitVec out(n_);
  std::vector<int> live(n_);
  for (int i = 0; i < n_; ++i) live[i] = i;
  size_t off = 0;
  int stages = 0;
  for (int s = 0; s < max_stages_ && !live.empty(); ++s) {
    StarSampler sampler = stars_(static_cast<int>(live.size()));
    SeededDistribution filler = fill_(static_cast<int>(live.size()));
    require(sampler.seed_bits <= plan_[s].stars_seed_bits &&
                filler.seed_bits <= plan_[s].fill_seed_bits,
            "ComposedPrg: stage block overflow");
    BitVec stars_seed = seed.slice(off, sampler.seed_bits);
    BitVec fill_seed = seed.slice(off + plan_[s].stars_seed_bits, filler.seed_bits);
    off += plan_[s].stars_seed_bits + plan_[s].fill_seed_bits;
    std::vector<int> local = sampler.gen(stars_seed);
    BitVec values = filler.generate(fill_seed);
    std::vector<int> remaining;
    std::vector<bool> pinned(live.size(), false);
    for (int idx : local) {
      out.set(live[idx], values.get(idx));
      pinned[idx] = true;
    }
    for (size_t i = 0; i < live.size(); ++i)
      if (!pinned[i]) remaining.push_back(live[i]);
    live = std::move(remaining);
    ++stages;
  }
  if (!live.empty()) {
    SeededDistribution filler = fill_(static_cast<int>(live.size()));
    BitVec values = filler.generate(seed.slice(off, filler.seed_bits));
    for (size_t i = 0; i < live.size(); ++i) out.set(live[i], values.get(i));
    ++stages;
  }
  if (stages_out) *stages_out = stages;
  return out;
}

BitVec ComposedPrg::generate(const BitVec& seed) const { return run(seed, nullptr); }

int ComposedPrg::stages_used(const BitVec& seed) const {
  int stages = 0;
  run(seed, &stages);
  return stages;
}

SeededDistribution ComposedPrg::as_distribution() const {
  SeededDistribution d;
  d.kind = SeededDistribution::Kind::Composed;
  d.n_out = n_;
  d.seed_bits = seed_bits_;
  d.description = "composed(" + target_ + ")";
  auto self = std::make_shared<ComposedPrg>(*this);
  d.custom = [self](const BitVec& seed) { return self->generate(seed); };
  return d;
}

std::string ComposedPrg::descriptor_json() const {
  nlohmann::json j;
  j["target"] = target_;
  j["n"] = n_;
  j["seed_bits"] = seed_bits_;
  j["stage_rate_p"] = p_;
  j["max_stages"] = max_stages_;
  j["stage_bound_with_final_fill"] = max_stages_ + 1;
  if (!notes_.empty()) j["notes"] = notes_;
  for (const StageRecord& rec : plan_) {
    nlohmann::json s;
    s["stars_seed_bits"] = rec.stars_seed_bits;
    s["fill_seed_bits"] = rec.fill_seed_bits;
    s["stars"] = rec.stars_desc;
    s["fill"] = rec.fill_desc;
    j["stages"].push_back(s);
  }
  return j.dump();
}

// --- simple-class filler ---------------------------------------------------------

namespace {

// log2 of the conditioned bias target: delta' = delta^(2^(k-1)) / 16 / 4^t.
double log2_delta_prime(int t, int k, double delta) {
  return std::ldexp(1.0, k - 1) * std::log2(delta) - 4.0 - 2.0 * t;
}

}  // namespace

double fool_simple_min_delta(int n, int t, int k) {
  if (k <= 0) return 0.0;
  // need m <= 32 where 2^(m-1) >= (n-1)/delta', i.e.
  // log2(delta') >= log2(n-1) - 31
  double need = std::log2(std::max(n - 1, 1)) - 31.0;
  double log2_delta = (need + 4.0 + 2.0 * t) / std::ldexp(1.0, k - 1);
  return std::pow(2.0, log2_delta);
}

SeededDistribution fool_simple_prg(int n, int t, int k, double delta) {
  require(n >= 1 && t >= 0 && k >= 0, "fool_simple_prg: bad arguments");
  require(delta > 0 && delta < 1, "fool_simple_prg: delta in (0,1)");
  int t_eff = std::min(t, n);  // beyond n coordinates t-wise means uniform
  std::vector<SeededDistribution> parts;
  double delta_prime = 0.0;
  if (k >= 1) {
    double l2 = log2_delta_prime(t, k, delta);
    require(l2 > -1000.0, "fool_simple_prg: delta' underflows; raise delta or lower t/k");
    delta_prime = std::pow(2.0, l2);
    if (n > 1) {
      double m_needed = std::log2((n - 1) / delta_prime) + 1.0;
      require(m_needed <= 32.0,
              "fool_simple_prg: delta' needs GF(2^m) with m > 32; raise delta "
              "(see fool_simple_min_delta) or lower t/k");
    }
    for (int i = 0; i < k; ++i) parts.push_back(epsbiased(n, delta_prime));
  }
  if (t_eff >= 1) parts.push_back(kwise(n, t_eff));
  if (parts.empty()) parts.push_back(uniform_bits(n));
  SeededDistribution d = xor_sum(std::move(parts));
  d.kind = SeededDistribution::Kind::TWiseBiasSum;
  d.tws_t = t_eff;
  d.tws_k = k;
  d.tws_delta_prime = delta_prime;
  return d;
}

// --- star samplers for the two target classes ------------------------------------

StarSampler ac0_stars(int M, int d, int n, double eps1, const Params& params) {
  require(d >= 2, "ac0_stars: depth >= 2");
  require(M >= 2, "ac0_stars: M >= 2");
  // One trimming stage at width 1, then d-1 stages at the post-trim width.
  std::vector<StarSampler> stages;
  double p = 1.0;
  int seed_bits = 0;
  for (int s = 0; s < d; ++s) {
    int width = s == 0 ? 1 : std::max(1, static_cast<int>(std::ceil(
                                             params.c_ac0 * std::log2(M))));
    int q = std::max(1, ceil_log2(static_cast<uint64_t>(
                            std::max(1, static_cast<int>(std::ceil(
                                            params.c_ac0 * width))))));
    double log2_size = 3.0 * std::log2(std::max(M, 2)) +
                       (s == 0 ? 1.0 : std::log2(std::max(M, 2))) * q;
    int r = params.r_hs(log2_size, 3, std::max(eps1, 1e-12));
    stages.push_back(stars_kwise(n, q, r));
    p *= stages.back().p;
    seed_bits += stages.back().seed_bits;
  }
  StarSampler s;
  s.n = n;
  s.p = p;
  s.seed_bits = seed_bits;
  std::ostringstream desc;
  desc << "ac0_stars(M=" << M << ",d=" << d << ",stages=" << d << ",p=" << p << ")";
  s.guarantee = desc.str();
  auto shared = std::make_shared<std::vector<StarSampler>>(std::move(stages));
  s.gen = [shared, n](const BitVec& seed) {
    std::vector<int> count(n, 0);
    int off = 0;
    for (const StarSampler& st : *shared) {
      for (int v : st.gen(seed.slice(off, st.seed_bits))) ++count[v];
      off += st.seed_bits;
    }
    std::vector<int> live;
    for (int v = 0; v < n; ++v)
      if (count[v] == static_cast<int>(shared->size())) live.push_back(v);
    return live;
  };
  return s;
}

ComposedPrg ac0_prg(int n, int M, int d, double eps, const Params& params) {
  require(n >= 2, "ac0_prg: n >= 2");
  StarSampler probe = ac0_stars(M, d, n, 0.5, params);
  double p = probe.p;
  double eps1 = eps * p * p / (2.0 * std::log(n));
  int t = static_cast<int>(std::ceil(params.c_ac0 * std::ldexp(1.0, d) *
                                     std::log2(static_cast<double>(M) / eps1)));
  int max_stages = params.max_stages > 0
                       ? params.max_stages
                       : static_cast<int>(std::ceil(std::log(n) / p));
  auto stars_factory = [M, d, eps1, params](int live) {
    StarSampler base = ac0_stars(M, d, live, eps1, params);
    return condition_min_stars(base, base.p * live / 2.0,
                               params.rejection_max_attempts);
  };
  auto fill_factory = [t](int live) { return kwise(live, std::min(t, live)); };
  std::ostringstream notes;
  notes << "eps=" << eps << " eps1=" << eps1 << " t=" << t << " p=" << p;
  return ComposedPrg(n, p, stars_factory, fill_factory, max_stages,
                     "ac0(M=" + std::to_string(M) + ",d=" + std::to_string(d) + ")",
                     notes.str());
}

StarSampler f2_stars(int S, int n, double eps2, const Params& params) {
  require(S >= 2, "f2_stars: S >= 2");
  double root = std::sqrt(std::log2(static_cast<double>(S)));
  int q = std::max(1, static_cast<int>(std::ceil(params.B_f2 * root)));
  double log2_size = std::log2(std::max(S, 2)) + std::log2(std::max(n, 2)) * (root + 1);
  int r = params.r_hs(log2_size, 3, std::max(eps2, 1e-12));
  StarSampler s = stars_kwise(n, q, r);
  std::ostringstream desc;
  desc << "f2_stars(S=" << S << ",q=" << q << ",r=" << r << ")";
  s.guarantee = desc.str();
  return s;
}

ComposedPrg f2_prg(int n, int S, double eps, const Params& params) {
  require(n >= 2, "f2_prg: n >= 2");
  double root = std::sqrt(std::log2(static_cast<double>(S)));
  int q = std::max(1, static_cast<int>(std::ceil(params.B_f2 * root)));
  double p = std::ldexp(1.0, -q);
  double eps2 = eps * p * p / (2.0 * std::log(n));
  int k = std::max(1, static_cast<int>(std::ceil(root)));
  int t = static_cast<int>(std::ceil(params.A_f2 * root + std::log2(1.0 / eps)));
  // The biased components cannot go below the GF(2^32) floor; when the
  // stage budget asks for less, clamp and record it.
  double delta_budget = eps * p / (2.0 * std::log(n));
  double delta_floor = fool_simple_min_delta(n, t, k) * 1.0000001;
  double delta_fill = std::max(delta_budget, delta_floor);
  int max_stages = params.max_stages > 0
                       ? params.max_stages
                       : static_cast<int>(std::ceil(std::log(n) / p));
  auto stars_factory = [S, eps2, params](int live) {
    StarSampler base = f2_stars(S, live, eps2, params);
    return condition_min_stars(base, base.p * live / 2.0,
                               params.rejection_max_attempts);
  };
  auto fill_factory = [t, k, delta_fill](int live) {
    return fool_simple_prg(live, std::min(t, live), k, delta_fill);
  };
  std::ostringstream notes;
  notes << "eps=" << eps << " eps2=" << eps2 << " t=" << t << " k=" << k
        << " delta_fill=" << delta_fill
        << (delta_fill > delta_budget ? " (clamped to field floor)" : "");
  return ComposedPrg(n, p, stars_factory, fill_factory, max_stages,
                     "f2(S=" + std::to_string(S) + ")", notes.str());
}

}  // namespace rlab
