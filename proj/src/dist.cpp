#include "rlab/dist.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rlab/gf2.hpp"

namespace rlab {

namespace {

int eps_biased_m(int n, double delta) {
  require(delta > 0, "epsbiased: delta must be positive");
  if (n <= 1) return 1;
  // smallest m with 2^m >= (n-1)/delta, plus one for margin
  int m = 1;
  while (std::ldexp(1.0, m) < (n - 1) / delta) {
    ++m;
    require(m <= 31, "epsbiased: delta too small for GF(2^m) with m <= 32");
  }
  return m + 1;
}

}  // namespace

SeededDistribution kwise(int n, int k) {
  require(n >= 1 && k >= 1, "kwise: n, k >= 1");
  SeededDistribution d;
  d.kind = SeededDistribution::Kind::KWise;
  d.n_out = n;
  d.k = k;
  d.field_m = ceil_log2(static_cast<uint64_t>(std::max(n, 2)));
  d.seed_bits = k * d.field_m;
  return d;
}

SeededDistribution epsbiased(int n, double delta) {
  require(n >= 1, "epsbiased: n >= 1");
  SeededDistribution d;
  d.kind = SeededDistribution::Kind::EpsBiased;
  d.n_out = n;
  d.delta = delta;
  d.bias_m = eps_biased_m(n, delta);
  d.seed_bits = 2 * d.bias_m;
  return d;
}

SeededDistribution uniform_bits(int n) {
  SeededDistribution d;
  d.kind = SeededDistribution::Kind::Identity;
  d.n_out = n;
  d.seed_bits = n;
  return d;
}

SeededDistribution xor_sum(std::vector<SeededDistribution> parts) {
  require(!parts.empty(), "xor_sum: needs at least one component");
  SeededDistribution d;
  d.kind = SeededDistribution::Kind::Sum;
  d.n_out = parts.front().n_out;
  d.seed_bits = 0;
  for (const auto& p : parts) {
    require(p.n_out == d.n_out, "xor_sum: output lengths must agree");
    d.seed_bits += p.seed_bits;
  }
  d.components = std::move(parts);
  return d;
}

SeededDistribution mixture(std::vector<SeededDistribution> parts) {
  require(!parts.empty(), "mixture: needs at least one component");
  size_t count = parts.size();
  require((count & (count - 1)) == 0, "mixture: component count must be a power of two");
  int sel_bits = bits_for(count);
  int n = parts.front().n_out;
  int body = 0;
  for (const auto& p : parts) {
    require(p.n_out == n, "mixture: output lengths must agree");
    body = std::max(body, p.seed_bits);
  }
  SeededDistribution d;
  d.kind = SeededDistribution::Kind::Composed;
  d.n_out = n;
  d.seed_bits = sel_bits + body;
  d.description = "mixture(" + std::to_string(count) + ")";
  auto shared = std::make_shared<std::vector<SeededDistribution>>(std::move(parts));
  d.custom = [shared, sel_bits](const BitVec& seed) {
    size_t pick = seed.read_u64(0, sel_bits);
    const SeededDistribution& part = (*shared)[pick];
    return part.generate(seed.slice(sel_bits, part.seed_bits));
  };
  return d;
}

BitVec SeededDistribution::generate(const BitVec& seed) const {
  require(static_cast<int>(seed.size()) == seed_bits,
          "SeededDistribution: seed length mismatch");
  switch (kind) {
    case Kind::Identity:
      return seed;
    case Kind::KWise: {
      const GF2m& field = gf2_field(field_m);
      std::vector<uint32_t> coeff(k);
      for (int j = 0; j < k; ++j)
        coeff[j] = static_cast<uint32_t>(seed.read_u64(j * field_m, field_m));
      BitVec out(n_out);
      for (int i = 0; i < n_out; ++i) {
        uint32_t x = static_cast<uint32_t>(i);
        uint32_t acc = coeff[k - 1];
        for (int j = k - 2; j >= 0; --j) acc = field.add(field.mul(acc, x), coeff[j]);
        out.set(i, acc & 1);
      }
      return out;
    }
    case Kind::EpsBiased: {
      const GF2m& field = gf2_field(bias_m);
      uint32_t x = static_cast<uint32_t>(seed.read_u64(0, bias_m));
      uint32_t y = static_cast<uint32_t>(seed.read_u64(bias_m, bias_m));
      BitVec out(n_out);
      uint32_t p = 1;  // x^0
      for (int i = 0; i < n_out; ++i) {
        out.set(i, field.mul(p, y) & 1);
        p = field.mul(p, x);
      }
      return out;
    }
    case Kind::Sum:
    case Kind::TWiseBiasSum: {
      BitVec out(n_out);
      int off = 0;
      for (const auto& part : components) {
        out.xor_in(part.generate(seed.slice(off, part.seed_bits)));
        off += part.seed_bits;
      }
      return out;
    }
    case Kind::Composed:
      return custom(seed);
  }
  throw Error("SeededDistribution: bad kind");
}

bool SeededDistribution::exact_spectrum_available() const {
  switch (kind) {
    case Kind::Identity:
      return true;
    case Kind::KWise:
      return true;
    case Kind::EpsBiased:
      return bias_m <= 26;
    case Kind::Sum:
    case Kind::TWiseBiasSum: {
      for (const auto& part : components)
        if (!part.exact_spectrum_available()) return false;
      return true;
    }
    case Kind::Composed:
      return false;
  }
  return false;
}

double SeededDistribution::parity_bias_signed(const BitVec& mask) const {
  require(static_cast<int>(mask.size()) == n_out,
          "parity_bias_signed: mask length mismatch");
  switch (kind) {
    case Kind::Identity: {
      for (size_t i = 0; i < mask.size(); ++i)
        if (mask.get(i)) return 0.0;
      return 1.0;
    }
    case Kind::KWise: {
      // The parity over the mask is a linear functional of the seed
      // coefficients; it vanishes iff every power sum over the mask's field
      // points is zero, in which case the parity is constant 0.
      const GF2m& field = gf2_field(field_m);
      bool all_zero = true;
      for (int j = 0; j < k && all_zero; ++j) {
        uint32_t s = 0;
        for (int i = 0; i < n_out; ++i)
          if (mask.get(i)) s ^= field.pow(static_cast<uint32_t>(i), j);
        if (s != 0) all_zero = false;
      }
      return all_zero ? 1.0 : 0.0;
    }
    case Kind::EpsBiased: {
      // E_y kills everything except the x with sum_{i in mask} x^i = 0.
      const GF2m& field = gf2_field(bias_m);
      std::vector<int> idx;
      for (int i = 0; i < n_out; ++i)
        if (mask.get(i)) idx.push_back(i);
      if (idx.empty()) return 1.0;
      uint64_t roots = 0;
      uint64_t order = field.order();
      for (uint64_t xv = 0; xv < order; ++xv) {
        uint32_t x = static_cast<uint32_t>(xv);
        uint32_t acc = 0;
        uint32_t p = 1;
        int last = 0;
        for (int i : idx) {
          for (; last < i; ++last) p = field.mul(p, x);
          acc ^= p;
        }
        if (acc == 0) ++roots;
      }
      return static_cast<double>(roots) / static_cast<double>(order);
    }
    case Kind::Sum:
    case Kind::TWiseBiasSum: {
      double prod = 1.0;
      for (const auto& part : components) {
        prod *= part.parity_bias_signed(mask);
        if (prod == 0.0) return 0.0;
      }
      return prod;
    }
    case Kind::Composed:
      throw Error("parity_bias_signed: no closed form for composed kinds");
  }
  throw Error("SeededDistribution: bad kind");
}

std::string SeededDistribution::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::Identity: out << "uniform(n=" << n_out << ")"; break;
    case Kind::KWise: out << "kwise(n=" << n_out << ",k=" << k << ",b=" << field_m << ")"; break;
    case Kind::EpsBiased:
      out << "epsbiased(n=" << n_out << ",delta=" << delta << ",m=" << bias_m << ")";
      break;
    case Kind::Sum: {
      out << "sum[";
      for (size_t i = 0; i < components.size(); ++i)
        out << (i ? "," : "") << components[i].describe();
      out << "]";
      break;
    }
    case Kind::TWiseBiasSum:
      out << "twise_plus_bias_sum(t=" << tws_t << ",k=" << tws_k
          << ",delta'=" << tws_delta_prime << ")";
      break;
    case Kind::Composed: out << description; break;
  }
  return out.str();
}

std::string SeededDistribution::descriptor_json() const {
  nlohmann::json j;
  switch (kind) {
    case Kind::Identity: j["kind"] = "uniform"; break;
    case Kind::KWise:
      j["kind"] = "kwise";
      j["k"] = k;
      j["field_bits"] = field_m;
      break;
    case Kind::EpsBiased:
      j["kind"] = "epsbiased";
      j["delta"] = delta;
      j["field_bits"] = bias_m;
      break;
    case Kind::Sum: {
      j["kind"] = "sum";
      for (const auto& part : components)
        j["components"].push_back(nlohmann::json::parse(part.descriptor_json()));
      break;
    }
    case Kind::TWiseBiasSum: {
      j["kind"] = "twise_plus_bias_sum";
      j["t"] = tws_t;
      j["k"] = tws_k;
      j["delta_prime"] = tws_delta_prime;
      for (const auto& part : components)
        j["components"].push_back(nlohmann::json::parse(part.descriptor_json()));
      break;
    }
    case Kind::Composed: j["kind"] = "composed"; j["description"] = description; break;
  }
  j["n_out"] = n_out;
  j["seed_bits"] = seed_bits;
  return j.dump();
}

// --- restrictions from bitstrings -------------------------------------------

Restriction restriction_from_bits(const BitstringRestrictionSpace& space,
                                  const BitVec& selectors, const BitVec& values) {
  require(static_cast<int>(selectors.size()) == space.n * space.q,
          "restriction_from_bits: selector grid size mismatch");
  require(static_cast<int>(values.size()) == space.n,
          "restriction_from_bits: value vector size mismatch");
  Restriction r(static_cast<size_t>(space.n));
  for (int i = 0; i < space.n; ++i) {
    bool star = true;
    for (int j = 0; j < space.q; ++j)
      if (!selectors.get(static_cast<size_t>(i) * space.q + j)) {
        star = false;
        break;
      }
    if (!star) r.set(i, values.get(i) ? Trit::One : Trit::Zero);
  }
  return r;
}

Restriction restriction_from_bits(const BitstringRestrictionSpace& space,
                                  const BitVec& combined) {
  require(static_cast<int>(combined.size()) == space.total_bits(),
          "restriction_from_bits: combined size mismatch");
  return restriction_from_bits(space, combined.slice(0, space.n * space.q),
                               combined.slice(space.n * space.q, space.n));
}

std::vector<int> stars_from_bits(const BitstringRestrictionSpace& space,
                                 const BitVec& selectors) {
  require(static_cast<int>(selectors.size()) == space.n * space.q,
          "stars_from_bits: selector grid size mismatch");
  std::vector<int> live;
  for (int i = 0; i < space.n; ++i) {
    bool star = true;
    for (int j = 0; j < space.q; ++j)
      if (!selectors.get(static_cast<size_t>(i) * space.q + j)) {
        star = false;
        break;
      }
    if (star) live.push_back(i);
  }
  return live;
}

Restriction sample_Rp(int n, double p, SplitMix64& rng) {
  require(p >= 0.0 && p <= 1.0, "sample_Rp: p in [0,1]");
  Restriction r(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (rng.real() < p) continue;  // star
    r.set(i, rng.bit() ? Trit::One : Trit::Zero);
  }
  return r;
}

// --- conditioning ------------------------------------------------------------

ConditionalSampler::ConditionalSampler(SeededDistribution base,
                                       std::function<bool(const BitVec&)> predicate,
                                       int max_attempts)
    : base_(std::move(base)), predicate_(std::move(predicate)),
      max_attempts_(max_attempts) {
  require(max_attempts_ >= 1, "mix_condition: max_attempts >= 1");
}

BitVec ConditionalSampler::sample(SplitMix64& rng) const {
  for (int a = 0; a < max_attempts_; ++a) {
    BitVec out = base_.generate(rng.bits(base_.seed_bits));
    ++attempts_;
    if (predicate_(out)) {
      ++accepts_;
      return out;
    }
  }
  throw Error("mix_condition: max attempts exceeded");
}

double ConditionalSampler::measured_acceptance_rate() const {
  return attempts_ == 0 ? 0.0
                        : static_cast<double>(accepts_) / static_cast<double>(attempts_);
}

std::vector<BitVec> ConditionalSampler::exact_accepted_outputs(int cap_bits) const {
  require(base_.seed_bits <= cap_bits,
          "mix_condition: seed space too large for exact enumeration");
  std::vector<BitVec> out;
  uint64_t total = uint64_t{1} << base_.seed_bits;
  for (uint64_t s = 0; s < total; ++s) {
    BitVec o = base_.generate(BitVec::from_u64(s, base_.seed_bits));
    if (predicate_(o)) out.push_back(std::move(o));
  }
  return out;
}

ConditionalSampler mix_condition(SeededDistribution d,
                                 std::function<bool(const BitVec&)> predicate,
                                 int max_attempts) {
  return ConditionalSampler(std::move(d), std::move(predicate), max_attempts);
}

}  // namespace rlab
