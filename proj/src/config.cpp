#include "chung/config.hpp"

#include <cstdio>
#include <fstream>

#include "chung/errors.hpp"

namespace chung {

Section::Section(json j, std::string path) : j_(std::move(j)), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
}

bool Section::has(const std::string& key) const {
  if (!j_.contains(key)) return false;
  used_.insert(key);
  return true;
}

const json& Section::get(const std::string& key) const {
  if (!j_.contains(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
  used_.insert(key);
  return j_.at(key);
}

double Section::number(const std::string& key) const {
  const json& v = get(key);
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return INFINITY;
  }
  if (!v.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
  return v.get<double>();
}

double Section::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long Section::integer(const std::string& key) const {
  const json& v = get(key);
  if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an integer");
  return v.get<long>();
}

long Section::integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

std::string Section::string(const std::string& key) const {
  const json& v = get(key);
  if (!v.is_string()) throw ConfigError(path_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string Section::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool Section::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const json& v = get(key);
  if (!v.is_boolean()) throw ConfigError(path_ + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::vector<double> Section::numbers(const std::string& key) const {
  const json& v = get(key);
  if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<long> Section::integers(const std::string& key) const {
  const json& v = get(key);
  if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of integers");
  std::vector<long> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an array of integers");
    out.push_back(x.get<long>());
  }
  return out;
}

Section Section::section(const std::string& key) const { return Section(get(key), path_ + "." + key); }

std::vector<Section> Section::sections(const std::string& key) const {
  const json& v = get(key);
  if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of objects");
  std::vector<Section> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], path_ + "." + key + "[" + std::to_string(i) + "]");
  return out;
}

void Section::finish() const {
  std::string unknown;
  for (auto it = j_.begin(); it != j_.end(); ++it)
    if (!used_.count(it.key())) unknown += (unknown.empty() ? "" : ", ") + it.key();
  if (!unknown.empty()) throw ConfigError(path_ + ": unknown key(s): " + unknown);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

StepSchedule parse_schedule(const Section& s, long K) {
  const std::string fam = s.string("family");
  StepSchedule out = StepSchedule::constant(1.0);
  try {
    switch (parse_family(fam)) {
      case Family::constant: out = StepSchedule::constant(s.number("alpha")); break;
      case Family::polynomial:
        out = StepSchedule::polynomial(s.number("alpha"), s.number("gamma"), s.number("p"));
        break;
      case Family::exponential:
        out = StepSchedule::exponential(s.number("alpha"), s.number("beta", 1.0), s.number("p", 1.0), K);
        break;
      case Family::cosine: out = StepSchedule::cosine(s.number("alpha"), s.number("p", 1.0), K); break;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  s.finish();
  return out;
}

PLParams parse_pl(const Section& s, double theta_fallback) {
  PLParams p;
  p.l1 = s.number("l1");
  p.l2 = s.number("l2");
  p.l3 = s.number("l3");
  p.tau = s.number("tau");
  p.theta = theta_fallback >= 0.0 ? s.number("theta", theta_fallback) : s.number("theta");
  s.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  return p;
}

MethodConstants parse_method_constants(Method m, const Section& s) {
  const double theta = s.number("theta");
  const double L = s.number("L"), mu = s.number("mu");
  const double A = s.number("A", 0.0), sigma = s.number("sigma");
  const long N = m == Method::rr ? s.integer("N") : 1;
  s.finish();
  try {
    return m == Method::sgd ? sgd_constants(theta, L, mu, A, sigma) : rr_constants(theta, L, mu, A, sigma, N);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
}

Problem parse_problem(const Section& s) {
  const std::string kind = s.string("kind");
  Problem pb;
  try {
    if (kind == "quadratic") {
      pb = make_quadratic(s.number("mu"), s.number("L"), static_cast<int>(s.integer("dim", 1)), s.integer("N", 0),
                          s.number("sigma", 1.0));
      if (s.has("radius")) pb.domain_radius = s.number("radius");
    } else if (kind == "curvature_mix") {
      pb = make_curvature_mix(s.numbers("curvatures"), s.numbers("centers"), s.number("radius"));
    } else if (kind == "power") {
      pb = make_power_family(s.number("theta"), s.number("c"), s.number("radius"));
    } else {
      throw ConfigError(s.path() + ".kind: unknown problem kind '" + kind + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  if (s.has("mu_claim")) pb.pl_mu = s.number("mu_claim");
  s.finish();
  return pb;
}

NoiseModel parse_noise(const Section& s) {
  NoiseModel n;
  try {
    n.kind = parse_noise_kind(s.string("kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  n.sigma = s.number("sigma", 0.0);
  n.A = s.number("A", 0.0);
  s.finish();
  if (n.sigma < 0.0 || n.A < 0.0) throw ConfigError(s.path() + ": sigma and A must be nonnegative");
  return n;
}

std::vector<std::uint64_t> parse_seeds(const Section& s, std::uint64_t base_seed) {
  std::vector<std::uint64_t> seeds;
  if (s.has("seeds")) {
    for (long v : s.integers("seeds")) {
      if (v < 0) throw ConfigError(s.path() + ".seeds: seeds must be nonnegative");
      seeds.push_back(static_cast<std::uint64_t>(v));
    }
  } else if (s.has("num_seeds")) {
    const long n = s.integer("num_seeds");
    if (n < 1) throw ConfigError(s.path() + ".num_seeds must be positive");
    for (long i = 0; i < n; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
  }
  if (seeds.empty()) throw ConfigError(s.path() + ": need 'seeds' or 'num_seeds'");
  return seeds;
}

std::string config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace chung
