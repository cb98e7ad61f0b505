#pragma once

// Semi-Thue rewriting over positionally coded strings.
//
// Symbols map to codes 1..l and strings are read as base b = l + 1 numbers,
// least significant digit first. A rule lhs -> rhs becomes the integer pair
// (n, m) and the single packed code k = n + b^|lhs| * m. Matching is a
// circulant product over the string padded with zero symbols: the output at
// position j is the code of the window starting at j, and a rule fires
// wherever that code equals n.
//
// Two execution modes share the match/select/splice contract:
//   direct        exact integer circulant products per rule
//   holographic   a spectral field h = Λ F s carried between steps, which
//                 the acting agent demodulates (F* h), rewrites and re-emits.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sigcomp/error.hpp"
#include "sigcomp/fft.hpp"

namespace sigcomp::thue {

using Symbol = std::uint32_t;
using Code = boost::multiprecision::cpp_int;
using SymbolString = std::vector<Symbol>;

/// Character symbols in order of first appearance; codes start at 1.
class Alphabet {
 public:
  Symbol intern(char ch) {
    if (auto code = find(ch)) return *code;
    if (ch == '\0' || std::isspace(static_cast<unsigned char>(ch)))
      throw RuleError("whitespace and NUL are not valid symbols");
    chars_.push_back(ch);
    return static_cast<Symbol>(chars_.size());
  }

  std::optional<Symbol> find(char ch) const {
    const auto pos = chars_.find(ch);
    if (pos == std::string::npos) return std::nullopt;
    return static_cast<Symbol>(pos + 1);
  }

  char symbol(Symbol code) const {
    if (code == 0 || code > chars_.size())
      throw RangeError("symbol code " + std::to_string(code) + " outside the alphabet");
    return chars_[code - 1];
  }

  std::size_t size() const noexcept { return chars_.size(); }
  const std::string& chars() const noexcept { return chars_; }

  bool operator==(const Alphabet&) const = default;

 private:
  std::string chars_;
};

struct Rule {
  SymbolString lhs;
  SymbolString rhs;

  bool operator==(const Rule&) const = default;
};

struct RuleTable {
  Alphabet alphabet;
  std::vector<Rule> rules;

  /// Encodes text, growing the alphabet with unseen symbols.
  SymbolString intern(std::string_view text) {
    SymbolString s;
    for (char ch : text) s.push_back(alphabet.intern(ch));
    return s;
  }

  SymbolString encode(std::string_view text) const {
    SymbolString s;
    for (char ch : text) {
      auto code = alphabet.find(ch);
      if (!code) throw RangeError(std::string("symbol '") + ch + "' is not in the alphabet");
      s.push_back(*code);
    }
    return s;
  }

  std::string decode(const SymbolString& s) const {
    std::string out;
    for (Symbol c : s) out += alphabet.symbol(c);
    return out;
  }

  void add_rule(std::string_view lhs, std::string_view rhs) {
    if (lhs.empty() || rhs.empty()) throw RuleError("null words are not allowed in rules");
    rules.push_back({intern(lhs), intern(rhs)});
  }

  bool operator==(const RuleTable&) const = default;
};

/// `lhs -> rhs` per line, `#` comments.
inline RuleTable parse_rules(std::string_view text) {
  RuleTable table;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto arrow = raw.find("->");
    if (arrow == std::string::npos) throw ParseError(line, "expected 'lhs -> rhs'");
    const std::string lhs = trim(raw.substr(0, arrow));
    const std::string rhs = trim(raw.substr(arrow + 2));
    if (lhs.empty() || rhs.empty()) throw ParseError(line, "null words are not allowed in rules");
    for (const auto& word : {lhs, rhs})
      for (char ch : word)
        if (std::isspace(static_cast<unsigned char>(ch)))
          throw ParseError(line, "whitespace inside a rule word");
    table.add_rule(lhs, rhs);
  }
  return table;
}

inline std::string format_rules(const RuleTable& table) {
  std::string out;
  for (const auto& r : table.rules) out += table.decode(r.lhs) + " -> " + table.decode(r.rhs) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Arithmetization

inline Code pow_code(std::uint32_t base, std::size_t exp) {
  Code r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

/// sum_t base^t * s[t], first symbol least significant.
inline Code positional_code(const SymbolString& s, std::uint32_t base) {
  Code r = 0;
  for (std::size_t t = s.size(); t-- > 0;) r = r * base + s[t];
  return r;
}

inline SymbolString positional_decode(Code value, std::uint32_t base, std::size_t length) {
  SymbolString s(length);
  for (std::size_t t = 0; t < length; ++t) {
    s[t] = static_cast<Symbol>(value % base);
    value /= base;
  }
  if (value != 0) throw RangeError("code has more digits than the stated length");
  return s;
}

struct ArithmetizedRule {
  Code lhs_code;  ///< n
  Code rhs_code;  ///< m
  Code packed;    ///< k = n + b^L * m
  std::size_t lhs_len = 0;
  std::size_t rhs_len = 0;
  SymbolString lhs;  ///< recovered from `packed`
  SymbolString rhs;
};

struct ArithmetizedSystem {
  std::uint32_t base = 2;
  std::vector<ArithmetizedRule> rules;

  std::size_t max_lhs() const {
    std::size_t w = 0;
    for (const auto& r : rules) w = std::max(w, r.lhs_len);
    return w;
  }

  /// (n, m) recovered from the packed code alone.
  std::pair<Code, Code> unpack(std::size_t i) const {
    const auto& r = rules.at(i);
    const Code scale = pow_code(base, r.lhs_len);
    return {r.packed % scale, r.packed / scale};
  }
};

inline ArithmetizedSystem arithmetize(const RuleTable& table) {
  const std::size_t l = table.alphabet.size();
  if (l == 0 && !table.rules.empty()) throw RuleError("rules need a non-empty alphabet");
  ArithmetizedSystem sys;
  sys.base = static_cast<std::uint32_t>(std::max<std::size_t>(l, 1) + 1);
  for (const auto& rule : table.rules) {
    if (rule.lhs.empty() || rule.rhs.empty()) throw RuleError("null words are not allowed in rules");
    for (const auto* word : {&rule.lhs, &rule.rhs})
      for (Symbol c : *word)
        if (c == 0 || c >= sys.base) throw RuleError("symbol code outside 1..b-1");
    ArithmetizedRule ar;
    ar.lhs_len = rule.lhs.size();
    ar.rhs_len = rule.rhs.size();
    ar.lhs_code = positional_code(rule.lhs, sys.base);
    ar.rhs_code = positional_code(rule.rhs, sys.base);
    ar.packed = ar.lhs_code + pow_code(sys.base, ar.lhs_len) * ar.rhs_code;
    sys.rules.push_back(std::move(ar));
  }
  for (std::size_t i = 0; i < sys.rules.size(); ++i) {
    auto& r = sys.rules[i];
    const auto [n, m] = sys.unpack(i);
    if (n != r.lhs_code || m != r.rhs_code) throw RuleError("packed code does not round trip");
    r.lhs = positional_decode(n, sys.base, r.lhs_len);
    r.rhs = positional_decode(m, sys.base, r.rhs_len);
  }
  // A proper prefix lhs_i of lhs_j shows up as n_j ≡ n_i (mod b^L_i).
  for (const auto& a : sys.rules)
    for (const auto& b : sys.rules)
      if (a.lhs_len < b.lhs_len && b.lhs_code % pow_code(sys.base, a.lhs_len) == a.lhs_code)
        throw RuleError("left-hand side codes are congruent: one lhs is a proper prefix of another");
  return sys;
}

// ---------------------------------------------------------------------------
// Circulant matching

inline std::size_t ring_padding(std::size_t length, std::size_t window) {
  return length + 2 >= window ? 2 : window - length;
}

/// Zero-padded ring holding the string followed by the edge symbols.
inline std::vector<Symbol> padded_ring(const SymbolString& s, std::size_t window) {
  std::vector<Symbol> ring(s);
  ring.resize(s.size() + ring_padding(s.size(), window), 0);
  return ring;
}

class CirculantMatcher {
 public:
  CirculantMatcher(std::size_t window, std::uint32_t base) : window_(window), base_(base) {
    if (window == 0) throw RangeError("matcher window must be positive");
  }

  std::size_t window() const noexcept { return window_; }

  /// Convolution kernel on a ring of size n: (C s)_j = sum_i kernel[(j - i) mod n] s_i.
  /// Its only non-zero taps are kernel[(-t) mod n] = b^t.
  std::vector<Code> kernel(std::size_t n) const {
    std::vector<Code> k(n, 0);
    Code w = 1;
    for (std::size_t t = 0; t < window_; ++t) {
      k[(n - t % n) % n] += w;
      w *= base_;
    }
    return k;
  }

  /// Exact C·s over the padded ring.
  std::vector<Code> activations(const SymbolString& s) const {
    const auto ring = padded_ring(s, window_);
    const std::size_t n = ring.size();
    std::vector<Code> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      Code acc = 0;
      for (std::size_t t = window_; t-- > 0;) acc = acc * base_ + ring[(j + t) % n];
      out[j] = std::move(acc);
    }
    return out;
  }

  /// Diagonal of C in the Fourier basis (unnormalized transform of the kernel).
  std::vector<fft::cplx> spectrum(std::size_t n) const {
    const auto k = kernel(n);
    std::vector<fft::cplx> kc(n);
    for (std::size_t i = 0; i < n; ++i) kc[i] = fft::cplx(k[i].convert_to<double>(), 0.0);
    return fft::dft(kc, -1);
  }

 private:
  std::size_t window_;
  std::uint32_t base_;
};

/// Ascending positions where P_i s = C s - n_i 1 vanishes.
inline std::vector<std::size_t> match_positions(const SymbolString& s,
                                                const ArithmetizedSystem& sys, std::size_t i) {
  const auto& rule = sys.rules.at(i);
  if (s.size() < rule.lhs_len) return {};
  const auto act = CirculantMatcher(rule.lhs_len, sys.base).activations(s);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < act.size(); ++j)
    if (act[j] == rule.lhs_code) out.push_back(j);
  return out;
}

// ---------------------------------------------------------------------------
// Rewriting

struct Match {
  std::size_t rule = 0;
  std::size_t pos = 0;

  bool operator==(const Match&) const = default;
  auto operator<=>(const Match& o) const {
    if (pos != o.pos) return pos <=> o.pos;
    return rule <=> o.rule;
  }
};

/// Leftmost (position, then rule index) or seeded uniform choice among matches.
class Strategy {
 public:
  static Strategy leftmost() { return Strategy(false, 0); }
  static Strategy random(std::uint64_t seed) { return Strategy(true, seed); }

  bool is_random() const noexcept { return random_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// `matches` must be sorted by (pos, rule).
  Match select(const std::vector<Match>& matches) {
    if (!random_) return matches.front();
    std::uniform_int_distribution<std::size_t> pick(0, matches.size() - 1);
    return matches[pick(rng_)];
  }

 private:
  Strategy(bool random, std::uint64_t seed) : random_(random), seed_(seed), rng_(seed) {}

  bool random_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

inline std::vector<Match> all_matches(const SymbolString& s, const ArithmetizedSystem& sys) {
  std::vector<Match> out;
  for (std::size_t i = 0; i < sys.rules.size(); ++i)
    for (std::size_t p : match_positions(s, sys, i)) out.push_back({i, p});
  std::sort(out.begin(), out.end());
  return out;
}

/// The decoder step: splices the rhs symbols recovered from the packed code.
inline SymbolString splice(const SymbolString& s, const ArithmetizedSystem& sys, const Match& m) {
  const auto& r = sys.rules.at(m.rule);
  SymbolString out;
  out.reserve(s.size() + r.rhs_len);
  out.insert(out.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(m.pos));
  out.insert(out.end(), r.rhs.begin(), r.rhs.end());
  out.insert(out.end(), s.begin() + static_cast<std::ptrdiff_t>(m.pos + r.lhs_len), s.end());
  return out;
}

struct Rewrite {
  SymbolString next;
  Match applied;
};

/// One reduction step; nullopt marks a normal form.
inline std::optional<Rewrite> rewrite_step(const SymbolString& s, const ArithmetizedSystem& sys,
                                           Strategy& strategy) {
  const auto matches = all_matches(s, sys);
  if (matches.empty()) return std::nullopt;
  const Match m = strategy.select(matches);
  return Rewrite{splice(s, sys, m), m};
}

struct TraceLine {
  std::size_t step;
  Match applied;
  std::size_t length;  ///< string length after the step
};

struct Reduction {
  SymbolString final;
  std::size_t steps = 0;
  bool terminated = false;
  std::vector<TraceLine> trace;
};

inline Reduction reduce(SymbolString s, const ArithmetizedSystem& sys, Strategy& strategy,
                        std::size_t max_steps) {
  Reduction red;
  while (true) {
    if (red.steps == max_steps) {
      red.terminated = all_matches(s, sys).empty();
      break;
    }
    auto rw = rewrite_step(s, sys, strategy);
    if (!rw) {
      red.terminated = true;
      break;
    }
    s = std::move(rw->next);
    red.trace.push_back({red.steps, rw->applied, s.size()});
    ++red.steps;
  }
  red.final = std::move(s);
  return red;
}

/// `step pos rule lhs rhs |s|`
inline std::string format_trace(const Reduction& red, const RuleTable& table) {
  std::ostringstream os;
  for (const auto& t : red.trace) {
    const auto& r = table.rules.at(t.applied.rule);
    os << t.step << ' ' << t.applied.pos << ' ' << t.applied.rule << ' ' << table.decode(r.lhs)
       << ' ' << table.decode(r.rhs) << ' ' << t.length << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Holographic mode

/// Each rule carries the tag of the agent that owns it.
struct AgentRoster {
  std::size_t agents = 1;
  std::vector<std::size_t> owner;

  static AgentRoster round_robin(std::size_t rules, std::size_t agents) {
    if (agents == 0) throw RangeError("need at least one agent");
    AgentRoster r{agents, std::vector<std::size_t>(rules)};
    for (std::size_t i = 0; i < rules; ++i) r.owner[i] = i % agents;
    return r;
  }

  static AgentRoster random(std::size_t rules, std::size_t agents, std::uint64_t seed) {
    if (agents == 0) throw RangeError("need at least one agent");
    AgentRoster r{agents, std::vector<std::size_t>(rules)};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, agents - 1);
    for (auto& o : r.owner) o = pick(rng);
    return r;
  }
};

struct HolographicField {
  std::vector<fft::cplx> h;  ///< Λ F s over the padded ring
  std::size_t length = 0;    ///< logical string length
  std::size_t window = 1;
  std::uint32_t base = 2;
};

/// Activations are rounded to integers, so the largest window code must stay
/// far inside double precision.
inline void check_field_range(std::size_t window, std::uint32_t base) {
  const double top = std::pow(static_cast<double>(base), static_cast<double>(window));
  if (top > 0x1p40) throw RangeError("window codes too large for the spectral field");
}

inline HolographicField emit_field(const SymbolString& s, std::size_t window, std::uint32_t base) {
  check_field_range(window, base);
  const auto ring = padded_ring(s, window);
  const std::size_t n = ring.size();
  const auto lambda = CirculantMatcher(window, base).spectrum(n);
  std::vector<fft::cplx> sc(n);
  for (std::size_t i = 0; i < n; ++i) sc[i] = fft::cplx(static_cast<double>(ring[i]), 0.0);
  auto h = fft::forward(sc);
  for (std::size_t i = 0; i < n; ++i) h[i] *= lambda[i];
  return {std::move(h), s.size(), window, base};
}

inline HolographicField emit_field(const SymbolString& s, const ArithmetizedSystem& sys) {
  return emit_field(s, std::max<std::size_t>(sys.max_lhs(), 1), sys.base);
}

struct FieldDecode {
  SymbolString s;
  std::vector<std::int64_t> activations;  ///< rounded C s over the ring
  double deviation = 0.0;                 ///< worst pre-rounding distance
};

inline constexpr double kFieldTolerance = 1e-9;

/// Demodulates F* h back to window codes and reads each symbol off the
/// least significant digit.
inline FieldDecode decode_field(const HolographicField& f) {
  const auto act = fft::inverse(f.h);
  FieldDecode d;
  d.activations.resize(act.size());
  for (std::size_t j = 0; j < act.size(); ++j) {
    const double re = act[j].real();
    const double r = std::round(re);
    d.deviation = std::max({d.deviation, std::abs(re - r), std::abs(act[j].imag())});
    d.activations[j] = static_cast<std::int64_t>(r);
  }
  if (d.deviation > kFieldTolerance)
    throw ConsistencyError("field decode drifted by " + std::to_string(d.deviation));
  for (std::size_t j = 0; j < act.size(); ++j) {
    if (d.activations[j] < 0) throw ConsistencyError("negative activation in field");
    const auto digit = static_cast<Symbol>(d.activations[j] % f.base);
    if (j < f.length) {
      if (digit == 0) throw ConsistencyError("zero symbol inside the string");
      d.s.push_back(digit);
    } else if (digit != 0) {
      throw ConsistencyError("non-zero symbol in the edge padding");
    }
  }
  return d;
}

struct HoloStep {
  HolographicField field;
  std::optional<Match> applied;  ///< nullopt at a normal form
  std::size_t agent = 0;
  double deviation = 0.0;
};

/// h' = Λ F (D∘R)(F* h): the owner of the selected rule demodulates the
/// field, applies the rewrite and re-emits.
inline HoloStep holographic_step(const HolographicField& field, const ArithmetizedSystem& sys,
                                 const AgentRoster& roster, Strategy& strategy) {
  const FieldDecode d = decode_field(field);
  std::vector<Match> matches;
  for (std::size_t j = 0; j < d.s.size(); ++j) {
    for (std::size_t i = 0; i < sys.rules.size(); ++i) {
      const auto& r = sys.rules[i];
      if (r.lhs_len > field.window) throw RangeError("field window shorter than a rule lhs");
      const auto scale = static_cast<std::int64_t>(std::llround(
          std::pow(static_cast<double>(sys.base), static_cast<double>(r.lhs_len))));
      if (d.activations[j] % scale == r.lhs_code.convert_to<std::int64_t>()) matches.push_back({i, j});
    }
  }
  HoloStep out;
  out.deviation = d.deviation;
  if (matches.empty()) {
    out.field = field;
    return out;
  }
  const Match m = strategy.select(matches);
  out.applied = m;
  out.agent = roster.owner.at(m.rule);
  out.field = emit_field(splice(d.s, sys, m), field.window, field.base);
  return out;
}

// ---------------------------------------------------------------------------
// Bounded confluence check

enum class Verdict { Confluent, NonConfluent, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Confluent: return "confluent";
    case Verdict::NonConfluent: return "non-confluent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConfluenceReport {
  Verdict verdict = Verdict::Confluent;
  SymbolString witness;                   ///< start string with two normal forms
  std::vector<SymbolString> normal_forms;  ///< the diverging normal forms
  std::size_t strings_checked = 0;
  std::size_t inconclusive_strings = 0;
};

/// Explores every reduction order from every string of length 1..max_len
/// over codes 1..alphabet_size. A start string whose reachable set still
/// holds reducible strings after `max_steps` rounds (or exceeds `max_nodes`)
/// makes the verdict inconclusive unless a divergence is found elsewhere.
inline ConfluenceReport check_confluence_small(const ArithmetizedSystem& sys,
                                               std::size_t alphabet_size, std::size_t max_len,
                                               std::size_t max_steps,
                                               std::size_t max_nodes = 200000) {
  double total = 0.0;
  for (std::size_t len = 1; len <= max_len; ++len)
    total += std::pow(static_cast<double>(alphabet_size), static_cast<double>(len));
  if (total > 2e6) throw RangeError("too many start strings to enumerate");

  ConfluenceReport rep;
  if (alphabet_size == 0) return rep;
  for (std::size_t len = 1; len <= max_len; ++len) {
    SymbolString s(len, 1);
    while (true) {
      ++rep.strings_checked;
      std::set<SymbolString> seen{s};
      std::set<SymbolString> normal;
      std::vector<SymbolString> frontier{s};
      bool exhausted = false;
      for (std::size_t depth = 0; !frontier.empty(); ++depth) {
        if (depth == max_steps || seen.size() > max_nodes) {
          exhausted = true;
          break;
        }
        std::vector<SymbolString> next;
        for (const auto& cur : frontier) {
          const auto ms = all_matches(cur, sys);
          if (ms.empty()) {
            normal.insert(cur);
            continue;
          }
          for (const auto& m : ms) {
            auto succ = splice(cur, sys, m);
            if (seen.insert(succ).second) next.push_back(std::move(succ));
          }
        }
        frontier = std::move(next);
      }
      if (normal.size() > 1) {
        rep.verdict = Verdict::NonConfluent;
        rep.witness = s;
        rep.normal_forms.assign(normal.begin(), std::next(normal.begin(), 2));
        return rep;
      }
      if (exhausted) ++rep.inconclusive_strings;

      std::size_t k = 0;
      while (k < len && s[k] == alphabet_size) s[k++] = 1;
      if (k == len) break;
      ++s[k];
    }
  }
  if (rep.inconclusive_strings > 0) rep.verdict = Verdict::Inconclusive;
  return rep;
}

}  // namespace sigcomp::thue
