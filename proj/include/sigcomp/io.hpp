#pragma once

// Text and CSV formats for every module, plus a typed file loader.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "sigcomp/comb.hpp"
#include "sigcomp/error.hpp"
#include "sigcomp/reservoir.hpp"
#include "sigcomp/thue.hpp"
#include "sigcomp/vm.hpp"

namespace sigcomp::io {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ls(line);
  std::vector<std::string> toks;
  for (std::string t; ls >> t;) toks.push_back(t);
  return toks;
}

inline void strip_comment(std::string& line) {
  if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
}

/// Splits `key=value`; throws ParseError on anything else.
inline std::pair<std::string, std::string> key_value(const std::string& tok, std::size_t line) {
  const auto eq = tok.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
    throw ParseError(line, "expected key=value, found '" + tok + "'");
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

template <class T>
T number_field(const std::string& key, const std::string& value, std::size_t line) {
  T out{};
  if (!parse_number(value, out)) throw ParseError(line, "bad value for " + key + ": '" + value + "'");
  return out;
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Comb words

/// `comb L=<int> c0=<float> dw=<float>` then the 2L slot amplitudes.
inline std::string format_comb(const CombWord& w) {
  std::string out = "comb L=" + std::to_string(w.bits()) + " c0=" + format_double(w.c0()) +
                    " dw=" + format_double(w.dw()) + "\n";
  const auto slots = w.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) out += ' ';
    out += format_double(slots[i]);
  }
  return out + "\n";
}

inline CombWord parse_comb(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  std::vector<std::string> header;
  std::vector<double> slots;
  std::size_t hline = 0, slot_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    detail::strip_comment(raw);
    auto toks = detail::split_ws(raw);
    if (toks.empty()) continue;
    if (header.empty()) {
      if (toks.front() != "comb") throw ParseError(line, "expected a 'comb' header");
      header = std::move(toks);
      hline = line;
      continue;
    }
    if (slot_line != 0) throw ParseError(line, "unexpected content after the slot line");
    slot_line = line;
    for (const auto& t : toks) slots.push_back(detail::number_field<double>("slot", t, line));
  }
  if (header.empty()) throw ParseError(line == 0 ? 1 : line, "missing 'comb' header");
  std::size_t bits = 0;
  double c0 = 0.0, dw = 0.0;
  bool have_l = false, have_c0 = false, have_dw = false;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto [key, value] = detail::key_value(header[i], hline);
    if (key == "L") {
      bits = detail::number_field<std::size_t>(key, value, hline);
      have_l = true;
    } else if (key == "c0") {
      c0 = detail::number_field<double>(key, value, hline);
      have_c0 = true;
    } else if (key == "dw") {
      dw = detail::number_field<double>(key, value, hline);
      have_dw = true;
    } else {
      throw ParseError(hline, "unknown header key '" + key + "'");
    }
  }
  if (!have_l || !have_c0 || !have_dw) throw ParseError(hline, "header needs L, c0 and dw");
  if (slot_line == 0) throw ParseError(line + 1, "missing slot amplitudes");
  if (slots.size() != 2 * bits)
    throw ParseError(slot_line, "expected " + std::to_string(2 * bits) + " amplitudes, found " +
                                    std::to_string(slots.size()));
  try {
    return CombWord::from_slots(std::move(slots), c0, dw);
  } catch (const Error& e) {
    throw ParseError(slot_line, e.what());
  }
}

/// `slot_index,frequency_rad_s,amplitude` rows with a header.
inline std::string format_spectrum_csv(const CombWord& w) {
  std::string out = "slot_index,frequency_rad_s,amplitude\n";
  const auto slots = w.slots();
  for (std::size_t n = 0; n < slots.size(); ++n)
    out += std::to_string(n) + "," + format_double(w.frequency(n)) + "," + format_double(slots[n]) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Reservoir configuration

/// `rule= D= width= iters= seed= lambda=` plus optional `inject=` and
/// `inputs=`. Tokens may be spread over several lines.
inline reservoir::Config parse_reservoir_config(std::string_view text) {
  reservoir::Config cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line;
    detail::strip_comment(raw);
    for (const auto& tok : detail::split_ws(raw)) {
      const auto [key, value] = detail::key_value(tok, line);
      if (!seen.insert(key).second) throw ParseError(line, "duplicate key '" + key + "'");
      if (key == "rule") cfg.rule = detail::number_field<std::uint64_t>(key, value, line);
      else if (key == "D") cfg.neighborhood = detail::number_field<std::size_t>(key, value, line);
      else if (key == "width") cfg.width = detail::number_field<std::size_t>(key, value, line);
      else if (key == "iters") cfg.iters = detail::number_field<std::size_t>(key, value, line);
      else if (key == "seed") cfg.seed = detail::number_field<std::uint64_t>(key, value, line);
      else if (key == "lambda") cfg.lambda = detail::number_field<double>(key, value, line);
      else if (key == "inject") cfg.inject = detail::number_field<std::size_t>(key, value, line);
      else if (key == "inputs") cfg.inputs = detail::number_field<std::size_t>(key, value, line);
      else throw ParseError(line, "unknown key '" + key + "'");
    }
  }
  for (const char* key : {"rule", "D", "width", "iters", "seed", "lambda"})
    if (!seen.count(key)) throw ParseError(line == 0 ? 1 : line, std::string("missing key '") + key + "'");
  try {
    reservoir::make_reservoir(cfg);
  } catch (const Error& e) {
    throw ParseError(1, e.what());
  }
  return cfg;
}

inline std::string format_reservoir_config(const reservoir::Config& cfg) {
  std::string out = "rule=" + std::to_string(cfg.rule) + " D=" + std::to_string(cfg.neighborhood) +
                    " width=" + std::to_string(cfg.width) + " iters=" + std::to_string(cfg.iters) +
                    " seed=" + std::to_string(cfg.seed) + " lambda=" + format_double(cfg.lambda);
  if (cfg.inject) out += " inject=" + std::to_string(cfg.inject);
  if (cfg.inputs != 1) out += " inputs=" + std::to_string(cfg.inputs);
  return out + "\n";
}

/// One row per snapshot: input step, iteration, input bits, lattice bits.
inline std::string format_history_csv(const reservoir::ReservoirState& st) {
  std::string out = "step,iter,input,lattice\n";
  const std::size_t iters = st.config.iters;
  for (std::size_t k = 0; k < st.history.size(); ++k) {
    const std::size_t n = k / iters;
    out += std::to_string(n) + "," + std::to_string(k % iters) + ",";
    for (auto b : st.input_history.at(n)) out += b ? '1' : '0';
    out += ',';
    for (auto b : st.history[k]) out += b ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::string format_accuracy_csv(const std::string& task, std::size_t param,
                                       const reservoir::TaskReport& rep) {
  return "task,param,train,test,accuracy,baseline,margin\n" + task + "," + std::to_string(param) +
         "," + std::to_string(rep.train) + "," + std::to_string(rep.test) + "," +
         format_double(rep.accuracy) + "," + format_double(rep.baseline) + "," +
         format_double(rep.margin) + "\n";
}

// ---------------------------------------------------------------------------
// Typed loading

enum class InputKind { Comb, Subleq, Thue, Reservoir };

using Parsed = std::variant<CombWord, vm::Program, thue::RuleTable, reservoir::Config>;

inline Parsed parse_text(std::string_view text, InputKind kind) {
  switch (kind) {
    case InputKind::Comb: return parse_comb(text);
    case InputKind::Subleq: return vm::assemble(std::string(text));
    case InputKind::Thue: return thue::parse_rules(text);
    case InputKind::Reservoir: return parse_reservoir_config(text);
  }
  throw Error("unknown input kind");
}

inline Parsed parse_inputs(const std::string& path, InputKind kind) {
  return parse_text(read_file(path), kind);
}

}  // namespace sigcomp::io
