#pragma once

// SubLeq / AddLeq one-instruction machine.
//
// Instruction (a, b, c) at pc computes r = m[a] - m[b] (SubLeq) or
// r = m[a] + m[b] (AddLeq). When r > 0 the result is stored in m[b] and
// execution falls through to pc + 3. Otherwise m[b] is left unchanged and
// control jumps to m[c] (indirect, the default) or to c (direct). A jump
// target below zero halts. A negative a reads the next input into m[b]; a
// negative b emits m[a].
//
// Cells are sign-magnitude values of `cell_bits` bits. Results whose
// magnitude overflows are reduced modulo 2^cell_bits and keep their sign.
//
// Two machines share this contract: SignalMachine stores every cell as a
// comb word and computes through the signal ALU, and run_integer_oracle
// executes the same program on plain integers.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigcomp/alu.hpp"
#include "sigcomp/comb.hpp"
#include "sigcomp/error.hpp"

namespace sigcomp::vm {

enum class OpMode { SubLeq, AddLeq };
enum class JumpMode { Indirect, Direct };
enum class Status { Running, Halted, AwaitingInput, EmittingOutput, Diverged, Faulted };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::Halted: return "halted";
    case Status::AwaitingInput: return "awaiting-input";
    case Status::EmittingOutput: return "emitting-output";
    case Status::Diverged: return "diverged";
    case Status::Faulted: return "faulted";
  }
  return "?";
}

struct Options {
  OpMode op = OpMode::SubLeq;
  JumpMode jump = JumpMode::Indirect;
  std::size_t cell_bits = 16;
  std::size_t budget = 1000;
};

struct Instruction {
  long a = 0;
  long b = 0;
  long c = 0;
  OpMode mode = OpMode::SubLeq;
};

enum class EventKind { Arith, Input, Output };

struct TraceEvent {
  std::size_t step = 0;
  long pc = 0;
  Instruction insn;
  EventKind kind = EventKind::Arith;
  long value_a = 0;  ///< m[a], or the consumed input
  long value_b = 0;  ///< m[b] before the step (0 for output steps)
  long result = 0;   ///< r, the stored input, or the emitted value
  bool branch = false;
  long next_pc = 0;
  long write_addr = -1;  ///< -1 when nothing was written
  long write_value = 0;

  bool operator==(const TraceEvent& o) const {
    return step == o.step && pc == o.pc && insn.a == o.insn.a && insn.b == o.insn.b &&
           insn.c == o.insn.c && insn.mode == o.insn.mode && kind == o.kind &&
           value_a == o.value_a && value_b == o.value_b && result == o.result &&
           branch == o.branch && next_pc == o.next_pc && write_addr == o.write_addr &&
           write_value == o.write_value;
  }
};

/// `step pc a b c r branch`
inline std::string format_event(const TraceEvent& e) {
  std::ostringstream os;
  os << e.step << ' ' << e.pc << ' ' << e.insn.a << ' ' << e.insn.b << ' ' << e.insn.c << ' '
     << e.result << ' ' << (e.branch ? 1 : 0);
  return os.str();
}

struct RunResult {
  Status status = Status::Running;
  std::vector<long> memory;
  std::vector<long> outputs;
  std::vector<TraceEvent> trace;
  std::size_t steps = 0;
  long pc = 0;
  std::string fault;
};

/// Reduces a value to the sign-magnitude cell range.
inline long wrap_cell(long v, std::size_t bits) {
  const unsigned long mag = static_cast<unsigned long>(v < 0 ? -v : v) & ((1UL << bits) - 1UL);
  if (mag == 0) return 0;
  return v < 0 ? -static_cast<long>(mag) : static_cast<long>(mag);
}

namespace detail {

inline void check_width(std::size_t bits) {
  if (bits == 0 || bits > 62) throw RangeError("cell width must be in [1, 62]");
}

inline void check_image(const std::vector<long>& image, std::size_t bits) {
  const long limit = 1L << bits;
  for (std::size_t i = 0; i < image.size(); ++i)
    if (image[i] >= limit || image[i] <= -limit)
      throw OverflowError("cell " + std::to_string(i) + " value " + std::to_string(image[i]) +
                          " exceeds the " + std::to_string(bits) + "-bit cell width");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Signal-substrate machine

struct MachineState {
  std::vector<SignedWord> memory;
  long pc = 0;
  Status status = Status::Running;
  std::size_t step_count = 0;
  std::vector<long> inputs;
  std::size_t input_cursor = 0;
  std::optional<long> pending_output;
};

class SignalMachine {
 public:
  explicit SignalMachine(Options opts) : opts_(opts) { detail::check_width(opts_.cell_bits); }

  const Options& options() const noexcept { return opts_; }

  MachineState load(const std::vector<long>& image, std::vector<long> inputs = {}) const {
    detail::check_image(image, opts_.cell_bits);
    MachineState st;
    st.memory.reserve(image.size());
    for (long v : image) st.memory.push_back(to_cell(v));
    st.inputs = std::move(inputs);
    return st;
  }

  SignedWord to_cell(long v) const {
    v = wrap_cell(v, opts_.cell_bits);
    const auto mag = static_cast<std::uint64_t>(v < 0 ? -v : v);
    return {v < 0 ? -1 : 1, encode_word(mag, opts_.cell_bits)};
  }

  static long value(const SignedWord& w) {
    const auto mag = static_cast<long>(decode_word(w.magnitude));
    return w.sign < 0 ? -mag : mag;
  }

  /// Sign-magnitude addition on comb cells, reduced to the cell width.
  SignedWord add(const SignedWord& x, const SignedWord& y) const {
    SignedWord r{1, x.magnitude};
    if (x.sign == y.sign) {
      r.magnitude = upsa_add(x.magnitude, y.magnitude);
      r.magnitude.truncate(opts_.cell_bits);
      r.sign = x.sign;
    } else {
      const SignedWord d = minus(x.magnitude, y.magnitude);
      r.sign = x.sign * d.sign;
      r.magnitude = d.magnitude;
    }
    if (digit_sum(r.magnitude) == 0) r.sign = 1;
    return r;
  }

  SignedWord sub(const SignedWord& x, const SignedWord& y) const {
    SignedWord neg = y;
    neg.sign = -neg.sign;
    return add(x, neg);
  }

  static bool positive(const SignedWord& w) { return w.sign > 0 && digit_sum(w.magnitude) > 0; }

  /// Executes one instruction. Returns nothing when the machine stops
  /// without executing (fell off the image or ran out of input).
  std::optional<TraceEvent> step(MachineState& st) const {
    if (st.status != Status::Running) throw Error("step called on a stopped machine");
    const long size = static_cast<long>(st.memory.size());
    if (st.pc < 0 || st.pc + 2 >= size) {
      st.status = Status::Halted;
      return std::nullopt;
    }
    TraceEvent e;
    e.step = st.step_count;
    e.pc = st.pc;
    e.insn = {value(st.memory[st.pc]), value(st.memory[st.pc + 1]), value(st.memory[st.pc + 2]),
              opts_.op};
    const long a = e.insn.a, b = e.insn.b, c = e.insn.c;
    auto check = [&](long addr, const char* what) {
      if (addr < 0 || addr >= size)
        throw AddressError(std::string(what) + " address " + std::to_string(addr) +
                           " out of range at pc " + std::to_string(st.pc));
    };

    if (a < 0) {
      if (b < 0) throw AddressError("input and output requested at pc " + std::to_string(st.pc));
      check(b, "input target");
      if (st.input_cursor >= st.inputs.size()) {
        st.status = Status::AwaitingInput;
        return std::nullopt;
      }
      const SignedWord in = to_cell(st.inputs[st.input_cursor++]);
      e.kind = EventKind::Input;
      e.value_a = value(in);
      e.value_b = value(st.memory[b]);
      e.result = e.value_a;
      st.memory[b] = in;
      e.write_addr = b;
      e.write_value = e.result;
      e.next_pc = st.pc + 3;
    } else if (b < 0) {
      check(a, "output source");
      e.kind = EventKind::Output;
      e.value_a = value(st.memory[a]);
      e.result = e.value_a;
      e.next_pc = st.pc + 3;
      st.pending_output = e.result;
      st.status = Status::EmittingOutput;
    } else {
      check(a, "a");
      check(b, "b");
      const SignedWord& ma = st.memory[a];
      const SignedWord& mb = st.memory[b];
      e.value_a = value(ma);
      e.value_b = value(mb);
      const SignedWord r = opts_.op == OpMode::SubLeq ? sub(ma, mb) : add(ma, mb);
      e.result = value(r);
      if (positive(r)) {
        st.memory[b] = r;
        e.write_addr = b;
        e.write_value = e.result;
        e.next_pc = st.pc + 3;
      } else {
        e.branch = true;
        if (opts_.jump == JumpMode::Indirect) {
          check(c, "jump cell");
          e.next_pc = value(st.memory[c]);
        } else {
          e.next_pc = c;
        }
        if (e.next_pc < 0) st.status = Status::Halted;
      }
    }
    st.pc = e.next_pc;
    ++st.step_count;
    return e;
  }

  RunResult run(const std::vector<long>& image, std::vector<long> inputs = {}) const {
    MachineState st = load(image, std::move(inputs));
    RunResult res;
    while (st.status == Status::Running) {
      if (st.step_count >= opts_.budget) {
        st.status = Status::Diverged;
        break;
      }
      try {
        auto e = step(st);
        if (e) res.trace.push_back(*e);
      } catch (const AddressError& err) {
        st.status = Status::Faulted;
        res.fault = err.what();
      }
      if (st.status == Status::EmittingOutput) {
        res.outputs.push_back(*st.pending_output);
        st.pending_output.reset();
        st.status = Status::Running;
      }
    }
    res.status = st.status;
    res.steps = st.step_count;
    res.pc = st.pc;
    for (const auto& cell : st.memory) res.memory.push_back(value(cell));
    return res;
  }

 private:
  Options opts_;
};

inline RunResult run_signal(const std::vector<long>& image, const std::vector<long>& inputs,
                            const Options& opts) {
  return SignalMachine(opts).run(image, inputs);
}

// ---------------------------------------------------------------------------
// Integer reference machine

inline RunResult run_integer_oracle(const std::vector<long>& image,
                                    const std::vector<long>& inputs, const Options& opts) {
  detail::check_width(opts.cell_bits);
  detail::check_image(image, opts.cell_bits);
  RunResult res;
  std::vector<long> m = image;
  const long size = static_cast<long>(m.size());
  std::size_t next_input = 0;
  long pc = 0;
  std::size_t steps = 0;
  Status status = Status::Running;

  while (status == Status::Running) {
    if (steps >= opts.budget) {
      status = Status::Diverged;
      break;
    }
    if (pc < 0 || pc + 2 >= size) {
      status = Status::Halted;
      break;
    }
    const long a = m[pc], b = m[pc + 1], c = m[pc + 2];
    auto valid = [&](long addr) { return addr >= 0 && addr < size; };
    TraceEvent e;
    e.step = steps;
    e.pc = pc;
    e.insn = {a, b, c, opts.op};
    if (a < 0) {
      if (b < 0 || !valid(b)) {
        status = Status::Faulted;
        res.fault = "bad input target at pc " + std::to_string(pc);
        break;
      }
      if (next_input >= inputs.size()) {
        status = Status::AwaitingInput;
        break;
      }
      const long v = wrap_cell(inputs[next_input++], opts.cell_bits);
      e.kind = EventKind::Input;
      e.value_a = v;
      e.value_b = m[b];
      e.result = v;
      e.write_addr = b;
      e.write_value = v;
      m[b] = v;
      e.next_pc = pc + 3;
    } else if (b < 0) {
      if (!valid(a)) {
        status = Status::Faulted;
        res.fault = "bad output source at pc " + std::to_string(pc);
        break;
      }
      e.kind = EventKind::Output;
      e.value_a = m[a];
      e.result = m[a];
      e.next_pc = pc + 3;
      res.outputs.push_back(m[a]);
    } else {
      if (!valid(a) || !valid(b)) {
        status = Status::Faulted;
        res.fault = "operand address out of range at pc " + std::to_string(pc);
        break;
      }
      e.value_a = m[a];
      e.value_b = m[b];
      const long r = wrap_cell(opts.op == OpMode::SubLeq ? m[a] - m[b] : m[a] + m[b],
                               opts.cell_bits);
      e.result = r;
      if (r > 0) {
        m[b] = r;
        e.write_addr = b;
        e.write_value = r;
        e.next_pc = pc + 3;
      } else {
        e.branch = true;
        if (opts.jump == JumpMode::Indirect) {
          if (!valid(c)) {
            status = Status::Faulted;
            res.fault = "jump cell out of range at pc " + std::to_string(pc);
            break;
          }
          e.next_pc = m[c];
        } else {
          e.next_pc = c;
        }
        if (e.next_pc < 0) status = Status::Halted;
      }
    }
    pc = e.next_pc;
    ++steps;
    res.trace.push_back(e);
  }
  res.status = status;
  res.memory = std::move(m);
  res.steps = steps;
  res.pc = pc;
  return res;
}

/// Rebuilds the final memory by applying each event's write to the image.
inline std::vector<long> replay(std::vector<long> image, const std::vector<TraceEvent>& trace) {
  for (const auto& e : trace) {
    if (e.write_addr < 0) continue;
    if (e.write_addr >= static_cast<long>(image.size()))
      throw AddressError("trace writes outside the image");
    image[e.write_addr] = e.write_value;
  }
  return image;
}

// ---------------------------------------------------------------------------
// Assembler

struct Program {
  std::vector<long> image;
  std::map<std::string, long> symbols;
  std::vector<std::size_t> source_lines;  ///< source line of each cell
};

namespace detail {

inline bool is_label_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  return true;
}

inline bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  out = v;
  return true;
}

/// Operand forms: integer, label, label+n, label-n, ?, ?+n, ?-n.
/// `?` is the address of the cell following the operand.
inline long resolve_operand(const std::string& tok, long addr,
                            const std::map<std::string, long>& symbols, std::size_t line) {
  long v = 0;
  if (parse_long(tok, v)) return v;
  std::string base = tok;
  long offset = 0;
  const auto sign = tok.find_first_of("+-", 1);
  if (sign != std::string::npos) {
    base = tok.substr(0, sign);
    if (!parse_long(tok.substr(sign), offset))
      throw ParseError(line, "malformed operand '" + tok + "'");
  }
  if (base == "?") return addr + 1 + offset;
  if (!is_label_name(base)) throw ParseError(line, "malformed operand '" + tok + "'");
  const auto it = symbols.find(base);
  if (it == symbols.end()) throw ParseError(line, "unknown label '" + base + "'");
  return it->second + offset;
}

}  // namespace detail

/// Lines hold three operands or a `.data v...` directive, optionally preceded
/// by `name:` labels. `#` starts a comment.
inline Program assemble(const std::string& source) {
  struct Pending {
    std::string token;
    std::size_t line;
  };
  Program prog;
  std::vector<Pending> cells;
  std::istringstream in(source);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    std::size_t i = 0;
    while (i < toks.size() && toks[i].size() > 1 && toks[i].back() == ':') {
      const std::string name = toks[i].substr(0, toks[i].size() - 1);
      if (!detail::is_label_name(name)) throw ParseError(line_no, "bad label name '" + name + "'");
      if (!prog.symbols.emplace(name, static_cast<long>(cells.size())).second)
        throw ParseError(line_no, "duplicate label '" + name + "'");
      ++i;
    }
    if (i == toks.size()) continue;
    if (toks[i] == ".data") {
      for (++i; i < toks.size(); ++i) cells.push_back({toks[i], line_no});
      continue;
    }
    if (toks.size() - i != 3)
      throw ParseError(line_no, "expected three operands, found " + std::to_string(toks.size() - i));
    for (; i < toks.size(); ++i) cells.push_back({toks[i], line_no});
  }
  prog.image.reserve(cells.size());
  for (std::size_t addr = 0; addr < cells.size(); ++addr) {
    prog.image.push_back(detail::resolve_operand(cells[addr].token, static_cast<long>(addr),
                                                 prog.symbols, cells[addr].line));
    prog.source_lines.push_back(cells[addr].line);
  }
  return prog;
}

/// Emits an image as `.data` lines that assemble back to the same image.
inline std::string emit_image(const std::vector<long>& image, std::size_t per_line = 3) {
  std::ostringstream os;
  for (std::size_t i = 0; i < image.size(); ++i) {
    os << (i % per_line == 0 ? ".data" : "") << ' ' << image[i];
    if (i % per_line == per_line - 1 || i + 1 == image.size()) os << '\n';
  }
  return os.str();
}

}  // namespace sigcomp::vm
