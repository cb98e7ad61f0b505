#pragma once

// Command-line front end. dispatch() returns 0 on success, 1 on a domain
// error and 2 on a usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigcomp/alu.hpp"
#include "sigcomp/comb.hpp"
#include "sigcomp/error.hpp"
#include "sigcomp/io.hpp"
#include "sigcomp/reservoir.hpp"
#include "sigcomp/thue.hpp"
#include "sigcomp/vm.hpp"

namespace sigcomp::cli {

/// Command line that parses but cannot be acted on; exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace detail {

/// Writes to --out when given, otherwise to the output stream.
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    io::write_file(path, text);
}

struct OpArgs {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::size_t bits = 16;
  int k = 1;
};

inline std::string run_op(const std::string& name, const OpArgs& o) {
  const CombWord x = encode_word(o.a, o.bits);
  const auto y = [&] { return encode_word(o.b, o.bits); };
  if (name == "xor") return std::to_string(decode_word(xor_op(x, y())));
  if (name == "and") return std::to_string(decode_word(linear_logic(LogicKind::And, x, y())));
  if (name == "or") return std::to_string(decode_word(linear_logic(LogicKind::Or, x, y())));
  if (name == "add") return std::to_string(decode_word(upsa_add(x, y())));
  if (name == "mul") return std::to_string(decode_word(multiply(x, y())));
  if (name == "not") return std::to_string(decode_word(complement(x)));
  if (name == "shift") return std::to_string(decode_word(shift_word(x, o.k)));
  if (name == "hamming") return std::to_string(hamming_distance(x, y()));
  if (name == "popcount") return std::to_string(digit_sum(x));
  if (name == "sub") {
    const SignedWord d = minus(x, y());
    const std::uint64_t mag = decode_word(d.magnitude);
    return (d.sign < 0 && mag != 0 ? "-" : "") + std::to_string(mag);
  }
  throw Error("unknown operation '" + name + "'");
}

struct SubleqArgs {
  std::string file;
  std::vector<long> inputs;
  std::string mode = "signal";
  std::string jump = "indirect";
  std::string op = "subleq";
  std::size_t bits = 16;
  std::size_t budget = 1000;
  bool trace = false;
  std::string out;
};

inline int run_subleq(const SubleqArgs& a, std::ostream& out, std::ostream& err) {
  const auto prog = std::get<vm::Program>(io::parse_inputs(a.file, io::InputKind::Subleq));
  vm::Options opts;
  opts.op = a.op == "addleq" ? vm::OpMode::AddLeq : vm::OpMode::SubLeq;
  opts.jump = a.jump == "direct" ? vm::JumpMode::Direct : vm::JumpMode::Indirect;
  opts.cell_bits = a.bits;
  opts.budget = a.budget;
  const vm::RunResult res = a.mode == "integer" ? vm::run_integer_oracle(prog.image, a.inputs, opts)
                                                : vm::run_signal(prog.image, a.inputs, opts);
  if (a.trace) {
    std::string text;
    for (const auto& e : res.trace) text += vm::format_event(e) + "\n";
    emit(a.out, text, out);
  }
  for (long v : res.outputs) out << "output " << v << "\n";
  out << "status " << vm::to_string(res.status) << " steps " << res.steps << " pc " << res.pc << "\n";
  if (res.status == vm::Status::Faulted) {
    err << "error: " << res.fault << "\n";
    return 1;
  }
  return 0;
}

struct ThueArgs {
  std::string file;
  std::string input;
  std::string strategy = "leftmost";
  std::uint64_t seed = 1;
  std::size_t budget = 1000;
  std::string mode = "direct";
  std::size_t agents = 1;
  bool trace = false;
  std::string out;
};

inline int run_thue(const ThueArgs& a, std::ostream& out) {
  thue::RuleTable table = std::get<thue::RuleTable>(io::parse_inputs(a.file, io::InputKind::Thue));
  const thue::SymbolString start = table.intern(a.input);
  const auto sys = thue::arithmetize(table);
  thue::Strategy strategy =
      a.strategy == "random" ? thue::Strategy::random(a.seed) : thue::Strategy::leftmost();

  thue::Reduction red;
  double deviation = 0.0;
  if (a.mode == "holographic") {
    const auto roster = thue::AgentRoster::round_robin(sys.rules.size(), a.agents);
    thue::HolographicField field = thue::emit_field(start, sys);
    while (true) {
      if (red.steps == a.budget) {
        const auto d = thue::decode_field(field);
        red.terminated = thue::all_matches(d.s, sys).empty();
        break;
      }
      auto st = thue::holographic_step(field, sys, roster, strategy);
      deviation = std::max(deviation, st.deviation);
      if (!st.applied) {
        red.terminated = true;
        break;
      }
      field = std::move(st.field);
      red.trace.push_back({red.steps, *st.applied, field.length});
      ++red.steps;
    }
    const auto d = thue::decode_field(field);
    deviation = std::max(deviation, d.deviation);
    red.final = d.s;
  } else {
    red = thue::reduce(start, sys, strategy, a.budget);
  }
  if (a.trace) emit(a.out, thue::format_trace(red, table), out);
  out << table.decode(red.final) << "\n";
  out << "steps " << red.steps << " normal-form " << (red.terminated ? "yes" : "no");
  if (a.mode == "holographic") out << " deviation " << io::format_double(deviation);
  out << "\n";
  return 0;
}

struct ReservoirArgs {
  std::string file;
  std::string task = "parity";
  long param = -1;
  std::size_t train = 2000;
  std::size_t test = 500;
  std::uint64_t seed = 1;
  std::string out;
  std::string history;
};

inline int run_reservoir(const ReservoirArgs& a, std::ostream& out) {
  const auto cfg = std::get<reservoir::Config>(io::parse_inputs(a.file, io::InputKind::Reservoir));
  const std::size_t param =
      a.param >= 0 ? static_cast<std::size_t>(a.param) : (a.task == "parity" ? 2U : 0U);
  const auto task = a.task == "parity" ? reservoir::Task::parity(param) : reservoir::Task::memory(param);
  const auto rep = reservoir::evaluate_task(cfg, task, a.seed, a.train, a.test);
  emit(a.out, io::format_accuracy_csv(a.task, param, rep), out);
  if (!a.history.empty()) {
    const auto data = reservoir::collect(cfg, task, a.seed, a.train + a.test);
    auto st = reservoir::make_reservoir(cfg);
    for (std::uint8_t z : data.inputs) reservoir::rc_update(st, std::span<const std::uint8_t>(&z, 1));
    io::write_file(a.history, io::format_history_csv(st));
  }
  return 0;
}

inline int check_confluence(const std::string& file, std::size_t max_len, std::size_t budget,
                            std::ostream& out) {
  const auto table = std::get<thue::RuleTable>(io::parse_inputs(file, io::InputKind::Thue));
  const auto sys = thue::arithmetize(table);
  const auto rep = thue::check_confluence_small(sys, table.alphabet.size(), max_len, budget);
  out << thue::to_string(rep.verdict) << " strings " << rep.strings_checked << " inconclusive "
      << rep.inconclusive_strings << "\n";
  if (rep.verdict == thue::Verdict::NonConfluent) {
    out << "witness " << table.decode(rep.witness) << "\n";
    for (const auto& nf : rep.normal_forms) out << "normal-form " << table.decode(nf) << "\n";
  }
  return 0;
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frequency-comb signal computing toolkit", "sigcomp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::function<int()> action;

  // encode
  std::uint64_t enc_value = 0;
  std::size_t enc_bits = 16;
  double enc_c0 = 1.0, enc_dw = 1.0;
  std::string enc_out;
  auto* encode = app.add_subcommand("encode", "Write the comb file of an integer");
  encode->add_option("--value", enc_value, "Integer to encode")->required();
  encode->add_option("--bits", enc_bits, "Word length L")->capture_default_str();
  encode->add_option("--c0", enc_c0, "Slot amplitude")->capture_default_str();
  encode->add_option("--dw", enc_dw, "Slot spacing in rad/s")->capture_default_str();
  encode->add_option("--out", enc_out, "Output file (default: stdout)");
  encode->callback([&] {
    action = [&] {
      detail::emit(enc_out, io::format_comb(encode_word(enc_value, enc_bits, enc_c0, enc_dw)), out);
      return 0;
    };
  });

  // decode
  std::string dec_file;
  auto* decode = app.add_subcommand("decode", "Read a comb file back to an integer by PSI");
  decode->add_option("file", dec_file, "Comb file")->required();
  decode->callback([&] {
    action = [&] {
      const auto w = std::get<CombWord>(io::parse_inputs(dec_file, io::InputKind::Comb));
      out << decode_word(w) << "\n";
      return 0;
    };
  });

  // op
  detail::OpArgs op_args;
  auto* op = app.add_subcommand("op", "Signal-domain arithmetic and logic on encoded words");
  op->require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> ops = {
      {"xor", "Bitwise exclusive or"},     {"and", "Bitwise and"},
      {"or", "Bitwise or"},                {"add", "Sum (the word may grow)"},
      {"sub", "Signed difference a - b"},  {"mul", "Product (the word may grow)"},
      {"not", "Complement of a"},          {"shift", "Shift a by k bits (negative: down)"},
      {"hamming", "Hamming distance"},     {"popcount", "Digit sum of a"}};
  for (const auto& [name, help] : ops) {
    auto* sub = op->add_subcommand(name, help);
    sub->add_option("--a", op_args.a, "First operand")->required();
    const bool unary = name == "not" || name == "shift" || name == "popcount";
    if (!unary) sub->add_option("--b", op_args.b, "Second operand")->required();
    if (name == "shift") sub->add_option("--k", op_args.k, "Shift distance")->capture_default_str();
    sub->add_option("--bits", op_args.bits, "Word length L")->capture_default_str();
    sub->callback([&, n = name] {
      action = [&, n] {
        out << detail::run_op(n, op_args) << "\n";
        return 0;
      };
    });
  }

  // run-subleq
  detail::SubleqArgs sq;
  auto* subleq = app.add_subcommand("run-subleq", "Assemble and run a SubLeq/AddLeq program");
  subleq->add_option("file", sq.file, "Assembly file")->required();
  subleq->add_option("--input", sq.inputs, "Input values, consumed in order")->delimiter(',');
  subleq->add_option("--mode", sq.mode, "Machine")->check(CLI::IsMember({"signal", "integer"}))->capture_default_str();
  subleq->add_option("--jump", sq.jump, "Jump addressing")->check(CLI::IsMember({"indirect", "direct"}))->capture_default_str();
  subleq->add_option("--op", sq.op, "Instruction")->check(CLI::IsMember({"subleq", "addleq"}))->capture_default_str();
  subleq->add_option("--bits", sq.bits, "Cell width")->capture_default_str();
  subleq->add_option("--budget", sq.budget, "Step budget")->capture_default_str();
  subleq->add_flag("--trace", sq.trace, "Emit the `step pc a b c r branch` trace");
  subleq->add_option("--out", sq.out, "Trace file (default: stdout)");
  subleq->callback([&] { action = [&] { return detail::run_subleq(sq, out, err); }; });

  // run-thue
  detail::ThueArgs th;
  auto* thue_cmd = app.add_subcommand("run-thue", "Reduce a string with a semi-Thue rule file");
  thue_cmd->add_option("file", th.file, "Rule file")->required();
  thue_cmd->add_option("--input", th.input, "Start string")->required();
  thue_cmd->add_option("--strategy", th.strategy, "Match selection")->check(CLI::IsMember({"leftmost", "random"}))->capture_default_str();
  thue_cmd->add_option("--seed", th.seed, "Seed for the random strategy")->capture_default_str();
  thue_cmd->add_option("--budget", th.budget, "Step budget")->capture_default_str();
  thue_cmd->add_option("--mode", th.mode, "Engine")->check(CLI::IsMember({"direct", "holographic"}))->capture_default_str();
  thue_cmd->add_option("--agents", th.agents, "Agents sharing the rules (holographic mode)")->capture_default_str();
  thue_cmd->add_flag("--trace", th.trace, "Emit the `step pos rule lhs rhs |s|` trace");
  thue_cmd->add_option("--out", th.out, "Trace file (default: stdout)");
  thue_cmd->callback([&] { action = [&] { return detail::run_thue(th, out); }; });

  // run-reservoir
  detail::ReservoirArgs rv;
  auto* res_cmd = app.add_subcommand("run-reservoir", "Train and score a CA reservoir readout");
  res_cmd->add_option("file", rv.file, "Reservoir config file")->required();
  res_cmd->add_option("--task", rv.task, "Task")->check(CLI::IsMember({"parity", "memory"}))->capture_default_str();
  res_cmd->add_option("--param", rv.param, "Parity lag or memory delay (default 2 / 0)");
  res_cmd->add_option("--train", rv.train, "Training steps")->capture_default_str();
  res_cmd->add_option("--test", rv.test, "Test steps")->capture_default_str();
  res_cmd->add_option("--seed", rv.seed, "Seed of the input sequence")->capture_default_str();
  res_cmd->add_option("--out", rv.out, "Accuracy CSV file (default: stdout)");
  res_cmd->add_option("--history", rv.history, "Also write the lattice history CSV here");
  res_cmd->callback([&] { action = [&] { return detail::run_reservoir(rv, out); }; });

  // check-confluence
  std::string cc_file;
  std::size_t cc_len = 5, cc_budget = 64;
  auto* conf = app.add_subcommand("check-confluence", "Bounded confluence check over short strings");
  conf->add_option("file", cc_file, "Rule file")->required();
  conf->add_option("--max-len", cc_len, "Longest start string")->capture_default_str();
  conf->add_option("--budget", cc_budget, "Reduction depth per start string")->capture_default_str();
  conf->callback([&] { action = [&] { return detail::check_confluence(cc_file, cc_len, cc_budget, out); }; });

  // emit-spectrum
  std::string sp_file, sp_out;
  std::optional<std::uint64_t> sp_value;
  std::size_t sp_bits = 16;
  auto* spec = app.add_subcommand("emit-spectrum", "Write the slot spectrum of a word as CSV");
  auto* sp_file_opt = spec->add_option("file", sp_file, "Comb file");
  auto* sp_value_opt = spec->add_option("--value", sp_value, "Encode this integer instead of reading a file");
  sp_file_opt->excludes(sp_value_opt);
  spec->add_option("--bits", sp_bits, "Word length for --value")->capture_default_str();
  spec->add_option("--out", sp_out, "CSV file (default: stdout)");
  spec->callback([&] {
    action = [&] {
      CombWord w = sp_value ? encode_word(*sp_value, sp_bits)
                 : !sp_file.empty() ? std::get<CombWord>(io::parse_inputs(sp_file, io::InputKind::Comb))
                 : throw UsageError("emit-spectrum needs a comb file or --value");
      detail::emit(sp_out, io::format_spectrum_csv(w), out);
      return 0;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* failing = &app;
    for (const CLI::App* sub = &app; sub;) {
      failing = sub;
      const auto parsed = sub->get_subcommands();
      sub = parsed.empty() ? nullptr : parsed.front();
    }
    err << failing->help();
    return 2;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sigcomp::cli
