/* Copyright 2026 The mqtm-sim Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include "mqtm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "mqtm/analysis.hpp"
#include "mqtm/compiler.hpp"
#include "mqtm/machine_text.hpp"
#include "mqtm/programs.hpp"
#include "mqtm/trials.hpp"

namespace mqtm::cli {

namespace {

using nlohmann::json;

std::string fmt10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

cplx parse_complex(const std::string& text) {
    // re | re+im i | re-im i | im i
    std::string t;
    for (char c : text)
        if (c != ' ') t += c;
    if (t.empty()) return {1.0, 0.0};
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < t.size(); i++)
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') split = i;
    try {
        if (t.back() == 'i') {
            if (split == std::string::npos) {
                std::string im = t.substr(0, t.size() - 1);
                if (im.empty() || im == "+" || im == "-") im += "1";
                return {0.0, std::stod(im)};
            }
            std::string re = t.substr(0, split);
            std::string im = t.substr(split, t.size() - split - 1);
            if (im == "+" || im == "-") im += "1";
            return {std::stod(re), std::stod(im)};
        }
        return {std::stod(t), 0.0};
    } catch (...) {
        throw std::invalid_argument("bad complex literal '" + text + "'");
    }
}

std::pair<cplx, cplx> parse_qubit_expr(const std::string& expr) {
    cplx a0(0, 0), a1(0, 0);
    bool saw = false;
    std::size_t pos = 0;
    std::string t;
    for (char c : expr)
        if (c != ' ') t += c;
    while (pos < t.size()) {
        std::size_t ket = t.find('|', pos);
        if (ket == std::string::npos || ket + 2 >= t.size() || t[ket + 2] != '>')
            throw std::invalid_argument("bad qubit expression '" + expr + "' (expected a|0>+b|1>)");
        std::string amp_text = t.substr(pos, ket - pos);
        if (!amp_text.empty() && amp_text.front() == '+') amp_text = amp_text.substr(1);
        cplx amp = amp_text.empty() || amp_text == "-" ? cplx(amp_text == "-" ? -1.0 : 1.0, 0.0)
                                                       : parse_complex(amp_text);
        char bit = t[ket + 1];
        if (bit != '0' && bit != '1')
            throw std::invalid_argument("bad basis ket |" + std::string(1, bit) + ">");
        (bit == '0' ? a0 : a1) += amp;
        saw = true;
        pos = ket + 3;
        if (pos < t.size() && t[pos] == '+') pos++;
    }
    if (!saw) throw std::invalid_argument("empty qubit expression");
    return {a0, a1};
}

}  // namespace

std::vector<cplx> parse_input_spec(const std::string& spec, std::string* warnings) {
    std::string t;
    for (char c : spec)
        if (c != ' ') t += c;
    if (t.empty()) return {};

    bool basis = true;
    for (char c : t)
        if (c != '0' && c != '1') basis = false;

    std::vector<cplx> amps;
    if (basis) {
        amps.assign(std::size_t{1} << t.size(), cplx(0, 0));
        std::size_t idx = 0;
        for (char c : t) idx = (idx << 1) | static_cast<std::size_t>(c - '0');
        amps[idx] = 1.0;
    } else {
        amps = {cplx(1, 0)};
        std::istringstream is(t);
        std::string part;
        while (std::getline(is, part, ';')) {
            auto [a0, a1] = parse_qubit_expr(part);
            std::vector<cplx> next(amps.size() * 2);
            for (std::size_t i = 0; i < amps.size(); i++) {
                next[2 * i] = amps[i] * a0;
                next[2 * i + 1] = amps[i] * a1;
            }
            amps = std::move(next);
        }
    }
    double n2 = 0;
    for (const cplx& a : amps) n2 += std::norm(a);
    double n = std::sqrt(n2);
    if (n < 1e-12) throw std::invalid_argument("input state has zero norm");
    if (std::abs(n - 1.0) > 1e-6 && warnings)
        *warnings += "input norm " + fmt10(n) + " deviates from 1; normalizing\n";
    for (cplx& a : amps) a /= n;
    return amps;
}

namespace {

struct Flags {
    std::vector<std::string> positional;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> switches;

    static Flags parse(const std::vector<std::string>& args,
                       const std::vector<std::string>& value_flags,
                       const std::vector<std::string>& switch_flags) {
        Flags f;
        for (std::size_t i = 0; i < args.size(); i++) {
            const std::string& a = args[i];
            if (a.rfind("--", 0) == 0 || (a.size() == 2 && a[0] == '-' && !isdigit(a[1]))) {
                bool is_switch = false;
                for (const auto& s : switch_flags)
                    if (a == s) {
                        f.switches[a] = true;
                        is_switch = true;
                        break;
                    }
                if (is_switch) continue;
                bool known = false;
                for (const auto& s : value_flags)
                    if (a == s) known = true;
                if (!known) throw std::invalid_argument("unknown flag " + a);
                if (i + 1 >= args.size())
                    throw std::invalid_argument("flag " + a + " needs a value");
                f.values[a] = args[++i];
            } else {
                f.positional.push_back(a);
            }
        }
        return f;
    }

    std::string get(const std::string& k, const std::string& dflt = "") const {
        auto it = values.find(k);
        return it == values.end() ? dflt : it->second;
    }
    bool has(const std::string& k) const { return values.count(k) || switches.count(k); }
};

std::uint64_t parse_u64(const std::string& s) { return std::stoull(s); }

RunOptions options_from_flags(const Flags& f) {
    RunOptions o;
    o.seed = f.has("--seed") ? parse_u64(f.get("--seed")) : 0;
    o.max_steps = f.has("--max-steps") ? std::stoll(f.get("--max-steps")) : 10000;
    o.max_qubits = f.has("--max-qubits") ? std::stoi(f.get("--max-qubits")) : kDefaultMaxQubits;
    std::string init = f.get("--init", "zero");
    if (init == "random")
        o.init.mode = InitConfig::Mode::random_product;
    else if (init != "zero")
        throw std::invalid_argument("--init must be zero or random");
    o.init.seed = f.has("--init-seed") ? parse_u64(f.get("--init-seed")) : o.seed;
    return o;
}

/// Output cells factored out of the final register (fresh cells materialize
/// as the run's init states). nullopt when entangled with the rest.
std::optional<RegisterState> output_state(const MachineDefinition&, const RunResult& r,
                                          const RunOptions& opts) {
    RegisterState reg = r.final_config.state;
    std::vector<CellId> missing;
    for (const CellId& c : r.output_cells)
        if (!reg.has_cell(c)) missing.push_back(c);
    if (!missing.empty()) {
        std::vector<QubitInit> inits;
        for (const CellId& c : missing) inits.push_back(opts.init.state_for(c));
        reg = reg.extend(missing, inits, opts.max_qubits + static_cast<int>(missing.size()));
    }
    return factor_cells(reg, r.output_cells);
}

void print_trace(std::ostream& out, const MachineDefinition& m,
                 const std::vector<TraceStep>& trace) {
    out << "trace:\n";
    for (std::size_t i = 0; i < trace.size(); i++) {
        const TraceStep& ts = trace[i];
        out << "  step " << (i + 1) << ": " << m.state_names[ts.state_before] << " "
            << m.observables[ts.observable].name << " @(";
        for (std::size_t h = 0; h < ts.heads.size(); h++) out << (h ? "," : "") << ts.heads[h];
        out << ")";
        if (ts.measured)
            out << " outcome " << ts.outcome.str() << " p=" << fmt17(ts.branch_probability);
        else
            out << " no-op";
        out << " => " << m.state_names[ts.state_after] << "\n";
    }
}

json run_result_json(const MachineDefinition& m, const RunResult& r,
                     const std::optional<RegisterState>& out_state) {
    json j;
    j["halted"] = r.halted;
    j["steps"] = r.final_config.step_count;
    j["outcomes"] = json::array();
    for (const TraceStep& ts : r.trace)
        if (ts.measured) j["outcomes"].push_back(ts.outcome.str());
    if (out_state) {
        j["output_state"] = json::array();
        for (const cplx& a : out_state->amplitudes())
            j["output_state"].push_back({{"re", a.real()}, {"im", a.imag()}});
    } else {
        j["output_state"] = nullptr;
    }
    j["final_state"] = m.state_names[r.final_config.classical_state];
    j["last_outcome"] = r.final_config.last_outcome.str();
    j["output_cells"] = json::array();
    for (const CellId& c : r.output_cells) j["output_cells"].push_back(c.str());
    j["stats"] = json::object();
    return j;
}

int cmd_run(const Flags& f, std::ostream& out, std::ostream& err) {
    if (f.positional.empty()) throw std::invalid_argument("run: machine file required");
    MachineDefinition m = load_machine_file(f.positional[0]);
    RunOptions opts = options_from_flags(f);
    std::string warnings;
    std::vector<cplx> amps = parse_input_spec(f.get("--input"), &warnings);
    if (!warnings.empty()) err << warnings;
    RegisterState input = make_input(m, amps);
    RunResult r = run(m, input, opts);
    auto out_state = output_state(m, r, opts);

    if (f.get("--format", "text") == "json") {
        out << run_result_json(m, r, out_state).dump(2) << "\n";
    } else {
        out << "halted: " << (r.halted ? "true" : "false") << "\n";
        out << "steps: " << r.final_config.step_count << "\n";
        out << "final state: " << m.state_names[r.final_config.classical_state] << "\n";
        out << "last outcome: " << r.final_config.last_outcome.str() << "\n";
        out << "output cells:";
        for (const CellId& c : r.output_cells) out << " " << c.str();
        out << "\n";
        if (out_state) {
            out << "output state:\n";
            const auto& amps2 = out_state->amplitudes();
            for (std::size_t i = 0; i < amps2.size(); i++) {
                out << "  |";
                for (std::size_t q = 0; q < r.output_cells.size(); q++)
                    out << ((i >> (r.output_cells.size() - 1 - q)) & 1);
                double mag = std::abs(amps2[i]);
                double phase = mag < 1e-12 ? 0.0 : std::arg(amps2[i]) * 180.0 / M_PI;
                out << ">: magnitude " << fmt10(mag) << " phase " << fmt10(phase) << " deg\n";
            }
        } else {
            out << "output state: entangled with the rest of the register\n";
        }
        if (f.has("--trace")) {
            print_trace(out, m, r.trace);
            out << "final register fully product: "
                << (is_fully_product(r.final_config.state) ? "true" : "false") << "\n";
        }
        if (!r.halted)
            out << "fuel exhausted at " << r.final_config.step_count << " steps\n";
    }
    return r.halted ? 0 : 2;
}

int cmd_trials(const Flags& f, std::ostream& out, std::ostream&) {
    if (f.positional.empty()) throw std::invalid_argument("trials: machine file required");
    MachineDefinition m = load_machine_file(f.positional[0]);
    RunOptions opts = options_from_flags(f);
    std::int64_t n = f.has("--trials") ? std::stoll(f.get("--trials")) : 1000;
    std::string warnings;
    std::vector<cplx> amps = parse_input_spec(f.get("--input"), &warnings);
    RegisterState input = make_input(m, amps);

    // Exact branch enumeration for the comparison table, when tractable.
    std::optional<BranchTree> tree;
    if (opts.max_steps <= 100) {
        try {
            BranchOptions bo;
            bo.max_steps = opts.max_steps;
            bo.branch_cap = 1 << 12;
            bo.prune_threshold = 1e-6;  // keeps geometric loops enumerable
            bo.max_qubits = opts.max_qubits;
            bo.init = opts.init;
            tree = branch_tree(m, input, bo);
        } catch (const std::exception&) {
            tree.reset();
        }
    }

    TrialStats stats =
        run_trials(m, input, n, opts.seed, opts, tree ? &*tree : nullptr);

    if (f.get("--format", "text") == "json") {
        json j;
        j["trials"] = stats.trials;
        j["halted_fraction"] = stats.halted_fraction;
        j["steps_mean"] = stats.steps_mean;
        j["steps_stddev"] = stats.steps_stddev;
        j["outcomes"] = json::object();
        for (const auto& [tag, count] : stats.outcome_histogram) j["outcomes"][tag] = count;
        if (!stats.branch_compare.empty()) {
            j["exact_vs_empirical"] = json::array();
            for (const auto& p : stats.branch_compare)
                j["exact_vs_empirical"].push_back(
                    {{"signature", p.signature}, {"exact", p.exact}, {"empirical", p.empirical}});
        }
        out << j.dump(2) << "\n";
    } else {
        out << "trials: " << stats.trials << "\n";
        out << "halted_fraction: " << fmt10(stats.halted_fraction) << "\n";
        out << "steps_mean: " << fmt10(stats.steps_mean) << "\n";
        out << "steps_stddev: " << fmt10(stats.steps_stddev) << "\n";
        out << "outcomes:\n";
        for (const auto& [tag, count] : stats.outcome_histogram)
            out << "  " << tag << ": " << count << "\n";
        if (!stats.branch_compare.empty()) {
            out << "exact_vs_empirical:\n";
            for (const auto& p : stats.branch_compare)
                out << "  sig=" << (p.signature.empty() ? "(none)" : p.signature)
                    << " exact=" << fmt10(p.exact) << " empirical=" << fmt10(p.empirical) << "\n";
        }
    }
    return 0;
}

int cmd_compile(const Flags& f, std::ostream& out, std::ostream&) {
    if (f.positional.empty()) throw std::invalid_argument("compile: machine file required");
    MachineDefinition m = load_machine_file(f.positional[0]);
    std::string from = f.get("--from");
    std::string to = f.get("--to");
    if (from.size() != 1 || to.size() != 1)
        throw std::invalid_argument("compile: --from and --to must name models A..G");
    std::string backend_name = f.get("--backend", "transfer");
    LoweringBackend backend;
    if (backend_name == "transfer")
        backend = LoweringBackend::transfer;
    else if (backend_name == "teleport")
        backend = LoweringBackend::teleport;
    else
        throw std::invalid_argument("--backend must be transfer or teleport");

    LoweringResult res;
    if (from == "F" && to == "G") {
        res = lower_movements(m);
    } else if (from == "A" && to == "F" && backend == LoweringBackend::transfer) {
        res = lower_same_tape_measurements(m, backend);
    } else if (from == "A" && to == "E" && backend == LoweringBackend::teleport) {
        res = lower_same_tape_measurements(m, backend);
    } else if (from == "A" && to == "G" && backend == LoweringBackend::transfer) {
        LoweringResult first = lower_same_tape_measurements(m, backend);
        res = lower_movements(first.machine);
        res.report.source_model = 'A';
        res.report.inserted_gadget_count += first.report.inserted_gadget_count;
        res.report.states_before = first.report.states_before;
        res.report.expansions.insert(res.report.expansions.begin(),
                                     first.report.expansions.begin(),
                                     first.report.expansions.end());
    } else {
        throw std::invalid_argument(
            "unsupported lowering " + from + "->" + to + " with backend " + backend_name +
            " (supported: F->G, A->F transfer, A->E teleport, A->G transfer)");
    }

    const bool as_json = f.get("--format", "text") == "json";
    if (as_json) {
        json j;
        j["source_model"] = std::string(1, res.report.source_model);
        j["target_model"] = std::string(1, res.report.target_model);
        j["states_before"] = res.report.states_before;
        j["states_after"] = res.report.states_after;
        j["inserted_gadget_count"] = res.report.inserted_gadget_count;
        j["expansions"] = json::array();
        for (const auto& e : res.report.expansions)
            j["expansions"].push_back({{"state", e.state},
                                       {"tag", e.tag},
                                       {"kind", e.kind},
                                       {"inserted_states", e.inserted_states},
                                       {"rows", e.rows_emitted}});
        if (!f.has("-o")) j["machine"] = write_machine(res.machine);
        out << j.dump(2) << "\n";
    } else {
        out << res.report.str();
    }

    if (f.has("-o")) {
        save_machine_file(res.machine, f.get("-o"));
    } else if (!as_json) {
        out << "\n" << write_machine(res.machine);
    }
    return 0;
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream&) {
    if (f.positional.empty()) throw std::invalid_argument("validate: machine file required");
    MachineDefinition m = load_machine_file(f.positional[0]);
    std::string model = f.get("--model");
    if (model.size() != 1) throw std::invalid_argument("validate: --model must name A..G");
    auto viol = check_conformance(m, ResourceModel::get(model[0]));
    if (viol.empty()) {
        out << "[]\n";
        return 0;
    }
    for (const auto& v : viol) out << v << "\n";
    return 1;
}

MachineDefinition export_gadget(const std::string& name) {
    if (name == "transfer")
        return standalone_machine(build_state_transfer(CellId{1, 0}, CellId{0, 0}));
    if (name == "bellprep")
        return standalone_machine(build_bell_prep(CellId{1, 0}, CellId{1, 1}, CellId{0, 0}));
    if (name == "teleport")
        return standalone_machine(
            build_teleport(CellId{0, 0}, CellId{1, 0}, CellId{1, 1}, CellId{0, 1}));
    if (name == "write0") return standalone_machine(build_classical_write(0, CellId{0, 0}));
    if (name == "write1") return standalone_machine(build_classical_write(1, CellId{0, 0}));
    if (name == "write0-literal")
        return standalone_machine(build_classical_write(0, CellId{0, 0}, true));
    if (name == "bitflip") return embed_classical_tm(make_bitflip_tm(), 1);
    if (name == "increment3") return embed_classical_tm(make_increment3_tm(), 3);
    if (name == "loop") {
        // Never halts: measures nothing and walks right forever.
        MachineDefinition m;
        m.tapes = {TapeSpec{}};
        m.head_tape = {0};
        m.moves = MoveSet::explicit1({-1, 0, 1});
        m.lambda0 = OutcomeTag::all_plus(1);
        m.start_positions = {0};
        int noop = m.intern_observable("I");
        m.initial_state = m.intern_state("spin");
        m.final_state = m.intern_state("qf");
        for (int i = 0; i < 2; i++)
            m.set_transition(m.initial_state, OutcomeTag::from_index(i, 1),
                             Transition{m.initial_state, noop, {1}});
        return m;
    }
    throw std::invalid_argument(
        "unknown gadget '" + name +
        "' (available: transfer bellprep teleport write0 write1 write0-literal bitflip "
        "increment3 loop)");
}

int cmd_export(const Flags& f, std::ostream& out, std::ostream&) {
    if (f.positional.empty()) throw std::invalid_argument("export: gadget name required");
    MachineDefinition m = export_gadget(f.positional[0]);
    if (f.has("-o"))
        save_machine_file(m, f.get("-o"));
    else
        out << write_machine(m);
    return 0;
}

const char* kUsage =
    "usage: mqtm <command> [args]\n"
    "\n"
    "commands:\n"
    "  run <machine.mqtm> [--input SPEC] [--seed N] [--max-steps N] [--trace]\n"
    "      [--init zero|random] [--init-seed N] [--max-qubits N] [--format text|json]\n"
    "  trials <machine.mqtm> --trials N [--input SPEC] [--seed N] [--max-steps N]\n"
    "      [--format text|json]\n"
    "  compile <machine.mqtm> --from M --to M [--backend transfer|teleport] [-o FILE]\n"
    "      [--format text|json]\n"
    "  validate <machine.mqtm> --model M\n"
    "  export <gadget> [-o FILE]\n"
    "\n"
    "input SPEC: a basis string like 011, or per-qubit amplitudes like\n"
    "'0.6|0>+0.8|1>; 1|0>' (complex literals re[+im i]). Exit codes: 0 ok,\n"
    "1 error, 2 fuel exhausted.\n";

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.empty() || args[0] == "help" || args[0] == "--help") {
            out << kUsage;
            return args.empty() ? 1 : 0;
        }
        const std::string cmd = args[0];
        std::vector<std::string> rest(args.begin() + 1, args.end());
        const std::vector<std::string> value_flags = {
            "--input", "--seed",  "--max-steps", "--trials",  "--format",    "--backend",
            "--model", "--from",  "--to",        "-o",        "--init",      "--init-seed",
            "--max-qubits"};
        const std::vector<std::string> switch_flags = {"--trace"};
        Flags f = Flags::parse(rest, value_flags, switch_flags);
        if (cmd == "run") return cmd_run(f, out, err);
        if (cmd == "trials") return cmd_trials(f, out, err);
        if (cmd == "compile") return cmd_compile(f, out, err);
        if (cmd == "validate") return cmd_validate(f, out, err);
        if (cmd == "export") return cmd_export(f, out, err);
        err << "unknown command '" << cmd << "'\n" << kUsage;
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mqtm::cli
