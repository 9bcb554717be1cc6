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

#include "mqtm/machine_text.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace mqtm {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::int64_t parse_int(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError(line, "expected an integer, got '" + s + "'");
    }
}

std::vector<std::int64_t> parse_int_tuple(const std::string& text, int k, int line) {
    std::string t = trim(text);
    if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    std::vector<std::int64_t> out;
    for (const std::string& part : split_on(t, ','))
        if (!part.empty()) out.push_back(parse_int(part, line));
    if (static_cast<int>(out.size()) != k)
        throw ParseError(line, "expected " + std::to_string(k) + " components, got '" + text + "'");
    return out;
}

MoveComponent parse_move_component(const std::string& text, int line) {
    std::string t = trim(text);
    if (t == "Z" || t == "z") return MoveComponent{true, {}};
    if (t.size() >= 2 && t.front() == '{' && t.back() == '}') {
        MoveComponent c;
        for (const std::string& part : split_on(t.substr(1, t.size() - 2), ','))
            if (!part.empty()) c.allowed.push_back(parse_int(part, line));
        if (c.allowed.empty()) throw ParseError(line, "empty movement component '" + text + "'");
        return c;
    }
    throw ParseError(line, "bad movement component '" + t + "' (use Z or {a,b,...})");
}

}  // namespace

MachineDefinition parse_machine(const std::string& text) {
    MachineDefinition m;
    m.head_tape.clear();
    m.tapes.clear();
    m.start_positions.clear();

    bool have_tapes = false, have_heads = false, have_moves = false, have_obs = false;
    bool have_initial = false, have_final = false, have_lambda0 = false, have_start = false;
    bool have_output = false;
    std::string initial_name, final_name;
    // input resolves after `start:` is known
    int input_head = 0;
    bool input_by_head = true;
    int pending_input_tape = 0;
    std::int64_t pending_input_origin = 0;

    struct PendingRow {
        int line;
        std::string from, tag, to, obs, move;
    };
    std::vector<PendingRow> rows;

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        line++;
        std::string s = raw;
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;

        if (s.find("->") != std::string::npos) {
            auto toks = split_ws(s);
            if (toks.size() != 6 || toks[2] != "->")
                throw ParseError(line, "transition rows read: <q> <tag|_> -> <q'> <obs> (<d,...>)");
            rows.push_back(PendingRow{line, toks[0], toks[1], toks[3], toks[4], toks[5]});
            continue;
        }

        std::size_t colon = s.find(':');
        if (colon == std::string::npos)
            throw ParseError(line, "expected 'key: value' or a transition row");
        std::string key = trim(s.substr(0, colon));
        std::string val = trim(s.substr(colon + 1));

        if (key == "tapes") {
            for (const std::string& part : split_on(val, ',')) {
                if (part == "inf")
                    m.tapes.push_back(TapeSpec{});
                else
                    m.tapes.push_back(TapeSpec{parse_int(part, line)});
            }
            have_tapes = true;
        } else if (key == "heads") {
            auto toks = split_ws(val);
            if (toks.empty()) throw ParseError(line, "heads: <k> (<tape,...>)");
            int k = static_cast<int>(parse_int(toks[0], line));
            if (k < 1 || k > 2) throw ParseError(line, "head count must be 1 or 2");
            if (toks.size() >= 2) {
                auto tup = parse_int_tuple(toks[1], k, line);
                for (std::int64_t t : tup) m.head_tape.push_back(static_cast<int>(t));
            } else {
                for (int h = 0; h < k; h++) m.head_tape.push_back(h);
            }
            have_heads = true;
        } else if (key == "moves") {
            for (const std::string& comp : split_on(val, 'x'))
                m.moves.comps.push_back(parse_move_component(comp, line));
            have_moves = true;
        } else if (key == "observables") {
            if (val.size() == 1 && val[0] >= 'A' && val[0] <= 'G') {
                for (const auto& o : named_set(val[0]).members) m.intern_observable(o);
            } else {
                for (const std::string& name : split_on(val, ',')) {
                    if (name.empty()) continue;
                    if (!is_observable_spelling(name))
                        throw ParseError(line, "unknown observable '" + name + "'");
                    m.intern_observable(name);
                }
            }
            have_obs = true;
        } else if (key == "initial") {
            initial_name = val;
            have_initial = true;
        } else if (key == "final") {
            final_name = val;
            have_final = true;
        } else if (key == "lambda0") {
            // stored raw; parsed below once k is known
            if (!have_heads) throw ParseError(line, "lambda0 must come after heads");
            try {
                m.lambda0 = OutcomeTag::parse(val, m.head_count());
            } catch (const std::exception& e) {
                throw ParseError(line, e.what());
            }
            have_lambda0 = true;
        } else if (key == "start") {
            if (!have_heads) throw ParseError(line, "start must come after heads");
            m.start_positions = parse_int_tuple(val, m.head_count(), line);
            have_start = true;
        } else if (key == "input") {
            auto toks = split_ws(val);
            if (toks.size() == 2 && toks[0] == "head") {
                input_by_head = true;
                input_head = static_cast<int>(parse_int(toks[1], line));
            } else if (toks.size() == 4 && toks[0] == "tape" && toks[2] == "at") {
                input_by_head = false;
                pending_input_tape = static_cast<int>(parse_int(toks[1], line));
                pending_input_origin = parse_int(toks[3], line);
            } else {
                throw ParseError(line, "input: head <i>  |  input: tape <t> at <pos>");
            }
        } else if (key == "output") {
            auto toks = split_ws(val);
            if (toks.size() != 4 || toks[0] != "head" || toks[2] != "width")
                throw ParseError(line, "output: head <i> width <w>");
            m.output_head = static_cast<int>(parse_int(toks[1], line));
            m.output_width = static_cast<int>(parse_int(toks[3], line));
            have_output = true;
        } else {
            throw ParseError(line, "unknown header key '" + key + "'");
        }
    }

    if (!have_tapes) throw ParseError(line, "missing 'tapes:' header");
    if (!have_heads) throw ParseError(line, "missing 'heads:' header");
    if (!have_moves) throw ParseError(line, "missing 'moves:' header");
    if (!have_obs) throw ParseError(line, "missing 'observables:' header");
    if (!have_initial) throw ParseError(line, "missing 'initial:' header");
    if (!have_final) throw ParseError(line, "missing 'final:' header");

    const int k = m.head_count();
    if (static_cast<int>(m.moves.comps.size()) != k)
        throw ParseError(line, "moves arity differs from head count");
    if (!have_lambda0) m.lambda0 = OutcomeTag::all_plus(k);
    if (!have_start) m.start_positions.assign(k, 0);
    if (!have_output) {
        m.output_head = 0;
        m.output_width = 1;
    }
    for (int h = 0; h < k; h++)
        if (m.head_tape[h] < 0 || m.head_tape[h] >= static_cast<int>(m.tapes.size()))
            throw ParseError(line, "head " + std::to_string(h) + " assigned to missing tape");
    if (input_by_head) {
        if (input_head < 0 || input_head >= k) throw ParseError(line, "input head out of range");
        m.input_tape = m.head_tape[input_head];
        m.input_origin = m.start_positions[input_head];
    } else {
        m.input_tape = pending_input_tape;
        m.input_origin = pending_input_origin;
    }

    m.initial_state = m.intern_state(initial_name);
    m.final_state = m.intern_state(final_name);

    for (const auto& r : rows) {
        int from = m.intern_state(r.from);
        int to = m.intern_state(r.to);
        auto oit = m.observable_index.find(r.obs);
        int obs;
        if (oit != m.observable_index.end()) {
            obs = oit->second;
        } else if (r.obs == "II" || r.obs == "I") {
            obs = m.intern_observable(r.obs);  // the no-op is always available
        } else {
            throw ParseError(r.line, "observable '" + r.obs + "' not declared");
        }
        Transition t;
        t.next_state = to;
        t.observable = obs;
        t.move = parse_int_tuple(r.move, k, r.line);

        std::vector<OutcomeTag> tags;
        if (r.tag == "_") {
            for (int i = 0; i < (1 << k); i++) tags.push_back(OutcomeTag::from_index(i, k));
        } else {
            try {
                tags.push_back(OutcomeTag::parse(r.tag, k));
            } catch (const std::exception& e) {
                throw ParseError(r.line, e.what());
            }
        }
        for (const OutcomeTag& tag : tags) {
            if (m.has_transition(from, tag))
                throw ParseError(r.line, "duplicate transition for (" + r.from + ", " +
                                             tag.str() + ")");
            m.set_transition(from, tag, t);
        }
    }
    return m;
}

MachineDefinition load_machine_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open machine file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_machine(buf.str());
}

std::string write_machine(const MachineDefinition& m) {
    std::ostringstream os;
    const int k = m.head_count();
    os << "tapes: ";
    for (std::size_t i = 0; i < m.tapes.size(); i++) os << (i ? "," : "") << m.tapes[i].str();
    os << "\n";
    os << "heads: " << k << " (";
    for (int h = 0; h < k; h++) os << (h ? "," : "") << m.head_tape[h];
    os << ")\n";
    os << "moves: " << m.moves.str() << "\n";
    os << "observables: ";
    for (std::size_t i = 0; i < m.observables.size(); i++)
        os << (i ? ", " : "") << m.observables[i].name;
    os << "\n";
    os << "initial: " << m.state_names[m.initial_state] << "\n";
    os << "final: " << m.state_names[m.final_state] << "\n";
    os << "lambda0: " << m.lambda0.str() << "\n";
    os << "start: (";
    for (int h = 0; h < k; h++) os << (h ? "," : "") << m.start_positions[h];
    os << ")\n";
    os << "input: tape " << m.input_tape << " at " << m.input_origin << "\n";
    os << "output: head " << m.output_head << " width " << m.output_width << "\n";
    for (const auto& [key, t] : m.delta) {
        os << m.state_names[key.first] << " " << OutcomeTag::from_index(key.second, k).str()
           << " -> " << m.state_names[t.next_state] << " " << m.observables[t.observable].name
           << " (";
        for (std::size_t i = 0; i < t.move.size(); i++) os << (i ? "," : "") << t.move[i];
        os << ")\n";
    }
    return os.str();
}

void save_machine_file(const MachineDefinition& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write machine file: " + path);
    f << write_machine(m);
}

bool equivalent_machines(const MachineDefinition& a, const MachineDefinition& b) {
    if (a.head_count() != b.head_count()) return false;
    if (a.tapes.size() != b.tapes.size()) return false;
    for (std::size_t i = 0; i < a.tapes.size(); i++)
        if (a.tapes[i].infinite() != b.tapes[i].infinite() ||
            (!a.tapes[i].infinite() && *a.tapes[i].length != *b.tapes[i].length))
            return false;
    if (a.head_tape != b.head_tape) return false;
    if (a.moves.str() != b.moves.str()) return false;
    if (a.lambda0 != b.lambda0) return false;
    if (a.start_positions != b.start_positions) return false;
    if (a.input_tape != b.input_tape || a.input_origin != b.input_origin) return false;
    if (a.output_head != b.output_head || a.output_width != b.output_width) return false;
    if (a.state_names[a.initial_state] != b.state_names[b.initial_state]) return false;
    if (a.state_names[a.final_state] != b.state_names[b.final_state]) return false;
    if (a.delta.size() != b.delta.size()) return false;
    for (const auto& [key, t] : a.delta) {
        const std::string& from = a.state_names[key.first];
        OutcomeTag tag = OutcomeTag::from_index(key.second, a.head_count());
        int bs;
        try {
            bs = b.state_id(from);
        } catch (...) {
            return false;
        }
        if (!b.has_transition(bs, tag)) return false;
        const Transition& bt = b.transition(bs, tag);
        if (b.state_names[bt.next_state] != a.state_names[t.next_state]) return false;
        if (b.observables[bt.observable].name != a.observables[t.observable].name) return false;
        if (bt.move != t.move) return false;
    }
    return true;
}

}  // namespace mqtm
