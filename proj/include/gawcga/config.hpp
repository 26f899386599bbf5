#pragma once

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gawcga/schedules.hpp"
#include "gawcga/smooth_space.hpp"

namespace gawcga {

// Doubles are printed with 17 significant digits so every serialized value
// parses back to the identical bit pattern.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Minimal INI-style document: [section] headers (dots allowed) with
// key = value lines, '#' comments, whitespace-insensitive.  Sections and keys
// are kept sorted so serialization is canonical and reruns are byte-stable.
class IniDoc {
public:
    static IniDoc parse(const std::string& text) {
        IniDoc doc;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                doc.sections_[section];
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty key");
            doc.sections_[section][key] = value;
        }
        return doc;
    }

    std::string serialize() const {
        std::ostringstream out;
        bool first = true;
        for (const auto& [section, entries] : sections_) {
            if (!first) out << "\n";
            first = false;
            out << "[" << section << "]\n";
            for (const auto& [key, value] : entries)
                out << key << " = " << value << "\n";
        }
        return out.str();
    }

    bool has(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }
    bool has_section(const std::string& section) const {
        return sections_.count(section) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        if (it == sections_.end() || !it->second.count(key))
            throw ConfigError("config: missing [" + section + "] " + key);
        return it->second.at(key);
    }
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }
    double get_double(const std::string& section, const std::string& key) const {
        return to_double(get(section, key), section, key);
    }
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }
    std::size_t get_size(const std::string& section, const std::string& key) const {
        const double v = get_double(section, key);
        if (v < 0 || v != std::floor(v))
            throw ConfigError("config: [" + section + "] " + key +
                              " must be a non-negative integer");
        return static_cast<std::size_t>(v);
    }
    std::size_t get_size_or(const std::string& section, const std::string& key,
                            std::size_t fallback) const {
        return has(section, key) ? get_size(section, key) : fallback;
    }
    std::vector<double> get_doubles(const std::string& section,
                                    const std::string& key) const {
        std::vector<double> out;
        std::istringstream in(get(section, key));
        std::string tok;
        while (in >> tok) out.push_back(to_double(tok, section, key));
        return out;
    }
    std::vector<std::size_t> get_sizes(const std::string& section,
                                       const std::string& key) const {
        std::vector<std::size_t> out;
        for (double v : get_doubles(section, key)) {
            if (v < 0 || v != std::floor(v))
                throw ConfigError("config: [" + section + "] " + key +
                                  " must list non-negative integers");
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    }

    void set(const std::string& section, const std::string& key,
             const std::string& value) {
        sections_[section][key] = value;
    }
    void set_double(const std::string& section, const std::string& key, double v) {
        set(section, key, format_double(v));
    }

private:
    static std::string trim(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    }
    static double to_double(const std::string& s, const std::string& section,
                            const std::string& key) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config: [" + section + "] " + key +
                              ": cannot parse number from '" + s + "'");
        }
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// ---------------------------------------------------------------------------
// Typed run configuration.

struct SpaceSpec {
    std::string kind = "lq";  // lq | smooth-x
    double q = 2.0;
    PSeqSpec pseq{GeometricPSeq{}};
    std::size_t horizon = 32;  // smooth-x coordinate horizon
};

struct DictSpec {
    std::string kind = "canonical";  // canonical | g
    std::size_t i0 = 1;
    std::size_t n = 100;
    std::size_t kmax = 20;
};

struct ElementSpec {
    std::string kind = "coords";  // coords | random | witness
    std::vector<std::pair<std::size_t, double>> coords;
    std::size_t random_support = 10;
    std::size_t random_max_index = 50;
    std::string witness_name;  // unbounded-eta | finite-lambda1 | infinite-lambda1 | smooth-space
};

struct WitnessSpec {
    double alpha = 0.5;
    std::size_t horizon = 100;
    std::vector<std::size_t> spikes;  // empty: stride * 1..count
    std::size_t spike_stride = 10;
    std::size_t kmax = 20;
};

struct CheckSpec {
    double p = 2.0;
    std::size_t horizon = 200;
    std::vector<double> alphas{0.1, 0.5, 1.0};
};

struct ModulusSpec {
    std::string model = "l2-exact";  // l2-exact | lp-bound | power | empirical
    double q = 2.0;
    double gamma = 0.5;
    std::vector<double> u_grid{0.125, 0.25, 0.5, 1.0, 2.0};
    std::size_t samples = 10000;
};

struct SweepSpec {
    // cartesian grid over constant schedule values; empty lists are skipped
    std::vector<double> t, t_prime, delta, delta_prime, eta, eta_prime;
};

struct RunConfig {
    SpaceSpec space;
    DictSpec dict;
    ElementSpec element;
    Schedules sched;
    std::string policy = "exact";  // exact | sloppy
    std::size_t max_steps = 100;
    double stop_tol = 0.0;
    std::uint64_t seed = 1;
    WitnessSpec witness;
    CheckSpec check;
    ModulusSpec modulus;
    SweepSpec sweep;
};

namespace detail {

inline SequenceSpec parse_sequence(const IniDoc& doc, const std::string& section) {
    if (!doc.has_section(section)) return ConstantSeq{0.0};
    const std::string kind = doc.get_or(section, "kind", "constant");
    if (kind == "constant") return ConstantSeq{doc.get_double_or(section, "value", 0.0)};
    if (kind == "power")
        return PowerDecaySeq{doc.get_double_or(section, "c", 0.0),
                             doc.get_double_or(section, "a", 0.0)};
    if (kind == "list") {
        ExplicitSeq e;
        if (doc.has(section, "values")) e.values = doc.get_doubles(section, "values");
        e.first_index = doc.get_size_or(section, "first_index", 1);
        return e;
    }
    if (kind == "indicator") {
        IndicatorSeq ind;
        if (doc.has(section, "indices")) ind.indices = doc.get_sizes(section, "indices");
        ind.base = doc.get_double_or(section, "base", 0.0);
        ind.growth = doc.get_double_or(section, "growth", 0.0);
        return ind;
    }
    throw ConfigError("config: [" + section + "] unknown sequence kind '" + kind + "'");
}

inline void emit_sequence(IniDoc& doc, const std::string& section,
                          const SequenceSpec& spec) {
    if (auto* c = std::get_if<ConstantSeq>(&spec)) {
        doc.set(section, "kind", "constant");
        doc.set_double(section, "value", c->value);
    } else if (auto* p = std::get_if<PowerDecaySeq>(&spec)) {
        doc.set(section, "kind", "power");
        doc.set_double(section, "c", p->c);
        doc.set_double(section, "a", p->a);
    } else if (auto* e = std::get_if<ExplicitSeq>(&spec)) {
        doc.set(section, "kind", "list");
        std::ostringstream vals;
        for (std::size_t i = 0; i < e->values.size(); ++i)
            vals << (i ? " " : "") << format_double(e->values[i]);
        doc.set(section, "values", vals.str());
        doc.set(section, "first_index", std::to_string(e->first_index));
    } else {
        auto& ind = std::get<IndicatorSeq>(spec);
        doc.set(section, "kind", "indicator");
        std::ostringstream idx;
        for (std::size_t i = 0; i < ind.indices.size(); ++i)
            idx << (i ? " " : "") << ind.indices[i];
        doc.set(section, "indices", idx.str());
        doc.set_double(section, "base", ind.base);
        doc.set_double(section, "growth", ind.growth);
    }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    const IniDoc doc = IniDoc::parse(text);
    RunConfig cfg;

    cfg.space.kind = doc.get_or("space", "kind", "lq");
    if (cfg.space.kind == "lq") {
        cfg.space.q = doc.get_double_or("space", "q", 2.0);
        if (!(cfg.space.q > 1.0))
            throw ConfigError("config: [space] q must be > 1");
    } else if (cfg.space.kind == "smooth-x") {
        cfg.space.horizon = doc.get_size_or("space", "horizon", 32);
        const std::string pk = doc.get_or("space", "pseq", "geometric");
        if (pk == "geometric") {
            cfg.space.pseq = GeometricPSeq{doc.get_double_or("space", "c", 1.0),
                                           doc.get_double_or("space", "r", 0.5)};
        } else if (pk == "list") {
            cfg.space.pseq = ExplicitPSeq{doc.get_doubles("space", "p_list")};
        } else if (pk == "constant") {
            cfg.space.pseq = ConstantPSeq{doc.get_double_or("space", "p", 1.5)};
        } else {
            throw ConfigError("config: [space] unknown pseq '" + pk + "'");
        }
    } else {
        throw ConfigError("config: [space] kind must be lq or smooth-x");
    }

    cfg.dict.kind = doc.get_or("dictionary", "kind", "canonical");
    if (cfg.dict.kind == "canonical") {
        cfg.dict.i0 = doc.get_size_or("dictionary", "i0", 1);
        cfg.dict.n = doc.get_size_or("dictionary", "n", 100);
    } else if (cfg.dict.kind == "g") {
        cfg.dict.kmax = doc.get_size_or("dictionary", "kmax", 20);
    } else {
        throw ConfigError("config: [dictionary] kind must be canonical or g");
    }

    if (doc.has("element", "witness")) {
        cfg.element.kind = "witness";
        cfg.element.witness_name = doc.get("element", "witness");
    } else if (doc.get_or("element", "kind", "coords") == "random") {
        cfg.element.kind = "random";
        cfg.element.random_support = doc.get_size_or("element", "support", 10);
        cfg.element.random_max_index = doc.get_size_or("element", "max_index", 50);
    } else {
        cfg.element.kind = "coords";
        if (doc.has("element", "coords")) {
            std::istringstream in(doc.get("element", "coords"));
            std::string tok;
            while (in >> tok) {
                const auto colon = tok.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("config: [element] coords entries are index:value");
                try {
                    cfg.element.coords.emplace_back(std::stoul(tok.substr(0, colon)),
                                                    std::stod(tok.substr(colon + 1)));
                } catch (const std::exception&) {
                    throw ConfigError("config: [element] bad coords entry '" + tok + "'");
                }
            }
        }
    }

    cfg.sched.t = doc.has_section("schedules.t")
                      ? detail::parse_sequence(doc, "schedules.t")
                      : SequenceSpec{ConstantSeq{1.0}};
    cfg.sched.t_prime = detail::parse_sequence(doc, "schedules.t_prime");
    cfg.sched.delta = detail::parse_sequence(doc, "schedules.delta");
    cfg.sched.delta_prime = detail::parse_sequence(doc, "schedules.delta_prime");
    cfg.sched.eta = detail::parse_sequence(doc, "schedules.eta");
    cfg.sched.eta_prime = detail::parse_sequence(doc, "schedules.eta_prime");

    cfg.policy = doc.get_or("run", "policy", "exact");
    if (cfg.policy != "exact" && cfg.policy != "sloppy")
        throw ConfigError("config: [run] policy must be exact or sloppy");
    cfg.max_steps = doc.get_size_or("run", "max_steps", 100);
    if (cfg.max_steps < 1) throw ConfigError("config: [run] max_steps must be >= 1");
    cfg.stop_tol = doc.get_double_or("run", "stop_tol", 0.0);
    if (cfg.stop_tol < 0.0) throw ConfigError("config: [run] stop_tol must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(doc.get_size_or("run", "seed", 1));

    cfg.witness.alpha = doc.get_double_or("witness", "alpha", 0.5);
    cfg.witness.horizon = doc.get_size_or("witness", "horizon", 100);
    if (doc.has("witness", "spikes")) cfg.witness.spikes = doc.get_sizes("witness", "spikes");
    cfg.witness.spike_stride = doc.get_size_or("witness", "spike_stride", 10);
    cfg.witness.kmax = doc.get_size_or("witness", "kmax", 20);

    cfg.check.p = doc.get_double_or("check", "p", 2.0);
    cfg.check.horizon = doc.get_size_or("check", "horizon", 200);
    if (doc.has("check", "alphas")) cfg.check.alphas = doc.get_doubles("check", "alphas");
    for (double a : cfg.check.alphas)
        if (!(a > 0.0)) throw ConfigError("config: [check] alphas must be > 0");

    cfg.modulus.model = doc.get_or("modulus", "model", "l2-exact");
    cfg.modulus.q = doc.get_double_or("modulus", "q", 2.0);
    cfg.modulus.gamma = doc.get_double_or("modulus", "gamma", 0.5);
    if (doc.has("modulus", "u_grid")) cfg.modulus.u_grid = doc.get_doubles("modulus", "u_grid");
    cfg.modulus.samples = doc.get_size_or("modulus", "samples", 10000);

    if (doc.has("sweep", "t")) cfg.sweep.t = doc.get_doubles("sweep", "t");
    if (doc.has("sweep", "t_prime")) cfg.sweep.t_prime = doc.get_doubles("sweep", "t_prime");
    if (doc.has("sweep", "delta")) cfg.sweep.delta = doc.get_doubles("sweep", "delta");
    if (doc.has("sweep", "delta_prime"))
        cfg.sweep.delta_prime = doc.get_doubles("sweep", "delta_prime");
    if (doc.has("sweep", "eta")) cfg.sweep.eta = doc.get_doubles("sweep", "eta");
    if (doc.has("sweep", "eta_prime"))
        cfg.sweep.eta_prime = doc.get_doubles("sweep", "eta_prime");

    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    IniDoc doc;
    doc.set("space", "kind", cfg.space.kind);
    if (cfg.space.kind == "lq") {
        doc.set_double("space", "q", cfg.space.q);
    } else {
        doc.set("space", "horizon", std::to_string(cfg.space.horizon));
        if (auto* g = std::get_if<GeometricPSeq>(&cfg.space.pseq)) {
            doc.set("space", "pseq", "geometric");
            doc.set_double("space", "c", g->c);
            doc.set_double("space", "r", g->r);
        } else if (auto* e = std::get_if<ExplicitPSeq>(&cfg.space.pseq)) {
            doc.set("space", "pseq", "list");
            std::ostringstream vals;
            for (std::size_t i = 0; i < e->p.size(); ++i)
                vals << (i ? " " : "") << format_double(e->p[i]);
            doc.set("space", "p_list", vals.str());
        } else {
            doc.set("space", "pseq", "constant");
            doc.set_double("space", "p", std::get<ConstantPSeq>(cfg.space.pseq).p);
        }
    }

    doc.set("dictionary", "kind", cfg.dict.kind);
    if (cfg.dict.kind == "canonical") {
        doc.set("dictionary", "i0", std::to_string(cfg.dict.i0));
        doc.set("dictionary", "n", std::to_string(cfg.dict.n));
    } else {
        doc.set("dictionary", "kmax", std::to_string(cfg.dict.kmax));
    }

    if (cfg.element.kind == "witness") {
        doc.set("element", "witness", cfg.element.witness_name);
    } else if (cfg.element.kind == "random") {
        doc.set("element", "kind", "random");
        doc.set("element", "support", std::to_string(cfg.element.random_support));
        doc.set("element", "max_index", std::to_string(cfg.element.random_max_index));
    } else {
        std::ostringstream coords;
        for (std::size_t i = 0; i < cfg.element.coords.size(); ++i)
            coords << (i ? " " : "") << cfg.element.coords[i].first << ":"
                   << format_double(cfg.element.coords[i].second);
        doc.set("element", "coords", coords.str());
    }

    detail::emit_sequence(doc, "schedules.t", cfg.sched.t);
    detail::emit_sequence(doc, "schedules.t_prime", cfg.sched.t_prime);
    detail::emit_sequence(doc, "schedules.delta", cfg.sched.delta);
    detail::emit_sequence(doc, "schedules.delta_prime", cfg.sched.delta_prime);
    detail::emit_sequence(doc, "schedules.eta", cfg.sched.eta);
    detail::emit_sequence(doc, "schedules.eta_prime", cfg.sched.eta_prime);

    doc.set("run", "policy", cfg.policy);
    doc.set("run", "max_steps", std::to_string(cfg.max_steps));
    doc.set_double("run", "stop_tol", cfg.stop_tol);
    doc.set("run", "seed", std::to_string(cfg.seed));

    doc.set_double("witness", "alpha", cfg.witness.alpha);
    doc.set("witness", "horizon", std::to_string(cfg.witness.horizon));
    if (!cfg.witness.spikes.empty()) {
        std::ostringstream sp;
        for (std::size_t i = 0; i < cfg.witness.spikes.size(); ++i)
            sp << (i ? " " : "") << cfg.witness.spikes[i];
        doc.set("witness", "spikes", sp.str());
    }
    doc.set("witness", "spike_stride", std::to_string(cfg.witness.spike_stride));
    doc.set("witness", "kmax", std::to_string(cfg.witness.kmax));

    doc.set_double("check", "p", cfg.check.p);
    doc.set("check", "horizon", std::to_string(cfg.check.horizon));
    {
        std::ostringstream alphas;
        for (std::size_t i = 0; i < cfg.check.alphas.size(); ++i)
            alphas << (i ? " " : "") << format_double(cfg.check.alphas[i]);
        doc.set("check", "alphas", alphas.str());
    }

    doc.set("modulus", "model", cfg.modulus.model);
    doc.set_double("modulus", "q", cfg.modulus.q);
    doc.set_double("modulus", "gamma", cfg.modulus.gamma);
    {
        std::ostringstream grid;
        for (std::size_t i = 0; i < cfg.modulus.u_grid.size(); ++i)
            grid << (i ? " " : "") << format_double(cfg.modulus.u_grid[i]);
        doc.set("modulus", "u_grid", grid.str());
    }
    doc.set("modulus", "samples", std::to_string(cfg.modulus.samples));

    auto emit_list = [&](const char* key, const std::vector<double>& values) {
        if (values.empty()) return;
        std::ostringstream out;
        for (std::size_t i = 0; i < values.size(); ++i)
            out << (i ? " " : "") << format_double(values[i]);
        doc.set("sweep", key, out.str());
    };
    emit_list("t", cfg.sweep.t);
    emit_list("t_prime", cfg.sweep.t_prime);
    emit_list("delta", cfg.sweep.delta);
    emit_list("delta_prime", cfg.sweep.delta_prime);
    emit_list("eta", cfg.sweep.eta);
    emit_list("eta_prime", cfg.sweep.eta_prime);

    return doc.serialize();
}

}  // namespace gawcga
