#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gawcga/config.hpp"
#include "gawcga/engine.hpp"

namespace gawcga {

// CSV schema: one row per step.  All numeric fields carry 17 significant
// digits; wall times are deliberately excluded so identical config + seed
// reproduces the file byte for byte.
inline std::string trace_to_csv(const Trace& trace) {
    std::ostringstream out;
    out << "step,atom_index,atom_sign,residual_norm,E_n,margin_functional,"
           "margin_select,margin_approx\n";
    for (const auto& rec : trace.steps) {
        out << rec.step << ',' << rec.atom_index << ',' << rec.atom_sign << ','
            << format_double(rec.residual_norm) << ','
            << format_double(rec.best_error) << ','
            << format_double(rec.margin_functional) << ','
            << format_double(rec.margin_select) << ','
            << format_double(rec.margin_approx) << '\n';
    }
    return out.str();
}

inline nlohmann::json trace_summary_json(const Trace& trace) {
    nlohmann::json j;
    j["space"] = trace.space_desc;
    j["dictionary"] = trace.dict_desc;
    j["policy"] = trace.policy_name;
    j["initial_norm"] = trace.initial_norm;
    j["final_residual"] = trace.final_residual_norm();
    j["steps"] = trace.steps.size();
    j["stop_reason"] = to_string(trace.stop);
    j["truncation_note"] = trace.truncation_note;
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace gawcga
