#pragma once

#include <filesystem>
#include <future>
#include <thread>

#include "gawcga/policies.hpp"
#include "gawcga/trace_io.hpp"
#include "gawcga/witnesses.hpp"

namespace gawcga {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitConstraint = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitConstruction = 4;

inline Space build_space(const SpaceSpec& spec) {
    if (spec.kind == "lq") return Space{LqSpace(spec.q)};
    return Space{SmoothSpaceX(spec.pseq, spec.horizon)};
}

inline Dictionary build_dictionary(const Space& space, const DictSpec& spec) {
    if (spec.kind == "canonical")
        return Dictionary::canonical(space, spec.i0, spec.n);
    auto* x = std::get_if<SmoothSpaceX>(&space);
    if (!x) throw ConfigError("config: g dictionary requires a smooth-x space");
    return Dictionary::g_dictionary(*x, spec.kmax);
}

inline Element build_element(const ElementSpec& spec, const Space& space,
                             std::uint64_t seed) {
    if (spec.kind == "random") {
        Rng rng(seed);
        Element e;
        while (e.support_size() < spec.random_support)
            e.set(rng.uniform_index(1, spec.random_max_index), rng.signed_unit());
        return e;
    }
    Element e;
    for (const auto& [idx, v] : spec.coords) e.set(idx, v);
    if (e.is_zero()) throw ConfigError("config: [element] resolves to the zero element");
    if (auto* x = std::get_if<SmoothSpaceX>(&space))
        if (e.max_index() > x->horizon() || e.min_index() < 1)
            throw ConfigError("config: [element] support outside the smooth-x horizon");
    return e;
}

inline Witness build_witness(const RunConfig& cfg) {
    const std::string& name = cfg.element.witness_name;
    if (name == "unbounded-eta") {
        if (cfg.space.kind != "lq")
            throw ConfigError("config: unbounded-eta witness needs an lq space");
        std::vector<std::size_t> spikes = cfg.witness.spikes;
        if (spikes.empty())
            for (std::size_t n = cfg.witness.spike_stride; n <= cfg.witness.horizon;
                 n += cfg.witness.spike_stride)
                spikes.push_back(n);
        return witness_unbounded_eta(cfg.space.q, cfg.witness.alpha, spikes,
                                     cfg.witness.horizon);
    }
    if (name == "finite-lambda1") {
        if (cfg.space.kind != "lq")
            throw ConfigError("config: finite-lambda1 witness needs an lq space");
        return witness_finite_lambda1(cfg.space.q, cfg.sched.t, cfg.witness.horizon);
    }
    if (name == "infinite-lambda1") {
        if (cfg.space.kind != "lq")
            throw ConfigError("config: infinite-lambda1 witness needs an lq space");
        return witness_infinite_lambda1(cfg.space.q, cfg.sched, cfg.witness.alpha,
                                        cfg.witness.horizon);
    }
    if (name == "smooth-space") {
        PSeqSpec pseq = cfg.space.kind == "smooth-x" ? cfg.space.pseq
                                                     : PSeqSpec{GeometricPSeq{}};
        return witness_smooth_space_divergence(pseq, cfg.witness.kmax);
    }
    throw ConfigError("config: unknown witness '" + name +
                      "' (expected unbounded-eta, finite-lambda1, "
                      "infinite-lambda1 or smooth-space)");
}

namespace detail {

inline void write_outputs(const std::string& out_dir, const Trace& trace,
                          nlohmann::json summary) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/trace.csv", trace_to_csv(trace));
    write_file(out_dir + "/summary.json", summary.dump(2) + "\n");
}

inline nlohmann::json witness_summary(const Witness& w, const WitnessRun& run) {
    nlohmann::json j = trace_summary_json(run.trace);
    nlohmann::json wj;
    wj["provenance"] = w.provenance;
    wj["predicate_passed"] = run.check.passed;
    wj["details"] = run.check.details;
    wj["divergence_floor"] = w.divergence_floor;
    wj["diverged_at_horizon"] =
        run.check.passed &&
        run.trace.final_residual_norm() >= w.divergence_floor - 1e-9;
    j["witness"] = std::move(wj);
    return j;
}

}  // namespace detail

// Runs the configured instance and writes trace.csv + summary.json.
// Exit codes: 0 success, 2 constraint violation, 3 solver failure,
// 4 invalid witness construction (config errors exit 1 in the frontend).
inline int cmd_run(const RunConfig& cfg, const std::string& out_dir) {
    try {
        if (cfg.element.kind == "witness") {
            Witness w = build_witness(cfg);
            WitnessRun run = run_witness(w);
            nlohmann::json summary = detail::witness_summary(w, run);
            summary["config"] = serialize_config(cfg);
            detail::write_outputs(out_dir, run.trace, std::move(summary));
            return kExitOk;
        }
        const Space space = build_space(cfg.space);
        const Dictionary dict = build_dictionary(space, cfg.dict);
        const Element f = build_element(cfg.element, space, cfg.seed);
        const RealizationPolicy policy = cfg.policy == "sloppy"
                                             ? sloppy_policy(space, cfg.sched)
                                             : RealizationPolicy{};
        EngineOptions opts;
        opts.max_steps = cfg.max_steps;
        opts.stop_tol = cfg.stop_tol;
        Trace trace = run_gawcga(space, dict, f, cfg.sched, policy, opts);
        nlohmann::json summary = trace_summary_json(trace);
        summary["config"] = serialize_config(cfg);
        detail::write_outputs(out_dir, trace, std::move(summary));
        return kExitOk;
    } catch (const ConstraintViolation&) {
        return kExitConstraint;
    } catch (const NonConvergence&) {
        return kExitSolver;
    } catch (const ConstructionInvalid&) {
        return kExitConstruction;
    }
}

// Constructs and runs the named witness; exit 0 iff its predicate holds
// (a finished run with a failed predicate exits 2).
inline int cmd_witness(const RunConfig& cfg, const std::string& out_dir) {
    try {
        Witness w = build_witness(cfg);
        WitnessRun run = run_witness(w);
        detail::write_outputs(out_dir, run.trace, detail::witness_summary(w, run));
        return run.check.passed ? kExitOk : kExitConstraint;
    } catch (const ConstraintViolation&) {
        return kExitConstraint;
    } catch (const NonConvergence&) {
        return kExitSolver;
    } catch (const ConstructionInvalid& e) {
        std::filesystem::create_directories(out_dir);
        nlohmann::json j;
        j["error"] = e.what();
        write_file(out_dir + "/summary.json", j.dump(2) + "\n");
        return kExitConstruction;
    }
}

// Emits the finite-horizon condition report as JSON.
inline int cmd_check(const RunConfig& cfg, const std::string& out_dir) {
    ConditionReport rep =
        check_conditions(cfg.sched, cfg.check.p, cfg.check.horizon, cfg.check.alphas);
    nlohmann::json j;
    j["horizon"] = rep.horizon;
    j["p"] = rep.p;
    j["note"] = rep.note;
    for (const auto& part : rep.per_alpha) {
        nlohmann::json pj;
        pj["alpha"] = part.alpha;
        pj["lambda1_size"] = part.lambda1.size();
        pj["lambda1_density"] = part.lambda1_density;
        constexpr std::size_t kCap = 2000;
        pj["lambda1"] = std::vector<std::size_t>(
            part.lambda1.begin(),
            part.lambda1.begin() +
                std::min<std::size_t>(part.lambda1.size(), kCap));
        pj["lambda1_truncated"] = part.lambda1.size() > kCap;
        pj["lambda2_tp_sum"] = part.lambda2_tp_sum;
        pj["lambda2_tp_second_half"] = part.lambda2_tp_tail;
        j["per_alpha"].push_back(std::move(pj));
    }
    j["candidate_subsequence_size"] = rep.candidate_subsequence.size();
    {
        constexpr std::size_t kCap = 2000;
        j["candidate_subsequence"] = std::vector<std::size_t>(
            rep.candidate_subsequence.begin(),
            rep.candidate_subsequence.begin() +
                std::min<std::size_t>(rep.candidate_subsequence.size(), kCap));
    }
    auto flags_json = [](const SubsequenceFlags& f) {
        nlohmann::json fj;
        fj["count"] = f.count;
        fj["b_sum"] = f.b_sum;
        fj["b_second_half"] = f.b_second_half;
        fj["sum_diverging"] = f.sum_diverging;
        fj["late_ratio_max"] = f.late_ratio_max;
        return fj;
    };
    j["power_family"] = flags_json(rep.power_family);
    j["tprime_small_along_candidate"] = rep.tprime_small_along_candidate;
    for (const auto& fam : rep.theta_families) {
        nlohmann::json fj = flags_json(fam.flags);
        fj["theta"] = fam.theta;
        j["theta_families"].push_back(std::move(fj));
    }
    j["liminf_t_estimate"] = rep.liminf_t_estimate;
    j["liminf_error_sum_estimate"] = rep.liminf_error_sum_estimate;
    j["corollary1_favorable"] = rep.corollary1_favorable;
    j["errors_in_l1"] = rep.errors_in_l1;
    j["corollary3_favorable"] = rep.corollary3_favorable;

    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/conditions.json", j.dump(2) + "\n");
    return kExitOk;
}

// Tabulates the configured modulus model over the u grid (CSV) and solves
// the xi equation at t = 1 for theta in {1/2, 1/4, 1/8} (JSON; a missing
// root is recorded as null).
inline int cmd_modulus(const RunConfig& cfg, const std::string& out_dir) {
    SmoothnessModel model;
    if (cfg.modulus.model == "l2-exact") {
        model = SmoothnessModel::l2_exact();
    } else if (cfg.modulus.model == "lp-bound") {
        model = SmoothnessModel::lp_upper_bound(cfg.modulus.q);
    } else if (cfg.modulus.model == "power") {
        model = SmoothnessModel::power_type(cfg.modulus.gamma, cfg.modulus.q);
    } else if (cfg.modulus.model == "empirical") {
        model = SmoothnessModel::empirical(build_space(cfg.space),
                                           cfg.modulus.samples, cfg.seed);
    } else {
        throw ConfigError("config: [modulus] unknown model '" + cfg.modulus.model + "'");
    }

    std::ostringstream csv;
    csv << "u,rho\n";
    for (double u : cfg.modulus.u_grid) {
        if (u < 0.0) throw ConfigError("config: [modulus] u_grid must be >= 0");
        csv << format_double(u) << ',' << format_double(model(u)) << '\n';
    }

    nlohmann::json j;
    j["model"] = model.kind;
    if (model.gamma) j["gamma"] = *model.gamma;
    if (model.power) j["power_type"] = *model.power;
    for (double theta : {0.5, 0.25, 0.125}) {
        nlohmann::json xj;
        xj["theta"] = theta;
        try {
            xj["xi_at_t1"] = xi_solve(model, theta, 1.0);
        } catch (const NoRoot& e) {
            xj["xi_at_t1"] = nullptr;
            xj["no_root"] = e.what();
        }
        j["xi"].push_back(std::move(xj));
    }

    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/modulus.csv", csv.str());
    write_file(out_dir + "/modulus.json", j.dump(2) + "\n");
    return kExitOk;
}

// Cartesian sweep over constant schedule values.  Rows run concurrently
// (each run is pure); output order is by grid index, so reruns are
// byte-identical.  Exit 0 if at least one row succeeded.
inline int cmd_sweep(const RunConfig& cfg, const std::string& out_dir) {
    struct Dim {
        const char* name;
        const std::vector<double>* values;
        SequenceSpec Schedules::* member;
    };
    const Dim dims[] = {
        {"t", &cfg.sweep.t, &Schedules::t},
        {"t_prime", &cfg.sweep.t_prime, &Schedules::t_prime},
        {"delta", &cfg.sweep.delta, &Schedules::delta},
        {"delta_prime", &cfg.sweep.delta_prime, &Schedules::delta_prime},
        {"eta", &cfg.sweep.eta, &Schedules::eta},
        {"eta_prime", &cfg.sweep.eta_prime, &Schedules::eta_prime},
    };
    std::vector<const Dim*> active;
    std::size_t rows = 1;
    for (const auto& d : dims)
        if (!d.values->empty()) {
            active.push_back(&d);
            rows *= d.values->size();
        }
    if (active.empty()) throw ConfigError("config: [sweep] grid is empty");

    const Space space = build_space(cfg.space);
    const Dictionary dict = build_dictionary(space, cfg.dict);
    const Element f = build_element(cfg.element, space, cfg.seed);

    struct Row {
        std::vector<double> values;
        std::string status = "ok";
        std::string stop_reason;
        std::size_t steps = 0;
        double final_residual = 0.0;
    };
    std::vector<Row> results(rows);

    auto run_row = [&](std::size_t index) {
        Row row;
        Schedules sched = cfg.sched;
        std::size_t rest = index;
        for (std::size_t d = active.size(); d-- > 0;) {
            const std::size_t k = rest % active[d]->values->size();
            rest /= active[d]->values->size();
            const double value = (*active[d]->values)[k];
            row.values.insert(row.values.begin(), value);
            sched.*(active[d]->member) = ConstantSeq{value};
        }
        try {
            EngineOptions opts;
            opts.max_steps = cfg.max_steps;
            opts.stop_tol = cfg.stop_tol;
            const RealizationPolicy policy = cfg.policy == "sloppy"
                                                 ? sloppy_policy(space, sched)
                                                 : RealizationPolicy{};
            Trace trace = run_gawcga(space, dict, f, sched, policy, opts);
            row.stop_reason = to_string(trace.stop);
            row.steps = trace.steps.size();
            row.final_residual = trace.final_residual_norm();
        } catch (const ConstraintViolation&) {
            row.status = "constraint-violation";
        } catch (const NonConvergence& e) {
            row.status = "non-convergence";
            row.final_residual = e.residual_norm;
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        results[index] = std::move(row);
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::thread::hardware_concurrency());
    for (std::size_t base = 0; base < rows; base += workers) {
        std::vector<std::future<void>> batch;
        for (std::size_t i = base; i < std::min(rows, base + workers); ++i)
            batch.push_back(std::async(std::launch::async, run_row, i));
        for (auto& fut : batch) fut.get();
    }

    std::ostringstream csv;
    csv << "row";
    for (const auto* d : active) csv << ',' << d->name;
    csv << ",status,stop_reason,steps,final_residual\n";
    bool any_ok = false;
    for (std::size_t i = 0; i < rows; ++i) {
        const Row& row = results[i];
        if (row.status == "ok") any_ok = true;
        csv << i;
        for (double v : row.values) csv << ',' << format_double(v);
        csv << ',' << row.status << ',' << row.stop_reason << ',' << row.steps
            << ',' << format_double(row.final_residual) << '\n';
    }
    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/sweep.csv", csv.str());
    return any_ok ? kExitOk : kExitConstraint;
}

}  // namespace gawcga
