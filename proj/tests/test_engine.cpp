#include <doctest.h>

#include <cmath>

#include "gawcga/engine.hpp"
#include "support.hpp"

using namespace gawcga;
using testsupport::close_rel;

namespace {

Element random_sparse(Rng& rng, std::size_t support, std::size_t max_index) {
    Element e;
    while (e.support_size() < support)
        e.set(rng.uniform_index(1, max_index), rng.signed_unit());
    return e;
}

}  // namespace

TEST_CASE("two-step exact greedy in l2") {
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 8);
    Element f = Element::basis(1) + Element::basis(2, 0.5);

    EngineOptions opts;
    opts.max_steps = 8;
    Trace t = run_gawcga(l2, dict, f, Schedules::zero_slack(), RealizationPolicy{}, opts);

    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[0].atom_index == 1);
    CHECK(t.steps[0].atom_sign == +1);
    CHECK(t.steps[1].atom_index == 2);
    CHECK(t.steps[0].best_error == doctest::Approx(0.5));
    CHECK(t.steps[1].best_error == 0.0);
    CHECK(t.steps[1].residual_norm == 0.0);
    CHECK(t.stop == StopReason::zero_residual);
}

TEST_CASE("single atom converges in one step") {
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 8);
    Trace t = run_wcga(l2, dict, Element::basis(5, -2.0), ConstantSeq{1.0}, 8, 0.0);
    REQUIRE(t.steps.size() == 1);
    CHECK(t.steps[0].atom_index == 5);
    CHECK(t.steps[0].atom_sign == -1);
}

TEST_CASE("zero element rejected") {
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 4);
    CHECK_THROWS_AS(
        run_wcga(l2, dict, Element{}, ConstantSeq{1.0}, 4, 0.0), ZeroElementError);
}

TEST_CASE("WCGA(t=0.5) reaches 1e-6 on random sparse l2 elements") {
    Rng rng(17);
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 60);
    for (int trial = 0; trial < 10; ++trial) {
        Element f = random_sparse(rng, 12, 60);
        Trace t = run_wcga(l2, dict, f, ConstantSeq{0.5}, 200, 1e-6);
        CHECK(t.final_residual_norm() <= 1e-6);
        CHECK(t.steps.size() <= 200);
    }
}

TEST_CASE("E_n is non-increasing and the audit margins hold") {
    Rng rng(18);
    for (double q : {1.5, 2.0, 3.0}) {
        Space space{LqSpace(q)};
        Dictionary dict = Dictionary::canonical(space, 0, 40);
        Element f = random_sparse(rng, 10, 40);
        Schedules sched;
        sched.t = ConstantSeq{0.8};
        sched.delta = PowerDecaySeq{0.05, 1.0};
        sched.eta = PowerDecaySeq{0.05, 1.0};
        EngineOptions opts;
        opts.max_steps = 30;
        Trace t = run_gawcga(space, dict, f, sched, RealizationPolicy{}, opts);

        double prev = t.initial_norm;
        for (const auto& rec : t.steps) {
            CHECK(rec.best_error <= prev + 1e-12);
            prev = rec.best_error;
        }
        for (const auto& a : audit_trace(space, f, sched, t)) {
            CHECK(a.margin_functional >= -kAuditTol);
            CHECK(a.margin_select >= -kAuditTol);
            CHECK(a.margin_approx >= -kAuditTol);
        }
    }
}

TEST_CASE("zero slack: the norming functional of f_n annihilates the span") {
    Rng rng(19);
    Space l15{LqSpace(1.5)};
    Dictionary dict = Dictionary::canonical(l15, 1, 30);
    Element f = random_sparse(rng, 8, 30);
    Trace t = run_wcga(l15, dict, f, ConstantSeq{1.0}, 6, 0.0);
    for (std::size_t n = 0; n < t.steps.size(); ++n) {
        if (t.steps[n].residual_norm == 0.0) break;
        Functional fn = norming_functional(l15, t.steps[n].residual);
        for (std::size_t j = 0; j <= n; ++j)
            CHECK(std::fabs(apply(fn, t.steps[j].atom)) <= kAuditTol);
    }
}

TEST_CASE("residual norms obey (1+eta0)||f|| + eta0'") {
    Rng rng(20);
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 30);
    Element f = random_sparse(rng, 8, 30);
    Schedules sched;
    sched.eta = ConstantSeq{0.3};
    sched.eta_prime = ConstantSeq{0.05};
    EngineOptions opts;
    opts.max_steps = 25;
    Trace t = run_gawcga(l2, dict, f, sched, RealizationPolicy{}, opts);
    const double bound =
        (1.0 + sched.eta_sup(25)) * t.initial_norm + sched.eta_prime_sup(25);
    for (const auto& rec : t.steps) CHECK(rec.residual_norm <= bound + 1e-12);
}

TEST_CASE("scaling: lambda*f gives the same atoms and scaled residuals") {
    Rng rng(21);
    Space l3{LqSpace(3.0)};
    Dictionary dict = Dictionary::canonical(l3, 1, 25);
    Element f = random_sparse(rng, 7, 25);
    Trace base = run_wcga(l3, dict, f, ConstantSeq{1.0}, 7, 0.0);
    for (double lambda : {0.5, 3.0, 17.0}) {
        Trace scaled = run_wcga(l3, dict, lambda * f, ConstantSeq{1.0}, 7, 0.0);
        REQUIRE(scaled.steps.size() == base.steps.size());
        for (std::size_t i = 0; i < base.steps.size(); ++i) {
            CHECK(scaled.steps[i].atom_index == base.steps[i].atom_index);
            CHECK(scaled.steps[i].atom_sign == base.steps[i].atom_sign);
            CHECK(close_rel(scaled.steps[i].residual_norm,
                            lambda * base.steps[i].residual_norm, 1e-9, 1e-12));
        }
    }
}

TEST_CASE("audit_step margins") {
    Space l2{LqSpace(2.0)};
    Element f = Element::dense({3.0, 4.0}, 1);

    SUBCASE("exact step: margins (~0, >=0, ~0)") {
        StepAuditInputs in;
        in.f_prev = f;
        in.functional = norming_functional(l2, f);
        in.atom = Element::basis(2);  // the argmax: coefficient 0.8
        in.sup_value = 0.8;
        in.f = f;
        in.approximant = Element::basis(2, 4.0);
        in.best_error = 3.0;
        in.t = 1.0;
        in.t_prime = in.delta = in.delta_prime = in.eta = in.eta_prime = 0.0;
        StepAudit a = audit_step(l2, in);
        CHECK(std::fabs(a.margin_functional) <= 1e-12);
        CHECK(a.margin_select >= -1e-12);
        CHECK(std::fabs(a.margin_approx) <= 1e-12);
    }

    SUBCASE("delta slack exploited fully: norming margin ~ 0") {
        StepAuditInputs in;
        in.f_prev = f;
        Functional fx = norming_functional(l2, f);
        in.functional = Functional(0.9 * fx.coeffs);  // F(f) = 0.9 ||f||
        in.atom = Element::basis(2);
        in.sup_value = 0.8 * 0.9;
        in.f = f;
        in.approximant = Element{};
        in.best_error = 5.0;
        in.t = 1.0;
        in.delta = 0.1;
        in.t_prime = in.delta_prime = in.eta = in.eta_prime = 0.0;
        StepAudit a = audit_step(l2, in);
        CHECK(std::fabs(a.margin_functional) <= 1e-12);
    }

    SUBCASE("fabricated bad functional: negative margin reported") {
        StepAuditInputs in;
        in.f_prev = f;
        in.functional = Functional(Element::basis(1, 2.0));  // dual norm 2 > 1
        in.atom = Element::basis(1);
        in.sup_value = 2.0;
        in.f = f;
        in.approximant = Element{};
        in.best_error = 5.0;
        in.t = 1.0;
        in.t_prime = in.delta = in.delta_prime = in.eta = in.eta_prime = 0.0;
        StepAudit a = audit_step(l2, in);
        CHECK(a.margin_functional < -0.5);
    }
}

TEST_CASE("hook emitting an inadmissible choice aborts the run") {
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 8);
    Element f = Element::dense({1.0, 0.9}, 1);

    SUBCASE("bad functional") {
        RealizationPolicy bad;
        bad.name = "bad-functional";
        bad.functional_rule = [&](std::size_t, const Element&) {
            return Functional(Element::basis(1, 3.0));
        };
        EngineOptions opts;
        CHECK_THROWS_AS(run_gawcga(l2, dict, f, Schedules{}, bad, opts),
                        ConstraintViolation);
    }

    SUBCASE("bad atom at t = 1") {
        RealizationPolicy bad;
        bad.name = "bad-atom";
        bad.atom_rule = [](const SelectionContext&) {
            return SelectedAtom{Element::basis(2), 2, +1};  // F(e2) < sup
        };
        EngineOptions opts;
        CHECK_THROWS_AS(run_gawcga(l2, dict, f, Schedules{}, bad, opts),
                        ConstraintViolation);
    }

    SUBCASE("bad approximant with zero slack") {
        RealizationPolicy bad;
        bad.name = "bad-approximant";
        bad.approximant_rule = [](const ApproximantContext& ctx) {
            return *ctx.g_exact + Element::basis(1, 0.5);
        };
        EngineOptions opts;
        CHECK_THROWS_AS(run_gawcga(l2, dict, f, Schedules{}, bad, opts),
                        ConstraintViolation);
    }
}

TEST_CASE("weak atom preferences are honored inside the slack") {
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 4);
    Element f = Element::dense({0.8, 1.0}, 1);
    Schedules sched;
    sched.t = ConstantSeq{0.5};
    RealizationPolicy pref;
    pref.name = "prefer-e1";
    pref.atom_rule = [](const SelectionContext& ctx) {
        SelectedAtom e1{Element::basis(1), 1, +1};
        if (apply(*ctx.functional, e1.atom) >=
            ctx.t * ctx.sup_value - ctx.t_prime - kWeakSelectGrace)
            return e1;
        return *ctx.argmax;
    };
    EngineOptions opts;
    opts.max_steps = 4;
    Trace t = run_gawcga(l2, dict, f, sched, pref, opts);
    CHECK(t.steps[0].atom_index == 1);  // 0.8/n >= 0.5 * (1.0/n)
}

TEST_CASE("stop_tol stops the run early") {
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 20);
    Rng rng(22);
    Element f = random_sparse(rng, 10, 20);
    Trace t = run_wcga(l2, dict, f, ConstantSeq{1.0}, 20, 0.5);
    CHECK(t.stop == StopReason::reached_stop_tol);
    CHECK(t.final_residual_norm() <= 0.5);
    CHECK(t.steps.size() < 10);
}

TEST_CASE("sloppy-but-admissible policy still converges under decaying slack") {
    // Exercises all three hooks at once: the functional shrunk to its
    // (1-delta) floor, the worst admissible atom, and an approximant pushed
    // to the (1+eta)E + eta' boundary.
    Rng rng(23);
    Space l2{LqSpace(2.0)};
    Dictionary dict = Dictionary::canonical(l2, 1, 20);
    Element f = random_sparse(rng, 6, 20);

    Schedules sched;
    sched.t = ConstantSeq{1.0};
    sched.t_prime = PowerDecaySeq{0.1, 2.0};
    sched.delta = PowerDecaySeq{0.1, 2.0};
    sched.delta_prime = PowerDecaySeq{0.1, 2.0};
    sched.eta = PowerDecaySeq{0.1, 2.0};
    sched.eta_prime = PowerDecaySeq{0.1, 2.0};

    RealizationPolicy sloppy;
    sloppy.name = "sloppy";
    sloppy.functional_rule = [&](std::size_t n, const Element& f_prev) {
        Functional exact = norming_functional(l2, f_prev);
        const double fnorm = norm(l2, f_prev);
        const double d = sched.delta_at(n - 1);
        const double dp = sched.delta_prime_at(n - 1);
        const double shrink =
            std::max(0.0, std::min(1.0, (1.0 - d) - dp / std::max(fnorm, 1e-300)));
        return Functional(shrink * exact.coeffs);
    };
    sloppy.atom_rule = [&](const SelectionContext& ctx) {
        // worst admissible atom: smallest F-value still meeting the bound
        SelectedAtom worst = *ctx.argmax;
        double worst_value = apply(*ctx.functional, worst.atom);
        const double target = ctx.t * ctx.sup_value - ctx.t_prime;
        for (std::size_t ord = 0; ord < ctx.dict->base_atom_count(); ++ord) {
            for (int sign : {+1, -1}) {
                SelectedAtom cand = ctx.dict->base_atom(ord);
                cand.sign = sign;
                if (sign < 0) cand.atom = -cand.atom;
                const double v = apply(*ctx.functional, cand.atom);
                if (v >= target && v < worst_value) {
                    worst = cand;
                    worst_value = v;
                }
            }
        }
        return worst;
    };
    sloppy.approximant_rule = [&](const ApproximantContext& ctx) {
        const double allowance = (1.0 + ctx.eta) * ctx.error + ctx.eta_prime;
        if (allowance <= ctx.error || ctx.span->size() == 0) return *ctx.g_exact;
        // push along the last atom until ||f - G|| hits the allowance
        const Element& dir = ctx.span->atoms.back();
        auto achieved = [&](double s) {
            Element g = *ctx.g_exact;
            g.add_scaled(dir, s);
            return norm(l2, *ctx.f - g);
        };
        double lo = 0.0, hi = 1.0;
        while (achieved(hi) < allowance && hi < 1e6) hi *= 2.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (achieved(mid) < allowance ? lo : hi) = mid;
        }
        Element g = *ctx.g_exact;
        g.add_scaled(dir, lo);
        return g;
    };

    EngineOptions opts;
    opts.max_steps = 400;
    opts.stop_tol = 1e-4;
    Trace t = run_gawcga(l2, dict, f, sched, sloppy, opts);
    CHECK(t.final_residual_norm() <= 1e-4);
    for (const auto& a : audit_trace(l2, f, sched, t)) {
        CHECK(a.margin_functional >= -kAuditTol);
        CHECK(a.margin_select >= -kAuditTol);
        CHECK(a.margin_approx >= -kAuditTol);
    }
}

TEST_CASE("schedule specs: ranges, indexing, out-of-range behavior") {
    Schedules sched;
    sched.t = ConstantSeq{1.5};
    CHECK_THROWS(sched.t_at(1));  // t outside [0,1]
    sched.t = ConstantSeq{-0.1};
    CHECK_THROWS(sched.t_at(1));
    sched.t = ConstantSeq{0.5};
    CHECK(sched.t_at(3) == 0.5);

    sched.eta = ConstantSeq{-1.0};
    CHECK_THROWS(sched.eta_at(2));

    // power decay evaluates index 0 as index 1 (0-indexed sequences stay finite)
    sched.delta = PowerDecaySeq{0.3, 2.0};
    CHECK(sched.delta_at(0) == doctest::Approx(0.3));
    CHECK(sched.delta_at(2) == doctest::Approx(0.075));

    // explicit lists are 0 past the end
    sched.eta = ExplicitSeq{{0.1, 0.2}, 1};
    CHECK(sched.eta_at(1) == 0.1);
    CHECK(sched.eta_at(2) == 0.2);
    CHECK(sched.eta_at(3) == 0.0);
    CHECK(sched.eta_sup(10) == 0.2);

    // indicator: base + growth * k at the k-th listed index
    sched.eta_prime = IndicatorSeq{{5, 9}, 0.5, 0.25};
    CHECK(sched.eta_prime_at(5) == doctest::Approx(0.75));
    CHECK(sched.eta_prime_at(9) == doctest::Approx(1.0));
    CHECK(sched.eta_prime_at(7) == 0.0);
}

TEST_CASE("element rejects non-finite coefficients") {
    Element e;
    CHECK_THROWS(e.set(1, std::numeric_limits<double>::infinity()));
    CHECK_THROWS(e.set(1, std::nan("")));
}
