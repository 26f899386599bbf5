#include <doctest.h>

#include <cmath>

#include "gawcga/dictionary.hpp"
#include "support.hpp"

using namespace gawcga;
using testsupport::close_rel;

TEST_CASE("canonical dictionary: atoms and sup") {
    Space l2{LqSpace(2.0)};
    Dictionary d = Dictionary::canonical(l2, 1, 3);
    CHECK(d.base_atom_count() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(norm(l2, d.base_atom(i).atom) == doctest::Approx(1.0).epsilon(1e-12));

    Functional f(Element::dense({0.6, 0.8}, 1));
    SupResult sup = d.sup_functional(f);
    CHECK(sup.value == doctest::Approx(0.8));
    CHECK(sup.argmax.index == 2);
    CHECK(sup.argmax.sign == +1);

    // all-zero functional: tie-break to +e_{i0}
    SupResult zero = d.sup_functional(Functional{});
    CHECK(zero.value == 0.0);
    CHECK(zero.argmax.index == 1);
    CHECK(zero.argmax.sign == +1);

    // negative coefficient picks the flipped sign
    Functional g(Element::basis(2, -0.5));
    SupResult sneg = d.sup_functional(g);
    CHECK(sneg.value == doctest::Approx(0.5));
    CHECK(sneg.argmax.sign == -1);
    CHECK(apply(g, sneg.argmax.atom) == doctest::Approx(0.5));

    Dictionary d0 = Dictionary::canonical(l2, 0, 0);
    CHECK(d0.base_atom_count() == 1);
    CHECK(d0.base_atom(0).index == 0);
}

TEST_CASE("canonical dictionary: validation") {
    Space l2{LqSpace(2.0)};
    CHECK_THROWS(Dictionary::canonical(l2, 2, 5));
    CHECK_THROWS(Dictionary::canonical(l2, 1, 0));
    Space x{SmoothSpaceX::with_default_pseq(8)};
    CHECK_THROWS_AS(Dictionary::canonical(x, 0, 5), HorizonExceeded);
    CHECK_THROWS_AS(Dictionary::canonical(x, 1, 9), HorizonExceeded);
}

TEST_CASE("g dictionary: norms match the closed forms") {
    SmoothSpaceX x = SmoothSpaceX::with_default_pseq(24);
    Dictionary d = Dictionary::g_dictionary(x, 20);
    CHECK(d.base_atom_count() == 21);

    Space sx{x};
    for (std::size_t i = 0; i < d.base_atom_count(); ++i)
        CHECK(norm(sx, d.base_atom(i).atom) == doctest::Approx(1.0).epsilon(1e-12));

    const double g0_norm = std::pow(1.0 + std::pow(2.0, x.p(3) / x.p(2)), 1.0 / x.p(3));
    Element g0 = Element::dense({1.0, 1.0, 1.0}, 1);
    CHECK(x.x_norm(g0) == doctest::Approx(g0_norm).epsilon(1e-13));

    for (std::size_t k = 1; k <= 20; ++k) {
        Element gk;
        gk.set(k, 1.0);
        gk.set(k + 1, 1.0);
        const double nk = x.x_norm(gk);
        CHECK(nk == doctest::Approx(std::pow(2.0, 1.0 / x.p(k + 1))).epsilon(1e-13));
        // the ordering the divergence argument needs
        CHECK(nk < g0_norm);
    }

    CHECK_THROWS_AS(Dictionary::g_dictionary(x, 24), HorizonExceeded);
}

TEST_CASE("g dictionary: sup over the g atoms") {
    SmoothSpaceX x = SmoothSpaceX::with_default_pseq(10);
    Dictionary d = Dictionary::g_dictionary(x, 6);
    // F = e_1^*: F(g_0) = F(g_1) = 1, everything else 0; the smaller-norm
    // atom g_1 wins after normalization.
    Functional f(Element::basis(1));
    SupResult sup = d.sup_functional(f);
    CHECK(sup.argmax.index == 1);
    CHECK(sup.value == doctest::Approx(1.0 / std::pow(2.0, 1.0 / x.p(2))).epsilon(1e-12));
}

TEST_CASE("explicit dictionary normalizes") {
    Space l2{LqSpace(2.0)};
    Dictionary d = Dictionary::explicit_list(l2, {Element::dense({3.0, 4.0}, 1)});
    CHECK(norm(l2, d.base_atom(0).atom) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(Dictionary::explicit_list(l2, {Element{}}), ZeroElementError);
}

TEST_CASE("weak_select") {
    Space l2{LqSpace(2.0)};
    Dictionary d = Dictionary::canonical(l2, 1, 2);
    Functional f(Element::dense({0.6, 0.8}, 1));

    // t=1, t'=0: the argmax
    CHECK(weak_select(d, f, 1.0, 0.0).index == 2);

    // preference accepted when it meets the inequality
    SelectedAtom e1{Element::basis(1), 1, +1};
    CHECK(weak_select(d, f, 0.5, 0.0, &e1).index == 1);   // 0.6 >= 0.5*0.8
    CHECK(weak_select(d, f, 1.0, 0.3, &e1).index == 1);   // 0.6 >= 0.8-0.3
    CHECK(weak_select(d, f, 1.0, 0.0, &e1).index == 2);   // 0.6 < 0.8: fall back

    CHECK_THROWS(weak_select(d, f, 1.5, 0.0));
    CHECK_THROWS(weak_select(d, f, 0.5, -1.0));

    // the selected atom always satisfies the stated inequality post hoc
    Rng rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        Functional rf(testsupport::random_element(rng, 6, 1, 2));
        const double t = rng.uniform();
        const double tp = rng.uniform(0.0, 0.5);
        SelectedAtom pref{Element::basis(1 + rng.uniform_index(0, 1),
                                         rng.next() & 1 ? 1.0 : -1.0),
                          1, +1};
        SelectedAtom got = weak_select(d, rf, t, tp, &pref);
        SupResult sup = d.sup_functional(rf);
        CHECK(apply(rf, got.atom) >= t * sup.value - tp - 1e-12);
    }
}
