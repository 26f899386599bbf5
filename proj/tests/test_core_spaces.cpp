#include <doctest.h>

#include <cmath>

#include "gawcga/lq_space.hpp"
#include "support.hpp"

using namespace gawcga;
using testsupport::close_rel;
using testsupport::random_element;

TEST_CASE("element: zeros are pruned and equality is canonical") {
    Element a;
    a.set(3, 1.5);
    a.set(7, 0.0);
    Element b;
    b.set(3, 1.5);
    CHECK(a == b);
    CHECK(a.support_size() == 1);
    CHECK(a.max_index() == 3);
    CHECK(a[7] == 0.0);

    Element c = a - b;
    CHECK(c.is_zero());
    CHECK(c == Element{});
}

TEST_CASE("element: arithmetic") {
    Element x = Element::dense({1.0, 2.0}, 0);
    Element y = Element::dense({-1.0, 0.5}, 1);
    Element s = x + y;
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 1.0);
    CHECK(s[2] == 0.5);
    CHECK((2.0 * x)[1] == 4.0);
    CHECK((-x)[0] == -1.0);
}

TEST_CASE("apply: coordinate pairing") {
    Functional f(Element::dense({0.6, 0.8}, 1));
    CHECK(apply(f, Element::basis(1)) == doctest::Approx(0.6));
    CHECK(apply(Functional{}, random_element(*[] {
        static Rng rng(1);
        return &rng;
    }())) == 0.0);
    Functional cancel(Element::dense({1.0, -1.0}, 1));
    CHECK(apply(cancel, Element::dense({2.0, 2.0}, 1)) == 0.0);
}

TEST_CASE("dual_exponent") {
    CHECK(dual_exponent(2.0) == doctest::Approx(2.0));
    CHECK(dual_exponent(4.0 / 3.0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(1.0 / dual_exponent(4.0 / 3.0) + 3.0 / 4.0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dual_exponent(1.0001) == doctest::Approx(10001.0).epsilon(1e-9));
    CHECK_THROWS_AS(dual_exponent(1.0), ExponentOutOfRange);
    CHECK_THROWS_AS(dual_exponent(0.5), ExponentOutOfRange);

    // involution
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double q = 1.0 + rng.uniform(1e-3, 9.0);
        CHECK(close_rel(dual_exponent(dual_exponent(q)), q, 1e-12));
    }
}

TEST_CASE("lq_norm: spot values") {
    LqSpace l2(2.0);
    CHECK(lq_norm(l2, Element::dense({3.0, 4.0}, 1)) == doctest::Approx(5.0));
    CHECK(lq_norm(l2, Element{}) == 0.0);
    LqSpace l3(3.0);
    CHECK(lq_norm(l3, Element::dense({1.0, 1.0}, 1)) ==
          doctest::Approx(std::pow(2.0, 1.0 / 3.0)).epsilon(1e-12));
    // cross-check by direct summation over coordinates
    CHECK(lq_norm(l3, Element::dense({1.0, 1.0}, 1)) ==
          doctest::Approx(std::pow(1.0 + 1.0, 1.0 / 3.0)));
}

TEST_CASE("lq_norm: axioms on random sparse elements") {
    Rng rng(2024);
    for (double q : {1.3, 2.0, 3.5}) {
        LqSpace space(q);
        for (int trial = 0; trial < 2000; ++trial) {
            Element x = random_element(rng);
            Element y = random_element(rng);
            const double nx = lq_norm(space, x);
            const double ny = lq_norm(space, y);
            const double nxy = lq_norm(space, x + y);
            CHECK(nxy <= (nx + ny) * (1.0 + 1e-12));  // triangle
            const double lambda = rng.uniform(-3.0, 3.0);
            CHECK(close_rel(lq_norm(space, lambda * x), std::fabs(lambda) * nx, 1e-12,
                            1e-300));  // homogeneity
            CHECK(nx > 0.0);           // definiteness on nonzero inputs
        }
    }
}

TEST_CASE("lq_norming_functional: spot values") {
    LqSpace l2(2.0);
    Element x34 = Element::dense({3.0, 4.0}, 1);
    Functional f = lq_norming_functional(l2, x34);
    CHECK(f.coeffs[1] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(f.coeffs[2] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(apply(f, x34) == doctest::Approx(5.0).epsilon(1e-12));

    LqSpace l3(3.0);
    Element ones = Element::dense({1.0, 1.0}, 1);
    Functional f3 = lq_norming_functional(l3, ones);
    const double expected = std::pow(2.0, -2.0 / 3.0);
    CHECK(f3.coeffs[1] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(f3.coeffs[2] == doctest::Approx(expected).epsilon(1e-12));
    // dual norm by direct p-sum, p = 3/2
    const double p = dual_exponent(3.0);
    const double dn = std::pow(2.0 * std::pow(expected, p), 1.0 / p);
    CHECK(dn == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lq_dual_norm(l3, f3) == doctest::Approx(1.0).epsilon(1e-12));

    Functional fb = lq_norming_functional(l2, Element::basis(7));
    CHECK(fb.coeffs == Element::basis(7));

    CHECK_THROWS_AS(lq_norming_functional(l2, Element{}), ZeroElementError);
}

TEST_CASE("lq: norming contract and Hoelder on random inputs") {
    Rng rng(7);
    for (double q : {1.2, 1.5, 2.0, 4.0}) {
        LqSpace space(q);
        for (int trial = 0; trial < 2000; ++trial) {
            Element x = random_element(rng);
            Functional f = lq_norming_functional(space, x);
            CHECK(close_rel(apply(f, x), lq_norm(space, x), 1e-10));
            CHECK(close_rel(lq_dual_norm(space, f), 1.0, 1e-10));

            Element y = random_element(rng);
            Functional g(random_element(rng));
            CHECK(std::fabs(apply(g, y)) <=
                  lq_dual_norm(space, g) * lq_norm(space, y) * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("lq_norm: extreme coefficient scales stay finite") {
    LqSpace l4(4.0);
    Element x;
    x.set(1, 1e200);
    x.set(2, 1e-200);
    const double n = lq_norm(l4, x);
    CHECK(std::isfinite(n));
    CHECK(n == doctest::Approx(1e200));
    Functional f = lq_norming_functional(l4, x);
    CHECK(std::isfinite(f.coeffs[1]));
    CHECK(close_rel(apply(f, x), n, 1e-10));
}
