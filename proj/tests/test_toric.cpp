#include <gtest/gtest.h>

#include "stringy/toric.hpp"
#include "support.hpp"

using namespace stringy;
using namespace stringy::toric;
using exact::Rational;
using lattice::Vec2;
using testsupport::Gen;

namespace {

Fan2D random_fan(Gen& gen) {
    Fan2D f = gen.coin() ? p2() : (gen.coin() ? p1xp1() : hirzebruch(gen.integer(0, 3)));
    long blowups = gen.integer(0, 4);
    for (long k = 0; k < blowups; ++k) f = blowup_fan(f, static_cast<std::size_t>(gen.integer(0, static_cast<long>(f.size()) - 1)));
    return f;
}

} // namespace

TEST(Fan, SelfIntersections) {
    EXPECT_EQ(self_intersections(p2()), (std::vector<std::int64_t>{1, 1, 1}));
    EXPECT_EQ(self_intersections(p1xp1()), (std::vector<std::int64_t>{0, 0, 0, 0}));
    auto f2 = self_intersections(hirzebruch(2));
    EXPECT_EQ(f2[1], -2);
    EXPECT_EQ(f2[3], 2);
}

TEST(Fan, Validation) {
    EXPECT_THROW((Fan2D{{{1, 0}, {0, 1}}}).validate(), Error);
    EXPECT_THROW((Fan2D{{{1, 0}, {1, 1}, {0, 1}, {-1, -1}, {2, 2}}}).validate(), Error);
    EXPECT_THROW((Fan2D{{{1, 0}, {-1, -1}, {0, 1}}}).validate(), Error);
    try {
        Fan2D{{{2, 0}, {0, 1}, {-1, -1}}}.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidFan);
    }
    // Two full turns.
    Fan2D twice{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
    EXPECT_THROW(twice.validate(), Error);
}

TEST(Fan, SelfIntersectionSumIsTwelveMinusThreeN) {
    // Noether on a toric surface: sum of E_i^2 = 12 - 3 * #rays.
    Gen gen(51);
    for (int k = 0; k < 100; ++k) {
        auto f = random_fan(gen);
        auto s = self_intersections(f);
        std::int64_t sum = 0;
        for (auto x : s) sum += x;
        EXPECT_EQ(sum, 12 - 3 * static_cast<std::int64_t>(f.size()));
    }
}

TEST(Fan, BlowupInvariants) {
    Gen gen(52);
    for (int k = 0; k < 100; ++k) {
        auto f = random_fan(gen);
        auto i = static_cast<std::size_t>(gen.integer(0, static_cast<long>(f.size()) - 1));
        auto g = blowup_fan(f, i);
        EXPECT_NO_THROW(g.validate());
        EXPECT_EQ(g.size(), f.size() + 1);
        auto s = self_intersections(g), s0 = self_intersections(f);
        EXPECT_EQ(s[i + 1], -1);
        EXPECT_EQ(s[i], s0[i] - 1);
    }
    EXPECT_EQ(blowup_fan(p1xp1(), 0).rays[1], (Vec2{1, 1}));
    auto f1 = blowup_fan(p2(), 0);
    EXPECT_EQ(self_intersections(f1), (std::vector<std::int64_t>{0, -1, 0, 1}));
}

TEST(CalabiYau, Examples) {
    Rational a(2, 3), b(-5, 2);
    auto m = is_cy_pair({p1xp1(), {a, b, -a - Rational(2), -b - Rational(2)}});
    ASSERT_TRUE(m);
    EXPECT_EQ((*m)[0], a + Rational(1));
    EXPECT_EQ((*m)[1], b + Rational(1));
    auto m2 = is_cy_pair({p2(), {Rational(0), Rational(0), Rational(-3)}});
    ASSERT_TRUE(m2);
    EXPECT_EQ((*m2)[0], Rational(1));
    EXPECT_EQ((*m2)[1], Rational(1));
    EXPECT_FALSE(is_cy_pair({p1xp1(), {Rational(0), Rational(0), Rational(0), Rational(0)}}));
}

TEST(CalabiYau, CertificateResubstitution) {
    Gen gen(53);
    for (int k = 0; k < 100; ++k) {
        auto f = random_fan(gen);
        lattice::RVec2 m{gen.rational(4, 4), gen.rational(4, 4)};
        ToricPair p{f, {}};
        for (const auto& v : f.rays) p.coeffs.push_back(lattice::pair(m, v) - Rational(1));
        auto got = is_cy_pair(p);
        ASSERT_TRUE(got);
        EXPECT_EQ(*got, m);
        // Perturbing one coefficient destroys the certificate.
        p.coeffs[static_cast<std::size_t>(gen.integer(0, static_cast<long>(f.size()) - 1))] += Rational(1, 7);
        EXPECT_FALSE(is_cy_pair(p));
    }
}

TEST(LocalModel, Shape) {
    for (std::int64_t mt = 1; mt <= 5; ++mt)
        for (Rational a1 : {Rational(0), Rational(1, 2), Rational(-7, 3), Rational(3)}) {
            Rational a2 = Rational(-2) - a1;
            auto lm = local_model(mt, a1, a2);
            const auto& p = lm.pair;
            EXPECT_EQ(p.fan.size(), static_cast<std::size_t>(4 + mt));
            auto s = self_intersections(p.fan);
            EXPECT_EQ(s[lm.e_index], -mt);
            EXPECT_EQ(p.coeffs[lm.e_index], Rational(-1));
            EXPECT_EQ(p.coeffs[p.fan.prev(lm.e_index)], a1);
            EXPECT_EQ(p.coeffs[p.fan.next(lm.e_index)], a2);
            EXPECT_TRUE(is_cy_pair(p));
            // Remaining rays of P1 x P1 keep -a1-2 and -a2-2.
            EXPECT_EQ(p.coeffs[p.coeffs.size() - 2], -a1 - Rational(2));
            EXPECT_EQ(p.coeffs.back(), -a2 - Rational(2));
            auto g = to_graph(p);
            EXPECT_TRUE(dualgraph::admissibility(g).divisor);
            EXPECT_EQ(g.neighbours(ray_name(lm.e_index)).size(), 2u);
        }
    EXPECT_EQ(local_model(3, Rational(0), Rational(-2)).pair.fan.size(), 7u);
}

TEST(LocalModel, Errors) {
    try {
        local_model(2, Rational(1), Rational(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::AdjunctionViolated);
    }
    EXPECT_THROW(local_model(2, Rational(-1), Rational(-1)), Error);
    EXPECT_THROW(local_model(0, Rational(0), Rational(-2)), Error);
}

TEST(FixedPoints, DualBasis) {
    auto fp = fixed_point_data(p2());
    ASSERT_EQ(fp.size(), 3u);
    EXPECT_EQ(fp[0].weights[0], (Vec2{1, 0}));
    EXPECT_EQ(fp[0].weights[1], (Vec2{0, 1}));
    auto q = fixed_point_data(p1xp1());
    ASSERT_EQ(q.size(), 4u);
    // Each P1 x P1 fixed point has weights (+-e1*, +-e2*).
    for (const auto& x : q) {
        EXPECT_EQ(std::abs(x.weights[0][0]) + std::abs(x.weights[0][1]), 1);
        EXPECT_EQ(std::abs(x.weights[1][0]) + std::abs(x.weights[1][1]), 1);
    }
    Gen gen(54);
    for (int k = 0; k < 100; ++k) {
        auto f = random_fan(gen);
        auto d = fixed_point_data(f);
        EXPECT_EQ(d.size(), f.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            const auto& x = d[i];
            const Vec2 &a = f.rays[x.rays[0]], &b = f.rays[x.rays[1]];
            EXPECT_EQ(x.weights[0][0] * a[0] + x.weights[0][1] * a[1], 1);
            EXPECT_EQ(x.weights[0][0] * b[0] + x.weights[0][1] * b[1], 0);
            EXPECT_EQ(x.weights[1][0] * a[0] + x.weights[1][1] * a[1], 0);
            EXPECT_EQ(x.weights[1][0] * b[0] + x.weights[1][1] * b[1], 1);
            // Along the shared ray D_{i+1}, the tangent weight at the next fixed
            // point is the negative of this one.
            const auto& y = d[(i + 1) % d.size()];
            Vec2 along_here = x.weights[0], along_there = y.weights[1];
            EXPECT_EQ(along_here, lattice::mul(-1, along_there));
        }
    }
}
