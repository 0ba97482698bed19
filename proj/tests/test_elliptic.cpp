#include <gtest/gtest.h>

#include "stringy/elliptic.hpp"
#include "support.hpp"

using namespace stringy;
using namespace stringy::elliptic;
using exact::QLaurent;
using exact::Rational;
using exact::RatExpr;
using exact::Var;
using testsupport::Gen;

namespace {

RatExpr Y(const Rational& e) { return RatExpr(QLaurent::var(Var::Y, e)); }
RatExpr parse(const char* s) { return exact::parse_ratexpr(s); }

toric::Fan2D random_fan(Gen& gen, long max_blowups = 2) {
    toric::Fan2D f = gen.coin() ? toric::p2() : (gen.coin() ? toric::p1xp1() : toric::hirzebruch(gen.integer(0, 2)));
    long blowups = gen.integer(0, max_blowups);
    for (long k = 0; k < blowups; ++k)
        f = toric::blowup_fan(f, static_cast<std::size_t>(gen.integer(0, static_cast<long>(f.size()) - 1)));
    return f;
}

toric::ToricPair random_pair(Gen& gen, long max_blowups = 2) {
    toric::ToricPair p{random_fan(gen, max_blowups), {}};
    for (std::size_t i = 0; i < p.fan.size(); ++i)
        p.coeffs.push_back(gen.coin() ? Rational(0) : gen.rational_except(Rational(-1), 4, 3));
    return p;
}

toric::ToricPair random_cy_pair(Gen& gen) {
    for (;;) {
        auto f = random_fan(gen);
        lattice::RVec2 m{gen.rational(3, 3), gen.rational(3, 3)};
        toric::ToricPair p{f, {}};
        bool ok = true;
        for (const auto& v : f.rays) {
            p.coeffs.push_back(lattice::pair(m, v) - Rational(1));
            ok &= p.coeffs.back() != Rational(-1);
        }
        if (ok) return p;
    }
}

QSeries at_t_one(const QSeries& s) {
    return s.map([](const RatExpr& c) { return exact::limit_at_one(c, Var::Z); });
}

RatExpr global_chi_y(const dualgraph::ResolutionGraph& g) {
    auto amb = RatExpr(efn::w_minus_one() * efn::w_minus_one());
    return exact::chi_y_specialize(efn::e_stringy(g, efn::Mode::global(amb)));
}

/// Limit t -> 0 of a function of y and t: ratio of the lowest t-degree parts.
RatExpr limit_t_zero(const RatExpr& e) {
    auto low = [](const QLaurent& p) {
        std::int64_t m = p.min_exp(Var::Z);
        QLaurent r;
        for (const auto& [x, c] : p.terms())
            if (x[static_cast<int>(Var::Z)] == m) {
                auto ex = p.exponent_of(x);
                ex[static_cast<int>(Var::Z)] = Rational(0);
                r += QLaurent::monomial(c, ex);
            }
        return std::make_pair(m * 1.0 / p.scales()[static_cast<int>(Var::Z)], r);
    };
    auto [dn, n] = low(e.num());
    auto [dd, d] = low(e.den());
    EXPECT_EQ(dn, dd);
    return RatExpr(n, d);
}

/// Triple-product oracle: theta(x) = -xi^(-1/2) sum_k (-1)^k q^(k(k-1)/2) xi^k / prod (1 - q^n).
std::vector<QLaurent> theta_oracle(const Rational& alpha, const Rational& m, long order) {
    auto xi = [&](const Rational& p) {
        exact::RExps e;
        e[static_cast<int>(Var::Y)] = alpha * p;
        e[static_cast<int>(Var::Z)] = m * p;
        return QLaurent::monomial(Rational(1), e);
    };
    std::vector<QLaurent> c(static_cast<std::size_t>(order + 1));
    for (long k = -order - 2; k <= order + 2; ++k) {
        long e = k * (k - 1) / 2;
        if (e > order) continue;
        c[static_cast<std::size_t>(e)] += xi(Rational(k) - Rational(1, 2)) * Rational(k % 2 == 0 ? -1 : 1);
    }
    std::vector<long> part(static_cast<std::size_t>(order + 1), 0);
    part[0] = 1;
    for (long n = 1; n <= order; ++n)
        for (long j = n; j <= order; ++j) part[static_cast<std::size_t>(j)] += part[static_cast<std::size_t>(j - n)];
    std::vector<QLaurent> out(c.size());
    for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i = 0; i <= j; ++i) out[j] += c[j - i] * Rational(part[i]);
    return out;
}

} // namespace

TEST(Theta, LeadingCoefficient) {
    auto s = theta_q(Rational(1), Rational(0), 2);
    EXPECT_EQ(s.q0(), Y(Rational(1, 2)) - Y(Rational(-1, 2)));
    auto t = theta_q(Rational(0), Rational(3), 0);
    EXPECT_EQ(t.q0().str(), "t^(3/2) - t^(-3/2)");
}

TEST(Theta, TripleProductOracle) {
    Gen gen(61);
    for (int k = 0; k < 100; ++k) {
        Rational a = gen.rational(4, 3), m = Rational(gen.integer(-3, 3));
        long order = gen.integer(0, 4);
        auto s = theta_q(a, m, order);
        auto o = theta_oracle(a, m, order);
        for (long n = 0; n <= order; ++n) EXPECT_EQ(s[static_cast<std::size_t>(n)], RatExpr(o[static_cast<std::size_t>(n)]));
    }
}

TEST(Theta, Oddness) {
    Gen gen(62);
    for (int k = 0; k < 100; ++k) {
        Rational a = gen.rational(5, 4), m = Rational(gen.integer(-3, 3));
        long order = gen.integer(0, 4);
        EXPECT_EQ(theta_q(-a, -m, order), theta_q(a, m, order) * RatExpr(-1));
    }
}

TEST(Theta, RatioAtQZero) {
    ThetaProduct<Rational> t(0, 1);
    t.mul(zarg(Rational(1)), 1);
    t.mul(zarg(Rational(2)), -1);
    detail::LocalizationSum<Rational> sum(0, 1);
    sum.add(t, Rational(1));
    EXPECT_EQ(sum.finish().q0(), (Y(Rational(1, 2)) - Y(Rational(-1, 2))) / (Y(Rational(1)) - Y(Rational(-1))));
}

TEST(DivisorFactor, ZeroCoefficientIsOne) {
    Gen gen(63);
    for (int k = 0; k < 100; ++k) {
        long order = gen.integer(0, 4);
        auto f = divisor_factor(Rational(0), Rational(gen.integer(-4, 4)), order);
        EXPECT_EQ(f, QSeries::constant(RatExpr(1), order));
        auto j = divisor_jet(Rational(0), Rational(0), order);
        EXPECT_EQ(j[0], QSeries::constant(RatExpr(1), order));
        EXPECT_TRUE(j[1].is_zero());
        EXPECT_TRUE(j[2].is_zero());
    }
}

TEST(DivisorFactor, MinusOneRejected) {
    try {
        divisor_factor(Rational(-1), Rational(1), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MinusOneCoefficient);
    }
}

TEST(DivisorFactor, QZeroMatchesGeometricFactor) {
    // At q = 0 and t -> 0 the factor is (y - 1)/(y^(a+1) - 1), the E-function
    // factor with w = uv specialized to y.
    Gen gen(64);
    for (int k = 0; k < 100; ++k) {
        Rational a = gen.rational_except(Rational(-1), 5, 4);
        auto f = divisor_factor(a, Rational(1), 0);
        auto g = exact::geometric_factor(a);
        EXPECT_EQ(limit_t_zero(f.q0()), exact::chi_y_specialize(g)) << a.str();
    }
}

TEST(DivisorFactor, MinusOneCurveFactorDisplay) {
    // a = 1 gives theta(d + 2z) theta(z) / (theta(d + z) theta(2z)).
    ThetaProduct<Rational> t(2, 1);
    t.mul(targ(Rational(1)) + zarg(Rational(2)), 1);
    t.mul(zarg(Rational(1)), 1);
    t.mul(targ(Rational(1)) + zarg(Rational(1)), -1);
    t.mul(zarg(Rational(2)), -1);
    detail::LocalizationSum<Rational> sum(2, 1);
    sum.add(t, Rational(1));
    EXPECT_EQ(divisor_factor(Rational(1), Rational(1), 2), sum.finish());
}

TEST(Tangent, JetStartsWithChiYFactor) {
    auto j = tangent_jet(0);
    EXPECT_EQ(j[0].q0(), Y(Rational(1, 2)) - Y(Rational(-1, 2)));
}

TEST(SmoothPair, ProjectivePlaneAndQuadric) {
    auto p2 = ell_smooth_pair({toric::p2(), {Rational(0), Rational(0), Rational(0)}}, 3);
    EXPECT_EQ(q0_chi_y(p2), parse("y + 1 + y^-1"));
    auto q = ell_smooth_pair({toric::p1xp1(), {Rational(0), Rational(0), Rational(0), Rational(0)}}, 1);
    EXPECT_EQ(q0_chi_y(q), parse("y + 2 + y^-1"));
    EXPECT_EQ(signature(p2, 2), Rational(1));
    EXPECT_EQ(signature(q, 2), Rational(0));
    auto f1 = ell_smooth_pair({toric::hirzebruch(1), std::vector<Rational>(4, Rational(0))}, 0);
    EXPECT_EQ(signature(f1, 2), Rational(0));
}

TEST(SmoothPair, QZeroIsHodgeChiY) {
    // y^(n/2) c_0 equals the E-function chi_y, i.e. the Hirzebruch chi_y at -y.
    Gen gen(65);
    for (int k = 0; k < 100; ++k) {
        auto p = random_pair(gen);
        auto s = ell_smooth_pair(p, 0);
        EXPECT_EQ(q0_chi_y(s) * Y(Rational(1)), global_chi_y(toric::to_graph(p)));
    }
}

TEST(SmoothPair, HirzebruchMapOnSurfaces) {
    for (const auto& f : {toric::p2(), toric::p1xp1(), toric::hirzebruch(1)}) {
        toric::ToricPair p{f, std::vector<Rational>(f.size(), Rational(0))};
        RatExpr hodge = global_chi_y(toric::to_graph(p));
        RatExpr hirzebruch = flip_y(hodge);
        EXPECT_EQ(q0_chi_y(ell_smooth_pair(p, 0)) * Y(Rational(1)), flip_y(hirzebruch));
    }
    EXPECT_EQ(flip_y(global_chi_y(toric::to_graph({toric::p2(), {Rational(0), Rational(0), Rational(0)}}))),
              parse("1 - y + y^2"));
}

TEST(SmoothPair, CalabiYauVanishes) {
    Gen gen(66);
    for (int k = 0; k < 40; ++k) {
        auto p = random_cy_pair(gen);
        EXPECT_TRUE(ell_smooth_pair(p, 2).is_zero());
    }
}

TEST(SmoothPair, AgreesWithLocalization) {
    Gen gen(67);
    for (int k = 0; k < 60; ++k) {
        auto p = random_pair(gen);
        EXPECT_EQ(ell_smooth_pair(p, 1), at_t_one(ell_toric_equivariant(p, {}, 1)));
    }
}

TEST(SmoothPair, MinusOneCurvesViaNullPerturbation) {
    Gen gen(68);
    for (int k = 0; k < 12; ++k) {
        Rational a1 = gen.rational_except(Rational(-1), 4, 3);
        auto lm = toric::local_model(gen.integer(1, 3), a1, Rational(-2) - a1);
        auto p = lm.pair;
        p.coeffs.back() = gen.rational_except(Rational(-1), 4, 3);
        auto s = ell_smooth_pair(p, 1);
        EXPECT_EQ(q0_chi_y(s) * Y(Rational(1)), global_chi_y(toric::to_graph(p)));
        EXPECT_EQ(s, at_t_one(ell_toric_equivariant(p, {}, 1)));
    }
}

TEST(SmoothPair, NullPerturbationIndependence) {
    Gen gen(69);
    for (int k = 0; k < 10; ++k) {
        std::int64_t m = gen.integer(1, 3);
        Rational a1 = gen.rational_except(Rational(-1), 4, 3);
        auto lm = toric::local_model(m, a1, Rational(-2) - a1);
        auto p = lm.pair;
        p.coeffs.back() = gen.rational_except(Rational(-1), 3, 2);
        // b_prev + b_next = m b_t; other rays are free.
        auto pert = [&](const Rational& bt, const Rational& split) {
            std::vector<Rational> b(p.fan.size());
            for (auto& x : b) x = gen.rational(3, 2);
            b[lm.e_index] = bt;
            b[p.fan.prev(lm.e_index)] = split;
            b[p.fan.next(lm.e_index)] = bt * Rational(m) - split;
            return b;
        };
        auto b1 = pert(Rational(1), gen.rational(3, 2));
        auto b2 = pert(Rational(gen.integer(1, 3), gen.integer(1, 2)) * Rational(gen.coin() ? 1 : -1), gen.rational(3, 2));
        EXPECT_EQ(ell_smooth_pair(p, 1, b1), ell_smooth_pair(p, 1, b2));
        EquivariantOptions o1, o2;
        o1.perturbation = b1;
        o2.perturbation = b2;
        EXPECT_EQ(ell_toric_equivariant(p, {}, 1, o1), ell_toric_equivariant(p, {}, 1, o2));
    }
}

TEST(SmoothPair, RejectsInvalidPerturbationAndPoles) {
    auto lm = toric::local_model(2, Rational(0), Rational(-2));
    std::vector<Rational> bad(lm.pair.fan.size(), Rational(0));
    bad[lm.e_index] = Rational(1);
    EXPECT_THROW(ell_smooth_pair(lm.pair, 1, bad), Error);
    // Neighbours of the -1 curve with a1 + a2 != -2: the epsilon limit is infinite.
    toric::ToricPair p{toric::blowup_fan(toric::p2(), 0), {Rational(1, 3), Rational(-1), Rational(1, 2), Rational(0)}};
    try {
        ell_smooth_pair(p, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PoleAtOne);
    }
    EXPECT_THROW(ell_smooth_pair({toric::p2(), {Rational(0), Rational(0), Rational(0)}}, -1), Error);
}

TEST(AdmissibleClosed, AddendSymmetry) {
    Gen gen(70);
    for (int k = 0; k < 100; ++k) {
        Rational a = gen.rational_except(Rational(-1), 6, 4);
        long order = gen.integer(0, 3);
        EXPECT_EQ(minus_one_addend(a, order), minus_one_addend(Rational(-2) - a, order));
    }
    EXPECT_TRUE(minus_one_addend(Rational(0), 2).is_zero());
}

TEST(AdmissibleClosed, DiffersFromLimitByUniversalTerm) {
    // closed - limit = m_t U(y, q) with U independent of the neighbour
    // coefficients and of the rest of the pair; U = 1 at q^0.
    auto ref = toric::local_model(1, Rational(0), Rational(-2)).pair;
    QSeries u = ell_admissible_closed(ref, 2) - ell_smooth_pair(ref, 2);
    EXPECT_EQ(u.q0(), RatExpr(1));
    EXPECT_EQ(u[1], parse("y^3 - y^2 - 5*y + 10 - 5*y^-1 - y^-2 + y^-3"));
    Gen gen(71);
    for (int k = 0; k < 8; ++k) {
        std::int64_t m = gen.integer(1, 3);
        Rational a1 = gen.rational_except(Rational(-1), 4, 3);
        auto p = toric::local_model(m, a1, Rational(-2) - a1).pair;
        p.coeffs.back() = gen.rational_except(Rational(-1), 3, 2);
        EXPECT_EQ(ell_admissible_closed(p, 2) - ell_smooth_pair(p, 2), u * RatExpr(Rational(m)));
    }
    // Without -1 curves both routes coincide.
    toric::ToricPair q{toric::p2(), {Rational(1, 2), Rational(0), Rational(-2, 3)}};
    EXPECT_EQ(ell_admissible_closed(q, 2), ell_smooth_pair(q, 2));
}

TEST(Equivariant, QZeroIsIndependentOfT) {
    Gen gen(72);
    for (int k = 0; k < 100; ++k) {
        auto p = random_pair(gen);
        auto s = ell_toric_equivariant(p, {}, 0);
        EXPECT_TRUE(z_independent(s));
    }
}

TEST(Equivariant, CalabiYauIndependentOfTAtAllOrders) {
    Gen gen(73);
    for (int k = 0; k < 100; ++k) {
        auto p = random_cy_pair(gen);
        auto s = ell_toric_equivariant(p, {}, 2);
        EXPECT_TRUE(z_independent(s));
        EXPECT_TRUE(s.is_zero());
    }
}

TEST(Equivariant, NonCalabiYauHigherCoefficientsDependOnT) {
    // The q^1 coefficient of P2 is an equivariant index of tangent bundles,
    // a nonconstant torus character.
    auto s = ell_toric_equivariant({toric::p2(), {Rational(0), Rational(0), Rational(0)}}, {}, 1);
    EXPECT_FALSE(s.q0().uses(Var::Z));
    EXPECT_TRUE(s[1].uses(Var::Z));
}

TEST(Equivariant, CocharacterChoiceIrrelevantAfterSpecialization) {
    Gen gen(74);
    for (int k = 0; k < 20; ++k) {
        auto p = random_pair(gen);
        EquivariantOptions o;
        o.cocharacter = lattice::Vec2{7, 3};
        auto a = at_t_one(ell_toric_equivariant(p, {}, 1));
        auto b = at_t_one(ell_toric_equivariant(p, {}, 1, o));
        EXPECT_EQ(a, b);
    }
    EquivariantOptions bad;
    bad.cocharacter = lattice::Vec2{1, 0};
    EXPECT_THROW(ell_toric_equivariant({toric::p2(), {Rational(0), Rational(0), Rational(0)}}, {}, 1, bad), Error);
}

TEST(Orbifold, QZeroMatchesOrbifoldEFunction) {
    Gen gen(75);
    std::vector<toric::TorusGroup> groups{toric::cyclic_group({1, 1}, 2), toric::cyclic_group({1, 2}, 3),
                                          toric::cyclic_group({0, 1}, 2)};
    auto amb = RatExpr(efn::w_minus_one() * efn::w_minus_one());
    for (int k = 0; k < 24; ++k) {
        auto p = random_pair(gen, 1);
        const auto& g = groups[static_cast<std::size_t>(k) % groups.size()];
        auto s = ell_toric_equivariant(p, g, 0);
        auto e = orbifold::e_orb(toric::orbifold_datum(p, g), efn::Mode::global(amb));
        EXPECT_EQ(q0_chi_y(s) * Y(Rational(1)), exact::chi_y_specialize(e));
    }
}

TEST(Rigidity, CalabiYauPairsVanish) {
    std::vector<toric::ToricPair> pairs{{toric::p2(), {Rational(0), Rational(0), Rational(-3)}},
                                        {toric::p1xp1(), {Rational(0), Rational(0), Rational(-2), Rational(-2)}},
                                        toric::local_model(1, Rational(1, 2), Rational(-5, 2)).pair};
    auto amb = RatExpr(efn::w_minus_one() * efn::w_minus_one());
    for (const auto& p : pairs)
        for (const auto& g : {toric::TorusGroup{}, toric::cyclic_group({1, 1}, 2), toric::cyclic_group({1, 2}, 3)}) {
            auto r = rigidity_check(p, g, 2);
            EXPECT_TRUE(r.vanishes);
            EXPECT_TRUE(r.q0_vanishes);
            EXPECT_TRUE(orbifold::e_orb(toric::orbifold_datum(p, g), efn::Mode::global(amb)).is_zero());
        }
}

TEST(Rigidity, NonCalabiYauRejected) {
    try {
        rigidity_check({toric::p1xp1(), {Rational(0), Rational(0), Rational(0), Rational(0)}}, {}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCalabiYau);
    }
    auto s = ell_toric_equivariant({toric::p1xp1(), {Rational(0), Rational(0), Rational(0), Rational(0)}}, {}, 0);
    EXPECT_FALSE(s.q0().is_zero());
}

TEST(QSeriesArith, RingLaws) {
    Gen gen(76);
    auto rand_series = [&](long order) {
        QSeries s(order);
        for (std::size_t k = 0; k < s.size(); ++k)
            if (gen.coin()) s[k] = RatExpr(gen.poly({Var::Y, Var::Z}, 3), gen.nonzero_poly({Var::Y}, 2));
        return s;
    };
    for (int k = 0; k < 100; ++k) {
        long order = gen.integer(0, 3);
        auto a = rand_series(order), b = rand_series(order), c = rand_series(order);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_TRUE((a - a).is_zero());
        EXPECT_EQ(a * QSeries::constant(RatExpr(1), order), a);
    }
}

TEST(QSeriesArith, GridsAndSerialization) {
    QSeries s(1, 2);
    s[1] = RatExpr(3);
    s[2] = parse("y");
    EXPECT_EQ(s.str(), "[[0, \"0\"], [1/2, \"3\"], [1, \"y\"]]");
    EXPECT_EQ(s.coefficient(Rational(1, 2)), RatExpr(3));
    EXPECT_EQ(s.coefficient(Rational(1, 3)), RatExpr());
    QSeries t(1, 2);
    t[2] = parse("y");
    QSeries u(1);
    u[1] = parse("y");
    EXPECT_EQ(t, u);
    t.normalize();
    EXPECT_EQ(t.qden(), 1);
}
