#include <gtest/gtest.h>

#include "support.hpp"

using namespace stringy;
using namespace stringy::dualgraph;
using exact::Rational;
using testsupport::Gen;

namespace m = stringy::models;

TEST(IntersectionMatrix, Examples) {
    ResolutionGraph a1 = m::a_chain(1);
    EXPECT_EQ(intersection_matrix(a1), (IntMatrix{{-2}}));

    ResolutionGraph two;
    two.curves = {m::exceptional("A", 0, -3), m::exceptional("B", 0, -3)};
    two.nodes = {{"A", "B"}};
    EXPECT_EQ(intersection_matrix(two), (IntMatrix{{-3, 1}, {1, -3}}));
    auto minors = intersection_minors(intersection_matrix(two));
    EXPECT_EQ(minors, (std::vector<Rational>{Rational(-3), Rational(8)}));

    ResolutionGraph zero;
    zero.curves = {m::exceptional("Z", 0, 0)};
    try {
        intersection_matrix(zero);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotNegativeDefinite);
    }
    // Affine D4 is only semi-definite.
    ResolutionGraph d4;
    d4.curves = {m::exceptional("C", 0, -2)};
    for (int i = 0; i < 4; ++i) {
        d4.curves.push_back(m::exceptional("L" + std::to_string(i), 0, -2));
        d4.nodes.emplace_back("C", "L" + std::to_string(i));
    }
    EXPECT_THROW(intersection_matrix(d4), Error);
}

TEST(IntersectionMatrix, Validation) {
    ResolutionGraph g = m::a_chain(2);
    g.nodes.emplace_back("E1", "E1");
    EXPECT_THROW(g.validate(), Error);
    ResolutionGraph h = m::a_chain(2);
    h.nodes.emplace_back("E1", "X");
    EXPECT_THROW(h.validate(), Error);
}

TEST(Discrepancies, Examples) {
    EXPECT_EQ(solve_discrepancies(m::a_chain(1)).coeff("E1"), Rational(0));
    EXPECT_EQ(solve_discrepancies(m::cone(5)).coeff("C"), Rational(-3));
    ResolutionGraph two;
    two.curves = {m::exceptional("A", 0, -3), m::exceptional("B", 0, -3)};
    two.nodes = {{"A", "B"}};
    auto s = solve_discrepancies(two);
    EXPECT_EQ(s.coeff("A"), Rational(-1, 2));
    EXPECT_EQ(s.coeff("B"), Rational(-1, 2));
}

TEST(Discrepancies, ConeFamily) {
    for (std::int64_t d = 2; d <= 8; ++d) EXPECT_EQ(solve_discrepancies(m::cone(d)).coeff("C"), Rational(2 - d));
}

TEST(Discrepancies, RejectsContradictingCoefficient) {
    ResolutionGraph g = m::a_chain(1);
    g.curves[0].coeff = Rational(1);
    EXPECT_THROW(solve_discrepancies(g), Error);
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify(solve_discrepancies(m::a_chain(1))), Singularity::LogTerminal);
    ResolutionGraph elliptic;
    elliptic.curves = {m::exceptional("E", 1, -1)};
    auto se = solve_discrepancies(elliptic);
    EXPECT_EQ(se.coeff("E"), Rational(-1));
    EXPECT_EQ(classify(se), Singularity::StrictlyLogCanonical);
    EXPECT_EQ(classify(solve_discrepancies(m::cone(5))), Singularity::NotLogCanonical);
}

TEST(Admissible, Examples) {
    ResolutionGraph elliptic;
    elliptic.curves = {m::exceptional("E", 1, -1)};
    std::string why;
    EXPECT_FALSE(is_admissible(solve_discrepancies(elliptic), &why));
    EXPECT_NE(why.find("genus 1"), std::string::npos);

    EXPECT_TRUE(is_admissible(solve_discrepancies(m::a_chain(4))));
    EXPECT_TRUE(is_admissible(solve_discrepancies(m::cyclic_quotient(7, 3))));

    // Chain ending in a -1 rational curve meeting one curve.
    ResolutionGraph chain = m::cone(4);
    chain = blowup(chain, Site::point_on("C"));
    EXPECT_EQ(chain.coeff("B1"), Rational(-1));
    auto resolved = solve_discrepancies([&] {
        ResolutionGraph t = chain;
        for (auto& c : t.curves) c.coeff.reset();
        return t;
    }());
    EXPECT_EQ(resolved.coeff("B1"), Rational(-1));
    EXPECT_TRUE(is_admissible(resolved));

    // -1 curve meeting three curves.
    ResolutionGraph star;
    star.curves = {m::exceptional("T", 0, -1), m::strict("S1", Rational(-1, 3)), m::strict("S2", Rational(-1, 3)),
                   m::strict("S3", Rational(-4, 3))};
    star.nodes = {{"T", "S1"}, {"T", "S2"}, {"T", "S3"}};
    auto ss = solve_discrepancies(star);
    EXPECT_EQ(ss.coeff("T"), Rational(-1));
    EXPECT_FALSE(is_admissible(ss));
}

TEST(Blowup, Examples) {
    auto g = solve_discrepancies(m::a_chain(1));
    auto f = blowup(g, Site::free_point());
    EXPECT_EQ(f.curves.size(), 2u);
    EXPECT_EQ(f.coeff("B1"), Rational(1));
    EXPECT_EQ(f.curve("B1").self_int, -1);
    EXPECT_EQ(f.curve("E1").self_int, -2);

    ResolutionGraph two;
    two.curves = {m::exceptional("A", 0, -3), m::exceptional("B", 0, -3)};
    two.nodes = {{"A", "B"}};
    auto n = blowup(solve_discrepancies(two), Site::node("A", "B"));
    EXPECT_EQ(n.coeff("B1"), Rational(0));
    EXPECT_EQ(n.curve("A").self_int, -4);
    EXPECT_EQ(n.curve("B").self_int, -4);
    EXPECT_EQ(n.multiplicity("A", "B"), 0);

    for (std::int64_t d = 4; d <= 7; ++d) {
        auto c = blowup(solve_discrepancies(m::cone(d)), Site::point_on("C"));
        EXPECT_EQ(c.coeff("B1"), Rational(3 - d));
    }
}

TEST(Blowup, Errors) {
    auto v = solve_discrepancies(m::veys_one(2));
    try {
        blowup(v, Site::point_on("T"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BlowupAtMinusOneCurve);
    }
    try {
        blowup(v, Site::point_on("nope"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnknownSite);
    }
    EXPECT_THROW(blowup(v, Site::node("S", "S")), Error);
}

TEST(Strata, Examples) {
    auto s1 = strata(m::a_chain(1));
    EXPECT_EQ(s1.open_curves.size(), 1u);
    EXPECT_EQ(s1.open_curves[0].second, 0);
    EXPECT_TRUE(s1.nodes.empty());
    auto s2 = strata(m::a_chain(2));
    EXPECT_EQ(s2.open_curves[0].second, 1);
    EXPECT_EQ(s2.open_curves[1].second, 1);
    EXPECT_EQ(s2.nodes.size(), 1u);
    auto s3 = strata(m::a_chain(3));
    EXPECT_EQ(s3.open_curves[1].second, 2);
}

namespace {
ResolutionGraph unsolved(ResolutionGraph g) {
    for (auto& c : g.curves)
        if (c.exceptional()) c.coeff.reset();
    return g;
}
} // namespace

TEST(Properties, PullbackResidualsVanish) {
    Gen gen(21);
    for (int k = 0; k < 200; ++k) {
        auto g = testsupport::random_admissible_graph(gen);
        for (const auto& r : pullback_residuals(g)) EXPECT_TRUE(r.is_zero());
    }
}

TEST(Properties, BlowupMatchesResolve) {
    Gen gen(22);
    for (int k = 0; k < 100; ++k) {
        auto g = testsupport::random_admissible_graph(gen);
        auto h = blowup(g, testsupport::random_site(gen, g));
        auto again = solve_discrepancies(unsolved(h));
        for (const auto& c : h.curves) EXPECT_EQ(*c.coeff, again.coeff(c.id)) << c.id;
    }
}

TEST(Properties, LogTerminalPreserved) {
    Gen gen(23);
    int seen = 0;
    for (int k = 0; k < 300 && seen < 60; ++k) {
        auto g = testsupport::random_admissible_graph(gen);
        // Klt pair: boundary coefficients also above -1.
        bool klt = true;
        for (const auto& c : g.curves) klt &= *c.coeff > Rational(-1);
        if (!klt) continue;
        ++seen;
        auto h = blowup(g, testsupport::random_site(gen, g));
        EXPECT_EQ(classify(h), Singularity::LogTerminal);
    }
    EXPECT_GE(seen, 20);
}

TEST(Properties, DivisorAdmissibilityPreserved) {
    Gen gen(24);
    for (int k = 0; k < 200; ++k) {
        auto g = testsupport::random_admissible_graph(gen);
        for (int step = 0; step < 3; ++step) {
            g = blowup(g, testsupport::random_site(gen, g));
            EXPECT_TRUE(admissibility(g).divisor) << admissibility(g).diagnostic;
        }
    }
}

TEST(Admissible, PairCriterionCanFailAfterBlowup) {
    // The node blow-up of the (-1/2, -1/2) pair creates a coefficient-0 (-1)-curve.
    ResolutionGraph two;
    two.curves = {m::exceptional("A", 0, -3), m::exceptional("B", 0, -3)};
    two.nodes = {{"A", "B"}};
    auto g = solve_discrepancies(two);
    EXPECT_TRUE(is_admissible(g));
    auto h = blowup(g, Site::node("A", "B"));
    auto r = admissibility(h);
    EXPECT_TRUE(r.divisor);
    EXPECT_FALSE(r.pair);
}
