#include <doctest.h>

#include "bar_oracle.hpp"
#include "mmt/theatre.hpp"

using namespace mmt;

namespace {

Manifold1D path_manifold(int n) {
    return Manifold1D::from_complex(make_poset(standard_complex(StandardKind::path, n)));
}

Manifold1D circle_manifold(int n) {
    return Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, n)));
}

ConstructibleOpen before_vertex(const Manifold1D& m, int v) {
    auto order = m.strata_in_order();
    std::vector<int> pos(m.poset()->size(), -1);
    for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    std::vector<int> picked;
    for (int p = 0; p < pos[m.complex().vertex_stratum(v)]; ++p) picked.push_back(order[p]);
    return ConstructibleOpen(m.poset(), std::move(picked));
}

StopSpec1D full_stop(const Manifold1D& m) {
    return make_stop_spec(m, conormal_points(m));
}

int edge_representable_stratum(const Manifold1D& m) {
    return m.edge_between(m.vertex_order()[0], m.vertex_order()[1]);
}

} // namespace

TEST_CASE("morse characters") {
    auto p5 = path_manifold(5);
    SUBCASE("U = V gives the zero object") {
        auto u = ConstructibleOpen::star_of(p5.poset(), 0);
        MorseCharacter x = morse_character(Casting(u, u));
        CHECK(x.model.size() == 0);
        for (int t = 0; t < p5.poset()->size(); ++t)
            CHECK(cohomology(evaluate(x.cone, t)).is_zero());
    }
    SUBCASE("the character at (0,-) pairs to Z against the indicator of (0,1)") {
        // vertices a..e stand for -1, -1/2, 0, 1/2, 1
        int c = *p5.complex().vertex_id("c");
        MorseCharacter x = morse_character(minimal_casting(p5, c, Sign::minus));
        // indicator of the open interval (c, e)
        std::vector<int> strata;
        int d = *p5.complex().vertex_id("d");
        int e = *p5.complex().vertex_id("e");
        strata.push_back(p5.complex().vertex_stratum(d));
        strata.push_back(p5.edge_between(c, d));
        strata.push_back(p5.edge_between(d, e));
        auto f = indicator_resolution(ConstructibleOpen(p5.poset(), strata)).complex;
        auto rep = cohomology(hom_complex(x.model, f).complex());
        CHECK(rep.total_rank() == 1);
        CHECK(rep.nonzero().size() == 1);
    }
}

TEST_CASE("casting validation") {
    auto p5 = path_manifold(5);
    int b = *p5.complex().vertex_id("b");
    int c = *p5.complex().vertex_id("c");
    SUBCASE("minimal castings validate against stops elsewhere") {
        StopSpec1D lambda = make_stop_spec(p5, {{b, Sign::plus}});
        CHECK(validate_casting_1d(p5, minimal_casting(p5, c, Sign::plus), lambda));
        CHECK(validate_casting_1d(p5, minimal_casting(p5, c, Sign::minus), lambda));
    }
    SUBCASE("a swept interior stop point in the swept direction invalidates") {
        // sweep the whole path across c: interior vertices include b and d
        Casting wide(ConstructibleOpen::empty(p5.poset()), ConstructibleOpen::whole(p5.poset()),
                     ConormalPoint{c, Sign::plus});
        CHECK(validate_casting_1d(p5, wide, make_stop_spec(p5, {})));
        CHECK_FALSE(validate_casting_1d(p5, wide, make_stop_spec(p5, {{b, Sign::plus}})));
        // opposite direction at the stop is harmless
        CHECK(validate_casting_1d(p5, wide, make_stop_spec(p5, {{b, Sign::minus}})));
    }
    SUBCASE("U not inside V is rejected at construction") {
        auto star_b = ConstructibleOpen::star_of(p5.poset(), p5.complex().vertex_stratum(b));
        auto star_d = ConstructibleOpen::star_of(p5.poset(),
                                                 p5.complex().vertex_stratum(*p5.complex().vertex_id("d")));
        CHECK_THROWS_AS(Casting(star_b, star_d), ValidationError);
    }
    SUBCASE("disconnected sweeps are invalid") {
        // U = two far stars, V = everything: difference has two runs
        auto u = ConstructibleOpen(p5.poset(), {p5.edge_between(*p5.complex().vertex_id("a"), b)});
        auto v = ConstructibleOpen::whole(p5.poset());
        Casting cast(u, v, ConormalPoint{c, Sign::plus});
        CHECK_FALSE(validate_casting_1d(p5, cast, make_stop_spec(p5, {})));
    }
}

TEST_CASE("auto casting counts") {
    SUBCASE("empty stop on the interval yields a character at every point") {
        auto ctx = auto_cast_1d(path_manifold(2), StopSpec1D{});
        CHECK(ctx.manifold()->vertex_count() == 5);
        // 2 points per interior vertex, 1 inward point per end vertex
        CHECK(ctx.characters().size() == 8);
        for (const auto& x : ctx.characters()) CHECK(x.point().has_value());
    }
    SUBCASE("one kept point on the circle") {
        auto c3 = circle_manifold(3);
        int a = *c3.complex().vertex_id("a");
        auto ctx = auto_cast_1d(c3, make_stop_spec(c3, {{a, Sign::plus}}));
        CHECK(ctx.manifold()->vertex_count() == 12);
        CHECK(ctx.characters().size() == 23);
    }
    SUBCASE("full original conormal still casts at every fresh vertex") {
        auto c3 = circle_manifold(3);
        auto ctx = auto_cast_1d(c3, full_stop(c3));
        CHECK(ctx.characters().size() == 18); // 2 * (12 - 3)
    }
}

TEST_CASE("quotient hom: empty character list is plain hom") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    QuotientContext ctx(p3, {});
    auto pe = representable(p3, *p3->complex().stratum_by_key("a|b"));
    auto pv = representable(p3, *p3->complex().stratum_by_key("b"));
    for (int level : {0, 1, 3}) {
        CHECK(quotient_hom(ctx, pe, pv, level) == cohomology(hom_complex(pe, pv).complex()));
        CHECK(quotient_hom(ctx, pv, pe, level) == cohomology(hom_complex(pv, pe).complex()));
    }
}

TEST_CASE("interval wrapped endomorphisms stabilize to Z") {
    auto ctx = auto_cast_1d(path_manifold(2), StopSpec1D{});
    auto edge = representable(ctx.poset(), edge_representable_stratum(*ctx.manifold()));
    CohomologyReport expect;
    expect.set(0, {1, {}});
    for (int level : {1, 2, 3}) {
        auto rep = quotient_hom(ctx, edge, edge, level);
        CAPTURE(level);
        CHECK(rep == expect);
    }
}

TEST_CASE("bar assembly agrees with the brute-force oracle") {
    auto ctx = auto_cast_1d(path_manifold(2), StopSpec1D{});
    auto edge = representable(ctx.poset(), edge_representable_stratum(*ctx.manifold()));
    auto vert = representable(ctx.poset(),
                              ctx.manifold()->complex().vertex_stratum(ctx.manifold()->vertex_order()[2]));
    for (int level : {0, 1, 2}) {
        CHECK(quotient_hom(ctx, edge, edge, level) ==
              mmtoracle::oracle_quotient_hom(ctx, edge, edge, level));
        CHECK(quotient_hom(ctx, edge, vert, level) ==
              mmtoracle::oracle_quotient_hom(ctx, edge, vert, level));
    }
}

TEST_CASE("tower replacement") {
    auto ctx = auto_cast_1d(path_manifold(2), StopSpec1D{});
    SUBCASE("the zero object is already orthogonal") {
        auto res = tower_replacement(ctx, TwistedComplex::zero(ctx.poset()), 3);
        CHECK(res.stabilized);
        CHECK(res.iterations == 0);
    }
    SUBCASE("the interval edge stabilizes and matches the quotient answer") {
        auto edge = representable(ctx.poset(), edge_representable_stratum(*ctx.manifold()));
        auto res = tower_replacement(ctx, edge, 8);
        REQUIRE(res.stabilized);
        CHECK(is_right_orthogonal(ctx, res.replacement));
        auto rep = cohomology(hom_complex(edge, res.replacement).complex());
        CohomologyReport expect;
        expect.set(0, {1, {}});
        CHECK(rep == expect);
    }
    SUBCASE("the circle does not stabilize") {
        auto cctx = auto_cast_1d(circle_manifold(3), StopSpec1D{});
        auto edge = representable(cctx.poset(), edge_representable_stratum(*cctx.manifold()));
        auto res = tower_replacement(cctx, edge, 3);
        CHECK_FALSE(res.stabilized);
        CHECK(res.iterations == 3);
    }
}

TEST_CASE("peeling exceptional collections") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    std::vector<TwistedComplex> reps;
    for (int s = 0; s < p3->size(); ++s) reps.push_back(representable(p3, s));
    SUBCASE("representables decompose indicator resolutions") {
        for (int mask = 1; mask < 4; ++mask) {
            auto u = ConstructibleOpen::whole(p3);
            auto res = indicator_resolution(u);
            auto rep = peel(reps, res.complex);
            CHECK(rep.generated);
            CHECK(rep.steps <= p3->size());
            for (int t = 0; t < p3->size(); ++t)
                CHECK(cohomology(evaluate(rep.residual, t)).is_zero());
            break;
        }
    }
    SUBCASE("a representable peels in one nonzero step") {
        int e = *p3->complex().stratum_by_key("a|b");
        auto rep = peel(reps, reps[e]);
        CHECK(rep.generated);
        for (int i = 0; i < p3->size(); ++i) {
            if (i == e) {
                CHECK(rep.multiplicities[i].at(0) == DegreeData{1, {}});
            } else {
                CHECK(rep.multiplicities[i].is_zero());
            }
        }
        CHECK(rep.residual.size() == 0);
    }
    SUBCASE("a missing representable is detected as not generated") {
        auto p2 = make_poset(standard_complex(StandardKind::path, 2));
        int a = *p2->complex().stratum_by_key("a");
        int b = *p2->complex().stratum_by_key("b");
        int ab = *p2->complex().stratum_by_key("a|b");
        std::vector<TwistedComplex> partial{representable(p2, a), representable(p2, ab)};
        auto rep = peel(partial, representable(p2, b));
        CHECK_FALSE(rep.generated);
    }
    SUBCASE("non-exceptional input is rejected") {
        std::vector<TwistedComplex> bad{reps[0], reps[0]};
        CHECK_THROWS_AS(peel(bad, reps[0]), ValidationError);
    }
}

TEST_CASE("casting independence at a shared point") {
    auto ctx = auto_cast_1d(path_manifold(2), StopSpec1D{});
    const Manifold1D& m = *ctx.manifold();
    auto vs = m.vertex_order();
    ConormalPoint at{vs[2], Sign::plus};
    // bounded sweeps of different radii around the middle vertex (rays into
    // an end would change the class by a boundary skyscraper)
    MorseCharacter r1 = morse_character(Casting(before_vertex(m, vs[2]), before_vertex(m, vs[3]), at));
    MorseCharacter r2 = morse_character(Casting(before_vertex(m, vs[1]), before_vertex(m, vs[4]), at));
    MorseCharacter r3 = morse_character(Casting(before_vertex(m, vs[2]), before_vertex(m, vs[4]), at));
    SUBCASE("identical castings are isomorphic at level 0") {
        auto res = casting_independence(ctx, r1, r1, 2);
        CHECK(res.verdict == Independence::isomorphic_at_level);
        CHECK(res.level == 0);
    }
    SUBCASE("the three pairs become isomorphic at a low level") {
        for (auto [xa, xb] : {std::pair(&r1, &r2), std::pair(&r2, &r3), std::pair(&r1, &r3)}) {
            Independence verdict = Independence::indeterminate;
            int level_used = 0;
            for (int level = 1; level <= 4 && verdict == Independence::indeterminate; ++level) {
                auto res = casting_independence(ctx, *xa, *xb, level);
                verdict = res.verdict;
                level_used = res.level;
            }
            CAPTURE(level_used);
            CHECK(verdict == Independence::isomorphic_at_level);
            CHECK(level_used <= 4);
        }
    }
}

TEST_CASE("stop removal") {
    auto p2 = path_manifold(2);
    auto ctx_full = auto_cast_1d(p2, full_stop(p2));
    SUBCASE("removing nothing changes nothing") {
        auto same = stop_removal(ctx_full, ctx_full.lambda());
        CHECK(same.characters().size() == ctx_full.characters().size());
    }
    SUBCASE("one-shot and stepwise removal agree with direct casting") {
        auto ctx_direct = auto_cast_1d(p2, StopSpec1D{});
        auto ctx_removed = stop_removal(ctx_full, StopSpec1D{});
        CHECK(ctx_removed.characters().size() == ctx_direct.characters().size());
        // drop only (a,+) first, then everything
        const Manifold1D& m = *ctx_full.manifold();
        std::vector<ConormalPoint> partial = ctx_full.lambda().points;
        partial.erase(partial.begin());
        auto ctx_step1 = stop_removal(ctx_full, make_stop_spec(m, partial));
        auto ctx_step2 = stop_removal(ctx_step1, StopSpec1D{});
        CHECK(ctx_step2.characters().size() == ctx_removed.characters().size());

        auto edge = representable(ctx_full.poset(), edge_representable_stratum(m));
        for (int level : {0, 1, 2}) {
            auto a = quotient_hom(ctx_removed, edge, edge, level);
            CHECK(a == quotient_hom(ctx_step2, edge, edge, level));
            CHECK(a == quotient_hom(ctx_direct, edge, edge, level));
        }
    }
    SUBCASE("the smaller stop must be a subset") {
        auto ctx0 = auto_cast_1d(p2, StopSpec1D{});
        CHECK_THROWS_AS(stop_removal(ctx0, full_stop(*ctx0.manifold())), ValidationError);
    }
}

TEST_CASE("resource ceilings bite") {
    auto p2 = path_manifold(2);
    ResourceLimits tight;
    tight.bar_generators = 10;
    auto ctx = auto_cast_1d(p2, StopSpec1D{}, tight);
    auto edge = representable(ctx.poset(), edge_representable_stratum(*ctx.manifold()));
    CHECK_THROWS_AS(quotient_hom(ctx, edge, edge, 2), ResourceError);
}
