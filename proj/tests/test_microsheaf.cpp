#include <doctest.h>

#include <set>

#include "mmt/microsheaf.hpp"

using namespace mmt;

namespace {

bool is_z_in_degree_0(const CohomologyReport& rep) {
    return rep.nonzero().size() == 1 && rep.at(0) == DegreeData{1, {}};
}

std::vector<ConstructibleOpen> all_opens(const PosetPtr& poset) {
    const int n = poset->size();
    REQUIRE(n <= 16);
    std::vector<ConstructibleOpen> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<int> strata;
        for (int s = 0; s < n; ++s)
            if (mask & (1 << s)) strata.push_back(s);
        if (is_up_closed(*poset, strata)) out.emplace_back(poset, strata);
    }
    return out;
}

// open interval of strata between two vertices, in manifold order
ConstructibleOpen open_interval(const Manifold1D& m, const std::string& from, const std::string& to) {
    auto strata = m.strata_in_order();
    std::vector<int> pos(m.poset()->size(), -1);
    for (size_t i = 0; i < strata.size(); ++i) pos[strata[i]] = static_cast<int>(i);
    int x = pos[m.complex().vertex_stratum(*m.complex().vertex_id(from))];
    int y = pos[m.complex().vertex_stratum(*m.complex().vertex_id(to))];
    std::vector<int> picked;
    int total = static_cast<int>(strata.size());
    for (int p = (x + 1) % total; p != y; p = (p + 1) % total) picked.push_back(strata[p]);
    return ConstructibleOpen(m.poset(), std::move(picked));
}

} // namespace

TEST_CASE("indicator resolutions") {
    SUBCASE("evaluation property over every open of small fixtures") {
        for (auto kind : {StandardKind::path, StandardKind::circle, StandardKind::simplex}) {
            auto poset = make_poset(standard_complex(
                kind, kind == StandardKind::path ? 3 : (kind == StandardKind::circle ? 3 : 2)));
            for (const auto& u : all_opens(poset)) {
                auto res = indicator_resolution(u);
                for (int t = 0; t < poset->size(); ++t) {
                    auto rep = cohomology(evaluate(res.complex, t));
                    if (u.contains(t)) {
                        CHECK(is_z_in_degree_0(rep));
                    } else {
                        CHECK(rep.is_zero());
                    }
                }
            }
        }
    }
    SUBCASE("resolution of a star is quasi-isomorphic to the representable") {
        auto tri = make_poset(standard_complex(StandardKind::simplex, 2));
        for (int s = 0; s < tri->size(); ++s) {
            auto res = indicator_resolution(ConstructibleOpen::star_of(tri, s));
            auto ps = representable(tri, s);
            auto aug = augmentation_to_representable(res, s, ps);
            CHECK(is_closed_degree0(res.complex, ps, aug));
            CHECK(verify_quasi_iso(res.complex, ps, aug));
        }
    }
    SUBCASE("a single open edge resolves to its representable on the nose") {
        auto p3 = make_poset(standard_complex(StandardKind::path, 3));
        int e = *p3->complex().stratum_by_key("a|b");
        auto res = indicator_resolution(ConstructibleOpen(p3, {e}));
        CHECK(res.complex == representable(p3, e));
    }
    SUBCASE("the full circle resolution is the constant object") {
        auto c3 = make_poset(standard_complex(StandardKind::circle, 3));
        auto res = indicator_resolution(ConstructibleOpen::whole(c3));
        CHECK(res.complex.size() == 12);
        for (int t = 0; t < c3->size(); ++t) CHECK(is_z_in_degree_0(cohomology(evaluate(res.complex, t))));
    }
}

TEST_CASE("canonical inclusions compose exactly") {
    auto p5 = make_poset(standard_complex(StandardKind::path, 5));
    auto m = Manifold1D::from_complex(p5);
    auto u = open_interval(m, "b", "d");
    auto v = open_interval(m, "a", "e");
    auto w = ConstructibleOpen::whole(p5);
    auto ru = indicator_resolution(u), rv = indicator_resolution(v), rw = indicator_resolution(w);
    auto uv = canonical_inclusion(ru, rv);
    auto vw = canonical_inclusion(rv, rw);
    auto uw = canonical_inclusion(ru, rw);
    CHECK(is_closed_degree0(ru.complex, rv.complex, uv));
    CHECK(compose_maps(uv, vw) == uw);
    CHECK(canonical_inclusion(ru, ru) == IntegerMatrix::identity(ru.complex.size()));
    auto empty = indicator_resolution(ConstructibleOpen::empty(p5));
    CHECK(canonical_inclusion(empty, ru).is_zero());
}

TEST_CASE("sections and stalks") {
    auto c3 = make_poset(standard_complex(StandardKind::circle, 3));
    auto konst = resolve_module(PosetModule::constant(c3));
    SUBCASE("circle cohomology from the constant module") {
        auto rep = sections(ConstructibleOpen::whole(c3), konst);
        CHECK(rep.at(0) == DegreeData{1, {}});
        CHECK(rep.at(1) == DegreeData{1, {}});
        CHECK(rep.nonzero().size() == 2);
    }
    SUBCASE("sections over a star agree with the stalk") {
        for (int s = 0; s < c3->size(); ++s) {
            CHECK(sections(ConstructibleOpen::star_of(c3, s), konst) == stalk(s, konst));
            auto pe = representable(c3, *c3->complex().stratum_by_key("a|b"));
            CHECK(sections(ConstructibleOpen::star_of(c3, s), pe) == stalk(s, pe));
        }
    }
    SUBCASE("representable has no sections away from its star") {
        auto p3 = make_poset(standard_complex(StandardKind::path, 3));
        int a = *p3->complex().stratum_by_key("a");
        int bc = *p3->complex().stratum_by_key("b|c");
        CHECK(sections(ConstructibleOpen(p3, {bc}), representable(p3, a)).is_zero());
    }
    SUBCASE("stalks of the constant module are Z") {
        for (int t = 0; t < c3->size(); ++t) CHECK(is_z_in_degree_0(stalk(t, konst)));
    }
}

TEST_CASE("resolve_module") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    SUBCASE("an indicator module resolves generator-for-generator") {
        for (const auto& u : all_opens(p3)) {
            auto via_module = resolve_module(PosetModule::indicator(u));
            auto direct = indicator_resolution(u);
            CHECK(via_module == direct.complex);
        }
    }
    SUBCASE("skyscraper evaluations") {
        int b = p3->complex().vertex_stratum(*p3->complex().vertex_id("b"));
        auto sky = resolve_module(PosetModule::skyscraper(p3, b));
        for (int t = 0; t < p3->size(); ++t) {
            auto rep = cohomology(evaluate(sky, t));
            if (t == b) {
                CHECK(is_z_in_degree_0(rep));
            } else {
                CHECK(rep.is_zero());
            }
        }
    }
    SUBCASE("evaluation property for modules") {
        auto c3m = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, 3)));
        std::vector<PosetModule> modules;
        modules.push_back(PosetModule::constant(c3m.poset()));
        modules.push_back(PosetModule::local_system(c3m, -1));
        modules.push_back(PosetModule::local_system(c3m, 3));
        modules.push_back(PosetModule::skyscraper(c3m.poset(), c3m.complex().vertex_stratum(0)));
        for (const auto& mod : modules) {
            auto resolved = resolve_module(mod);
            for (int t = 0; t < c3m.poset()->size(); ++t)
                CHECK(cohomology(evaluate(resolved, t)) == cohomology(mod.value(t)));
        }
    }
    SUBCASE("local system sections match the two-term mapping-torus complex") {
        for (int n : {3, 5}) {
            auto cm = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, n)));
            for (int64_t mon : {1, -1, 2, 5}) {
                auto ls = resolve_module(PosetModule::local_system(cm, mon));
                auto rep = sections(ConstructibleOpen::whole(cm.poset()), ls);
                std::vector<Entry> es;
                if (mon != 1) es.push_back({1, 0, mon - 1});
                IntegerComplex torus({{"x", 0}, {"y", 1}}, IntegerMatrix(2, 2, es));
                CHECK(rep == cohomology(torus));
            }
        }
    }
}

TEST_CASE("microstalks across sublevel crossings") {
    auto p5 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::path, 5)));
    // the open interval between the middle vertex c and the right end e
    auto f = indicator_resolution(open_interval(p5, "c", "e")).complex;
    int c = *p5.complex().vertex_id("c");
    int d = *p5.complex().vertex_id("d");
    SUBCASE("sweeping across the interval's boundary vertex from the right sees Z") {
        auto cast = minimal_casting(p5, c, Sign::minus);
        auto rep = microstalk(cast, f);
        CHECK(rep.total_rank() == 1);
        CHECK(rep.nonzero().size() == 1);
        CHECK(rep.nonzero().begin()->second.torsion.empty());
    }
    SUBCASE("sweeping across an interior vertex of the interval sees nothing") {
        CHECK(microstalk(minimal_casting(p5, d, Sign::plus), f).is_zero());
        CHECK(microstalk(minimal_casting(p5, d, Sign::minus), f).is_zero());
    }
    SUBCASE("the constant module is invisible away from the path ends") {
        auto konst = resolve_module(PosetModule::constant(p5.poset()));
        int b = *p5.complex().vertex_id("b");
        for (Sign s : {Sign::plus, Sign::minus}) {
            CHECK(microstalk(minimal_casting(p5, b, s), konst).is_zero());
            CHECK(microstalk(minimal_casting(p5, c, s), konst).is_zero());
            CHECK(microstalk(minimal_casting(p5, d, s), konst).is_zero());
        }
        // the closed-interval constant does carry its stalk at an end: the
        // ray sweep entering at the first vertex sees it
        int a = *p5.complex().vertex_id("a");
        CHECK(microstalk(minimal_casting(p5, a, Sign::plus), konst).total_rank() == 1);
        // while the indicator of the interior is invisible there
        auto interior = indicator_resolution(open_interval(p5, "a", "e")).complex;
        CHECK(microstalk(minimal_casting(p5, a, Sign::plus), interior).is_zero());
    }
}

TEST_CASE("microsupport on 1-manifolds") {
    SUBCASE("locally constant objects have empty microsupport on circles") {
        for (int n : {3, 5}) {
            auto cm = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, n)));
            auto konst = resolve_module(PosetModule::constant(cm.poset()));
            CHECK(microsupport_1d(cm, konst).empty());
            CHECK(is_locally_constant(konst));
            for (int64_t mon : {1, -1}) {
                auto ls = resolve_module(PosetModule::local_system(cm, mon));
                CHECK(microsupport_1d(cm, ls).empty());
                CHECK(is_locally_constant(ls));
            }
        }
    }
    SUBCASE("an open arc reports exactly its two outward conormals") {
        auto c5 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, 5)));
        auto arc = open_interval(c5, "b", "d"); // contains vertex c
        auto f = indicator_resolution(arc).complex;
        CHECK_FALSE(is_locally_constant(f));
        auto ms = microsupport_1d(c5, f);
        std::set<std::pair<int, int>> got;
        for (const auto& p : ms) got.insert({p.vertex, static_cast<int>(p.sign)});
        std::set<std::pair<int, int>> expect{
            {*c5.complex().vertex_id("b"), static_cast<int>(Sign::minus)},
            {*c5.complex().vertex_id("d"), static_cast<int>(Sign::plus)},
        };
        CHECK(got == expect);
    }
    SUBCASE("a skyscraper reports both signs at its vertex") {
        auto p3 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::path, 3)));
        int b = *p3.complex().vertex_id("b");
        auto sky = resolve_module(PosetModule::skyscraper(p3.poset(), p3.complex().vertex_stratum(b)));
        auto ms = microsupport_1d(p3, sky);
        REQUIRE(ms.size() == 2);
        CHECK(ms[0] == ConormalPoint{b, Sign::plus});
        CHECK(ms[1] == ConormalPoint{b, Sign::minus});
    }
}

TEST_CASE("refinement functors") {
    auto p3 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::path, 3)));
    auto sub = subdivide_1d(p3);
    const auto& r = sub.map;
    SUBCASE("pushforward sends representables to representables") {
        for (int s = 0; s < r.source->size(); ++s)
            CHECK(refinement_pushforward(r, representable(r.source, s)) ==
                  representable(r.target, r.image[s]));
    }
    SUBCASE("pushforward respects composition of refinements") {
        auto sub2 = subdivide_1d(sub.refined);
        auto composite = compose(sub.map, sub2.map);
        for (int s = 0; s < sub2.map.source->size(); ++s) {
            auto obj = representable(sub2.map.source, s);
            CHECK(refinement_pushforward(composite, obj) ==
                  refinement_pushforward(sub.map, refinement_pushforward(sub2.map, obj)));
        }
    }
    SUBCASE("comparison maps are quasi-isomorphisms") {
        for (const auto& u : all_opens(p3.poset())) {
            auto cm = comparison_map(r, u);
            CHECK(verify_quasi_iso(cm.source, cm.target, cm.map));
        }
    }
    SUBCASE("pullback preserves evaluations") {
        auto c3 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, 3)));
        auto subc = subdivide_1d(c3);
        auto ls = resolve_module(PosetModule::local_system(c3, -1));
        auto pulled = pullback_object(subc.map, ls);
        for (int s = 0; s < subc.map.source->size(); ++s)
            CHECK(cohomology(evaluate(pulled, s)) == cohomology(evaluate(ls, subc.map.image[s])));
    }
}

TEST_CASE("minimal castings sweep exactly their target vertex") {
    auto p5 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::path, 5)));
    int a = *p5.complex().vertex_id("a");
    SUBCASE("at the path boundary the sweep starts from nothing") {
        auto cast = minimal_casting(p5, a, Sign::plus);
        CHECK(cast.u.strata().empty());
        CHECK(cast.v.strata().size() == 2); // vertex a and its edge
        // the outward direction at a path end is not a conormal point
        CHECK_THROWS_AS(minimal_casting(p5, a, Sign::minus), ValidationError);
    }
    SUBCASE("interior sweeps gain one vertex and one edge") {
        int c = *p5.complex().vertex_id("c");
        auto cast = minimal_casting(p5, c, Sign::plus);
        CHECK(cast.u.strata().size() == 4); // everything strictly before c
        CHECK(cast.v.strata().size() == 6); // everything strictly before d
    }
    SUBCASE("circle minimal castings have single-edge U and three-stratum V") {
        auto c5 = Manifold1D::from_complex(make_poset(standard_complex(StandardKind::circle, 5)));
        int c = *c5.complex().vertex_id("c");
        for (Sign s : {Sign::plus, Sign::minus}) {
            auto cast = minimal_casting(c5, c, s);
            CHECK(cast.u.strata().size() == 1);
            CHECK(cast.v.strata().size() == 3);
        }
    }
}
